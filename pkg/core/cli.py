import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from chains.zero import ZeroChain
from core.config_loader import PIPELINES, ConfigLoader, ExperimentConfig
from core.errors import (
    EXIT_ASSERTION,
    EXIT_CONFIG,
    EXIT_PASS,
    BadSpec,
    ChainforgeError,
    ConfigError,
)
from core.generators import generate_family
from core.pipeline import run_pipeline
from core.reporter import Reporter
from core.runner import CheckRunner
from core.serialization import chain_from_dict, family_from_dict, write_family
from cubical.complex import Cell, CubicalComplex
from cubical.family import VertexMap

logger = logging.getLogger("ChainForge")

# used when a pipeline runs without --config
DEFAULT_SECTIONS = {
    "localize": {"generator": {"kind": "drifting", "points": 6, "drift": 0.01, "q": 2}},
    "fill-small": {"generator": {"kind": "drifting", "points": 6, "drift": 0.01, "q": 2}},
    "avoid-ball": {
        "ambient_dim": 3,
        "generator": {"kind": "boundary-crossing", "points": 6, "crossing": 1, "q": 16,
                      "spread": 0.15},
        "delta": 0.15,
    },
    "fill-domain": {"generator": {"kind": "sweepout", "domain": "square", "points": 30, "q": 8}},
}


def setup_logging(log_level: str):
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)

    logging.basicConfig(
        level=numeric_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainforge",
        description="chainforge - mod-2 chains and parametric isoperimetric filling checks",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='Path to configuration file')
    common.add_argument('--seed', type=int, help='Master seed')
    common.add_argument('--out', type=Path, help='Output directory')
    common.add_argument('--threads', type=int, help='Worker threads for sweep points')
    common.add_argument('--log-level', default='INFO',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='Logging level')

    sub = parser.add_subparsers(dest="command", required=True)
    for name in PIPELINES:
        cmd = sub.add_parser(name, parents=[common], help=f"Run the {name} pipeline")
        cmd.add_argument('--inject-fault', action='store_true',
                         help='Corrupt the first produced filling before verification')
        cmd.add_argument('--eps', type=float, help='Override the fineness eps')
        cmd.add_argument('--delta', type=float, help='Override the admissible radius budget')
        cmd.add_argument('--dim-cap', type=int, help='Largest parameter dimension accepted')
        cmd.add_argument('--input', type=Path,
                         help='Family JSON to run on (flatnorm also takes one chain)')

    gen = sub.add_parser("generate", parents=[common], help="Write a generated family as JSON")
    gen.add_argument('--dim-cap', type=int, help='Largest parameter dimension accepted')

    sub.add_parser("run", parents=[common], help="Run a suite of checks")
    return parser


def load_experiment(args, pipeline: Optional[str] = None) -> ExperimentConfig:
    overrides = {
        "seed": args.seed,
        "threads": args.threads,
        "out": str(args.out) if args.out else None,
        "eps": getattr(args, "eps", None),
        "delta": getattr(args, "delta", None),
    }
    if getattr(args, "inject_fault", False):
        overrides["inject_fault"] = True
    if args.config is not None:
        loader = ConfigLoader(args.config)
        section = dict(loader.pipeline or {})
        pipeline = pipeline or section.get("id", "flatnorm")
        if section.get("id", pipeline) != pipeline:
            raise ConfigError(f"{args.config} configures {section['id']!r}, not {pipeline!r}")
        section["id"] = pipeline
        loader.config["pipeline"] = section
        config = loader.experiment(**overrides)
    else:
        pipeline = pipeline or "flatnorm"
        section = dict(DEFAULT_SECTIONS.get(pipeline, {}), id=pipeline)
        config = ExperimentConfig.from_mapping(section, **overrides)
    cap = getattr(args, "dim_cap", None)
    if cap is not None and config.generator.d > cap:
        raise ConfigError(f"parameter dimension {config.generator.d} exceeds --dim-cap {cap}")
    return config


def run_experiment(args) -> int:
    config = load_experiment(args, args.command)
    logger.info(f"Starting {config.pipeline} with seed {config.seed}")
    family = read_input(args.input, config) if args.input is not None else None
    cap = getattr(args, "dim_cap", None)
    if family is not None and cap is not None and family.complex.dim > cap:
        raise ConfigError(f"input parameter dimension {family.complex.dim} exceeds --dim-cap {cap}")
    report = run_pipeline(config, family)
    reporter = Reporter(Path(config.out).expanduser(), _reporting(args))
    paths = reporter.generate_all_reports(report)
    logger.info(f"{config.pipeline}: max ratio {report.ratio_max:.4g}, "
                f"{'passed' if report.passed else 'FAILED'}; summary at {paths['summary']}")
    for name, ok in report.asserts.items():
        if not ok:
            logger.error(f"assert failed: {name}")
    return report.exit_code


def read_input(path: Path, config: ExperimentConfig) -> VertexMap:
    """Family JSON, or for flatnorm a single 0-chain run as a one-vertex family."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise BadSpec(f"cannot read input {path}: {e}") from e
    if isinstance(data, dict) and "complex" in data:
        F = family_from_dict(data)
    elif config.pipeline == "flatnorm":
        chain = chain_from_dict(data)
        if not isinstance(chain, ZeroChain):
            raise BadSpec(f"flatnorm reads a 0-chain, {path} holds segments")
        point = CubicalComplex(1, 1, [Cell((0,), ())])
        F = VertexMap(point, {(0,): chain}, f"input({Path(path).name})")
    else:
        raise BadSpec(f"{config.pipeline} reads a family JSON, {path} holds a single chain")
    dims = {F[v].dim for v in F.vertices()}
    if dims != {config.n}:
        raise ConfigError(f"{path} holds chains in dimension {sorted(dims)}, "
                          f"the run is configured for {config.n}")
    logger.info(f"Input read: {path} ({len(F.vertices())} vertices)")
    return F


def run_generate(args) -> int:
    config = load_experiment(args)
    out = Path(config.out).expanduser()
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"family_{config.generator.kind}_{config.seed}.json"
    write_family(generate_family(config.generator, config.seed), path)
    logger.info(f"Family written: {path}")
    return EXIT_PASS


def run_suite(args) -> int:
    if args.config is None:
        raise ConfigError("run needs --config")
    config = ConfigLoader(args.config)
    if args.threads is not None:
        config.config["threads"] = args.threads
    logger.info(f"Starting {config.suite_name}")

    runner = CheckRunner(config, seed=args.seed, artifacts_dir=args.out)
    results = runner.run_all_checks()

    reporter = Reporter(runner.artifacts_dir, config.reporting)
    reporter.write_suite(results, config.suite_name)

    summary = runner.summary
    logger.info(f"Checks completed: {summary['passed']}/{summary['total']} passed")
    return EXIT_ASSERTION if summary['failed'] > 0 else EXIT_PASS


def _reporting(args) -> dict:
    if args.config is None:
        return {}
    return ConfigLoader(args.config).reporting


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)

    if args.config is not None and not args.config.exists():
        logger.error(f"Configuration file not found: {args.config}")
        return EXIT_CONFIG

    try:
        if args.command == "run":
            return run_suite(args)
        if args.command == "generate":
            return run_generate(args)
        return run_experiment(args)
    except ChainforgeError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
