"""Pipelines: generate a family, run one construction per sweep point, verify, collect rows."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from chains import south_pole
from chains.one import OneChain
from chains.regions import BoundaryBall
from coarea.admissible import AdmissibleFamily, certificate
from cubical.complex import Cell
from cubical.family import VertexMap, nearest_original
from fill.avoid_ball import avoid_boundary_ball
from fill.bend_cancel import bend_cancel_fill, verify_bend_cancel
from fill.domain import TriangulatedDomain, parametric_fill
from flat.norm import ABSOLUTE, ORACLE_LIMIT, flat_norm, flat_norm_oracle
from localize.constants import mass_bound, mass_exponent
from localize.family import localize_family
from localize.small_fill import fill_small_family
from core.config_loader import ExperimentConfig
from core.errors import EXIT_ASSERTION, EXIT_PASS, HardAssertionError, hard_assert
from core.generators import generate_family, spec_region
from core.seeds import task_seed
from core.serialization import payload_hash, vertex_key

logger = logging.getLogger("Pipeline")

ORACLE_TOL = 1e-9


@dataclass
class Block:
    index: int
    sweep: Dict[str, float]
    rows: List[dict] = field(default_factory=list)
    constants: Dict[str, float] = field(default_factory=dict)
    asserts: Dict[str, bool] = field(default_factory=dict)
    messages: List[str] = field(default_factory=list)
    # produced fillings or families, written by the CLI and kept out of the hash
    outputs: Dict[str, Any] = field(default_factory=dict)

    def check(self, condition: bool, name: str, message: str = "") -> None:
        self.asserts[name] = self.asserts.get(name, True) and bool(condition)
        if not condition:
            self.messages.append(f"{name}: {message}" if message else name)

    def to_dict(self) -> dict:
        return {"index": self.index, "sweep": self.sweep, "constants": self.constants,
                "asserts": self.asserts, "messages": self.messages}


@dataclass
class BoundReport:
    pipeline: str
    config: dict
    blocks: List[Block] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def rows(self) -> List[dict]:
        out = []
        for block in self.blocks:
            for row in block.rows:
                out.append(dict(row, block=block.index, **block.sweep))
        return out

    @property
    def asserts(self) -> Dict[str, bool]:
        merged: Dict[str, bool] = {}
        for block in self.blocks:
            for name, ok in block.asserts.items():
                merged[name] = merged.get(name, True) and ok
        return merged

    @property
    def ratios(self) -> np.ndarray:
        return np.array([row["ratio"] for row in self.rows if "ratio" in row], dtype=float)

    @property
    def ratio_max(self) -> float:
        ratios = self.ratios
        return float(ratios.max()) if len(ratios) else 0.0

    @property
    def ratio_p95(self) -> float:
        ratios = self.ratios
        return float(np.percentile(ratios, 95)) if len(ratios) else 0.0

    @property
    def passed(self) -> bool:
        return all(self.asserts.values())

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_ASSERTION

    def payload(self) -> dict:
        """Everything that must be reproducible; timings are left out."""
        return {
            "pipeline": self.pipeline,
            "config": {k: v for k, v in self.config.items() if k not in ("threads", "out")},
            "rows": self.rows,
            "blocks": [b.to_dict() for b in self.blocks],
        }

    @property
    def report_hash(self) -> str:
        return payload_hash(self.payload())

    def to_dict(self) -> dict:
        out = self.payload()
        out.update({
            "ratio_max": self.ratio_max,
            "ratio_p95": self.ratio_p95,
            "asserts": self.asserts,
            "passed": self.passed,
            "report_hash": self.report_hash,
        })
        return out


def ratio(mass: float, bound: float) -> float:
    return mass / bound if bound > 0 else 0.0


def drop_segment(chain: OneChain) -> OneChain:
    return OneChain(chain.segments[1:], reduced=True)


def corrupt_first(G: VertexMap) -> VertexMap:
    """Copy of G with one segment removed from the first non-empty filling."""
    values = {v: G[v] for v in G.vertices()}
    for v in G.vertices():
        if not values[v].is_empty:
            values[v] = drop_segment(values[v])
            logger.warning(f"fault injected: dropped one segment of the filling at {v}")
            break
    return VertexMap(G.complex, values, f"faulty({G.provenance})")


def difference_certs(F: VertexMap, rho: float, link: float) -> Dict[Cell, AdmissibleFamily]:
    certs = {}
    for cell in F.complex.maximal_cells():
        verts = cell.vertices()
        diffs = [F[verts[0]] + F[v] for v in verts[1:]]
        certs[cell] = certificate(diffs, rho=rho, link=link)
    return certs


def _flatnorm(cfg: ExperimentConfig, F: VertexMap, block: Block, fault: bool) -> None:
    domain = spec_region(cfg.generator)
    mode = cfg.param("mode", ABSOLUTE)
    worst = 0.0
    witnesses = {}
    for index, v in enumerate(F.vertices()):
        z = F[v]
        witness = flat_norm(z, domain, mode)
        witnesses[vertex_key(v)] = {"witness": witness, "beta": witness.beta()}
        beta = witness.beta()
        if fault and not beta.is_empty:
            beta, fault = drop_segment(beta), False
        rebuilt = witness.alpha() + beta.boundary() + witness.feet()
        block.check(rebuilt == z, "flat_witness", f"witness at {v} does not rebuild the cycle")
        oracle = witness.value
        if z.mass <= ORACLE_LIMIT:
            oracle = flat_norm_oracle(z, domain, mode)
            gap = abs(oracle - witness.value)
            worst = max(worst, gap)
            block.check(gap <= ORACLE_TOL, "flat_oracle",
                        f"matching {witness.value:.12g} != oracle {oracle:.12g} at {v}")
        block.rows.append({"x_index": index, "mass": witness.value, "bound": oracle,
                           "ratio": ratio(witness.value, oracle) if oracle > 0 else 1.0})
    block.constants["oracle_gap"] = worst
    block.outputs["witness"] = witnesses


def _localize(cfg: ExperimentConfig, F: VertexMap, block: Block, fault: bool) -> None:
    if fault:
        logger.warning("localize produces no filling; fault injection skipped")
    domain = spec_region(cfg.generator)
    F_prime, _, report = localize_family(F, cfg.eps, cfg.delta, domain, verify=True)
    block.outputs["family"] = F_prime
    p = F.complex.dim
    bound = report.max_mass_in + mass_bound(0, p, report.L, cfg.delta, cfg.eps)
    for index, v in enumerate(F_prime.complex.vertices()):
        mass = F_prime[v].mass
        block.rows.append({"x_index": index, "mass": mass, "bound": bound,
                           "ratio": ratio(mass, bound)})
    block.check(report.originals_kept, "localize_originals",
                "F' differs from F at an original vertex")
    block.check(report.b1_failures == 0, "localize_reconstruction",
                f"{report.b1_failures} samples fail the reconstruction identity")
    block.check(report.b2_failures == 0, "localize_weighted_mass",
                f"{report.b2_failures} samples exceed the weighted mass")
    block.check(report.localization.localized, "localized",
                f"{len(report.localization.violations)} localization violations")
    loc = report.localization
    block.check(loc.within(report.N_bound, cfg.delta), "localized_profile",
                f"N={loc.N} > {report.N_bound} or radius sum {loc.delta_sum:.4g} >= {cfg.delta}")
    block.constants.update({"slack": report.slack, "C": report.measured_constant(p),
                            "Q": report.Q, "N": report.localization.N})


def _fill_small(cfg: ExperimentConfig, F: VertexMap, block: Block, fault: bool) -> None:
    domain = spec_region(cfg.generator)
    certs = difference_certs(F, cfg.param("rho", 0.01), cfg.param("link", 0.2))
    tau, report = fill_small_family(F, certs, cfg.eps, cfg.delta, domain)
    if fault:
        tau = corrupt_first(tau)
    block.outputs["fillings"] = tau
    scale = (report.L / report.delta) ** mass_exponent(0, max(report.p, 1)) * report.eps
    bound = report.constant_bound * scale
    failures = 0
    for index, v in enumerate(tau.complex.vertices()):
        chain = tau[v]
        if not chain.boundary() == F[nearest_original(v, report.Q)]:
            failures += 1
        block.rows.append({"x_index": index, "mass": chain.mass, "bound": bound,
                           "ratio": ratio(chain.mass, bound)})
    block.check(failures == 0, "boundary", f"{failures} small fillings have the wrong boundary")
    block.check(report.localized_within, "fill_localized", "small filling is not localized")
    block.constants.update({"C": report.measured_constant, "Q": report.Q})


def _fill_disk(cfg: ExperimentConfig, F: VertexMap, block: Block, fault: bool) -> None:
    B = BoundaryBall(south_pole(cfg.n), cfg.param("ball_radius", 0.5))
    seed = task_seed(cfg.seed, "fill-disk", repr(cfg.r))
    G, operator, attempts = bend_cancel_fill(F, cfg.r, B, seed=seed)
    if fault:
        G = corrupt_first(G)
    block.outputs["fillings"] = G
    report = verify_bend_cancel(F, G, cfg.r, B, operator.apex, attempts)
    for row in report.rows:
        block.rows.append({k: row[k] for k in ("x_index", "k", "mass", "bound", "ratio")})
    block.constants.update({"C": report.C, "R": operator.grid.R,
                            "E": operator.grid.edge_constant()})


def _avoid_ball(cfg: ExperimentConfig, F: VertexMap, block: Block, fault: bool) -> None:
    if fault:
        logger.warning("avoid-ball produces no filling; fault injection skipped")
    certs = difference_certs(F, cfg.param("rho", 0.005), cfg.param("link", 0.2))
    F_prime, report = avoid_boundary_ball(F, certs, cfg.L, cfg.delta)
    block.outputs["fillings"] = F_prime
    for row in report.rows:
        block.rows.append({k: row[k] for k in ("x_index", "mass", "bound", "ratio")})
    block.constants.update({"max_excess": report.max_excess, "Q": report.Q,
                            "localized_radius": report.localized_radius})


def _fill_domain(cfg: ExperimentConfig, F: VertexMap, block: Block, fault: bool) -> None:
    domain = TriangulatedDomain.unit_square(int(cfg.param("divisions", 1)))
    p = int(cfg.p)
    G, report = parametric_fill(F, domain, p, seed=task_seed(cfg.seed, "fill-domain", p))
    if fault:
        G = corrupt_first(G)
    block.outputs["fillings"] = G
    failures = sum(1 for v in F.vertices() if not G[v].boundary() == F[v])
    hard_assert(failures == 0, "parametric_boundary",
                f"{failures} fillings have the wrong boundary")
    for row in report.rows:
        block.rows.append({k: row[k] for k in ("x_index", "mass", "bound", "ratio")})
    block.constants.update({"C": report.C, "triangle_constant": report.triangle_constant,
                            "mass_0": report.mass_0})


HANDLERS: Dict[str, Callable[[ExperimentConfig, VertexMap, Block, bool], None]] = {
    "flatnorm": _flatnorm,
    "localize": _localize,
    "fill-small": _fill_small,
    "fill-disk": _fill_disk,
    "avoid-ball": _avoid_ball,
    "fill-domain": _fill_domain,
}


def _run_block(config: ExperimentConfig, F: VertexMap, index: int,
               sweep: Dict[str, float]) -> Block:
    cfg = replace(config, **sweep) if sweep else config
    block = Block(index=index, sweep=sweep)
    try:
        HANDLERS[cfg.pipeline](cfg, F, block, config.inject_fault and index == 0)
    except HardAssertionError as e:
        block.check(False, e.name, str(e))
    except Exception as e:
        logger.error(f"{cfg.pipeline} block {index} {sweep}: {e}")
        raise
    for name, ok in block.asserts.items():
        if not ok:
            logger.error(f"{cfg.pipeline} block {index}: assert {name} failed")
    return block


def run_pipeline(config: ExperimentConfig, family: Optional[VertexMap] = None) -> BoundReport:
    """Run every sweep point of one pipeline; asserts land in the report instead of raising."""
    start = time.monotonic()
    F = family if family is not None else generate_family(config.generator, config.seed)
    points = config.sweep_points()
    logger.info(f"running {config.pipeline}: {len(F.vertices())} vertices, "
                f"{len(points)} sweep points, {config.threads} thread(s)")
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        blocks = list(pool.map(lambda args: _run_block(config, F, *args), enumerate(points)))
    report = BoundReport(pipeline=config.pipeline, config=config.to_dict(), blocks=blocks)
    report.elapsed = time.monotonic() - start
    logger.info(f"{config.pipeline} finished: ratio max={report.ratio_max:.4g}, "
                f"passed={report.passed}, hash={report.report_hash[:12]}")
    return report
