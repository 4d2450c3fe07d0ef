import csv
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import List, Optional

import requests

from core.pipeline import BoundReport
from core.serialization import canonical_bytes, to_jsonable, write_family
from cubical.family import VertexMap
from checks.base_check import CheckResult

CSV_FIELDS = ("x_index", "mass", "bound")


class Reporter:
    """Writes run artifacts to one directory and optionally posts the summary."""

    def __init__(self, artifacts_dir: Path, config: Optional[dict] = None):
        self.artifacts_dir = Path(artifacts_dir)
        self.artifacts_dir.mkdir(parents=True, exist_ok=True)
        self.config = config or {}
        self.logger = logging.getLogger("Reporter")

    def generate_all_reports(self, report: BoundReport) -> dict:
        paths = {
            "rows": self.write_rows(report),
            "summary": self.write_summary(report),
            "csv": self.write_csv(report),
            "text": self.write_text(report),
        }
        paths.update(self.write_outputs(report))
        if self.config.get("api_endpoint"):
            self.post_to_api(report.to_dict())
        return paths

    def write_outputs(self, report: BoundReport) -> dict:
        """Produced families, fillings and witnesses, one file per block and kind."""
        paths = {}
        several = len(report.blocks) > 1
        for block in report.blocks:
            for kind, value in block.outputs.items():
                name = f"{kind}_{block.index}" if several else kind
                path = self.artifacts_dir / f"{report.pipeline}_{name}.json"
                if isinstance(value, VertexMap):
                    write_family(value, path)
                else:
                    path.write_bytes(canonical_bytes(value))
                paths[name] = path
        if paths:
            self.logger.info(f"Outputs saved: {sorted(p.name for p in paths.values())}")
        return paths

    def write_rows(self, report: BoundReport) -> Path:
        path = self.artifacts_dir / f"{report.pipeline}_rows.jsonl"
        with open(path, "a") as f:
            for row in report.rows:
                f.write(canonical_bytes(dict(row, pipeline=report.pipeline)).decode("ascii") + "\n")
        self.logger.info(f"Rows appended: {path}")
        return path

    def write_summary(self, report: BoundReport) -> Path:
        path = self.artifacts_dir / f"{report.pipeline}_summary.json"
        data = to_jsonable(report.to_dict())
        data["elapsed"] = round(report.elapsed, 3)
        data["generated_at"] = datetime.now().isoformat()
        with open(path, "w") as f:
            json.dump(data, f, indent=2, sort_keys=True)
        self.logger.info(f"Summary saved: {path}")
        return path

    def write_csv(self, report: BoundReport) -> Path:
        path = self.artifacts_dir / f"{report.pipeline}_bounds.csv"
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(CSV_FIELDS)
            for row in report.rows:
                writer.writerow([to_jsonable(row[k]) for k in CSV_FIELDS])
        self.logger.info(f"CSV saved: {path}")
        return path

    def write_text(self, report: BoundReport) -> Path:
        path = self.artifacts_dir / f"{report.pipeline}_report.txt"
        with open(path, "w") as f:
            f.write(f"chainforge {report.pipeline} report\n")
            f.write("=" * 50 + "\n\n")
            f.write(f"Rows: {len(report.rows)}\n")
            f.write(f"Max ratio: {report.ratio_max:.6g}\n")
            f.write(f"95th percentile ratio: {report.ratio_p95:.6g}\n")
            f.write(f"Report hash: {report.report_hash}\n")
            f.write(f"Status: {'PASSED' if report.passed else 'FAILED'}\n\n")
            for block in report.blocks:
                f.write("-" * 50 + "\n")
                f.write(f"Block {block.index} {block.sweep}\n")
                for name, value in sorted(block.constants.items()):
                    f.write(f"  {name} = {to_jsonable(value)}\n")
                for name, ok in sorted(block.asserts.items()):
                    f.write(f"  assert {name}: {'ok' if ok else 'FAILED'}\n")
                for message in block.messages:
                    f.write(f"  {message}\n")
                f.write("\n")
        self.logger.info(f"Text report saved: {path}")
        return path

    def write_suite(self, results: List[CheckResult], suite_name: str) -> Path:
        path = self.artifacts_dir / "suite_report.json"
        data = {
            "suite": suite_name,
            "generated_at": datetime.now().isoformat(),
            "summary": summarize(results),
            "checks": [r.to_dict() for r in results],
        }
        with open(path, "w") as f:
            json.dump(to_jsonable(data), f, indent=2)
        self.logger.info(f"Suite report saved: {path}")
        if self.config.get("api_endpoint"):
            self.post_to_api(data)
        return path

    def post_to_api(self, payload: dict) -> bool:
        api_endpoint = self.config.get("api_endpoint")
        if not api_endpoint:
            return False

        try:
            headers = {}
            if api_key := self.config.get("api_key"):
                headers["Authorization"] = f"Bearer {api_key}"

            response = requests.post(
                api_endpoint,
                json=to_jsonable(payload),
                headers=headers,
                timeout=30
            )

            if response.status_code in [200, 201]:
                self.logger.info("Results posted to API")
                return True
            self.logger.error(f"API post failed: {response.status_code}")
        except Exception as e:
            self.logger.error(f"Failed to post to API: {e}")
        return False


def summarize(results: List[CheckResult]) -> dict:
    total = len(results)
    passed = sum(1 for r in results if r.status == "passed")
    failed = sum(1 for r in results if r.status == "failed")
    skipped = sum(1 for r in results if r.status == "skipped")

    return {
        "total": total,
        "passed": passed,
        "failed": failed,
        "skipped": skipped,
        "success_rate": (passed / total * 100) if total > 0 else 0
    }
