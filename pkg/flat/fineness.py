from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from chains.regions import Region, unit_disk
from cubical.family import VertexMap
from flat.norm import ABSOLUTE, flat_norm


@dataclass
class FinenessReport:
    eps: float
    fine: bool = True
    max_value: float = 0.0
    pairs_checked: int = 0
    violations: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "fine": self.fine,
            "max_value": self.max_value,
            "pairs_checked": self.pairs_checked,
            "violations": self.violations,
        }


def check_fineness(F: VertexMap, eps: float, domain: Optional[Region] = None,
                   mode: str = ABSOLUTE, max_violations: int = 20) -> FinenessReport:
    report = FinenessReport(eps=eps)
    cache: Dict[Tuple[int, int], float] = {}
    for cell in F.complex.maximal_cells():
        for x, y in itertools.combinations(cell.vertices(), 2):
            a, b = F[x], F[y]
            if a is b:
                continue
            key = (id(a), id(b)) if id(a) < id(b) else (id(b), id(a))
            if key in cache:
                continue
            if domain is None:
                domain = unit_disk(a.dim)
            witness = flat_norm(a + b, domain, mode)
            cache[key] = witness.value
            report.pairs_checked += 1
            report.max_value = max(report.max_value, witness.value)
            if witness.value > eps:
                report.fine = False
                if len(report.violations) < max_violations:
                    report.violations.append(
                        {"cell": cell.to_dict(), "x": list(x), "y": list(y),
                         "value": witness.value, "witness": witness.to_dict()}
                    )
    return report
