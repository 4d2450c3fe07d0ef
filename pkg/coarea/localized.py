from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Union

from chains.one import OneChain
from coarea.admissible import AdmissibleFamily, merge_admissible, monotone_constant
from cubical.complex import Cell, CubicalComplex
from cubical.family import VertexMap
from core.errors import BudgetExceeded

logger = logging.getLogger("Coarea")

Certs = Union[Mapping[Cell, AdmissibleFamily], Callable[[Cell], AdmissibleFamily]]


@dataclass
class LocalizationReport:
    localized: bool = True
    N: int = 0
    delta_sum: float = 0.0
    cells_checked: int = 0
    inadmissible: int = 0
    violations: List[dict] = field(default_factory=list)

    def within(self, N: float, delta: float) -> bool:
        return self.localized and self.N <= N and self.delta_sum < delta

    def to_dict(self) -> dict:
        return {
            "localized": self.localized,
            "N": self.N,
            "delta_sum": self.delta_sum,
            "cells_checked": self.cells_checked,
            "inadmissible": self.inadmissible,
            "violations": self.violations,
        }


def _difference(a, b):
    diff = a + b
    return diff.normalized() if isinstance(diff, OneChain) else diff


def check_localized(F: VertexMap, certs: Certs, max_violations: int = 20) -> LocalizationReport:
    report = LocalizationReport()
    lookup = certs if callable(certs) else certs.get
    seen = set()
    for cell in F.complex.maximal_cells():
        verts = cell.vertices()
        values = [F[v] for v in verts]
        cert = lookup(cell)
        if cert is None:
            report.localized = False
            if len(report.violations) < max_violations:
                report.violations.append({"cell": cell.to_dict(), "reason": "missing certificate"})
            continue
        key = tuple(id(v) for v in values) + ((id(cert),) if not callable(certs) else ())
        if key in seen:
            continue
        seen.add(key)
        report.cells_checked += 1
        report.N = max(report.N, cert.count)
        report.delta_sum = max(report.delta_sum, cert.radius_sum)
        if not cert.is_disjoint():
            report.inadmissible += 1
        specs = cert.specs()
        for vertex, value in zip(verts[1:], values[1:]):
            if value is values[0]:
                continue
            outside = _difference(values[0], value).uncovered(specs)
            if outside.is_empty:
                continue
            report.localized = False
            if len(report.violations) < max_violations:
                report.violations.append({
                    "cell": cell.to_dict(),
                    "x": list(verts[0]),
                    "y": list(vertex),
                    "outside": outside.to_list(),
                })
    logger.debug(f"localization check: {report.cells_checked} cells, N={report.N}, "
                 f"delta_sum={report.delta_sum:.6g}, violations={len(report.violations)}")
    return report


def _containing(cell: Cell, maximal: List[Cell]) -> Optional[Cell]:
    for big in maximal:
        if cell in big.faces():
            return big
    return None


def monotonize(certs: Mapping[Cell, AdmissibleFamily], complex: CubicalComplex,
               p: Optional[int] = None) -> Dict[Cell, AdmissibleFamily]:
    """Face-monotone certificates: every cell's family covers those of its facets."""
    p = complex.dim if p is None else p
    c = monotone_constant(p)
    given = [f for f in certs.values() if f is not None]
    N = max((f.count for f in given), default=0)
    delta = max((f.delta for f in given), default=0.0)
    maximal = list(complex.maximal_cells())
    out: Dict[Cell, AdmissibleFamily] = {}
    for dim in range(p + 1):
        for cell in sorted(complex.cells(dim)):
            own = certs.get(cell)
            # a vertex carries no difference of its own
            if own is None and dim > 0:
                big = _containing(cell, maximal)
                own = certs.get(big) if big is not None else None
            specs = list(own.specs()) if own is not None else []
            for facet in cell.facets():
                specs.extend(out[facet].specs())
            if not specs:
                out[cell] = AdmissibleFamily.empty(c * delta)
                continue
            family = merge_admissible(specs, delta=c * delta if delta > 0 else None)
            if family.count > c * N or family.radius_sum > c * delta:
                raise BudgetExceeded(
                    f"{cell}: monotone profile ({family.count}, {family.radius_sum:.6g}) "
                    f"exceeds ({c * N}, {c * delta:.6g})"
                )
            out[cell] = family
    return out
