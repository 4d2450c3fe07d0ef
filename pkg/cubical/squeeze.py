from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Tuple

from cubical.complex import Cell
from core.errors import NotInCommonCell

Number = float | Fraction


def phi(x: Number) -> Number:
    if x <= Fraction(1, 3):
        return 0 * x
    if x >= Fraction(2, 3):
        return 0 * x + 1
    return 3 * (x - Fraction(1, 3))


def xi(point: Sequence[Number]) -> Tuple[Number, ...]:
    for x in point:
        if not 0 <= x <= 1:
            raise ValueError(f"coordinate {x} outside [0, 1]")
    return tuple(phi(x) for x in point)


def center_cell(cell: Cell) -> Tuple[int, Cell]:
    """The middle third of a cell, as a cell of the 3-refinement."""
    anchor = tuple(3 * a + (1 if i in cell.axes else 0) for i, a in enumerate(cell.anchor))
    return 3, Cell(anchor, cell.axes)


def vertex_metrics(x: Sequence[Number], y: Sequence[Number], q: int) -> Tuple[float, float, float]:
    if len(x) != len(y):
        raise NotInCommonCell("vertices have different dimensions")
    for c in (*x, *y):
        if not 0 <= c <= 1:
            raise NotInCommonCell(f"coordinate {c} outside the unit cell")
    gaps = [abs(Fraction(a).limit_denominator(10**6) - Fraction(b).limit_denominator(10**6))
            for a, b in zip(x, y)]
    d0 = max(gaps, default=Fraction(0))
    d1 = sum(gaps, Fraction(0))
    return float(d0), float(d1), float(q * d1)
