"""Interpolation along one edge of the parameter complex.

Starting from F(v) every grid domain is switched, in grid order, to whichever
endpoint has the lighter restriction there. Starting from F(w) the same is done
for the domains whose minimizer is v. Both runs end at the same minimizing cycle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from chains.one import OneChain
from chains.zero import ZeroChain
from coarea.grid import Grid, Label
from core.errors import BoundaryMismatch, hard_assert

logger = logging.getLogger("Localize")

START = 0
END = 1


@dataclass(frozen=True)
class Sample:
    """A produced cycle together with the recipe it must satisfy.

    ``terms`` are the restrictions F(w_D) to the grid domains and ``correction``
    is I(x); the cycle must equal their sum.
    """

    chain: ZeroChain
    terms: Tuple[ZeroChain, ...] = ()
    correction: Optional[ZeroChain] = None
    weights: Tuple[Tuple[Label, int], ...] = ()

    def reconstruct(self) -> ZeroChain:
        total = self.correction if self.correction is not None else ZeroChain.empty(self.chain.dim)
        for term in self.terms:
            total = total + term
        return total

    @property
    def weighted_mass(self) -> int:
        return sum(t.mass for t in self.terms)


@dataclass
class EdgeInterpolation:
    start: ZeroChain
    end: ZeroChain
    tau: OneChain
    grid: Grid
    labels: List[Label] = field(default_factory=list)
    choices: Dict[Label, int] = field(default_factory=dict)
    pieces: Dict[Label, OneChain] = field(default_factory=dict)
    start_parts: Dict[Label, ZeroChain] = field(default_factory=dict)
    end_parts: Dict[Label, ZeroChain] = field(default_factory=dict)
    forward: List[Sample] = field(default_factory=list)
    backward: List[Sample] = field(default_factory=list)
    forward_domains: List[Label] = field(default_factory=list)
    backward_domains: List[Label] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return max(len(self.forward), len(self.backward)) - 1

    @property
    def meet(self) -> ZeroChain:
        return self.forward[-1].chain

    def sequence(self) -> List[ZeroChain]:
        """z_0 = F(v), ..., the meeting cycle, ..., F(w)."""
        return [s.chain for s in self.forward] + [s.chain for s in reversed(self.backward[:-1])]

    def sample(self, side: int, depth: int) -> Sample:
        run = self.forward if side == START else self.backward
        return run[min(depth, len(run) - 1)]

    def swapped(self, side: int, depth: int) -> List[Label]:
        """Domains of tau carried by the filling at this point of the edge."""
        if side == START:
            return self.forward_domains[:min(depth, len(self.forward_domains))]
        gone = set(self.backward_domains[:min(depth, len(self.backward_domains))])
        return [label for label in self.labels if label not in gone]

    def filling(self, side: int, depth: int) -> OneChain:
        """tau restricted to the swapped domains; its boundary is F(v) + z."""
        total = OneChain.empty(self.tau.dim)
        for label in self.swapped(side, depth):
            piece = self.pieces.get(label)
            if piece is not None:
                total = total + piece
        return total

    def to_dict(self) -> dict:
        return {
            "domains": len(self.labels),
            "forward_steps": len(self.forward) - 1,
            "backward_steps": len(self.backward) - 1,
            "tau_mass": self.tau.mass,
            "choices": {str(list(k)): v for k, v in self.choices.items()},
        }


def _recipe(edge: EdgeInterpolation, chosen: Dict[Label, int], correction: ZeroChain,
            chain: ZeroChain) -> Sample:
    terms = []
    for label in edge.labels:
        parts = edge.end_parts if chosen[label] == END else edge.start_parts
        part = parts.get(label)
        if part is not None and not part.is_empty:
            terms.append(part)
    weights = tuple((label, chosen[label]) for label in edge.labels)
    return Sample(chain, tuple(terms), correction, weights)


def _run(edge: EdgeInterpolation, begin: ZeroChain, side: int,
         domains: Sequence[Label], crossings: Dict[Label, ZeroChain]) -> List[Sample]:
    chosen = {label: side for label in edge.labels}
    z = begin
    correction = ZeroChain.empty(begin.dim)
    out = [_recipe(edge, chosen, correction, z)]
    for label in domains:
        piece = edge.pieces.get(label, OneChain.empty(begin.dim))
        z = z + piece.boundary()
        correction = correction + crossings[label]
        chosen[label] = 1 - side
        out.append(_recipe(edge, chosen, correction, z))
    return out


def interpolate_edge(Fv: ZeroChain, Fw: ZeroChain, tau: OneChain, grid: Grid,
                     r: Optional[float] = None) -> EdgeInterpolation:
    if not (tau.boundary() == Fv + Fw):
        raise BoundaryMismatch("edge filling boundary differs from F(v) + F(w)")
    edge = EdgeInterpolation(Fv, Fw, tau, grid)
    edge.pieces = grid.split(tau)
    edge.start_parts = grid.split_points(Fv)
    edge.end_parts = grid.split_points(Fw)
    edge.labels = sorted(set(edge.pieces) | set(edge.start_parts) | set(edge.end_parts))

    crossings: Dict[Label, ZeroChain] = {}
    for label in edge.labels:
        piece = edge.pieces.get(label, OneChain.empty(Fv.dim))
        ends = edge.start_parts.get(label, ZeroChain.empty(Fv.dim)) + edge.end_parts.get(
            label, ZeroChain.empty(Fv.dim)
        )
        crossings[label] = piece.boundary() + ends
        v_mass = edge.start_parts[label].mass if label in edge.start_parts else 0
        w_mass = edge.end_parts[label].mass if label in edge.end_parts else 0
        # ties go to the lower vertex
        edge.choices[label] = END if w_mass < v_mass else START

    edge.forward_domains = [l for l in edge.labels if edge.choices[l] == END and _moves(edge, l)]
    edge.backward_domains = [l for l in edge.labels if edge.choices[l] == START and _moves(edge, l)]
    edge.forward = _run(edge, Fv, START, edge.forward_domains, crossings)
    edge.backward = _run(edge, Fw, END, edge.backward_domains, crossings)

    hard_assert(edge.forward[-1].chain == edge.backward[-1].chain, "interpolation_meet",
                "forward and backward interpolations end at different cycles")
    if r is not None:
        bound = max(Fv.mass, Fw.mass) + 2 * grid.L * tau.mass / r
        worst = max(s.chain.mass for s in edge.forward + edge.backward)
        hard_assert(worst <= bound + 1e-9, "interpolation_mass", f"{worst} > {bound:.6g}")
    logger.debug(f"edge interpolation: {len(edge.labels)} domains, "
                 f"{len(edge.forward_domains)}+{len(edge.backward_domains)} steps")
    return edge


def _moves(edge: EdgeInterpolation, label: Label) -> bool:
    piece = edge.pieces.get(label)
    return piece is not None and not piece.is_empty
