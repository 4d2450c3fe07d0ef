from __future__ import annotations

from typing import Callable, Dict, Iterator, Mapping, Tuple, Union

from cubical.complex import CubicalComplex, Vertex

Values = Union[Mapping[Vertex, object], Callable[[Vertex], object]]


class VertexMap:
    """Chains assigned to the vertices of a cubical complex.

    Values are either an explicit mapping or a function evaluated lazily and
    memoized, so that refined families never materialize unused vertices.
    """

    def __init__(self, complex: CubicalComplex, values: Values, provenance: str = "input"):
        self.complex = complex
        self.provenance = provenance
        if callable(values):
            self._fn = values
            self._values: Dict[Vertex, object] = {}
        else:
            self._fn = None
            self._values = {tuple(k): v for k, v in values.items()}

    def __getitem__(self, vertex: Vertex):
        vertex = tuple(vertex)
        try:
            return self._values[vertex]
        except KeyError:
            if self._fn is None:
                raise KeyError(f"{self.provenance} family has no value at {vertex}") from None
        value = self._fn(vertex)
        self._values[vertex] = value
        return value

    def __repr__(self) -> str:
        return f"VertexMap({self.complex!r}, provenance={self.provenance!r})"

    @property
    def is_lazy(self) -> bool:
        return self._fn is not None

    def vertices(self):
        return self.complex.vertices()

    def items(self) -> Iterator[Tuple[Vertex, object]]:
        for v in self.vertices():
            yield v, self[v]

    def map(self, fn: Callable[[object], object], provenance: str) -> "VertexMap":
        return VertexMap(self.complex, lambda v: fn(self[v]), provenance)


def nearest_original(vertex: Vertex, q_prime: int) -> Vertex:
    """Closest vertex of the unrefined complex; unique because q_prime is odd."""
    return tuple((2 * v + q_prime) // (2 * q_prime) for v in vertex)


def refine_family(F: VertexMap, q_prime: int) -> VertexMap:
    if q_prime == 1:
        return F
    refined = F.complex.refine(q_prime)
    return VertexMap(
        refined,
        lambda v: F[nearest_original(v, q_prime)],
        provenance=f"R^{q_prime}({F.provenance})",
    )
