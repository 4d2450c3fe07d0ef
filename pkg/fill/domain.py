"""Fillings of families of 0-cycles on metric graphs and triangulated planar domains.

On a graph every even cycle is filled along the edges: each point walks to an end
of its edge and the leftover vertex parity is paired through a spanning tree.
On a triangulated polygon each triangle gets its own ray filling pushed onto a
shared grid of width r = p^(-1/2); whatever those leave on the triangle edges is
then filled on the edge graph.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import networkx as nx
import numpy as np

from chains.one import OneChain
from chains.operations import segment_distance
from chains.regions import Box, ConvexPolygon
from chains.tolerance import eps_geom
from chains.zero import ZeroChain
from cubical.family import VertexMap
from fill.bend_cancel import correction
from fill.deform import PushMap
from fill.generic_point import GenericPoint, pick_apex
from fill.rays import far_exits, ray_fill
from fill.skeleton import GridSkeleton
from core.errors import (BadSpec, DegenerateCenter, DegenerateCrossing, DimUnsupported,
                         ExhaustedSamples, NotContractible, TangentRay, hard_assert)

logger = logging.getLogger("Fill")

Edge = Tuple[int, int]


def on_graph_tolerance() -> float:
    return 1e3 * eps_geom()


class MetricGraph:
    """Planar or spatial graph with straight edges, lengths as weights."""

    def __init__(self, positions, edges: Sequence[Edge]):
        self.positions = np.asarray(positions, dtype=float)
        if self.positions.ndim != 2:
            raise BadSpec("graph positions must be an (k, n) array")
        self.graph = nx.Graph()
        self.graph.add_nodes_from(range(len(self.positions)))
        for u, v in edges:
            u, v = sorted((int(u), int(v)))
            if u == v:
                raise BadSpec(f"loop edge at node {u}")
            length = float(np.linalg.norm(self.positions[u] - self.positions[v]))
            self.graph.add_edge(u, v, length=length)
        self.edges: List[Edge] = sorted(self.graph.edges())
        self._segments = np.array([(self.positions[u], self.positions[v]) for u, v in self.edges])

    @classmethod
    def circle(cls, k: int = 16, radius: float = 1.0) -> "MetricGraph":
        if k < 3:
            raise BadSpec(f"a circle graph needs at least 3 nodes, got {k}")
        angles = 2.0 * math.pi * np.arange(k) / k
        positions = radius * np.column_stack([np.cos(angles), np.sin(angles)])
        return cls(positions, [(i, (i + 1) % k) for i in range(k)])

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    @property
    def length(self) -> float:
        return float(sum(d["length"] for _, _, d in self.graph.edges(data=True)))

    def locate(self, point) -> Edge:
        dist = segment_distance(self._segments, np.asarray(point, dtype=float))
        best = int(np.argmin(dist))
        if dist[best] > on_graph_tolerance():
            raise BadSpec(f"point {np.asarray(point).tolist()} is off the graph "
                          f"by {dist[best]:.3g}")
        return self.edges[best]

    def point_at(self, edge: Edge, t: float) -> np.ndarray:
        u, v = edge
        return self.positions[u] + t * (self.positions[v] - self.positions[u])

    def edge_chain(self) -> OneChain:
        return OneChain(self._segments, dim=self.dim)

    def to_dict(self) -> dict:
        return {"positions": self.positions.tolist(), "edges": [list(e) for e in self.edges]}


def graph_fill(graph: MetricGraph, z: ZeroChain) -> OneChain:
    """1-chain on the graph edges with boundary z.

    Raises NotContractible when some connected component holds an odd number of points.
    """
    if z.is_empty:
        return OneChain.empty(graph.dim)
    parity: Dict[int, int] = {node: 0 for node in graph.graph.nodes}
    segments = []
    for x in z.points:
        u, _ = graph.locate(x)
        segments.append((x, graph.positions[u]))
        parity[u] ^= 1
    tree = nx.minimum_spanning_tree(graph.graph, weight="length")
    for nodes in nx.connected_components(tree):
        odd = sum(parity[node] for node in nodes)
        if odd % 2:
            raise NotContractible(f"odd number of points on the component of node {min(nodes)}")
        root = min(nodes)
        parents = nx.dfs_predecessors(tree, root)
        for node in nx.dfs_postorder_nodes(tree, root):
            if node == root or not parity[node]:
                continue
            parent = parents[node]
            segments.append((graph.positions[node], graph.positions[parent]))
            parity[parent] ^= 1
            parity[node] = 0
    return OneChain(segments, dim=graph.dim).normalized()


class TriangulatedDomain:
    """Planar polygon split into convex triangles sharing edges."""

    def __init__(self, vertices, triangles: Sequence[Tuple[int, int, int]]):
        self.vertices = np.asarray(vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise BadSpec("triangulated domains are planar")
        self.triangles = [tuple(int(i) for i in t) for t in triangles]
        if not self.triangles:
            raise BadSpec("a triangulated domain needs at least one triangle")
        self.polygons = [ConvexPolygon(self.vertices[list(t)]) for t in self.triangles]
        edges = set()
        for a, b, c in self.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                edges.add(tuple(sorted((u, v))))
        self.graph = MetricGraph(self.vertices, sorted(edges))

    @classmethod
    def unit_square(cls, divisions: int = 1) -> "TriangulatedDomain":
        if divisions < 1:
            raise BadSpec(f"divisions must be positive, got {divisions}")
        k = divisions + 1
        ticks = np.linspace(0.0, 1.0, k)
        vertices = [(x, y) for y in ticks for x in ticks]
        triangles = []
        for j in range(divisions):
            for i in range(divisions):
                a, b = j * k + i, j * k + i + 1
                c, d = b + k, a + k
                triangles.extend([(a, b, c), (a, c, d)])
        return cls(vertices, triangles)

    @property
    def dim(self) -> int:
        return 2

    @property
    def area(self) -> float:
        return float(sum(p.area for p in self.polygons))

    def bounds(self) -> Box:
        return Box(self.vertices.min(axis=0), self.vertices.max(axis=0))

    def locate(self, points) -> np.ndarray:
        """Index of the first triangle containing each point."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        out = np.full(len(pts), -1, dtype=int)
        for index, polygon in enumerate(self.polygons):
            free = out < 0
            out[free & polygon.contains(pts)] = index
        if np.any(out < 0):
            raise BadSpec(f"{int(np.sum(out < 0))} points outside the triangulated domain")
        return out

    def contains(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return np.any([p.contains(pts) for p in self.polygons], axis=0)

    def split(self, z: ZeroChain) -> List[ZeroChain]:
        if z.is_empty:
            return [ZeroChain.empty(2) for _ in self.polygons]
        owner = self.locate(z.points)
        return [ZeroChain(z.points[owner == i], reduced=True) for i in range(len(self.polygons))]

    def to_dict(self) -> dict:
        return {"vertices": self.vertices.tolist(), "triangles": [list(t) for t in self.triangles]}


@dataclass
class TriangleFill:
    """Ray filling of one triangle, pushed onto the shared grid and cut back to the triangle."""

    polygon: ConvexPolygon
    apex: GenericPoint
    push: PushMap

    def __call__(self, z: ZeroChain) -> OneChain:
        if z.is_empty:
            return OneChain.empty(2)
        exits = far_exits(z, self.apex, self.polygon)
        chain = (self.push.chain(ray_fill(z, self.apex, self.polygon))
                 + correction(z, self.push) + correction(exits, self.push))
        return chain.normalized().restrict(self.polygon)


@dataclass
class ParametricReport:
    m: int
    p: int
    r: float
    mass_0: int
    attempts: int = 1
    rows: List[dict] = field(default_factory=list)
    triangles: List[dict] = field(default_factory=list)

    @property
    def C(self) -> float:
        return max((row["ratio"] for row in self.rows), default=0.0)

    @property
    def triangle_constant(self) -> float:
        return max((t["C"] for t in self.triangles), default=0.0)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "p": self.p,
            "r": self.r,
            "mass_0": self.mass_0,
            "attempts": self.attempts,
            "C": self.C,
            "triangle_constant": self.triangle_constant,
            "rows": self.rows,
            "triangles": self.triangles,
        }


def _graph_family(F: VertexMap, graph: MetricGraph, p: int):
    mass_0 = max((F[v].mass for v in F.vertices()), default=0)
    report = ParametricReport(m=1, p=p, r=0.0, mass_0=mass_0)
    values = {}
    for index, v in enumerate(F.vertices()):
        G = graph_fill(graph, F[v])
        hard_assert(G.boundary() == F[v], "parametric_boundary",
                    f"graph filling at {v} has the wrong boundary")
        hard_assert(G.mass <= graph.length + on_graph_tolerance(), "graph_fill_mass",
                    f"graph filling at {v} has mass {G.mass:.6g} > length {graph.length:.6g}")
        values[v] = G
        report.rows.append({"x_index": index, "vertex": list(v), "mass": G.mass,
                            "bound": graph.length, "ratio": G.mass / graph.length})
    return VertexMap(F.complex, values, f"graph-fill({F.provenance})"), report


def _triangle_operators(domain: TriangulatedDomain, r: float,
                        rng: np.random.Generator, push_seed: int):
    grid = GridSkeleton.for_domain(r, domain.bounds(), offset=rng.uniform(0.0, r, 2))
    push = PushMap(grid, seed=push_seed)
    operators = []
    for polygon in domain.polygons:
        center = polygon.vertices.mean(axis=0)
        reach = float(np.max(np.linalg.norm(polygon.vertices - center, axis=1)))
        operators.append(TriangleFill(polygon, pick_apex(grid, polygon, center, reach, rng), push))
    return grid, operators


def _fill_vertex(z: ZeroChain, domain: TriangulatedDomain, operators: List[TriangleFill]):
    pieces = [op(part) for op, part in zip(operators, domain.split(z))]
    total = OneChain.empty(2)
    for piece in pieces:
        total = total + piece
    residual = total.boundary() + z
    return (total + graph_fill(domain.graph, residual)).normalized(), pieces


def parametric_fill(F: VertexMap, domain, p: int, seed: int = 0, attempts: int = 5):
    """Fill every value of a contractible family; returns (G, ParametricReport).

    ``domain`` is a MetricGraph (m = 1) or a TriangulatedDomain (m = 2).
    """
    if p < 1:
        raise BadSpec(f"p must be a positive integer, got {p}")
    if isinstance(domain, MetricGraph):
        return _graph_family(F, domain, p)
    if not isinstance(domain, TriangulatedDomain):
        raise DimUnsupported(f"no parametric filling over {type(domain).__name__}")
    r = p ** -0.5
    if not r < 1.0:
        raise BadSpec(f"p={p} gives a grid wider than the domain; use p >= 2")
    vertices = F.vertices()
    mass_0 = max((F[v].mass for v in vertices), default=0)
    rng = np.random.default_rng(seed)
    for attempt in range(1, attempts + 1):
        try:
            grid, operators = _triangle_operators(domain, r, rng, seed + attempt - 1)
            filled = {v: _fill_vertex(F[v], domain, operators) for v in vertices}
        except (DegenerateCenter, DegenerateCrossing, TangentRay) as e:
            logger.warning(f"parametric fill attempt {attempt} degenerate, redrawing grid: {e}")
            continue
        break
    else:
        raise ExhaustedSamples(f"grid and apexes degenerate in {attempts} attempts")

    report = ParametricReport(m=2, p=p, r=r, mass_0=mass_0, attempts=attempt)
    bound = mass_0 * r + 1.0 / r
    per_triangle = [{"triangle": i, "C": 0.0, "boundary_mass": 0, "boundary_bound": 0.0}
                    for i in range(len(domain.polygons))]
    for index, v in enumerate(vertices):
        z = F[v]
        G, pieces = filled[v]
        hard_assert(G.boundary() == z, "parametric_boundary",
                    f"filling at {v} has boundary mass {G.boundary().mass}, expected {z.mass}")
        for i, (polygon, part, piece) in enumerate(zip(domain.polygons, domain.split(z), pieces)):
            ends = piece.boundary()
            edge_mass = int(np.sum(polygon.on_boundary(ends.points))) if not ends.is_empty else 0
            limit = 4 * (part.mass + p + 1)
            hard_assert(edge_mass <= limit, "boundary_mass",
                        f"triangle {i} at {v}: {edge_mass} boundary points > {limit}")
            row = per_triangle[i]
            row["C"] = max(row["C"], piece.mass / (part.mass * r + 1.0 / r))
            if edge_mass >= row["boundary_mass"]:
                row["boundary_mass"], row["boundary_bound"] = edge_mass, limit
        report.rows.append({"x_index": index, "vertex": list(v), "mass": G.mass,
                            "bound": bound, "ratio": G.mass / bound})
    report.triangles = per_triangle
    logger.info(f"parametric fill p={p}: C={report.C:.4g}, grid width {grid.r:.3g}, "
                f"{len(vertices)} vertices")
    return VertexMap(F.complex, {v: filled[v][0] for v in vertices},
                     f"parametric-fill({F.provenance})"), report
