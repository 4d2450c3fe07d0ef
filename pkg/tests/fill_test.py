import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chains import OneChain, ZeroChain, south_pole, unit_disk
from chains.regions import BoundaryBall, Complement
from chains.tolerance import eps_geom
from core.errors import BadSpec, DimUnsupported, NotContractible, NotFound
from core.generators import generate_family
from core.pipeline import difference_certs
from cubical.complex import CubicalComplex
from cubical.family import VertexMap
from fill import (
    GridSkeleton,
    MetricGraph,
    TriangulatedDomain,
    avoid_boundary_ball,
    bend_cancel_fill,
    estimate_delta_n,
    ff_deform,
    find_avoiding_hyperplane,
    graph_fill,
    parametric_fill,
    pick_generic_point,
    random_spherical_polygon,
    ray_fill,
    skeleton_cut_holds,
    verify_bend_cancel,
)
from fill.angles import widest_free_angle, widest_gap
from fill.avoid_ball import cap_mass
from fill.hyperplane import random_ball_family, random_sphere_points
from fill.rays import far_exits


def zero(pts):
    return ZeroChain(np.asarray(pts, dtype=float).reshape(-1, 2), dim=2)


def test_widest_gap_on_a_segment():
    mid, width = widest_gap(0.0, 1.0, [(0.2, 0.4)])
    assert mid == pytest.approx(0.7)
    assert width == pytest.approx(0.6)


def test_widest_free_angle_wraps():
    mid, width = widest_free_angle([(0.0, math.pi)])
    assert mid == pytest.approx(1.5 * math.pi)
    assert width == pytest.approx(math.pi)
    assert widest_free_angle([(0.0, 7.0)]) == (0.0, 0.0)


def test_planar_hyperplane_misses_balls():
    balls = [(np.array([1.0, 0.0]), 0.1), (np.array([0.0, 1.0]), 0.1)]
    plane = find_avoiding_hyperplane(balls)
    assert plane.clearance > 0
    for c, r in balls:
        assert plane.distance(c) > r


def test_hyperplane_edge_cases():
    with pytest.raises(BadSpec):
        find_avoiding_hyperplane([])
    assert find_avoiding_hyperplane([], n=3).normal.tolist() == [1.0, 0.0, 0.0]
    with pytest.raises(NotFound):
        find_avoiding_hyperplane([(np.array([0.1, 0.0]), 0.5)])


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**31))
def test_small_spatial_families_are_avoided(seed):
    rng = np.random.default_rng(seed)
    balls = random_ball_family(3, 0.5, rng)
    plane = find_avoiding_hyperplane(balls, rng=rng)
    assert plane.clearance > 0


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**31))
def test_cutting_a_spherical_polygon_cuts_its_skeleton(seed):
    rng = np.random.default_rng(seed)
    polygon = random_spherical_polygon(rng)
    for normal in random_sphere_points(10, 3, rng):
        assert skeleton_cut_holds(polygon, normal)


def test_graph_fill_on_a_circle():
    graph = MetricGraph.circle(8)
    z = ZeroChain([graph.point_at((0, 1), 0.5), graph.point_at((3, 4), 0.25)], dim=2)
    fill = graph_fill(graph, z)
    assert fill.boundary() == z
    assert fill.mass <= graph.length
    with pytest.raises(NotContractible):
        graph_fill(graph, ZeroChain([graph.point_at((0, 1), 0.5)], dim=2))
    with pytest.raises(BadSpec):
        graph_fill(graph, zero([[0.0, 0.0], [0.1, 0.0]]))
    with pytest.raises(BadSpec):
        MetricGraph.circle(2)


def test_triangulated_square():
    domain = TriangulatedDomain.unit_square(2)
    assert len(domain.polygons) == 8
    assert domain.area == pytest.approx(1.0)
    z = zero([[0.1, 0.2], [0.7, 0.6], [0.3, 0.9]])
    parts = domain.split(z)
    assert sum(p.mass for p in parts) == 3
    with pytest.raises(BadSpec):
        domain.locate([[1.5, 0.5]])
    with pytest.raises(BadSpec):
        TriangulatedDomain.unit_square(0)


def test_ray_fill_ends_on_the_sphere():
    z = zero([[0.0, 0.0], [0.2, 0.3]])
    apex = np.array([2.0, 0.0])
    fill = ray_fill(z, apex)
    exits = far_exits(z, apex)
    assert fill.boundary() == z + exits
    assert np.allclose(np.linalg.norm(exits.points, axis=1), 1.0)
    assert exits.points[0] == pytest.approx([-1.0, 0.0])


def test_grid_skeleton():
    grid = GridSkeleton.for_domain(0.5, unit_disk(2))
    assert grid.R == pytest.approx(2.0)
    assert grid.on_skeleton(OneChain([[[0.0, 0.0], [0.5, 0.0]]], dim=2))
    assert not grid.on_skeleton(OneChain([[[0.1, 0.1], [0.3, 0.1]]], dim=2))
    assert grid.edge_constant() > 0
    with pytest.raises(BadSpec):
        GridSkeleton.for_domain(1.0)


def test_deformed_rays_land_on_the_skeleton():
    grid = GridSkeleton.for_domain(0.25, unit_disk(2))
    P = pick_generic_point(grid, BoundaryBall(south_pole(2), 0.5), seed=3)
    rays = ray_fill(zero([[0.1, 0.2], [-0.3, 0.4], [0.5, -0.1]]), P)
    pushed, report = ff_deform(rays, grid, P, seed=1)
    assert report.on_skeleton
    assert report.through_apex
    assert report.k == 3
    assert report.D > 0
    assert pushed.mass == pytest.approx(report.mass)


def test_deformed_rays_are_clipped_to_the_disk():
    disk = unit_disk(2)
    grid = GridSkeleton.for_domain(0.25, disk)
    P = pick_generic_point(grid, BoundaryBall(south_pole(2), 0.5), seed=3)
    rays = ray_fill(zero([[0.1, 0.2], [-0.3, 0.4], [0.5, -0.1]]), P)
    free, _ = ff_deform(rays, grid, P, seed=1)
    pushed, report = ff_deform(rays, grid, P, seed=1, domain=disk)
    assert report.outside_mass == pytest.approx(0.0, abs=1e-9)
    assert report.on_skeleton
    assert pushed.mass <= free.mass + 1e-9
    assert np.all(np.linalg.norm(pushed.endpoints(), axis=1) <= 1.0 + 1e-9)
    gained = pushed.boundary() + free.boundary().restrict(disk)
    assert np.allclose(np.linalg.norm(gained.points, axis=1), 1.0, atol=1e-9)


@pytest.mark.parametrize("n", [2, 3])
def test_bend_cancel_fills_to_the_sphere(n):
    F = generate_family({"kind": "static", "n": n, "points": 5, "q": 1}, seed=1)
    B = BoundaryBall(south_pole(n), 0.5)
    G, operator, attempts = bend_cancel_fill(F, 0.25, B, seed=2)
    report = verify_bend_cancel(F, G, 0.25, B, operator.apex, attempts)
    assert report.passed
    assert len(report.rows) == len(F.vertices())
    for v in F.vertices():
        rest = G[v].boundary() + F[v]
        assert np.allclose(np.linalg.norm(rest.points, axis=1), 1.0, atol=1e-6)


def test_parametric_fill_over_a_square():
    spec = {"kind": "sweepout", "domain": "square", "points": 6, "q": 2}
    F = generate_family(spec, seed=4)
    G, report = parametric_fill(F, TriangulatedDomain.unit_square(), p=4, seed=0)
    assert report.m == 2
    assert report.r == pytest.approx(0.5)
    assert len(report.rows) == len(F.vertices())
    for v in F.vertices():
        assert G[v].boundary() == F[v]


def test_parametric_fill_over_a_graph():
    graph = MetricGraph.circle(6)
    X = CubicalComplex.grid(1, 1)
    values = {
        (0,): ZeroChain([graph.point_at((0, 1), 0.3), graph.point_at((2, 3), 0.6)], dim=2),
        (1,): ZeroChain([graph.point_at((0, 1), 0.4), graph.point_at((2, 3), 0.5)], dim=2),
    }
    G, report = parametric_fill(VertexMap(X, values), graph, p=1)
    assert report.m == 1
    assert all(G[v].boundary() == values[v] for v in values)
    assert report.C <= 1.0


def test_parametric_fill_rejects_bad_inputs():
    F = generate_family({"kind": "sweepout", "domain": "square", "points": 2, "q": 1}, seed=0)
    with pytest.raises(BadSpec):
        parametric_fill(F, TriangulatedDomain.unit_square(), p=0)
    with pytest.raises(BadSpec):
        parametric_fill(F, TriangulatedDomain.unit_square(), p=1)
    with pytest.raises(DimUnsupported):
        parametric_fill(F, unit_disk(2), p=4)


def test_boundary_ball_avoidance_is_spatial():
    F = generate_family({"kind": "static", "n": 2, "points": 2, "q": 1}, seed=0)
    with pytest.raises(DimUnsupported):
        avoid_boundary_ball(F, {}, L=0.3, delta=0.15)


def test_hyperplane_budget_estimate():
    budget = estimate_delta_n(2, trials=4, seed=1)
    assert 0.0 < budget <= 4.0
    assert estimate_delta_n(2, trials=4, seed=1) == budget


@pytest.mark.parametrize("spec", [
    {"kind": "drifting", "n": 3, "points": 4, "d": 1, "q": 2, "drift": 0.01},
    {"kind": "boundary-crossing", "n": 3, "points": 6, "crossing": 1, "q": 16, "spread": 0.15},
])
def test_avoid_boundary_ball_in_space(spec):
    F = generate_family(spec, seed=5)
    certs = difference_certs(F, 0.005, 0.2)
    F_prime, report = avoid_boundary_ball(F, certs, L=0.3, delta=0.15)
    assert report.passed
    assert report.outside_failures == 0
    assert report.original_failures == 0
    assert report.mass_failures == 0
    assert report.tube_failures == 0
    assert report.localization.localized
    assert report.localized_radius == pytest.approx(0.3 + 3 * 0.15)
    assert report.vertices == len(F_prime.complex.vertices())
    B = BoundaryBall(south_pole(3), 0.3)
    for row in report.rows:
        v = tuple(row["vertex"])
        cell, _ = F_prime.complex.carrier(v)
        interior = max(int(np.sum(np.linalg.norm(F[x].points, axis=1) < 1.0 - 10 * eps_geom()))
                       if not F[x].is_empty else 0 for x in cell.vertices())
        assert row["bound"] == interior + cell.dim + 1
        assert row["mass"] == cap_mass(F_prime[v], B)
        assert row["mass"] <= row["bound"]
    off_cap = Complement(B)
    for v in F.vertices():
        value = F_prime[tuple(report.Q * x for x in v)]
        assert value.restrict(off_cap) == F[v].restrict(off_cap)
