import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chains import (
    Ball,
    Box,
    Complement,
    ConvexPolygon,
    HalfSpace,
    OneChain,
    TwoChain,
    ZeroChain,
    boundary_one,
    components,
    cone_fill,
    homothety,
    slice_sphere,
    unit_disk,
)
from chains.operations import slice_count
from chains.tolerance import ENV_VAR, eps_geom
from core.errors import ConfigError, DegenerateCrossing, NonConvexDomain, TangencyError

# coordinates on a dyadic lattice keep the mod-2 laws exact
lattice = st.integers(min_value=-16, max_value=16).map(lambda k: k / 16.0)
points = st.lists(st.tuples(lattice, lattice), max_size=12)
segments = st.lists(
    st.tuples(st.tuples(lattice, lattice), st.tuples(lattice, lattice)), max_size=10
)


def zero(pts):
    return ZeroChain(np.asarray(pts, dtype=float).reshape(-1, 2), dim=2)


def one(segs):
    return OneChain(np.asarray(segs, dtype=float).reshape(-1, 2, 2), dim=2)


def test_duplicate_points_cancel():
    z = zero([[0, 0], [0, 0], [1, 0]])
    assert z.mass == 1
    assert z == zero([[1, 0]])


def test_zero_chain_plus_itself_is_empty():
    z = zero([[0.1, 0.2], [0.3, -0.4]])
    assert (z + z).is_empty


def test_zero_chain_rejects_nan():
    with pytest.raises(ValueError):
        ZeroChain([[0.0, np.nan]])


def test_zero_chain_restrict_and_support():
    z = zero([[0, 0], [0.5, 0], [2, 0]])
    assert z.restrict(unit_disk(2)).mass == 2
    assert z.support_within([((0, 0), 0.6)]) is False
    assert z.uncovered([((0, 0), 0.6)]) == zero([[2, 0]])


@given(points, points, points)
def test_add_zero_is_a_group(a, b, c):
    a, b, c = zero(a), zero(b), zero(c)
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a + ZeroChain.empty(2)) == a
    assert (a + a).is_empty


def test_one_chain_reduces_to_empty():
    assert one([[[0, 0], [0, 0]]]).is_empty
    assert OneChain.empty(3).dim == 3
    c = one([[[0, 0], [1, 0]], [[0, 1], [1, 1]]])
    assert (c + c).is_empty
    assert (c + c).dim == 2


def test_segment_boundary_is_its_endpoints():
    c = one([[[0, 0], [1, 0]]])
    assert boundary_one(c) == zero([[0, 0], [1, 0]])
    assert c.mass == pytest.approx(1.0)


def test_closed_triangle_has_no_boundary():
    tri = one([[[0, 0], [1, 0]], [[1, 0], [0, 1]], [[0, 1], [0, 0]]])
    assert tri.boundary().is_empty


def test_reversed_segment_cancels():
    assert one([[[0, 0], [1, 1]], [[1, 1], [0, 0]]]).is_empty


def test_restrict_to_disk_clips_segment():
    c = one([[[-2, 0], [2, 0]]])
    assert c.restrict(unit_disk(2)).mass == pytest.approx(2.0)
    assert c.restrict(Complement(unit_disk(2))).mass == pytest.approx(2.0)


def test_normalized_merges_overlaps():
    c = one([[[0, 0], [2, 0]], [[1, 0], [3, 0]]])
    assert len(c) == 2
    merged = c.normalized()
    assert merged.mass == pytest.approx(2.0)
    assert merged.boundary() == c.boundary()


def test_subdivided_segment_is_geometrically_equal():
    split = one([[[0, 0], [1, 0]], [[1, 0], [2, 0]]])
    whole = one([[[0, 0], [2, 0]]])
    assert not split == whole
    assert split.geometrically_equal(whole)


@settings(max_examples=50)
@given(segments, st.floats(min_value=-0.9, max_value=0.9).map(lambda x: round(x, 3) + 1e-4))
def test_restriction_is_additive(segs, offset):
    c = one(segs)
    half = HalfSpace([1.0, 0.3], offset)
    inside, outside = c.restrict(half), c.restrict(Complement(half))
    assert inside.mass + outside.mass == pytest.approx(c.mass, abs=1e-9)


def test_restrict_along_face_is_degenerate():
    box = Box([0, 0], [1, 1])
    with pytest.raises(DegenerateCrossing):
        one([[[0, 0], [1, 0]]]).restrict(box)


def test_cone_fill_of_even_cycle():
    z = zero([[0.5, 0], [0, 0.5], [-0.5, 0], [0, -0.5]])
    cone = cone_fill(z, [0.1, 0.1])
    assert cone.boundary() == z


def test_slice_sphere_counts_crossings():
    c = one([[[-2, 0], [2, 0]]])
    assert slice_sphere(c, [0, 0], 1.0).mass == 2
    assert slice_count(c, [0, 0], 1.0) == 2
    with pytest.raises(TangencyError):
        slice_sphere(c, [0, 1], 1.0)


def test_slice_through_a_vertex_on_the_sphere():
    path = one([[[-2, 0], [1, 0]], [[1, 0], [3, 0]]])
    assert slice_sphere(path, [0, 0], 1.0) == zero([[-1, 0], [1, 0]])
    inside = one([[[0, 0], [1, 0]], [[1, 0], [0, 0.5]]])
    assert slice_sphere(inside, [0, 0], 1.0).is_empty


def test_homothety_scales_mass():
    c = one([[[0, 0], [1, 0]], [[0, 0], [0, 1]]])
    assert homothety(c, [0, 0], 0.5).mass == pytest.approx(1.0)
    assert homothety(zero([[1, 1]]), [0, 0], 0.5) == zero([[0.5, 0.5]])


def test_components_split_disjoint_pieces():
    c = one([[[0, 0], [1, 0]], [[1, 0], [1, 1]], [[3, 3], [4, 3]]])
    parts = components(c)
    assert [len(p) for p in parts] == [2, 1]


def test_two_chain_boundary_of_square():
    square = TwoChain([[[0, 0], [1, 0], [1, 1]], [[0, 0], [1, 1], [0, 1]]])
    assert square.mass == pytest.approx(1.0)
    assert square.boundary().mass == pytest.approx(4.0)
    clipped = square.clip(Box([0, 0], [0.5, 1]))
    assert clipped.mass == pytest.approx(0.5)


def test_convex_polygon_rejects_reflex_vertices():
    with pytest.raises(NonConvexDomain):
        ConvexPolygon([(0, 0), (2, 0), (1, 0.2), (1, 2)])


def test_ball_line_interval():
    lo, hi = Ball([0, 0], 1.0).line_interval(np.array([0.0, 0.0]), np.array([0.5, 0.0]))
    assert lo == pytest.approx(-2.0)
    assert hi == pytest.approx(2.0)


def test_eps_geom_env_override(monkeypatch):
    monkeypatch.setenv(ENV_VAR, "1e-7")
    assert eps_geom() == pytest.approx(1e-7)
    monkeypatch.setenv(ENV_VAR, "large")
    with pytest.raises(ConfigError):
        eps_geom()
    monkeypatch.delenv(ENV_VAR)
    assert eps_geom() == pytest.approx(1e-9)
