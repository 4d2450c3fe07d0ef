import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chains import OneChain, ZeroChain, unit_disk
from chains.regions import ConvexPolygon
from core.errors import OddParity, TooLarge
from cubical.complex import CubicalComplex
from cubical.family import VertexMap
from flat import (
    ABSOLUTE,
    RELATIVE,
    check_fineness,
    edge_filling,
    flat_distance,
    flat_norm,
    flat_norm_oracle,
)

coord = st.integers(min_value=-12, max_value=12).map(lambda k: k / 16.0)
disk_points = st.lists(st.tuples(coord, coord), max_size=8)


def zero(pts):
    return ZeroChain(np.asarray(pts, dtype=float).reshape(-1, 2), dim=2)


def test_empty_chain_has_zero_norm():
    w = flat_norm(ZeroChain.empty(2))
    assert w.value == 0.0
    assert w.reconstructs(ZeroChain.empty(2))


def test_close_pair_is_matched():
    z = zero([[0, 0], [0.3, 0]])
    w = flat_norm(z)
    assert w.value == pytest.approx(0.3)
    assert len(w.matched_pairs) == 1
    assert w.reconstructs(z)


def test_far_pair_opts_out():
    z = zero([[-0.9, 0], [0.9, 0]])
    w = flat_norm(z)
    assert w.value == pytest.approx(1.8)
    assert flat_norm(zero([[-0.9, 0], [1.5, 0]]), unit_disk(2)).value == pytest.approx(2.0)


def test_single_point_costs_one():
    assert flat_norm(zero([[0.2, 0.1]])).value == pytest.approx(1.0)


def test_relative_mode_projects_to_boundary():
    z = zero([[0.9, 0]])
    w = flat_norm(z, unit_disk(2), RELATIVE)
    assert w.value == pytest.approx(0.1)
    assert len(w.boundary_projected) == 1
    assert w.reconstructs(z)


@settings(max_examples=60, deadline=None)
@given(disk_points, st.sampled_from([ABSOLUTE, RELATIVE]))
def test_matching_agrees_with_exhaustive_search(pts, mode):
    z = zero(pts)
    w = flat_norm(z, unit_disk(2), mode)
    assert w.value == pytest.approx(flat_norm_oracle(z, unit_disk(2), mode), abs=1e-9)
    assert w.reconstructs(z)


def test_oracle_refuses_large_inputs():
    z = zero([[k / 20.0, 0] for k in range(11)])
    with pytest.raises(TooLarge):
        flat_norm_oracle(z)


def test_triangle_domain():
    tri = ConvexPolygon([(0, 0), (1, 0), (0, 1)])
    z = zero([[0.2, 0.2], [0.25, 0.2]])
    assert flat_norm(z, tri).value == pytest.approx(0.05)


def test_flat_distance_is_symmetric():
    a, b = zero([[0, 0]]), zero([[0.1, 0]])
    assert flat_distance(a, b) == pytest.approx(0.1)
    assert flat_distance(a, b) == flat_distance(b, a)


def test_edge_filling_of_even_cycle():
    z = zero([[-0.9, 0], [0.9, 0], [0, 0.1], [0, -0.1]])
    fill = edge_filling(z)
    assert isinstance(fill, OneChain)
    assert fill.boundary() == z
    with pytest.raises(OddParity):
        edge_filling(zero([[0, 0]]))


def test_fineness_of_constant_family():
    X = CubicalComplex.grid(1, 2)
    z = zero([[0.1, 0.1]])
    report = check_fineness(VertexMap(X, {v: z for v in X.vertices()}), eps=0.01)
    assert report.fine
    assert report.pairs_checked == 0


def test_fineness_violation_is_recorded():
    X = CubicalComplex.grid(1, 1)
    F = VertexMap(X, {(0,): zero([[0, 0]]), (1,): zero([[0.5, 0]])})
    report = check_fineness(F, eps=0.1)
    assert not report.fine
    assert report.max_value == pytest.approx(0.5)
    assert report.violations[0]["value"] == pytest.approx(0.5)
