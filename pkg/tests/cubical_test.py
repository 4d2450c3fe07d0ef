from fractions import Fraction

import pytest

from core.errors import BadSpec, NotInCommonCell
from cubical.complex import Cell, CubicalComplex
from cubical.family import VertexMap, nearest_original, refine_family
from cubical.squeeze import center_cell, phi, vertex_metrics, xi


def test_grid_counts():
    X = CubicalComplex.grid(2, 3)
    assert len(X.vertices()) == 16
    assert len(list(X.maximal_cells())) == 9
    assert X.count(1) == 24
    assert X.dim == 2


def test_grid_skeleton_has_lower_dimension():
    X = CubicalComplex.grid(2, 2, j=1)
    assert X.dim == 1
    assert X.count(2) == 0


def test_refinement_must_be_odd():
    X = CubicalComplex.grid(1, 1)
    assert X.refine(3).q == 3
    assert len(X.refine(3).vertices()) == 4
    with pytest.raises(BadSpec):
        X.refine(2)


def test_skeleton_commutes_with_refinement():
    X = CubicalComplex.grid(2, 1)
    assert X.refine(3).skeleton(1) == X.skeleton(1).refine(3)


def test_carrier_of_refined_vertices():
    X = CubicalComplex.grid(1, 1).refine(3)
    assert X.carrier((1,)) == (Cell((0,), (0,)), (1,))
    assert X.carrier((3,)) == (Cell((1,), ()), ())


def test_point_scales_by_q():
    X = CubicalComplex.grid(2, 4)
    assert X.point((2, 4)) == (0.5, 1.0)


def test_complex_dict_round_trip():
    X = CubicalComplex.grid(2, 2)
    assert CubicalComplex.from_dict(X.to_dict()) == X
    with pytest.raises(BadSpec):
        CubicalComplex.from_dict({"d": 2})


def test_nearest_original_vertex():
    assert nearest_original((1,), 3) == (0,)
    assert nearest_original((2,), 3) == (1,)
    assert nearest_original((4, 5), 3) == (1, 2)


def test_refined_family_is_constant_near_originals():
    X = CubicalComplex.grid(1, 1)
    F = VertexMap(X, {(0,): "a", (1,): "b"})
    R = refine_family(F, 3)
    assert [R[v] for v in R.vertices()] == ["a", "a", "b", "b"]
    assert refine_family(F, 1) is F


def test_lazy_values_are_memoized():
    calls = []

    def value(v):
        calls.append(v)
        return sum(v)

    F = VertexMap(CubicalComplex.grid(1, 2), value)
    assert F.is_lazy
    assert F[(1,)] == 1
    assert F[(1,)] == 1
    assert calls == [(1,)]


def test_missing_vertex_raises():
    F = VertexMap(CubicalComplex.grid(1, 1), {(0,): 1})
    with pytest.raises(KeyError):
        F[(1,)]


def test_squeeze_map():
    assert phi(Fraction(1, 2)) == Fraction(1, 2)
    assert phi(Fraction(1, 4)) == 0
    assert phi(Fraction(5, 6)) == 1
    assert xi((Fraction(0), Fraction(2, 3))) == (0, 1)
    with pytest.raises(ValueError):
        xi((1.5,))


def test_center_cell_is_middle_third():
    assert center_cell(Cell((0, 0), (0, 1))) == (3, Cell((1, 1), (0, 1)))
    assert center_cell(Cell((1, 0), (1,))) == (3, Cell((3, 1), (1,)))


def test_vertex_metrics():
    assert vertex_metrics((0, 0), (0.5, 0.25), 4) == pytest.approx((0.5, 0.75, 3.0))
    with pytest.raises(NotInCommonCell):
        vertex_metrics((0, 0), (0, 2), 4)
