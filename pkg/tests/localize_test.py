import numpy as np
import pytest

from chains import OneChain, ZeroChain, unit_disk
from chains.regions import Box
from coarea import AdmissibleFamily, Grid, certificate
from core.errors import (
    BadSpec,
    BoundaryMismatch,
    CertMissing,
    DeltaTooLarge,
    DimUnsupported,
    NotFine,
    NotLocalized,
    OddParity,
)
from core.generators import generate_family
from core.pipeline import difference_certs
from cubical.complex import CubicalComplex
from cubical.family import VertexMap, nearest_original
from localize import (
    cone_constant,
    cone_in_balls,
    coverage_radius,
    fill_small_family,
    interpolate_edge,
    localize_family,
    mass_bound,
    mass_constant,
    mass_exponent,
    project_chain,
    select_path,
    split_filling,
)
from localize.family import CONE, INDUCTIVE


def zero(pts):
    return ZeroChain(np.asarray(pts, dtype=float).reshape(-1, 2), dim=2)


@pytest.fixture(scope="module")
def drifting():
    spec = {"kind": "drifting", "n": 2, "points": 4, "d": 1, "q": 2, "drift": 0.005}
    return generate_family(spec, seed=7)


def test_recursive_constants():
    assert mass_constant(0, 1) == 18
    assert mass_constant(0, 2) == 2916
    assert mass_exponent(0, 1) == 1
    assert mass_exponent(0, 2) == 3
    assert [cone_constant(p) for p in range(3)] == [1, 7, 25]
    assert coverage_radius(0.5, 1) == pytest.approx(0.0625)
    assert mass_bound(0, 1, 10, 0.5, 0.01) == pytest.approx(18 * 20 * 0.01)


def test_construction_path_by_dimension():
    assert select_path(2, 1) == INDUCTIVE
    assert select_path(2, 2) == INDUCTIVE
    assert select_path(3, 1) == CONE
    assert select_path(2, 3) == CONE
    with pytest.raises(DimUnsupported):
        select_path(3, 4)


def test_edge_interpolation_meets_in_the_middle():
    Fv, Fw = zero([[0.0, 0.0]]), zero([[0.5, 0.0]])
    tau = OneChain([[[0.0, 0.0], [0.5, 0.0]]], dim=2)
    grid = Grid.single(np.array([[0.1, 0.0], [0.4, 0.0]]), [0.2, 0.2])
    edge = interpolate_edge(Fv, Fw, tau, grid, r=0.2)
    seq = edge.sequence()
    assert seq[0] == Fv
    assert seq[-1] == Fw
    assert edge.forward[-1].chain == edge.backward[-1].chain
    for sample in edge.forward + edge.backward:
        assert sample.reconstruct() == sample.chain


def test_edge_interpolation_needs_a_filling():
    tau = OneChain([[[0.0, 0.0], [0.4, 0.0]]], dim=2)
    grid = Grid.single(np.array([[0.0, 0.0]]), [0.5])
    with pytest.raises(BoundaryMismatch):
        interpolate_edge(zero([[0.0, 0.0]]), zero([[0.5, 0.0]]), tau, grid)


def test_localize_keeps_original_values(drifting):
    F_prime, certs, report = localize_family(drifting, eps=0.05, delta=0.5)
    assert report.passed
    assert report.originals_kept
    assert report.localization.localized
    Q = report.Q
    for v in drifting.vertices():
        assert F_prime[tuple(Q * x for x in v)] == drifting[v]
    assert report.max_mass_in == 4


def test_localize_report_checks_the_profile(drifting):
    _, _, report = localize_family(drifting, eps=0.05, delta=0.5)
    loc = report.localization
    assert loc.delta_sum < report.delta
    assert loc.N <= report.N_bound
    assert report.passed
    loc.delta_sum = report.delta
    assert not report.passed
    loc.delta_sum, loc.N = 0.0, report.N_bound + 1
    assert not report.passed


def test_localize_in_space_at_small_delta():
    spec = {"kind": "drifting", "n": 3, "points": 3, "d": 1, "q": 1, "drift": 0.005}
    F = generate_family(spec, seed=3)
    _, _, report = localize_family(F, eps=0.05, delta=0.05)
    assert report.path == CONE
    assert report.passed
    assert report.L < 50_000


def test_localize_rejects_bad_delta(drifting):
    for delta in (0.0, 2.5):
        with pytest.raises(DeltaTooLarge):
            localize_family(drifting, eps=0.05, delta=delta)


def test_localize_requires_fine_family():
    spec = {"kind": "drifting", "n": 2, "points": 4, "d": 1, "q": 1, "drift": 0.3}
    with pytest.raises(NotFine):
        localize_family(generate_family(spec, seed=0), eps=1e-4, delta=0.5)


def test_cone_in_balls():
    cert = AdmissibleFamily.from_specs([(np.zeros(2), 0.3)], delta=1.0)
    z = zero([[0.1, 0.0], [0.0, 0.1]])
    assert cone_in_balls(z, cert).boundary() == z
    assert cone_in_balls(ZeroChain.empty(2), cert).is_empty
    with pytest.raises(OddParity):
        cone_in_balls(zero([[0.1, 0.0]]), cert)
    with pytest.raises(NotLocalized):
        cone_in_balls(zero([[0.5, 0.0], [0.6, 0.0]]), cert)


def test_small_filling_has_the_right_boundary(drifting):
    certs = difference_certs(drifting, rho=0.01, link=0.2)
    tau, report = fill_small_family(drifting, certs, eps=0.05)
    assert report.passed
    assert report.boundary_failures == 0
    for v in tau.complex.vertices():
        assert tau[v].boundary() == drifting[nearest_original(v, report.Q)]


def test_small_filling_of_static_family():
    spec = {"kind": "static", "n": 2, "points": 6, "d": 1, "q": 2}
    F = generate_family(spec, seed=3)
    certs = difference_certs(F, rho=0.01, link=0.2)
    assert all(c.count == 0 for c in certs.values())
    tau, report = fill_small_family(F, certs)
    assert report.passed
    assert report.max_mass == pytest.approx(max(tau[v].mass for v in tau.complex.vertices()))


def test_certificate_rebuilt_from_differences(drifting):
    cell = next(iter(drifting.complex.maximal_cells()))
    a, b = (drifting[v] for v in cell.vertices())
    assert certificate([a + b], rho=0.01).covers(a + b)


def test_project_chain_onto_a_box():
    Q = Box([0.0, 0.0], [1.0, 1.0])
    inside = OneChain([[[0.2, 0.2], [0.8, 0.2]]], dim=2)
    assert project_chain(inside, Q) == inside
    crossing = OneChain([[[0.5, 0.5], [1.5, 0.5]]], dim=2)
    assert project_chain(crossing, Q) == OneChain([[[0.5, 0.5], [1.0, 0.5]]], dim=2)
    beside = OneChain([[[-0.5, 0.2], [-0.5, 0.8]]], dim=2)
    assert project_chain(beside, Q) == OneChain([[[0.0, 0.2], [0.0, 0.8]]], dim=2)


def test_split_filling_along_a_box():
    X = CubicalComplex.grid(1, 1)
    crossing = OneChain([[[0.5, 0.5], [1.5, 0.5]]], dim=2)
    G = VertexMap(X, {(0,): crossing, (1,): crossing})
    certs = {cell: AdmissibleFamily.empty(0.5) for cell in X.maximal_cells()}
    G_Q, G_Qc, projected, report = split_filling(G, Box([0.0, 0.0], [1.0, 1.0]), certs)
    assert report.passed
    assert report.vertices == 2
    for v in X.vertices():
        assert G_Q[v] == OneChain([[[0.5, 0.5], [1.0, 0.5]]], dim=2)
        assert G_Qc[v] == OneChain([[[1.0, 0.5], [1.5, 0.5]]], dim=2)
    with pytest.raises(CertMissing):
        split_filling(G, Box([0.0, 0.0], [1.0, 1.0]), {})
    with pytest.raises(BadSpec):
        split_filling(G, unit_disk(2), certs)
