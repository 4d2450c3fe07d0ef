import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chains import OneChain, ZeroChain, unit_disk
from chains.operations import segment_distance
from chains.regions import Box
from coarea import (
    AdmissibleFamily,
    Chopper,
    certificate,
    check_localized,
    chop,
    cover_centers,
    measured_constant,
    merge_admissible,
    monotone_constant,
    monotonize,
    select_radii,
    select_radius,
    support_points,
    verify_coverage,
)
from core.errors import BudgetExceeded, Infeasible
from cubical.complex import CubicalComplex
from cubical.family import VertexMap


@st.composite
def ball_lists(draw):
    count = draw(st.integers(min_value=0, max_value=8))
    coords = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)
    radii = st.floats(min_value=0.01, max_value=0.4, allow_nan=False)
    return [(np.array([draw(coords), draw(coords)]), draw(radii)) for _ in range(count)]


def zero(pts):
    return ZeroChain(np.asarray(pts, dtype=float).reshape(-1, 2), dim=2)


def test_overlapping_balls_merge_into_enclosing_ball():
    family = merge_admissible([(np.array([0.0, 0.0]), 1.0), (np.array([1.0, 0.0]), 1.0)])
    assert family.count == 1
    (center, radius), = family.balls
    assert radius == pytest.approx(1.5)
    assert center == pytest.approx((0.5, 0.0))


@settings(max_examples=100)
@given(ball_lists())
def test_merge_is_disjoint_and_covers_inputs(balls):
    family = merge_admissible(balls)
    assert family.is_admissible()
    assert family.radius_sum <= 3.0 * sum(r for _, r in balls) + 1e-12
    out = family.specs()
    for c, r in balls:
        assert any(np.linalg.norm(c - oc) + r <= orad + 1e-9 for oc, orad in out)


def test_merge_respects_budget():
    with pytest.raises(BudgetExceeded):
        merge_admissible([(np.zeros(2), 0.5)], budget=1.0)
    with pytest.raises(BudgetExceeded):
        merge_admissible([(np.zeros(2), 0.5)], delta=0.4)


def test_validate_rejects_overlap():
    family = AdmissibleFamily.from_specs([(np.zeros(2), 0.5), (np.array([0.5, 0.0]), 0.5)], 10.0)
    assert not family.is_disjoint()
    with pytest.raises(BudgetExceeded):
        family.validate()
    assert AdmissibleFamily.empty().is_admissible()


def test_certificate_covers_its_chains():
    seg = OneChain([[[0.0, 0.0], [0.2, 0.0]]], dim=2)
    pts = zero([[0.5, 0.5]])
    for link in (None, 0.1):
        cert = certificate([seg, pts], rho=0.01, link=link)
        assert cert.covers(seg)
        assert cert.covers(pts)
        assert cert.is_admissible()


def test_monotone_constants():
    assert monotone_constant(1) == 1
    assert monotone_constant(2) == 15
    assert monotone_constant(3) == 273


@pytest.mark.parametrize("domain", [unit_disk(2), Box([0, 0], [1, 1]), unit_disk(3)])
def test_cover_reaches_every_point(domain):
    cover = cover_centers(domain, 0.25)
    covered, worst = verify_coverage(cover, domain, samples=2000)
    assert covered
    assert worst <= 0.25 + 1e-9
    assert measured_constant(cover, domain) > 0


def test_cover_near_a_support_keeps_the_close_centers():
    disk = unit_disk(2)
    segment = OneChain([[[-0.5, 0.1], [0.6, 0.3]]], dim=2)
    support = support_points([segment], 0.25)
    full = cover_centers(disk, 0.25)
    near = cover_centers(disk, 0.25, near=support)
    assert 0 < near.L < full.L
    dist, _ = full.tree().query(near.points)
    assert np.all(dist < 1e-9)
    gaps = np.array([segment_distance(segment.segments, x)[0] for x in full.points])
    close = full.points[gaps <= 0.5]
    dist, _ = near.tree().query(close)
    assert np.all(dist < 1e-9)


def test_cover_near_nothing_stays_small():
    cover = cover_centers(unit_disk(3), 0.002, near=support_points([ZeroChain.empty(3)], 0.002))
    assert 0 < cover.L < 1000


def test_cover_radius_must_be_positive():
    with pytest.raises(ValueError):
        cover_centers(unit_disk(2), 0.0)


def test_selected_radius_meets_slice_bound():
    chain = OneChain([[[-1.0, 0.05], [1.0, 0.05]], [[0.0, -1.0], [0.0, 1.0]]], dim=2)
    s = select_radius(np.zeros(2), [chain], K=1, r=0.2)
    assert 0.2 <= s <= 0.4
    assert select_radius(np.zeros(2), [OneChain.empty(2)], K=1, r=0.2) == pytest.approx(0.3)


def test_too_many_chains_is_infeasible():
    cover = cover_centers(unit_disk(2), 0.5)
    chains = [OneChain.empty(2), OneChain.empty(2)]
    with pytest.raises(Infeasible):
        select_radii(cover, chains, K=1)
    assert len(select_radii(cover, chains, K=2)) == cover.L


def test_chopping_everything_leaves_nothing():
    tau = OneChain([[[-0.5, 0.1], [0.5, 0.1]]], dim=2)
    cover = cover_centers(unit_disk(2), 0.25)
    assert chop(tau, 0, cover) == tau
    assert chop(tau, cover.L, cover).is_empty
    with pytest.raises(ValueError):
        chop(tau, cover.L + 1, cover)


def test_chop_prefixes_shrink():
    tau = OneChain([[[-0.5, 0.1], [0.5, 0.1]], [[0.0, -0.6], [0.0, 0.6]]], dim=2)
    chopper = Chopper(cover_centers(unit_disk(2), 0.3))
    masses = [c.mass for c in chopper.prefixes(tau, range(chopper.L))]
    assert masses[0] == pytest.approx(tau.mass)
    assert all(b <= a + 1e-12 for a, b in zip(masses, masses[1:]))
    assert masses[-1] == pytest.approx(0.0)


def test_chop_radius_is_memoized():
    tau = OneChain([[[-0.5, 0.1], [0.5, 0.1]]], dim=2)
    chopper = Chopper(cover_centers(unit_disk(2), 0.3))
    l = chopper.active([tau])[0]
    first = chopper.radius(tau, l)
    assert chopper.radius(tau, l) == first
    assert chopper.memo_size == 1
    assert 0.3 <= first <= 0.6


def test_localized_family():
    X = CubicalComplex.grid(1, 1)
    a, b = zero([[0.0, 0.0]]), zero([[0.0, 0.0], [0.5, 0.5]])
    F = VertexMap(X, {(0,): a, (1,): b})
    cell = next(iter(X.maximal_cells()))
    good = check_localized(F, {cell: certificate([zero([[0.5, 0.5]])], rho=0.05)})
    assert good.localized
    assert good.within(N=1, delta=1.0)
    bad = check_localized(F, {cell: AdmissibleFamily.empty(1.0)})
    assert not bad.localized
    assert bad.violations[0]["outside"] == [[0.5, 0.5]]


def test_missing_certificate_is_a_violation():
    X = CubicalComplex.grid(1, 1)
    F = VertexMap(X, {v: zero([]) for v in X.vertices()})
    report = check_localized(F, {})
    assert not report.localized
    assert report.violations[0]["reason"] == "missing certificate"


def test_monotonize_covers_every_face():
    X = CubicalComplex.grid(2, 1)
    cell = next(iter(X.maximal_cells()))
    cert = certificate([zero([[0.2, 0.2]])], rho=0.05)
    out = monotonize({cell: cert}, X)
    assert len(out) == X.count(0) + X.count(1) + X.count(2)
    for face in X.cells(1):
        assert out[face].count == 1
    assert out[cell].radius_sum <= 15 * cert.delta
    for vertex in X.cells(0):
        assert out[vertex].count == 0
