import numpy as np
import pytest

from bidisc import areas, domains, linalg, radius
from bidisc.errors import UnboundedCandidateError, UnsupportedDomainError

FAST_OPT = radius.OptimizerConfig(
    nm_iterations=120,
    restarts=4,
    search_quad=areas.QuadratureConfig(n_r=48, n_theta=96, two_level=False, bisect_iters=40),
    final_quad=areas.QuadratureConfig(n_r=96, n_theta=192, two_level=False),
)


def graph_area_closed_form(c):
    # E = pi (1 + |c|^2) min(1, 1/|c|^2) for the graph (z, c z) in the bidisc
    return np.pi * (1 + abs(c) ** 2) * min(1.0, 1.0 / abs(c) ** 2)


def graph_area_monte_carlo(c, n_samples=10_000_000, seed=7):
    """Surface-area oracle: sample the graph over the unit disc."""
    rng = np.random.default_rng(seed)
    total = 0
    hits = 0.0
    chunk = 1_000_000
    while total < n_samples:
        k = min(chunk, n_samples - total)
        z = rng.uniform(-1, 1, k) + 1j * rng.uniform(-1, 1, k)
        in_disc = np.abs(z) < 1
        hits += np.sum(in_disc & (np.abs(c * z) < 1))
        total += k
    # 4.0 is the area of the sampling square
    return 4.0 * (hits / total) * (1 + abs(c) ** 2)


# ---------------------------------------------------------------------------
# candidate areas
# ---------------------------------------------------------------------------

def test_axis_line_area_in_bidisc():
    val = radius.candidate_area(radius.axis_line(2, 0), domains.Polydisc((1.0, 1.0)))
    assert val == pytest.approx(np.pi, abs=1e-8)


def test_lines_through_ball_all_have_area_pi(rng):
    ball = domains.Ball(1.0, 2)
    for c in (0.0, 1.0, -2.3 + 1.1j, 0.2j):
        w = np.array([1.0, c])
        val = radius.candidate_area(radius.LineCandidate(w), ball)
        assert val == pytest.approx(np.pi, abs=1e-7)


def test_diagonal_graph_area_closed_form_and_monte_carlo():
    bidisc = domains.Polydisc((1.0, 1.0))
    got = radius.candidate_area(radius.GraphCandidate(np.array([1.0])), bidisc)
    assert got == pytest.approx(2 * np.pi, abs=1e-6)
    assert got == pytest.approx(graph_area_closed_form(1.0), abs=1e-6)
    mc = graph_area_monte_carlo(1.0)
    assert got == pytest.approx(mc, rel=5e-3)


def test_steep_graph_area_matches_oracles():
    c = 1.3 + 0.4j
    bidisc = domains.Polydisc((1.0, 1.0))
    got = radius.candidate_area(radius.GraphCandidate(np.array([c])), bidisc)
    assert got == pytest.approx(graph_area_closed_form(c), abs=1e-4)
    assert got == pytest.approx(graph_area_monte_carlo(c, n_samples=4_000_000), rel=5e-3)


def test_unbounded_candidate_rejected():
    cyl = domains.Cylinder(1.0, n=2, axis=0)
    free_line = radius.axis_line(2, 1)  # runs along the free factor
    with pytest.raises(UnboundedCandidateError):
        radius.candidate_area(free_line, cyl, r_max=16.0)


def test_real_direction_line_in_real_bidisc_has_square_section():
    # the section {t : (Re t)^2 < 1, (Im t)^2 < 1} is the open square, area 4
    val = radius.candidate_area(radius.axis_line(2, 0), domains.RealBidisc(1.0))
    assert val == pytest.approx(4.0, abs=5e-3)


def test_curve_candidate_area_in_ball():
    # complexified swap circle {z1^2 + z2^2 = 1}; inside radius-sqrt(2) ball
    # the slice has closed-form area 2 pi sqrt(3)
    curve = domains.AlgebraicCurve(np.array([1.0 + 0j, 0]), np.array([0, 1.0 + 0j]))
    cand = radius.CurveCandidate(curve)
    assert not cand.admissible()
    val = radius.candidate_area(cand, domains.Ball(np.sqrt(2.0), 2))
    assert val == pytest.approx(2 * np.pi * np.sqrt(3.0), rel=1e-4)


def test_curve_candidate_misses_real_bidisc():
    curve = domains.AlgebraicCurve(np.array([1.0 + 0j, 0]), np.array([0, 1.0 + 0j]))
    cand = radius.CurveCandidate(curve)
    val = radius.candidate_area(cand, domains.RealBidisc(1.0))
    assert val == pytest.approx(0.0, abs=1e-9)


def test_candidate_area_respects_lelong_bound(rng):
    # soundness of the lower bound on a spread of candidates and domains
    cases = [domains.Ball(1.0, 2), domains.Polydisc((1.0, 1.0)), domains.RealBidisc(1.0)]
    for g in cases:
        floor = np.pi * g.inradius() ** 2
        for _ in range(5):
            w = rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2)
            val = radius.candidate_area(radius.LineCandidate(w), g,
                                        areas.QuadratureConfig(64, 128, two_level=False))
            assert val >= floor - 1e-3


# ---------------------------------------------------------------------------
# radius estimates
# ---------------------------------------------------------------------------

def test_estimate_rh_ball_is_sharp():
    est = radius.estimate_rh(domains.Ball(1.0, 2), families=("lines",), opt=FAST_OPT)
    assert est.lower == pytest.approx(1.0)
    assert 0.98 <= est.upper <= 1.02
    assert est.samples_evaluated > 0


def test_estimate_rh_bidisc():
    est = radius.estimate_rh(domains.Polydisc((1.0, 1.0)), families=("lines",), opt=FAST_OPT)
    assert 0.98 <= est.upper <= 1.02
    assert est.lower == pytest.approx(1.0)


def test_estimate_rh_real_bidisc_stays_above_band():
    est = radius.estimate_rh(domains.RealBidisc(1.0), opt=FAST_OPT)
    assert est.best_area >= 1.05 * np.pi
    assert est.lower == pytest.approx(1.0)


def test_estimate_deterministic():
    a = radius.estimate_rh(domains.Ball(1.0, 2), families=("lines",), opt=FAST_OPT)
    b = radius.estimate_rh(domains.Ball(1.0, 2), families=("lines",), opt=FAST_OPT)
    assert a.upper == b.upper
    assert a.best_area == b.best_area
    assert a.samples_evaluated == b.samples_evaluated


def test_estimate_unitary_invariance(rng):
    base = radius.estimate_rh(domains.Polydisc((1.0, 1.0)), families=("lines",), opt=FAST_OPT)
    v = linalg.random_unitary(2, rng)
    moved = domains.TransformedDomain(linalg.realify(v), domains.Polydisc((1.0, 1.0)))
    est = radius.estimate_rh(moved, families=("lines",), opt=FAST_OPT)
    assert est.upper == pytest.approx(base.upper, rel=0.01)


def test_estimate_monotone_under_inclusion():
    small = radius.estimate_rh(domains.Ball(0.8, 2), families=("lines",), opt=FAST_OPT)
    big = radius.estimate_rh(domains.Polydisc((1.0, 1.0)), families=("lines",), opt=FAST_OPT)
    assert small.upper <= big.upper + 0.01


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def test_certificate_large_ball_blocks_unit_cylinder():
    est = radius.estimate_rh(domains.Ball(1.2, 2), families=("lines",), opt=FAST_OPT)
    verdict = radius.nonsqueeze_certificate(domains.Ball(1.2, 2), 1.0, est)
    assert verdict.conclusion == "no-embedding"
    assert verdict.lower > 1.0


def test_certificate_small_ball_inconclusive():
    est = radius.estimate_rh(domains.Ball(0.5, 2), families=("lines",), opt=FAST_OPT)
    verdict = radius.nonsqueeze_certificate(domains.Ball(0.5, 2), 1.0, est)
    assert verdict.conclusion == "inconclusive"


def test_certificate_never_overclaims_on_real_bidisc():
    # lower bound exactly 1 must not trigger the verdict at R = 1
    est = radius.estimate_rh(domains.RealBidisc(1.0), families=("lines",), opt=FAST_OPT)
    assert est.lower == pytest.approx(1.0)
    verdict = radius.nonsqueeze_certificate(domains.RealBidisc(1.0), 1.0, est)
    assert verdict.conclusion == "inconclusive"


def test_embedded_ball_bound_values():
    g = domains.ProductDomain((domains.RealBidisc(1.0), domains.Polydisc((1.2,))))
    assert radius.embedded_ball_bound(g) == pytest.approx(2.0 / np.sqrt(np.pi), abs=1e-6)
    assert radius.embedded_ball_bound(domains.Polydisc((1.0, 1.0))) == 1.0
    g2 = domains.ProductDomain((domains.RealBidisc(1.0), domains.Polydisc((1.05,))))
    assert radius.embedded_ball_bound(g2) == pytest.approx(1.05, abs=1e-6)
    with pytest.raises(UnsupportedDomainError):
        radius.embedded_ball_bound(domains.Cylinder(1.0, 2))


# ---------------------------------------------------------------------------
# census
# ---------------------------------------------------------------------------

def test_census_bidisc_has_two_minimizers():
    report = radius.minimal_disc_census(domains.Polydisc((1.0, 1.0)), opt=FAST_OPT)
    assert report.distinct_count == 2
    for entry in report.minimizers:
        assert entry.area == pytest.approx(np.pi, rel=0.01)
        assert not entry.touches_mixed_circles


def test_census_real_bidisc_times_disc_has_one():
    g = domains.ProductDomain((domains.RealBidisc(1.0), domains.Polydisc((1.0,))))
    report = radius.minimal_disc_census(g, opt=FAST_OPT)
    assert report.distinct_count == 1
    assert report.minimizers[0].area == pytest.approx(np.pi, rel=0.01)
    # the bidisc-plane minimizers sit at area 4, which drives the margin
    assert report.margin is not None
    assert report.margin > 0


def test_census_real_bidisc_alone_is_empty():
    report = radius.minimal_disc_census(domains.RealBidisc(1.0), opt=FAST_OPT)
    assert report.distinct_count == 0
    assert report.margin is not None
    assert report.margin > 0


def test_census_rejects_unsupported_domain():
    with pytest.raises(UnsupportedDomainError):
        radius.minimal_disc_census(domains.Ball(1.0, 2))
