"""Holomorphic-radius estimation and the minimal-disc census.

The holomorphic radius of a domain G containing the origin is
sqrt(inf E(X) / pi) over one-dimensional analytic sets X through the
origin, where E is Euclidean area counted with multiplicity.  The search
here ranges over parameterized candidate families (complex lines through
the origin, polynomial graphs in both coordinate orders, and slices of
complexified boundary circles), so the reported upper bound is a bound
for the searched families, never a claim about the true infimum.  The
lower bound is rigorous: the inscribed ball forces every candidate
through the origin to have area at least pi * inradius^2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from . import areas, domains
from .errors import (
    InvalidInputError,
    UnboundedCandidateError,
    UnsupportedDomainError,
)

_PI = np.pi
_BALL_IN_REAL_BIDISC = 2.0 / np.sqrt(np.pi)
_REGISTRY_MARGIN = 1e-6


# ---------------------------------------------------------------------------
# candidates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineCandidate:
    """Complex line through the origin along a unit direction vector."""

    direction: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=complex)
        norm = np.linalg.norm(d)
        if norm < 1e-12:
            raise InvalidInputError("line direction must be nonzero")
        object.__setattr__(self, "direction", d / norm)

    @property
    def n(self):
        return self.direction.shape[0]

    def disc(self, radius: float) -> areas.ParamDisc:
        w = self.direction

        def fn(z):
            return (radius * z)[:, None] * w[None, :]

        def fp(z):
            return np.broadcast_to(radius * w, (z.shape[0], self.n)).copy()

        return areas.holomorphic_disc(fn, fp, self.n)

    def describe(self) -> dict:
        return {
            "kind": "line",
            "direction": [[float(c.real), float(c.imag)] for c in self.direction],
        }


@dataclass(frozen=True)
class GraphCandidate:
    """Graph {(z, p(z))} with p(0) = 0, or the swapped order {(p(z), z)}.

    Only defined in C^2; coeffs holds (a_1, ..., a_d) for
    p(z) = a_1 z + ... + a_d z^d, so the origin constraint is structural.
    """

    coeffs: np.ndarray
    swapped: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))

    @property
    def n(self):
        return 2

    def _p(self, z):
        out = np.zeros_like(z)
        for a_k in self.coeffs[::-1]:
            out = (out + a_k) * z
        return out

    def _dp(self, z):
        out = np.zeros_like(z)
        for k in range(len(self.coeffs), 0, -1):
            out = out * z + k * self.coeffs[k - 1]
        return out

    def disc(self, radius: float) -> areas.ParamDisc:
        def fn(z):
            w = radius * z
            cols = (w, self._p(w)) if not self.swapped else (self._p(w), w)
            return np.stack(cols, axis=-1)

        def fp(z):
            w = radius * z
            one = np.full_like(w, radius)
            dp = radius * self._dp(w)
            cols = (one, dp) if not self.swapped else (dp, one)
            return np.stack(cols, axis=-1)

        return areas.holomorphic_disc(fn, fp, 2)

    def line_direction(self, tol: float = 1e-3):
        """Unit direction when the graph degenerates to a line, else None."""
        if len(self.coeffs) > 1 and np.linalg.norm(self.coeffs[1:]) > tol:
            return None
        a1 = self.coeffs[0] if len(self.coeffs) else 0.0
        w = np.array([1.0, a1]) if not self.swapped else np.array([a1, 1.0])
        return w / np.linalg.norm(w)

    def describe(self) -> dict:
        return {
            "kind": "graph",
            "swapped": bool(self.swapped),
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }


@dataclass(frozen=True)
class CurveCandidate:
    """Slice of a complexified boundary circle used as an analytic candidate.

    Admissible for the radius search only when the curve passes through
    the origin (then it degenerates to a complex line); inadmissible
    curves can still be measured for diagnostics.
    """

    curve: domains.AlgebraicCurve

    @property
    def n(self):
        return self.curve.u.shape[0]

    def admissible(self, tol: float = 1e-8) -> bool:
        return domains.passes_through_origin(self.curve, tol)

    def disc(self, radius: float) -> areas.ParamDisc:
        def fn(z):
            t = radius * z
            out = np.empty(t.shape + (self.n,), dtype=complex)
            tiny = np.abs(t) < 1e-12
            safe = np.where(tiny, 1.0, t)
            out[:] = self.curve.at(safe)
            out[tiny] = 1e9  # pole at t = 0; far outside every domain here
            return out

        return areas.ParamDisc(fn, self.n)

    def describe(self) -> dict:
        return {
            "kind": "rational-circle",
            "u": [[float(c.real), float(c.imag)] for c in self.curve.u],
            "v": [[float(c.real), float(c.imag)] for c in self.curve.v],
        }


def axis_line(n: int, j: int) -> LineCandidate:
    e = np.zeros(n, dtype=complex)
    e[j] = 1.0
    return LineCandidate(e)


def candidate_direction(candidate, tol: float = 1e-3):
    if isinstance(candidate, LineCandidate):
        return candidate.direction
    if isinstance(candidate, GraphCandidate):
        return candidate.line_direction(tol)
    return None


def same_candidate(c1, c2, tol: float = 1e-3) -> bool:
    """Geometric identity of candidates up to parameterization."""
    d1, d2 = candidate_direction(c1), candidate_direction(c2)
    if d1 is not None and d2 is not None:
        return abs(np.vdot(d1, d2)) >= 1.0 - 10 * tol
    if d1 is not None or d2 is not None:
        return False
    if isinstance(c1, GraphCandidate) and isinstance(c2, GraphCandidate):
        if c1.swapped != c2.swapped:
            return False
        k = max(len(c1.coeffs), len(c2.coeffs))
        a = np.zeros(k, dtype=complex)
        b = np.zeros(k, dtype=complex)
        a[: len(c1.coeffs)] = c1.coeffs
        b[: len(c2.coeffs)] = c2.coeffs
        return np.linalg.norm(a - b) <= 10 * tol
    return False


# ---------------------------------------------------------------------------
# areas of candidates
# ---------------------------------------------------------------------------

def exit_radius(candidate, domain: domains.Domain, r_max: float = 64.0,
                n_rim: int = 128) -> float:
    """Smallest tested parameter radius whose image rim lies outside the domain.

    Shrinks below 1 when the candidate already exits at the initial probe,
    so steeply parameterized candidates (huge graph slopes) are integrated
    at their true scale.
    """
    thetas = np.exp(2j * np.pi * np.arange(n_rim) / n_rim)

    def rim_all_outside(r):
        rim = candidate.disc(r).values(thetas)
        return bool(np.all(domain.gauge(rim.reshape(-1, domain.n)) > 1.0))

    r = 1.0
    if rim_all_outside(r):
        while r > 1e-9 and rim_all_outside(r / 2):
            r /= 2.0
        return r
    while r <= r_max:
        r *= 2.0
        if rim_all_outside(r):
            return r
    raise UnboundedCandidateError(
        "candidate stays inside the domain out to the parameter-radius budget"
    )


def candidate_area(candidate, domain: domains.Domain,
                   quad: areas.QuadratureConfig | None = None,
                   r_max: float = 64.0) -> float:
    """Euclidean area of the candidate's image inside the domain.

    The candidate is parameterized over a disc of adaptive radius (grown
    until the rim leaves the domain) and the clipped pullback area does
    the rest; multiplicity is counted by the integral.
    """
    if candidate.n != domain.n:
        raise InvalidInputError("candidate dimension does not match the domain")
    if not domain.bounded:
        r = exit_radius(candidate, domain, r_max)
    else:
        r = exit_radius(candidate, domain, max(r_max, 4.0 * domain.circumradius()))
    disc = candidate.disc(1.25 * r)
    return areas.clipped_area(disc, domain, quad)


# ---------------------------------------------------------------------------
# search configuration and machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OptimizerConfig:
    max_degree: int = 4
    lattice_span: float = 3.0
    lattice_points: int = 9
    nm_iterations: int = 200
    restarts: int = 8
    seed: int = 0
    r_max: float = 64.0
    search_quad: areas.QuadratureConfig = field(
        default_factory=lambda: areas.QuadratureConfig(n_r=64, n_theta=128, two_level=False)
    )
    final_quad: areas.QuadratureConfig = field(
        default_factory=lambda: areas.QuadratureConfig(n_r=128, n_theta=256, two_level=False)
    )


DEFAULT_FAMILIES = ("lines", "graphs", "swapped-graphs")


@dataclass(frozen=True)
class RadiusEstimate:
    """Bracketing estimate of the holomorphic radius.

    upper is heuristic (best candidate found over the stated families);
    lower is the rigorous inscribed-ball bound.
    """

    upper: float
    lower: float
    best_candidate: object
    best_area: float
    samples_evaluated: int
    families: tuple


class _SearchState:
    def __init__(self, domain, quad, r_max):
        self.domain = domain
        self.quad = quad
        self.r_max = r_max
        self.evaluations = 0
        self.visited = []  # (candidate, area)

    def measure(self, candidate) -> float:
        self.evaluations += 1
        try:
            a = candidate_area(candidate, self.domain, self.quad, self.r_max)
        except UnboundedCandidateError:
            return np.inf
        self.visited.append((candidate, a))
        return a


def _line_param_to_candidate(params, n, chart):
    w = np.zeros(n, dtype=complex)
    w[chart] = 1.0
    free = [j for j in range(n) if j != chart]
    for i, j in enumerate(free):
        w[j] = params[2 * i] + 1j * params[2 * i + 1]
    return LineCandidate(w)


def _graph_param_to_candidate(params, degree, swapped):
    c = params[0::2] + 1j * params[1::2]
    return GraphCandidate(c[:degree], swapped=swapped)


def _family_parameterizations(family, n, degree):
    """Yield (dim, to_candidate) pairs for a family name."""
    if family == "lines":
        for chart in range(n):
            dim = 2 * (n - 1)
            yield dim, (lambda p, chart=chart: _line_param_to_candidate(p, n, chart))
    elif family == "graphs" or family == "swapped-graphs":
        if n != 2:
            return
        swapped = family == "swapped-graphs"
        yield 2 * degree, (lambda p: _graph_param_to_candidate(p, degree, swapped))
    else:
        raise InvalidInputError(f"unknown candidate family: {family!r}")


def _lattice_starts(dim, opt: OptimizerConfig):
    """Coarse lattice on the leading complex coefficient, zeros elsewhere.

    A full lattice in every real dimension is unaffordable beyond a couple
    of coefficients; the leading-coefficient lattice plus multi-start
    refinement in the full space keeps the budget flat.
    """
    ticks = np.linspace(-opt.lattice_span, opt.lattice_span, opt.lattice_points)
    starts = []
    for re, im in itertools.product(ticks, ticks):
        p = np.zeros(dim)
        p[0], p[1] = re, im
        starts.append(p)
    return starts


def _search_family(state: _SearchState, dim, to_candidate, opt: OptimizerConfig):
    start_scores = []
    for p in _lattice_starts(dim, opt):
        start_scores.append((state.measure(to_candidate(p)), tuple(p)))
    start_scores.sort(key=lambda t: (t[0], t[1]))

    def objective(p):
        return state.measure(to_candidate(np.asarray(p)))

    results = []
    for score, p in start_scores[: opt.restarts]:
        res = optimize.minimize(
            objective,
            np.asarray(p),
            method="Nelder-Mead",
            options={
                "maxiter": opt.nm_iterations,
                "xatol": 1e-6,
                "fatol": 1e-9,
                "initial_simplex": _initial_simplex(np.asarray(p), 0.25),
            },
        )
        results.append((float(res.fun), to_candidate(res.x)))
    results.sort(key=lambda t: t[0])
    return results


def _initial_simplex(x0, step):
    dim = x0.shape[0]
    simplex = np.tile(x0, (dim + 1, 1))
    for k in range(dim):
        simplex[k + 1, k] += step
    return simplex


def estimate_rh(domain: domains.Domain, families=DEFAULT_FAMILIES,
                opt: OptimizerConfig | None = None) -> RadiusEstimate:
    """Bracket the holomorphic radius of a domain containing the origin.

    The lower bound is inradius(G): the inscribed ball gives every
    admissible candidate area at least pi * inradius^2.  The upper bound
    is sqrt(best found area / pi) over the requested families, refined by
    lattice seeding plus Nelder-Mead restarts on the candidate parameters.
    """
    opt = opt or OptimizerConfig()
    if not domain.contains(np.zeros(domain.n, dtype=complex)):
        raise InvalidInputError("the domain must contain the origin")
    families = tuple(families)
    if not families:
        raise InvalidInputError("family list is empty")
    state = _SearchState(domain, opt.search_quad, opt.r_max)
    best_area, best_candidate = np.inf, None
    for family in families:
        for dim, to_candidate in _family_parameterizations(family, domain.n, opt.max_degree):
            results = _search_family(state, dim, to_candidate, opt)
            if results and results[0][0] < best_area:
                best_area, best_candidate = results[0][0], results[0][1]
    if best_candidate is None:
        raise InvalidInputError("no candidates produced by the requested families")
    best_area = candidate_area(best_candidate, domain, opt.final_quad, opt.r_max)
    lower = domain.inradius()
    return RadiusEstimate(
        upper=float(np.sqrt(best_area / _PI)),
        lower=float(lower),
        best_candidate=best_candidate,
        best_area=float(best_area),
        samples_evaluated=state.evaluations,
        families=families,
    )


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

NO_EMBEDDING_RULE = (
    "rigid lower bound: every analytic set through the origin has area at least "
    "pi * lower^2, and a symplectomorphism into D(R) x C^{n-1} would force the "
    "holomorphic radius to be at most R; lower > R rules it out"
)


@dataclass(frozen=True)
class CertificateVerdict:
    conclusion: str  # "no-embedding" or "inconclusive"
    rule: str
    lower: float
    cylinder_radius: float


def nonsqueeze_certificate(domain: domains.Domain, cylinder_radius: float,
                           estimate: RadiusEstimate) -> CertificateVerdict:
    """Certify non-existence of a symplectomorphism into D(R) x C^{n-1}.

    Only the rigorous lower bound is allowed to trigger the verdict; the
    heuristic upper bound never certifies anything, and the inconclusive
    answer makes no existence claim.
    """
    if estimate.lower > cylinder_radius:
        return CertificateVerdict(
            conclusion="no-embedding",
            rule=NO_EMBEDDING_RULE,
            lower=estimate.lower,
            cylinder_radius=float(cylinder_radius),
        )
    return CertificateVerdict(
        conclusion="inconclusive",
        rule="lower bound does not exceed the cylinder radius; no conclusion",
        lower=estimate.lower,
        cylinder_radius=float(cylinder_radius),
    )


def embedded_ball_bound(domain: domains.Domain) -> float:
    """Largest ball radius the registry certifies symplectically embeddable.

    Plain inclusions handle balls and polydiscs.  The unit real bidisc
    carries the recorded constant 2/sqrt(pi) (minus a registry margin):
    balls up to that radius are known to embed symplectically, encoded
    here as data rather than construction.  Products take the minimum
    over factors.
    """
    if isinstance(domain, domains.Ball):
        return domain.radius
    if isinstance(domain, domains.Disc):
        return domain.radius
    if isinstance(domain, domains.Polydisc):
        return min(domain.radii)
    if isinstance(domain, domains.RealBidisc):
        if abs(domain.r - 1.0) > 1e-12:
            raise UnsupportedDomainError("registry covers the unit real bidisc only")
        return _BALL_IN_REAL_BIDISC - _REGISTRY_MARGIN
    if isinstance(domain, domains.ProductDomain):
        return min(embedded_ball_bound(f) for f in domain.factors)
    raise UnsupportedDomainError(
        f"no registry entry for {type(domain).__name__}"
    )


# ---------------------------------------------------------------------------
# census of minimal discs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CensusEntry:
    candidate: object
    area: float
    touches_mixed_circles: bool


@dataclass(frozen=True)
class CensusReport:
    """Minimal-area candidates through the origin.

    minimizers lists the distinct candidates whose area sits within the
    tolerance band around pi; margin is the gap between pi and the best
    distinct local minimizer outside that band (None if none was found).
    """

    minimizers: tuple
    distinct_count: int
    margin: float | None
    area_tol: float


def origin_tangent(candidate):
    """Unit tangent direction of the candidate at the origin."""
    if isinstance(candidate, LineCandidate):
        return candidate.direction
    if isinstance(candidate, GraphCandidate):
        a1 = candidate.coeffs[0] if len(candidate.coeffs) else 0.0
        w = np.array([1.0, a1]) if not candidate.swapped else np.array([a1, 1.0])
        return w / np.linalg.norm(w)
    return None


def collapse_to_line(candidate, domain: domains.Domain, r_max: float = 64.0,
                     tol: float = 1e-4):
    """Replace a candidate by its tangent line when the two agree inside the domain.

    Optimizer end points often represent an axis disc through a runaway
    chart (huge graph coefficients whose in-domain image is straight to
    rounding).  Collapsing makes deduplication geometric rather than
    parametric; genuinely curved candidates are returned unchanged.
    """
    if isinstance(candidate, LineCandidate):
        return candidate
    t = origin_tangent(candidate)
    if t is None:
        return candidate
    try:
        r_exit = exit_radius(candidate, domain, r_max)
    except UnboundedCandidateError:
        return candidate
    rr = np.linspace(0.05, 1.2, 10)
    th = np.exp(2j * np.pi * np.arange(16) / 16)
    zeta = (r_exit * rr)[:, None] * th[None, :] / 1.0
    pts = candidate.disc(1.0).values(zeta.ravel())
    inside = domain.gauge(pts) <= 1.0
    pts = pts[inside]
    if pts.shape[0] == 0:
        return candidate
    proj = pts @ np.conj(t)
    resid = np.linalg.norm(pts - proj[:, None] * t[None, :], axis=1)
    scale = np.maximum(1.0, np.linalg.norm(pts, axis=1))
    if np.all(resid <= tol * scale):
        return LineCandidate(t)
    return candidate


def _census_supported(domain) -> bool:
    if isinstance(domain, domains.Polydisc):
        return all(abs(r - 1.0) <= 1e-12 for r in domain.radii)
    if isinstance(domain, domains.RealBidisc):
        return abs(domain.r - 1.0) <= 1e-12
    if isinstance(domain, domains.ProductDomain):
        first, rest = domain.factors[0], domain.factors[1:]
        return (
            isinstance(first, domains.RealBidisc)
            and abs(first.r - 1.0) <= 1e-12
            and all(
                isinstance(f, (domains.Polydisc, domains.Disc))
                and _census_supported(f if isinstance(f, domains.Polydisc) else domains.Polydisc((f.radius,)))
                for f in rest
            )
        )
    return False


def _mixed_circles(domain):
    try:
        circles = domain.boundary_circles()
    except UnsupportedDomainError:
        return []
    return [
        c for c in circles
        if not domains.passes_through_origin(domains.complexify(c), 1e-8)
    ]


def touches_circles(candidate, domain, circles, tol: float = 1e-3,
                    n_samples: int = 256) -> bool:
    """Whether the candidate's first-touch rim comes within tol of the circles."""
    if not circles:
        return False
    lo, hi = 0.0, exit_radius(candidate, domain, 1e3)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        rim = candidate.disc(mid).values(
            np.exp(2j * np.pi * np.arange(64) / 64)
        )
        if np.all(domain.gauge(rim.reshape(-1, domain.n)) <= 1.0):
            lo = mid
        else:
            hi = mid
    touch_r = 0.5 * (lo + hi)
    rim = candidate.disc(touch_r).values(
        np.exp(2j * np.pi * np.arange(n_samples) / n_samples)
    )
    dist = np.min([c.distance(rim) for c in circles], axis=0)
    return bool(np.min(dist) <= tol)


def minimal_disc_census(domain: domains.Domain, families=None,
                        opt: OptimizerConfig | None = None,
                        area_tol: float = 0.01) -> CensusReport:
    """Enumerate distinct local minimizers with area close to pi.

    Searches coordinate-axis discs plus the requested families, merges
    geometrically identical end points, and reports the count of distinct
    minimizers in the pi band together with the margin to the next
    distinct local minimum.
    """
    opt = opt or OptimizerConfig()
    if not _census_supported(domain):
        raise UnsupportedDomainError(
            "census supports unit polydiscs and unit real-bidisc products"
        )
    n = domain.n
    if families is None:
        families = DEFAULT_FAMILIES if n == 2 else ("lines",)
    state = _SearchState(domain, opt.search_quad, opt.r_max)

    found = [(axis_line(n, j), state.measure(axis_line(n, j))) for j in range(n)]
    for family in families:
        for dim, to_candidate in _family_parameterizations(family, n, opt.max_degree):
            for area, cand in _search_family(state, dim, to_candidate, opt):
                found.append((cand, area))

    # collapse line-like end points, refine at the final quadrature, deduplicate
    refined = []
    for cand, _ in found:
        cand = collapse_to_line(cand, domain, opt.r_max)
        a = candidate_area(cand, domain, opt.final_quad, opt.r_max)
        for i, (other, b) in enumerate(refined):
            if same_candidate(cand, other):
                if a < b:
                    refined[i] = (cand, a)
                break
        else:
            refined.append((cand, a))

    circles = _mixed_circles(domain)
    in_band = [(c, a) for c, a in refined if abs(a - _PI) <= area_tol * _PI]
    outside = [a for _, a in refined if a > _PI * (1.0 + area_tol)]
    entries = tuple(
        CensusEntry(
            candidate=c,
            area=a,
            touches_mixed_circles=touches_circles(c, domain, circles),
        )
        for c, a in sorted(in_band, key=lambda t: t[1])
    )
    margin = float(min(outside) - _PI) if outside else None
    return CensusReport(
        minimizers=entries,
        distinct_count=len(entries),
        margin=margin,
        area_tol=area_tol,
    )
