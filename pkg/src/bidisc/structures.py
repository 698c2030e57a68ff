"""Almost-complex-structure calculus.

A structure at a point is a real 2n x 2n matrix J with J^2 = -I.  Writing
Q = (J_st + J)^{-1} (J_st - J) gives a complex anti-linear operator, hence
a unique complex matrix A with A v = Q conj(v).  The correspondence J <-> A
is implemented in both directions, together with the taming test
(||A|| < 1), the canonical metric, cut-off truncation of matrix fields,
and the pushforward of the standard structure under a diffeomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg
from .domains import Ball, Domain
from .errors import (
    InvalidGeometryError,
    InvalidInputError,
    NotTamedError,
    SingularStructureError,
)


def smoothstep(t, order: int = 1):
    """Polynomial step from 0 at t<=0 to 1 at t>=1 with C^order smoothness."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    if order == 1:
        return t * t * (3.0 - 2.0 * t)
    if order == 2:
        return t ** 3 * (10.0 + t * (-15.0 + 6.0 * t))
    if order == 3:
        return t ** 4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)))
    raise InvalidInputError("smoothstep order must be 1, 2 or 3")


def structure_defect(j: np.ndarray) -> float:
    """Operator norm of J^2 + I; zero for a genuine complex structure."""
    j = np.asarray(j, dtype=float)
    return linalg.operator_norm(j @ j + np.eye(j.shape[0]))


@dataclass(frozen=True)
class AntilinearPart:
    """Anti-linear part Q of a structure and its complex matrix A."""

    q: np.ndarray
    a: np.ndarray

    def antilinearity_defect(self) -> float:
        n = self.a.shape[0]
        jst = linalg.standard_complex_structure(n)
        return linalg.operator_norm(self.q @ jst + jst @ self.q)


def antilinear_part(j: np.ndarray, tol: float = 1e-8) -> AntilinearPart:
    """Extract Q = (J_st + J)^{-1} (J_st - J) and the complex matrix A.

    Requires J_st + J to be invertible (true for every tamed structure).
    """
    j = np.asarray(j, dtype=float)
    if j.shape[0] % 2 != 0 or j.shape[0] != j.shape[1]:
        raise InvalidInputError("expected a 2n x 2n matrix")
    n = j.shape[0] // 2
    if structure_defect(j) > max(tol, 1e-6):
        raise InvalidInputError("matrix does not square to -I")
    jst = linalg.standard_complex_structure(n)
    s = jst + j
    if abs(np.linalg.det(s)) <= tol:
        raise SingularStructureError("J_st + J is singular")
    q = np.linalg.solve(s, jst - j)
    a = q[0::2, 0::2] + 1j * q[1::2, 0::2]
    return AntilinearPart(q=q, a=a)


def antilinear_to_real(a: np.ndarray) -> np.ndarray:
    """Real 2n x 2n matrix of v -> A conj(v)."""
    a = np.asarray(a, dtype=complex)
    return linalg.realify(a) @ linalg.conjugation_matrix(a.shape[0])


def structure_from_matrix(a: np.ndarray, require_tamed: bool = True) -> np.ndarray:
    """Build the structure J whose anti-linear part has complex matrix A.

    Inverts Q = (J_st + J)^{-1}(J_st - J) to J = J_st (I - Q)(I + Q)^{-1}.
    With ||A|| < 1 the inversion is always well posed; require_tamed=False
    admits larger A as long as I + Q stays invertible (used to generate
    untamed test structures).
    """
    a = np.asarray(a, dtype=complex)
    norm = linalg.operator_norm(a)
    if require_tamed and norm >= 1.0:
        raise NotTamedError(f"||A|| = {norm:.6f} >= 1; I + Q may be singular")
    q = antilinear_to_real(a)
    n = a.shape[0]
    eye = np.eye(2 * n)
    try:
        j = linalg.standard_complex_structure(n) @ np.linalg.solve((eye + q).T, (eye - q).T).T
    except np.linalg.LinAlgError as exc:
        raise SingularStructureError("I + Q is singular") from exc
    return j


def canonical_metric(j: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    """Symmetrized pairing g_J(X, Y) = (w(X, JY) + w(Y, JX)) / 2.

    Positive definite whenever J is tamed by the standard form.
    """
    xr = linalg.to_real_vector(np.asarray(x, dtype=complex))
    yr = linalg.to_real_vector(np.asarray(y, dtype=complex))
    j = np.asarray(j, dtype=float)
    return 0.5 * (
        linalg.symplectic_product(xr, j @ yr) + linalg.symplectic_product(yr, j @ xr)
    )


def taming_probe_minimum(a: np.ndarray, rng: np.random.Generator, n_probes: int = 64) -> float:
    """min of w(u, Ju)/|u|^2 over random probes plus the extremal direction.

    For u = (I + Q) w the pairing equals |w|^2 - |Qw|^2, so probing along
    the top singular vector of Q makes the sign match 1 - ||A|| exactly.
    """
    q = antilinear_to_real(a)
    n = a.shape[0]
    j = structure_from_matrix(a, require_tamed=False)
    dim = 2 * n
    probes = [rng.standard_normal(dim) for _ in range(n_probes)]
    _, _, vt = np.linalg.svd(q)
    probes.append((np.eye(dim) + q) @ vt[0])
    worst = np.inf
    for u in probes:
        nu = np.linalg.norm(u)
        if nu < 1e-12:
            continue
        worst = min(worst, linalg.symplectic_product(u, j @ u) / nu**2)
    return float(worst)


# ---------------------------------------------------------------------------
# matrix fields A(z)
# ---------------------------------------------------------------------------

class MatrixField:
    """A field of complex n x n matrices over C^n, zero outside its support.

    Subclasses implement _evaluate on an (m, n) batch of points; calling the
    field with a single point returns a single matrix.
    """

    n: int
    support: Domain
    norm_bound: float

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        single = z.ndim == 1
        pts = z[None, :] if single else z.reshape(-1, z.shape[-1])
        if pts.shape[-1] != self.n:
            raise InvalidInputError(f"expected points in C^{self.n}")
        vals = self._evaluate(pts)
        inside = self.support.gauge(pts) <= 1.0
        vals = np.where(inside[:, None, None], vals, 0.0)
        if single:
            return vals[0]
        return vals.reshape(z.shape[:-1] + (self.n, self.n))

    def _evaluate(self, pts):
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantField(MatrixField):
    matrix: np.ndarray
    support: Domain

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def norm_bound(self):
        return linalg.operator_norm(self.matrix)

    def _evaluate(self, pts):
        return np.broadcast_to(self.matrix, (pts.shape[0],) + self.matrix.shape).copy()


@dataclass(frozen=True)
class BumpField(MatrixField):
    """Radial bump: amplitude matrix times a polynomial profile of |z|.

    The profile equals 1 at the origin and vanishes for |z| >= radius;
    smoothness selects the C^1, C^2 or C^3 step polynomial.
    """

    matrix: np.ndarray
    radius: float
    smoothness: int = 1

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))
        if self.radius <= 0:
            raise InvalidInputError("bump radius must be positive")

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def support(self):
        return Ball(self.radius, self.n)

    @property
    def norm_bound(self):
        return linalg.operator_norm(self.matrix)

    def profile(self, radii):
        return 1.0 - smoothstep(np.asarray(radii) / self.radius, self.smoothness)

    def _evaluate(self, pts):
        chi = self.profile(np.linalg.norm(pts, axis=-1))
        return chi[:, None, None] * self.matrix


@dataclass(frozen=True)
class GridField(MatrixField):
    """Matrix field sampled on a rectangular grid in R^{2n}, interpolated
    multilinearly and zero outside the grid bounds."""

    values: np.ndarray  # shape (m_1, ..., m_{2n}, n, n) complex
    bounds: tuple       # ((lo, hi), ...) per real axis
    support: Domain

    def __post_init__(self):
        from scipy.interpolate import RegularGridInterpolator

        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", values)
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        dim = values.ndim - 2
        if len(bounds) != dim:
            raise InvalidInputError("bounds do not match grid dimension")
        if dim != 2 * self.support.n:
            raise InvalidInputError("grid dimension must be 2n")
        axes = [
            np.linspace(lo, hi, values.shape[k])
            for k, (lo, hi) in enumerate(bounds)
        ]
        n = values.shape[-1]
        flat = values.reshape(values.shape[:dim] + (n * n,))
        stacked = np.concatenate([flat.real, flat.imag], axis=-1)
        interp = RegularGridInterpolator(
            axes, stacked, method="linear", bounds_error=False, fill_value=0.0
        )
        object.__setattr__(self, "_interp", interp)

    @property
    def n(self):
        return self.values.shape[-1]

    @property
    def norm_bound(self):
        flat = self.values.reshape(-1, self.n, self.n)
        return float(np.max(np.linalg.svd(flat, compute_uv=False)[:, 0]))

    def _evaluate(self, pts):
        re = np.empty((pts.shape[0], 2 * self.n))
        re[:, 0::2] = pts.real
        re[:, 1::2] = pts.imag
        raw = self._interp(re)
        k = self.n * self.n
        mats = raw[:, :k] + 1j * raw[:, k:]
        return mats.reshape(pts.shape[0], self.n, self.n)


def grid_field_from_callable(field: MatrixField, resolution: int = 64) -> GridField:
    """Sample a field on a rectangular grid covering its support."""
    r = field.support.circumradius()
    bounds = tuple((-r, r) for _ in range(2 * field.n))
    axes = [np.linspace(lo, hi, resolution) for lo, hi in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    z = pts[:, 0::2] + 1j * pts[:, 1::2]
    vals = field(z).reshape(tuple(len(a) for a in axes) + (field.n, field.n))
    return GridField(vals, bounds, field.support)


@dataclass(frozen=True)
class JacobianField:
    """Derivative field of a diffeomorphism of C^n.

    dpsi maps an (m, n) batch of points to (m, 2n, 2n) real Jacobians.  For
    nonlinear maps, psi_inverse must be supplied so the pushforward can be
    evaluated at image points; linear maps can leave it as the identity.
    """

    dpsi: Callable
    base: Domain
    psi_inverse: Callable | None = None

    @property
    def n(self):
        return self.base.n

    def jacobians(self, pts):
        out = np.asarray(self.dpsi(pts), dtype=float)
        if out.shape != (pts.shape[0], 2 * self.n, 2 * self.n):
            raise InvalidInputError("dpsi returned wrong shape")
        return out

    def symplectic_defect(self, pts) -> float:
        """sup over the sample of ||dpsi^T W dpsi - W||."""
        d = self.jacobians(np.asarray(pts, dtype=complex).reshape(-1, self.n))
        w = linalg.symplectic_form_matrix(self.n)
        defect = np.swapaxes(d, -1, -2) @ w @ d - w
        return float(np.max(np.linalg.svd(defect, compute_uv=False)[:, 0]))


def linear_jacobian(matrix: np.ndarray, base: Domain) -> JacobianField:
    """JacobianField of the linear map with the given real 2n x 2n matrix."""
    matrix = np.asarray(matrix, dtype=float)
    inv = np.linalg.inv(matrix)

    def dpsi(pts):
        return np.broadcast_to(matrix, (pts.shape[0],) + matrix.shape).copy()

    def psi_inverse(pts):
        re = np.empty((pts.shape[0], matrix.shape[0]))
        re[:, 0::2] = pts.real
        re[:, 1::2] = pts.imag
        back = re @ inv.T
        return back[:, 0::2] + 1j * back[:, 1::2]

    return JacobianField(dpsi=dpsi, base=base, psi_inverse=psi_inverse)


@dataclass(frozen=True)
class PushforwardField(MatrixField):
    """Matrix field of the pushforward of the standard structure.

    At an image point w the structure is J = dpsi J_st dpsi^{-1} evaluated
    at the preimage of w, converted pointwise to its complex matrix.
    """

    jacobian: JacobianField
    support: Domain

    @property
    def n(self):
        return self.jacobian.n

    @property
    def norm_bound(self):
        # sampled bound; exact for constant Jacobians
        rng = np.random.default_rng(0)
        r = self.support.circumradius() if self.support.bounded else 1.0
        pts = r * (rng.uniform(-1, 1, (128, self.n)) + 1j * rng.uniform(-1, 1, (128, self.n)))
        pts = np.vstack([pts, np.zeros((1, self.n), dtype=complex)])
        vals = self._evaluate(pts)
        return float(np.max(np.linalg.svd(vals, compute_uv=False)[:, 0]))

    def _evaluate(self, pts):
        base_pts = pts if self.jacobian.psi_inverse is None else self.jacobian.psi_inverse(pts)
        d = self.jacobian.jacobians(base_pts)
        n = self.n
        jst = linalg.standard_complex_structure(n)
        j = d @ jst @ np.linalg.inv(d)
        s = jst + j
        dets = np.linalg.det(s)
        if np.any(np.abs(dets) <= 1e-12):
            raise SingularStructureError("J_st + J singular at a sample point")
        q = np.linalg.solve(s, jst - j)
        return q[:, 0::2, 0::2] + 1j * q[:, 1::2, 0::2]


def pushforward(jacobian: JacobianField, support: Domain | None = None) -> PushforwardField:
    """Matrix field of the structure obtained by pushing J_st forward."""
    return PushforwardField(jacobian=jacobian, support=support or jacobian.base)


@dataclass(frozen=True)
class TruncatedField(MatrixField):
    """Base field multiplied by a radial cut-off: 1 on the inner domain,
    0 outside its width-neighborhood, C^1 smoothstep in between."""

    base_field: MatrixField
    inner: Domain
    width: float

    @property
    def n(self):
        return self.base_field.n

    @property
    def support(self):
        return self.inner.enlarged(self.width)

    @property
    def norm_bound(self):
        return self.base_field.norm_bound

    def cutoff(self, pts):
        pts = np.asarray(pts, dtype=complex).reshape(-1, self.n)
        gauge = self.inner.gauge(pts)
        norms = np.linalg.norm(pts, axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ray = np.where(gauge > 1.0, norms * (1.0 - 1.0 / gauge), 0.0)
        return 1.0 - smoothstep(ray / self.width, order=1)

    def _evaluate(self, pts):
        chi = self.cutoff(pts)
        return chi[:, None, None] * self.base_field(pts)


def truncate_field(field: MatrixField, inner: Domain, width: float,
                   n_gap_samples: int = 512) -> TruncatedField:
    """Cut a field off outside the width-neighborhood of an inner domain.

    The neighborhood (hence the result's support) must fit inside the
    field's support; the gap is checked along sampled rays through the
    origin plus the coordinate directions.
    """
    if width <= 0:
        raise InvalidGeometryError("width must be positive")
    if inner.n != field.n:
        raise InvalidInputError("dimension mismatch between field and inner domain")
    dim = 2 * inner.n
    rng = np.random.default_rng(0)
    dirs = rng.standard_normal((n_gap_samples, dim))
    dirs = np.vstack([dirs, np.eye(dim), -np.eye(dim)])
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    z = dirs[:, 0::2] + 1j * dirs[:, 1::2]
    g_in = inner.gauge(z)
    g_sup = field.support.gauge(z)
    if np.any(g_in <= 0):
        raise InvalidGeometryError("inner domain is unbounded along a sampled ray")
    t_in = 1.0 / g_in
    with np.errstate(divide="ignore"):
        t_sup = np.where(g_sup > 0, 1.0 / g_sup, np.inf)
    if np.any(t_in + width > t_sup + 1e-12):
        raise InvalidGeometryError(
            "width exceeds the gap between the inner domain and the field support"
        )
    return TruncatedField(base_field=field, inner=inner, width=width)


def is_tamed(field: MatrixField, samples) -> tuple[bool, float]:
    """Sup of ||A(z)|| over the sample points and whether it stays below 1."""
    pts = np.asarray(samples, dtype=complex).reshape(-1, field.n)
    if pts.shape[0] == 0:
        raise InvalidInputError("sample set is empty")
    vals = field(pts)
    sup = float(np.max(np.linalg.svd(vals, compute_uv=False)[:, 0]))
    return sup < 1.0, sup
