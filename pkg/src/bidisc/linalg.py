"""Real/complex linear algebra on R^{2n} ~ C^n and the orthogonal-image decision procedure.

The real coordinates are interleaved as (x_1, y_1, ..., x_n, y_n) for
z_j = x_j + i y_j.  All conversions and matrix representations in the
toolkit use this layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

DEFAULT_TOL = 1e-8


# ---------------------------------------------------------------------------
# vector and matrix conversions
# ---------------------------------------------------------------------------

def to_real_vector(z: np.ndarray) -> np.ndarray:
    """Complex n-vector -> real 2n-vector (x_1, y_1, ..., x_n, y_n)."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(2 * z.shape[-1], dtype=float)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def to_complex_vector(v: np.ndarray) -> np.ndarray:
    """Real 2n-vector -> complex n-vector.  Exact inverse of to_real_vector."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] % 2 != 0:
        raise InvalidInputError("real vector length must be even")
    return v[0::2] + 1j * v[1::2]


def realify(m: np.ndarray) -> np.ndarray:
    """Represent a complex n x n matrix as a real 2n x 2n matrix.

    The representation is an algebra homomorphism: realify(MN) equals
    realify(M) @ realify(N), and realify(M) @ to_real_vector(v) equals
    to_real_vector(M @ v).
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    if m.shape != (n, n):
        raise InvalidInputError("expected a square matrix")
    out = np.empty((2 * n, 2 * n), dtype=float)
    out[0::2, 0::2] = m.real
    out[0::2, 1::2] = -m.imag
    out[1::2, 0::2] = m.imag
    out[1::2, 1::2] = m.real
    return out


def standard_complex_structure(n: int) -> np.ndarray:
    """Real 2n x 2n matrix of multiplication by i."""
    return realify(1j * np.eye(n))


def conjugation_matrix(n: int) -> np.ndarray:
    """Real 2n x 2n matrix of componentwise complex conjugation."""
    d = np.ones(2 * n)
    d[1::2] = -1.0
    return np.diag(d)


def symplectic_form_matrix(n: int) -> np.ndarray:
    """Matrix W of the standard form: w(u, v) = u^T W v on real vectors."""
    return -standard_complex_structure(n)


def symplectic_product(u: np.ndarray, v: np.ndarray) -> float:
    """Standard symplectic pairing of two real 2n-vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(np.dot(u[0::2], v[1::2]) - np.dot(u[1::2], v[0::2]))


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value; the Euclidean-induced norm used throughout."""
    return float(np.linalg.norm(np.asarray(m), ord=2))


def is_orthogonal(t: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    t = np.asarray(t, dtype=float)
    return operator_norm(t.T @ t - np.eye(t.shape[0])) <= tol


def is_unitary(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    return operator_norm(m.conj().T @ m - np.eye(m.shape[0])) <= tol


# ---------------------------------------------------------------------------
# planes in C^2
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RealPlane:
    """Oriented real 2-plane in C^n spanned by an orthonormal pair (u, v)."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=complex))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=complex))

    def real_basis(self) -> np.ndarray:
        """2 x 2n array whose rows are the real forms of u and v."""
        return np.stack([to_real_vector(self.u), to_real_vector(self.v)])

    def gram_defect(self) -> float:
        b = self.real_basis()
        return operator_norm(b @ b.T - np.eye(2))

    @staticmethod
    def from_spanning(u: np.ndarray, v: np.ndarray, tol: float = DEFAULT_TOL) -> "RealPlane":
        """Orthonormalize a spanning pair; reject nearly parallel input."""
        a = to_real_vector(np.asarray(u, dtype=complex))
        na = np.linalg.norm(a)
        if na <= tol:
            raise InvalidInputError("degenerate plane: first spanning vector is zero")
        a = a / na
        b = to_real_vector(np.asarray(v, dtype=complex))
        b = b - np.dot(b, a) * a
        nb = np.linalg.norm(b)
        if nb <= max(tol, 1e-12) * 100:
            raise InvalidInputError("degenerate plane: spanning vectors nearly parallel")
        b = b / nb
        return RealPlane(to_complex_vector(a), to_complex_vector(b))


def _check_plane(p: RealPlane) -> None:
    if p.gram_defect() > 1e-6:
        raise InvalidInputError(
            "plane basis is not orthonormal; build it with RealPlane.from_spanning"
        )


def is_complex_line(p: RealPlane, tol: float = DEFAULT_TOL) -> bool:
    """True when the plane is closed under multiplication by i.

    Checks that i*u and i*v both project into span_R{u, v} with residual
    at most tol.  For an orthonormal pair this is equivalent to u and v
    being complex-dependent.
    """
    _check_plane(p)
    basis = p.real_basis()
    worst = 0.0
    for w in (1j * p.u, 1j * p.v):
        r = to_real_vector(w)
        r = r - basis.T @ (basis @ r)
        worst = max(worst, float(np.linalg.norm(r)))
    return worst <= tol


def complement(p: RealPlane, mode: str = "real", tol: float = DEFAULT_TOL) -> RealPlane:
    """Orthogonal complement of a plane in C^2.

    mode "real" uses the Euclidean inner product on R^4 and works for any
    nondegenerate plane.  mode "complex" uses the Hermitian inner product
    and requires the plane to be a complex line (otherwise the complex
    perpendicular is trivial and there is nothing to return).
    """
    _check_plane(p)
    if p.u.shape[0] != 2:
        raise InvalidInputError("complement is defined for planes in C^2 only")
    if mode == "real":
        basis = p.real_basis()
        _, _, vt = np.linalg.svd(basis)
        a, b = vt[2], vt[3]
        return RealPlane(to_complex_vector(a), to_complex_vector(b))
    if mode == "complex":
        if not is_complex_line(p, tol):
            raise InvalidInputError(
                "complex-mode complement requires a complex line; "
                "the Hermitian perpendicular of this plane is trivial"
            )
        w = p.u
        w_perp = np.array([-np.conj(w[1]), np.conj(w[0])])
        w_perp = w_perp / np.linalg.norm(w_perp)
        return RealPlane(w_perp, 1j * w_perp)
    raise InvalidInputError(f"unknown complement mode: {mode!r}")


def planes_equal(p: RealPlane, q: RealPlane, tol: float = 1e-8) -> bool:
    """Set equality of the spanned subspaces (projector comparison)."""
    bp = p.real_basis()
    bq = q.real_basis()
    return operator_norm(bp.T @ bp - bq.T @ bq) <= tol


# ---------------------------------------------------------------------------
# sign patterns and the classification of orthogonal images of the bidisc
# ---------------------------------------------------------------------------

def sign_pattern_matrix(a: int, b: int) -> np.ndarray:
    """diag(1, a, 1, b) acting on (x_1, y_1, x_2, y_2); a, b = +-1.

    The four such matrices are exactly per-coordinate identity or
    conjugation; they all map the bidisc onto itself.
    """
    if a not in (-1, 1) or b not in (-1, 1):
        raise InvalidInputError("pattern signs must be +-1")
    return np.diag([1.0, float(a), 1.0, float(b)])


SIGN_PATTERNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def coordinate_swap_matrix() -> np.ndarray:
    """The non-holomorphic swap (x1, y1, x2, y2) -> (x1, x2, y1, y2).

    Its image of the bidisc is the real bidisc; it is orthogonal but not
    unitary or conjugate-unitary.
    """
    t = np.zeros((4, 4))
    t[0, 0] = 1.0
    t[1, 2] = 1.0
    t[2, 1] = 1.0
    t[3, 3] = 1.0
    return t


@dataclass(frozen=True)
class ClassificationResult:
    """Outcome of the equivalence test for an orthogonal image of the bidisc.

    equivalent      -- whether some unitary brings T into a sign pattern
    witness_unitary -- the 2x2 unitary U with realify(U) @ T close to the pattern
    pattern         -- the pair (a, b) of per-axis signs, present when equivalent
    residual        -- operator norm of realify(U) @ T - pattern matrix
    failed_plane    -- "TH1" or "TH2": first coordinate line whose image is
                       not a complex line (present when not equivalent)
    """

    equivalent: bool
    witness_unitary: np.ndarray | None = None
    pattern: tuple[int, int] | None = None
    residual: float | None = None
    failed_plane: str | None = None


def classify_orthogonal(t: np.ndarray, tol: float = DEFAULT_TOL) -> ClassificationResult:
    """Decide whether an orthogonal T in O(4) maps the bidisc to a symplectomorphic copy.

    T is equivalent exactly when it carries both coordinate complex lines
    {z_2 = 0} and {z_1 = 0} to complex lines; in that case a witness
    unitary U and a sign pattern (a, b) are constructed with
    realify(U) @ T equal to diag(1, a, 1, b) up to the reported residual.
    """
    t = np.asarray(t, dtype=float)
    if t.shape != (4, 4):
        raise InvalidInputError("expected a 4 x 4 real matrix")
    if not is_orthogonal(t, tol):
        raise InvalidInputError("matrix is not orthogonal within tolerance")

    planes = []
    for i, name in ((0, "TH1"), (1, "TH2")):
        u = to_complex_vector(t[:, 2 * i])
        v = to_complex_vector(t[:, 2 * i + 1])
        plane = RealPlane(u, v)
        if not is_complex_line(plane, tol):
            return ClassificationResult(equivalent=False, failed_plane=name)
        planes.append(plane)

    # Unitary sending the image lines back to the coordinate axes.
    w1 = planes[0].u / np.linalg.norm(planes[0].u)
    w2 = planes[1].u
    w2 = w2 - np.vdot(w1, w2) * w1
    w2 = w2 / np.linalg.norm(w2)
    u0 = np.stack([w1, w2], axis=1).conj().T

    s0 = realify(u0) @ t
    signs = []
    phases = []
    for i in range(2):
        block = s0[2 * i:2 * i + 2, 2 * i:2 * i + 2]
        sign = 1 if np.linalg.det(block) > 0 else -1
        theta = float(np.arctan2(block[1, 0], block[0, 0]))
        signs.append(sign)
        phases.append(np.exp(-1j * theta))

    witness = np.diag(phases) @ u0
    pattern = (signs[0], signs[1])
    target = sign_pattern_matrix(*pattern)
    residual = operator_norm(realify(witness) @ t - target)
    if residual > tol:
        # Both image planes passed the line test, so the construction
        # cannot legitimately miss; a large residual means tol was too
        # loose for the line test.  Report honestly rather than clamp.
        return ClassificationResult(
            equivalent=False,
            failed_plane="TH1",
            residual=residual,
        )
    return ClassificationResult(
        equivalent=True,
        witness_unitary=witness,
        pattern=pattern,
        residual=residual,
    )


# ---------------------------------------------------------------------------
# random samplers used by tests, experiments, and the CLI
# ---------------------------------------------------------------------------

def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix via QR of a real Gaussian matrix."""
    m = rng.standard_normal((n, n))
    q, r = np.linalg.qr(m)
    return q * np.sign(np.diagonal(r))
