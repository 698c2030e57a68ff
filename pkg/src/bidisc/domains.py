"""Domain geometry: balls, polydiscs, the real bidisc, cylinders, products,
orthogonal images, and the circles where their boundaries meet the unit sphere.

Every domain contains the origin and is star-shaped; membership and all
derived quantities go through the Minkowski gauge m(z) = inf{t > 0 : z in tG},
so that strict membership is exactly m(z) < 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, UnsupportedDomainError
from . import linalg


def _as_points(z, n):
    """Coerce to an (m, n) complex array; remembers whether input was a single point."""
    z = np.asarray(z, dtype=complex)
    single = z.ndim == 1
    if single:
        z = z[None, :]
    if z.shape[-1] != n:
        raise InvalidInputError(f"expected points in C^{n}, got shape {z.shape}")
    return z, single


class Domain:
    """Base class; subclasses define the gauge and closed-form geometry."""

    n: int  # complex dimension

    def gauge(self, z):
        raise NotImplementedError

    def contains(self, z):
        """Strict membership, exact per variant."""
        z, single = _as_points(z, self.n)
        inside = self.gauge(z) < 1.0
        return bool(inside[0]) if single else inside

    def on_boundary(self, z, tol=1e-12):
        z, single = _as_points(z, self.n)
        near = np.abs(self.gauge(z) - 1.0) <= tol
        return bool(near[0]) if single else near

    @property
    def bounded(self) -> bool:
        return True

    def inradius(self) -> float:
        """Radius of the largest Euclidean ball centered at 0 inside the domain."""
        raise UnsupportedDomainError(f"inradius unsupported for {type(self).__name__}")

    def circumradius(self) -> float:
        raise UnsupportedDomainError(f"circumradius unsupported for {type(self).__name__}")

    def axis_extent(self, k: int) -> float:
        """Upper bound for sup |z_k| over the domain (conservative where inexact)."""
        raise UnsupportedDomainError(f"axis_extent unsupported for {type(self).__name__}")

    def enlarged(self, width: float) -> "Domain":
        """A domain of the same family containing the width-neighborhood of this one."""
        raise UnsupportedDomainError(f"enlarged unsupported for {type(self).__name__}")

    def boundary_circles(self):
        raise UnsupportedDomainError(
            f"boundary circles unsupported for {type(self).__name__}"
        )


@dataclass(frozen=True)
class Ball(Domain):
    radius: float
    n: int = 2

    def __post_init__(self):
        if self.radius <= 0:
            raise InvalidInputError("radius must be positive")

    def gauge(self, z):
        return np.linalg.norm(z, axis=-1) / self.radius

    def inradius(self):
        return self.radius

    def circumradius(self):
        return self.radius

    def axis_extent(self, k):
        return self.radius

    def enlarged(self, width):
        return Ball(self.radius + width, self.n)


@dataclass(frozen=True)
class Disc(Domain):
    radius: float = 1.0
    n: int = field(default=1, init=False)

    def __post_init__(self):
        if self.radius <= 0:
            raise InvalidInputError("radius must be positive")

    def gauge(self, z):
        return np.abs(z[..., 0]) / self.radius

    def inradius(self):
        return self.radius

    def circumradius(self):
        return self.radius

    def axis_extent(self, k):
        return self.radius

    def enlarged(self, width):
        return Disc(self.radius + width)

    def boundary_circles(self):
        if abs(self.radius - 1.0) > 1e-12:
            raise UnsupportedDomainError("boundary circles require unit radius")
        e = np.array([1.0 + 0j])
        return [BoundaryCircle(e, 1j * e, label=1)]


@dataclass(frozen=True)
class Polydisc(Domain):
    radii: tuple

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if not radii or any(r <= 0 for r in radii):
            raise InvalidInputError("polydisc needs positive radii")
        object.__setattr__(self, "radii", radii)

    @property
    def n(self):
        return len(self.radii)

    def gauge(self, z):
        return np.max(np.abs(z) / np.asarray(self.radii), axis=-1)

    def inradius(self):
        return min(self.radii)

    def circumradius(self):
        return float(np.sqrt(np.sum(np.square(self.radii))))

    def axis_extent(self, k):
        return self.radii[k]

    def enlarged(self, width):
        return Polydisc(tuple(r + width for r in self.radii))

    def boundary_circles(self):
        if any(abs(r - 1.0) > 1e-12 for r in self.radii):
            raise UnsupportedDomainError("boundary circles require unit radii")
        out = []
        for j in range(self.n):
            e = np.zeros(self.n, dtype=complex)
            e[j] = 1.0
            out.append(BoundaryCircle(e, 1j * e, label=j + 1))
        return out


@dataclass(frozen=True)
class RealBidisc(Domain):
    """{ |x_1|^2 + |x_2|^2 < r, |y_1|^2 + |y_2|^2 < r } in C^2.

    The parameter r bounds the squared norms, following the defining
    inequalities literally; r = 1 is the canonical configuration.
    """

    r: float = 1.0
    n: int = field(default=2, init=False)

    def __post_init__(self):
        if self.r <= 0:
            raise InvalidInputError("r must be positive")

    def gauge(self, z):
        x2 = np.sum(np.square(z.real), axis=-1)
        y2 = np.sum(np.square(z.imag), axis=-1)
        return np.sqrt(np.maximum(x2, y2) / self.r)

    def inradius(self):
        # a point of norm rho can put all of its mass into the x-part,
        # so the inscribed ball needs rho^2 <= r
        return float(np.sqrt(self.r))

    def circumradius(self):
        return float(np.sqrt(2.0 * self.r))

    def axis_extent(self, k):
        return float(np.sqrt(2.0 * self.r))

    def enlarged(self, width):
        return RealBidisc((np.sqrt(self.r) + width) ** 2)

    def boundary_circles(self):
        if abs(self.r - 1.0) > 1e-12:
            raise UnsupportedDomainError("boundary circles require unit r")
        e1 = np.array([1.0 + 0j, 0.0])
        e2 = np.array([0.0, 1.0 + 0j])
        return [
            BoundaryCircle(e1, e2, label=1),          # x_1^2 + x_2^2 = 1
            BoundaryCircle(1j * e1, 1j * e2, label=2),  # y_1^2 + y_2^2 = 1
        ]


@dataclass(frozen=True)
class Cylinder(Domain):
    """D(R) x C^{n-1}, with the disc factor on a selectable axis."""

    radius: float
    n: int = 2
    axis: int = 0

    def __post_init__(self):
        if self.radius <= 0:
            raise InvalidInputError("radius must be positive")
        if not 0 <= self.axis < self.n:
            raise InvalidInputError("axis out of range")

    def gauge(self, z):
        return np.abs(z[..., self.axis]) / self.radius

    @property
    def bounded(self):
        return False

    def axis_extent(self, k):
        return self.radius if k == self.axis else np.inf

    def enlarged(self, width):
        return Cylinder(self.radius + width, self.n, self.axis)


@dataclass(frozen=True)
class ProductDomain(Domain):
    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise InvalidInputError("product needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @property
    def n(self):
        return sum(f.n for f in self.factors)

    def _slices(self):
        start = 0
        for f in self.factors:
            yield f, slice(start, start + f.n)
            start += f.n

    def gauge(self, z):
        return np.max(
            np.stack([f.gauge(z[..., s]) for f, s in self._slices()], axis=-1), axis=-1
        )

    @property
    def bounded(self):
        return all(f.bounded for f in self.factors)

    def inradius(self):
        return min(f.inradius() for f in self.factors)

    def circumradius(self):
        return float(np.sqrt(sum(f.circumradius() ** 2 for f in self.factors)))

    def axis_extent(self, k):
        for f, s in self._slices():
            if s.start <= k < s.stop:
                return f.axis_extent(k - s.start)
        raise InvalidInputError("axis out of range")

    def enlarged(self, width):
        return ProductDomain(tuple(f.enlarged(width) for f in self.factors))

    def boundary_circles(self):
        out = []
        for f, s in self._slices():
            for c in f.boundary_circles():
                u = np.zeros(self.n, dtype=complex)
                v = np.zeros(self.n, dtype=complex)
                u[s] = c.u
                v[s] = c.v
                out.append(BoundaryCircle(u, v, label=len(out) + 1))
        return out


@dataclass(frozen=True)
class TransformedDomain(Domain):
    """Image of a base domain under an orthogonal real-linear map."""

    transform: np.ndarray
    base: Domain

    def __post_init__(self):
        t = np.asarray(self.transform, dtype=float)
        if t.shape != (2 * self.base.n, 2 * self.base.n):
            raise InvalidInputError("transform shape does not match base dimension")
        if not linalg.is_orthogonal(t, 1e-10):
            raise InvalidInputError("transform must be orthogonal")
        object.__setattr__(self, "transform", t)

    @property
    def n(self):
        return self.base.n

    def _pull_back(self, z):
        flat = z.reshape(-1, self.n)
        re = np.empty((flat.shape[0], 2 * self.n))
        re[:, 0::2] = flat.real
        re[:, 1::2] = flat.imag
        back = re @ self.transform  # rows times T equals T^T applied to columns
        w = back[:, 0::2] + 1j * back[:, 1::2]
        return w.reshape(z.shape)

    def gauge(self, z):
        return self.base.gauge(self._pull_back(z))

    @property
    def bounded(self):
        return self.base.bounded

    def inradius(self):
        return self.base.inradius()

    def circumradius(self):
        return self.base.circumradius()

    def axis_extent(self, k):
        return self.base.circumradius()

    def enlarged(self, width):
        return TransformedDomain(self.transform, self.base.enlarged(width))

    def boundary_circles(self):
        out = []
        for c in self.base.boundary_circles():
            u = linalg.to_complex_vector(self.transform @ linalg.to_real_vector(c.u))
            v = linalg.to_complex_vector(self.transform @ linalg.to_real_vector(c.v))
            out.append(BoundaryCircle(u, v, label=c.label))
        return out


# ---------------------------------------------------------------------------
# boundary circles and their complexifications
# ---------------------------------------------------------------------------

def _circle_point(u, v, t):
    t = np.asarray(t, dtype=complex)
    a = 0.5 * (t + 1.0 / t)
    b = (t - 1.0 / t) / 2j
    return a[..., None] * u + b[..., None] * v


@dataclass(frozen=True)
class BoundaryCircle:
    """A circle of the boundary sphere, stored by its spanning plane pair.

    For t on the unit circle, the point is (t + 1/t)/2 * u + (t - 1/t)/(2i) * v,
    i.e. cos(theta) u + sin(theta) v at t = exp(i theta).
    """

    u: np.ndarray
    v: np.ndarray
    label: int = 0

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=complex))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=complex))

    def at(self, theta):
        theta = np.asarray(theta, dtype=float)
        return (
            np.cos(theta)[..., None] * self.u + np.sin(theta)[..., None] * self.v
        )

    def distance(self, z):
        """Euclidean distance from points to the circle (closed form)."""
        z = np.asarray(z, dtype=complex)
        a = linalg.to_real_vector(self.u)
        b = linalg.to_real_vector(self.v)
        flat = z.reshape(-1, z.shape[-1])
        re = np.empty((flat.shape[0], 2 * z.shape[-1]))
        re[:, 0::2] = flat.real
        re[:, 1::2] = flat.imag
        pa = re @ a
        pb = re @ b
        norm2 = np.sum(re * re, axis=-1)
        d2 = norm2 + 1.0 - 2.0 * np.sqrt(pa * pa + pb * pb)
        return np.sqrt(np.maximum(d2, 0.0)).reshape(z.shape[:-1])


@dataclass(frozen=True)
class AlgebraicCurve:
    """Complexification of a boundary circle: same parameterization with
    t ranging over C minus the origin (the projective closure adds the
    points at t = 0 and t = infinity but numerics never evaluate there)."""

    u: np.ndarray
    v: np.ndarray
    label: int = 0

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=complex))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=complex))

    def at(self, t):
        t = np.asarray(t, dtype=complex)
        if np.any(t == 0):
            raise InvalidInputError("curve parameter must avoid t = 0")
        return _circle_point(self.u, self.v, t)


def complexify(circle: BoundaryCircle) -> AlgebraicCurve:
    return AlgebraicCurve(circle.u, circle.v, circle.label)


def passes_through_origin(curve: AlgebraicCurve, tol: float = 1e-8) -> bool:
    """True when the curve's projective closure contains the origin.

    Happens exactly when u and v are complex-dependent, detected by the
    smallest singular value of the column matrix [u v].
    """
    m = np.stack([curve.u, curve.v], axis=1)
    s = np.linalg.svd(m, compute_uv=False)
    return float(s[-1]) <= tol
