import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bidisc import linalg
from bidisc.errors import InvalidInputError


def random_complex_matrix(rng, n):
    return rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))


# ---------------------------------------------------------------------------
# realify
# ---------------------------------------------------------------------------

def test_realify_identity():
    assert np.array_equal(linalg.realify(np.eye(2)), np.eye(4))


def test_realify_multiplication_by_i_is_quarter_turn_blocks():
    j = linalg.realify(1j * np.eye(2))
    block = np.array([[0.0, -1.0], [1.0, 0.0]])
    expected = np.zeros((4, 4))
    expected[0:2, 0:2] = block
    expected[2:4, 2:4] = block
    assert np.allclose(j, expected)
    assert np.allclose(j @ j, -np.eye(4))


def test_realify_acts_like_complex_multiplication(rng):
    for n in (2, 3):
        m = random_complex_matrix(rng, n)
        z = rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)
        lhs = linalg.realify(m) @ linalg.to_real_vector(z)
        rhs = linalg.to_real_vector(m @ z)
        assert np.allclose(lhs, rhs, atol=1e-14)


def test_realify_is_algebra_homomorphism(rng):
    # direct matrix arithmetic oracle
    for n in (2, 3):
        for _ in range(20):
            m = random_complex_matrix(rng, n)
            k = random_complex_matrix(rng, n)
            prod = linalg.realify(m @ k) - linalg.realify(m) @ linalg.realify(k)
            add = linalg.realify(m + k) - (linalg.realify(m) + linalg.realify(k))
            assert linalg.operator_norm(prod) <= 1e-12
            assert linalg.operator_norm(add) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=8, max_size=8),
       st.lists(st.floats(-10, 10), min_size=8, max_size=8))
def test_realify_homomorphism_hypothesis(a, b):
    m = np.array(a[:4]).reshape(2, 2) + 1j * np.array(a[4:]).reshape(2, 2)
    k = np.array(b[:4]).reshape(2, 2) + 1j * np.array(b[4:]).reshape(2, 2)
    prod = linalg.realify(m @ k) - linalg.realify(m) @ linalg.realify(k)
    scale = max(1.0, linalg.operator_norm(m) * linalg.operator_norm(k))
    assert linalg.operator_norm(prod) <= 1e-10 * scale


def test_real_complex_vector_round_trip(rng):
    z = rng.uniform(-1, 1, 5) + 1j * rng.uniform(-1, 1, 5)
    assert np.array_equal(linalg.to_complex_vector(linalg.to_real_vector(z)), z)


def test_unitary_iff_orthogonal_and_commutes_with_i(rng):
    jst = linalg.standard_complex_structure(2)
    for _ in range(25):
        v = linalg.random_unitary(2, rng)
        rv = linalg.realify(v)
        assert linalg.is_orthogonal(rv, 1e-10)
        assert linalg.operator_norm(rv @ jst - jst @ rv) <= 1e-10
    for _ in range(25):
        t = linalg.random_orthogonal(4, rng)
        commutes = linalg.operator_norm(t @ jst - jst @ t) <= 1e-10
        # an orthogonal matrix commuting with i is the realification of a unitary
        if commutes:
            m = np.empty((2, 2), dtype=complex)
            m[0, 0] = t[0, 0] + 1j * t[1, 0]
            m[0, 1] = t[0, 2] + 1j * t[1, 2]
            m[1, 0] = t[2, 0] + 1j * t[3, 0]
            m[1, 1] = t[2, 2] + 1j * t[3, 2]
            assert linalg.is_unitary(m, 1e-10)


# ---------------------------------------------------------------------------
# planes and complex lines
# ---------------------------------------------------------------------------

def gram_schmidt_residual(target, basis_vectors):
    """Distance from a real 4-vector to the span of the given real vectors."""
    q = []
    for b in basis_vectors:
        w = b.astype(float).copy()
        for e in q:
            w = w - np.dot(w, e) * e
        q.append(w / np.linalg.norm(w))
    r = target.astype(float).copy()
    for e in q:
        r = r - np.dot(r, e) * e
    return np.linalg.norm(r)


def test_complex_line_coordinate_axis():
    p = linalg.RealPlane(np.array([1, 0]), np.array([1j, 0]))
    assert linalg.is_complex_line(p)


def test_not_complex_line_mixed_axes():
    p = linalg.RealPlane(np.array([1, 0]), np.array([0, 1]))
    # oracle: explicit Gram-Schmidt projection of i*u onto the plane
    res = gram_schmidt_residual(
        linalg.to_real_vector(np.array([1j, 0])),
        [linalg.to_real_vector(np.array([1.0, 0])),
         linalg.to_real_vector(np.array([0, 1.0]))],
    )
    assert res > 0.9
    assert not linalg.is_complex_line(p)


def test_complex_line_through_diagonal():
    u = np.array([1, 1]) / np.sqrt(2)
    p = linalg.RealPlane(u, 1j * u)
    assert linalg.is_complex_line(p)


def test_degenerate_plane_rejected():
    with pytest.raises(InvalidInputError):
        linalg.RealPlane.from_spanning(np.array([1, 0]), np.array([1 + 1e-14, 0]))


def test_complement_coordinate_axis_both_modes():
    p = linalg.RealPlane(np.array([1, 0]), np.array([1j, 0]))
    expected = linalg.RealPlane(np.array([0, 1]), np.array([0, 1j]))
    for mode in ("real", "complex"):
        c = linalg.complement(p, mode)
        assert linalg.planes_equal(c, expected)


def test_complement_real_mode_x1x2_plane():
    p = linalg.RealPlane(np.array([1, 0]), np.array([0, 1]))
    c = linalg.complement(p, "real")
    # oracle: Gram-Schmidt residuals identify the (y1, y2) plane
    for w in (c.u, c.v):
        res = gram_schmidt_residual(
            linalg.to_real_vector(w),
            [linalg.to_real_vector(np.array([1j, 0.0])),
             linalg.to_real_vector(np.array([0.0, 1j]))],
        )
        assert res <= 1e-12


def test_complement_complex_mode_diagonal_line():
    u = np.array([1, 1]) / np.sqrt(2)
    c = linalg.complement(linalg.RealPlane(u, 1j * u), "complex")
    w = np.array([1, -1]) / np.sqrt(2)
    assert linalg.planes_equal(c, linalg.RealPlane(w, 1j * w))
    # complex inner-product orthogonality oracle
    assert abs(np.vdot(u, c.u)) <= 1e-12


def test_complement_complex_mode_requires_complex_line():
    p = linalg.RealPlane(np.array([1, 0]), np.array([0, 1]))
    with pytest.raises(InvalidInputError):
        linalg.complement(p, "complex")


def test_double_complement_is_identity(rng):
    for _ in range(10):
        p = linalg.RealPlane.from_spanning(
            rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2),
            rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2),
        )
        c2 = linalg.complement(linalg.complement(p, "real"), "real")
        assert linalg.planes_equal(p, c2)
    for _ in range(10):
        u = rng.uniform(-1, 1, 2) + 1j * rng.uniform(-1, 1, 2)
        u = u / np.linalg.norm(u)
        p = linalg.RealPlane(u, 1j * u)
        c2 = linalg.complement(linalg.complement(p, "complex"), "complex")
        assert linalg.planes_equal(p, c2)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def test_classify_identity():
    res = linalg.classify_orthogonal(np.eye(4))
    assert res.equivalent
    assert res.pattern == (1, 1)
    assert np.allclose(res.witness_unitary, np.eye(2))
    assert res.residual <= 1e-12


def test_classify_coordinate_swap_not_equivalent():
    t0 = linalg.coordinate_swap_matrix()
    assert linalg.is_orthogonal(t0)
    res = linalg.classify_orthogonal(t0)
    assert not res.equivalent
    assert res.failed_plane == "TH1"


def test_classify_sign_patterns():
    for a, b in linalg.SIGN_PATTERNS:
        res = linalg.classify_orthogonal(linalg.sign_pattern_matrix(a, b))
        assert res.equivalent
        assert res.pattern == (a, b)
        assert res.residual <= 1e-12


def test_classify_recovers_constructed_equivalences(rng):
    # oracle: build T = realify(V) @ diag(1, a, 1, b) by hand and recover it
    for _ in range(50):
        v = linalg.random_unitary(2, rng)
        a, b = rng.choice([-1, 1]), rng.choice([-1, 1])
        t = linalg.realify(v) @ linalg.sign_pattern_matrix(int(a), int(b))
        res = linalg.classify_orthogonal(t)
        assert res.equivalent
        assert res.residual <= 1e-9
        target = linalg.sign_pattern_matrix(*res.pattern)
        check = linalg.operator_norm(linalg.realify(res.witness_unitary) @ t - target)
        assert check <= 1e-9


def test_classify_rejects_non_orthogonal():
    with pytest.raises(InvalidInputError):
        linalg.classify_orthogonal(np.diag([1.0, 2.0, 1.0, 1.0]))


def test_classification_invariance_under_unitary_and_pattern(rng):
    t0 = linalg.coordinate_swap_matrix()
    samples = [np.eye(4), t0] + [linalg.random_orthogonal(4, rng) for _ in range(10)]
    for t in samples:
        base = linalg.classify_orthogonal(t).equivalent
        v = linalg.random_unitary(2, rng)
        a, b = rng.choice([-1, 1]), rng.choice([-1, 1])
        left = linalg.realify(v) @ t
        right = t @ linalg.sign_pattern_matrix(int(a), int(b))
        assert linalg.classify_orthogonal(left).equivalent == base
        assert linalg.classify_orthogonal(right).equivalent == base


def test_random_orthogonal_rarely_equivalent(rng):
    hits = sum(
        linalg.classify_orthogonal(linalg.random_orthogonal(4, rng)).equivalent
        for _ in range(1000)
    )
    assert hits <= 10
