import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entmeasures import linalg as la
from entmeasures.states import bell, from_reversed_order, mixed_family, random_mixed

SY = np.array([[0, -1j], [1j, 0]])
X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def naive_partial_trace(m, d_a, d_b, keep):
    if keep == 1:
        out = np.zeros((d_a, d_a), dtype=complex)
        for a in range(d_a):
            for b in range(d_a):
                for c in range(d_b):
                    out[a, b] += m[a * d_b + c, b * d_b + c]
    else:
        out = np.zeros((d_b, d_b), dtype=complex)
        for a in range(d_b):
            for b in range(d_b):
                for c in range(d_a):
                    out[a, b] += m[c * d_b + a, c * d_b + b]
    return out


seeds = st.integers(min_value=0, max_value=2**32 - 1)


# -- arithmetic ------------------------------------------------------------------


def test_mul_examples():
    assert np.array_equal(la.mul(I2, I2), I2)
    assert np.array_equal(la.mul(X, X), I2)
    assert np.allclose(la.mul(SY, SY), I2, atol=0)


def test_mul_dimension_mismatch():
    with pytest.raises(la.LinalgError):
        la.mul(I2, np.eye(3))


def test_dagger_examples():
    assert np.array_equal(la.dagger(SY), SY)
    assert np.array_equal(la.dagger([[1, 2], [3, 4]]), np.array([[1, 3], [2, 4]]))
    a = np.random.default_rng(0).normal(size=(3, 3)) + 1j
    assert np.array_equal(la.dagger(la.dagger(a)), a)


def test_kron_examples():
    assert np.array_equal(la.kron(I2, I2), np.eye(4))
    yy = la.kron(SY, SY)
    # worked by hand: only the anti-diagonal survives
    assert np.array_equal(np.fliplr(yy).diagonal(), np.array([-1, 1, 1, -1]))
    assert np.count_nonzero(yy) == 4
    a = np.arange(9).reshape(3, 3) + 0j
    assert np.array_equal(la.kron(a, np.eye(1)), a)


def test_kron_index_convention():
    a = np.arange(4).reshape(2, 2) + 0j
    b = np.arange(9).reshape(3, 3) + 0j
    k = la.kron(a, b)
    for ja, ka, jb, kb in np.ndindex(2, 2, 3, 3):
        assert k[ja * 3 + jb, ka * 3 + kb] == a[ja, ka] * b[jb, kb]


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 4))
def test_kron_trace_factorizes(seed, n, m):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    b = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    assert abs(la.trace(la.kron(a, b)) - la.trace(a) * la.trace(b)) <= 1e-12 * max(1, abs(la.trace(a) * la.trace(b)))


def test_trace_examples():
    assert la.trace(np.eye(4)) == 4
    assert la.trace(np.zeros((3, 3))) == 0
    paper_bell = from_reversed_order(bell("psi_plus").density().m)
    assert abs(la.trace(paper_bell) - 1) < 1e-15


def test_non_finite_rejected():
    with pytest.raises(la.LinalgError):
        la.as_cmatrix([[1, np.nan], [0, 1]])


# -- eigensolver -----------------------------------------------------------------


def test_eig_examples():
    assert np.allclose(la.eig_hermitian(np.diag([0.25, 0.75])).eigenvalues, [0.25, 0.75], atol=1e-15)
    assert np.allclose(la.eig_hermitian(X).eigenvalues, [-1, 1], atol=1e-15)
    assert np.allclose(la.eig_hermitian(I2 + SY).eigenvalues, [0, 2], atol=1e-15)


def test_eig_rejects_non_hermitian():
    with pytest.raises(la.NotHermitianError):
        la.eig_hermitian([[0, 1], [0, 0]])


def test_eig_eigenvectors_of_sigma_y():
    e = la.eig_hermitian(SY)
    for lam, v in zip(e.eigenvalues, e.eigenvectors.T):
        assert np.allclose(SY @ v, lam * v, atol=1e-14)


def test_eig_is_deterministic():
    m = random_hermitian(np.random.default_rng(5), 6)
    a, b = la.eig_hermitian(m), la.eig_hermitian(m.copy())
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 9), st.floats(1e-3, 1e3))
def test_eig_reconstruction_and_orthonormality(seed, n, scale):
    m = random_hermitian(np.random.default_rng(seed), n, scale)
    e = la.eig_hermitian(m)
    norm = max(1.0, np.linalg.norm(m))
    assert np.linalg.norm(e.reconstruct() - m) <= 1e-10 * norm
    v = e.eigenvectors
    assert np.linalg.norm(v.conj().T @ v - np.eye(n)) <= 1e-10
    assert np.all(np.diff(e.eigenvalues) >= 0)
    assert abs(e.eigenvalues.sum() - np.trace(m).real) <= 1e-9 * norm


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 16))
def test_eig_matches_lapack(seed, n):
    m = random_hermitian(np.random.default_rng(seed), n)
    assert np.allclose(la.eig_hermitian(m).eigenvalues, np.linalg.eigvalsh(m), atol=1e-11)


def test_eig_degenerate_spectrum():
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    m = q @ np.diag([1, 1, 1, 2, 2]) @ q.conj().T
    e = la.eig_hermitian(m)
    assert np.allclose(e.eigenvalues, [1, 1, 1, 2, 2], atol=1e-12)
    assert np.linalg.norm(e.reconstruct() - m) <= 1e-10 * np.linalg.norm(m)


# -- partial trace ----------------------------------------------------------------


def test_partial_trace_bell():
    rho = bell("psi_plus").density().m
    assert np.allclose(la.partial_trace(rho, 2, 2, keep=1), I2 / 2, atol=1e-15)
    assert np.allclose(la.partial_trace(rho, 2, 2, keep=2), I2 / 2, atol=1e-15)


def test_partial_trace_product():
    zero = np.diag([1, 0]).astype(complex)
    one = np.diag([0, 1]).astype(complex)
    assert np.array_equal(la.partial_trace(np.kron(zero, one), 2, 2, keep=1), zero)
    assert np.array_equal(la.partial_trace(np.kron(zero, one), 2, 2, keep=2), one)


def test_partial_trace_mixed_family_spectrum():
    rho = mixed_family(np.pi / 3).m
    for keep in (1, 2):
        w = la.eig_hermitian(la.partial_trace(rho, 2, 2, keep)).eigenvalues
        assert np.allclose(w, [0.375, 0.625], atol=1e-10)


def test_partial_trace_bad_split():
    with pytest.raises(la.LinalgError):
        la.partial_trace(np.eye(4), 2, 3, keep=1)
    with pytest.raises(ValueError):
        la.partial_trace(np.eye(4), 2, 2, keep=3)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([(2, 2), (3, 3), (2, 3), (3, 2)]), st.sampled_from([1, 2]))
def test_partial_trace_matches_index_sum(seed, dims, keep):
    rho = random_mixed(np.random.default_rng(seed), *dims).m
    got = la.partial_trace(rho, *dims, keep=keep)
    assert np.max(np.abs(got - naive_partial_trace(rho, *dims, keep))) <= 1e-14
    assert abs(la.trace(got) - la.trace(rho)) <= 1e-12


# -- entropies -------------------------------------------------------------------


def test_entropy_examples():
    assert la.von_neumann_entropy(I2 / 2) == pytest.approx(1.0, abs=1e-14)
    v = np.array([1, 1j, -1, 0.5]) / np.sqrt(3.25)
    assert la.von_neumann_entropy(np.outer(v, v.conj())) == pytest.approx(0.0, abs=1e-12)
    # -(1/4)log2(1/4) - (3/4)log2(3/4), evaluated by hand
    assert la.von_neumann_entropy(np.diag([0.25, 0.75])) == pytest.approx(0.8112781244591328, abs=1e-12)


def test_entropy_normalizes_trace():
    assert la.von_neumann_entropy(np.eye(2) * 3.7) == pytest.approx(1.0, abs=1e-14)


def test_entropy_clamps_and_rejects():
    assert la.von_neumann_entropy(np.diag([1.0, -5e-9])) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(la.NotPositiveError):
        la.von_neumann_entropy(np.diag([1.0, -1e-6]))
    with pytest.raises(la.DegenerateTraceError):
        la.von_neumann_entropy(np.zeros((2, 2)))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 9))
def test_entropy_bounds(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    s = la.von_neumann_entropy(a @ a.conj().T)
    assert -1e-12 <= s <= np.log2(n) + 1e-12


def test_binary_entropy_values():
    assert la.binary_entropy(0.5) == 1.0
    assert la.binary_entropy(0.0) == 0.0
    assert la.binary_entropy(1.0) == 0.0
    assert la.binary_entropy(np.cos(np.pi / 8) ** 2) == pytest.approx(0.6008760366, abs=1e-10)


def test_relative_entropy_examples():
    zero = np.diag([1.0, 0.0])
    one = np.diag([0.0, 1.0])
    assert la.relative_entropy(zero, I2 / 2) == pytest.approx(1.0, abs=1e-14)
    assert la.relative_entropy(zero, one) == np.inf
    rho = random_mixed(np.random.default_rng(1)).m
    assert abs(la.relative_entropy(rho, rho)) <= 1e-10


def test_relative_entropy_classical():
    # both diagonal: reduces to the Kullback-Leibler divergence in bits
    p, q = np.array([0.2, 0.3, 0.5]), np.array([0.4, 0.4, 0.2])
    want = float(np.sum(p * np.log2(p / q)))
    assert la.relative_entropy(np.diag(p), np.diag(q)) == pytest.approx(want, abs=1e-13)


def test_relative_entropy_rejects_bad_trace():
    with pytest.raises(la.LinalgError):
        la.relative_entropy(np.eye(2), np.eye(2) / 2)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([(2, 2), (2, 3)]))
def test_klein_inequality(seed, dims):
    rng = np.random.default_rng(seed)
    rho, sigma = random_mixed(rng, *dims).m, random_mixed(rng, *dims).m
    d = la.relative_entropy(rho, sigma)
    assert d >= 0
    if np.linalg.norm(rho - sigma) > 1e-8:
        assert d > 0
