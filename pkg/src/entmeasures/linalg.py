"""Dense complex linear algebra for small bipartite systems.

Matrices are plain ``numpy`` complex128 arrays. The eigensolver is a cyclic
complex Jacobi method so the spectral quantities used by every measure come
from one self-contained routine. Entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-9
PSD_CLAMP = 1e-8
DEGENERATE_TRACE = 1e-12
SUPPORT_EIG_TOL = 1e-12
SUPPORT_WEIGHT_TOL = 1e-10
MAX_SWEEPS = 100


class LinalgError(ValueError):
    """Invalid input to a linear-algebra routine."""


class NotHermitianError(LinalgError):
    pass


class NotPositiveError(LinalgError):
    pass


class DegenerateTraceError(LinalgError):
    pass


class ConvergenceError(LinalgError):
    pass


@dataclass(frozen=True)
class HermitianEigen:
    """Eigenvalues in ascending order and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_cmatrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LinalgError("matrix has non-finite entries")
    return a


def mul(a, b) -> np.ndarray:
    a, b = as_cmatrix(a), as_cmatrix(b)
    if a.shape != b.shape:
        raise LinalgError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a @ b


def dagger(a) -> np.ndarray:
    return as_cmatrix(a).conj().T


def kron(a, b) -> np.ndarray:
    """Tensor product; row index of the result is ``j_a * dim(b) + j_b``."""
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def trace(m) -> complex:
    return complex(np.trace(as_cmatrix(m)))


def frobenius(m) -> float:
    return float(np.linalg.norm(m))


def hermiticity_error(m) -> float:
    return frobenius(m - m.conj().T)


def eig_hermitian(m) -> HermitianEigen:
    """Cyclic complex Jacobi eigendecomposition of a Hermitian matrix.

    Each sweep visits the strict upper triangle in row-major order. For the
    pair ``(p, q)`` the phase of ``m[p, q]`` is removed first, then a real
    plane rotation annihilates the now real off-diagonal element.

    Raises
    ------
    NotHermitianError
        If ``||m - m^H||_F > 1e-9 * max(1, ||m||_F)``.
    ConvergenceError
        If the off-diagonal norm does not drop below
        ``1e-12 * max(1, ||m||_F)`` within 100 sweeps.
    """
    a = as_cmatrix(m).copy()
    n = a.shape[0]
    scale = max(1.0, frobenius(a))
    if hermiticity_error(a) > HERMITIAN_TOL * scale:
        raise NotHermitianError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=np.complex128)
    target = 1e-12 * scale

    def off_norm() -> float:
        return frobenius(a - np.diag(np.diag(a)))

    sweeps = 0
    while off_norm() > target:
        if sweeps >= MAX_SWEEPS:
            raise ConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                j = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = j.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ j
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return HermitianEigen(w[order], v[:, order])


def eigvalsh_fast(m: np.ndarray) -> np.ndarray:
    """LAPACK eigenvalues for (batched) Hermitian matrices.

    Only for optimizer inner loops; reported values are recomputed with
    :func:`eig_hermitian`.
    """
    return np.linalg.eigvalsh(m)


def partial_trace(m, d_a: int, d_b: int, keep: int) -> np.ndarray:
    """Reduced matrix of party ``keep`` (1 or 2): ``(rho_1)_{ab} = sum_c rho_{ac,bc}``."""
    m = as_cmatrix(m)
    if m.shape[0] != d_a * d_b:
        raise LinalgError(f"split {d_a}x{d_b} inconsistent with matrix size {m.shape[0]}")
    t = m.reshape(d_a, d_b, d_a, d_b)
    if keep == 1:
        return np.einsum("acbc->ab", t)
    if keep == 2:
        return np.einsum("cacb->ab", t)
    raise LinalgError(f"party must be 1 or 2, got {keep}")


def entropy_of_spectrum(w, tol: float = PSD_CLAMP) -> float:
    """Entropy in bits of a spectrum after normalizing by its sum."""
    w = np.asarray(w, dtype=float)
    if np.any(w < -tol):
        raise NotPositiveError(f"eigenvalue {w.min():.3e} below -{tol:g}")
    w = np.clip(w, 0.0, None)
    total = w.sum()
    if total <= DEGENERATE_TRACE:
        raise DegenerateTraceError(f"trace {total:.3e} too small to normalize")
    p = w[w > 0] / total
    return float(max(0.0, -np.sum(p * np.log2(p))))


def von_neumann_entropy(m) -> float:
    """``-sum p log2 p`` over the trace-normalized spectrum of ``m``.

    Eigenvalues in ``[-1e-8, 0)`` are clamped to zero; anything more negative
    raises :class:`NotPositiveError`.
    """
    return entropy_of_spectrum(eig_hermitian(m).eigenvalues)


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def _check_density(m, name: str) -> np.ndarray:
    m = as_cmatrix(m)
    scale = max(1.0, frobenius(m))
    if hermiticity_error(m) > HERMITIAN_TOL * scale:
        raise NotHermitianError(f"{name} is not Hermitian")
    tr = np.trace(m).real
    if abs(tr - 1.0) > HERMITIAN_TOL:
        raise LinalgError(f"{name} has trace {tr:.12g}, expected 1")
    return m


def relative_entropy(rho, sigma) -> float:
    """Quantum relative entropy ``S(rho || sigma)`` in bits.

    Returns ``inf`` when ``rho`` has weight above 1e-10 on an eigendirection
    of ``sigma`` whose eigenvalue is below 1e-12.
    """
    rho = _check_density(rho, "rho")
    sigma = _check_density(sigma, "sigma")
    er = eig_hermitian(rho)
    es = eig_hermitian(sigma)
    if er.eigenvalues.min() < -PSD_CLAMP or es.eigenvalues.min() < -PSD_CLAMP:
        raise NotPositiveError("relative entropy needs positive semidefinite inputs")
    lr = np.clip(er.eigenvalues, 0.0, None)
    pos = lr > 0
    tr_rho_log_rho = float(np.sum(lr[pos] * np.log2(lr[pos])))
    v = es.eigenvectors
    weights = np.einsum("ik,ij,jk->k", v.conj(), rho, v).real
    cross = 0.0
    for lam, wt in zip(es.eigenvalues, weights):
        if lam < SUPPORT_EIG_TOL:
            if wt > SUPPORT_WEIGHT_TOL:
                return float("inf")
            continue
        cross += wt * np.log2(lam)
    return float(tr_rho_log_rho - cross)

