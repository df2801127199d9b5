"""Established entanglement measures.

* :func:`pvne` - entropy of a reduced state of a pure bipartite state.
* :func:`concurrence` and :func:`eof_two_qubit` - Wootters' closed forms.
* :func:`eof_search` - direct minimization over ensemble decompositions.
* :func:`ree` - relative entropy to a K-term product-state mixture.

The two search-based measures report the best value found, which is an upper
bound on the true minimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import linalg
from .optimize import OptProblem, multi_start, rng_for
from .states import DensityMatrix, PureState

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)
RANK_TOL = 1e-10
PURITY_TOL = 1e-8
POLISH_ROUNDS = 25
# Eigenvalues of rho at or below this are rounding noise for the square root.
ROOT_CUTOFF = 1e-14


class MeasureError(ValueError):
    """Measure applied to an unsupported state (wrong dimensions, not pure, ...)."""


@dataclass
class MeasureResult:
    value: float
    flags: tuple[str, ...] = ()
    evaluations: int = 0
    restarts: int = 0
    iterations: int = 0
    best_objective: float = float("nan")
    witness: dict = field(default_factory=dict)

    @property
    def clamped(self) -> float:
        return max(0.0, self.value)


@dataclass
class ReeConfig:
    num_product_terms: int = 16
    restarts: int = 20
    max_iters: int = 2000
    seed: int = 0
    tol: float = 1e-9

    def __post_init__(self):
        if self.num_product_terms < 1:
            raise ValueError("num_product_terms must be >= 1")


def _two_qubit(rho: DensityMatrix, name: str):
    if not rho.is_two_qubit():
        raise MeasureError(f"{name} is defined for 2x2 systems only, got {rho.d_a}x{rho.d_b}")


def _as_density(state: Union[PureState, DensityMatrix]) -> DensityMatrix:
    return state.density() if isinstance(state, PureState) else state


def pvne(psi: Union[PureState, DensityMatrix], party: int = 1) -> float:
    """Entropy (bits) of the reduced state of a pure bipartite state."""
    rho = _as_density(psi)
    if not isinstance(psi, PureState):
        purity = float(np.trace(rho.m @ rho.m).real)
        if abs(purity - 1.0) > PURITY_TOL:
            raise MeasureError(f"pvne needs a pure state (purity {purity:.6g})")
    reduced = linalg.partial_trace(rho.m, rho.d_a, rho.d_b, keep=party)
    return linalg.von_neumann_entropy(reduced)


def spin_flip(rho: DensityMatrix) -> np.ndarray:
    _two_qubit(rho, "spin flip")
    return SPIN_FLIP @ rho.m.conj() @ SPIN_FLIP


def concurrence(rho: Union[PureState, DensityMatrix]) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` (square roots of the eigenvalues of ``rho @ rho_tilde``) are
    the singular values of ``A = sqrt(rho) Y sqrt(rho)^*`` with
    ``Y = sigma_y (x) sigma_y``, since ``A A^H = sqrt(rho) rho_tilde sqrt(rho)``.
    They are read off as the positive eigenvalues of the Hermitian matrix
    ``[[0, A], [A^H, 0]]``; squaring and re-rooting would turn 1e-17
    eigenvalue noise into 3e-9 errors.
    """
    rho = _as_density(rho)
    _two_qubit(rho, "concurrence")
    e = linalg.eig_hermitian(rho.m)
    w = np.where(e.eigenvalues > ROOT_CUTOFF, e.eigenvalues, 0.0)
    root = (e.eigenvectors * np.sqrt(w)) @ e.eigenvectors.conj().T
    a = root @ SPIN_FLIP @ root.conj()
    z = np.zeros_like(a)
    block = np.block([[z, a], [a.conj().T, z]])
    lam = linalg.eig_hermitian(block).eigenvalues[::-1][:4]
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def eof_from_concurrence(c: float) -> float:
    c = min(1.0, max(0.0, c))
    z = (1.0 + np.sqrt(1.0 - c * c)) / 2.0
    return linalg.binary_entropy(z)


def eof_two_qubit(rho: Union[PureState, DensityMatrix]) -> float:
    rho = _as_density(rho)
    _two_qubit(rho, "eof")
    return eof_from_concurrence(concurrence(rho))


# -- ensemble search ---------------------------------------------------------


def _isometry(x: np.ndarray, m: int, r: int) -> np.ndarray:
    a = (x[: m * r] + 1j * x[m * r :]).reshape(m, r)
    q, _ = np.linalg.qr(a)
    return q


def _ensemble_entropies(vectors: np.ndarray, d_a: int, d_b: int, exact: bool = False):
    """Weights and reduced entropies for unnormalized ensemble vectors (rows)."""
    p = np.einsum("ji,ji->j", vectors, vectors.conj()).real
    keep = p > 1e-14
    coeff = vectors[keep].reshape(-1, d_a, d_b) / np.sqrt(p[keep])[:, None, None]
    reduced = np.einsum("jab,jcb->jac", coeff, coeff.conj())
    ent = np.zeros_like(p)
    if exact:
        ent[keep] = [linalg.von_neumann_entropy(r) for r in reduced]
    else:
        w = np.clip(linalg.eigvalsh_fast(reduced), 1e-300, None)
        ent[keep] = np.clip(-np.sum(w * np.log2(w), axis=1), 0.0, None)
    return p, ent


def eof_search(
    rho: DensityMatrix,
    ensemble_size: Optional[int] = None,
    restarts: int = 10,
    seed: int = 0,
    max_iters: int = 3000,
) -> MeasureResult:
    """Minimize average reduced entropy over ensembles of ``ensemble_size`` members.

    Every ensemble of ``m`` pure states realizing ``rho`` has the form
    ``psi_j = sum_i U_ji sqrt(l_i) e_i`` for an ``m x rank`` isometry ``U``
    over the eigenpairs ``(l_i, e_i)``; the search runs over ``U``.
    """
    eig = linalg.eig_hermitian(rho.m)
    keep = eig.eigenvalues > RANK_TOL
    lam = eig.eigenvalues[keep]
    vecs = eig.eigenvectors[:, keep]
    rank = int(keep.sum())
    m = max(rank, rho.dim) if ensemble_size is None else ensemble_size
    if m < rank:
        raise MeasureError(f"ensemble size {m} below rank {rank}")
    base = (vecs * np.sqrt(lam)).T  # rank x D, rows sqrt(l_i) e_i
    d_a, d_b = rho.dims

    def members(x):
        return _isometry(x, m, rank) @ base

    def objective(x):
        p, ent = _ensemble_entropies(members(x), d_a, d_b)
        return float(p @ ent)

    n = 2 * m * rank
    start = np.concatenate([np.eye(m, rank).reshape(-1), np.zeros(m * rank)])
    prob = OptProblem(n, objective, bounds=[(-1.0, 1.0)] * n)
    rep = multi_start(
        prob, restarts=restarts, seed=seed, iters=max_iters, tol=1e-9, ftol=1e-12, starts=[start],
        stop_at=1e-12, polish_rounds=restarts,
    )
    vectors = members(rep.point)
    p, ent = _ensemble_entropies(vectors, d_a, d_b, exact=True)
    value = float(p @ ent)
    flags = () if rep.converged else ("eof-search-iteration-cap",)
    return MeasureResult(
        value=value,
        flags=flags,
        evaluations=rep.evaluations,
        restarts=rep.restarts,
        iterations=rep.iterations,
        best_objective=rep.value,
        witness={"weights": p, "vectors": vectors},
    )


# -- relative entropy of entanglement ----------------------------------------


def unit_vectors(angles: np.ndarray, d: int) -> np.ndarray:
    """Rows of ``angles`` -> unit vectors in C^d.

    Each row holds ``d-1`` hyperspherical magnitude angles followed by
    ``d-1`` relative phases (the first amplitude is real and non-negative).
    """
    angles = np.atleast_2d(angles)
    if d == 2:
        t, ph = angles[:, 0], angles[:, 1]
        return np.stack([np.cos(t) + 0j, np.exp(1j * ph) * np.sin(t)], axis=1)
    k = angles.shape[0]
    mags = np.ones((k, d))
    t = angles[:, : d - 1]
    for j in range(d - 1):
        mags[:, j] *= np.cos(t[:, j])
        mags[:, j + 1 :] *= np.sin(t[:, j])[:, None]
    phases = np.concatenate([np.zeros((k, 1)), angles[:, d - 1 :]], axis=1)
    return mags * np.exp(1j * phases)


def vector_angles(v) -> np.ndarray:
    """Inverse of :func:`unit_vectors` for one vector, up to a global phase."""
    v = np.asarray(v, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    nz = np.flatnonzero(np.abs(v) > 1e-15)
    v = v * np.exp(-1j * np.angle(v[nz[0]])) if nz.size else v
    d = v.size
    mags = np.abs(v)
    t = np.array([np.arctan2(np.linalg.norm(mags[j + 1 :]), mags[j]) for j in range(d - 1)])
    ph = np.where(mags[1:] > 1e-15, np.angle(v[1:]), 0.0)
    return np.concatenate([t, np.mod(ph, 2 * np.pi)])


class _ProductMixture:
    """Parameterization ``sigma = sum_k w_k |a_k><a_k| (x) |b_k><b_k|``."""

    def __init__(self, d_a: int, d_b: int, k: int):
        self.d_a, self.d_b, self.k = d_a, d_b, k
        self.na, self.nb = 2 * (d_a - 1), 2 * (d_b - 1)
        self.size = k * (self.na + self.nb + 1)

    def bounds(self):
        def per(d):
            return [(0.0, np.pi / 2)] * (d - 1) + [(0.0, 2 * np.pi)] * (d - 1)

        return (per(self.d_a) + per(self.d_b)) * self.k + [(0.0, 1.0)] * self.k

    def split(self, x):
        k = self.k
        ang = x[: k * (self.na + self.nb)].reshape(k, self.na + self.nb)
        a = unit_vectors(ang[:, : self.na], self.d_a)
        b = unit_vectors(ang[:, self.na :], self.d_b)
        w = x[-k:] ** 2
        return a, b, w

    def sigma(self, x) -> np.ndarray:
        a, b, w = self.split(x)
        total = w.sum()
        if total <= 0:
            w = np.full(self.k, 1.0 / self.k)
            total = 1.0
        v = (a[:, :, None] * b[:, None, :]).reshape(self.k, -1)
        return (v.T * (w / total)) @ v.conj()

    def pack(self, terms) -> np.ndarray:
        """``terms``: list of ``(weight, a_vec, b_vec)``; missing terms get zero weight."""
        terms = sorted(terms, key=lambda t: -t[0])[: self.k]
        ang = np.zeros((self.k, self.na + self.nb))
        ang[:, : self.na] = np.pi / 4  # spread unused terms over the sphere
        ang[:, self.na :] = np.pi / 4
        w = np.zeros(self.k)
        for i, (wt, a, b) in enumerate(terms):
            ang[i] = np.concatenate([vector_angles(a), vector_angles(b)])
            w[i] = np.sqrt(max(wt, 0.0))
        return np.concatenate([ang.reshape(-1), w])


def _structured_terms(rho: DensityMatrix):
    """Separable candidates: dephased state, product of marginals, Schmidt-basis mixture."""
    d_a, d_b = rho.dims
    eye_a, eye_b = np.eye(d_a), np.eye(d_b)
    diag = np.diag(rho.m).real
    dephased = [(diag[i * d_b + j], eye_a[i], eye_b[j]) for i in range(d_a) for j in range(d_b)]

    ea = linalg.eig_hermitian(linalg.partial_trace(rho.m, d_a, d_b, keep=1))
    eb = linalg.eig_hermitian(linalg.partial_trace(rho.m, d_a, d_b, keep=2))
    marginal = [
        (ea.eigenvalues[i] * eb.eigenvalues[j], ea.eigenvectors[:, i], eb.eigenvectors[:, j])
        for i in range(d_a)
        for j in range(d_b)
    ]

    top = linalg.eig_hermitian(rho.m).eigenvectors[:, -1].reshape(d_a, d_b)
    u, s, vh = np.linalg.svd(top)
    schmidt = [(s[i] ** 2, u[:, i], vh[i].conj()) for i in range(len(s))]
    return [dephased, marginal, schmidt]


def ree(rho: Union[PureState, DensityMatrix], cfg: Optional[ReeConfig] = None) -> MeasureResult:
    """Relative entropy of entanglement over K-term product mixtures.

    First stage: evaluate three structured separable candidates and
    ``cfg.restarts`` seeded random points. Second stage: Nelder-Mead from each.
    The reported value is ``relative_entropy(rho, sigma)`` for the returned
    ``sigma`` (``witness["sigma"]``). Flag ``ree-no-improvement`` is set when
    refinement never beats the first stage by more than ``cfg.tol``.
    """
    cfg = cfg or ReeConfig()
    rho = _as_density(rho)
    d_a, d_b = rho.dims
    param = _ProductMixture(d_a, d_b, cfg.num_product_terms)
    target = rho.m
    w_rho = np.clip(linalg.eig_hermitian(target).eigenvalues, 0.0, None)
    nz = w_rho[w_rho > 0]
    neg_entropy = float(np.sum(nz * np.log2(nz)))

    def objective(x):
        lam, vecs = np.linalg.eigh(param.sigma(x))
        weights = np.einsum("ik,ij,jk->k", vecs.conj(), target, vecs).real
        return neg_entropy - float(weights @ np.log2(np.clip(lam, 1e-30, None)))

    prob = OptProblem(param.size, objective, bounds=param.bounds())
    starts = [param.pack(t) for t in _structured_terms(rho)]
    lo = np.array([b[0] for b in prob.bounds])
    hi = np.array([b[1] for b in prob.bounds])
    first_stage = min(
        [objective(s) for s in starts]
        + [objective(lo + (hi - lo) * rng_for(cfg.seed, k).random(param.size)) for k in range(cfg.restarts)]
    )
    rep = multi_start(
        prob,
        restarts=cfg.restarts,
        seed=cfg.seed,
        iters=cfg.max_iters,
        tol=1e-10,
        ftol=cfg.tol,
        starts=starts,
        stop_at=1e-12,
        polish_rounds=POLISH_ROUNDS,
    )
    sigma = param.sigma(rep.point)
    sigma = 0.5 * (sigma + sigma.conj().T)
    flags = []
    value = linalg.relative_entropy(target, sigma)
    if not np.isfinite(value):
        flags.append("ree-support-violation")
        value = rep.value
    if first_stage > 1e-12 and rep.value > first_stage - cfg.tol:
        flags.append("ree-no-improvement")
    return MeasureResult(
        value=float(value),
        flags=tuple(flags),
        evaluations=rep.evaluations,
        restarts=rep.restarts,
        iterations=rep.iterations,
        best_objective=rep.value,
        witness={"sigma": sigma, "first_stage": first_stage},
    )

