"""Reduction-induced variation of partial von Neumann entropy.

``rivpvne(rho) = S(rho_i) - S_max``, where ``rho_i`` is the usual reduced
state of party ``i`` and ``S_max`` is the largest entropy of the one-sided
matrix ``rho(i)`` over local real rotations of both single-site bases.

The one-sided matrix keeps party ``i``'s indices and sums the other party's
bra and ket indices independently::

    rho(1)_{ab} = sum_{c,d} rho_{ac,bd}  =  (I (x) <u|) rho (I (x) |u>)

with ``|u>`` the all-ones vector. For a Bell state this gives
``[[1/2, 1/2], [1/2, 1/2]]`` where the reduced state is ``I/2``.

In ``constrained`` mode (two qubits only) the maximum runs over bases in
which ``rho`` is an X-state: zero everywhere except the diagonal and the
anti-diagonal. ``relaxed`` mode drops that restriction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import linalg
from .optimize import OptProblem, grid_scan, lattice, multi_start, nelder_mead
from .states import DensityMatrix, PureState

Angle = Union[float, Sequence[float]]

# Standard-order positions (|00>, |01>, |10>, |11>) that must vanish in an X-state.
XFORM_FORBIDDEN = ((3, 2), (3, 1), (0, 2), (0, 1))
TIE_TOL = 1e-12
POLISH_CANDIDATES = 8


@dataclass(frozen=True)
class RotationAngles:
    theta_a: Angle = 0.0
    theta_b: Angle = 0.0


@dataclass
class RivConfig:
    mode: str = "constrained"
    xform_tolerance: float = 1e-9
    grid_step: float = np.pi / 180
    refine_iters: int = 500
    party: int = 1
    restarts: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("constrained", "relaxed"):
            raise ValueError(f"mode must be constrained or relaxed, got {self.mode!r}")
        if self.xform_tolerance <= 0:
            raise ValueError("xform_tolerance must be positive")
        if not 0 < self.grid_step <= np.pi:
            raise ValueError("grid_step must lie in (0, pi]")
        if self.party not in (1, 2):
            raise ValueError("party must be 1 or 2")

    @property
    def grid_points(self) -> int:
        return max(1, int(round(np.pi / self.grid_step)))


@dataclass
class SMax:
    value: float
    angles: RotationAngles
    violation: float
    fallback: bool
    degenerate: bool
    mode: str
    shared_angle_value: Optional[float] = None
    evaluations: int = 0


@dataclass
class RivResult:
    value: float
    s_reduced: float
    s_max: float
    best_angles: RotationAngles
    xform_violation_at_best: float
    degenerate_trace: bool
    fallback_used: bool
    mode: str = "constrained"
    s_max_shared_angle: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def clamped(self) -> float:
        return max(0.0, self.value)

    @property
    def flags(self) -> tuple[str, ...]:
        out = []
        if self.fallback_used:
            out.append("riv-fallback")
        if self.degenerate_trace:
            out.append("riv-degenerate")
        if self.value < 0:
            out.append("riv-negative")
        return tuple(out)


def one_sided_matrix(rho: DensityMatrix, party: int = 1) -> np.ndarray:
    """Cross-sum over both indices of the other party (see module docstring)."""
    t = rho.m.reshape(rho.d_a, rho.d_b, rho.d_a, rho.d_b)
    if party == 1:
        return np.einsum("acbd->ab", t)
    if party == 2:
        return np.einsum("acbd->cd", t)
    raise ValueError(f"party must be 1 or 2, got {party}")


def xform_violation(rho: Union[DensityMatrix, np.ndarray]) -> float:
    """Sum of ``|rho_jk|^2`` over the eight entries an X-state must not have."""
    m = rho.m if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if isinstance(rho, DensityMatrix) and not rho.is_two_qubit():
        raise ValueError("X-form is defined for two qubits only")
    if m.shape[-2:] != (4, 4):
        raise ValueError(f"X-form needs a 4x4 matrix, got {m.shape}")
    rows = [i for i, j in XFORM_FORBIDDEN] + [j for i, j in XFORM_FORBIDDEN]
    cols = [j for i, j in XFORM_FORBIDDEN] + [i for i, j in XFORM_FORBIDDEN]
    return np.sum(np.abs(m[..., rows, cols]) ** 2, axis=-1)


def n_angles(d: int) -> int:
    return d * (d - 1) // 2


def local_rotation(theta: Angle, d: int = 2) -> np.ndarray:
    """Real orthogonal change of basis; column ``k`` is the new ``|k'>`` in the old basis.

    For ``d = 2``: ``|0'> = cos t|0> + sin t|1>`` and ``|1'> = cos t|1> - sin t|0>``.
    For ``d > 2`` the ``d(d-1)/2`` angles drive Givens rotations in the planes
    ``(0,1), (0,2), ..., (d-2,d-1)``, multiplied left to right in that order.
    """
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    if th.size != n_angles(d):
        raise ValueError(f"d={d} needs {n_angles(d)} angles, got {th.size}")
    r = np.eye(d)
    for t, (p, q) in zip(th, ((p, q) for p in range(d) for q in range(p + 1, d))):
        g = np.eye(d)
        c, s = np.cos(t), np.sin(t)
        g[p, p] = g[q, q] = c
        g[p, q], g[q, p] = -s, s
        r = r @ g
    return r


def rotation_operator(angles: RotationAngles, d_a: int, d_b: int) -> np.ndarray:
    return np.kron(local_rotation(angles.theta_a, d_a), local_rotation(angles.theta_b, d_b))


def rotate_state(rho: DensityMatrix, angles: RotationAngles) -> DensityMatrix:
    """``rho`` re-expressed in the rotated product basis: ``U^T rho U`` with ``U = R_a (x) R_b``."""
    u = rotation_operator(angles, rho.d_a, rho.d_b)
    m = u.T @ rho.m @ u
    return DensityMatrix(0.5 * (m + m.conj().T), rho.d_a, rho.d_b)


def one_sided_entropy(rho: DensityMatrix, party: int = 1) -> tuple[float, bool]:
    """Entropy of the trace-normalized one-sided matrix and a degenerate-trace flag."""
    m = one_sided_matrix(rho, party)
    if np.trace(m).real <= linalg.DEGENERATE_TRACE:
        return 0.0, True
    return linalg.von_neumann_entropy(m), False


# -- batched two-qubit evaluation ----------------------------------------------


def _rot2_batch(theta: np.ndarray) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def _rotated_batch(rho: np.ndarray, points: np.ndarray) -> np.ndarray:
    ra = _rot2_batch(points[:, 0])
    rb = _rot2_batch(points[:, 1])
    u = np.einsum("nij,nkl->nikjl", ra, rb).reshape(-1, 4, 4)
    return np.einsum("nji,jk,nkl->nil", u, rho, u)


def _entropy_batch(mats: np.ndarray, party: int) -> np.ndarray:
    t = mats.reshape(-1, 2, 2, 2, 2)
    one = np.einsum("nacbd->nab", t) if party == 1 else np.einsum("nacbd->ncd", t)
    tr = np.einsum("nii->n", one).real
    ok = tr > linalg.DEGENERATE_TRACE
    out = np.zeros(len(tr))
    w = linalg.eigvalsh_fast(one[ok] / tr[ok, None, None])
    w = np.clip(w, 1e-300, None)
    out[ok] = np.clip(-np.sum(w * np.log2(w), axis=1), 0.0, None)
    return out


def _pick(points: np.ndarray, values: np.ndarray) -> int:
    """Index of the max value; near-ties go to the lexicographically smallest point."""
    top = values.max()
    cand = np.flatnonzero(values >= top - TIE_TOL)
    order = np.lexsort(points[cand].T[::-1])
    return int(cand[order[0]])


def _wrap(points: np.ndarray) -> np.ndarray:
    return np.mod(points, np.pi)


def _local_minima(grid_vals: np.ndarray) -> np.ndarray:
    """Flat indices of grid points not larger than any of their 8 periodic neighbours."""
    v = grid_vals
    is_min = np.ones_like(v, dtype=bool)
    for da in (-1, 0, 1):
        for db in (-1, 0, 1):
            if da or db:
                is_min &= v <= np.roll(np.roll(v, da, 0), db, 1)
    return np.flatnonzero(is_min.reshape(-1))


def _s_max_two_qubit(rho: DensityMatrix, cfg: RivConfig) -> SMax:
    m = rho.m
    n = cfg.grid_points
    bounds = [(0.0, np.pi), (0.0, np.pi)]
    axes = lattice(bounds, n)
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, 2)
    rotated = _rotated_batch(m, mesh)
    ent = _entropy_batch(rotated, cfg.party)
    viol = xform_violation(rotated)
    evals = len(mesh)

    def entropy_at(x):
        return float(_entropy_batch(_rotated_batch(m, np.atleast_2d(x)), cfg.party)[0])

    def violation_at(x):
        return float(xform_violation(_rotated_batch(m, np.atleast_2d(x)))[0])

    mode = cfg.mode
    fallback = False
    if mode == "constrained":
        eps = cfg.xform_tolerance
        vprob = OptProblem(2, violation_at)

        def polish(x):
            nonlocal evals
            rep = nelder_mead(vprob, x, iters=cfg.refine_iters, tol=1e-13, step=cfg.grid_step / 2)
            evals += rep.evaluations
            return _wrap(rep.point), rep.value

        feas = viol <= eps
        pts, vals = [mesh[feas]], [ent[feas]]
        # Exact X-form bases usually sit between lattice points: polish the
        # lowest local minima of the violation onto them.
        minima = _local_minima(viol.reshape(n, n))
        minima = minima[viol[minima] > eps]
        minima = minima[np.argsort(viol[minima], kind="stable")][:POLISH_CANDIDATES]
        for k in minima:
            p, v = polish(mesh[k])
            if v <= eps:
                pts.append(p[None, :])
                vals.append(np.array([entropy_at(p)]))
        pts = np.concatenate(pts)
        vals = np.concatenate(vals)
        if len(pts) == 0:
            mode = "relaxed"
            fallback = True

    if mode == "constrained":
        best = pts[_pick(pts, vals)]
        # Refinement moves toward zero violation only; climbing the entropy
        # inside the tolerance band would reward the tolerance, not the basis.
        if violation_at(best) > 0:
            p, v = polish(best)
            if v < violation_at(best):
                best = p
        diag = np.isclose(pts[:, 0], pts[:, 1], atol=1e-12)
        shared = float(vals[diag].max()) if diag.any() else None
    else:
        # The lattice was already evaluated above; hand grid_scan the values.
        prob = OptProblem(2, entropy_at, bounds=bounds, maximize=True, batch=lambda x: ent)
        scan = grid_scan(prob, n)
        rep = nelder_mead(prob, scan.point, iters=cfg.refine_iters, tol=1e-10, step=cfg.grid_step / 2)
        evals += rep.evaluations
        best = _wrap(rep.point) if rep.value > scan.value else scan.point
        diag = np.arange(n) * (n + 1)
        shared = float(ent[diag].max())

    angles = RotationAngles(float(best[0]), float(best[1]))
    rotated_best = rotate_state(rho, angles)
    value, degenerate = one_sided_entropy(rotated_best, cfg.party)
    return SMax(
        value=value,
        angles=angles,
        violation=float(xform_violation(rotated_best)),
        fallback=fallback,
        degenerate=degenerate,
        mode=mode,
        shared_angle_value=shared,
        evaluations=evals,
    )


def _s_max_general(rho: DensityMatrix, cfg: RivConfig) -> SMax:
    na, nb = n_angles(rho.d_a), n_angles(rho.d_b)

    def unpack(x) -> RotationAngles:
        return RotationAngles(tuple(x[:na]), tuple(x[na:]))

    def entropy_at(x):
        return one_sided_entropy(rotate_state(rho, unpack(x)), cfg.party)[0]

    prob = OptProblem(na + nb, entropy_at, bounds=[(0.0, np.pi)] * (na + nb), maximize=True)
    rep = multi_start(
        prob, restarts=cfg.restarts, seed=cfg.seed, iters=cfg.refine_iters, tol=1e-10,
        starts=[np.zeros(na + nb)],
    )
    angles = unpack(_wrap(rep.point))
    value, degenerate = one_sided_entropy(rotate_state(rho, angles), cfg.party)
    return SMax(
        value=value,
        angles=angles,
        violation=float("nan"),
        fallback=cfg.mode == "constrained",
        degenerate=degenerate,
        mode="relaxed",
        evaluations=rep.evaluations,
    )


def s_max_effective(rho: DensityMatrix, cfg: Optional[RivConfig] = None) -> SMax:
    """Largest one-sided entropy over local real basis rotations.

    Two qubits: a lattice scan of ``(theta_a, theta_b)`` over ``[0, pi)^2`` at
    ``cfg.grid_step``, then Nelder-Mead refinement of the best point. In
    constrained mode only X-form bases count; when none is found the search
    falls back to relaxed mode and sets ``fallback``. Larger local dimensions
    always run relaxed, using seeded multi-start over the Givens angles.
    """
    cfg = cfg or RivConfig()
    if rho.is_two_qubit():
        return _s_max_two_qubit(rho, cfg)
    return _s_max_general(rho, cfg)


def rivpvne(rho: Union[PureState, DensityMatrix], cfg: Optional[RivConfig] = None) -> RivResult:
    cfg = cfg or RivConfig()
    if isinstance(rho, PureState):
        rho = rho.density()
    reduced = linalg.partial_trace(rho.m, rho.d_a, rho.d_b, keep=cfg.party)
    s_reduced = linalg.von_neumann_entropy(reduced)
    sm = s_max_effective(rho, cfg)
    return RivResult(
        value=s_reduced - sm.value,
        s_reduced=s_reduced,
        s_max=sm.value,
        best_angles=sm.angles,
        xform_violation_at_best=sm.violation,
        degenerate_trace=sm.degenerate,
        fallback_used=sm.fallback,
        mode=sm.mode,
        s_max_shared_angle=sm.shared_angle_value,
        diagnostics={"evaluations": sm.evaluations},
    )
