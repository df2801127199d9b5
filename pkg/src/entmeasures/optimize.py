"""Deterministic derivative-free optimization.

Nelder-Mead simplex search, seeded multi-start on a box, and exhaustive
lattice scans. Everything here is reproducible bit-for-bit given the seed:
restart ``k`` draws its start from ``numpy.random.Generator(PCG64(seed + k))``
(the PCG64 permuted congruential generator, 64-bit output, stable across
platforms and numpy versions).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np


class OptimizationError(RuntimeError):
    pass


@dataclass
class OptProblem:
    """Objective ``f: R^n -> R`` with optional box bounds.

    ``batch`` may supply a vectorized objective taking an ``(N, n)`` array;
    :func:`grid_scan` uses it when present.
    """

    dimension: int
    objective: Callable[[np.ndarray], float]
    bounds: Optional[Sequence[tuple[float, float]]] = None
    maximize: bool = False
    batch: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.bounds is not None and len(self.bounds) != self.dimension:
            raise ValueError("need one (low, high) pair per coordinate")

    @property
    def sign(self) -> float:
        return -1.0 if self.maximize else 1.0

    def better(self, a: float, b: float) -> bool:
        return a > b if self.maximize else a < b


@dataclass
class OptReport:
    point: np.ndarray
    value: float
    evaluations: int
    restarts: int = 0
    converged: bool = False
    iterations: int = 0
    history: list[float] = field(default_factory=list)


def rng_for(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) + int(index)))


def _default_steps(p: OptProblem, x0: np.ndarray) -> np.ndarray:
    if p.bounds is not None:
        return np.array([0.05 * (hi - lo) if hi > lo else 0.05 for lo, hi in p.bounds])
    return np.where(x0 != 0, 0.05 * np.abs(x0), 0.1)


def nelder_mead(
    p: OptProblem,
    start,
    iters: int = 1000,
    tol: float = 1e-8,
    ftol: Optional[float] = None,
    step=None,
) -> OptReport:
    """Nelder-Mead simplex with reflection 1, expansion 2, contraction 1/2, shrink 1/2.

    Stops when the largest vertex distance from the best vertex is ``<= tol``,
    when the spread of objective values is ``<= ftol`` (if given), or after
    ``iters`` iterations.
    """
    x0 = np.array(start, dtype=float).reshape(-1)
    n = p.dimension
    if x0.size != n:
        raise ValueError(f"start has {x0.size} coordinates, problem has {n}")
    sgn = p.sign
    evals = 0

    def f(x):
        nonlocal evals
        evals += 1
        v = float(p.objective(x))
        if not np.isfinite(v):
            raise OptimizationError(f"objective returned {v} at {x}")
        return sgn * v

    steps = np.broadcast_to(
        _default_steps(p, x0) if step is None else np.asarray(step, dtype=float), (n,)
    )
    simplex = np.vstack([x0] + [x0 + steps[i] * np.eye(n)[i] for i in range(n)])
    fs = np.array([f(x) for x in simplex])

    converged = False
    it = 0
    for it in range(1, iters + 1):
        order = np.argsort(fs, kind="stable")
        simplex, fs = simplex[order], fs[order]
        diam = np.max(np.linalg.norm(simplex[1:] - simplex[0], axis=1))
        if diam <= tol or (ftol is not None and fs[-1] - fs[0] <= ftol):
            converged = True
            it -= 1
            break
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = f(xr)
        if fr < fs[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = f(xe)
            if fe < fr:
                simplex[-1], fs[-1] = xe, fe
            else:
                simplex[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            simplex[-1], fs[-1] = xr, fr
        else:
            if fr < fs[-1]:
                xc = centroid + 0.5 * (xr - centroid)
                fc = f(xc)
                accept = fc <= fr
            else:
                xc = centroid + 0.5 * (worst - centroid)
                fc = f(xc)
                accept = fc < fs[-1]
            if accept:
                simplex[-1], fs[-1] = xc, fc
            else:
                simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
                fs[1:] = [f(x) for x in simplex[1:]]

    best = int(np.argmin(fs))
    return OptReport(
        point=simplex[best].copy(),
        value=sgn * float(fs[best]),
        evaluations=evals,
        converged=converged,
        iterations=it,
    )


def multi_start(
    p: OptProblem,
    restarts: int = 20,
    seed: int = 0,
    iters: int = 1000,
    tol: float = 1e-8,
    ftol: Optional[float] = None,
    starts: Sequence[Sequence[float]] = (),
    stop_at: Optional[float] = None,
    polish_rounds: int = 0,
) -> OptReport:
    """Run :func:`nelder_mead` from explicit ``starts`` then ``restarts`` seeded points.

    Random start ``k`` is uniform in the box, drawn from ``rng_for(seed, k)``.
    The extremal run wins; ties go to the earliest start. ``stop_at`` ends the
    search once a run reaches that value (a known bound on the optimum).

    ``polish_rounds`` re-runs the simplex from the winner with a fresh initial
    simplex until a round gains less than ``ftol`` (or ``tol`` when ``ftol``
    is None). Simplex search stalls in high dimension; re-seeding fixes most
    of that.
    """
    if p.bounds is None:
        raise ValueError("multi_start needs bounds")
    lo = np.array([b[0] for b in p.bounds], dtype=float)
    hi = np.array([b[1] for b in p.bounds], dtype=float)
    points = [np.asarray(s, dtype=float) for s in starts]
    points += [lo + (hi - lo) * rng_for(seed, k).random(p.dimension) for k in range(restarts)]

    best: Optional[OptReport] = None
    evals = 0
    history = []
    used = 0
    for x in points:
        rep = nelder_mead(p, x, iters=iters, tol=tol, ftol=ftol)
        used += 1
        evals += rep.evaluations
        history.append(rep.value)
        if best is None or p.better(rep.value, best.value):
            best = rep
        if stop_at is not None and not p.better(stop_at, best.value):
            break
    assert best is not None
    gain_tol = tol if ftol is None else ftol
    for _ in range(polish_rounds):
        if stop_at is not None and not p.better(stop_at, best.value):
            break
        rep = nelder_mead(p, best.point, iters=iters, tol=tol, ftol=ftol)
        evals += rep.evaluations
        history.append(rep.value)
        gained = p.sign * (best.value - rep.value)
        if p.better(rep.value, best.value):
            best = rep
        if gained <= gain_tol:
            break
    return OptReport(
        point=best.point,
        value=best.value,
        evaluations=evals,
        restarts=used,
        converged=best.converged,
        iterations=best.iterations,
        history=history,
    )


def lattice(bounds: Sequence[tuple[float, float]], steps) -> list[np.ndarray]:
    steps = np.broadcast_to(np.asarray(steps, dtype=int), (len(bounds),))
    return [lo + (hi - lo) * np.arange(k) / k for (lo, hi), k in zip(bounds, steps)]


def grid_scan(p: OptProblem, steps) -> OptReport:
    """Evaluate every point of the half-open lattice ``low + i * (high - low) / steps``.

    The argmax (argmin) is the first extremal point in row-major order.
    """
    if p.bounds is None:
        raise ValueError("grid_scan needs bounds")
    axes = lattice(p.bounds, steps)
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, p.dimension)
    if p.batch is not None:
        vals = np.asarray(p.batch(mesh), dtype=float)
    else:
        vals = np.array([float(p.objective(x)) for x in mesh])
    k = int(np.argmax(vals) if p.maximize else np.argmin(vals))
    return OptReport(point=mesh[k].copy(), value=float(vals[k]), evaluations=len(mesh), converged=True)
