"""Bipartite states: containers, validation, and the standard families.

Index convention: the basis vector ``|j_a j_b>`` sits at ``j_a * d_b + j_b``,
so two-qubit matrices are written in the order ``|00>, |01>, |10>, |11>``.
Matrices printed in the opposite order ``|11>, |10>, |01>, |00>`` are
converted with :func:`from_reversed_order`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg

POSITIVITY_TOL = 1e-8
TRACE_TOL = 1e-9
NORM_TOL = 1e-10


class StateError(ValueError):
    pass


class HermiticityError(StateError):
    pass


class PositivityError(StateError):
    pass


class TraceError(StateError):
    pass


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    d_a: int = 2
    d_b: int = 2

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amp.size != self.d_a * self.d_b:
            raise StateError(f"{amp.size} amplitudes for a {self.d_a}x{self.d_b} split")
        norm = float(np.vdot(amp, amp).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state norm^2 is {norm:.12g}, expected 1")
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def normalized(cls, amplitudes, d_a: int = 2, d_b: int = 2) -> "PureState":
        amp = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        return cls(amp / np.linalg.norm(amp), d_a, d_b)

    def density(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()), self.d_a, self.d_b)

    def coefficient_matrix(self) -> np.ndarray:
        return self.amplitudes.reshape(self.d_a, self.d_b)


@dataclass(frozen=True)
class DensityMatrix:
    """A validated bipartite density matrix. Build through :func:`validate`."""

    m: np.ndarray
    d_a: int = 2
    d_b: int = 2

    @property
    def dim(self) -> int:
        return self.d_a * self.d_b

    @property
    def dims(self) -> tuple[int, int]:
        return self.d_a, self.d_b

    def is_two_qubit(self) -> bool:
        return self.d_a == 2 and self.d_b == 2


@dataclass(frozen=True)
class Ensemble:
    members: tuple[tuple[float, PureState], ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise StateError("empty ensemble")
        weights = np.array([w for w, _ in members], dtype=float)
        if np.any(weights <= 0):
            raise StateError("ensemble weights must be positive")
        if abs(weights.sum() - 1.0) > NORM_TOL:
            raise StateError(f"ensemble weights sum to {weights.sum():.12g}")
        dims = {(s.d_a, s.d_b) for _, s in members}
        if len(dims) != 1:
            raise StateError(f"ensemble mixes dimension splits {sorted(dims)}")
        object.__setattr__(self, "members", members)


def validate(m, d_a: int = 2, d_b: int = 2) -> DensityMatrix:
    """Check Hermiticity, positivity, and unit trace; return a :class:`DensityMatrix`."""
    try:
        m = linalg.as_cmatrix(m)
    except linalg.LinalgError as exc:
        raise StateError(str(exc)) from exc
    if m.shape[0] != d_a * d_b:
        raise StateError(f"matrix size {m.shape[0]} does not match split {d_a}x{d_b}")
    scale = max(1.0, linalg.frobenius(m))
    herr = linalg.hermiticity_error(m)
    if herr > linalg.HERMITIAN_TOL * scale:
        raise HermiticityError(f"not Hermitian (||m - m^H||_F = {herr:.3e})")
    m = 0.5 * (m + m.conj().T)
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise TraceError(f"trace is {tr:.12g}, expected 1")
    lo = linalg.eig_hermitian(m).eigenvalues[0]
    if lo < -POSITIVITY_TOL:
        raise PositivityError(f"not positive semidefinite (min eigenvalue {lo:.3e})")
    return DensityMatrix(m, d_a, d_b)


def from_reversed_order(m) -> np.ndarray:
    """Reorder a matrix written in basis ``|11>, |10>, |01>, |00>`` into standard order."""
    m = np.asarray(m, dtype=np.complex128)
    return m[::-1, ::-1].copy()


def basis_ket(j_a: int, j_b: int, d_a: int = 2, d_b: int = 2) -> np.ndarray:
    v = np.zeros(d_a * d_b, dtype=np.complex128)
    v[j_a * d_b + j_b] = 1.0
    return v


BELL_KINDS = ("psi_plus", "psi_minus", "phi_plus", "phi_minus")


def bell(kind: str) -> PureState:
    """Bell states with amplitude sqrt(2)/2.

    ``psi_pm`` combine ``|11>`` and ``|00>``; ``phi_pm`` combine ``|10>`` and
    ``|01>``. The sign multiplies the second ket.
    """
    h = np.sqrt(2) / 2
    if kind not in BELL_KINDS:
        raise StateError(f"unknown Bell state {kind!r}; choose from {BELL_KINDS}")
    sign = 1.0 if kind.endswith("plus") else -1.0
    if kind.startswith("psi"):
        v = h * basis_ket(1, 1) + sign * h * basis_ket(0, 0)
    else:
        v = h * basis_ket(1, 0) + sign * h * basis_ket(0, 1)
    return PureState(v)


def _sign_value(sign) -> float:
    if sign in ("+", 1, 1.0, "plus"):
        return 1.0
    if sign in ("-", -1, -1.0, "minus"):
        return -1.0
    raise StateError(f"sign must be '+' or '-', got {sign!r}")


def bell_like(alpha: float, family: str = "Psi", sign="+") -> PureState:
    """``cos(a)|11> +- sin(a)|00>`` (Psi) or ``cos(a)|10> +- sin(a)|01>`` (Phi), 0 <= a <= pi/2."""
    if not 0.0 <= alpha <= np.pi / 2 + 1e-12:
        raise StateError(f"alpha={alpha} outside [0, pi/2]")
    s = _sign_value(sign)
    fam = family.lower()
    if fam == "psi":
        first, second = basis_ket(1, 1), basis_ket(0, 0)
    elif fam == "phi":
        first, second = basis_ket(1, 0), basis_ket(0, 1)
    else:
        raise StateError(f"family must be Psi or Phi, got {family!r}")
    return PureState(np.cos(alpha) * first + s * np.sin(alpha) * second)


def mixed_family(alpha: float, sign="+") -> DensityMatrix:
    """``sin^2(a)/2 |10 +- 01><10 +- 01| + cos^2(a) |00><00|`` for 0 <= a <= pi."""
    if not 0.0 <= alpha <= np.pi + 1e-12:
        raise StateError(f"alpha={alpha} outside [0, pi]")
    s = _sign_value(sign)
    v = basis_ket(1, 0) + s * basis_ket(0, 1)
    z = basis_ket(0, 0)
    m = np.sin(alpha) ** 2 / 2 * np.outer(v, v.conj()) + np.cos(alpha) ** 2 * np.outer(z, z)
    return validate(m, 2, 2)


def from_ensemble(e: Ensemble) -> DensityMatrix:
    d_a, d_b = e.members[0][1].d_a, e.members[0][1].d_b
    m = sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in e.members)
    return validate(m, d_a, d_b)


def product_state(a: Sequence[complex], b: Sequence[complex]) -> PureState:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    return PureState.normalized(np.kron(a, b), a.size, b.size)


def maximally_mixed(d_a: int = 2, d_b: int = 2) -> DensityMatrix:
    n = d_a * d_b
    return validate(np.eye(n) / n, d_a, d_b)


def random_pure(rng: np.random.Generator, d_a: int = 2, d_b: int = 2) -> PureState:
    z = rng.normal(size=d_a * d_b) + 1j * rng.normal(size=d_a * d_b)
    return PureState.normalized(z, d_a, d_b)


def random_mixed(rng: np.random.Generator, d_a: int = 2, d_b: int = 2, rank: int | None = None) -> DensityMatrix:
    """Induced-measure random state of the given rank (full rank by default)."""
    n = d_a * d_b
    k = n if rank is None else rank
    g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    m = g @ g.conj().T
    return validate(m / np.trace(m).real, d_a, d_b)
