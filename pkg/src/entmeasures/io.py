"""State files and sweep CSVs.

State file::

    # comment lines start with '#'
    dims 2 2
    0.5,0 0,0 0,0 0.5,0
    ...              (d_a*d_b rows of d_a*d_b entries "re,im")

Sweep CSV: header ``alpha,<measure>...,flags``, LF line endings, values
written positionally with 9 significant digits.
"""

from __future__ import annotations

import csv
import io as _io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .states import DensityMatrix, StateError, validate

FILE_TOL = 1e-6
ZERO_FLUSH = 1e-15


class StateFileError(ValueError):
    """Malformed state file (syntax or shape)."""


class StateFileValidationError(ValueError):
    """Well-formed state file whose matrix is not a density matrix."""


def parse_complex(tok: str) -> complex:
    parts = tok.split(",")
    if len(parts) != 2:
        raise StateFileError(f"entry {tok!r} is not of the form re,im")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise StateFileError(f"entry {tok!r} is not numeric") from exc


def parse_state(text: str) -> DensityMatrix:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise StateFileError("empty state file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "dims":
        raise StateFileError("first line must be 'dims <d_a> <d_b>'")
    try:
        d_a, d_b = int(head[1]), int(head[2])
    except ValueError as exc:
        raise StateFileError("dims must be integers") from exc
    if d_a < 1 or d_b < 1:
        raise StateFileError("dims must be positive")
    n = d_a * d_b
    rows = [ln.split() for ln in lines[1:]]
    if len(rows) != n or any(len(r) != n for r in rows):
        shape = f"{len(rows)} rows of {sorted({len(r) for r in rows})} entries"
        raise StateFileError(f"non-square data: expected {n}x{n} entries, got {shape}")
    m = np.array([[parse_complex(t) for t in r] for r in rows])

    herm = float(np.max(np.abs(m - m.conj().T)))
    if herm > FILE_TOL:
        raise StateFileValidationError(f"matrix is not Hermitian (max |m - m^H| = {herm:.3e})")
    tr = np.trace(m).real
    if abs(tr - 1.0) > FILE_TOL:
        raise StateFileValidationError(f"trace is {tr:.9g}, off from 1 by more than {FILE_TOL:g}")
    m = 0.5 * (m + m.conj().T)
    m = m / np.trace(m).real
    try:
        return validate(m, d_a, d_b)
    except StateError as exc:
        raise StateFileValidationError(str(exc)) from exc


def read_state(path: Union[str, Path]) -> DensityMatrix:
    return parse_state(Path(path).read_text())


def format_state(rho: DensityMatrix) -> str:
    out = [f"dims {rho.d_a} {rho.d_b}"]
    for row in rho.m:
        out.append(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
    return "\n".join(out) + "\n"


def write_state(path: Union[str, Path], rho: DensityMatrix) -> None:
    Path(path).write_text(format_state(rho))


# -- sweep CSV -----------------------------------------------------------------


def format_value(x: float) -> str:
    """Positional decimal with 9 significant digits; locale independent.

    Magnitudes below 1e-15 are rounding noise and are written as ``0``.
    """
    if not np.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if abs(x) < ZERO_FLUSH:
        return "0"
    s = np.format_float_positional(float(x), precision=9, unique=False, fractional=False, trim="-")
    return "0" if s in ("-0", "0") else s


@dataclass
class SweepRow:
    alpha: float
    values: dict
    flags: tuple = ()


def sweep_csv(measures: Sequence[str], rows: Iterable[SweepRow]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", *measures, "flags"])
    for r in rows:
        w.writerow([format_value(r.alpha), *(format_value(r.values[m]) for m in measures), ";".join(r.flags)])
    return buf.getvalue()


def parse_sweep_csv(text: str) -> tuple[list[str], list[SweepRow]]:
    reader = csv.reader(_io.StringIO(text))
    header = next(reader)
    if header[0] != "alpha" or header[-1] != "flags":
        raise ValueError("sweep CSV header must be alpha,...,flags")
    measures = header[1:-1]
    rows = []
    for rec in reader:
        if len(rec) != len(header):
            raise ValueError(f"row has {len(rec)} columns, header has {len(header)}")
        vals = {m: float(v) for m, v in zip(measures, rec[1:-1])}
        flags = tuple(f for f in rec[-1].split(";") if f)
        rows.append(SweepRow(float(rec[0]), vals, flags))
    return measures, rows
