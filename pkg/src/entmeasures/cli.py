"""Command-line interface: ``measure``, ``sweep`` and ``verify``.

Exit codes: 0 ok, 1 verify failure, 2 parse error, 3 validation error,
4 measure/dimension mismatch, 5 unwritable output.

Configuration precedence is flags > ``--config`` file > environment > defaults.
The config file is flat ``key=value`` lines (``#`` comments allowed) using
the keys in :data:`CONFIG_KEYS`. ``ENTMEASURES_SEED`` sets the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import measures as M
from .io import StateFileError, StateFileValidationError, format_value, read_state, sweep_csv
from .rivpvne import RivConfig
from .runner import MEASURES, SWEEP_FAMILIES, Settings, default_range, evaluate, named_state, sweep
from .states import StateError
from .verify import as_json_dict, run_checks

SEED_ENV = "ENTMEASURES_SEED"

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_VALIDATION, EXIT_MISMATCH, EXIT_OUTPUT = 0, 1, 2, 3, 4, 5

# key -> (type, default)
CONFIG_KEYS = {
    "seed": (int, 0),
    "party": (int, 1),
    "riv_mode": (str, "constrained"),
    "xform_tolerance": (float, 1e-9),
    "grid_step": (float, np.pi / 180),
    "refine_iters": (int, 500),
    "ree_terms": (int, 16),
    "ree_restarts": (int, 20),
    "ree_max_iters": (int, 2000),
    "ree_tol": (float, 1e-9),
    "eof_ensemble_size": (int, None),
    "eof_restarts": (int, 10),
    "jobs": (int, 1),
}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def read_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read config {path}: {exc.strerror}")
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or key not in CONFIG_KEYS:
            raise CliError(EXIT_PARSE, f"{path}:{n}: expected one of {sorted(CONFIG_KEYS)} as key=value")
        try:
            out[key] = CONFIG_KEYS[key][0](val)
        except ValueError:
            raise CliError(EXIT_PARSE, f"{path}:{n}: bad value for {key}: {val!r}")
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, environment, config file and flags."""
    conf = {k: d for k, (_, d) in CONFIG_KEYS.items()}
    env_seed = os.environ.get(SEED_ENV)
    if env_seed:
        try:
            conf["seed"] = int(env_seed)
        except ValueError:
            raise CliError(EXIT_PARSE, f"{SEED_ENV} must be an integer, got {env_seed!r}")
    conf.update(read_config(getattr(args, "config", None)))
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            conf[key] = val
    return conf


def settings_from(conf: dict) -> Settings:
    try:
        riv = RivConfig(
            mode=conf["riv_mode"],
            xform_tolerance=conf["xform_tolerance"],
            grid_step=conf["grid_step"],
            refine_iters=conf["refine_iters"],
            party=conf["party"],
            seed=conf["seed"],
        )
        ree = M.ReeConfig(
            num_product_terms=conf["ree_terms"],
            restarts=conf["ree_restarts"],
            max_iters=conf["ree_max_iters"],
            seed=conf["seed"],
            tol=conf["ree_tol"],
        )
    except ValueError as exc:
        raise CliError(EXIT_PARSE, str(exc))
    return Settings(
        seed=conf["seed"],
        party=conf["party"],
        riv=riv,
        ree=ree,
        eof_ensemble_size=conf["eof_ensemble_size"],
        eof_restarts=conf["eof_restarts"],
    )


def parse_measures(text: str) -> list[str]:
    names = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in names if m not in MEASURES]
    if bad or not names:
        raise CliError(EXIT_PARSE, f"unknown measure(s) {bad}; choose from {','.join(MEASURES)}")
    return names


def _alpha(args) -> Optional[float]:
    if args.alpha is not None and args.alpha_degrees is not None:
        raise CliError(EXIT_PARSE, "give --alpha or --alpha-degrees, not both")
    if args.alpha_degrees is not None:
        return float(np.deg2rad(args.alpha_degrees))
    return args.alpha


def cmd_measure(args, out=sys.stdout) -> int:
    conf = resolve(args)
    s = settings_from(conf)
    names = parse_measures(args.measures)
    if (args.state is None) == (args.family is None):
        raise CliError(EXIT_PARSE, "give exactly one of --state or --family")
    if args.state is not None:
        try:
            state = read_state(args.state)
        except OSError as exc:
            raise CliError(EXIT_PARSE, f"cannot read {args.state}: {exc.strerror}")
        except StateFileError as exc:
            raise CliError(EXIT_PARSE, f"{args.state}: {exc}")
        except StateFileValidationError as exc:
            raise CliError(EXIT_VALIDATION, f"{args.state}: {exc}")
    else:
        try:
            state = named_state(args.family, _alpha(args))
        except StateError as exc:
            raise CliError(EXIT_VALIDATION, str(exc))
        except ValueError as exc:
            raise CliError(EXIT_PARSE, str(exc))

    rows = []
    for name in names:
        try:
            ev = evaluate(state, name, s)
        except M.MeasureError as exc:
            raise CliError(EXIT_MISMATCH, f"{name}: {exc}")
        diag = " ".join(f"{k}={v}" for k, v in ev.details.items())
        if ev.flags:
            diag = (diag + " flags=" + ";".join(ev.flags)).strip()
        rows.append((name, format_value(ev.value), diag))
    width = max(len("measure"), *(len(r[0]) for r in rows))
    vwidth = max(len("value"), *(len(r[1]) for r in rows))
    print(f"{'measure':<{width}}  {'value':<{vwidth}}  diagnostics", file=out)
    for name, val, diag in rows:
        print(f"{name:<{width}}  {val:<{vwidth}}  {diag}".rstrip(), file=out)
    return EXIT_OK


def cmd_sweep(args, out=sys.stdout) -> int:
    conf = resolve(args)
    s = settings_from(conf)
    if args.family not in SWEEP_FAMILIES:
        raise CliError(EXIT_PARSE, f"family must be one of {SWEEP_FAMILIES}")
    if args.measures:
        names = parse_measures(args.measures)
    else:
        names = ["pvne", "rivpvne", "eof", "concurrence"] if args.family != "mixed" else ["rivpvne", "eof", "concurrence"]
    if args.family == "mixed" and "pvne" in names:
        raise CliError(EXIT_MISMATCH, "pvne: the mixed family is not pure")
    if args.steps < 2:
        raise CliError(EXIT_PARSE, "--steps must be >= 2")
    lo, hi = default_range(args.family)
    lo = lo if args.alpha_start is None else args.alpha_start
    hi = hi if args.alpha_stop is None else args.alpha_stop
    if not lo < hi:
        raise CliError(EXIT_PARSE, "--alpha-start must be below --alpha-stop")
    alphas = np.linspace(lo, hi, args.steps)

    try:
        handle = open(args.out, "w", newline="", encoding="ascii") if args.out != "-" else None
    except OSError as exc:
        raise CliError(EXIT_OUTPUT, f"cannot write {args.out}: {exc.strerror}")
    try:
        try:
            rows = sweep(args.family, args.sign, alphas, names, s, jobs=conf["jobs"])
        except StateError as exc:
            raise CliError(EXIT_VALIDATION, str(exc))
        text = sweep_csv(names, rows)
        if handle is None:
            out.write(text)
        else:
            handle.write(text)
    finally:
        if handle is not None:
            handle.close()
    return EXIT_OK


def cmd_verify(args, out=sys.stdout) -> int:
    conf = resolve(args)
    s = settings_from(conf)

    def progress(r):
        if not args.json:
            print(f"{r.status:<4}  {r.name:<18} max_dev={r.max_deviation:.3e} tol={r.tolerance:g}  {r.detail}", file=out)
            for note in r.notes:
                print(f"      {note}", file=out)
            out.flush()

    results = run_checks(s.riv, s.ree, progress=progress)
    report = as_json_dict(results)
    if args.json:
        json.dump(report, out, indent=2)
        out.write("\n")
    else:
        print("ALL PASS" if report["passed"] else "SOME CHECKS FAILED", file=out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_PARSE, message)


def _add_config_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("configuration (flags override --config)")
    g.add_argument("--config", help="flat key=value config file")
    g.add_argument("--seed", type=int, help=f"seed for search-based measures (default ${SEED_ENV} or 0)")
    g.add_argument("--party", type=int, choices=(1, 2))
    g.add_argument("--riv-mode", dest="riv_mode", choices=("constrained", "relaxed"))
    g.add_argument("--xform-tolerance", dest="xform_tolerance", type=float)
    g.add_argument("--grid-step", dest="grid_step", type=float, help="radians")
    g.add_argument("--refine-iters", dest="refine_iters", type=int)
    g.add_argument("--ree-terms", dest="ree_terms", type=int)
    g.add_argument("--ree-restarts", dest="ree_restarts", type=int)
    g.add_argument("--ree-max-iters", dest="ree_max_iters", type=int)
    g.add_argument("--ree-tol", dest="ree_tol", type=float)
    g.add_argument("--eof-ensemble-size", dest="eof_ensemble_size", type=int)
    g.add_argument("--eof-restarts", dest="eof_restarts", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entmeasures", description="Bipartite entanglement measures.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("measure", help="evaluate measures on one state")
    m.add_argument("--state", help="state file path")
    m.add_argument("--family", help="bell:<kind> | bell_like:<psi|phi>[:sign] | mixed[:sign]")
    m.add_argument("--alpha", type=float, help="family parameter in radians")
    m.add_argument("--alpha-degrees", dest="alpha_degrees", type=float)
    m.add_argument("--measures", default="rivpvne", help=f"comma list from {','.join(MEASURES)}")
    _add_config_flags(m)
    m.set_defaults(func=cmd_measure)

    s = sub.add_parser("sweep", help="sweep a family over alpha and write CSV")
    s.add_argument("--family", required=True, choices=SWEEP_FAMILIES)
    s.add_argument("--sign", default="+", choices=("+", "-"))
    s.add_argument("--alpha-start", dest="alpha_start", type=float)
    s.add_argument("--alpha-stop", dest="alpha_stop", type=float)
    s.add_argument("--steps", type=int, default=91)
    s.add_argument("--measures")
    s.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    s.add_argument("--jobs", type=int, help="worker processes")
    _add_config_flags(s)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run the closed-form reproduction checks")
    v.add_argument("--json", action="store_true")
    _add_config_flags(v)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out=out)
    except CliError as exc:
        print(f"error: {exc}", file=err)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
