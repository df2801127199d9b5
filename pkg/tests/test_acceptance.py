"""One test per acceptance criterion; each prints a PASS/FAIL line at its pinned tolerance."""

import importlib
import io

import numpy as np

from entmeasures import cli
from entmeasures import measures as M
from entmeasures.linalg import eig_hermitian, partial_trace
from entmeasures.states import (
    BELL_KINDS,
    bell,
    bell_like,
    maximally_mixed,
    mixed_family,
    product_state,
    random_mixed,
    random_pure,
    validate,
)

R = importlib.import_module("entmeasures.rivpvne")

REE_CFG = M.ReeConfig(restarts=4)
RIV_CFG = R.RivConfig()


def H(p):
    p = np.clip(p, 0.0, 1.0)
    return float(-sum(x * np.log2(x) for x in (p, 1 - p) if x > 0))


def worst(devs):
    """``devs``: (label, deviation, tolerance). Returns (ok, summary)."""
    label, dev, tol = max(devs, key=lambda d: d[1] / d[2])
    return all(d <= t for _, d, t in devs), f"worst {label} dev={dev:.3e} tol={tol:g}"


def test_criterion_1_bell_states(report):
    devs = []
    for kind in BELL_KINDS:
        rho = bell(kind).density()
        devs += [
            (f"{kind} rivpvne", abs(R.rivpvne(rho, RIV_CFG).value - 1), 1e-4),
            (f"{kind} concurrence", abs(M.concurrence(rho) - 1), 1e-9),
            (f"{kind} eof", abs(M.eof_two_qubit(rho) - 1), 1e-9),
            (f"{kind} ree", abs(M.ree(rho, REE_CFG).value - 1), 2e-2),
        ]
    ok, msg = worst(devs)
    assert report("1 Bell states", ok, msg)


def test_criterion_2_bell_like_family(report):
    devs = []
    for a in np.linspace(0, np.pi / 2, 25):
        want = H(np.cos(a) ** 2)
        for fam in ("Psi", "Phi"):
            psi = bell_like(a, fam)
            tag = f"{fam} a={a:.4f}"
            devs += [
                (f"{tag} pvne", abs(M.pvne(psi) - want), 1e-9),
                (f"{tag} eof", abs(M.eof_two_qubit(psi) - want), 1e-9),
                (f"{tag} rivpvne", abs(R.rivpvne(psi, RIV_CFG).value - want), 1e-4),
                (f"{tag} concurrence", abs(M.concurrence(psi) - abs(np.sin(2 * a))), 1e-9),
            ]
    for a in (0.0, np.pi / 2):
        psi = bell_like(a)
        for name, v in [("pvne", M.pvne(psi)), ("eof", M.eof_two_qubit(psi)),
                        ("rivpvne", R.rivpvne(psi, RIV_CFG).value), ("concurrence", M.concurrence(psi))]:
            devs.append((f"endpoint a={a:.4f} {name}", abs(v), 1e-6))
    ok, msg = worst(devs)
    assert report("2 Bell-like pure family", ok, msg)


def test_criterion_3_mixed_spot_values(report):
    a = np.pi / 3
    rho = mixed_family(a)
    devs = []
    for party in (1, 2):
        w = eig_hermitian(partial_trace(rho.m, 2, 2, keep=party)).eigenvalues
        devs += [(f"reduced spectrum party {party}", float(np.max(np.abs(w - [0.375, 0.625]))), 1e-10)]
    r = np.sqrt(3 + np.cos(4 * a))
    sm = R.s_max_effective(rho, RIV_CFG)
    one = R.one_sided_matrix(R.rotate_state(rho, sm.angles))
    w = eig_hermitian(one / np.trace(one).real).eigenvalues
    devs.append(("s_max spectrum", float(np.max(np.abs(w - [(2 - r) / 4, (2 + r) / 4]))), 1e-4))
    devs.append(("rivpvne", abs(R.rivpvne(rho, RIV_CFG).value - 0.470693), 1e-3))
    devs.append(("eof", abs(M.eof_two_qubit(rho) - 0.6561), 1e-3))
    devs.append(("concurrence", abs(M.concurrence(rho) - 0.75), 1e-9))
    ok, msg = worst(devs)
    assert report("3 mixed family at pi/3", ok, msg)


def test_criterion_4_mixed_ordering_margin(report):
    margin = 1e-3
    gaps = []
    for a in np.arange(1, 51) * np.pi / 51:
        rho = mixed_family(a)
        r, e, c = R.rivpvne(rho, RIV_CFG).value, M.eof_two_qubit(rho), M.concurrence(rho)
        gaps.append((a, e - r, c - e))
    low = min(gaps, key=lambda g: min(g[1], g[2]))
    smallest = min(low[1], low[2])
    strict = all(g[1] > 0 and g[2] > 0 for g in gaps)
    short = sum(min(g[1], g[2]) < margin for g in gaps)
    ok = smallest >= margin
    detail = (
        f"min gap {smallest:.3e} at a={low[0]:.4f} (eof-riv={low[1]:.2e}, c-eof={low[2]:.2e}); "
        f"{short}/50 points below margin {margin:g}; strict ordering {'holds' if strict else 'BROKEN'}"
    )
    report("4 mixed ordering riv < eof < c, margin 1e-3", ok, detail)
    assert strict
    assert ok, detail


def test_criterion_5_ree_vs_sin2(report):
    excess, info = 0.0, []
    cache = {}
    for a in np.linspace(0, np.pi, 9):
        key = round(min(a, np.pi - a), 12)  # the family is symmetric under a -> pi - a
        if key not in cache:
            cache[key] = M.ree(mixed_family(a), REE_CFG).value
        v, s2 = cache[key], np.sin(a) ** 2
        excess = max(excess, v - s2)
        if v < s2 - 5e-2:
            info.append(f"a={a:.3f}: ree={v:.4f} sin^2={s2:.4f}")
    ok = excess <= 2e-2
    report("5 ree <= sin^2 + 2e-2", ok, f"max excess {excess:.3e}; INFO {len(info)} points below sin^2 - 5e-2: "
           + "; ".join(info))
    assert ok


def test_criterion_6_separable_suite(report):
    rng = np.random.default_rng(20240601)
    states = []
    for i in range(8):
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        b = rng.normal(size=2) + 1j * rng.normal(size=2)
        states.append((f"product#{i}", product_state(a, b).density()))
    states += [(f"diag p={p}", validate(np.diag([p, 0, 0, 1 - p]))) for p in (0.1, 0.5, 0.9)]
    states.append(("I4/4", maximally_mixed()))
    devs = []
    for label, rho in states:
        devs += [
            (f"{label} rivpvne", max(0.0, R.rivpvne(rho, RIV_CFG).value), 1e-3),
            (f"{label} concurrence", M.concurrence(rho), 1e-3),
            (f"{label} eof", M.eof_two_qubit(rho), 1e-3),
            (f"{label} ree", max(0.0, M.ree(rho, REE_CFG).value), 1e-3),
        ]
    ok, msg = worst(devs)
    assert report("6 separability suite <= 1e-3", ok, msg)


def test_criterion_7_pure_reduction(report):
    rng = np.random.default_rng(20240602)
    devs = []
    for i in range(20):
        psi = random_pure(rng)
        devs.append((f"pure#{i}", abs(R.rivpvne(psi, RIV_CFG).value - M.pvne(psi)), 2e-4))
    ok, msg = worst(devs)
    assert report("7 pure-state reduction", ok, msg)


def test_criterion_8_oracle_equivalences(report):
    rng = np.random.default_rng(8)
    devs = []
    for i in range(10):
        rho = random_mixed(rng, rank=int(rng.integers(2, 5)))
        got, exact = M.eof_search(rho, restarts=3, seed=i).value, M.eof_two_qubit(rho)
        devs.append((f"eof_search#{i} above", max(0.0, got - exact), 5e-3))
        devs.append((f"eof_search#{i} below", max(0.0, exact - got), 1e-9))
    for dims in ((2, 2), (3, 3)):
        d_a, d_b = dims
        for k in range(5):
            rho = random_mixed(rng, *dims)
            m = rho.m
            for party in (1, 2):
                pt = np.zeros((dims[party - 1],) * 2, dtype=complex)
                os_ = np.zeros_like(pt)
                for x in range(pt.shape[0]):
                    for y in range(pt.shape[0]):
                        for c in range(dims[2 - party]):
                            i, j = (x * d_b + c, y * d_b + c) if party == 1 else (c * d_b + x, c * d_b + y)
                            pt[x, y] += m[i, j]
                            for d in range(dims[2 - party]):
                                i, j = (x * d_b + c, y * d_b + d) if party == 1 else (c * d_b + x, d * d_b + y)
                                os_[x, y] += m[i, j]
                devs.append((f"partial_trace {dims} p{party}",
                             float(np.max(np.abs(partial_trace(m, d_a, d_b, party) - pt))), 1e-14))
                devs.append((f"one_sided {dims} p{party}",
                             float(np.max(np.abs(R.one_sided_matrix(rho, party) - os_))), 1e-14))
    for k in range(50):
        n = 1 + k % 9
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = (a + a.conj().T) / 2
        e = eig_hermitian(h)
        bound = 1e-10 * max(1.0, np.linalg.norm(h))
        devs.append((f"eig reconstruction n={n}", float(np.linalg.norm(e.reconstruct() - h)), bound))
        v = e.eigenvectors
        devs.append((f"eig orthonormality n={n}", float(np.linalg.norm(v.conj().T @ v - np.eye(n))), 1e-10))
    ok, msg = worst(devs)
    assert report("8 oracle equivalences", ok, msg)


def test_criterion_9_sweep_determinism(report, tmp_path):
    args = ["sweep", "--family", "mixed", "--steps", "5", "--measures", "rivpvne,eof,concurrence,ree,eof_search",
            "--ree-restarts", "2", "--eof-restarts", "2", "--seed", "42"]
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        assert cli.main(args + ["--out", str(path)], out=io.StringIO(), err=io.StringIO()) == 0
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1]
    assert report("9 sweep determinism", ok, f"{len(outs[0])} bytes, identical={ok}")
