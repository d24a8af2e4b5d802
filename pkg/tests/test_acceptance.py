"""Acceptance gate: one PASS/FAIL line per criterion at its stated tolerance.

Run with pytest (lines are printed in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.  Soft targets print SOFT-PASS/SOFT-MISS
and never fail the gate.
"""
import functools
import math
import os
import sys
import tempfile
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import gaussian_saft, gaussian_saft_width  # noqa: E402

from saft_sampling.bounds import (EULER_GAMMA, bound_report, ckb_constant,  # noqa: E402
                                  error_constant_numeric, robustness_coeff, robustness_cap,
                                  verify_proof_inequalities)
from saft_sampling.cli import main as cli_main  # noqa: E402
from saft_sampling.saft_core import (FOURIER, ComplexSignal, a_convolution_quadrature,  # noqa: E402
                                     a_translate, chirp_modulate, eta, gaussian, gaussian_support,
                                     inverse_saft_quadrature, make_params, rho, rotation_params,
                                     saft_quadrature)
from saft_sampling.sampling import SampleSet, shannon_truncated  # noqa: E402
from saft_sampling.special_functions import bspline_center_value, i0  # noqa: E402
from saft_sampling.testbench import (CLASSICAL, ExperimentConfig, NoiseConfig,  # noqa: E402
                                     make_test_function, run_error_decay, run_instability,
                                     run_noise_experiment)
from saft_sampling.windows import (WINDOW_NAMES, WindowKind, make_window, window_ft,  # noqa: E402
                                   window_value)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # direct execution without pytest
    ACCEPTANCE_LINES = []

M_LIST = (14, 17, 20, 26, 29)


class Outcome:
    def __init__(self, passed, detail, soft=False):
        self.passed, self.detail, self.soft = bool(passed), detail, soft


def criterion(key, title, limit=None):
    """Wrap a check returning Outcome; time it, record its line, assert hard outcomes."""
    def wrap(check):
        @functools.wraps(check)
        def run():
            t0 = time.perf_counter()
            out = check()
            dt = time.perf_counter() - t0
            ok = out.passed and (limit is None or dt < limit)
            timing = f"{dt:.1f} s" + (f" of {limit} s" if limit else "")
            tag = ("SOFT-PASS" if ok else "SOFT-MISS") if out.soft else ("PASS" if ok else "FAIL")
            line = f"[{tag}] {key} {title}: {out.detail} ({timing})"
            ACCEPTANCE_LINES.append(line)
            print(line)
            if not out.soft:
                assert ok, line
        run.criterion_key = key
        return run
    return wrap


def random_params(rng):
    b = rng.choice([-1, 1]) * rng.uniform(0.3, 3)
    a, d = rng.uniform(-3, 3, 2)
    return make_params(a, b, (a * d - 1) / b, d, *rng.uniform(-2, 2, 2))


def wave(t):
    return np.exp(-0.1 * (t - 0.3) ** 2) * (1 + 0.5j * np.sin(t)) + 0j


WAVE = ComplexSignal(wave, "wavepacket")
GAUSS = gaussian()
GAUSS_SUPPORT = gaussian_support(1.0)


# 1 -------------------------------------------------------------------------

@criterion("C1", "operator identities", limit=60)
def check_operator_identities():
    rng = np.random.default_rng(2024)
    worst_point, worst_quad, count = 0.0, 0.0, 0
    for _ in range(100):
        A = random_params(rng)
        x, y = rng.uniform(-3, 3, 2)
        t, s, w = rng.uniform(-6, 6), rng.uniform(-3, 3), rng.uniform(-3, 3)
        r = A.chirp_rate
        twist = a_translate(A, x, a_translate(A, y, WAVE))(t) - np.exp(-1j * r * x * y) * a_translate(A, x + y, WAVE)(t)
        chirp = (a_translate(A, x, chirp_modulate(s, WAVE))(t)
                 - np.exp(-0.5j * (t - x) * ((2 * r + s) * x - s * t)) * WAVE(t - x))
        special = (a_translate(A, x, chirp_modulate(-r, WAVE))(t)
                   - np.exp(-0.5j * r * (t * t - x * x)) * WAVE(t - x))
        worst_point = max(worst_point, abs(twist), abs(chirp), abs(special))
        lo, hi = GAUSS_SUPPORT
        shifted = saft_quadrature(A, a_translate(A, x, GAUSS), (lo + x, hi + x), w)
        law = shifted - rho(A, x) * np.exp(-1j * w * x / A.b) * gaussian_saft(A, w)
        g = gaussian(0.8, y / 3)
        conv = ComplexSignal(lambda u: a_convolution_quadrature(A, GAUSS, g, GAUSS_SUPPORT, u), "conv")
        span = (min(lo, lo + y / 3) * 1.5, max(hi, hi + y / 3) * 1.5)
        fact = (saft_quadrature(A, conv, span, w)
                - np.conj(eta(A, w)) * gaussian_saft(A, w)
                * saft_quadrature(A, g, gaussian_support(0.8, y / 3), w))
        worst_quad = max(worst_quad, abs(law), abs(fact))
        count += 1
    ok = worst_point <= 1e-12 and worst_quad <= 1e-7
    return Outcome(ok, f"{count} tuples, pointwise max {worst_point:.2e} (tol 1e-12), "
                       f"quadrature max {worst_quad:.2e} (tol 1e-7)")


# 2 -------------------------------------------------------------------------

@criterion("C2", "transform oracle", limit=30)
def check_transform_oracle():
    sets = [FOURIER, rotation_params(math.pi / 4, 0.3, -0.2), make_params(1.5, 0.8, -0.3125, 0.5, -1, 0.5),
            make_params(-0.5, -1.25, 0.4, -1.0, 0.4, 1.0), make_params(2, 2, 0.5, 1, 0, 0)]
    t = np.linspace(-4, 4, 17)
    worst_trip = 0.0
    for A in sets:
        F = ComplexSignal(lambda w, A=A: saft_quadrature(A, GAUSS, GAUSS_SUPPORT, w), "quadrature transform")
        width = gaussian_saft_width(A)
        back = inverse_saft_quadrature(A, F, (A.p - 10 * width, A.p + 10 * width), t,
                                       panels=int(20 * width) + 20)
        worst_trip = max(worst_trip, float(np.max(np.abs(back - GAUSS(t)))))
    w = np.linspace(-5, 5, 21)
    fourier = float(np.max(np.abs(saft_quadrature(FOURIER, GAUSS, GAUSS_SUPPORT, w) - np.exp(-w * w / 2))))
    ok = worst_trip <= 1e-6 and fourier <= 1e-10
    return Outcome(ok, f"round trip max {worst_trip:.2e} over 5 sets (tol 1e-6), "
                       f"Fourier Gaussian max {fourier:.2e} (tol 1e-10)")


# 3 -------------------------------------------------------------------------

_TX, _TW = np.polynomial.legendre.leggauss(40)


def ft_quadrature(spec, tau):
    m = spec.m
    if spec.kind is WindowKind.BSPLINE:
        edges = np.linspace(0, m, spec.s + 1)  # knots of the scaled B-spline
        sub = np.linspace(0, 1, 9)
        edges = np.unique((edges[:-1, None] + np.diff(edges)[:, None] * sub[None, :]).ravel())
        half = np.diff(edges)[:, None] / 2
        t = (half * _TX + (edges[:-1, None] + edges[1:, None]) / 2).ravel()
        wts = (half * _TW).ravel()
        jac = 1.0
    else:
        edges = np.linspace(0, math.pi / 2, 65)
        half = np.diff(edges)[:, None] / 2
        theta = (half * _TX + (edges[:-1, None] + edges[1:, None]) / 2).ravel()
        wts = (half * _TW).ravel()
        t, jac = m * np.sin(theta), m * np.cos(theta)
    vals = window_value(spec, t) * jac
    return math.sqrt(2 / math.pi) * (np.cos(np.outer(tau, t)) * vals) @ wts


@criterion("C3", "window class", limit=60)
def check_window_class():
    bad = []
    worst_ft = 0.0
    taus = np.linspace(-2 * math.pi, 2 * math.pi, 81)
    grid = np.linspace(0, 1, 1000)
    for kind in WINDOW_NAMES:
        for m in range(2, 31):
            spec = make_window(kind, m, 2 * math.pi / 3)
            t = np.random.default_rng(m).uniform(-m - 1, m + 1, 100)
            vals = window_value(spec, m * grid)
            members = (np.max(np.abs(window_value(spec, t) - window_value(spec, -t))) <= 1e-14
                       and np.all(window_value(spec, np.array([m, m + 1e-12, -m, 2.0 * m])) == 0)
                       and np.all(np.diff(vals) <= 0) and window_value(spec, 0.0) == 1.0)
            if not members:
                bad.append((kind, m))
            err = float(np.max(np.abs(window_ft(spec, taus) - ft_quadrature(spec, taus))))
            worst_ft = max(worst_ft, err)
    ok = not bad and worst_ft <= 1e-8
    return Outcome(ok, f"membership failures {bad or 'none'} over 3 kinds x m=2..30, "
                       f"FT vs quadrature max {worst_ft:.2e} (tol 1e-8)")


# 4 -------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def bound_grid(kind):
    return [bound_report(make_window(kind, m, d), d) for m in (8, 14, 20, 26) for d in (0.5, 1.0, 2.0)]


def dominance(kind):
    cells = [r for r in bound_grid(kind) if r.oversampling_ok]
    fails = [(r.window.m, r.delta, r.e_numeric / r.e_closed_form) for r in cells
             if not r.e_numeric <= r.e_closed_form]
    worst = max(r.e_numeric / r.e_closed_form for r in cells)
    detail = (f"{len(cells) - len(fails)}/{len(cells)} applicable cells dominated, worst ratio {worst:.3g}")
    if fails:
        detail += "; violations (m, delta, ratio): " + ", ".join(f"({m}, {d}, {q:.3f})" for m, d, q in fails)
    return Outcome(not fails, detail)


@criterion("C4-bspline", "bound dominance, bspline", limit=120)
def check_dominance_bspline():
    return dominance("bspline")


@criterion("C4-sinh", "bound dominance, sinh", limit=120)
def check_dominance_sinh():
    return dominance("sinh")


@criterion("C4-ckb", "bound dominance, ckb", limit=120)
def check_dominance_ckb():
    return dominance("ckb")


@criterion("C4-loglin", "sinh log-error affine in m", limit=120)
def check_loglinear():
    ms = np.arange(6, 27)
    logs = np.log([error_constant_numeric(make_window("sinh", int(m), 1.0), 1.0) for m in ms])
    slope, icpt = np.polyfit(ms, logs, 1)
    resid = float(np.max(np.abs(logs - (slope * ms + icpt))))
    return Outcome(resid < 0.2, f"m=6..26, delta=1: max residual {resid:.3f} (tol 0.2), slope {slope:.3f}")


# 5 -------------------------------------------------------------------------

@criterion("C5", "printed constants")
def check_constants():
    const = math.exp(math.pi) / (math.sqrt(2) * math.pi * (float(i0(math.pi)) - 1))
    rel = abs(const / 1.163167956 - 1)
    values = [math.sqrt(2 * s) * bspline_center_value(2 * s) for s in range(2, 16)]
    in_range = all(4 / 3 <= v < math.sqrt(6 / math.pi) for v in values)
    gamma_ok = f"{EULER_GAMMA:.8f}" == "0.57721566"
    same = abs(ckb_constant() - const) <= 1e-15 * const
    ok = rel <= 1e-5 and in_range and gamma_ok and same
    return Outcome(ok, f"cKB constant {const:.10f} (rel dev {rel:.1e}, tol 1e-5); "
                       f"sqrt(2s) M_2s(0) in [{min(values):.6f}, {max(values):.6f}] "
                       f"within [4/3, sqrt(6/pi)) for s=2..15: {in_range}; gamma {EULER_GAMMA:.8f}")


# 6 -------------------------------------------------------------------------

@criterion("C6", "proof inequalities", limit=60)
def check_proof_inequalities():
    report = verify_proof_inequalities([math.pi, 5, 10, 20, 40], [1.5, 2, 10, 100])
    parts = []
    ok = True
    for claim in ("j1_integral", "struve", "i0_growth"):
        rows = [c for c in report if c.claim == claim]
        low = min(rows, key=lambda c: c.margin)
        ok &= all(c.ok for c in rows)
        kind = ">" if rows[0].strict else ">="
        parts.append(f"{claim} min margin {low.margin:.3e} {kind} 0 at beta={low.beta:.4g}")
    return Outcome(ok, "; ".join(parts))


# 7 / 8 ---------------------------------------------------------------------

TF = make_test_function(1.5, math.pi / 4)


@functools.lru_cache(maxsize=None)
def decay_result():
    cfg = ExperimentConfig(N=50, m_list=M_LIST, include_classical=True, grid_count=100_000)
    t0 = time.perf_counter()
    res = run_error_decay(cfg, TF)
    return res, time.perf_counter() - t0


def ten_times_below_classical(kind):
    res, _ = decay_result()
    ratios = [res.cell(CLASSICAL, m).max_error / res.cell(kind, m).max_error for m in M_LIST]
    fails = [m for m, q in zip(M_LIST, ratios) if not q >= 10]
    detail = "classical/regularized ratios " + ", ".join(f"m={m}: {q:.3g}" for m, q in zip(M_LIST, ratios))
    if fails:
        flags = [res.cell(kind, m).oversampling_ok for m in fails]
        detail += f"; below 10x at m={fails} (oversampling_ok={flags})"
    return Outcome(not fails, detail)


@criterion("C7-bspline", "noise-free run, bspline 10x below classical", limit=600)
def check_decay_bspline():
    return ten_times_below_classical("bspline")


@criterion("C7-sinh", "noise-free run, sinh 10x below classical", limit=600)
def check_decay_sinh():
    return ten_times_below_classical("sinh")


@criterion("C7-ckb", "noise-free run, ckb 10x below classical", limit=600)
def check_decay_ckb():
    return ten_times_below_classical("ckb")


@criterion("C7-monotone", "noise-free errors nonincreasing in m (step factor 1.5)", limit=600)
def check_decay_monotone():
    res, _ = decay_result()
    bad = []
    for kind in WINDOW_NAMES:
        s = res.series(kind)
        bad += [(kind, M_LIST[i + 1]) for i in range(len(s) - 1) if s[i + 1] > 1.5 * s[i]]
    series = "; ".join(f"{k}: " + ", ".join(f"{e:.2e}" for e in res.series(k)) for k in WINDOW_NAMES)
    return Outcome(not bad, f"violations {bad or 'none'}; {series}")


@criterion("C7-soft", "bspline trajectory vs 2.28e-4 -> 2.023e-5")
def check_decay_soft():
    res, _ = decay_result()
    first, last = res.cell("bspline", M_LIST[0]), res.cell("bspline", M_LIST[-1])
    ok = 2.28e-5 <= first.max_error <= 2.28e-3 and 2.023e-6 <= last.max_error <= 2.023e-4
    flags = [res.cell("bspline", m).oversampling_ok for m in M_LIST]
    return Outcome(ok, f"m=14: {first.max_error:.3e}, m=29: {last.max_error:.3e}; "
                       f"oversampling_ok by m: {flags}", soft=True)


@functools.lru_cache(maxsize=None)
def noise_result():
    cfg = ExperimentConfig(N=50, m_list=M_LIST, include_classical=False, grid_count=100_000,
                           noise=NoiseConfig(1e-5, 5e-5, 100, 42))
    t0 = time.perf_counter()
    res = run_noise_experiment(cfg, TF)
    return res, time.perf_counter() - t0


@criterion("C8", "noisy run within clean error + sqrt(2) 5e-5 robustness coefficient", limit=1200)
def check_noise_budget():
    res, _ = noise_result()
    clean, _ = decay_result()
    worst, bad = 0.0, []
    for c in res.cells:
        spec = make_window(c.kind, c.m, TF.delta)
        budget = clean.cell(c.kind, c.m).max_error + math.sqrt(2) * 5e-5 * robustness_coeff(spec)
        worst = max(worst, c.mean_max_error / budget)
        if not c.mean_max_error <= budget:
            bad.append((c.kind, c.m))
    trials = {c.trials for c in res.cells}
    return Outcome(not bad and trials == {100},
                   f"{len(res.cells)} cells x {trials} trials, worst mean/budget {worst:.3f}, "
                   f"violations {bad or 'none'}")


@criterion("C8-soft", "noisy bspline trajectory vs 2.5e-4 -> 7.78e-5")
def check_noise_soft():
    res, _ = noise_result()
    s = res.series("bspline")
    ok = 2.5e-5 <= s[0] <= 2.5e-3 and 7.78e-6 <= s[-1] <= 7.78e-4
    return Outcome(ok, "bspline mean max errors " + ", ".join(f"{e:.2e}" for e in s), soft=True)


# 9 -------------------------------------------------------------------------

@criterion("C9", "instability of the truncated series", limit=60)
def check_instability():
    rows = run_instability(TF, [10, 100, 1000], 1e-3)
    ok = all(r.measured >= r.lower_bound and abs(r.at_half - r.closed_form_at_half) <= 1e-12 for r in rows)
    detail = "; ".join(f"N={r.N}: measured {r.measured:.4e} >= {r.lower_bound:.4e}, "
                       f"t=1/2 dev {abs(r.at_half - r.closed_form_at_half):.1e}" for r in rows)
    return Outcome(ok, detail)


# 10 ------------------------------------------------------------------------

@criterion("C10", "sample energy", limit=5)
def check_energy():
    n = np.arange(-10_000, 10_001, dtype=float)
    energy = math.fsum(np.abs(TF(n)) ** 2)
    return Outcome(abs(energy - 1) <= 1e-3, f"sum |f(n)|^2 = {energy:.6f} (tol 1e-3)")


# 11 ------------------------------------------------------------------------

@criterion("C11", "robustness coefficients")
def check_robustness():
    bad, checked = [], 0
    for m in range(2, 41):
        for kind in WINDOW_NAMES:
            for delta in (0.5, 1.0, 2.0, math.pi - math.pi / m):
                spec = make_window(kind, m, delta)
                cap, applies = robustness_cap(spec)
                if applies:
                    checked += 1
                    if not robustness_coeff(spec) <= cap:
                        bad.append((kind, m, delta))
    return Outcome(not bad, f"{checked} (kind, m, delta) cells with hypotheses met, violations {bad or 'none'}")


# 12 ------------------------------------------------------------------------

@criterion("C12", "CLI contract")
def check_cli():
    notes = []
    ok = True
    small = ["--N", "8", "--m", "5,7", "--grid", "401"]
    commands = {
        "exp-decay": ["exp-decay", *small, "--classical"],
        "exp-noise": ["exp-noise", *small, "--trials", "3", "--seed", "7"],
        "bounds": ["bounds", "--m", "8", "--delta", "1.0", "--grid", "257"],
        "instability": ["instability", "--N", "10,100"],
    }
    with tempfile.TemporaryDirectory() as tmp:
        src = os.path.join(tmp, "samples.csv")
        n = np.arange(-30, 31)
        with open(src, "w") as fh:
            fh.write("n,re,im\n")
            for k, v in zip(n, TF(n.astype(float))):
                fh.write(f"{k},{float(v.real)!r},{float(v.imag)!r}\n")
        commands["reconstruct"] = ["reconstruct", "--input", src, "--interval=-10,10", "--grid", "201"]
        for name, argv in commands.items():
            a, b, c = (os.path.join(tmp, f"{name}-{x}.csv") for x in "abc")
            codes = [cli_main(argv + ["--out", a]), cli_main(argv + ["--out", b]),
                     cli_main(["replay", a + ".manifest.json", "--out", c])]
            same = open(a, "rb").read() == open(b, "rb").read() == open(c, "rb").read()
            if codes != [0, 0, 0] or not same:
                ok = False
                notes.append(f"{name} codes={codes} identical={same}")
        gap = os.path.join(tmp, "gap.csv")
        with open(gap, "w") as fh:
            fh.write("n,re,im\n" + "".join(f"{k},0,0\n" for k in range(-30, 31) if k != 2))
        expect = {
            "usage": (["bounds", "--delta", "3.5", "--out", os.path.join(tmp, "u.csv")], 2),
            "coverage": (["reconstruct", "--input", gap, "--interval=-5,5", "--out", os.path.join(tmp, "g.csv")], 1),
            "numerical": (["selftest", "--inject-fault"], 1),
        }
        import contextlib
        import io
        for label, (argv, code) in expect.items():
            with contextlib.redirect_stderr(io.StringIO()), contextlib.redirect_stdout(io.StringIO()):
                got = cli_main(argv)
            if got != code:
                ok = False
                notes.append(f"{label} exit {got} != {code}")
    return Outcome(ok, f"5 commands byte-identical on rerun and replay, exit codes 0/1/2: "
                       f"{'; '.join(notes) or 'all as specified'}")


CHECKS = [check_operator_identities, check_transform_oracle, check_window_class,
          check_dominance_bspline, check_dominance_sinh, check_dominance_ckb, check_loglinear,
          check_constants, check_proof_inequalities, check_decay_bspline, check_decay_sinh,
          check_decay_ckb, check_decay_monotone, check_decay_soft, check_noise_budget,
          check_noise_soft, check_instability, check_energy, check_robustness, check_cli]


@pytest.mark.parametrize("check", CHECKS, ids=[c.criterion_key for c in CHECKS])
def test_criterion(check):
    check()


if __name__ == "__main__":
    failed = 0
    for check in CHECKS:
        try:
            check()
        except AssertionError:
            failed += 1
    print(f"{len(CHECKS) - failed}/{len(CHECKS)} acceptance lines passed")
    sys.exit(1 if failed else 0)
