"""Command-line interface.

Every command writes a CSV (17 significant digits, LF line endings) and a
``<csv>.manifest.json`` describing the run.  ``replay`` re-executes a run
from its manifest.  Exit codes: 0 success, 1 numerical or coverage failure,
2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (INAPPLICABLE, bound_report, ckb_constant, instability_bounds,
                     verify_proof_inequalities)
from .saft_core import ParameterError, make_params, rotation_params
from .sampling import (CoverageError, SampleSet, grid, reconstruct_on_grid, sinc,
                       window_index_range)
from .special_functions import bspline_center_value
from .testbench import (CLASSICAL, ConfigError, ExperimentConfig, NoiseConfig,
                        make_test_function, run_error_decay, run_instability,
                        run_noise_experiment)
from .windows import WINDOW_NAMES, make_window, window_value

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

DEFAULT_OUTPUTS = {
    "exp-decay": "decay.csv",
    "exp-noise": "noise.csv",
    "bounds": "bounds.csv",
    "instability": "instability.csv",
    "reconstruct": "reconstruction.csv",
    "selftest": "selftest.json",
}


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


# ----------------------------------------------------------- flag parsing

def _int_list(text: str) -> list[int]:
    """Comma list ``14,17`` or inclusive range ``a:b:step``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            a, b = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1
            if step <= 0 or b < a:
                raise ValueError
            return list(range(a, b + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers 'a,b,c' or 'a:b:step', got {text!r}")


def _float_list(text: str) -> list[float]:
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
                raise ValueError
            a, b, step = parts
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            return [a + k * step for k in range(count)]
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers 'x,y' or 'a:b:step', got {text!r}")


def _window_list(text: str) -> list[str]:
    names = [p.strip() for p in text.split(",") if p.strip()]
    bad = [n for n in names if n not in WINDOW_NAMES]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown window(s) {bad or text!r}; choose from {','.join(WINDOW_NAMES)}")
    return names


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="saft-sampling",
                     description="Regularized sampling reconstruction for SAFT-bandlimited signals.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def experiment_flags(p):
        p.add_argument("--h", type=_finite, default=1.5, help="sinc spacing of the test signal, in (1, 2]")
        p.add_argument("--alpha", type=_finite, default=math.pi / 4, help="rotation angle in radians")
        p.add_argument("--N", type=_positive_int, default=50, help="half-length of the error interval")
        p.add_argument("--m", type=_int_list, default=[14, 17, 20, 26, 29], help="window sizes")
        p.add_argument("--grid", type=_positive_int, default=100_000, help="number of grid points")
        p.add_argument("--windows", type=_window_list, default=list(WINDOW_NAMES))
        p.add_argument("--classical", action="store_true", help="also evaluate the truncated series")

    p = sub.add_parser("exp-decay", help="noise-free max error versus window size")
    experiment_flags(p)
    p.add_argument("--out", default=DEFAULT_OUTPUTS["exp-decay"])

    p = sub.add_parser("exp-noise", help="mean max error from noisy samples")
    experiment_flags(p)
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--noise-low", type=_finite, default=1e-5)
    p.add_argument("--noise-high", type=_finite, default=5e-5)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=DEFAULT_OUTPUTS["exp-noise"])

    p = sub.add_parser("bounds", help="numerical error constants against closed-form bounds")
    p.add_argument("--windows", type=_window_list, default=list(WINDOW_NAMES))
    p.add_argument("--m", type=_int_list, default=[8, 14, 20, 26])
    p.add_argument("--delta", type=_float_list, default=[0.5, 1.0, 2.0])
    p.add_argument("--grid", type=_positive_int, default=2049, help="omega grid size (>= 128)")
    p.add_argument("--out", default=DEFAULT_OUTPUTS["bounds"])

    p = sub.add_parser("instability", help="worst-case noise amplification of the truncated series")
    p.add_argument("--N", type=_int_list, default=[10, 100, 1000])
    p.add_argument("--eps", type=_finite, default=1e-3)
    p.add_argument("--h", type=_finite, default=1.5)
    p.add_argument("--alpha", type=_finite, default=math.pi / 4)
    p.add_argument("--out", default=DEFAULT_OUTPUTS["instability"])

    p = sub.add_parser("reconstruct", help="reconstruct a signal from a sample file")
    p.add_argument("--input", required=True, help="CSV with header n,re,im and ascending integer n")
    p.add_argument("--window", default="sinh", choices=list(WINDOW_NAMES) + [CLASSICAL])
    p.add_argument("--m", type=_positive_int, default=14)
    p.add_argument("--delta", type=_finite, default=2 * math.pi / 3,
                   help="band parameter used to set beta = m (pi - delta)")
    p.add_argument("--alpha", type=_finite, default=math.pi / 4)
    p.add_argument("--params", type=_float_list, default=None,
                   help="explicit a,b,c,d,p,q (overrides --alpha)")
    p.add_argument("--interval", type=_float_list, default=None, help="lo,hi (default: covered range); write --interval=-20,20 for a negative lo")
    p.add_argument("--grid", type=_positive_int, default=1001)
    p.add_argument("--out", default=DEFAULT_OUTPUTS["reconstruct"])

    p = sub.add_parser("selftest", help="check auxiliary inequalities and core invariants")
    p.add_argument("--json", action="store_true", help="print a JSON report")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--out", default=None)

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="output path (default: the recorded one)")
    return parser


# ------------------------------------------------------------------ output

def fmt(value) -> str:
    if value is None or value is INAPPLICABLE:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    _atomic_write(path, buf.getvalue())


def manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


# ---------------------------------------------------------------- commands

def _check_numbers(rows, label):
    for row in rows:
        for v in row:
            if isinstance(v, float) and not math.isfinite(v):
                raise NumericalFailure(f"non-finite value in {label} row {row[:2]}")


def _experiment_config(args, noise=None) -> ExperimentConfig:
    try:
        return ExperimentConfig(N=args.N, m_list=tuple(args.m), windows=tuple(args.windows),
                                include_classical=args.classical, grid_count=args.grid, noise=noise)
    except ConfigError as exc:
        raise UsageError(str(exc))


def _test_function(args):
    try:
        return make_test_function(args.h, args.alpha)
    except (ConfigError, ParameterError) as exc:
        raise UsageError(str(exc))


def cmd_exp_decay(args):
    cfg = _experiment_config(args)
    tf = _test_function(args)
    result = run_error_decay(cfg, tf)
    rows = [[c.kind, c.m, c.max_error, c.oversampling_ok, c.bound] for c in result.cells]
    _check_numbers(rows, "exp-decay")
    write_csv(Path(args.out), ["window", "m", "max_error", "oversampling_ok", "bound"], rows)
    return cfg.to_dict(), None


def cmd_exp_noise(args):
    try:
        noise = NoiseConfig(args.noise_low, args.noise_high, args.trials, args.seed)
    except ConfigError as exc:
        raise UsageError(str(exc))
    cfg = _experiment_config(args, noise)
    tf = _test_function(args)
    result = run_noise_experiment(cfg, tf)
    rows = [[c.kind, c.m, c.mean_max_error, c.trials, noise.low, noise.high, noise.seed]
            for c in result.cells]
    _check_numbers(rows, "exp-noise")
    write_csv(Path(args.out),
              ["window", "m", "mean_max_error", "trials", "noise_low", "noise_high", "seed"], rows)
    return cfg.to_dict(), noise.seed


def cmd_bounds(args):
    for d in args.delta:
        if not 0.0 < d <= math.pi:
            raise UsageError(f"--delta values must lie in (0, pi], got {d!r}")
    if args.grid < 128:
        raise UsageError("--grid must be at least 128")
    if any(m < 2 for m in args.m):
        raise UsageError("--m values must be >= 2")
    rows = []
    for kind in args.windows:
        for m in args.m:
            for d in args.delta:
                if kind != "bspline" and d >= math.pi:
                    raise UsageError(f"{kind} window needs delta < pi")
                rep = bound_report(make_window(kind, m, d), d, args.grid)
                row = [kind, m, d, rep.e_numeric, rep.e_closed_form, rep.oversampling_ok,
                       rep.robustness_coeff]
                if not math.isfinite(rep.e_numeric):
                    raise NumericalFailure(f"error constant not finite for {kind} m={m} delta={d}")
                rows.append(row)
    write_csv(Path(args.out),
              ["kind", "m", "delta", "e_numeric", "e_bound", "oversampling_ok", "robust_coeff"], rows)
    return {"windows": args.windows, "m": args.m, "delta": args.delta, "grid": args.grid}, None


def cmd_instability(args):
    if not args.eps > 0:
        raise UsageError("--eps must be positive")
    if any(N < 1 for N in args.N):
        raise UsageError("--N values must be positive")
    tf = _test_function(args)
    rows = [[r.N, r.eps, r.measured, r.lower_bound, r.upper_bound]
            for r in run_instability(tf, args.N, args.eps)]
    _check_numbers(rows, "instability")
    for row in rows:
        if row[2] < row[3]:
            raise NumericalFailure(f"measured error below the lower bound at N={row[0]}")
    write_csv(Path(args.out), ["N", "eps", "measured", "lower_bound", "upper_bound"], rows)
    return {"N": args.N, "eps": args.eps, "h": args.h, "alpha": args.alpha}, None


def read_samples(path: str) -> dict[int, complex]:
    """Parse ``n,re,im`` rows; malformed content raises UsageError with the line number."""
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    samples: dict[int, complex] = {}
    last = None
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if lineno == 1:
                if [c.strip() for c in row] != ["n", "re", "im"]:
                    raise UsageError(f"{path}:1: expected header 'n,re,im'")
                continue
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise UsageError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                n = int(row[0])
                re_, im_ = float(row[1]), float(row[2])
            except ValueError:
                raise UsageError(f"{path}:{lineno}: cannot parse {','.join(row)!r}")
            if not (math.isfinite(re_) and math.isfinite(im_)):
                raise UsageError(f"{path}:{lineno}: non-finite sample value")
            if last is not None and n <= last:
                raise UsageError(f"{path}:{lineno}: indices must be strictly ascending")
            samples[n] = complex(re_, im_)
            last = n
    if not samples:
        raise UsageError(f"{path}: no samples")
    return samples


def _contiguous(samples: dict[int, complex], lo: int, hi: int) -> SampleSet:
    first, last = min(samples), max(samples)
    if lo < first or hi > last:
        raise CoverageError((lo if lo < first else last + 1, hi if hi > last else first - 1),
                            (first, last))
    missing = [n for n in range(lo, hi + 1) if n not in samples]
    if missing:
        run_end = missing[0]
        while run_end + 1 in missing:
            run_end += 1
        raise CoverageError((missing[0], run_end), (first, last))
    return SampleSet(lo, [samples[n] for n in range(lo, hi + 1)])


def cmd_reconstruct(args):
    samples = read_samples(args.input)
    try:
        if args.params is not None:
            if len(args.params) != 6:
                raise UsageError("--params needs six numbers a,b,c,d,p,q")
            params = make_params(*args.params)
        else:
            params = rotation_params(args.alpha)
    except ParameterError as exc:
        raise UsageError(str(exc))
    if args.m < 2:
        raise UsageError("--m must be >= 2")
    if args.grid < 2:
        raise UsageError("--grid must be >= 2")
    window = None
    reach = 0
    if args.window != CLASSICAL:
        if not 0.0 < args.delta < math.pi:
            raise UsageError("--delta must lie in (0, pi)")
        window = make_window(args.window, args.m, args.delta)
        reach = args.m - 1
    first, last = min(samples), max(samples)
    if args.interval is None:
        lo, hi = float(first + reach), float(last - reach)
        if not hi > lo:
            raise CoverageError((first - 1, last + 1), (first, last))
    else:
        if len(args.interval) != 2 or not args.interval[1] > args.interval[0]:
            raise UsageError("--interval needs lo,hi with lo < hi")
        lo, hi = args.interval
    if window is None:
        block = _contiguous(samples, first, last)
    else:
        need_lo, need_hi = window_index_range(lo, hi, args.m)
        block = _contiguous(samples, need_lo, need_hi)
    values = reconstruct_on_grid(params, block, window, (lo, hi), args.grid)
    if not np.all(np.isfinite(values)):
        raise NumericalFailure("reconstruction produced non-finite values")
    t = grid((lo, hi), args.grid)
    rows = [[float(ti), float(v.real), float(v.imag)] for ti, v in zip(t, values)]
    write_csv(Path(args.out), ["t", "re", "im"], rows)
    return {"input": os.path.abspath(args.input), "window": args.window, "m": args.m,
            "delta": args.delta, "params": list(params.as_tuple()), "interval": [lo, hi],
            "grid": args.grid}, None


def selftest_checks(inject_fault: bool = False) -> list[dict]:
    checks = []
    for c in verify_proof_inequalities([math.pi, 5.0, 10.0, 20.0, 40.0], [1.5, 2.0, 10.0, 100.0]):
        checks.append({"claim": c.claim, "beta": c.beta, "T": c.T, "value": c.value,
                       "margin": c.margin, "ok": c.ok})
    const = ckb_constant() * (1.01 if inject_fault else 1.0)
    margin = 1e-5 - abs(const / 1.163167956 - 1.0)
    checks.append({"claim": "ckb_constant", "value": const, "margin": margin, "ok": margin > 0})
    for s in range(2, 16):
        v = math.sqrt(2 * s) * bspline_center_value(2 * s)
        margin = min(v - 4.0 / 3.0, math.sqrt(6.0 / math.pi) - v)
        checks.append({"claim": "bspline_center", "s": s, "value": v, "margin": margin,
                       "ok": 4.0 / 3.0 <= v < math.sqrt(6.0 / math.pi)})
    t = np.linspace(0.0, 1.0, 401)
    for kind in WINDOW_NAMES:
        for m in range(2, 11):
            spec = make_window(kind, m, 1.0)
            vals = window_value(spec, m * t)
            worst = float(np.max(np.diff(vals)))
            ok = vals[0] == 1.0 and vals[-1] == 0.0 and worst <= 1e-15
            checks.append({"claim": "window_membership", "kind": kind, "m": m,
                           "value": worst, "margin": -worst, "ok": bool(ok)})
    lower, upper = instability_bounds(100)
    checks.append({"claim": "instability_order", "value": upper - lower, "margin": upper - lower,
                   "ok": upper > lower})
    checks.append({"claim": "sinc_half", "value": float(sinc(0.5)),
                   "margin": 1e-15 - abs(float(sinc(0.5)) - 2 / math.pi),
                   "ok": abs(float(sinc(0.5)) - 2 / math.pi) <= 1e-15})
    return checks


def cmd_selftest(args):
    checks = selftest_checks(args.inject_fault)
    failed = [c for c in checks if not c["ok"]]
    report = {"passed": not failed, "checks": checks}
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for c in checks:
            extra = ", ".join(f"{k}={c[k]}" for k in ("kind", "m", "s", "beta", "T") if c.get(k) is not None)
            print(f"{'PASS' if c['ok'] else 'FAIL'} {c['claim']} ({extra}) margin={c['margin']:.3e}")
        print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if args.out:
        _atomic_write(Path(args.out), json.dumps(report, indent=2, sort_keys=True) + "\n")
    if failed:
        raise NumericalFailure(f"{len(failed)} selftest check(s) failed")
    return {"inject_fault": args.inject_fault}, None


COMMANDS = {
    "exp-decay": cmd_exp_decay,
    "exp-noise": cmd_exp_noise,
    "bounds": cmd_bounds,
    "instability": cmd_instability,
    "reconstruct": cmd_reconstruct,
    "selftest": cmd_selftest,
}


def _strip_out(argv: list[str]) -> list[str]:
    out, skip = [], False
    for i, a in enumerate(argv):
        if skip:
            skip = False
            continue
        if a == "--out":
            skip = True
            continue
        if a.startswith("--out="):
            continue
        out.append(a)
    return out


def _replay(args) -> int:
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            manifest = json.load(fh)
        argv = list(manifest["argv"])
        recorded = manifest["outputs"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}")
    out = args.out if args.out is not None else (recorded[0] if recorded else None)
    if out is not None:
        argv += ["--out", out]
    return run(argv)


def run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "replay":
        return _replay(args)
    started = _utc_now()
    t0 = time.perf_counter()
    config, seed = COMMANDS[args.command](args)
    wall = time.perf_counter() - t0
    if args.out:
        out = Path(args.out)
        flags = {k: v for k, v in vars(args).items() if k not in ("command", "out")}
        manifest = {
            "command": args.command,
            "argv": _strip_out(list(argv)),
            "flags": flags,
            "config": config,
            "seed": seed,
            "version": __version__,
            "outputs": [str(out)],
            "started": started,
            "finished": _utc_now(),
            "wall_seconds": wall,
        }
        _atomic_write(manifest_path(out), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        return run(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CoverageError as exc:
        print(f"coverage error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ParameterError, ValueError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
