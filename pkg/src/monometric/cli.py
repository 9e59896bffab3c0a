"""Command-line front end.

Every subcommand prints one JSON report on stdout; diagnostics go to
stderr. Exit status is 0 on success or a passing verdict, 1 on a failing
verdict and 2 on usage or validation errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .cm_kernel import cm_eval, lookup
from .exceptions import DomainError, ValidationError
from .matrix_io import load_matrix, load_vector
from .metrics import fisher_info, metric_eval, wyd_info
from .pullback import pairing_check
from .spectra import DensityMatrix, check_hermitian, check_tangent
from .verify import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    characterize_pair,
    contraction_test,
    loewner_test,
    lookup_h,
    opmono_matrix_search,
    resolve_pair,
    rv_index,
)
from .verify._verdict import jsonable
from .verify.regvar import default_sequence

SEED_ENV = "MONOMETRIC_SEED"


class UsageError(Exception):
    pass


def parse_dims(text: str) -> list[int]:
    """``"2..6"`` or ``"2,3,4"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            dims = list(range(int(lo), int(hi) + 1))
        else:
            dims = [int(d) for d in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}; use 2..6 or 2,3,4") from None
    if not dims or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}")
    return dims


def parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def parse_grid(text: str) -> np.ndarray:
    """``"1,2,3"``, ``"log:lo:hi:n"`` or ``"lin:lo:hi:n"``; returned ascending."""
    try:
        if text.startswith(("log:", "lin:")):
            kind, lo, hi, n = text.split(":")
            make = np.geomspace if kind == "log" else np.linspace
            g = make(float(lo), float(hi), int(n))
        else:
            g = np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
    if g.size == 0 or np.any(g <= 0):
        raise argparse.ArgumentTypeError(f"grid {text!r} must be non-empty and positive")
    return np.sort(g)


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def kernel_surface(f, xs, ys) -> list[tuple[float, float, float]]:
    """Rows ``(x, y, c_f(x, y))``, row-major with ``x`` and ``y`` ascending."""
    xs, ys = np.sort(np.asarray(xs, float)), np.sort(np.asarray(ys, float))
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    C = cm_eval(f, X, Y)
    return [(float(x), float(y), float(c)) for x, y, c in zip(X.ravel(), Y.ravel(), np.ravel(C))]


def write_kernel_surface(rows, path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y", "c"])
            for x, y, c in rows:
                w.writerow([repr(x), repr(y), repr(c)])
    except OSError as exc:
        raise UsageError(f"cannot write {path!r}: {exc.strerror}") from None


def _add_seed(p):
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")


def _add_jobs(p):
    p.add_argument("--jobs", type=int, default=1, help="worker threads for independent trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monometric", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"monometric {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--no-timing", action="store_true", help="omit timing from the report")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="report format")
    common.add_argument("--witness-csv", default=None, help="also dump verdict witnesses to this CSV")
    sub = parser.add_subparsers(dest="command", required=True)
    leaf = {"parents": [common]}

    metric = sub.add_parser("metric", help="monotone metric g_rho^f(A, B)")
    msub = metric.add_subparsers(dest="subcommand", required=True)
    ev = msub.add_parser("eval", **leaf)
    ev.add_argument("--f", required=True)
    ev.add_argument("--rho", required=True)
    ev.add_argument("--a", required=True)
    ev.add_argument("--b")

    wyd = sub.add_parser("wyd", **leaf, help="Wigner-Yanase-Dyson information I_p(rho, A)")
    wyd.add_argument("--p", type=float, required=True)
    wyd.add_argument("--rho", required=True)
    wyd.add_argument("--a", required=True)

    fisher = sub.add_parser("fisher", **leaf, help="classical Fisher information")
    fisher.add_argument("--rho", required=True)
    fisher.add_argument("--a", required=True)
    fisher.add_argument("--b")

    pairing = sub.add_parser("pairing", help="pairing identity residuals")
    psub = pairing.add_subparsers(dest="subcommand", required=True)
    chk = psub.add_parser("check", **leaf)
    chk.add_argument("--f", required=True)
    chk.add_argument("--pair", required=True)
    chk.add_argument("--dims", type=parse_dims, default=parse_dims("2..6"))
    chk.add_argument("--trials", type=int, default=20)
    _add_seed(chk)

    opmono = sub.add_parser("opmono", help="operator monotonicity tests")
    osub = opmono.add_subparsers(dest="subcommand", required=True)
    ot = osub.add_parser("test", **leaf)
    ot.add_argument("--f", required=True)
    ot.add_argument("--points", type=int, default=8)
    ot.add_argument("--sets", type=int, default=200)
    ot.add_argument("--dims", type=parse_dims, default=parse_dims("2..4"))
    ot.add_argument("--trials", type=int, default=1000)
    ot.add_argument("--tau-psd", type=float, default=1e-9)
    _add_seed(ot)
    _add_jobs(ot)

    channel = sub.add_parser("channel", help="contraction under CPTP maps")
    csub = channel.add_subparsers(dest="subcommand", required=True)
    cc = csub.add_parser("contract", **leaf)
    cc.add_argument("--f", required=True)
    cc.add_argument("--trials", type=int, default=1000)
    cc.add_argument("--dims", type=parse_dims, default=parse_dims("2..4"))
    cc.add_argument("--kraus-rank", type=int, default=None)
    cc.add_argument("--tau-rel", type=float, default=1e-9)
    _add_seed(cc)
    _add_jobs(cc)

    ch = sub.add_parser("characterize", **leaf, help="check whether a pair induces a paired monotone metric")
    ch.add_argument("--pair", required=True)
    ch.add_argument("--sets", type=int, default=200)
    _add_seed(ch)

    rv = sub.add_parser("rv-index", **leaf, help="index of regular variation")
    rv.add_argument("--h", required=True)
    rv.add_argument("--side", choices=("zero", "infinity"), default="zero")
    rv.add_argument("--t-grid", type=parse_floats, default=[0.1, 0.5, 2.0, 10.0])
    rv.add_argument("--x-first", type=float, default=None)
    rv.add_argument("--terms", type=int, default=20)
    rv.add_argument("--ratio", type=float, default=10.0)
    rv.add_argument("--plateau", type=int, default=5)

    ks = sub.add_parser("kernel-surface", **leaf, help="CSV of c_f(x, y) over a grid")
    ks.add_argument("--f", required=True)
    ks.add_argument("--grid", type=parse_grid, required=True)
    ks.add_argument("--grid-y", type=parse_grid, default=None)
    ks.add_argument("--out", required=True)
    return parser


def _overall(statuses) -> str:
    statuses = list(statuses)
    if FAIL in statuses:
        return FAIL
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return PASS


def _cmd_metric(args):
    f = lookup(args.f)
    rho = DensityMatrix(load_matrix(args.rho))
    A = check_tangent(load_matrix(args.a))
    B = None if args.b is None else check_tangent(load_matrix(args.b))
    return {"value": metric_eval(f, rho, A, B), "f": f.name, "dims": rho.dim}, "success", []


def _cmd_wyd(args):
    rho = DensityMatrix(load_matrix(args.rho))
    A = check_hermitian(load_matrix(args.a))
    return {"value": wyd_info(args.p, rho, A), "p": args.p, "dims": rho.dim}, "success", []


def _cmd_fisher(args):
    rho = load_vector(args.rho)
    A = load_vector(args.a)
    B = None if args.b is None else load_vector(args.b)
    return {"value": fisher_info(rho, A, B), "dims": int(rho.size)}, "success", []


def _cmd_pairing(args):
    report = pairing_check(lookup(args.f), resolve_pair(args.pair), args.dims, args.trials, args.seed)
    return report.as_dict(), PASS if report.passed else FAIL, []


def _cmd_opmono(args):
    f = lookup(args.f)
    lw = loewner_test(f, args.points, args.sets, args.seed, tau_psd=args.tau_psd, jobs=args.jobs)
    ms = opmono_matrix_search(f, args.dims, args.trials, args.seed, tau_psd=args.tau_psd, jobs=args.jobs)
    results = {"function": f.name, "claimed_opmono": f.claimed_opmono,
               "loewner": lw.as_dict(), "matrix_search": ms.as_dict()}
    return results, _overall([lw.status, ms.status]), [lw, ms]


def _cmd_channel(args):
    f = lookup(args.f)
    v = contraction_test(f, args.trials, args.dims, args.seed, args.kraus_rank,
                         tau_rel=args.tau_rel, jobs=args.jobs)
    return {"function": f.name, "contraction": v.as_dict()}, v.status, [v]


def _cmd_characterize(args):
    report = characterize_pair(resolve_pair(args.pair), loewner_sets=args.sets, seed=args.seed)
    return report.as_dict(), PASS if report.passed else FAIL, []


def _cmd_rv(args):
    h = lookup_h(args.h)
    xs = default_sequence(args.side, args.terms, args.ratio, args.x_first)
    est = rv_index(h, args.side, args.t_grid, xs, args.plateau)
    return {"h": args.h, "side": args.side, **est.as_dict()}, "success", []


def _cmd_surface(args):
    f = lookup(args.f)
    ys = args.grid if args.grid_y is None else args.grid_y
    rows = kernel_surface(f, args.grid, ys)
    write_kernel_surface(rows, args.out)
    return {"f": f.name, "out": args.out, "rows": len(rows), "grid_x": len(args.grid),
            "grid_y": len(ys)}, "success", []


COMMANDS = {
    "metric": _cmd_metric,
    "wyd": _cmd_wyd,
    "fisher": _cmd_fisher,
    "pairing": _cmd_pairing,
    "opmono": _cmd_opmono,
    "channel": _cmd_channel,
    "characterize": _cmd_characterize,
    "rv-index": _cmd_rv,
    "kernel-surface": _cmd_surface,
}


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    else:
        out.append((prefix, json.dumps(obj, sort_keys=True)))


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    rows = []
    _flatten("", report, rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    w.writerows(rows)
    return buf.getvalue()


def dump_witnesses(verdicts, path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["test", "status", "key", "value"])
            for v in verdicts:
                for key, value in sorted((v.witness or {}).items()):
                    w.writerow([v.test, v.status, key, json.dumps(jsonable(value), sort_keys=True)])
    except OSError as exc:
        raise UsageError(f"cannot write {path!r}: {exc.strerror}") from None


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "seed", None) is None:
            # echoed even by deterministic commands so every report is replayable
            args.seed = default_seed()
        start = time.perf_counter()
        results, verdict, verdicts = COMMANDS[args.command](args)
        elapsed = time.perf_counter() - start
        if args.witness_csv:
            dump_witnesses(verdicts, args.witness_csv)
    except (ValidationError, DomainError, UsageError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    config = {k: (v.tolist() if isinstance(v, np.ndarray) else v)
              for k, v in sorted(vars(args).items()) if k not in ("command", "subcommand")}
    report = {
        "command": " ".join(filter(None, [args.command, getattr(args, "subcommand", None)])),
        "config": config,
        "results": jsonable(results),
        "verdict": verdict,
        "version": __version__,
    }
    if not args.no_timing:
        report["timing"] = {"seconds": round(elapsed, 6)}
    stdout.write(render(report, args.format))
    if verdict == FAIL:
        print(f"{report['command']}: verdict fail", file=stderr)
        return 1
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
