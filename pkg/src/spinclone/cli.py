"""Command line interface: ``spinclone <command> ...``.

Exit status is 0 on success, 1 when a computation or check fails and 2 on
usage errors.  ``SPINCLONE_WORKERS`` sets the default process count for sweeps.
"""

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass

import numpy as np

from spinclone import channels, irreps, optimizer, verification
from spinclone.fitting import FidelityCurve, fit_rational
from spinclone.spin_states import random_points
from spinclone.symmetric_space import symmetric_basis

log = logging.getLogger("spinclone")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CSV_HEADER = ("d", "f_coherent", "f_universal")


@dataclass
class RunConfig:
    command: str
    dim: int = None
    dim_min: int = 2
    dim_max: int = None
    fmt: str = "text"
    out: str = None
    seed: int = 0
    tol: float = 1e-8
    workers: int = None


def dimension(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 2:
        raise argparse.ArgumentTypeError(f"dimension must be >= 2, got {value}")
    return value


def positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"tolerance must be > 0, got {text}")
    return value


def _emit(text, out=None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- serialisation


def fidelity_record(d):
    sol = optimizer.max_fidelity(d)
    return {
        "d": d,
        "f_coherent": sol.fidelity,
        "f_universal": optimizer.universal_fidelity(d),
        "lambda_max": sol.lambda_max,
        "multiplicity": sol.multiplicity,
    }


def rows_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for d, fc, fu in rows:
        writer.writerow([d, f"{fc:.17g}", f"{fu:.17g}"])
    return buf.getvalue()


def rows_from_csv(text):
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected header {header}")
    return [(int(d), float(fc), float(fu)) for d, fc, fu in reader]


def transform_record(iso, tol=1e-12):
    basis = symmetric_basis(iso.dim)
    terms = {}
    for n in range(iso.dim):
        entries = []
        for s, pair in enumerate(basis.pairs):
            for a in range(iso.ancilla_dim):
                c = iso.coeffs[n, s, a]
                if abs(c) > tol:
                    entries.append(
                        {"pair": list(pair), "ancilla": a, "re": float(c.real), "im": float(c.imag)}
                    )
        terms[str(n)] = entries
    return {
        "d": iso.dim,
        "ancilla_dim": iso.ancilla_dim,
        "isometry_residual": iso.isometry_residual(),
        "fidelity": iso.fidelity(),
        "terms": terms,
    }


def _format_amp(re, im):
    return f"{re:+.9f}" if abs(im) < 1e-12 else f"({re:+.9f}{im:+.9f}j)"


# ---------------------------------------------------------------- commands


def cmd_fidelity(cfg):
    rec = fidelity_record(cfg.dim)
    if cfg.fmt == "json":
        _emit(json.dumps(rec) + "\n", cfg.out)
    else:
        _emit(
            f"d = {rec['d']}\n"
            f"F_coherent  = {rec['f_coherent']:.12f}\n"
            f"F_universal = {rec['f_universal']:.12f}\n"
            f"lambda_max  = {rec['lambda_max']:.12f}\n"
            f"multiplicity = {rec['multiplicity']}\n",
            cfg.out,
        )
    return EXIT_OK


def cmd_sweep(cfg):
    if cfg.dim_min > cfg.dim_max:
        raise UsageError(f"--min {cfg.dim_min} exceeds --max {cfg.dim_max}")
    rows = optimizer.sweep(cfg.dim_min, cfg.dim_max, workers=cfg.workers)
    if cfg.fmt == "json":
        text = json.dumps([dict(zip(CSV_HEADER, r)) for r in rows]) + "\n"
    else:
        text = rows_to_csv(rows)
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_fit(cfg):
    rows = optimizer.sweep(cfg.dim_min, cfg.dim_max, workers=cfg.workers)
    fit = fit_rational(FidelityCurve.from_sweep(rows, d_min=cfg.dim_min))
    rec = {
        "d_min": cfg.dim_min,
        "d_max": cfg.dim_max,
        "alpha": fit.alpha,
        "beta": fit.beta,
        "gamma": fit.gamma,
        "rms_residual": fit.rms_residual,
        "converged": fit.converged,
        "asymptote": fit.asymptote,
    }
    if cfg.fmt == "json":
        _emit(json.dumps(rec) + "\n", cfg.out)
    else:
        _emit("".join(f"{k} = {v}\n" for k, v in rec.items()), cfg.out)
    return EXIT_OK if fit.converged else EXIT_FAIL


def cmd_transform(cfg):
    iso = optimizer.build_isometry(optimizer.max_fidelity(cfg.dim))
    rec = transform_record(iso)
    if cfg.fmt == "json":
        _emit(json.dumps(rec) + "\n", cfg.out)
        return EXIT_OK
    lines = [
        f"d = {rec['d']}, ancilla dimension = {rec['ancilla_dim']}, "
        f"fidelity = {rec['fidelity']:.12f}, isometry residual = {rec['isometry_residual']:.3e}"
    ]
    for n, entries in rec["terms"].items():
        parts = [
            f"{_format_amp(e['re'], e['im'])}|{e['pair'][0]},{e['pair'][1]}>|A{e['ancilla']}>"
            for e in entries
        ]
        lines.append(f"|{n}>|0>|A0> -> " + " ".join(parts))
    _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_choi(cfg):
    channels.check_dense(cfg.dim)
    iso = optimizer.build_isometry(optimizer.max_fidelity(cfg.dim))
    choi = channels.choi_from_isometry(iso)
    samples = random_points(10, np.random.default_rng(cfg.seed))
    report = channels.choi_report(choi, samples)
    rec = report.to_dict()
    rec["conjecture_holds"] = channels.conjecture_verdict(report.eigenvalues, cfg.dim, cfg.tol)
    block = irreps.block_structure(choi, irreps.decompose_triple(cfg.dim))
    rec["support"] = block.support
    rec["block_leakage"] = block.leakage
    if cfg.fmt == "json":
        _emit(json.dumps(rec) + "\n", cfg.out)
    else:
        spec = np.asarray(report.eigenvalues)
        top = ", ".join(f"{x:.10f}" for x in spec[: cfg.dim + 1])
        _emit(
            f"d = {cfg.dim}, Choi operator {cfg.dim**3}x{cfg.dim**3}\n"
            f"leading eigenvalues: {top}, ...\n"
            f"trace residual       = {report.trace_residual:.3e}\n"
            f"covariance residual  = {report.covariance_residual:.3e}\n"
            f"permutation residual = {report.permutation_residual:.3e}\n"
            f"support: {', '.join(block.support)} (leakage {block.leakage:.3e})\n"
            f"conjecture (d unit eigenvalues, rest zero): "
            f"{'holds' if rec['conjecture_holds'] else 'FAILS'}\n",
            cfg.out,
        )
    return EXIT_OK


def cmd_decompose(cfg, amplitudes=False):
    dec = irreps.decompose_triple(cfg.dim)
    if cfg.fmt == "json":
        _emit(dec.to_json(amplitudes) + "\n", cfg.out)
    else:
        _emit(dec.to_text(amplitudes) + "\n", cfg.out)
    return EXIT_OK


def cmd_verify(cfg, only=None):
    ctx = verification.Context(seed=cfg.seed, workers=cfg.workers)
    as_json = cfg.fmt == "json"
    progress = None if as_json else (lambda r: print(r.line(), flush=True))
    results = verification.run_checks(only=only, ctx=ctx, progress=progress)
    passed = all(r.passed for r in results)
    if as_json:
        _emit(json.dumps({"passed": passed, "checks": [r.to_dict() for r in results]}) + "\n", cfg.out)
    else:
        failed = [f"{r.number}. {r.name}" for r in results if not r.passed]
        print(f"{len(results) - len(failed)}/{len(results)} checks passed"
              + (f"; failed: {'; '.join(failed)}" if failed else ""))
    return EXIT_OK if passed else EXIT_FAIL


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spinclone", description="Optimal 1->2 cloning of spin coherent states."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmts=("text", "json")):
        p.add_argument("--format", dest="fmt", choices=fmts, default=fmts[0])
        p.add_argument("--out", help="write output to this file instead of stdout")

    p = sub.add_parser("fidelity", help="optimal coherent vs universal fidelity for one d")
    p.add_argument("--dim", type=dimension, required=True)
    common(p)

    p = sub.add_parser("sweep", help="fidelity table over a range of d (CSV)")
    p.add_argument("--max", dest="dim_max", type=dimension, required=True)
    p.add_argument("--min", dest="dim_min", type=dimension, default=2)
    p.add_argument("--workers", type=int, help="process count (default $SPINCLONE_WORKERS or 1)")
    common(p, ("csv", "json"))

    p = sub.add_parser("fit", help="rational fit of the coherent fidelity curve")
    p.add_argument("--max", dest="dim_max", type=dimension, default=16)
    p.add_argument("--min", dest="dim_min", type=dimension, default=3)
    p.add_argument("--workers", type=int)
    common(p)

    p = sub.add_parser("transform", help="explicit optimal cloning isometry")
    p.add_argument("--dim", type=dimension, required=True)
    common(p)

    p = sub.add_parser("choi", help="Choi operator spectrum and symmetry residuals")
    p.add_argument("--dim", type=dimension, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=positive_float, default=1e-8,
                   help="tolerance for the unit/zero eigenvalue verdict")
    common(p, ("json", "text"))

    p = sub.add_parser("decompose", help="invariant subspaces of R (x) R (x) R*")
    p.add_argument("--dim", type=dimension, required=True)
    p.add_argument("--amplitudes", action="store_true", help="include basis amplitudes")
    common(p)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--json", action="store_true", help="structured output")
    p.add_argument("--only", help="comma-separated check numbers")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    cfg = RunConfig(
        command=args.command,
        dim=getattr(args, "dim", None),
        dim_min=getattr(args, "dim_min", 2),
        dim_max=getattr(args, "dim_max", None),
        fmt="json" if getattr(args, "json", False) else getattr(args, "fmt", "text"),
        out=getattr(args, "out", None),
        seed=getattr(args, "seed", 0),
        tol=getattr(args, "tol", 1e-8),
        workers=getattr(args, "workers", None),
    )
    try:
        if args.command == "decompose":
            return cmd_decompose(cfg, amplitudes=args.amplitudes)
        if args.command == "verify":
            only = None
            if args.only:
                try:
                    only = {int(x) for x in args.only.split(",")}
                except ValueError:
                    parser.error(f"--only expects comma-separated integers, got {args.only!r}")
            return cmd_verify(cfg, only)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"spinclone: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, MemoryError, ValueError, RuntimeError) as exc:
        print(f"spinclone: {args.command} failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


COMMANDS = {
    "fidelity": cmd_fidelity,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "transform": cmd_transform,
    "choi": cmd_choi,
}


if __name__ == "__main__":
    sys.exit(main())
