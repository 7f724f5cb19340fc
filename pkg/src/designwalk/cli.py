"""Command-line entry point.

Exit codes: 0 success, 1 computational failure (capacity, convergence,
degenerate Gram matrix, I/O), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from pathlib import Path

from . import __version__
from .circuits import TOPOLOGIES, EnsembleSpec, circuit_to_dict, sample_circuit
from .errors import CapacityError, ConvergenceError, DegenerateGramError, InvalidArgument
from .experiments import design_error, equilibration_experiment, frame_potential, haar_frame_potential
from .gap import GapReport, design_depth, nachtergaele_check, scaling_check, spectral_gap
from .io import RunRecord, emit, manifest_entry, now_iso, record_path
from .parallel import default_threads


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    text = str(text)
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="designwalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt="json"):
        p.add_argument("--seed", type=int, help="64-bit seed (default: drawn from entropy and recorded)")
        p.add_argument("--out", type=Path, help="data file; a <out>.run.json record is written beside it")
        p.add_argument("--format", choices=("csv", "json"), default=fmt)
        p.add_argument("--threads", type=int, default=None, help="worker processes for Monte Carlo")
        p.add_argument("--config", type=Path, help="JSON file of default parameters")
        return p

    p = common(sub.add_parser("gap", help="spectral gap of H_{n,k}"))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--solver", choices=("auto", "dense", "iterative"), default="auto")

    p = common(sub.add_parser("depth", help="design depth ceil(ln(1/eps)/delta)"))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--eps", type=float)

    p = common(sub.add_parser("design-error", help="||G_nu^t - G_Haar|| by dense powers"))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--t", type=_int_list, help="comma list or lo..hi")

    p = common(sub.add_parser("frame-potential", help="Monte-Carlo frame potential"))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--topology", choices=TOPOLOGIES, default="line-nn")

    p = common(sub.add_parser("equilibrate", help="equilibration under low-complexity measurements"), fmt="csv")
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=_int_list)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--s", type=int, default=20, help="gate count of the measurement circuit")
    p.add_argument("--target", default="1", help="comma list of target qubits, or 'random'")

    p = common(sub.add_parser("nachtergaele", help="block-gap inequality check"), fmt="csv")
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n-list", type=_int_list)
    p.add_argument("--log-base", type=float, default=2.0)

    p = common(sub.add_parser("scaling", help="n * delta(n, k) consistency table"), fmt="csv")
    p.add_argument("--k", type=int)
    p.add_argument("--n-range", type=_int_list, help="lo..hi or comma list")

    p = common(sub.add_parser("sample-circuit", help="draw one circuit as JSON"))
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--topology", choices=TOPOLOGIES, default="line-nn")
    return parser


REQUIRED = {
    "gap": ("n", "k"),
    "depth": ("n", "k", "eps"),
    "design-error": ("n", "k", "t"),
    "frame-potential": ("n", "k", "t"),
    "equilibrate": ("n", "t"),
    "nachtergaele": ("k",),
    "scaling": ("k", "n_range"),
    "sample-circuit": ("n", "t"),
}


def _apply_config(args, parser):
    if args.config is None:
        return
    try:
        cfg = json.loads(args.config.read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    for key, value in cfg.items():
        key = key.replace("-", "_")
        if not hasattr(args, key):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if getattr(args, key) is None or getattr(args, key) == parser.get_default(key):
            if key in ("t", "n_list", "n_range") and args.command != "frame-potential" and args.command != "sample-circuit":
                value = _int_list(value) if isinstance(value, str) else list(value)
            setattr(args, key, value)


def _validate(args):
    missing = [f"--{k.replace('_', '-')}" for k in REQUIRED[args.command] if getattr(args, k, None) is None]
    if missing:
        raise UsageError(f"{args.command}: missing required {', '.join(missing)}")
    for key in ("n", "k", "samples", "trials"):
        v = getattr(args, key, None)
        if v is not None and v < 1:
            raise UsageError(f"--{key} must be positive")
    if getattr(args, "n", None) is not None and args.n < 2:
        raise UsageError("--n must be >= 2")
    if args.command == "depth" and not 0 < args.eps < 1:
        raise UsageError("--eps must lie in (0, 1)")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    if args.command == "sample-circuit" and args.format != "json":
        raise UsageError("sample-circuit only emits JSON")


def _run_command(args):
    """Returns ``(payload, columns)``; ``columns`` is None for JSON-only payloads."""
    cmd = args.command
    if cmd == "gap":
        rep = spectral_gap(args.n, args.k, tol=args.tol, solver=args.solver, seed=args.seed)
        if args.format == "csv":
            return [rep.row()], GapReport.COLUMNS
        return dict(rep.row(), iterations=rep.iterations), None
    if cmd == "depth":
        d = design_depth(args.n, args.k, args.eps, seed=args.seed)
        row = {"n": d.n, "k": d.k, "eps": d.eps, "delta_walk": d.delta, "t": d.t, "seed": args.seed}
        return ([row], tuple(row)) if args.format == "csv" else (row, None)
    if cmd == "design-error":
        table = design_error(args.n, args.k, args.t)
        rows = [{"n": args.n, "k": args.k, "t": r.t, "error": r.error, "predicted": r.predicted,
                 "delta_walk": table.delta} for r in table.rows]
        if args.format == "csv":
            return rows, ("n", "k", "t", "error", "predicted", "delta_walk")
        return {"n": args.n, "k": args.k, "delta_walk": table.delta, "seed": args.seed, "rows": rows}, None
    if cmd == "frame-potential":
        spec = EnsembleSpec(args.n, args.t, args.topology, args.seed)
        fp = frame_potential(spec, args.k, args.samples, args.threads)
        row = {"n": args.n, "k": args.k, "t": args.t, "topology": args.topology, "samples": args.samples,
               "seed": args.seed, "value": fp.value, "std_error": fp.std_error,
               "haar_value": haar_frame_potential(args.n, args.k)}
        return ([row], tuple(row)) if args.format == "csv" else (row, None)
    if cmd == "equilibrate":
        target = "random" if args.target == "random" else tuple(_int_list(args.target))
        res = equilibration_experiment(args.n, args.t, args.trials, s=args.s, seed=args.seed, target=target)
        rows = [s.row() for s in res.samples]
        if args.format == "csv":
            return rows, ("t", "trial", "deviation", "trace_term", "seed")
        return {"n": args.n, "s": args.s, "seed": args.seed, "summary": res.summary,
                "baseline": res.baseline, "samples": rows}, None
    if cmd == "nachtergaele":
        rep = nachtergaele_check(args.k, args.m, args.n_list, log_base=args.log_base, seed=args.seed)
        rows = [{"k": rep.k, "m": rep.m, "n": r.n, "gap_n": r.gap_n, "gap_m": r.gap_m, "bound": r.bound,
                 "ratio": r.ratio, "holds": r.holds} for r in rep.rows]
        if args.format == "csv":
            return rows, ("k", "m", "n", "gap_n", "gap_m", "bound", "ratio", "holds")
        return {"k": rep.k, "m": rep.m, "m_default": rep.m_default, "reduced": rep.reduced,
                "warning": rep.warning, "all_hold": rep.all_hold, "rows": rows}, None
    if cmd == "scaling":
        table = scaling_check(args.k, args.n_range, seed=args.seed)
        rows = [{"n": n, "k": args.k, "delta_walk": d, "n_delta": nd} for n, d, nd in table.rows]
        if args.format == "csv":
            return rows, ("n", "k", "delta_walk", "n_delta")
        return {"k": args.k, "median": table.median, "consistent": table.consistent, "rows": rows}, None
    if cmd == "sample-circuit":
        return circuit_to_dict(sample_circuit(EnsembleSpec(args.n, args.t, args.topology, args.seed))), None
    raise UsageError(f"unknown command {cmd}")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config(args, parser)
        if args.seed is None:
            args.seed = secrets.randbits(63)
        _validate(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"designwalk: error: {exc}", file=sys.stderr)
        return 2
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()}
    started = now_iso()
    try:
        if args.threads is None:
            args.threads = default_threads()
        payload, columns = _run_command(args)
        text = emit(payload, args.format, args.out, columns)
    except InvalidArgument as exc:
        print(f"designwalk: error: {exc}", file=sys.stderr)
        return 2
    except (CapacityError, ConvergenceError, DegenerateGramError, OSError) as exc:
        print(f"designwalk: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out is None:
        sys.stdout.write(text)
        return 0
    record = RunRecord(config, started=started, finished=now_iso(),
                       outputs=[manifest_entry(args.out, args.format)])
    try:
        emit(record.as_dict(), "json", record_path(args.out))
    except OSError as exc:
        print(f"designwalk: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
