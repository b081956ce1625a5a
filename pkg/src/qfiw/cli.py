"""Command-line interface.

Every run first echoes its resolved configuration as ``# key=value`` lines,
then prints data. Errors go to stderr as one line ``error: <category>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .criteria import MODES, BoundSpec, normalize_criterion, prod_bound, sep_bound, verdict
from .errors import QfiwError
from .linalg import BOUND_TOL, EIGENVALUE_ZERO, HERMITIAN_TOL, dense_cap
from .observables import CollectiveObservable, observable_from_json
from .oracle import selftest
from .qfi import qfi, variance
from .states import family_state, load_state, save_state
from .sweep import dicke_threshold, fmt, ghz_threshold, scan_grid, table_csv, table_one

DEFAULT_AXIS = {"ghz-mix": "z", "dicke-noise": "x"}
DEFAULT_CRITERION = {"ghz-mix": "separability", "dicke-noise": "producibility"}


class UsageError(QfiwError):
    category = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _echo(out, **config) -> None:
    config.setdefault("tolerances", f"hermitian={HERMITIAN_TOL:g},eig_zero={EIGENVALUE_ZERO:g},bound={BOUND_TOL:g}")
    config.setdefault("dense_cap", dense_cap())
    for key, value in config.items():
        out.write(f"# {key}={value}\n")


def _add_state_args(p) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", help="state JSON file (pure, dense, structured or family spec)")
    src.add_argument("--family", choices=sorted(DEFAULT_AXIS), help="built-in state family")
    p.add_argument("--n", type=int, help="number of qubits for --family")
    p.add_argument("--p", type=float, help="family parameter p")
    p.add_argument("--q", type=float, default=0.0, help="family parameter q (ghz-mix only)")
    obs = p.add_mutually_exclusive_group()
    obs.add_argument("--observable", help="observable JSON file")
    obs.add_argument("--pauli", choices=("x", "y", "z"), help="uniform Pauli direction on every site")


def _resolve_state(args):
    if args.state:
        state = load_state(args.state)
        label = f"file:{args.state}"
    else:
        if args.n is None or args.p is None:
            raise UsageError("--family needs --n and --p")
        state = family_state(args.family, args.n, args.p, args.q)
        label = f"{args.family}(n={args.n},p={args.p:g}" + (f",q={args.q:g})" if args.family == "ghz-mix" else ")")
    if args.observable:
        obs = observable_from_json(json.loads(Path(args.observable).read_text()))
        obs_label = f"file:{args.observable}"
    else:
        axis = args.pauli or (DEFAULT_AXIS[args.family] if args.family else "z")
        obs = CollectiveObservable.uniform_pauli(len(state.dims), axis)
        obs_label = f"sum sigma_{axis}"
    return state, label, obs, obs_label


def cmd_qfi(args, out) -> int:
    state, label, obs, obs_label = _resolve_state(args)
    res = qfi(state, obs)
    _echo(out, command="qfi", state=label, observable=obs_label, method=res.method)
    if args.emit_state:
        save_state(state, args.emit_state)
    out.write(f"F={fmt(res.value)}\n")
    out.write(f"V={fmt(variance(state, obs))}\n")
    return 0


def cmd_bound(args, out) -> int:
    criterion = normalize_criterion(args.criterion)
    fn = sep_bound if criterion == "separability" else prod_bound
    value = fn(args.n, args.k, args.mode)
    _echo(out, command="bound", n=args.n, k=args.k, criterion=criterion, mode=args.mode)
    out.write(f"{fmt(value)}\n")
    return 0


def cmd_detect(args, out) -> int:
    state, label, obs, obs_label = _resolve_state(args)
    criterion = args.criterion or (DEFAULT_CRITERION[args.family] if args.family else "separability")
    spec = BoundSpec(len(state.dims), args.k, criterion, args.mode)
    res = qfi(state, obs)
    v = verdict(res, spec)
    _echo(out, command="detect", state=label, observable=obs_label, method=res.method,
          k=args.k, criterion=spec.criterion, mode=args.mode)
    out.write(v.describe() + "\n")
    return 0


def cmd_sweep(args, out) -> int:
    spec = BoundSpec(args.n, args.k, args.criterion, args.mode)
    obs = CollectiveObservable.uniform_pauli(args.n, args.pauli)
    grid = scan_grid(args.n, spec, args.grid, observable=obs, workers=args.workers)
    _echo(out, command="sweep", family=args.family, n=args.n, k=args.k, criterion=spec.criterion,
          mode=args.mode, observable=f"sum sigma_{args.pauli}", grid=args.grid)
    valid = [r for r in grid.rows if r.detected is not None]
    detected = sum(r.detected for r in valid)
    out.write(f"bound={fmt(grid.bound)}\n")
    out.write(f"points={len(grid.rows)} valid={len(valid)} detected={detected}\n")
    if args.out:
        Path(args.out).write_text(grid.to_csv())
        out.write(f"csv={args.out}\n")
    return 0


def cmd_threshold(args, out) -> int:
    criterion = args.criterion or DEFAULT_CRITERION[args.family]
    axis = args.pauli or DEFAULT_AXIS[args.family]
    if args.family == "dicke-noise":
        if normalize_criterion(criterion) != "producibility":
            raise UsageError("dicke-noise thresholds use the producibility criterion")
        res = dicke_threshold(args.n, args.k, args.mode, axis)
    else:
        res = ghz_threshold(args.n, args.k, args.q, criterion, args.mode, axis)
    _echo(out, command="threshold", family=args.family, n=args.n, k=args.k, criterion=res.criterion,
          mode=args.mode, observable=f"sum sigma_{axis}", **({"q": args.q} if args.family == "ghz-mix" else {}))
    out.write(f"bound={fmt(res.bound)}\n")
    out.write(f"p_star={fmt(res.p_star)}\n")
    out.write(f"iterations={res.iterations}\n")
    out.write(f"residual={res.residual:.3e}\n")
    return 0


def cmd_table1(args, out) -> int:
    rows = table_one(args.kmax, args.n, args.mode)
    _echo(out, command="table1", family="dicke-noise", n=args.n, criterion="producibility",
          mode=args.mode, observable="sum sigma_x")
    text = table_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    out.write(text)
    return 0


def cmd_oracle(args, out) -> int:
    _echo(out, command="oracle selftest", count=args.count, seed=args.seed)
    reports = selftest(args.count, args.seed)
    for r in reports:
        status = "PASS" if r.ok else "FAIL"
        out.write(f"{status} {r.name} (checked={r.count}, worst={r.worst:.3e})\n")
        for line in r.failures:
            out.write(f"    {line}\n")
    return 0 if all(r.ok for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qfiw", description="QFI-based multipartite entanglement detection")
    parser.add_argument("--version", action="version", version=f"qfiw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("qfi", help="quantum Fisher information and variance of a state")
    _add_state_args(p)
    p.add_argument("--emit-state", help="also write the resolved state to this JSON file")
    p.set_defaults(func=cmd_qfi)

    p = sub.add_parser("bound", help="closed-form QFI bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--criterion", choices=("sep", "prod", "separability", "producibility"), required=True)
    p.add_argument("--mode", choices=MODES, default="paper")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("detect", help="compare a state's QFI with a bound")
    _add_state_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--criterion", choices=("sep", "prod", "separability", "producibility"))
    p.add_argument("--mode", choices=MODES, default="paper")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("sweep", help="(p, q) grid scan of the GHZ mixture")
    p.add_argument("family", choices=("ghz-mix",))
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--grid", type=int, default=200, help="points per axis")
    p.add_argument("--criterion", choices=("sep", "prod", "separability", "producibility"), default="sep")
    p.add_argument("--mode", choices=MODES, default="paper")
    p.add_argument("--pauli", choices=("x", "y", "z"), default="z")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write the grid CSV here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("threshold", help="detection threshold along a one-parameter family")
    p.add_argument("family", choices=sorted(DEFAULT_AXIS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=float, default=0.0, help="fixed q for ghz-mix")
    p.add_argument("--criterion", choices=("sep", "prod", "separability", "producibility"))
    p.add_argument("--mode", choices=MODES, default="paper")
    p.add_argument("--pauli", choices=("x", "y", "z"))
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("table1", help="Dicke-noise thresholds next to the published p_k row")
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--mode", choices=MODES, default="paper")
    p.add_argument("--out", help="also write the CSV here")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("oracle", help="brute-force oracle checks")
    p.add_argument("action", choices=("selftest",))
    p.add_argument("--count", type=int, default=50, help="random instances for the dense check")
    p.add_argument("--seed", type=int, default=2024)
    p.set_defaults(func=cmd_oracle)
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except QfiwError as exc:
        sys.stderr.write(f"error: {exc.category}: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: io: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())
