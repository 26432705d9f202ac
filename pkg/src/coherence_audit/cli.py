"""Command-line entry point: ``coherence-audit {qfi,measure,audit,counterexample,search,replay}``.

Exit codes: 0 success / no violations, 2 violations found, 1 usage or data error.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import audit as au
from .errors import CoherenceError
from .linalg import observable, validate_density, validate_pure
from .measures import MEASURE_NAMES, equal_spacing_hamiltonian, make_measure, qfi_pure, qfi_spectral
from .serialize import dumps, load_path, matrix_from_json, vector_from_json

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {text}")
    return v


def _pos_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return v


def _tol(text):
    v = float(text)
    if not np.isfinite(v) or v < 0:
        raise argparse.ArgumentTypeError(f"tolerance must be a finite number >= 0, got {text}")
    return v


def _common(p):
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--tol", type=_tol, default=au.TOL)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--out", metavar="PATH", help="write JSON here instead of stdout")


def _hamiltonian_flags(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--hamiltonian", metavar="PATH", help="matrix JSON")
    g.add_argument("--equal-spacing", type=_pos_int, metavar="N", help="use diag(0, 1, ..., N)")


def build_parser():
    parser = _Parser(prog="coherence-audit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("qfi", help="quantum Fisher information of a state")
    p.add_argument("state", help="vector JSON (pure) or matrix JSON (density)")
    _hamiltonian_flags(p)
    _common(p)

    p = sub.add_parser("measure", help="evaluate a registered coherence measure")
    p.add_argument("state")
    p.add_argument("--measure", required=True, choices=MEASURE_NAMES)
    _hamiltonian_flags(p, required=False)
    _common(p)

    p = sub.add_parser("audit", help="randomised axiom audit")
    p.add_argument("--measure", required=True)
    p.add_argument("--axiom", default="all")
    p.add_argument("--dim", type=_pos_int, required=True)
    p.add_argument("--trials", type=_pos_int, default=1000)
    _common(p)

    p = sub.add_parser("counterexample", help="QFI increase under a level swap")
    p.add_argument("--n", type=int, required=True, dest="n_max")
    _common(p)

    p = sub.add_parser("search", help="maximise the increase over incoherent unitaries")
    p.add_argument("state")
    _hamiltonian_flags(p, required=False)
    p.add_argument("--measure", default="qfi")
    strat = p.add_mutually_exclusive_group()
    strat.add_argument("--exhaustive", action="store_true")
    strat.add_argument("--random", action="store_true")
    p.add_argument("--samples", type=_pos_int, default=1000)
    _common(p)

    p = sub.add_parser("replay", help="re-evaluate a stored witness")
    p.add_argument("witness")
    _hamiltonian_flags(p, required=False)
    _common(p)
    return parser


def _emit(args, doc, table_lines):
    text = dumps(doc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    if args.format == "table":
        print("\n".join(table_lines))
    elif not args.out:
        sys.stdout.write(text)


def _read_state(path):
    doc = load_path(path)
    if isinstance(doc, dict) and "amplitudes" in doc:
        return validate_pure(vector_from_json(doc))
    return validate_density(matrix_from_json(doc))


def _as_density(state):
    return state.density() if hasattr(state, "amplitudes") else state


def _read_hamiltonian(args):
    if getattr(args, "equal_spacing", None) is not None:
        return equal_spacing_hamiltonian(args.equal_spacing)
    if getattr(args, "hamiltonian", None):
        return observable(matrix_from_json(load_path(args.hamiltonian)))
    return None


def _measure(name, H, dim):
    if name == "qfi" and H is None:
        raise UsageError("measure qfi needs --hamiltonian or --equal-spacing")
    return make_measure(name, H, dim=dim)


def cmd_qfi(args):
    state = _read_state(args.state)
    H = _read_hamiltonian(args)
    if hasattr(state, "amplitudes"):
        value, method = qfi_pure(state, H), "pure"
    else:
        value, method = qfi_spectral(state, H), "spectral"
    _emit(args, {"qfi": value, "method": method, "dim": state.dim},
          [f"QFI ({method}): {value!r}"])
    return EXIT_OK


def cmd_measure(args):
    state = _as_density(_read_state(args.state))
    m = _measure(args.measure, _read_hamiltonian(args), state.dim)
    value = m(state)
    _emit(args, {"measure": m.name, "value": value, "dim": state.dim},
          [f"{m.name}: {value!r}"])
    return EXIT_OK


def cmd_audit(args):
    if args.dim < 2:
        raise UsageError("--dim must be >= 2")
    axioms = au.AXIOMS if args.axiom.lower() == "all" else (args.axiom,)
    measure = make_measure(args.measure, None, dim=args.dim)
    reports = [au.run_audit(measure, a, args.dim, args.trials, args.seed, args.tol)
               for a in axioms]
    doc = reports[0].to_json() if len(reports) == 1 else [r.to_json() for r in reports]
    lines = [f"{'measure':8} {'axiom':5} {'trials':>7} {'viol':>6} {'worst delta':>14}"]
    for r in reports:
        worst = "-" if r.worst_witness is None else f"{r.worst_witness.delta:.6g}"
        lines.append(f"{r.measure_name:8} {r.axiom:5} {r.n_trials:7d} {r.n_violations:6d} {worst:>14}")
    _emit(args, doc, lines)
    return EXIT_VIOLATION if any(r.n_violations for r in reports) else EXIT_OK


def cmd_counterexample(args):
    if args.n_max < 2:
        raise UsageError(f"--n must be >= 2: the QFI increase needs N > 1 (got {args.n_max})")
    w = au.counterexample(args.n_max, args.tol)
    summary = (f"N={args.n_max}: QFI before {w.value_before:.12g}, "
               f"after {w.value_after:.12g}, delta {w.delta:.12g}")
    _emit(args, w.to_json(), [summary])
    if args.format == "json":
        print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_search(args):
    rho = _as_density(_read_state(args.state))
    H = _read_hamiltonian(args)
    measure = _measure(args.measure, H, rho.dim)
    strategy = "random" if args.random else "exhaustive"
    try:
        result = au.search_max_violation(rho, H, measure, strategy, seed=args.seed,
                                         n_samples=args.samples, tol=args.tol)
    except au.DimensionTooLargeForExhaustive as exc:
        raise UsageError(f"{exc}; hint: pass --random") from exc
    if isinstance(result, au.NoViolationFound):
        _emit(args, result.to_json(),
              [f"NoViolationFound: best delta {result.best_delta:.6g} over "
               f"{result.n_candidates} candidates"])
        return EXIT_OK
    perm = au.permutation_of(result.channel)
    lines = [f"violation: before {result.value_before:.12g}, after {result.value_after:.12g}, "
             f"delta {result.delta:.12g}"]
    if perm is not None:
        lines.append(f"permutation: {list(perm)}")
    _emit(args, result.to_json(), lines)
    return EXIT_VIOLATION


def cmd_replay(args):
    w = au.ViolationWitness.from_json(load_path(args.witness))
    H = _read_hamiltonian(args)
    measure = make_measure(w.measure_name, H, dim=w.input_state.dim)
    before, after = au.replay(w, measure)
    ok = abs(before - w.value_before) <= 1e-9 and abs(after - w.value_after) <= 1e-9
    _emit(args, {"value_before": before, "value_after": after, "reproduced": ok},
          [f"before {before!r} after {after!r} reproduced={ok}"])
    return EXIT_OK if ok else EXIT_ERROR


COMMANDS = {"qfi": cmd_qfi, "measure": cmd_measure, "audit": cmd_audit,
            "counterexample": cmd_counterexample, "search": cmd_search, "replay": cmd_replay}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (CoherenceError, UsageError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
