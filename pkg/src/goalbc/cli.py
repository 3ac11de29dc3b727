"""Command-line interface: ``goalbc <command> ...``.

Exit codes: 0 success (SAT, is a BC, BCs found), 1 negative result
(UNSAT, not a BC, no BCs), 2 usage, input or resource error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

from . import buchi, oracle
from .buchi import ResourceLimitError, export_dot, translate
from .ltl import atoms_of
from .parser import LtlSyntaxError, parse
from .scene import SceneError, find_extra_goals, load_scene, validate_bc
from .semanticbc import semanticbc
from .syntacbc import syntacbc

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def fixture_names() -> list[str]:
    root = resources.files("goalbc") / "fixtures"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".scene"))


def read_scene(ref: str):
    """Load a scene from a path, falling back to a bundled fixture name."""
    path = Path(ref)
    if path.is_file():
        return load_scene(path.read_text())
    name = ref if ref.endswith(".scene") else ref + ".scene"
    if "/" not in ref and name in fixture_names():
        return load_scene((resources.files("goalbc") / "fixtures" / name).read_text())
    raise SceneError(f"no such scene file or fixture: {ref}")


def _add_globals(p: argparse.ArgumentParser, top: bool) -> None:
    # repeated on every subcommand so the flags work on either side of it
    default = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p.add_argument("--stable", action="store_true", default=default(False),
                   help="report elapsed_ms as 0 so output is byte-identical across runs")
    p.add_argument("--state-cap", type=int, metavar="N", default=default(None),
                   help="abort when an automaton exceeds N states")
    p.add_argument("--json", action="store_true", default=default(False),
                   help="machine-readable output where a command also has a text form")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="goalbc", description="Boundary conditions for LTL goal scenes.")
    _add_globals(parser, top=True)
    sub = parser.add_subparsers(
        dest="command",
        required=True,
        parser_class=_Parser,
        metavar="{sat,validate,syntacbc,semanticbc,translate}",
    )

    p = sub.add_parser("sat", help="decide satisfiability of a formula")
    p.add_argument("formula")

    p = sub.add_parser("validate", help="check whether a formula is a BC of a scene")
    p.add_argument("scene")
    p.add_argument("--bc", required=True, metavar="FORMULA")

    p = sub.add_parser("syntacbc", help="BCs by special-case substitution")
    p.add_argument("scene")
    p.add_argument("--no-reduce", action="store_true", help="skip the witness-based reduction")

    p = sub.add_parser("semanticbc", help="BCs from the synthesis product")
    p.add_argument("scene")
    p.add_argument("--fusible", metavar="A,B,...", help="override the scene's fusible atoms")
    p.add_argument("--all-fusible", action="store_true", help="let every atom be fused")
    p.add_argument("--dump-product", metavar="DIR", help="write each pair's product as DOT")
    p.add_argument("--max-runs-per-edge", type=int, default=1, metavar="N")

    p = sub.add_parser("translate", help="translate a formula to a Büchi automaton (DOT)")
    p.add_argument("formula")
    p.add_argument("--dot", metavar="PATH", help="write DOT here instead of stdout")

    # hidden helper for test scripts
    p = sub.add_parser("oracle")
    p.add_argument("formula")
    p.add_argument("--bound", type=int, default=6)

    for action in sub.choices.values():
        _add_globals(action, top=False)
    sub._choices_actions = [a for a in sub._choices_actions if a.dest != "oracle"]
    return parser


class _Clock:
    def __init__(self, stable: bool):
        self.stable = stable
        self.start = time.perf_counter()
        self.calls = oracle.STATS["sat_calls"]

    def stats(self, **extra) -> dict:
        out = {"sat_calls": oracle.STATS["sat_calls"] - self.calls}
        out["elapsed_ms"] = 0 if self.stable else round((time.perf_counter() - self.start) * 1000, 3)
        out.update(extra)
        return out


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def cmd_sat(args, clock) -> int:
    f = parse(args.formula)
    witness = oracle.check_sat(f)
    if args.json:
        _emit({
            "formula": f.text,
            "result": "SAT" if witness else "UNSAT",
            "witness": witness.to_json() if witness else None,
            "stats": clock.stats(),
        })
    elif witness is None:
        print("UNSAT")
    else:
        print(f"SAT {witness}")
    return EXIT_OK if witness is not None else EXIT_NEGATIVE


def cmd_validate(args, clock) -> int:
    s = read_scene(args.scene)
    f = parse(args.bc)
    verdict = validate_bc(s, f)
    _emit({
        "scene": s.name,
        "formula": f.text,
        "verdict": verdict.to_json(),
        "stats": clock.stats(),
    })
    return EXIT_OK if verdict.is_bc else EXIT_NEGATIVE


def cmd_syntacbc(args, clock) -> int:
    s = read_scene(args.scene)
    report = {"scene": s.name, "algorithm": "SyntacBC"}
    extra = find_extra_goals(s)
    info: dict = {}
    bcs = [] if extra else syntacbc(s, reduce=not args.no_reduce, stats=info)
    report["bcs"] = [b.to_json() for b in bcs]
    if extra:
        report["reason"] = f"extra goals: [{', '.join(extra)}]"
    report["stats"] = clock.stats(
        candidates=info.get("candidates", 0), rejected=info.get("rejected", 0)
    )
    _emit(report)
    return EXIT_OK if bcs else EXIT_NEGATIVE


def cmd_semanticbc(args, clock) -> int:
    s = read_scene(args.scene)
    if args.all_fusible:
        fusible = s.atoms
    elif args.fusible is not None:
        fusible = tuple(x.strip() for x in args.fusible.split(",") if x.strip())
        unknown = set(fusible) - set(s.atoms)
        if unknown:
            raise SceneError(f"--fusible names undeclared atoms {sorted(unknown)}")
    else:
        fusible = s.fusible
    if args.max_runs_per_edge < 1:
        raise UsageError("--max-runs-per-edge must be at least 1")
    info: dict = {}
    bcs, scopes = semanticbc(
        s, fusible, args.max_runs_per_edge, dump_dir=args.dump_product, stats=info
    )
    _emit({
        "scene": s.name,
        "algorithm": "SemanticBC",
        "fusible": sorted(fusible),
        "bcs": [b.to_json() for b in bcs],
        "scopes": [list(sc) for sc in scopes],
        "stats": clock.stats(bc_t=info["bc_t"], bc_w=info["bc_w"], pairs=info["pairs"]),
    })
    return EXIT_OK if bcs else EXIT_NEGATIVE


def cmd_translate(args, clock) -> int:
    f = parse(args.formula)
    dot = export_dot(translate(f), "buchi")
    if args.dot:
        Path(args.dot).write_text(dot)
    else:
        sys.stdout.write(dot)
    return EXIT_OK


def cmd_oracle(args, clock) -> int:
    f = parse(args.formula)
    w = oracle.bounded_sat_search(f, args.bound)
    if args.json:
        _emit({
            "formula": f.text,
            "atoms": sorted(atoms_of(f)),
            "bound": args.bound,
            "witness": w.to_json() if w else None,
        })
    else:
        print("NONE" if w is None else str(w))
    return EXIT_OK if w is not None else EXIT_NEGATIVE


COMMANDS = {
    "sat": cmd_sat,
    "validate": cmd_validate,
    "syntacbc": cmd_syntacbc,
    "semanticbc": cmd_semanticbc,
    "translate": cmd_translate,
    "oracle": cmd_oracle,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"goalbc: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    if args.state_cap is not None:
        if args.state_cap < 1:
            print("goalbc: error: --state-cap must be positive", file=sys.stderr)
            return EXIT_ERROR
        buchi.configure(state_cap=args.state_cap)
    try:
        return COMMANDS[args.command](args, _Clock(args.stable))
    except (LtlSyntaxError, SceneError, ResourceLimitError, UsageError, OSError) as e:
        print(f"goalbc: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        if args.state_cap is not None:
            buchi.configure(state_cap=buchi.DEFAULT_STATE_CAP)


if __name__ == "__main__":
    raise SystemExit(main())
