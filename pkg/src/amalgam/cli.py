"""Command-line entry point: ``amalgam <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

from .errors import AmalgamError, CorruptReport
from .report import EXIT_CODES, PropertyReport, canonical_json, replay_report

EXIT_INPUT = 1


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _diagram(path):
    from .diagrams import parse_diagram

    return parse_diagram(_read(path))


def _group(path):
    from .groups import read_group

    return read_group(_read(path))


def _variety(name):
    from .varieties import variety_from_name

    try:
        return variety_from_name(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("bounds must be positive")
    return n


def _labels(text: str) -> tuple:
    try:
        return tuple(int(x) for x in re.split(r"[,\s]+", text.strip()) if x)
    except ValueError:
        raise UsageError(f"labels must be natural numbers: {text!r}") from None


def _morphism(spec: str, source, target):
    """``id``, ``x->kx`` (multiply indices by k modulo the target order) or a list of images."""
    from .groups import Morphism

    spec = spec.strip()
    if spec == "id":
        images = list(range(source.order))
    else:
        m = re.fullmatch(r"x\s*->\s*(-?\d*)\s*\*?\s*x", spec)
        if m:
            k = int(m.group(1) or 1)
            images = [(k * x) % target.order for x in range(source.order)]
        else:
            images = list(_labels(spec))
    return Morphism(source, target, images)


def _pool(args, V, bound):
    """Pool for bounded searches: --pool-dir, then AMALGAM_POOL_DIR, then a built-in default."""
    from .catalog import abelian_pool, library_pool, load_catalog, nil2_pool
    from .library import LIBRARY_MAX_ORDER

    directory = getattr(args, "pool_dir", None) or os.environ.get("AMALGAM_POOL_DIR")
    if directory:
        return load_catalog(directory).up_to(bound)
    if V.abelian:
        return abelian_pool(bound)
    if V.is_nil2_expp():
        return nil2_pool(V.exponent, bound)
    if bound <= LIBRARY_MAX_ORDER:
        return library_pool(bound, V)
    return None


# ---------------------------------------------------------------------------
# output


def _emit(args, payload: dict, text: str):
    out = canonical_json(payload) if args.format == "json" else text.rstrip("\n") + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def _emit_report(args, report: PropertyReport) -> int:
    lines = [f"{report.property}: {report.status}"]
    lines += [f"  {k}: {v}" for k, v in sorted(report.bounds.items())]
    lines += [f"  {k}: {v}" for k, v in sorted(report.summary.items()) if k != "failing_pair"]
    if args.format == "json" or args.out:
        out = report.to_json()
        if args.out:
            Path(args.out).write_text(out)
            if args.format != "json":
                sys.stdout.write("\n".join(lines) + "\n")
        else:
            sys.stdout.write(out)
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    return report.exit_code


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    from .diagrams import check_partial_consistency

    D = _diagram(args.input)
    rep = check_partial_consistency(D)
    if not rep.ok:
        sys.stderr.write(f"inconsistent: {rep.violation}\n")
        return EXIT_INPUT
    _emit(args, {"ok": True, "kind": D.kind, "domain": list(D.domain), "cells": len(D.cells)}, f"ok: {D.kind} diagram, {len(D.domain)} labels, {len(D.cells)} cells")
    return 0


def cmd_complete(args) -> int:
    from .completion import complete_within

    D = _diagram(args.input)
    V = _variety(args.variety) if D.kind == "group" else None
    pool = _pool(args, V, args.order_bound) if V is not None and (args.pool_dir or os.environ.get("AMALGAM_POOL_DIR")) else None
    comps = complete_within(D, V, args.order_bound, pool)
    rows = [{"order": c.order, "assignment": [list(x) for x in c.assignment], "name": getattr(c.algebra, "name", None)} for c in comps]
    text = "\n".join(f"order {r['order']} {r['name'] or ''} {r['assignment']}" for r in rows) or "no completion at this bound"
    _emit(args, {"completions": rows, "order_bound": args.order_bound}, text)
    return 0 if comps else EXIT_CODES["Unknown"]


def cmd_amalgamate(args) -> int:
    if args.engine == "abelian":
        from .abelian import abelian_amalgam, invariants_of

        A0, A1, A2 = _group(args.a0), _group(args.a1), _group(args.a2)
        am = abelian_amalgam(_morphism(args.i1, A0, A1), _morphism(args.i2, A0, A2))
        inv = str(invariants_of(am.group))
        _emit(args, {"amalgam": inv, "order": am.group.order, "j1": list(am.j1.as_tuple()), "j2": list(am.j2.as_tuple())}, inv)
        return 0
    from .nil2 import nil2_amalgam

    G0, G1, G2 = _group(args.a0), _group(args.a1), _group(args.a2)
    am = nil2_amalgam(_morphism(args.i1, G0, G1), _morphism(args.i2, G0, G2), p=args.p)
    G = am.group
    info = {"order": G.order, "exponent": G.exponent, "class": G.nilpotency_class}
    _emit(args, info, f"order {G.order}, exponent {G.exponent}, class {G.nilpotency_class}")
    return 0


def _atom(text):
    m = re.fullmatch(r"\s*(\d+)\s*\*\s*(\d+)\s*=\s*(\d+)\s*", text)
    if not m:
        raise UsageError(f"atom must look like a*b=c: {text!r}")
    a, b, c = (int(x) for x in m.groups())
    return ("mul", (a, b), c)


def cmd_check(args) -> int:
    from . import checkers

    V = _variety(args.variety)
    bound = args.order_bound
    prop = args.property
    if prop == "jep":
        pool = _pool(args, V, bound)
        if pool is None:
            raise UsageError("no pool for this variety and bound; pass --pool-dir")
        rep = checkers.check_jep_at(V, pool)
    elif prop == "ap":
        rep = checkers.check_ap_instance(_diagram(args.d0), _diagram(args.d1), _diagram(args.d2), V, bound, disjoint=args.disjoint)
    elif prop in ("wap", "cap"):
        pool = _pool(args, V, bound)
        rep = checkers.check_wap_witness(_diagram(args.d0), _diagram(args.d0p), V, bound, prop.upper(), pool)
    elif prop == "t-isolation":
        rep = checkers.t_isolation_check(_diagram(args.input), _labels(args.tuple), V, bound, args.word_length)
    elif prop == "gamma-stable":
        pool = _pool(args, V, bound)
        rep = checkers.gamma_stabilizer_search(_group(args.g0), V, pool, bound)
    elif prop == "non-wap":
        rep = checkers.non_wap_pattern_check(_diagram(args.input), _atom(args.atom), V, bound)
    else:
        raise UsageError(f"unknown property {prop}")
    return _emit_report(args, rep)


def cmd_rewrite(args) -> int:
    from .semiring import group_to_semigroup_presentation, parse_presentation

    S = group_to_semigroup_presentation(parse_presentation(_read(args.input)))
    payload = {"generators": list(S.generators), "relations": len(S.relations), "text": S.to_text()}
    _emit(args, payload, S.to_text())
    return 0


def _condition(args):
    from .forcing import Condition

    V = _variety(args.variety)
    if args.input:
        return Condition(_diagram(args.input), V, args.order_bound)
    return Condition.parse(args.cells or "", V, args.order_bound)


def cmd_force(args) -> int:
    from .forcing import FORCES, FORCES_NEGATION, forces, parse_sentence

    verdict = forces(_condition(args), parse_sentence(args.sentence), args.B, args.s)
    payload = {"verdict": verdict, "B": args.B, "s": args.s}
    if args.command == "decide":
        decided = verdict in (FORCES, FORCES_NEGATION)
        payload["decides"] = decided
        _emit(args, payload, f"{'decides' if decided else 'undecided'} ({verdict}, B={args.B}, s={args.s})")
        return 0 if decided else EXIT_CODES["Unknown"]
    _emit(args, payload, f"{verdict} (B={args.B}, s={args.s})")
    return 0


def cmd_generic(args) -> int:
    from .diagrams import EnumeratedApprox, default_labels
    from .forcing import generic_check

    G = _group(args.group)
    E = EnumeratedApprox(G, default_labels(G))
    rep = generic_check(E, args.sentence, args.B, args.s, _variety(args.variety))
    lines = [f"{e.sentence}: {e.verdict if e.success else 'undecided'} {list(e.condition)}" for e in rep.entries]
    _emit(args, rep.to_dict(), "\n".join(lines))
    return 0 if rep.ok else EXIT_CODES["Unknown"]


def cmd_game(args) -> int:
    from .forcing import extension_game, fresh_label_strategy, pass_strategy, smallest_completion_strategy

    V = _variety(args.variety)
    moves = {
        "pass": pass_strategy,
        "fresh": fresh_label_strategy,
        "complete": smallest_completion_strategy(V, args.order_bound),
    }
    chain, limit = extension_game(moves[args.builder], moves[args.challenger], args.rounds, V, order_bound=args.order_bound)
    payload = {"chain": [D.to_json() for D in chain], "full_table": limit is not None}
    text = "\n".join(f"round {i}: {len(D.domain)} labels, {len(D.cells)} cells" for i, D in enumerate(chain))
    _emit(args, payload, text + f"\nfull table: {limit is not None}")
    return 0


def cmd_catalog(args) -> int:
    from .catalog import abelian_pool, library_pool, nil2_pool, save_catalog

    V = _variety(args.variety)
    if V.abelian and V.exponent is None:
        cat = abelian_pool(args.order_bound)
    elif V.is_nil2_expp():
        cat = nil2_pool(V.exponent, args.order_bound)
    else:
        cat = library_pool(args.order_bound, V)
    save_catalog(cat, args.dir)
    _emit(args, {"groups": len(cat), "fingerprint": cat.fingerprint}, f"{len(cat)} groups written to {args.dir} ({cat.fingerprint})")
    return 0


def cmd_replay(args) -> int:
    text = _read(args.report)
    failures = replay_report(text)
    if failures:
        for f in failures:
            sys.stderr.write(f + "\n")
        return EXIT_INPUT
    sys.stdout.write(f"replay ok: {json.loads(text)['status']}\n")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised steps")
    common.add_argument("--jobs", type=_positive, default=1, help="worker cap (results do not depend on it)")
    common.add_argument("--variety", default="group")
    common.add_argument("--order-bound", type=_positive, default=8)
    common.add_argument("--pool-dir")

    p = argparse.ArgumentParser(prog="amalgam", description="Diagrams, amalgams and bounded property checks for finite algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common])
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("complete", parents=[common])
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_complete)

    s = sub.add_parser("amalgamate", parents=[common])
    s.add_argument("engine", choices=("abelian", "nil2"))
    for i in range(3):
        s.add_argument(f"--a{i}", f"--g{i}", dest=f"a{i}", required=True)
    s.add_argument("--i1", default="id")
    s.add_argument("--i2", default="id")
    s.add_argument("--p", type=int)
    s.set_defaults(func=cmd_amalgamate)

    s = sub.add_parser("check", parents=[common])
    s.add_argument("property", choices=("jep", "ap", "wap", "cap", "t-isolation", "gamma-stable", "non-wap"))
    s.add_argument("--in", dest="input")
    for flag in ("--d0", "--d1", "--d2", "--d0p", "--g0", "--tuple", "--atom"):
        s.add_argument(flag)
    s.add_argument("--word-length", type=_positive, default=2)
    s.add_argument("--disjoint", action="store_true")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("rewrite-semigroup", parents=[common])
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_rewrite)

    for name in ("force", "decide"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--in", dest="input", help="condition as a group diagram file")
        s.add_argument("--cells", help="condition as comma-separated cells, e.g. '2*2=1'")
        s.add_argument("--sentence", required=True)
        s.add_argument("--B", type=_positive, default=4)
        s.add_argument("--s", type=int, default=4)
        s.set_defaults(func=cmd_force)

    s = sub.add_parser("generic-check", parents=[common])
    s.add_argument("--group", required=True)
    s.add_argument("--sentence", action="append", required=True)
    s.add_argument("--B", type=_positive, default=3)
    s.add_argument("--s", type=int, default=3)
    s.set_defaults(func=cmd_generic)

    s = sub.add_parser("game", parents=[common])
    s.add_argument("--rounds", type=int, default=6)
    s.add_argument("--builder", choices=("pass", "fresh", "complete"), default="complete")
    s.add_argument("--challenger", choices=("pass", "fresh", "complete"), default="fresh")
    s.set_defaults(func=cmd_game)

    s = sub.add_parser("catalog", parents=[common])
    s.add_argument("action", choices=("build",))
    s.add_argument("--dir", required=True)
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("replay", parents=[common])
    s.add_argument("report")
    s.set_defaults(func=cmd_replay)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    try:
        return args.func(args)
    except CorruptReport as exc:
        sys.stderr.write(f"corrupt report: {exc}\n")
        return EXIT_INPUT
    except (AmalgamError, UsageError, ValueError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
