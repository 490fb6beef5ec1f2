"""Command-line front end.

Every subcommand reads ``.ta`` documents (see :mod:`hdta.ta_format`),
prints a JSON object ``{"verdict": ..., "witness": ...}`` on stdout
(or DOT/text where a flag asks for it) and exits with 0 when the
queried property holds or the requested artifact was produced, 1 when
the property fails, 2 on usage or semantic errors, and 3 when the
input lies outside the supported fragment (for example checking
history-determinism of a co-Buchi automaton).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .analysis import (
    distinguishing_play,
    fair_simulation,
    language_emptiness,
    language_inclusion_hd,
    member_lasso,
    universality_hd,
)
from .countdown import CountdownInstance, gen_countdown
from .determinize import determinize_hd
from .hd import analyze_hd
from .parity import Player
from .regions import build_region_graph
from .synthesis import solve_synthesis
from .ta import InputError, Lasso, UnsupportedError, is_deterministic, validate
from .ta_format import export_dot, parse_ta, print_ta
from .timed_games import compose, solve_timed_game

__all__ = ["main"]


def _emit(verdict, witness) -> None:
    print(json.dumps({"verdict": verdict, "witness": witness}, indent=2, sort_keys=True))


def _load(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_ta(fh.read())


def _lasso_json(lasso: Lasso | None):
    if lasso is None:
        return None
    return {
        "prefix": [[str(d), letter] for d, letter in lasso.prefix],
        "cycle": [[str(d), letter] for d, letter in lasso.cycle],
    }


def _parse_steps(text: str, what: str) -> tuple[tuple[Fraction, str], ...]:
    tokens = text.split()
    if len(tokens) % 2:
        raise InputError(f"{what}: expected alternating DELAY LETTER tokens")
    steps = []
    for i in range(0, len(tokens), 2):
        try:
            delay = Fraction(tokens[i])
        except (ValueError, ZeroDivisionError):
            raise InputError(f"{what}: bad delay {tokens[i]!r}") from None
        steps.append((delay, tokens[i + 1]))
    return tuple(steps)


def _cmd_validate(args) -> int:
    report = validate(_load(args.file).automaton)
    ta = report.original
    witness = {
        "states": len(ta.states),
        "transitions": len(ta.transitions),
        "gaps": [
            {"state": ta.states[g.state], "letter": g.letter}
            for g in report.gaps[:10]
        ],
        "gap_count": len(report.gaps),
    }
    _emit(report.complete, witness)
    return 0 if report.complete else 1


def _cmd_regions(args) -> int:
    graph = build_region_graph(_load(args.file).automaton)
    if args.dot:
        sys.stdout.write(export_dot(graph))
        return 0
    edges = sum(len(outs) for outs in graph.edges)
    _emit(True, {"nodes": len(graph.nodes), "edges": edges})
    return 0


def _cmd_empty(args) -> int:
    result = language_emptiness(_load(args.file).automaton)
    _emit(result.empty, _lasso_json(result.witness))
    return 0 if result.empty else 1


def _cmd_member(args) -> int:
    doc = _load(args.file)
    lasso = Lasso(_parse_steps(args.prefix, "--prefix"), _parse_steps(args.cycle, "--cycle"))
    verdict = member_lasso(doc.automaton, lasso)
    _emit(verdict, None)
    return 0 if verdict else 1


def _cmd_check_hd(args) -> int:
    result = analyze_hd(_load(args.file).automaton)
    witness = {
        "acceptance": result.kind.value,
        "settled_states": len(result.resolver.settled) if result.resolver else None,
    }
    _emit(result.hd, witness)
    return 0 if result.hd else 1


def _cmd_resolver(args) -> int:
    result = analyze_hd(_load(args.file).automaton)
    if not result.hd:
        _emit(False, "the automaton is not history-deterministic")
        return 1
    _emit(True, result.resolver.to_json())
    return 0


def _cmd_determinize(args) -> int:
    ta = _load(args.file).automaton
    if not analyze_hd(ta).hd:
        _emit(False, "the automaton is not history-deterministic")
        return 1
    out = determinize_hd(ta)
    text = print_ta(out)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    _emit(
        True,
        {
            "ta": text,
            "states": len(out.states),
            "transitions": len(out.transitions),
            "deterministic": is_deterministic(out),
        },
    )
    return 0


def _cmd_include(args) -> int:
    a = _load(args.left).automaton
    b = _load(args.right).automaton
    result = language_inclusion_hd(a, b, assume_hd=args.assume_hd)
    witness = None if result.included else _lasso_json(distinguishing_play(result))
    _emit(result.included, witness)
    return 0 if result.included else 1


def _cmd_simulate(args) -> int:
    verdict = fair_simulation(_load(args.left).automaton, _load(args.right).automaton)
    _emit(verdict.holds, {"route": verdict.route})
    return 0 if verdict.holds else 1


def _cmd_universal(args) -> int:
    result = universality_hd(_load(args.file).automaton, assume_hd=args.assume_hd)
    witness = None if result.included else _lasso_json(distinguishing_play(result))
    _emit(result.included, witness)
    return 0 if result.included else 1


def _cmd_synth(args) -> int:
    result = solve_synthesis(_load(args.file).automaton, assume_hd=args.assume_hd)
    if result.realisable and args.dot:
        sys.stdout.write(export_dot(result.controller))
        return 0
    witness = result.controller.to_json() if result.realisable else None
    _emit(result.realisable, witness)
    return 0 if result.realisable else 1


def _cmd_solve_game(args) -> int:
    game = _load(args.file).as_game()
    condition = _load(args.condition).automaton if args.condition else None
    result = solve_timed_game(game, condition)
    winner = result.winner
    _emit(
        winner is Player.P2,
        {"winner": winner.name, "arena_nodes": len(result.compiled.nodes)},
    )
    return 0 if winner is Player.P2 else 1


def _cmd_compose(args) -> int:
    game = _load(args.game).as_game()
    condition = _load(args.condition).automaton
    combined = compose(game, condition)
    _emit(
        True,
        {
            "ta": print_ta(combined),
            "states": len(combined.states),
            "transitions": len(combined.transitions),
        },
    )
    return 0


def _cmd_gen_countdown(args) -> int:
    transitions = []
    for chunk in args.transitions.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split()
        if len(parts) != 3 or not parts[1].isdigit():
            raise InputError(
                f"bad countdown transition {chunk!r}: expected 'STATE LABEL STATE'"
            )
        transitions.append((parts[0], int(parts[1]), parts[2]))
    inst = CountdownInstance(tuple(transitions), args.k, initial=args.initial)
    proposer, responder, win = gen_countdown(inst)
    if args.out_a:
        with open(args.out_a, "w", encoding="utf-8") as fh:
            fh.write(print_ta(proposer))
    if args.out_b:
        with open(args.out_b, "w", encoding="utf-8") as fh:
            fh.write(print_ta(responder))
    _emit(
        True,
        {
            "a": print_ta(proposer),
            "b": print_ta(responder),
            "player1_wins": win,
        },
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdta",
        description="History-deterministic timed automata: analysis, games, synthesis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check input-completeness of a .ta document")
    p.add_argument("file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("regions", help="build the reachable region graph")
    p.add_argument("file")
    p.add_argument("--dot", action="store_true", help="print DOT instead of JSON")
    p.set_defaults(func=_cmd_regions)

    p = sub.add_parser("empty", help="decide language emptiness")
    p.add_argument("file")
    p.set_defaults(func=_cmd_empty)

    p = sub.add_parser("member", help="decide lasso-word membership")
    p.add_argument("file")
    p.add_argument("--prefix", default="", help="alternating DELAY LETTER tokens")
    p.add_argument("--cycle", required=True, help="alternating DELAY LETTER tokens")
    p.set_defaults(func=_cmd_member)

    p = sub.add_parser("check-hd", help="decide history-determinism")
    p.add_argument("file")
    p.set_defaults(func=_cmd_check_hd)

    p = sub.add_parser("resolver", help="extract a winning resolver table")
    p.add_argument("file")
    p.set_defaults(func=_cmd_resolver)

    p = sub.add_parser("determinize", help="determinize a history-deterministic automaton")
    p.add_argument("file")
    p.add_argument("-o", "--out", help="also write the result document to a file")
    p.set_defaults(func=_cmd_determinize)

    p = sub.add_parser("include", help="language inclusion (right side HD)")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--assume-hd", action="store_true")
    p.set_defaults(func=_cmd_include)

    p = sub.add_parser("simulate", help="fair simulation between two automata")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("universal", help="universality of an HD automaton")
    p.add_argument("file")
    p.add_argument("--assume-hd", action="store_true")
    p.set_defaults(func=_cmd_universal)

    p = sub.add_parser("synth", help="reactive synthesis from a paired-letter spec")
    p.add_argument("file")
    p.add_argument("--assume-hd", action="store_true")
    p.add_argument("--dot", action="store_true", help="print the controller as DOT")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("solve-game", help="solve a timed parity game document")
    p.add_argument("file")
    p.add_argument("--condition", help="compose with this automaton first")
    p.set_defaults(func=_cmd_solve_game)

    p = sub.add_parser("compose", help="compose a game with a condition automaton")
    p.add_argument("game")
    p.add_argument("condition")
    p.set_defaults(func=_cmd_compose)

    p = sub.add_parser("gen-countdown", help="emit a countdown fair-simulation pair")
    p.add_argument("--transitions", required=True, help="'p 1 q; q 2 p' style list")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--initial")
    p.add_argument("--out-a", help="write the proposer document here")
    p.add_argument("--out-b", help="write the responder document here")
    p.set_defaults(func=_cmd_gen_countdown)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help and usage errors
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except UnsupportedError as exc:
        _emit("unsupported", str(exc))
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
