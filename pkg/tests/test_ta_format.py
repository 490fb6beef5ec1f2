"""Tests for the .ta text format and the DOT exporters."""

import random

import pytest

from conftest import last_reset_fork, lucky_guess_reach, random_ta, unit_lasso_cobuchi
from hdta import InputError
from hdta.analysis import language_emptiness
from hdta.parity import GameArena, Player
from hdta.regions import build_region_graph
from hdta.synthesis import solve_synthesis
from hdta.ta import AcceptanceKind, Rel
from hdta.ta_format import TaDocument, export_dot, parse_ta, print_ta
from hdta.timed_games import TimedGame


GAME_DOC = """\
ta chase
clocks x
alphabet go wait
acceptance parity
initial hub
state hub priority 0 owner P1
state rest priority 2 owner P2 urgent
trans hub -> rest on go when x <= 1
trans rest -> hub on wait when true reset {x}
"""


def test_minimal_document():
    doc = parse_ta("ta tiny\nclocks\nalphabet a\nacceptance safety\nstate s safe\n")
    ta = doc.automaton
    assert ta.name == "tiny" and ta.states == ("s",) and ta.clocks == ()
    assert ta.acceptance.kind is AcceptanceKind.SAFETY
    assert ta.initial == 0 and not doc.is_game


def test_fixture_files_pin_the_builders(fixtures_dir):
    for fname, builder in [
        ("fork.ta", last_reset_fork),
        ("unit_lasso.ta", unit_lasso_cobuchi),
        ("lucky_guess.ta", lucky_guess_reach),
    ]:
        with open(fixtures_dir / fname, encoding="utf-8") as fh:
            assert parse_ta(fh.read()).automaton == builder()


def test_unit_lasso_transcription_nonempty(fixtures_dir):
    with open(fixtures_dir / "unit_lasso.ta", encoding="utf-8") as fh:
        ta = parse_ta(fh.read()).automaton
    assert not language_emptiness(ta).empty


def test_equality_desugars_and_disjunction_splits():
    doc = parse_ta(
        "ta t\nclocks x y\nalphabet a\nacceptance safety\nstate s safe\n"
        "trans s -> s on a when x == 1 | x - y <= 0 & y > 2\n"
    )
    t0, t1 = doc.automaton.transitions
    assert {(a.rel, a.bound) for a in t0.guard.atoms} == {(Rel.LE, 1), (Rel.GE, 1)}
    assert len(t1.guard.atoms) == 2
    assert any(a.right == 1 for a in t1.guard.atoms)


def test_comments_and_blank_lines():
    doc = parse_ta(
        "# leading comment\n\nta t # trailing\nclocks\nalphabet a\n"
        "acceptance safety\nstate s safe # also here\ntrans s -> s on a\n"
    )
    assert doc.automaton.name == "t"
    assert len(doc.automaton.transitions) == 1


def test_round_trip_fixtures():
    for builder in (last_reset_fork, unit_lasso_cobuchi, lucky_guess_reach):
        ta = builder()
        assert parse_ta(print_ta(ta)) == TaDocument(ta)


def test_round_trip_random_automata():
    rng = random.Random(5)
    for i in range(25):
        kind = rng.choice(["safety", "reachability", "buchi", "cobuchi"])
        ta = random_ta(rng, kind=kind, nstates=rng.randint(1, 4), name=f"r{i}")
        assert parse_ta(print_ta(ta)) == TaDocument(ta)


def test_game_documents_round_trip():
    doc = parse_ta(GAME_DOC)
    game = doc.as_game()
    assert isinstance(game, TimedGame)
    assert game.owners == (Player.P1, Player.P2)
    assert game.priorities == (0, 2)
    assert game.zero_delay == frozenset({1})
    assert parse_ta(print_ta(game)).as_game() == game


def test_as_game_requires_owners_and_parity():
    plain = parse_ta("ta t\nclocks\nalphabet a\nacceptance safety\nstate s safe\n")
    with pytest.raises(InputError):
        plain.as_game()
    unpar = parse_ta(
        "ta t\nclocks\nalphabet a\nacceptance safety\n"
        "state s safe owner P1\ntrans s -> s on a\n"
    )
    with pytest.raises(InputError):
        unpar.as_game()


def test_errors_carry_line_numbers():
    cases = [
        ("ta t\nclocks\nalphabet a\nacceptance safety\nwobble s\n", "line 5"),
        ("ta t\nclocks\nalphabet a\nacceptance safety\nstate s safe\n"
         "trans s -> s on a when z < 1\n", "line 6"),
        ("ta t\nclocks\nalphabet a\nacceptance safety\nstate s safe\nstate s safe\n", "line 6"),
        ("ta t\nclocks\nalphabet a\nacceptance safety\nstate s final\n", "line 5"),
        ("ta t\nclocks\nalphabet a\nacceptance safety\nstate s priority 2\n", "line 5"),
        ("ta t\nclocks x\nalphabet a\nacceptance safety\nstate s safe\n"
         "trans s -> s on a reset {q}\n", "line 6"),
        ("ta t\nclocks\nalphabet a\nacceptance safety\nstate s safe\n"
         "trans s -> s on b\n", "line 6"),
        ("ta t\nclocks\nalphabet a\nacceptance safety\nstate s safe owner P1\nstate u safe\n",
         "line 6"),
    ]
    for text, needle in cases:
        with pytest.raises(InputError, match=needle):
            parse_ta(text)


def test_missing_sections_rejected():
    for text in (
        "clocks\nalphabet a\nacceptance safety\nstate s safe\n",
        "ta t\nclocks\nacceptance safety\nstate s safe\n",
        "ta t\nclocks\nalphabet a\nstate s safe\n",
        "ta t\nclocks\nalphabet a\nacceptance safety\n",
        "ta t\nclocks\nalphabet a\nacceptance maybe\nstate s safe\n",
    ):
        with pytest.raises(InputError):
            parse_ta(text)


def test_dot_exports_deterministic_and_sized():
    fork = last_reset_fork()
    dot = export_dot(fork)
    assert dot == export_dot(fork)
    assert dot.count("shape=circle") + dot.count("shape=doublecircle") == len(fork.states)
    assert dot.count(" -> ") == len(fork.transitions) + 1  # plus the initial marker

    graph = build_region_graph(fork)
    gdot = export_dot(graph)
    assert gdot == export_dot(graph)
    n_delay = sum(1 for outs in graph.edges for e in outs if e.kind == "delay")
    n_trans = sum(1 for outs in graph.edges for e in outs if e.kind != "delay")
    assert gdot.count("shape=box") == len(graph.nodes)
    assert gdot.count("style=dashed") == n_delay
    assert gdot.count("[label=") == len(graph.nodes) + n_trans

    arena = GameArena(
        owners=(Player.P1, Player.P2),
        priorities=(1, 2),
        edges=((1,), (0, 1)),
        labels=("alpha", "beta"),
    )
    adot = export_dot(arena)
    assert "diamond" in adot and "ellipse" in adot and adot.count(" -> ") == 3

    with pytest.raises(InputError):
        export_dot(42)


def test_dot_controller_export(fixtures_dir):
    with open(fixtures_dir / "copy_spec.ta", encoding="utf-8") as fh:
        spec = parse_ta(fh.read()).automaton
    res = solve_synthesis(spec)
    dot = export_dot(res.controller)
    assert dot == export_dot(res.controller)
    assert "i0 / o0" in dot and "i1 / o1" in dot
    assert "__init -> n0" in dot
