"""Tests for region-compiled timed games and observer composition."""

from __future__ import annotations

import pytest

from hdta.parity import Player
from hdta.regions import delay_chain, region_reset, region_satisfies, zero_region
from hdta.ta import Acceptance, InputError
from hdta.timed_games import (
    Move,
    compile_timed_game,
    compose,
    solve_timed_game,
)

from conftest import g, mk_game, mk_ta


def test_single_even_loop_p2_wins():
    game = mk_game(
        "loop", ["q"], "2", ["x"], ["a"],
        [(0, g((0, "<=", 1)), "a", [0], 0)],
        [0],
    )
    compiled = compile_timed_game(game)
    # Only one node: every enabled round resets back to x = 0.
    assert compiled.nodes == ((0, zero_region((1,))),)
    assert len(compiled.arena.edges[0]) == 3  # fire at x=0, 0<x<1, x=1
    res = solve_timed_game(game)
    assert res.winner is Player.P2
    assert res.winning_moves(Player.P2)[0].tid == 0


def test_safety_round_owner_decides():
    def build(owners):
        return mk_game(
            "ctrl", ["ctrl", "bad"], owners, ["x"], ["a", "b"],
            [
                (0, g((0, "<", 1)), "a", [0], 0),
                (0, g((0, ">=", 1)), "b", [], 1),
                (1, g(), "a", [], 1),
            ],
            [0, 1],
        )

    assert solve_timed_game(build("21")).winner is Player.P2
    assert solve_timed_game(build("11")).winner is Player.P1


def test_zero_delay_blocks_the_needed_wait():
    def build(zero_delay):
        return mk_game(
            "wait", ["q0", "q1"], "22", ["x"], ["a"],
            [
                (0, g((0, ">=", 1)), "a", [], 1),
                (1, g(), "a", [], 1),
            ],
            [1, 0],
            zero_delay=zero_delay,
        )

    assert solve_timed_game(build(())).winner is Player.P2
    # Forced zero delay: the guard x >= 1 never becomes enabled.
    assert solve_timed_game(build((0,))).winner is Player.P1


def test_dead_end_loses_for_its_owner():
    for owners, winner in (("1", Player.P2), ("2", Player.P1)):
        game = mk_game("stuck", ["q"], owners, ["x"], ["a"], [], [0])
        assert solve_timed_game(game).winner is winner


def test_compile_moves_mirror_edges():
    game = mk_game(
        "mix", ["s", "t"], "12", ["x", "y"], ["a", "b"],
        [
            (0, g((0, "<=", 1)), "a", [1], 1),
            (0, g((1, ">", 1)), "b", [], 0),
            (1, g((0, ">=", 2)), "a", [0, 1], 0),
        ],
        [0, 1],
    )
    compiled = compile_timed_game(game)
    assert compiled.initial == 0
    assert compiled.nodes[0] == (game.initial, zero_region(game.cmax))
    for v, (q, r) in enumerate(compiled.nodes):
        assert len(compiled.arena.edges[v]) == len(compiled.moves[v])
        chain = delay_chain(r)
        for ei, move in enumerate(compiled.moves[v]):
            assert isinstance(move, Move)
            assert move.delay in chain
            t = game.transitions[move.tid]
            assert t.source == q
            assert region_satisfies(move.delay, t.guard)
            tgt = compiled.nodes[compiled.arena.edges[v][ei]]
            assert tgt == (t.target, region_reset(move.delay, t.resets))
        assert compiled.arena.owners[v] is game.owners[q]
        assert compiled.arena.priorities[v] == game.priorities[q]
        assert game.states[q] in compiled.arena.labels[v]


def test_compile_is_deterministic():
    game = mk_game(
        "det", ["s", "t"], "21", ["x"], ["a"],
        [
            (0, g((0, "<", 2)), "a", [], 1),
            (1, g((0, ">=", 1)), "a", [0], 0),
        ],
        [0, 1],
    )
    c1 = compile_timed_game(game)
    c2 = compile_timed_game(game)
    assert c1.arena == c2.arena and c1.nodes == c2.nodes and c1.moves == c2.moves


# ---------------------------------------------------------------------------
# Composition with an observer automaton.


def untimed_plant(owners):
    return mk_game(
        "plant", ["p"], owners, [], ["a", "b"],
        [
            (0, g(), "a", [], 0),
            (0, g(), "b", [], 0),
        ],
        [0],
    )


def test_compose_untimed_safety_condition():
    cond = mk_ta(
        "no-b", ["c0", "cbad"], [], ["a", "b"],
        [
            (0, g(), "a", [], 0),
            (0, g(), "b", [], 1),
            (1, g(), "a", [], 1),
            (1, g(), "b", [], 1),
        ],
        Acceptance.safety({0}),
    )
    assert solve_timed_game(untimed_plant("2"), cond).winner is Player.P2
    assert solve_timed_game(untimed_plant("1"), cond).winner is Player.P1


def test_compose_structure():
    cond = mk_ta(
        "no-b", ["c0", "cbad"], [], ["a", "b"],
        [
            (0, g(), "a", [], 0),
            (0, g(), "b", [], 1),
            (1, g(), "a", [], 1),
            (1, g(), "b", [], 1),
        ],
        Acceptance.safety({0}),
    )
    comp = compose(untimed_plant("2"), cond)
    assert comp.states[comp.initial] == "(p,c0)"
    assert len(comp.states) == 6  # 2 round states + 4 observer steps
    # Observer-step states are zero-delay and P2-owned.
    for v, name in enumerate(comp.states):
        if "@" in name:
            assert v in comp.zero_delay
            assert comp.owners[v] is Player.P2
    # Priorities come from the observer only.
    assert comp.priorities[comp.initial] == 0


def test_compose_timed_reachability_condition():
    cond = mk_ta(
        "b-early", ["c0", "cgood", "cdead"], ["y"], ["a", "b"],
        [
            (0, g(), "a", [], 0),
            (0, g((0, "<", 1)), "b", [], 1),
            (0, g((0, ">=", 1)), "b", [], 2),
            (1, g(), "a", [], 1),
            (1, g(), "b", [], 1),
            (2, g(), "a", [], 2),
            (2, g(), "b", [], 2),
        ],
        Acceptance.reachability({1}),
    )
    assert solve_timed_game(untimed_plant("2"), cond).winner is Player.P2
    assert solve_timed_game(untimed_plant("1"), cond).winner is Player.P1


def test_compose_completes_the_condition():
    # Observer only covers a at y < 1; later a's fall into a rejecting sink.
    cond = mk_ta(
        "small", ["c0"], ["y"], ["a"],
        [(0, g((0, "<", 1)), "a", [], 0)],
        Acceptance.safety({0}),
    )
    plant = mk_game(
        "one", ["p"], "2", [], ["a"],
        [(0, g(), "a", [], 0)],
        [0],
    )
    # P2 fires a immediately, forever at time 0: stays safe.
    assert solve_timed_game(plant, cond).winner is Player.P2
    plant1 = mk_game(
        "one", ["p"], "1", [], ["a"],
        [(0, g(), "a", [], 0)],
        [0],
    )
    # P1 waits past the guard and falls into the completion sink.
    assert solve_timed_game(plant1, cond).winner is Player.P1


def test_compose_rejects_bad_conditions():
    plant = untimed_plant("2")
    nondet = mk_ta(
        "nd", ["c0"], ["y"], ["a", "b"],
        [
            (0, g((0, "<", 2)), "a", [], 0),
            (0, g((0, ">", 1)), "a", [], 0),
            (0, g(), "b", [], 0),
        ],
        Acceptance.safety({0}),
    )
    with pytest.raises(InputError):
        compose(plant, nondet)
    small_alphabet = mk_ta(
        "only-a", ["c0"], [], ["a"],
        [(0, g(), "a", [], 0)],
        Acceptance.safety({0}),
    )
    with pytest.raises(InputError):
        compose(plant, small_alphabet)
