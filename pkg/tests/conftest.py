"""Shared builders for the test suite."""

from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hdta.ta import (
    Acceptance,
    Guard,
    GuardAtom,
    Rel,
    TimedAutomaton,
    Transition,
)


def g(*atoms):
    """Build a guard from (left, rel, bound[, right]) tuples."""
    out = []
    for a in atoms:
        left, rel, bound = a[0], a[1], a[2]
        right = a[3] if len(a) > 3 else None
        out.append(GuardAtom(left, Rel(rel), bound, right))
    return Guard.of(*out)


def mk_ta(
    name,
    states,
    clocks,
    alphabet,
    transitions,
    acceptance,
    initial=0,
):
    """transitions: (source, guard, letter, resets, target) tuples."""
    trans = tuple(
        Transition(i, src, gu, letter, frozenset(resets), tgt)
        for i, (src, gu, letter, resets, tgt) in enumerate(transitions)
    )
    return TimedAutomaton(
        name, tuple(states), initial, tuple(clocks), tuple(alphabet), trans, acceptance
    )


def frac(a, b=1):
    return Fraction(a, b)


def mk_game(
    name,
    states,
    owners,
    clocks,
    alphabet,
    transitions,
    priorities,
    initial=0,
    zero_delay=(),
):
    """owners: string with one '1'/'2' per state; transitions as in mk_ta."""
    from hdta.parity import Player
    from hdta.timed_games import TimedGame

    trans = tuple(
        Transition(i, src, gu, letter, frozenset(resets), tgt)
        for i, (src, gu, letter, resets, tgt) in enumerate(transitions)
    )
    return TimedGame(
        name,
        tuple(states),
        tuple(Player.P1 if ch == "1" else Player.P2 for ch in owners),
        tuple(clocks),
        tuple(alphabet),
        trans,
        tuple(priorities),
        initial=initial,
        zero_delay=frozenset(zero_delay),
    )


def random_ta(
    rng,
    kind="safety",
    nstates=3,
    nclocks=2,
    cmax=2,
    letters=("a", "b"),
    diagonals=False,
    name="rand",
):
    """Random small automaton; guards may be unsatisfiable (dead edges)."""
    states = tuple(f"q{i}" for i in range(nstates))
    clocks = tuple("xyzw")[:nclocks]
    ntrans = rng.randint(nstates, 2 * nstates + 2)
    rows = []
    for _ in range(ntrans):
        atoms = []
        for c in range(nclocks):
            if rng.random() < 0.45:
                atoms.append((c, rng.choice(("<", "<=", ">", ">=")), rng.randint(0, cmax)))
        if diagonals and nclocks >= 2 and rng.random() < 0.35:
            x, y = rng.sample(range(nclocks), 2)
            atoms.append((x, rng.choice(("<", "<=", ">", ">=")), rng.randint(0, cmax), y))
        resets = [c for c in range(nclocks) if rng.random() < 0.3]
        rows.append(
            (rng.randrange(nstates), g(*atoms), rng.choice(letters), resets, rng.randrange(nstates))
        )
    subset = frozenset(q for q in range(nstates) if rng.random() < 0.5)
    if kind == "safety":
        acc = Acceptance.safety(subset | {0})
    elif kind == "reachability":
        acc = Acceptance.reachability(subset | {nstates - 1})
    elif kind == "buchi":
        acc = Acceptance.buchi(subset | {rng.randrange(nstates)})
    elif kind == "cobuchi":
        acc = Acceptance.cobuchi(subset)
    else:
        acc = Acceptance.parity(tuple(rng.randint(0, 3) for _ in range(nstates)))
    return mk_ta(name, states, clocks, letters, rows, acc)


def random_lasso(rng, letters, max_prefix=3, max_cycle=3, denom=2):
    """Random ultimately periodic word with small rational delays."""
    from hdta.ta import Lasso

    def step():
        return (Fraction(rng.randint(0, 2 * denom), denom), rng.choice(letters))

    prefix = tuple(step() for _ in range(rng.randint(0, max_prefix)))
    cycle = tuple(step() for _ in range(rng.randint(1, max_cycle)))
    return Lasso(prefix, cycle)


def last_reset_fork():
    """Reachability automaton that forks on the first `a` into two branches;
    the fork can be resolved by comparing which clock was reset last."""
    from hdta.ta import Acceptance

    return mk_ta(
        "last_reset_fork",
        ("q1", "q2", "q3", "q4"),
        ("x", "y"),
        ("a", "b", "c"),
        [
            (0, g(), "b", [0], 0),
            (0, g(), "c", [1], 0),
            (0, g(), "a", [], 1),
            (0, g(), "a", [], 2),
            (1, g((0, "<", 1), (1, ">=", 1)), "a", [], 3),
            (2, g((1, "<", 1), (0, ">=", 1)), "a", [], 3),
            (3, g(), "a", [], 3),
        ],
        Acceptance.reachability({3}),
    )


def unit_lasso_cobuchi():
    """Co-Buchi automaton accepting words whose letters eventually keep
    arriving anchored to a unit period (x re-reaches 1 at every letter)."""
    from hdta.ta import Acceptance

    return mk_ta(
        "unit_lasso",
        ("idle", "locked"),
        ("x",),
        ("a",),
        [
            (0, g(), "a", [], 0),
            (0, g(), "a", [0], 1),
            (1, g((0, "<", 1)), "a", [], 1),
            (1, g((0, "<=", 1), (0, ">=", 1)), "a", [0], 1),
            (1, g((0, ">", 1)), "a", [], 0),
        ],
        Acceptance.cobuchi({0}),
    )


def lucky_guess_reach():
    """Reachability automaton that must reset its clock exactly one time
    unit before the last letter; no resolver can know when, so it is not
    history-deterministic."""
    from hdta.ta import Acceptance

    return mk_ta(
        "lucky_guess",
        ("p0", "p1", "p2"),
        ("x",),
        ("a",),
        [
            (0, g(), "a", [], 0),
            (0, g(), "a", [0], 1),
            (1, g(), "a", [], 1),
            (1, g((0, "<=", 1), (0, ">=", 1)), "a", [], 2),
            (2, g(), "a", [], 2),
        ],
        Acceptance.reachability({2}),
    )


@pytest.fixture
def fixtures_dir():
    """Directory holding the .ta corpus documents."""
    return Path(__file__).parent / "fixtures"
