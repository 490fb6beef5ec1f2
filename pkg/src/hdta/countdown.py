"""Countdown games rendered as fair-simulation benchmark instances.

A countdown game is a finite graph whose edges carry positive integer
labels, together with a target number ``k``.  A round at ``(p, n)`` has
Player 1 pick a label ``l <= k - n`` available at ``p`` and Player 2
pick an ``l``-labelled edge, moving to ``(p', n + l)``; Player 1 wins
by hitting ``n = k`` exactly.  The winner is computable by a small
dynamic program over ``(state, count)`` pairs, yet the same question
can be posed as a fair-simulation query between two timed automata: a
clockless universal proposer and a two-clock responder that tracks the
total elapsed time and the last round's delay, punishing every deviation
from the countdown protocol by escaping to a winning sink.  The pair is
a useful differential test family because the simulation verdict must
equal the dynamic program's verdict on every instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .ta import (
    TRUE,
    Acceptance,
    Guard,
    GuardAtom,
    InputError,
    Rel,
    TimedAutomaton,
    Transition,
    validate,
)

__all__ = ["CountdownInstance", "dp_player1_wins", "gen_countdown"]


@dataclass(frozen=True)
class CountdownInstance:
    """A countdown game: labelled edges, target ``k``, optional start state."""

    transitions: tuple[tuple[str, int, str], ...]
    k: int
    initial: str | None = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InputError("countdown target must be at least 1")
        if not self.transitions and self.initial is None:
            raise InputError("countdown instance needs transitions or a start state")
        for p, l, p2 in self.transitions:
            if l < 1:
                raise InputError(f"countdown label {l} must be positive")
        if self.initial is not None:
            known = {p for p, _, _ in self.transitions} | {p2 for _, _, p2 in self.transitions}
            if self.transitions and self.initial not in known:
                raise InputError(f"start state {self.initial!r} has no transitions touching it")

    @cached_property
    def states(self) -> tuple[str, ...]:
        out = {p for p, _, _ in self.transitions} | {p2 for _, _, p2 in self.transitions}
        if self.initial is not None:
            out.add(self.initial)
        return tuple(sorted(out))

    @property
    def start(self) -> str:
        return self.initial if self.initial is not None else self.states[0]

    @cached_property
    def labels_from(self) -> dict[str, dict[int, tuple[str, ...]]]:
        out: dict[str, dict[int, list[str]]] = {p: {} for p in self.states}
        for p, l, p2 in sorted(set(self.transitions)):
            out[p].setdefault(l, []).append(p2)
        return {
            p: {l: tuple(ts) for l, ts in by_label.items()} for p, by_label in out.items()
        }


def dp_player1_wins(inst: CountdownInstance) -> bool:
    """Exact countdown winner from ``(start, 0)`` by dynamic programming.

    ``win[p, n]`` says Player 1 wins from ``(p, n)``: immediately when
    ``n == k``, otherwise by picking a label ``l <= k - n`` available at
    ``p`` all of whose edges lead to winning ``(p', n + l)``.
    """
    k = inst.k
    win: dict[tuple[str, int], bool] = {}
    for n in range(k, -1, -1):
        for p in inst.states:
            if n == k:
                win[p, n] = True
                continue
            win[p, n] = any(
                l <= k - n and all(win[p2, n + l] for p2 in targets)
                for l, targets in inst.labels_from[p].items()
            )
    return win[inst.start, 0]


def _between(lo: int | None, hi: int | None) -> Guard:
    atoms = []
    if lo is not None:
        atoms.append(GuardAtom(1, Rel.GT, lo))
    if hi is not None:
        atoms.append(GuardAtom(1, Rel.LT, hi))
    return Guard.of(*atoms)


def gen_countdown(
    inst: CountdownInstance,
) -> tuple[TimedAutomaton, TimedAutomaton, bool]:
    """The instance as a fair-simulation query, with the oracle verdict.

    Returns ``(A, B, player1_wins)`` where ``A`` is the clockless
    universal proposer over letters ``a`` and ``e`` and ``B`` is the
    countdown responder: clock ``x1`` accumulates the total time (the
    count), clock ``x2`` the current round's delay (the label).  ``B``
    punishes off-protocol proposals via a winning sink — a delay that is
    no label here, total time beyond the target, or an end-claim ``e``
    before the target — and answers a protocol round by the matching
    countdown edge, resetting ``x2``.  The one unanswerable situation is
    an ``e`` after a valid label delay landing exactly on the target,
    which is Player 1's countdown win; that gap is completed into a
    rejecting sink, so ``fair_simulation(A, B)`` holds iff Player 1
    loses the countdown game.
    """
    proposer = TimedAutomaton(
        "countdown_a",
        ("w",),
        0,
        (),
        ("a", "e"),
        (
            Transition(0, 0, TRUE, "a", frozenset(), 0),
            Transition(1, 0, TRUE, "e", frozenset(), 0),
        ),
        Acceptance.safety(frozenset({0})),
    )
    k = inst.k
    states = inst.states + ("win",)
    index = {p: i for i, p in enumerate(states)}
    rows: list[tuple[int, Guard, str, frozenset[int], int]] = []
    for p in inst.states:
        src = index[p]
        labels = sorted(inst.labels_from[p])
        # No-label delays: the proposed delay matches no edge here.
        bounds = [None, *labels, None]
        for lo, hi in zip(bounds, bounds[1:]):
            for letter in ("a", "e"):
                rows.append((src, _between(lo, hi), letter, frozenset(), index["win"]))
        # Protocol rounds: take a matching edge and start the next round.
        for l in labels:
            guard = Guard.of(GuardAtom(1, Rel.LE, l), GuardAtom(1, Rel.GE, l))
            for p2 in inst.labels_from[p][l]:
                rows.append((src, guard, "a", frozenset({1}), index[p2]))
        # Total time beyond the target: the proposer has overshot.
        over = Guard.of(GuardAtom(0, Rel.GT, k))
        for letter in ("a", "e"):
            rows.append((src, over, letter, frozenset(), index["win"]))
        # End-claim before the target: the claim came too early.
        rows.append((src, Guard.of(GuardAtom(0, Rel.LT, k)), "e", frozenset(), index["win"]))
    for letter in ("a", "e"):
        rows.append((index["win"], TRUE, letter, frozenset(), index["win"]))
    responder = TimedAutomaton(
        "countdown_b",
        states,
        index[inst.start],
        ("x1", "x2"),
        ("a", "e"),
        tuple(Transition(i, s, g, a, r, t) for i, (s, g, a, r, t) in enumerate(rows)),
        Acceptance.safety(frozenset(range(len(states)))),
    )
    return proposer, validate(responder).completed, dp_player1_wins(inst)
