"""Two-player games on timed automata, solved over the region abstraction.

A timed game is a timed transition system whose states are owned by one
of the two players.  In each round the owner of the current state picks
a delay and then an enabled transition; states marked zero-delay force
the delay to be zero.  The objective is a parity condition on states
(player P2 wins a play iff the maximum priority visited infinitely
often is even) and a player who has to move but cannot loses.  Games
are solved exactly by compiling rounds onto the region abstraction and
handing the finite arena to the parity engine, which also yields
positional winning strategies in terms of (delay region, transition)
moves.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

from .parity import GameArena, ParityResult, Player, solve_parity
from .regions import Region, delay_chain, region_reset, region_satisfies, zero_region
from .ta import (
    InputError,
    TimedAutomaton,
    Transition,
    as_parity,
    is_deterministic,
    validate,
)


@dataclass(frozen=True)
class TimedGame:
    """A timed automaton with state owners, priorities and zero-delay flags."""

    name: str
    states: tuple[str, ...]
    owners: tuple[Player, ...]
    clocks: tuple[str, ...]
    alphabet: tuple[str, ...]
    transitions: tuple[Transition, ...]
    priorities: tuple[int, ...]
    initial: int = 0
    zero_delay: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        n = len(self.states)
        if len(set(self.states)) != n:
            raise InputError("duplicate state names")
        if len(self.owners) != n or len(self.priorities) != n:
            raise InputError("owners/priorities must match the state count")
        if not 0 <= self.initial < n:
            raise InputError("initial state out of range")
        if any(p < 0 for p in self.priorities):
            raise InputError("priorities must be nonnegative")
        if any(not 0 <= q < n for q in self.zero_delay):
            raise InputError("zero-delay state out of range")
        for i, t in enumerate(self.transitions):
            if t.tid != i:
                raise InputError("transition ids must equal their positions")
            if not (0 <= t.source < n and 0 <= t.target < n):
                raise InputError("transition endpoint out of range")
            if t.letter not in self.alphabet:
                raise InputError(f"letter {t.letter!r} not in the alphabet")
            for c in t.resets:
                if not 0 <= c < len(self.clocks):
                    raise InputError("reset clock out of range")
            for a in t.guard.atoms:
                if a.left >= len(self.clocks) or (a.right is not None and a.right >= len(self.clocks)):
                    raise InputError("guard clock out of range")

    @cached_property
    def cmax(self) -> tuple[int, ...]:
        out = [0] * len(self.clocks)
        for t in self.transitions:
            for a in t.guard.atoms:
                out[a.left] = max(out[a.left], a.bound)
                if a.right is not None:
                    out[a.right] = max(out[a.right], a.bound)
        return tuple(out)

    @cached_property
    def transitions_from(self) -> tuple[tuple[Transition, ...], ...]:
        out: list[list[Transition]] = [[] for _ in self.states]
        for t in self.transitions:
            out[t.source].append(t)
        return tuple(tuple(ts) for ts in out)


class Move(NamedTuple):
    """One round: wait into the ``delay`` region, then fire transition ``tid``."""

    delay: Region
    tid: int


@dataclass
class CompiledTimedGame:
    """Region-compiled arena; ``moves`` mirrors the arena's edge lists."""

    game: TimedGame
    arena: GameArena
    nodes: tuple[tuple[int, Region], ...]
    node_index: dict[tuple[int, Region], int]
    moves: tuple[tuple[Move, ...], ...]
    initial: int = 0


def compile_timed_game(game: TimedGame) -> CompiledTimedGame:
    """Expand the rounds of a timed game into a finite parity arena.

    Arena nodes are reachable (state, region) pairs; each edge is one
    full round of the owner: a delay along the region's time-successor
    chain followed by a transition enabled in the reached region.
    Nodes without any enabled round are left as dead ends (the parity
    solver scores them as lost for their owner).
    """
    cmax = game.cmax
    start = (game.initial, zero_region(cmax))
    order: list[tuple[int, Region]] = [start]
    index: dict[tuple[int, Region], int] = {start: 0}
    edges: list[tuple[int, ...]] = []
    moves: list[tuple[Move, ...]] = []
    i = 0
    while i < len(order):
        q, r = order[i]
        i += 1
        row_e: list[int] = []
        row_m: list[Move] = []
        chain = [r] if q in game.zero_delay else delay_chain(r)
        for r2 in chain:
            for t in game.transitions_from[q]:
                if not region_satisfies(r2, t.guard):
                    continue
                tgt = (t.target, region_reset(r2, t.resets))
                j = index.get(tgt)
                if j is None:
                    j = len(order)
                    index[tgt] = j
                    order.append(tgt)
                row_e.append(j)
                row_m.append(Move(r2, t.tid))
        edges.append(tuple(row_e))
        moves.append(tuple(row_m))
    owners = tuple(game.owners[q] for q, _ in order)
    prios = tuple(game.priorities[q] for q, _ in order)
    labels = tuple(f"{game.states[q]} | {r.describe(game.clocks)}" for q, r in order)
    arena = GameArena(owners, prios, tuple(edges), labels)
    return CompiledTimedGame(game, arena, tuple(order), index, tuple(moves))


@dataclass
class TimedGameResult:
    game: TimedGame
    compiled: CompiledTimedGame
    parity: ParityResult

    @property
    def winner(self) -> Player:
        return self.parity.winners[self.compiled.initial]

    def winning_moves(self, player: Player) -> dict[int, Move]:
        """The player's winning move per arena node, where one exists."""
        return {
            v: self.compiled.moves[v][e]
            for v, e in self.parity.strategy[player].items()
        }


def solve_timed_game(
    game: TimedGame, condition: TimedAutomaton | None = None
) -> TimedGameResult:
    """Solve a timed game exactly.

    Without a condition the game's own priorities are the objective.
    With one, the game is first composed with the condition automaton
    (see :func:`compose`) and P2 wins iff the emitted timed letter
    sequence is accepted by the condition.
    """
    if condition is not None:
        game = compose(game, condition)
    compiled = compile_timed_game(game)
    return TimedGameResult(game, compiled, solve_parity(compiled.arena))


def _fresh_clock_names(base: tuple[str, ...], extra: tuple[str, ...]) -> tuple[str, ...]:
    taken = set(base)
    out = []
    for c in extra:
        name = c
        while name in taken:
            name += "'"
        taken.add(name)
        out.append(name)
    return tuple(out)


def compose(game: TimedGame, condition: TimedAutomaton) -> TimedGame:
    """Product of a timed game with a deterministic observer automaton.

    The observer reads every letter the game emits, at the same time
    point, and its acceptance (converted to parity) replaces the game's
    own priorities as the objective.  The observer must be
    deterministic over the game's alphabet; it is completed with a
    rejecting sink first if needed.  After each game transition a
    zero-delay bookkeeping state performs the observer's matching step;
    the choice there is forced, so its P2 ownership is irrelevant.
    Note that a player stuck in the composed game still loses,
    whatever the observer state.
    """
    missing = set(game.alphabet) - set(condition.alphabet)
    if missing:
        raise InputError(f"condition does not read letters {sorted(missing)}")
    if not is_deterministic(condition):
        raise InputError("condition automaton must be deterministic")
    cond = as_parity(validate(condition).completed)

    cond_clocks = _fresh_clock_names(game.clocks, cond.clocks)
    clocks = game.clocks + cond_clocks
    offset = len(game.clocks)

    # Keys: ("r", q, c) for rounds, ("m", q, c, letter) for observer steps.
    start = ("r", game.initial, cond.initial)
    order: list[tuple] = [start]
    index: dict[tuple, int] = {start: 0}
    trans_raw: list[tuple[int, Transition]] = []
    i = 0
    while i < len(order):
        key = order[i]
        src = i
        i += 1
        if key[0] == "r":
            _, q, c = key
            for t in game.transitions_from[q]:
                tgt_key = ("m", t.target, c, t.letter)
                j = index.get(tgt_key)
                if j is None:
                    j = len(order)
                    index[tgt_key] = j
                    order.append(tgt_key)
                trans_raw.append((src, Transition(t.tid, src, t.guard, t.letter, t.resets, j)))
        else:
            _, q, c, letter = key
            for u in cond.transitions_by_letter.get((c, letter), ()):
                tgt_key = ("r", q, u.target)
                j = index.get(tgt_key)
                if j is None:
                    j = len(order)
                    index[tgt_key] = j
                    order.append(tgt_key)
                guard = u.guard.shifted(offset)
                resets = frozenset(offset + x for x in u.resets)
                trans_raw.append((src, Transition(u.tid, src, guard, letter, resets, j)))

    states = []
    seen_names: dict[str, int] = {}
    for key in order:
        if key[0] == "r":
            name = f"({game.states[key[1]]},{cond.states[key[2]]})"
        else:
            name = f"({game.states[key[1]]},{cond.states[key[2]]}@{key[3]})"
        if name in seen_names:
            seen_names[name] += 1
            name = f"{name}#{seen_names[name]}"
        else:
            seen_names[name] = 0
        states.append(name)

    owners = tuple(
        game.owners[key[1]] if key[0] == "r" else Player.P2 for key in order
    )
    priorities = tuple(cond.priority_of(key[2]) for key in order)
    zero_delay = frozenset(
        v
        for v, key in enumerate(order)
        if key[0] == "m" or key[1] in game.zero_delay
    )
    transitions = tuple(
        Transition(k, src, t.guard, t.letter, t.resets, t.target)
        for k, (src, t) in enumerate(trans_raw)
    )
    return TimedGame(
        f"{game.name}|{condition.name}",
        tuple(states),
        owners,
        clocks,
        game.alphabet,
        transitions,
        priorities,
        initial=0,
        zero_delay=zero_delay,
    )
