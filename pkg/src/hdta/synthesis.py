"""Reactive synthesis against timed specifications over paired letters.

A specification automaton reads letters of the form ``input/output``.
The environment proposes a delay and an input; the controller must then
answer with an output, immediately, so that the produced timed word of
pairs is accepted by the specification.  Solving is by reduction to a
timed parity game played directly on the specification: a round splits
into an environment half-move (delay plus input letter) and a
zero-delay controller half-move that simultaneously picks the output
*and* the specification transition to advance along, so the play
carries a run of the automaton with it.  The reduction is winner-exact
when the specification resolves its nondeterminism on the fly, i.e. is
history-deterministic; for acceptance kinds where that cannot be
verified here the caller must vouch for it.

The controller extracted from a winning strategy is a finite Mealy
machine over (specification state, clock region) memory: it tracks the
clock valuation exactly, looks up the region reached after the
environment's delay, and answers with an output letter plus the
specification transition whose resets and target update the memory.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .hd import check_hd
from .parity import Player
from .regions import Region, region_of
from .ta import (
    TRUE,
    AcceptanceKind,
    InputError,
    TimedAutomaton,
    Transition,
    as_parity,
    is_deterministic,
    validate,
)
from .timed_games import TimedGame, TimedGameResult, solve_timed_game

__all__ = [
    "Controller",
    "SynthesisResult",
    "delta_annotate",
    "solve_synthesis",
    "split_letter",
]


def split_letter(letter: str) -> tuple[str, str]:
    """Split a paired letter ``input/output`` at its first slash."""
    inp, sep, out = letter.partition("/")
    if not sep:
        raise InputError(f"letter {letter!r} is not an input/output pair")
    return inp, out


def delta_annotate(ta: TimedAutomaton) -> TimedAutomaton:
    """Tag every letter with its transition id, exposing runs as words.

    The result reads ``letter#tid`` where the original read ``letter``
    and is deterministic by construction: each annotated letter occurs
    on exactly one transition.  Words of the annotated automaton are
    therefore runs of the original, and the acceptance carries over
    unchanged.
    """
    if not ta.transitions:
        raise InputError("cannot annotate an automaton without transitions")
    letters = tuple(f"{t.letter}#{t.tid}" for t in ta.transitions)
    rows = tuple(
        Transition(t.tid, t.source, t.guard, letters[t.tid], t.resets, t.target)
        for t in ta.transitions
    )
    return TimedAutomaton(
        ta.name + "_ann", ta.states, ta.initial, ta.clocks, letters, rows, ta.acceptance
    )


@dataclass(frozen=True)
class Controller:
    """Region-level Mealy controller ``(state, region, input) -> output``.

    ``automaton`` is the parity form of the specification that the rule
    targets refer to; ``rules`` maps the specification state, the clock
    region reached *after* the environment's delay and the input letter
    to the output letter and the specification transition to take.
    """

    automaton: TimedAutomaton
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    initial: int
    caps: tuple[int, ...]
    rules: dict[tuple[int, Region, str], tuple[str, int]]

    def respond(self, state: int, values: Sequence[Fraction], inp: str) -> tuple[str, int]:
        """Output letter and transition for an already-delayed valuation."""
        region = region_of(values, self.caps)
        try:
            return self.rules[(state, region, inp)]
        except KeyError:
            raise InputError(
                f"no rule for state {self.automaton.states[state]!r}, "
                f"region {region.describe(self.automaton.clocks)!r}, input {inp!r}"
            ) from None

    def step(
        self, state: int, values: Sequence[Fraction], delay: Fraction, inp: str
    ) -> tuple[str, int, tuple[Fraction, ...]]:
        """Advance one round: delay, consult the rules, apply the move."""
        if delay < 0:
            raise InputError("negative delay")
        delayed = tuple(v + delay for v in values)
        out, tid = self.respond(state, delayed, inp)
        t = self.automaton.transitions[tid]
        updated = tuple(
            Fraction(0) if c in t.resets else v for c, v in enumerate(delayed)
        )
        return out, t.target, updated

    def to_json(self) -> dict:
        """The controller as a JSON-ready table keyed by state, region and input."""
        ta = self.automaton
        rules = {}
        for (q, r, inp), (out, tid) in sorted(
            self.rules.items(),
            key=lambda item: (item[0][0], item[0][1].describe(ta.clocks), item[0][2]),
        ):
            rules[f"{ta.states[q]}|{r.describe(ta.clocks)}|{inp}"] = {
                "output": out,
                "transition": tid,
            }
        return {
            "automaton": ta.name,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "clocks": list(ta.clocks),
            "initial": ta.states[self.initial],
            "rules": rules,
        }


@dataclass(frozen=True)
class SynthesisResult:
    """Realisability verdict with a controller when one exists."""

    realisable: bool
    controller: Controller | None
    game: TimedGameResult
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]


def _pair_game(
    spec: TimedAutomaton, inputs: tuple[str, ...]
) -> tuple[TimedGame, dict[int, tuple[int, str]]]:
    """The synthesis game on an annotated parity specification."""
    n = len(spec.states)
    prios = spec.acceptance.priorities
    env_names = tuple(f"env{q}:{name}" for q, name in enumerate(spec.states))
    ctl_names = []
    ctl_of: dict[int, tuple[int, str]] = {}
    ctl_index: dict[tuple[int, str], int] = {}
    for q, name in enumerate(spec.states):
        for inp in inputs:
            idx = n + len(ctl_names)
            ctl_names.append(f"ctl{q}:{inp}")
            ctl_of[idx] = (q, inp)
            ctl_index[(q, inp)] = idx
    states = env_names + tuple(ctl_names)
    owners = (Player.P1,) * n + (Player.P2,) * len(ctl_names)
    priorities = prios + tuple(prios[q] for q, _ in ctl_of.values())
    rows: list[Transition] = []
    for q in range(n):
        for inp in inputs:
            rows.append(
                Transition(len(rows), q, TRUE, inp, frozenset(), ctl_index[(q, inp)])
            )
    for t in spec.transitions:
        base = t.letter.rpartition("#")[0]
        inp = split_letter(base)[0]
        rows.append(
            Transition(
                len(rows), ctl_index[(t.source, inp)], t.guard, t.letter, t.resets, t.target
            )
        )
    game = TimedGame(
        name=spec.name + "_synth",
        states=states,
        owners=owners,
        clocks=spec.clocks,
        alphabet=inputs + spec.alphabet,
        transitions=tuple(rows),
        priorities=priorities,
        initial=spec.initial,
        zero_delay=frozenset(range(n, len(states))),
    )
    return game, ctl_of


def _extract_controller(
    result: TimedGameResult,
    parity_spec: TimedAutomaton,
    ctl_of: dict[int, tuple[int, str]],
    inputs: tuple[str, ...],
    outputs: tuple[str, ...],
) -> Controller:
    """Read the winning strategy off as a region-level rule table.

    Walks exactly the arena nodes reachable when the controller follows
    its strategy and the environment does anything, so every rule the
    controller can ever need is present and every present rule is a
    winning move.
    """
    compiled = result.compiled
    strategy = result.parity.strategy[Player.P2]
    n_env = len(parity_spec.states)
    rules: dict[tuple[int, Region, str], tuple[str, int]] = {}
    seen = {compiled.initial}
    stack = [compiled.initial]
    while stack:
        v = stack.pop()
        game_state, region = compiled.nodes[v]
        if game_state < n_env:
            targets = compiled.arena.edges[v]
        else:
            q, inp = ctl_of[game_state]
            e = strategy[v]
            move = compiled.moves[v][e]
            t = result.game.transitions[move.tid]
            base = t.letter.rpartition("#")[0]
            out = split_letter(base)[1]
            rules[(q, region, inp)] = (out, int(t.letter.rpartition("#")[2]))
            targets = (compiled.arena.edges[v][e],)
        for w in targets:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return Controller(
        automaton=parity_spec,
        inputs=inputs,
        outputs=outputs,
        initial=parity_spec.initial,
        caps=result.game.cmax,
        rules=rules,
    )


def solve_synthesis(ta: TimedAutomaton, assume_hd: bool = False) -> SynthesisResult:
    """Decide realisability of a paired-letter specification.

    The specification must resolve its nondeterminism on the fly for
    the verdict to be exact; this is verified for safety and
    reachability acceptance unless ``assume_hd`` is set (deterministic
    specifications pass trivially), and taken on trust for the other
    kinds.  Returns the verdict, the solved game,
    and a winning :class:`Controller` when the verdict is positive.
    """
    seen_inputs: list[str] = []
    seen_outputs: list[str] = []
    for letter in ta.alphabet:
        inp, out = split_letter(letter)
        if inp not in seen_inputs:
            seen_inputs.append(inp)
        if out not in seen_outputs:
            seen_outputs.append(out)
    inputs = tuple(sorted(seen_inputs))
    outputs = tuple(sorted(seen_outputs))
    if not assume_hd and ta.acceptance.kind in (
        AcceptanceKind.SAFETY,
        AcceptanceKind.REACHABILITY,
    ):
        if not is_deterministic(ta) and not check_hd(ta):
            raise InputError("specification must be history-deterministic")
    parity_spec = as_parity(validate(ta).completed)
    annotated = delta_annotate(parity_spec)
    game, ctl_of = _pair_game(annotated, inputs)
    result = solve_timed_game(game)
    realisable = result.winner is Player.P2
    controller = None
    if realisable:
        controller = _extract_controller(result, parity_spec, ctl_of, inputs, outputs)
    return SynthesisResult(realisable, controller, result, inputs, outputs)
