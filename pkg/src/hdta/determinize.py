"""Determinization of history-deterministic timed automata.

A history-deterministic automaton carries a region-based resolver: a
single choice of transition per (state, region, letter) whose runs
accept every word of the language.  Keeping exactly the chosen
transition per region — with the region's characteristic guard conjoined
— therefore yields a deterministic automaton over the same states with
the same language.  Regions the resolver never reaches are routed to a
rejecting sink so the output stays input-complete.

The emitted guards contain difference atoms (for the fractional
ordering inside a region), so the output is meant for exact-semantics
consumers and the simulation game, not for re-entry into the
diagonal-free region constructions.
"""

from __future__ import annotations

from .hd import analyze_hd
from .regions import Region, delay_chain, enumerate_regions, region_guard
from .ta import TRUE, InputError, TimedAutomaton, Transition

__all__ = ["determinize_hd"]


def _fresh_sink_name(states: tuple[str, ...]) -> str:
    name = "_sink"
    while name in states:
        name += "'"
    return name


def determinize_hd(ta: TimedAutomaton) -> TimedAutomaton:
    """Deterministic automaton with the same states and language.

    Needs a history-deterministic input with safety or reachability
    acceptance.  The state set is preserved, except that a rejecting
    sink is appended when the input was not already complete or some
    (region, letter) entry is unreachable under the resolver.
    """
    res = analyze_hd(ta)
    if not res.hd:
        raise InputError("determinization needs a history-deterministic automaton")
    resolver = res.resolver
    assert resolver is not None
    tac = resolver.automaton

    fire: dict[int, set[Region]] = {q: set() for q in range(len(tac.states))}
    for q, entry in resolver.domain:
        fire[q].update(delay_chain(entry))

    regions = enumerate_regions(tac.cmax)
    states = tac.states
    sink = res.report.sink
    need_sink = any(
        len(fire[q]) < len(regions) for q in range(len(states))
    )
    if sink is None and need_sink:
        sink = len(states)
        states = states + (_fresh_sink_name(states),)

    rows: list[Transition] = []
    for q in range(len(tac.states)):
        covered = fire[q]
        for r in regions:
            characteristic = region_guard(r)
            if r in covered:
                for a in tac.alphabet:
                    t = tac.transitions[resolver.choose(q, r, a)]
                    rows.append(
                        Transition(
                            len(rows), q, t.guard.conjoin(characteristic), a, t.resets, t.target
                        )
                    )
            else:
                for a in tac.alphabet:
                    rows.append(Transition(len(rows), q, characteristic, a, frozenset(), sink))
    if sink is not None and sink >= len(tac.states):
        # A freshly appended sink: absorbing and rejecting (outside the
        # safe set, outside the final set).
        for a in tac.alphabet:
            rows.append(Transition(len(rows), sink, TRUE, a, frozenset(), sink))

    return TimedAutomaton(
        ta.name + "_det",
        states,
        tac.initial,
        tac.clocks,
        tac.alphabet,
        tuple(rows),
        tac.acceptance,
    )
