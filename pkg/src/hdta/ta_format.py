"""Plain-text ``.ta`` documents and DOT exporters.

The ``.ta`` format is a line-oriented description of a timed automaton
or a timed game.  Comments run from a ``#`` at the start of a line or
after whitespace to the end of the line.  The sections are:

    ta NAME
    clocks x y
    alphabet a b
    acceptance safety | reachability | buchi | cobuchi | parity
    initial q0
    state q0 [safe|unsafe|final|priority N] [owner P1|P2] [urgent]
    trans q0 -> q1 on a when x < 1 & y - x <= 0 reset {x}

State flags must match the acceptance kind: ``safe``/``unsafe`` for
safety (default safe), ``final`` for reachability, Buchi and co-Buchi
(default not final), ``priority N`` for parity (default 0).  Owners
turn the document into a game; ``urgent`` marks a state whose owner
must move without waiting.  The ``when`` clause defaults to ``true``
and the ``reset`` clause to the empty set.  A guard is a conjunction
(``&``) of atoms ``x < 3``, ``x - y <= 0``, ``x == 1`` (the equality
desugars into ``<=`` and ``>=``); a top-level disjunction ``|`` splits
the line into one transition per disjunct.  Printing is canonical, so
``parse_ta(print_ta(doc))`` reproduces the document exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .parity import GameArena, Player
from .regions import RegionGraph
from .synthesis import Controller
from .ta import (
    Acceptance,
    AcceptanceKind,
    Guard,
    GuardAtom,
    InputError,
    Rel,
    TimedAutomaton,
    Transition,
)
from .timed_games import TimedGame

__all__ = ["TaDocument", "export_dot", "parse_ta", "print_ta"]


@dataclass(frozen=True)
class TaDocument:
    """A parsed ``.ta`` document: an automaton, optionally with owners."""

    automaton: TimedAutomaton
    owners: tuple[Player, ...] | None = None
    urgent: frozenset[int] = frozenset()

    @property
    def is_game(self) -> bool:
        return self.owners is not None

    def as_game(self) -> TimedGame:
        """The document as a timed game (owners and parity required)."""
        ta = self.automaton
        if self.owners is None:
            raise InputError("document has no state owners; not a game")
        if ta.acceptance.kind is not AcceptanceKind.PARITY:
            raise InputError("games need parity acceptance (state priorities)")
        return TimedGame(
            name=ta.name,
            states=ta.states,
            owners=self.owners,
            clocks=ta.clocks,
            alphabet=ta.alphabet,
            transitions=ta.transitions,
            priorities=ta.acceptance.priorities,
            initial=ta.initial,
            zero_delay=self.urgent,
        )


_COMMENT = re.compile(r"(^|\s)#.*$")
_TRANS = re.compile(
    r"^(\S+)\s*->\s*(\S+)\s+on\s+(\S+)"
    r"(?:\s+when\s+(.*?))?"
    r"(?:\s+reset\s*\{([^}]*)\})?$"
)
_ATOM = re.compile(r"^(\w+)\s*(?:-\s*(\w+)\s*)?(<=|>=|==|<|>)\s*(\d+)$")

_FLAG_KINDS = {
    "safe": (AcceptanceKind.SAFETY,),
    "unsafe": (AcceptanceKind.SAFETY,),
    "final": (
        AcceptanceKind.REACHABILITY,
        AcceptanceKind.BUCHI,
        AcceptanceKind.COBUCHI,
    ),
    "priority": (AcceptanceKind.PARITY,),
}


def _parse_guard(text: str, clock_index: dict[str, int], where: str) -> list[Guard]:
    """One guard per ``|``-disjunct; conjunctions of atoms inside."""
    guards = []
    for disjunct in text.split("|"):
        atoms: list[GuardAtom] = []
        for part in disjunct.split("&"):
            part = part.strip()
            if not part:
                raise InputError(f"{where}: empty guard conjunct")
            if part == "true":
                continue
            m = _ATOM.match(part)
            if m is None:
                raise InputError(f"{where}: cannot parse guard atom {part!r}")
            left_name, right_name, rel, bound = m.groups()
            if left_name not in clock_index:
                raise InputError(f"{where}: unknown clock {left_name!r}")
            left = clock_index[left_name]
            right = None
            if right_name is not None:
                if right_name not in clock_index:
                    raise InputError(f"{where}: unknown clock {right_name!r}")
                right = clock_index[right_name]
            if rel == "==":
                atoms.append(GuardAtom(left, Rel.LE, int(bound), right))
                atoms.append(GuardAtom(left, Rel.GE, int(bound), right))
            else:
                atoms.append(GuardAtom(left, Rel(rel), int(bound), right))
        guards.append(Guard.of(*atoms))
    return guards


def parse_ta(text: str) -> TaDocument:
    """Parse a ``.ta`` document; errors carry the offending line number."""
    name: str | None = None
    clocks: tuple[str, ...] | None = None
    alphabet: tuple[str, ...] | None = None
    kind: AcceptanceKind | None = None
    initial_name: str | None = None
    state_names: list[str] = []
    state_lines: dict[str, int] = {}
    flags: dict[str, dict] = {}
    trans_lines: list[tuple[int, str]] = []

    for ln, raw in enumerate(text.splitlines(), 1):
        line = _COMMENT.sub(r"\1", raw).strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        where = f"line {ln}"
        if head == "ta":
            if not rest or len(rest.split()) != 1:
                raise InputError(f"{where}: expected 'ta NAME'")
            name = rest
        elif head == "clocks":
            clocks = tuple(rest.split())
        elif head == "alphabet":
            alphabet = tuple(rest.split())
        elif head == "acceptance":
            try:
                kind = AcceptanceKind(rest)
            except ValueError:
                raise InputError(f"{where}: unknown acceptance {rest!r}") from None
        elif head == "initial":
            if len(rest.split()) != 1:
                raise InputError(f"{where}: expected 'initial STATE'")
            initial_name = rest
        elif head == "state":
            tokens = rest.split()
            if not tokens:
                raise InputError(f"{where}: expected 'state NAME [flags]'")
            sname = tokens[0]
            if sname in state_lines:
                raise InputError(f"{where}: state {sname!r} declared twice")
            state_lines[sname] = ln
            state_names.append(sname)
            f: dict = {}
            i = 1
            while i < len(tokens):
                tok = tokens[i]
                if tok in ("safe", "unsafe", "final"):
                    f["set"] = tok
                elif tok == "priority":
                    i += 1
                    if i == len(tokens) or not tokens[i].isdigit():
                        raise InputError(f"{where}: 'priority' needs a number")
                    f["priority"] = int(tokens[i])
                elif tok == "owner":
                    i += 1
                    if i == len(tokens) or tokens[i] not in ("P1", "P2"):
                        raise InputError(f"{where}: 'owner' needs P1 or P2")
                    f["owner"] = Player.P1 if tokens[i] == "P1" else Player.P2
                elif tok == "urgent":
                    f["urgent"] = True
                else:
                    raise InputError(f"{where}: unknown state flag {tok!r}")
                i += 1
            flags[sname] = f
        elif head == "trans":
            trans_lines.append((ln, rest))
        else:
            raise InputError(f"{where}: unknown directive {head!r}")

    if name is None:
        raise InputError("missing 'ta NAME' line")
    if alphabet is None:
        raise InputError("missing 'alphabet' line")
    if kind is None:
        raise InputError("missing 'acceptance' line")
    if not state_names:
        raise InputError("no 'state' lines")
    clocks = clocks if clocks is not None else ()
    state_index = {s: i for i, s in enumerate(state_names)}
    clock_index = {c: i for i, c in enumerate(clocks)}

    for sname, f in flags.items():
        where = f"line {state_lines[sname]}"
        if "set" in f and kind not in _FLAG_KINDS[f["set"]]:
            raise InputError(
                f"{where}: flag {f['set']!r} does not fit {kind.value} acceptance"
            )
        if "priority" in f and kind is not AcceptanceKind.PARITY:
            raise InputError(f"{where}: 'priority' needs parity acceptance")

    rows: list[Transition] = []
    for ln, rest in trans_lines:
        where = f"line {ln}"
        m = _TRANS.match(rest)
        if m is None:
            raise InputError(
                f"{where}: expected 'trans Q -> Q2 on LETTER [when GUARD] [reset {{...}}]'"
            )
        src_name, dst_name, letter, guard_text, reset_text = m.groups()
        for s in (src_name, dst_name):
            if s not in state_index:
                raise InputError(f"{where}: unknown state {s!r}")
        if letter not in alphabet:
            raise InputError(f"{where}: letter {letter!r} not in the alphabet")
        resets = set()
        for cname in (x.strip() for x in (reset_text or "").split(",")):
            if not cname:
                continue
            if cname not in clock_index:
                raise InputError(f"{where}: unknown clock {cname!r} in reset")
            resets.add(clock_index[cname])
        resets = frozenset(resets)
        guards = _parse_guard(guard_text or "true", clock_index, where)
        for gd in guards:
            rows.append(
                Transition(
                    len(rows), state_index[src_name], gd, letter, resets, state_index[dst_name]
                )
            )

    if kind is AcceptanceKind.SAFETY:
        acc = Acceptance.safety(
            frozenset(
                i for i, s in enumerate(state_names) if flags[s].get("set") != "unsafe"
            )
        )
    elif kind is AcceptanceKind.PARITY:
        acc = Acceptance.parity(
            tuple(flags[s].get("priority", 0) for s in state_names)
        )
    else:
        members = frozenset(
            i for i, s in enumerate(state_names) if flags[s].get("set") == "final"
        )
        acc = Acceptance(kind, members)

    initial = 0
    if initial_name is not None:
        if initial_name not in state_index:
            raise InputError(f"initial state {initial_name!r} never declared")
        initial = state_index[initial_name]

    owners = None
    owned = [s for s in state_names if "owner" in flags[s]]
    if owned:
        missing = [s for s in state_names if "owner" not in flags[s]]
        if missing:
            raise InputError(
                f"line {state_lines[missing[0]]}: state {missing[0]!r} has no owner "
                "but other states do"
            )
        owners = tuple(flags[s]["owner"] for s in state_names)
    urgent = frozenset(
        i for i, s in enumerate(state_names) if flags[s].get("urgent")
    )

    ta = TimedAutomaton(
        name, tuple(state_names), initial, clocks, alphabet, tuple(rows), acc
    )
    return TaDocument(ta, owners, urgent)


def _format_atom(a: GuardAtom, clocks: tuple[str, ...]) -> str:
    lhs = clocks[a.left] if a.right is None else f"{clocks[a.left]} - {clocks[a.right]}"
    return f"{lhs} {a.rel.value} {a.bound}"


def format_guard(g: Guard, clocks: tuple[str, ...]) -> str:
    """Canonical text for a conjunctive guard (``true`` when empty)."""
    if not g.atoms:
        return "true"
    return " & ".join(_format_atom(a, clocks) for a in g.atoms)


def print_ta(obj: TaDocument | TimedAutomaton | TimedGame) -> str:
    """Canonical ``.ta`` text; lines mirror :func:`parse_ta`'s grammar."""
    if isinstance(obj, TimedAutomaton):
        doc = TaDocument(obj)
    elif isinstance(obj, TimedGame):
        doc = TaDocument(
            TimedAutomaton(
                obj.name,
                obj.states,
                obj.initial,
                obj.clocks,
                obj.alphabet,
                obj.transitions,
                Acceptance.parity(obj.priorities),
            ),
            owners=obj.owners,
            urgent=obj.zero_delay,
        )
    else:
        doc = obj
    ta = doc.automaton
    acc = ta.acceptance
    out = [f"ta {ta.name}"]
    out.append(("clocks " + " ".join(ta.clocks)).rstrip())
    out.append("alphabet " + " ".join(ta.alphabet))
    out.append(f"acceptance {acc.kind.value}")
    out.append(f"initial {ta.states[ta.initial]}")
    for i, s in enumerate(ta.states):
        parts = [f"state {s}"]
        if acc.kind is AcceptanceKind.SAFETY:
            parts.append("safe" if i in acc.states else "unsafe")
        elif acc.kind is AcceptanceKind.PARITY:
            parts.append(f"priority {acc.priorities[i]}")
        elif i in acc.states:
            parts.append("final")
        if doc.owners is not None:
            parts.append(f"owner {doc.owners[i].name}")
        if i in doc.urgent:
            parts.append("urgent")
        out.append(" ".join(parts))
    for t in ta.transitions:
        line = (
            f"trans {ta.states[t.source]} -> {ta.states[t.target]} "
            f"on {t.letter} when {format_guard(t.guard, ta.clocks)}"
        )
        if t.resets:
            line += " reset {" + ", ".join(ta.clocks[c] for c in sorted(t.resets)) + "}"
        out.append(line)
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# DOT exporters.


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot_automaton(ta: TimedAutomaton) -> str:
    acc = ta.acceptance
    lines = [f"digraph {_quote(ta.name)} {{", "  rankdir=LR;", "  __init [shape=point];"]
    for i, s in enumerate(ta.states):
        if acc.kind is AcceptanceKind.PARITY:
            label, accented = f"{s} ({acc.priorities[i]})", False
        else:
            label, accented = s, i in acc.states
        shape = "doublecircle" if accented else "circle"
        lines.append(f"  n{i} [label={_quote(label)}, shape={shape}];")
    lines.append(f"  __init -> n{ta.initial};")
    for t in ta.transitions:
        label = f"{t.letter} | {format_guard(t.guard, ta.clocks)}"
        if t.resets:
            label += " | {" + ", ".join(ta.clocks[c] for c in sorted(t.resets)) + "}"
        lines.append(f"  n{t.source} -> n{t.target} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_region_graph(rg: RegionGraph) -> str:
    ta = rg.ta
    lines = [f"digraph {_quote(ta.name + '_regions')} {{", "  rankdir=LR;"]
    for i, (q, r) in enumerate(rg.nodes):
        label = f"{ta.states[q]} | {r.describe(ta.clocks) or 'origin'}"
        lines.append(f"  n{i} [label={_quote(label)}, shape=box];")
    for i, outs in enumerate(rg.edges):
        for e in outs:
            if e.kind == "delay":
                lines.append(f"  n{i} -> n{e.target} [style=dashed, label=\"delay\"];")
            else:
                label = f"t{e.tid}:{ta.transitions[e.tid].letter}"
                lines.append(f"  n{i} -> n{e.target} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_arena(arena: GameArena) -> str:
    lines = ["digraph arena {", "  rankdir=LR;"]
    for v in range(arena.size):
        name = str(arena.labels[v]) if arena.labels is not None else f"v{v}"
        label = f"{name} : {arena.priorities[v]}"
        shape = "diamond" if arena.owners[v] is Player.P1 else "ellipse"
        lines.append(f"  n{v} [label={_quote(label)}, shape={shape}];")
    for v in range(arena.size):
        for w in arena.edges[v]:
            lines.append(f"  n{v} -> n{w};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_controller(ctrl: Controller) -> str:
    ta = ctrl.automaton
    lines = [f"digraph {_quote(ta.name + '_controller')} {{", "  rankdir=LR;"]
    used = sorted(
        {q for q, _, _ in ctrl.rules}
        | {ta.transitions[tid].target for _, tid in ctrl.rules.values()}
        | {ctrl.initial}
    )
    lines.append("  __init [shape=point];")
    for q in used:
        lines.append(f"  n{q} [label={_quote(ta.states[q])}, shape=circle];")
    lines.append(f"  __init -> n{ctrl.initial};")
    for (q, r, inp), (out, tid) in sorted(
        ctrl.rules.items(),
        key=lambda kv: (kv[0][0], kv[0][1].describe(ta.clocks), kv[0][2]),
    ):
        label = f"{r.describe(ta.clocks) or 'origin'} , {inp} / {out}"
        lines.append(f"  n{q} -> n{ta.transitions[tid].target} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(obj) -> str:
    """Deterministic DOT text for automata, region graphs, arenas, controllers."""
    if isinstance(obj, TimedAutomaton):
        return _dot_automaton(obj)
    if isinstance(obj, TaDocument):
        return _dot_automaton(obj.automaton)
    if isinstance(obj, TimedGame):
        return _dot_automaton(_game_as_ta(obj))
    if isinstance(obj, RegionGraph):
        return _dot_region_graph(obj)
    if isinstance(obj, GameArena):
        return _dot_arena(obj)
    if isinstance(obj, Controller):
        return _dot_controller(obj)
    raise InputError(f"no DOT exporter for {type(obj).__name__}")


def _game_as_ta(game: TimedGame) -> TimedAutomaton:
    return TimedAutomaton(
        game.name,
        game.states,
        game.initial,
        game.clocks,
        game.alphabet,
        game.transitions,
        Acceptance.parity(game.priorities),
    )
