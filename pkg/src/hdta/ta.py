"""Core timed-automaton model with exact rational semantics.

States are indices into a name table, clocks are indices, guards are
conjunctions of atoms ``x <> c`` or ``x - y <> c`` with integer bounds,
and all clock values are ``fractions.Fraction``.  Acceptance is
state-based: safety, reachability, Buchi, co-Buchi or parity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from . import feasibility
from .feasibility import LinearConstraint


class InputError(ValueError):
    """Malformed model or argument (CLI exit code 2)."""


class UnsupportedError(Exception):
    """Construct outside the supported fragment (CLI exit code 3)."""


class WitnessRealizationError(Exception):
    """A verdict is known but no ultimately periodic witness was realized."""


class Rel(enum.Enum):
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="

    def holds(self, lhs: Fraction, rhs: Fraction | int) -> bool:
        if self is Rel.LT:
            return lhs < rhs
        if self is Rel.LE:
            return lhs <= rhs
        if self is Rel.GT:
            return lhs > rhs
        return lhs >= rhs

    def negate(self) -> "Rel":
        return {Rel.LT: Rel.GE, Rel.LE: Rel.GT, Rel.GT: Rel.LE, Rel.GE: Rel.LT}[self]


@dataclass(frozen=True)
class GuardAtom:
    """``left <> bound`` or ``left - right <> bound`` (clock indices)."""

    left: int
    rel: Rel
    bound: int
    right: int | None = None

    def __post_init__(self) -> None:
        if self.bound < 0:
            raise InputError(f"negative guard bound {self.bound}")
        if self.right is not None and self.right == self.left:
            raise InputError("diagonal atom comparing a clock with itself")

    @property
    def is_diagonal(self) -> bool:
        return self.right is not None

    def holds(self, values: Sequence[Fraction]) -> bool:
        lhs = values[self.left]
        if self.right is not None:
            lhs = lhs - values[self.right]
        return self.rel.holds(lhs, self.bound)

    def negated(self) -> "GuardAtom":
        return GuardAtom(self.left, self.rel.negate(), self.bound, self.right)

    def _key(self) -> tuple:
        return (self.left, -1 if self.right is None else self.right, self.rel.value, self.bound)


def _atom_sort_key(atom: GuardAtom) -> tuple:
    return atom._key()


@dataclass(frozen=True)
class Guard:
    """Conjunction of guard atoms; the empty conjunction is ``true``."""

    atoms: tuple[GuardAtom, ...] = ()

    @staticmethod
    def of(*atoms: GuardAtom) -> "Guard":
        return Guard(tuple(sorted(atoms, key=_atom_sort_key)))

    @staticmethod
    def true() -> "Guard":
        return Guard(())

    @property
    def is_true(self) -> bool:
        return not self.atoms

    @property
    def is_diagonal_free(self) -> bool:
        return all(not a.is_diagonal for a in self.atoms)

    def conjoin(self, other: "Guard") -> "Guard":
        return Guard.of(*(self.atoms + other.atoms))

    def holds(self, values: Sequence[Fraction]) -> bool:
        return all(a.holds(values) for a in self.atoms)

    def shifted(self, offset: int) -> "Guard":
        return Guard.of(
            *(
                GuardAtom(a.left + offset, a.rel, a.bound, None if a.right is None else a.right + offset)
                for a in self.atoms
            )
        )


def atom(left: int, rel: str, bound: int, right: int | None = None) -> GuardAtom:
    return GuardAtom(left, Rel(rel), bound, right)


def guard(*atoms_: GuardAtom) -> Guard:
    return Guard.of(*atoms_)


TRUE = Guard.true()


@dataclass(frozen=True)
class Transition:
    tid: int
    source: int
    guard: Guard
    letter: str
    resets: frozenset[int]
    target: int


class AcceptanceKind(enum.Enum):
    SAFETY = "safety"
    REACHABILITY = "reachability"
    BUCHI = "buchi"
    COBUCHI = "cobuchi"
    PARITY = "parity"


@dataclass(frozen=True)
class Acceptance:
    """State-based acceptance.

    ``states`` holds the safe set (safety), final set (reachability),
    the visited-infinitely-often set (Buchi) or the visited-finitely-
    often set (co-Buchi); ``priorities`` is the per-state priority map
    for parity (max priority seen infinitely often must be even).
    """

    kind: AcceptanceKind
    states: frozenset[int] = frozenset()
    priorities: tuple[int, ...] = ()

    @staticmethod
    def safety(safe: Iterable[int]) -> "Acceptance":
        return Acceptance(AcceptanceKind.SAFETY, frozenset(safe))

    @staticmethod
    def reachability(final: Iterable[int]) -> "Acceptance":
        return Acceptance(AcceptanceKind.REACHABILITY, frozenset(final))

    @staticmethod
    def buchi(rec: Iterable[int]) -> "Acceptance":
        return Acceptance(AcceptanceKind.BUCHI, frozenset(rec))

    @staticmethod
    def cobuchi(fin: Iterable[int]) -> "Acceptance":
        return Acceptance(AcceptanceKind.COBUCHI, frozenset(fin))

    @staticmethod
    def parity(priorities: Sequence[int]) -> "Acceptance":
        return Acceptance(AcceptanceKind.PARITY, frozenset(), tuple(priorities))


class Configuration(NamedTuple):
    state: int
    values: tuple[Fraction, ...]


FiniteTimedWord = tuple  # tuple[tuple[Fraction, str], ...]


@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic timed word ``prefix . cycle^omega``."""

    prefix: tuple[tuple[Fraction, str], ...]
    cycle: tuple[tuple[Fraction, str], ...]

    def __post_init__(self) -> None:
        if not self.cycle:
            raise InputError("lasso cycle must be nonempty")
        for d, _ in self.prefix + self.cycle:
            if d < 0:
                raise InputError("negative delay in timed word")


@dataclass(frozen=True)
class TimedAutomaton:
    name: str
    states: tuple[str, ...]
    initial: int
    clocks: tuple[str, ...]
    alphabet: tuple[str, ...]
    transitions: tuple[Transition, ...]
    acceptance: Acceptance

    def __post_init__(self) -> None:
        if not self.states:
            raise InputError("automaton needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise InputError("duplicate state names")
        if len(set(self.clocks)) != len(self.clocks):
            raise InputError("duplicate clock names")
        if not self.alphabet or len(set(self.alphabet)) != len(self.alphabet):
            raise InputError("alphabet must be nonempty without duplicates")
        if not 0 <= self.initial < len(self.states):
            raise InputError("initial state out of range")
        n = len(self.states)
        for i, t in enumerate(self.transitions):
            if t.tid != i:
                raise InputError("transition ids must match their position")
            if not (0 <= t.source < n and 0 <= t.target < n):
                raise InputError(f"transition {i} endpoint out of range")
            if t.letter not in self.alphabet:
                raise InputError(f"transition {i} letter {t.letter!r} not in alphabet")
            for c in t.resets:
                if not 0 <= c < len(self.clocks):
                    raise InputError(f"transition {i} resets unknown clock {c}")
            for a in t.guard.atoms:
                for c in (a.left,) if a.right is None else (a.left, a.right):
                    if not 0 <= c < len(self.clocks):
                        raise InputError(f"transition {i} guard uses unknown clock {c}")
        acc = self.acceptance
        if acc.kind is AcceptanceKind.PARITY:
            if len(acc.priorities) != n:
                raise InputError("parity acceptance needs one priority per state")
            if any(p < 0 for p in acc.priorities):
                raise InputError("negative priority")
        else:
            if any(not 0 <= q < n for q in acc.states):
                raise InputError("acceptance set state out of range")

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

    @cached_property
    def transitions_by_letter(self) -> dict[tuple[int, str], tuple[Transition, ...]]:
        out: dict[tuple[int, str], list[Transition]] = {}
        for t in self.transitions:
            out.setdefault((t.source, t.letter), []).append(t)
        return {k: tuple(v) for k, v in out.items()}

    @property
    def is_diagonal_free(self) -> bool:
        return all(t.guard.is_diagonal_free for t in self.transitions)

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise InputError(f"unknown state {name!r}") from None

    def priority_of(self, state: int) -> int:
        if self.acceptance.kind is not AcceptanceKind.PARITY:
            raise InputError("priority_of needs parity acceptance")
        return self.acceptance.priorities[state]


def initial_configuration(ta: TimedAutomaton) -> Configuration:
    return Configuration(ta.initial, tuple(Fraction(0) for _ in ta.clocks))


def eval_guard(g: Guard, values: Sequence[Fraction]) -> bool:
    return g.holds(values)


def delay(config: Configuration, d: Fraction | int) -> Configuration:
    d = Fraction(d)
    if d < 0:
        raise InputError("negative delay")
    return Configuration(config.state, tuple(v + d for v in config.values))


def apply_resets(values: Sequence[Fraction], resets: frozenset[int]) -> tuple[Fraction, ...]:
    zero = Fraction(0)
    return tuple(zero if i in resets else v for i, v in enumerate(values))


def discrete_successors(
    ta: TimedAutomaton, config: Configuration, letter: str
) -> list[tuple[Transition, Configuration]]:
    """Enabled ``letter`` transitions from ``config`` with resulting configurations."""
    out = []
    for t in ta.transitions_by_letter.get((config.state, letter), ()):
        if t.guard.holds(config.values):
            out.append((t, Configuration(t.target, apply_resets(config.values, t.resets))))
    return out


@dataclass(frozen=True)
class RunNode:
    """Node of a reduced run tree; edges are (delay or Transition, child)."""

    config: Configuration
    edges: tuple[tuple[object, "RunNode"], ...]


def reduced_run_tree(
    ta: TimedAutomaton, word: Sequence[tuple[Fraction, str]], config: Configuration | None = None
) -> RunNode:
    """All runs of ``ta`` over the finite timed word, sharing each delay step."""
    if config is None:
        config = initial_configuration(ta)

    def build(cfg: Configuration, idx: int) -> RunNode:
        if idx == len(word):
            return RunNode(cfg, ())
        d, letter = word[idx]
        waited = delay(cfg, d)
        children = tuple(
            (t, build(nxt, idx + 1)) for t, nxt in discrete_successors(ta, waited, letter)
        )
        return RunNode(cfg, ((Fraction(d), RunNode(waited, children)),))

    return build(config, 0)


def run_leaves(root: RunNode, depth: int) -> list[tuple[tuple[Transition, ...], Configuration]]:
    """Configurations reached by complete runs (``depth`` letters deep)."""
    out: list[tuple[tuple[Transition, ...], Configuration]] = []

    def walk(node: RunNode, path: tuple[Transition, ...], letters_done: int) -> None:
        if letters_done == depth:
            out.append((path, node.config))
            return
        for edge, child in node.edges:
            if isinstance(edge, Transition):
                walk(child, path + (edge,), letters_done + 1)
            else:
                walk(child, path, letters_done)

    walk(root, (), 0)
    return out


# ---------------------------------------------------------------------------
# Guard satisfiability (exact).


def guard_constraints(atoms: Iterable[GuardAtom], nclocks: int) -> list[LinearConstraint]:
    """Encode atoms plus clock nonnegativity as linear constraints."""
    cons = [LinearConstraint.make({i: -1}, False, 0) for i in range(nclocks)]
    for a in atoms:
        coeffs = {a.left: Fraction(1)}
        if a.right is not None:
            coeffs[a.right] = Fraction(-1)
        if a.rel is Rel.LT:
            cons.append(LinearConstraint.make(coeffs, True, a.bound))
        elif a.rel is Rel.LE:
            cons.append(LinearConstraint.make(coeffs, False, a.bound))
        elif a.rel is Rel.GT:
            cons.append(LinearConstraint.make({v: -c for v, c in coeffs.items()}, True, -a.bound))
        else:
            cons.append(LinearConstraint.make({v: -c for v, c in coeffs.items()}, False, -a.bound))
    return cons


def guards_satisfiable(nclocks: int, *guards: Guard) -> bool:
    """Is the conjunction of the given guards satisfiable by some valuation?"""
    atoms: list[GuardAtom] = []
    for g in guards:
        atoms.extend(g.atoms)
    return feasibility.feasible(guard_constraints(atoms, nclocks), nclocks)


def guard_model(nclocks: int, *guards: Guard) -> tuple[Fraction, ...] | None:
    atoms: list[GuardAtom] = []
    for g in guards:
        atoms.extend(g.atoms)
    model = feasibility.solve(guard_constraints(atoms, nclocks), nclocks)
    return None if model is None else tuple(model)


# ---------------------------------------------------------------------------
# Acceptance helpers and transforms.


def is_deterministic(ta: TimedAutomaton) -> bool:
    """No two transitions with the same source and letter can both fire."""
    n = len(ta.clocks)
    for ts in ta.transitions_by_letter.values():
        for i in range(len(ts)):
            for j in range(i + 1, len(ts)):
                if guards_satisfiable(n, ts[i].guard, ts[j].guard):
                    return False
    return True


def is_trivially_accepting(ta: TimedAutomaton) -> bool:
    """Syntactic check: every infinite run is accepting."""
    acc = ta.acceptance
    n = len(ta.states)
    if acc.kind is AcceptanceKind.SAFETY:
        return len(acc.states) == n
    if acc.kind is AcceptanceKind.BUCHI:
        return len(acc.states) == n
    if acc.kind is AcceptanceKind.REACHABILITY:
        return ta.initial in acc.states
    if acc.kind is AcceptanceKind.COBUCHI:
        return not acc.states
    return all(p % 2 == 0 for p in acc.priorities)


def _absorb_states(ta: TimedAutomaton, absorb: frozenset[int]) -> TimedAutomaton:
    """Replace all transitions out of ``absorb`` with true self-loops."""
    trans: list[Transition] = []
    for t in ta.transitions:
        if t.source not in absorb:
            trans.append(t)
    for q in sorted(absorb):
        for letter in ta.alphabet:
            trans.append(Transition(0, q, TRUE, letter, frozenset(), q))
    trans = [
        Transition(i, t.source, t.guard, t.letter, t.resets, t.target)
        for i, t in enumerate(sorted(trans, key=lambda t: (t.source, t.letter, t.tid)))
    ]
    return TimedAutomaton(
        ta.name, ta.states, ta.initial, ta.clocks, ta.alphabet, tuple(trans), ta.acceptance
    )


def as_parity(ta: TimedAutomaton) -> TimedAutomaton:
    """Language-preserving conversion to parity acceptance.

    Safety and reachability become parity by making the decided states
    absorbing (requires an input-complete automaton to preserve the
    language in the reachability direction).
    """
    acc = ta.acceptance
    n = len(ta.states)
    if acc.kind is AcceptanceKind.PARITY:
        return ta
    if acc.kind is AcceptanceKind.BUCHI:
        prios = tuple(2 if q in acc.states else 1 for q in range(n))
        out = ta
    elif acc.kind is AcceptanceKind.COBUCHI:
        prios = tuple(1 if q in acc.states else 0 for q in range(n))
        out = ta
    elif acc.kind is AcceptanceKind.SAFETY:
        unsafe = frozenset(range(n)) - acc.states
        out = _absorb_states(ta, unsafe)
        prios = tuple(1 if q in unsafe else 0 for q in range(n))
    else:
        out = _absorb_states(ta, acc.states)
        prios = tuple(0 if q in acc.states else 1 for q in range(n))
    return TimedAutomaton(
        out.name, out.states, out.initial, out.clocks, out.alphabet, out.transitions,
        Acceptance.parity(prios),
    )


def scale_constants(ta: TimedAutomaton, factor: int) -> TimedAutomaton:
    """Multiply every guard bound by a positive integer (time rescaling)."""
    if factor <= 0:
        raise InputError("scale factor must be positive")
    trans = tuple(
        Transition(
            t.tid, t.source,
            Guard.of(*(GuardAtom(a.left, a.rel, a.bound * factor, a.right) for a in t.guard.atoms)),
            t.letter, t.resets, t.target,
        )
        for t in ta.transitions
    )
    return TimedAutomaton(
        ta.name, ta.states, ta.initial, ta.clocks, ta.alphabet, trans, ta.acceptance
    )


# ---------------------------------------------------------------------------
# Product (intersection) and validation/completion.


def product_intersection(a: TimedAutomaton, b: TimedAutomaton) -> TimedAutomaton:
    """Synchronous product accepting ``L(a) & L(b)``.

    One operand must be trivially accepting, or both must be safety;
    richer acceptance pairings are not needed here and are rejected.
    """
    letters = tuple(x for x in a.alphabet if x in set(b.alphabet))
    if not letters:
        raise InputError("product alphabets are disjoint")
    triv_a, triv_b = is_trivially_accepting(a), is_trivially_accepting(b)
    both_safety = (
        a.acceptance.kind is AcceptanceKind.SAFETY and b.acceptance.kind is AcceptanceKind.SAFETY
    )
    if not (triv_a or triv_b or both_safety):
        raise UnsupportedError(
            "product_intersection needs a trivially accepting operand or two safety automata"
        )
    clock_names = list(a.clocks)
    for c in b.clocks:
        clock_names.append(c if c not in a.clocks else c + "'")
    off = len(a.clocks)

    index: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []

    def node(pair: tuple[int, int]) -> int:
        if pair not in index:
            index[pair] = len(order)
            order.append(pair)
        return index[pair]

    node((a.initial, b.initial))
    out_trans: list[tuple[int, Guard, str, frozenset[int], int]] = []
    i = 0
    while i < len(order):
        qa, qb = order[i]
        src = i
        i += 1
        for letter in letters:
            for ta_ in a.transitions_by_letter.get((qa, letter), ()):
                for tb in b.transitions_by_letter.get((qb, letter), ()):
                    g = ta_.guard.conjoin(tb.guard.shifted(off))
                    if not guards_satisfiable(len(clock_names), g):
                        continue
                    resets = frozenset(ta_.resets) | frozenset(c + off for c in tb.resets)
                    out_trans.append((src, g, letter, resets, node((ta_.target, tb.target))))
    states = tuple(f"{a.states[qa]}|{b.states[qb]}" for qa, qb in order)
    if triv_b:
        acc_src, proj = a.acceptance, (lambda qa, qb: qa)
    elif triv_a:
        acc_src, proj = b.acceptance, (lambda qa, qb: qb)
    else:
        safe = frozenset(
            idx
            for idx, (qa, qb) in enumerate(order)
            if qa in a.acceptance.states and qb in b.acceptance.states
        )
        acc = Acceptance.safety(safe)
        transitions = tuple(
            Transition(i, src, g, letter, resets, tgt)
            for i, (src, g, letter, resets, tgt) in enumerate(out_trans)
        )
        return TimedAutomaton(
            f"{a.name}*{b.name}", states, 0, tuple(clock_names), letters, transitions, acc
        )
    if acc_src.kind is AcceptanceKind.PARITY:
        acc = Acceptance.parity(tuple(acc_src.priorities[proj(qa, qb)] for qa, qb in order))
    else:
        acc = Acceptance(
            acc_src.kind,
            frozenset(idx for idx, (qa, qb) in enumerate(order) if proj(qa, qb) in acc_src.states),
        )
    transitions = tuple(
        Transition(i, src, g, letter, resets, tgt)
        for i, (src, g, letter, resets, tgt) in enumerate(out_trans)
    )
    return TimedAutomaton(
        f"{a.name}*{b.name}", states, 0, tuple(clock_names), letters, transitions, acc
    )


@dataclass(frozen=True)
class Gap:
    """An uncovered (state, letter) slice of the clock space."""

    state: int
    letter: str
    guard: Guard
    witness: tuple[Fraction, ...]


@dataclass(frozen=True)
class ValidationReport:
    original: TimedAutomaton
    complete: bool
    gaps: tuple[Gap, ...]
    completed: TimedAutomaton
    sink: int | None


def _complement_dnf(guards: Sequence[Guard], nclocks: int) -> list[Guard]:
    """Satisfiable conjunctions covering the complement of a guard union."""
    combos: list[tuple[GuardAtom, ...]] = [()]
    for g in guards:
        if g.is_true:
            return []
        grown: list[tuple[GuardAtom, ...]] = []
        seen: set[tuple] = set()
        for combo in combos:
            for a in g.atoms:
                cand = tuple(sorted(set(combo) | {a.negated()}, key=_atom_sort_key))
                key = tuple(x._key() for x in cand)
                if key in seen:
                    continue
                seen.add(key)
                if feasibility.feasible(guard_constraints(cand, nclocks), nclocks):
                    grown.append(cand)
        combos = grown
        if not combos:
            return []
    # Drop combos subsumed by an identical atom set (already deduped); keep order stable.
    return [Guard.of(*c) for c in combos]


def validate(ta: TimedAutomaton) -> ValidationReport:
    """Check input-completeness; if incomplete, complete with a rejecting sink.

    For every state and letter the union of outgoing guards must cover all
    valuations.  Each reported gap carries a satisfiable guard describing it
    and one concrete witness valuation.
    """
    n = len(ta.clocks)
    gaps: list[Gap] = []
    for q in range(len(ta.states)):
        for letter in ta.alphabet:
            guards = [t.guard for t in ta.transitions_by_letter.get((q, letter), ())]
            for g in _complement_dnf(guards, n):
                model = guard_model(n, g)
                assert model is not None
                gaps.append(Gap(q, letter, g, model))
    if not gaps:
        return ValidationReport(ta, True, (), ta, None)
    sink = len(ta.states)
    trans = list(ta.transitions)
    for gap in gaps:
        trans.append(Transition(len(trans), gap.state, gap.guard, gap.letter, frozenset(), sink))
    for letter in ta.alphabet:
        trans.append(Transition(len(trans), sink, TRUE, letter, frozenset(), sink))
    acc = ta.acceptance
    if acc.kind is AcceptanceKind.SAFETY:
        new_acc = Acceptance.safety(acc.states)  # sink not safe
    elif acc.kind is AcceptanceKind.REACHABILITY:
        new_acc = Acceptance.reachability(acc.states)
    elif acc.kind is AcceptanceKind.BUCHI:
        new_acc = Acceptance.buchi(acc.states)
    elif acc.kind is AcceptanceKind.COBUCHI:
        new_acc = Acceptance.cobuchi(acc.states | {sink})  # stuck in sink: rejecting
    else:
        new_acc = Acceptance.parity(acc.priorities + (1,))
    sink_name = "_sink"
    while sink_name in ta.states:
        sink_name += "'"
    completed = TimedAutomaton(
        ta.name,
        ta.states + (sink_name,),
        ta.initial,
        ta.clocks,
        ta.alphabet,
        tuple(trans),
        new_acc,
    )
    return ValidationReport(ta, False, tuple(gaps), completed, sink)
