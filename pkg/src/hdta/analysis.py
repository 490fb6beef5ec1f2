"""Language analysis: emptiness with concrete lasso witnesses, membership
of ultimately periodic words, fair-simulation games, inclusion and
universality for history-deterministic automata, and distinguishing
words for failed inclusions.

Every function first normalizes its automata to input-complete form
(`validate(...).completed`) and answers about the completed automaton;
runs then never die.  The one place this matters is reachability
acceptance on incomplete inputs: a word counts as accepted as soon as
some run visits a final state, since the rejecting sink always offers a
continuation.

Verdicts are exact over the region abstraction.  Witness words are
ultimately periodic (`Lasso`) and are realized by solving the guard
constraints of a candidate transition cycle with exact rational
arithmetic; when every candidate cycle resists periodic realization a
`WitnessRealizationError` is raised while the verdict itself stands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .feasibility import LinearConstraint, solve as lp_solve
from .parity import (
    LarReduction,
    ParityResult,
    Player,
    parity_nonemptiness,
    rabin_to_parity_lar,
    solve_parity,
    strongly_connected_components,
)
from .regions import Region, build_region_graph, project_region, region_guard
from .ta import (
    TRUE,
    Acceptance,
    AcceptanceKind,
    Guard,
    InputError,
    Lasso,
    Rel,
    TimedAutomaton,
    Transition,
    UnsupportedError,
    WitnessRealizationError,
    as_parity,
    guard,
    atom,
    is_deterministic,
    scale_constants,
    product_intersection,
    validate,
)
from .timed_games import (
    CompiledTimedGame,
    TimedGame,
    _fresh_clock_names,
    compile_timed_game,
)

_SETTLED_KINDS = {AcceptanceKind.SAFETY, AcceptanceKind.REACHABILITY}


# ---------------------------------------------------------------------------
# Periodic realization of a transition sequence.


@dataclass(frozen=True)
class Step:
    """One discrete step of a run: wait, check ``guard``, fire, reset."""

    guard: Guard
    resets: frozenset[int]
    letter: str | None
    zero: bool = False  # delay forced to zero (bookkeeping step)


def _realize_periodic(
    stem: Sequence[Step], cycle: Sequence[Step]
) -> tuple[list[Fraction], list[Fraction]] | None:
    """Find delays making ``stem . cycle^omega`` a real run, all cycle
    iterations reusing the same delays.

    Guard constraints are instantiated for the stem, the first and the
    second cycle iteration; later iterations replay the second one
    except for clocks never reset inside the cycle, whose drift forces
    a zero period when they face an upper bound (or sit on one side of
    a diagonal constraint).
    """
    m, k = len(stem), len(cycle)
    if k == 0:
        raise ValueError("cycle must be nonempty")
    cons: list[LinearConstraint] = []
    for i in range(m + k):
        cons.append(LinearConstraint.make({i: -1}, False, 0))  # delay >= 0
    for i, st in enumerate(stem):
        if st.zero:
            cons.append(LinearConstraint.make({i: 1}, False, 0))
    for j, st in enumerate(cycle):
        if st.zero:
            cons.append(LinearConstraint.make({m + j: 1}, False, 0))

    def stem_value(clock: int, s: int) -> dict[int, int]:
        lo = 0
        for l in range(s - 1, -1, -1):
            if clock in stem[l].resets:
                lo = l + 1
                break
        return {i: 1 for i in range(lo, s + 1)}

    def cycle_value(clock: int, j: int, it: int) -> dict[int, int]:
        # Last reset within the same iteration.
        for l in range(j - 1, -1, -1):
            if clock in cycle[l].resets:
                return {m + i: 1 for i in range(l + 1, j + 1)}
        if it >= 2:
            # Last reset in the previous iteration (steps j..k-1).
            for l in range(k - 1, j - 1, -1):
                if clock in cycle[l].resets:
                    expr = {m + i: 1 for i in range(l + 1, k)}
                    for i in range(j + 1):
                        expr[m + i] = expr.get(m + i, 0) + 1
                    return expr
            # Never reset in the cycle: one full period plus the tail.
            expr = {m + i: 1 for i in range(k)}
            for i in range(j + 1):
                expr[m + i] += 1
        else:
            expr = {m + i: 1 for i in range(j + 1)}
        # Reach back into the stem (or to time zero).
        lo = 0
        for l in range(m - 1, -1, -1):
            if clock in stem[l].resets:
                lo = l + 1
                break
        for i in range(lo, m):
            expr[i] = expr.get(i, 0) + 1
        return expr

    def add_atoms(g: Guard, value_of: Callable[[int], dict[int, int]]) -> None:
        for a in g.atoms:
            expr = dict(value_of(a.left))
            if a.right is not None:
                for var, c in value_of(a.right).items():
                    expr[var] = expr.get(var, 0) - c
            expr = {v: c for v, c in expr.items() if c}
            if a.rel in (Rel.LE, Rel.LT):
                cons.append(LinearConstraint.make(expr, a.rel is Rel.LT, a.bound))
            else:
                neg = {v: -c for v, c in expr.items()}
                cons.append(LinearConstraint.make(neg, a.rel is Rel.GT, -a.bound))

    for s, st in enumerate(stem):
        add_atoms(st.guard, lambda c, s=s: stem_value(c, s))
    for it in (1, 2):
        for j, st in enumerate(cycle):
            add_atoms(st.guard, lambda c, j=j, it=it: cycle_value(c, j, it))

    # Clocks never reset inside the cycle drift by one period per
    # iteration; an upper bound on them, or a diagonal constraint with
    # only one side drifting, is sustainable only with period zero.
    cycle_resets: set[int] = set()
    for st in cycle:
        cycle_resets |= st.resets
    force_zero = False
    for st in cycle:
        for a in st.guard.atoms:
            if a.right is None:
                if a.left not in cycle_resets and a.rel in (Rel.LE, Rel.LT):
                    force_zero = True
            elif (a.left in cycle_resets) != (a.right in cycle_resets):
                force_zero = True
    if force_zero:
        for j in range(k):
            cons.append(LinearConstraint.make({m + j: 1}, False, 0))

    model = lp_solve(cons, m + k)
    if model is None:
        return None
    return model[:m], model[m:]


def _lasso_word(
    stem: Sequence[Step],
    cycle: Sequence[Step],
    dstem: Sequence[Fraction],
    dcycle: Sequence[Fraction],
) -> Lasso:
    prefix = tuple(
        (dstem[i], st.letter) for i, st in enumerate(stem) if st.letter is not None
    )
    loop = tuple(
        (dcycle[j], st.letter) for j, st in enumerate(cycle) if st.letter is not None
    )
    return Lasso(prefix, loop)


# ---------------------------------------------------------------------------
# Emptiness with realized witnesses.


def _region_parity_view(tap: TimedAutomaton):
    """Region graph of a parity automaton in accepting-lasso-search form."""
    rg = build_region_graph(tap)
    prios = [tap.acceptance.priorities[q] for q, _ in rg.nodes]
    edges: list[list[tuple[int, int]]] = []
    lookup: list[tuple[int, object]] = []
    for v, row in enumerate(rg.edges):
        out = []
        for e in row:
            out.append((e.target, len(lookup)))
            lookup.append((v, e))
        edges.append(out)
    return rg, prios, edges, lookup


def _graph_path(
    edges: Sequence[Sequence[tuple[int, int]]],
    start: int,
    goal: int,
    within: set[int] | None,
    order=None,
) -> list[int] | None:
    """Edge-id path (BFS); empty when start == goal."""
    if start == goal:
        return []
    parent: dict[int, tuple[int, int]] = {}
    seen = {start}
    queue = [start]
    qi = 0
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        row = list(edges[v])
        if order is not None:
            order(row)
        for w, ei in row:
            if (within is not None and w not in within) or w in seen:
                continue
            seen.add(w)
            parent[w] = (v, ei)
            if w == goal:
                path = []
                cur = w
                while cur != start:
                    u, e2 = parent[cur]
                    path.append(e2)
                    cur = u
                path.reverse()
                return path
            queue.append(w)
    return None


def _lasso_candidates(
    prios: Sequence[int],
    edges: Sequence[Sequence[tuple[int, int]]],
    initial: int,
    rng=None,
) -> Iterator[tuple[list[int], list[int]]]:
    """Reachable cycles with even maximal priority, as edge-id paths.

    Yields a simple loop and a component-touring variant per anchor;
    with ``rng`` the enumeration order and the tours are randomized.
    """
    n = len(prios)
    shuffle = (lambda xs: rng.shuffle(xs)) if rng is not None else (lambda xs: None)
    values = sorted({p for p in prios if p % 2 == 0}, reverse=True)
    shuffle(values)
    for p in values:
        sub = {v for v in range(n) if prios[v] <= p}
        comps = strongly_connected_components(
            sub, lambda v: [w for w, _ in edges[v] if w in sub]
        )
        shuffle(comps)
        for comp in comps:
            comp_set = set(comp)
            anchors = [v for v in comp if prios[v] == p]
            shuffle(anchors)
            for v in anchors:
                stem = _graph_path(edges, initial, v, None)
                if stem is None:
                    continue
                first = list(edges[v])
                shuffle(first)
                for w, ei in first:
                    if w not in comp_set:
                        continue
                    back = _graph_path(edges, w, v, comp_set)
                    if back is not None:
                        yield stem, [ei] + back
                        break
                if len(comp) > 1:
                    stops = [u for u in comp if u != v]
                    shuffle(stops)
                    tour: list[int] = []
                    cur = v
                    for u in stops:
                        seg = _graph_path(edges, cur, u, comp_set)
                        if seg:
                            tour.extend(seg)
                            cur = u
                    back = _graph_path(edges, cur, v, comp_set)
                    if tour and back is not None:
                        yield stem, tour + back


@dataclass
class EmptinessResult:
    empty: bool
    witness: Lasso | None


def _steps_of_path(tap: TimedAutomaton, lookup, eids: Iterable[int]) -> list[Step]:
    steps = []
    for eid in eids:
        _, e = lookup[eid]
        if e.kind == "trans":
            t = tap.transitions[e.tid]
            steps.append(Step(t.guard, t.resets, t.letter))
    return steps


def language_emptiness(ta: TimedAutomaton, want_witness: bool = True) -> EmptinessResult:
    """Exact emptiness; when nonempty, a realized accepted lasso.

    Raises WitnessRealizationError if the language is nonempty but no
    candidate cycle admits an ultimately periodic realization (the
    emptiness verdict itself is still exact).
    """
    tap = as_parity(validate(ta).completed)
    _, prios, edges, lookup = _region_parity_view(tap)
    if parity_nonemptiness(prios, edges, 0) is None:
        return EmptinessResult(True, None)
    if not want_witness:
        return EmptinessResult(False, None)
    seen: set[tuple] = set()
    tried = 0
    for stem_e, cycle_e in _lasso_candidates(prios, edges, 0):
        stem = _steps_of_path(tap, lookup, stem_e)
        cycle = _steps_of_path(tap, lookup, cycle_e)
        if not cycle:
            continue
        for unroll in (1, 2):
            key = (tuple(stem_e), tuple(cycle_e), unroll)
            if key in seen:
                continue
            seen.add(key)
            got = _realize_periodic(stem, list(cycle) * unroll)
            if got is not None:
                return EmptinessResult(
                    False, _lasso_word(stem, list(cycle) * unroll, got[0], got[1])
                )
        tried += 1
        if tried >= 200:
            break
    raise WitnessRealizationError(
        "language is nonempty but no candidate cycle admits an ultimately "
        "periodic witness"
    )


# ---------------------------------------------------------------------------
# Membership of ultimately periodic words.


def _diag_clamp(ta: TimedAutomaton) -> int:
    bounds = [a.bound for t in ta.transitions for a in t.guard.atoms if a.right is not None]
    return (max(bounds) if bounds else 0) + 1


def _member_replay(ta: TimedAutomaton, lasso: Lasso) -> bool:
    """Exact replay for deterministic automata (diagonals allowed).

    Clock values are capped above every relevant constant and pairwise
    differences are tracked with saturation, so the configuration space
    is finite and the periodic tail is detected exactly.
    """
    n = len(ta.clocks)
    clamp = _diag_clamp(ta)
    caps = [max(c, clamp) + 1 for c in ta.cmax]

    def sat(d: Fraction) -> Fraction:
        if d > clamp:
            return Fraction(clamp)
        if d < -clamp:
            return Fraction(-clamp)
        return d

    vals = [Fraction(0)] * n
    diffs = [[Fraction(0)] * n for _ in range(n)]
    state = ta.initial
    acc = ta.acceptance

    unsafe_hit = state not in acc.states if acc.kind is AcceptanceKind.SAFETY else False
    # A final visit settles reachability: the completed automaton always
    # offers a continuation, so the rest of the word is irrelevant.
    fin_seen = state in acc.states if acc.kind is AcceptanceKind.REACHABILITY else False

    def eval_atom(a) -> bool:
        if a.right is None:
            return a.rel.holds(vals[a.left], a.bound)
        d = diffs[a.left][a.right]
        if d >= clamp:
            return a.rel in (Rel.GT, Rel.GE)
        if d <= -clamp:
            return a.rel in (Rel.LT, Rel.LE)
        return a.rel.holds(d, a.bound)

    def do_step(delay: Fraction, letter: str) -> bool:
        """Advance one word step; False when the run dies."""
        nonlocal state, unsafe_hit, fin_seen
        for c in range(n):
            v = vals[c] + delay
            vals[c] = v if v <= caps[c] else Fraction(caps[c] + 1)
        enabled = [
            t
            for t in ta.transitions_by_letter.get((state, letter), ())
            if all(eval_atom(a) for a in t.guard.atoms)
        ]
        if not enabled:
            return False
        if len(enabled) > 1:
            raise InputError("replay requires a deterministic automaton")
        t = enabled[0]
        for x in t.resets:
            for y in range(n):
                if y == x:
                    continue
                if y in t.resets:
                    diffs[x][y] = diffs[y][x] = Fraction(0)
                else:
                    vy = vals[y]
                    d = sat(-vy) if vy <= caps[y] else Fraction(-clamp)
                    diffs[x][y] = d
                    diffs[y][x] = -d
        for x in t.resets:
            vals[x] = Fraction(0)
        state = t.target
        if acc.kind is AcceptanceKind.SAFETY and state not in acc.states:
            unsafe_hit = True
        if acc.kind is AcceptanceKind.REACHABILITY and state in acc.states:
            fin_seen = True
        return True

    if any(l not in ta.alphabet for _, l in lasso.prefix + lasso.cycle):
        return False
    if fin_seen:
        return True
    for delay, letter in lasso.prefix:
        if not do_step(delay, letter):
            return False
        if fin_seen:
            return True
        if unsafe_hit:
            return False
    boundary: dict[tuple, int] = {}
    windows: list[set[int]] = []
    while True:
        key = (
            state,
            tuple(vals),
            tuple(tuple(row) for row in diffs),
        )
        if key in boundary:
            first = boundary[key]
            inf_states: set[int] = set()
            for w in windows[first:]:
                inf_states |= w
            if acc.kind is AcceptanceKind.SAFETY:
                return not unsafe_hit
            if acc.kind is AcceptanceKind.REACHABILITY:
                return fin_seen
            if acc.kind is AcceptanceKind.BUCHI:
                return bool(inf_states & acc.states)
            if acc.kind is AcceptanceKind.COBUCHI:
                return not (inf_states & acc.states)
            return max(acc.priorities[q] for q in inf_states) % 2 == 0
        boundary[key] = len(windows)
        window = {state}
        for delay, letter in lasso.cycle:
            if not do_step(delay, letter):
                return False
            if fin_seen:
                return True
            if unsafe_hit:
                return False
            window.add(state)
        windows.append(window)


def _word_encoder(alphabet: tuple[str, ...], steps: list[tuple[int, str]], loop_at: int) -> TimedAutomaton:
    """One-clock automaton accepting exactly one integer-delay lasso word."""
    nstates = len(steps)
    trans = []
    for i, (d, letter) in enumerate(steps):
        nxt = i + 1 if i + 1 < nstates else loop_at
        trans.append(
            Transition(i, i, guard(atom(0, "<=", d), atom(0, ">=", d)), letter, frozenset({0}), nxt)
        )
    return TimedAutomaton(
        "word",
        tuple(f"w{i}" for i in range(nstates)),
        0,
        ("_z",),
        alphabet,
        tuple(trans),
        Acceptance.safety(range(nstates)),
    )


def member_lasso(ta: TimedAutomaton, lasso: Lasso) -> bool:
    """Does the automaton accept the ultimately periodic word?

    Deterministic automata are replayed exactly (diagonal guards
    allowed); nondeterministic diagonal-free automata go through a
    product with a word automaton and an emptiness check.
    """
    if is_deterministic(ta):
        return _member_replay(ta, lasso)
    if not ta.is_diagonal_free:
        raise UnsupportedError(
            "membership needs a deterministic automaton or a diagonal-free one"
        )
    if any(l not in ta.alphabet for _, l in lasso.prefix + lasso.cycle):
        return False
    lam = math.lcm(*(d.denominator for d, _ in lasso.prefix + lasso.cycle))
    scaled = scale_constants(ta, lam)
    steps = [(int(d * lam), letter) for d, letter in lasso.prefix + lasso.cycle]
    word = _word_encoder(ta.alphabet, steps, len(lasso.prefix))
    prod = product_intersection(scaled, word)
    return not language_emptiness(prod, want_witness=False).empty


# ---------------------------------------------------------------------------
# Fair simulation.

_SINK = ("sink",)


def _extend_alphabet(b: TimedAutomaton, letters: Sequence[str]) -> TimedAutomaton:
    extra = tuple(l for l in letters if l not in b.alphabet)
    if not extra:
        return b
    return TimedAutomaton(
        b.name, b.states, b.initial, b.clocks, b.alphabet + extra, b.transitions, b.acceptance
    )


def _build_sim_game(
    a: TimedAutomaton,
    bc: TimedAutomaton,
    base_flags: tuple,
    step_a: Callable,
    step_b: Callable,
    prio: Callable,
    name: str,
) -> tuple[TimedGame, tuple, tuple]:
    """Round/step product game: P1 plays a delay and a transition of
    ``a``; a zero-delay P2 state then picks a matching transition of
    ``bc``.  ``step_a``/``step_b`` update the folded flags (returning
    None to collapse into the priority-0 sink); ``prio`` scores keys.
    Returns (game, key per state, origin per transition)."""
    n_a = len(a.clocks)
    clocks = a.clocks + _fresh_clock_names(a.clocks, bc.clocks)

    fl = step_a(a.initial, base_flags)
    if fl is not None:
        fl = step_b(bc.initial, fl)
    start = _SINK if fl is None else ("r", a.initial, bc.initial, fl)
    order: list[tuple] = [start]
    index: dict[tuple, int] = {start: 0}
    raw: list[tuple[int, Guard, str, frozenset, int, tuple | None]] = []

    def visit(key: tuple) -> int:
        j = index.get(key)
        if j is None:
            j = len(order)
            index[key] = j
            order.append(key)
        return j

    i = 0
    while i < len(order):
        key = order[i]
        src = i
        i += 1
        if key == _SINK:
            raw.append((src, TRUE, a.alphabet[0], frozenset(), src, None))
            continue
        if key[0] == "r":
            _, p, q, flags = key
            for t in a.transitions_from[p]:
                fl2 = step_a(t.target, flags)
                tgt = _SINK if fl2 is None else ("m", t.target, q, t.letter, fl2)
                raw.append((src, t.guard, t.letter, t.resets, visit(tgt), ("a", t.tid)))
        else:
            _, p, q, letter, flags = key
            for u in bc.transitions_by_letter.get((q, letter), ()):
                fl2 = step_b(u.target, flags)
                tgt = _SINK if fl2 is None else ("r", p, u.target, fl2)
                resets = frozenset(n_a + c for c in u.resets)
                raw.append(
                    (src, u.guard.shifted(n_a), letter, resets, visit(tgt), ("b", u.tid))
                )

    names: list[str] = []
    used: dict[str, int] = {}
    for key in order:
        if key == _SINK:
            nm = "sink"
        else:
            flags = key[-1]
            mark = "" if not flags else ":" + "".join("1" if x else "0" for x in flags)
            if key[0] == "r":
                nm = f"({a.states[key[1]]},{bc.states[key[2]]}){mark}"
            else:
                nm = f"({a.states[key[1]]},{bc.states[key[2]]})@{key[3]}{mark}"
        if nm in used:
            used[nm] += 1
            nm = f"{nm}#{used[nm]}"
        else:
            used[nm] = 0
        names.append(nm)

    owners = tuple(
        Player.P2 if (key != _SINK and key[0] == "m") else Player.P1 for key in order
    )
    priorities = tuple(0 if key == _SINK else prio(key) for key in order)
    zero_delay = frozenset(v for v, key in enumerate(order) if key != _SINK and key[0] == "m")
    transitions = tuple(
        Transition(k, src, gu, letter, resets, tgt)
        for k, (src, gu, letter, resets, tgt, _) in enumerate(raw)
    )
    origins = tuple(origin for *_, origin in raw)
    game = TimedGame(
        name,
        tuple(names),
        owners,
        clocks,
        a.alphabet,
        transitions,
        priorities,
        initial=0,
        zero_delay=zero_delay,
    )
    return game, tuple(order), origins


@dataclass
class SimulationVerdict:
    """Outcome of the fair-simulation game between two automata.

    ``holds`` means the right automaton stepwise matches every
    accepting run of the left one, which implies language inclusion;
    the converse direction holds when the right automaton is
    history-deterministic.
    """

    holds: bool
    route: str  # "folded" or "lar"
    game: TimedGame
    compiled: CompiledTimedGame
    parity: ParityResult
    keys: tuple
    origins: tuple
    a: TimedAutomaton
    b: TimedAutomaton
    a_completed: TimedAutomaton
    b_completed: TimedAutomaton
    lar: LarReduction | None = None


def fair_simulation(a: TimedAutomaton, b: TimedAutomaton) -> SimulationVerdict:
    """Solve the region fair-simulation game (P2 plays on ``b``)."""
    ac = validate(a).completed
    bc = validate(_extend_alphabet(b, a.alphabet)).completed
    ka, kb = a.acceptance.kind, b.acceptance.kind
    if ka in _SETTLED_KINDS and kb in _SETTLED_KINDS:
        if ka is AcceptanceKind.SAFETY:
            a_bad = frozenset(range(len(ac.states))) - ac.acceptance.states
        else:
            a_fin = ac.acceptance.states
        if kb is AcceptanceKind.SAFETY:
            b_bad = frozenset(range(len(bc.states))) - bc.acceptance.states
        else:
            b_fin = bc.acceptance.states

        if ka is AcceptanceKind.SAFETY and kb is AcceptanceKind.SAFETY:
            base: tuple = (False,)
            step_a = lambda p, fl: None if p in a_bad else fl
            step_b = lambda q, fl: (fl[0] or q in b_bad,)
            prio = lambda key: 1 if key[-1][0] else 0
        elif ka is AcceptanceKind.REACHABILITY and kb is AcceptanceKind.REACHABILITY:
            base = (False,)
            step_a = lambda p, fl: (fl[0] or p in a_fin,)
            step_b = lambda q, fl: None if q in b_fin else fl
            prio = lambda key: 1 if key[-1][0] else 0
        elif ka is AcceptanceKind.SAFETY:
            base = ()
            step_a = lambda p, fl: None if p in a_bad else fl
            step_b = lambda q, fl: None if q in b_fin else fl
            prio = lambda key: 1
        else:
            base = (False, False)
            step_a = lambda p, fl: (fl[0] or p in a_fin, fl[1])
            step_b = lambda q, fl: (fl[0], fl[1] or q in b_bad)
            prio = lambda key: 1 if (key[-1][0] and key[-1][1]) else 0
        game, keys, origins = _build_sim_game(
            ac, bc, base, step_a, step_b, prio, f"sim({a.name},{b.name})"
        )
        compiled = compile_timed_game(game)
        parity = solve_parity(compiled.arena)
        holds = parity.winners[compiled.initial] is Player.P2
        return SimulationVerdict(
            holds, "folded", game, compiled, parity, keys, origins, a, b, ac, bc
        )

    # General route: a Rabin disjunction ("left run rejects or right run
    # accepts") expanded to parity with index appearance records.
    bcp = as_parity(bc)
    if ka is AcceptanceKind.REACHABILITY:
        drive = ac
        a_fin = ac.acceptance.states
        base = (False,)
        step_a = lambda p, fl: (fl[0] or p in a_fin,)
        alpha = lambda key: 0 if key[-1][0] else 1
    else:
        drive = as_parity(ac)
        base = ()
        step_a = lambda p, fl: fl
        alpha = lambda key, d=drive: d.acceptance.priorities[key[1]]
    step_b = lambda q, fl: fl
    game, keys, origins = _build_sim_game(
        drive, bcp, base, step_a, step_b, lambda key: 0, f"sim({a.name},{b.name})"
    )
    compiled = compile_timed_game(game)
    alpha_v = []
    beta_v = []
    for v in range(compiled.arena.size):
        key = keys[compiled.nodes[v][0]]
        alpha_v.append(alpha(key) + 1)
        beta_v.append(bcp.acceptance.priorities[key[2]])
    pairs = []
    nodes_all = frozenset(range(compiled.arena.size))
    for labels in (alpha_v, beta_v):
        for c in range(0, max(labels) + 1, 2):
            fin = frozenset(v for v in nodes_all if labels[v] > c)
            inf = frozenset(v for v in nodes_all if labels[v] >= c)
            if not inf or fin == nodes_all:
                continue
            if (fin, inf) not in pairs:
                pairs.append((fin, inf))
    red = rabin_to_parity_lar(compiled.arena, pairs, compiled.initial)
    parity = solve_parity(red.arena)
    holds = parity.winners[red.initial] is Player.P2
    return SimulationVerdict(
        holds, "lar", game, compiled, parity, keys, origins, a, b, ac, bc, lar=red
    )


# ---------------------------------------------------------------------------
# Inclusion / universality through fair simulation.


@dataclass
class InclusionResult:
    included: bool
    simulation: SimulationVerdict
    hd_status: str  # "deterministic" | "checked" | "assumed"


def language_inclusion_hd(
    a: TimedAutomaton, b: TimedAutomaton, assume_hd: bool = False
) -> InclusionResult:
    """Decide L(a) <= L(b) via fair simulation.

    The reduction is exact only when ``b`` resolves nondeterminism on
    the fly; deterministic automata qualify outright, safety and
    reachability automata are checked, anything else must be vouched
    for with ``assume_hd``.
    """
    if is_deterministic(b):
        status = "deterministic"
    elif assume_hd:
        status = "assumed"
    elif b.acceptance.kind in _SETTLED_KINDS:
        from .hd import check_hd

        if not check_hd(b):
            raise InputError(
                "inclusion via simulation needs a history-deterministic "
                "right-hand automaton"
            )
        status = "checked"
    else:
        raise UnsupportedError(
            "cannot certify history-determinism for this acceptance; "
            "pass assume_hd=True to force the simulation check"
        )
    sim = fair_simulation(a, b)
    return InclusionResult(sim.holds, sim, status)


def universal_automaton(alphabet: Sequence[str]) -> TimedAutomaton:
    """One-state safety automaton accepting every timed word."""
    trans = tuple(
        Transition(i, 0, TRUE, letter, frozenset(), 0) for i, letter in enumerate(alphabet)
    )
    return TimedAutomaton(
        "univ", ("u",), 0, (), tuple(alphabet), trans, Acceptance.safety({0})
    )


def universality_hd(b: TimedAutomaton, assume_hd: bool = False) -> InclusionResult:
    """Does ``b`` accept every timed word over its alphabet?"""
    return language_inclusion_hd(universal_automaton(b.alphabet), b, assume_hd)


# ---------------------------------------------------------------------------
# Distinguishing words for failed inclusions.


def distinguishing_play(result: InclusionResult) -> Lasso:
    """Extract a concrete lasso accepted by ``a`` and rejected by ``b``
    from the spoiler's winning strategy, steering the right automaton
    by its nondeterminism resolver.

    Only available for the folded simulation route (safety and
    reachability acceptance on both sides).
    """
    if result.included:
        raise InputError("inclusion holds; there is no distinguishing word")
    sim = result.simulation
    if sim.route != "folded":
        raise UnsupportedError("distinguishing words need safety/reachability acceptance")
    a, b = sim.a, sim.b
    resolver = None
    if not is_deterministic(b):
        from .hd import analyze_hd

        hd_res = analyze_hd(b)
        if not hd_res.hd:
            raise UnsupportedError(
                "cannot realize a distinguishing word without a resolver for b"
            )
        resolver = hd_res.resolver

    arena = sim.compiled.arena
    strat1 = sim.parity.strategy[Player.P1]
    n_a = len(a.clocks)
    b_clock_range = list(range(n_a, n_a + len(b.clocks)))
    node = sim.compiled.initial
    if sim.parity.winners[node] is not Player.P1:
        raise InputError("spoiler does not win from the start")

    visited: dict[int, int] = {}
    path_nodes: list[int] = []
    path_edges: list[tuple[int, int]] = []
    while node not in visited:
        visited[node] = len(path_nodes)
        path_nodes.append(node)
        gstate, region = sim.compiled.nodes[node]
        key = sim.keys[gstate]
        if key[0] == "r":
            ei = strat1[node]
        else:
            _, _, q, letter, _ = key
            ei = _resolver_edge(sim, node, q, region, letter, resolver, b, b_clock_range)
        path_edges.append((node, ei))
        node = arena.edges[node][ei]

    split = visited[node]
    stem_e = path_edges[:split]
    cycle_e = path_edges[split:]
    # Rotate so the cycle starts with a letter-bearing round step.
    first_key = sim.keys[sim.compiled.nodes[path_nodes[split]][0]]
    if first_key[0] != "r":
        stem_e = stem_e + [cycle_e[0]]
        cycle_e = cycle_e[1:] + [cycle_e[0]]

    def steps_of(edge_list: list[tuple[int, int]]) -> list[Step]:
        # Each step firmly pins the region it fired from, so on the
        # realized word the resolver (a function of the region) makes
        # exactly the choices of the walked play.
        steps = []
        for v, ei in edge_list:
            move = sim.compiled.moves[v][ei]
            t = sim.game.transitions[move.tid]
            src_key = sim.keys[sim.compiled.nodes[v][0]]
            is_round = src_key[0] == "r"
            steps.append(
                Step(
                    t.guard.conjoin(region_guard(move.delay)),
                    t.resets,
                    t.letter if is_round else None,
                    zero=not is_round,
                )
            )
        return steps

    stem = steps_of(stem_e)
    cycle = steps_of(cycle_e)
    got = _realize_periodic(stem, cycle)
    if got is None:
        got = _realize_periodic(stem, cycle * 2)
        if got is None:
            raise WitnessRealizationError(
                "the spoiler wins but its play resists periodic realization"
            )
        cycle = cycle * 2
    return _lasso_word(stem, cycle, got[0], got[1])


def _resolver_edge(
    sim: SimulationVerdict,
    node: int,
    q: int,
    region: Region,
    letter: str,
    resolver,
    b: TimedAutomaton,
    b_clock_range: list[int],
) -> int:
    """Map the resolver's transition choice to an arena edge index."""
    moves = sim.compiled.moves[node]
    n_b_orig = len(b.transitions)

    def origin_tid(ei: int) -> int:
        origin = sim.origins[moves[ei].tid]
        assert origin is not None and origin[0] == "b"
        return origin[1]

    if resolver is None or letter not in b.alphabet:
        chosen: int | None = None
        for ei in range(len(moves)):
            tid = origin_tid(ei)
            if letter not in b.alphabet and tid < n_b_orig:
                continue
            if chosen is None or tid < origin_tid(chosen):
                chosen = ei
        if chosen is None:
            raise InputError("right automaton has no matching move")
        if resolver is None and origin_tid(chosen) < n_b_orig:
            # Deterministic automaton: the enabled original move is unique.
            pass
        return chosen
    proj = project_region(region, b_clock_range)
    want = resolver.choose(q, proj, letter)
    sink_fallback: int | None = None
    for ei in range(len(moves)):
        tid = origin_tid(ei)
        if tid == want:
            return ei
        if tid >= n_b_orig and (sink_fallback is None or tid < origin_tid(sink_fallback)):
            sink_fallback = ei
    if want >= n_b_orig and sink_fallback is not None:
        return sink_fallback
    raise InputError("resolver chose a move that is not enabled here")


# ---------------------------------------------------------------------------
# Sampling accepted lassos.


def sample_accepted_lassos(
    ta: TimedAutomaton, rng, count: int = 10, attempts: int = 120
) -> list[Lasso]:
    """Collect up to ``count`` distinct realized lassos accepted by ``ta``."""
    tap = as_parity(validate(ta).completed)
    _, prios, edges, lookup = _region_parity_view(tap)
    out: list[Lasso] = []
    seen: set[Lasso] = set()
    for _ in range(attempts):
        if len(out) >= count:
            break
        for stem_e, cycle_e in _lasso_candidates(prios, edges, 0, rng=rng):
            stem = _steps_of_path(tap, lookup, stem_e)
            cycle = _steps_of_path(tap, lookup, cycle_e)
            if not cycle:
                continue
            unroll = rng.choice((1, 1, 2))
            got = _realize_periodic(stem, cycle * unroll)
            if got is None:
                continue
            lasso = _lasso_word(stem, cycle * unroll, got[0], got[1])
            if lasso not in seen:
                seen.add(lasso)
                out.append(lasso)
            break
    return out
