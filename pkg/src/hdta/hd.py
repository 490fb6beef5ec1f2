"""History-determinism of safety and reachability timed automata.

The decision procedure plays a letter game on two copies of the
automaton.  Each round the first player commits a delay and a letter,
the second player answers with an enabled transition on her copy, and
the first player finally picks one on his copy.  The second player wins
a play when her run is acceptable whenever his is: with safety
acceptance her copy must stay safe unless his copy dies, and with
reachability acceptance his copy must not visit a final state while
hers still has not.  The automaton is history-deterministic exactly
when the second player wins this game from the initial configuration,
and her choices along the copycat diagonal - both copies in the same
state, both clock sets equal - yield a resolver that depends only on
the current state, clock region and letter.

For reachability the resolver combines three rules.  A configuration is
*almost final* when the automaton can force reaching a final state from
it against every continuation; this is a property of the clock region
and is computed as the attractor of a single-copy timed reachability
game.  Until the run first enters an almost-final region the resolver
follows the two-copy diagonal strategy that keeps the opponent copy
from reaching an almost-final region strictly earlier; from then on it
follows the attractor strategy; and once a final state has been visited
any enabled transition will do.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .parity import GameArena, ParityResult, Player, absorb_nodes, solve_parity
from .regions import (
    Region,
    delay_chain,
    embed_diagonal,
    enumerate_regions,
    project_region,
    region_reset,
    region_satisfies,
    zero_region,
)
from .ta import (
    TRUE,
    AcceptanceKind,
    InputError,
    TimedAutomaton,
    Transition,
    UnsupportedError,
    ValidationReport,
    atom,
    guard,
    validate,
)
from .timed_games import CompiledTimedGame, TimedGame, _fresh_clock_names, compile_timed_game

_SUPPORTED = (AcceptanceKind.SAFETY, AcceptanceKind.REACHABILITY)


def _require_supported(ta: TimedAutomaton) -> None:
    if ta.acceptance.kind not in _SUPPORTED:
        raise UnsupportedError(
            "history-determinism is decided for safety and reachability "
            f"acceptance only, not {ta.acceptance.kind.value}"
        )
    if not ta.is_diagonal_free:
        raise UnsupportedError("diagonal guards are not supported by the letter game")


def _least_enabled(ta: TimedAutomaton, state: int, region: Region, letter: str) -> int:
    for t in ta.transitions_by_letter.get((state, letter), ()):
        if region_satisfies(region, t.guard):
            return t.tid
    raise InputError(
        f"no transition of {ta.name!r} is enabled at state "
        f"{ta.states[state]!r} on {letter!r}; the automaton is not input-complete"
    )


# ---------------------------------------------------------------------------
# The two-copy letter game.


@dataclass(frozen=True, eq=False)
class G1Arena:
    """Region-compiled two-copy letter game.

    Game states are phase-tagged keys: ``("r", q1, q2, flag)`` has the
    first player pick a delay region and a letter, ``("l", ...)`` has
    the second player answer on her copy, ``("m", ...)`` has the first
    player answer on his (both answers under zero delay), and
    ``("sink",)`` absorbs plays the second player has already won.  The
    flag records the win-relevant event seen so far: for safety that
    the second copy has died, for reachability that the first copy has
    visited a final state.  ``origins`` maps each game transition back
    to the automaton transition it fires, or None for letter commits.
    """

    kind: AcceptanceKind
    game: TimedGame
    compiled: CompiledTimedGame
    keys: tuple[tuple, ...]
    index: dict[tuple, int]
    origins: tuple[int | None, ...]
    sink: int | None


def _two_copy_game(
    ta: TimedAutomaton, flagged: bool
) -> tuple[TimedGame, CompiledTimedGame, tuple[tuple, ...], dict[tuple, int], tuple[int | None, ...], int | None]:
    """Build the letter game on two copies of ``ta``.

    With ``flagged`` the keys carry the acceptance bookkeeping of the
    automaton's own condition (and a winning sink); without it the keys
    are bare state pairs with uniform priority 0, for callers that
    impose their own winning condition on the compiled arena.
    """
    kind = ta.acceptance.kind
    safety = kind is AcceptanceKind.SAFETY
    acc = set(ta.acceptance.states)
    n = len(ta.clocks)
    clocks = ta.clocks + _fresh_clock_names(ta.clocks, ta.clocks)
    keys: list[tuple] = []
    index: dict[tuple, int] = {}
    owners: list[Player] = []
    prios: list[int] = []
    zero: set[int] = set()
    pending: list[tuple] = []

    def prio_of(flag: bool) -> int:
        if not flagged:
            return 0
        if safety:
            return 1 if flag else 0
        return 1 if flag else 2

    def node(key: tuple) -> int:
        got = index.get(key)
        if got is not None:
            return got
        i = len(keys)
        index[key] = i
        keys.append(key)
        tag = key[0]
        if tag == "sink":
            owners.append(Player.P1)
            prios.append(0)
        elif tag == "r":
            owners.append(Player.P1)
            prios.append(prio_of(flagged and key[3]))
        else:
            owners.append(Player.P2 if tag == "l" else Player.P1)
            prios.append(prio_of(flagged and key[4]))
            zero.add(i)
        pending.append(key)
        return i

    q0 = ta.initial
    init_key: tuple
    if flagged and ((q0 not in acc) if safety else (q0 in acc)):
        init_key = ("sink",)
    elif flagged:
        init_key = ("r", q0, q0, False)
    else:
        init_key = ("r", q0, q0)
    trans: list[Transition] = []
    origins: list[int | None] = []
    start = node(init_key)
    while pending:
        key = pending.pop()
        v = index[key]
        tag = key[0]
        if tag == "sink":
            if ta.alphabet:
                trans.append(Transition(len(trans), v, TRUE, ta.alphabet[0], frozenset(), v))
                origins.append(None)
            continue
        if tag == "r":
            q1, q2 = key[1], key[2]
            for a in ta.alphabet:
                dst = ("l", q1, q2, a, key[3]) if flagged else ("l", q1, q2, a)
                d = node(dst)
                trans.append(Transition(len(trans), v, TRUE, a, frozenset(), d))
                origins.append(None)
            continue
        if tag == "l":
            q1, q2, a = key[1], key[2], key[3]
            for t in ta.transitions_by_letter.get((q2, a), ()):
                if not flagged:
                    dst: tuple = ("m", q1, t.target, a)
                elif safety:
                    dst = ("m", q1, t.target, a, key[4] or t.target not in acc)
                elif t.target in acc:
                    dst = ("sink",)
                else:
                    dst = ("m", q1, t.target, a, key[4])
                d = node(dst)
                trans.append(
                    Transition(
                        len(trans), v, t.guard.shifted(n), a,
                        frozenset(c + n for c in t.resets), d,
                    )
                )
                origins.append(t.tid)
            continue
        q1, q2, a = key[1], key[2], key[3]
        for t in ta.transitions_by_letter.get((q1, a), ()):
            if not flagged:
                dst = ("r", t.target, q2)
            elif safety:
                dst = ("sink",) if t.target not in acc else ("r", t.target, q2, key[4])
            else:
                dst = ("r", t.target, q2, key[4] or t.target in acc)
            d = node(dst)
            trans.append(Transition(len(trans), v, t.guard, a, t.resets, d))
            origins.append(t.tid)
    # An inert unreachable state pins the game's per-clock bounds to the
    # automaton's, so regions built against the automaton's bounds can be
    # looked up in the compiled game.
    if ta.alphabet:
        anchor = len(keys)
        keys.append(("anchor",))
        owners.append(Player.P1)
        prios.append(0)
        bound_atoms = [atom(i, "<=", c) for i, c in enumerate(ta.cmax + ta.cmax)]
        trans.append(
            Transition(len(trans), anchor, guard(*bound_atoms), ta.alphabet[0], frozenset(), anchor)
        )
        origins.append(None)
    game = TimedGame(
        f"letters[{ta.name}]",
        tuple(str(k) for k in keys),
        tuple(owners),
        clocks,
        ta.alphabet,
        tuple(trans),
        tuple(prios),
        start,
        frozenset(zero),
    )
    compiled = compile_timed_game(game)
    return game, compiled, tuple(keys), index, tuple(origins), index.get(("sink",))


def g1_arena(ta: TimedAutomaton) -> G1Arena:
    """Compile the two-copy letter game for an input-complete automaton."""
    _require_supported(ta)
    if not validate(ta).complete:
        raise InputError("the letter game needs an input-complete automaton; complete it with validate() first")
    game, compiled, keys, index, origins, sink = _two_copy_game(ta, flagged=True)
    return G1Arena(ta.acceptance.kind, game, compiled, keys, index, origins, sink)


# ---------------------------------------------------------------------------
# Almost-final regions: the single-copy reachability game.


@dataclass(eq=False)
class _AfGame:
    """Attractor analysis of the single-copy letter game to final states."""

    arena: GameArena
    rounds: dict[tuple[int, Region], int]
    commits: dict[tuple[int, Region, str], int]
    tids: tuple[tuple[int, ...], ...]
    level: dict[int, int]
    almost: frozenset[tuple[int, Region]]
    sigma: dict[tuple[int, Region, str], int]


def _af_game(ta: TimedAutomaton) -> _AfGame:
    finals = set(ta.acceptance.states)
    regs = enumerate_regions(ta.cmax)
    owners: list[Player] = []
    prios: list[int] = []
    rounds: dict[tuple[int, Region], int] = {}
    commits: dict[tuple[int, Region, str], int] = {}
    for q in range(len(ta.states)):
        for r in regs:
            rounds[(q, r)] = len(owners)
            owners.append(Player.P1)
            prios.append(0 if q in finals else 1)
    for q in range(len(ta.states)):
        for r in regs:
            for a in ta.alphabet:
                commits[(q, r, a)] = len(owners)
                owners.append(Player.P2)
                prios.append(0 if q in finals else 1)
    edges: list[tuple[int, ...]] = [()] * len(owners)
    tids: list[tuple[int, ...]] = [()] * len(owners)
    for (q, r), v in rounds.items():
        if q in finals:
            edges[v], tids[v] = (v,), (-1,)
            continue
        out = [commits[(q, r2, a)] for r2 in delay_chain(r) for a in ta.alphabet]
        edges[v], tids[v] = tuple(out), tuple(-1 for _ in out)
    for (q, r, a), v in commits.items():
        if q in finals:
            edges[v], tids[v] = (v,), (-1,)
            continue
        out: list[int] = []
        ts: list[int] = []
        for t in ta.transitions_by_letter.get((q, a), ()):
            if region_satisfies(r, t.guard):
                out.append(rounds[(t.target, region_reset(r, t.resets))])
                ts.append(t.tid)
        edges[v], tids[v] = tuple(out), tuple(ts)
    arena = GameArena(tuple(owners), tuple(prios), tuple(edges))

    # Attractor of the second player to the absorbing final nodes, with
    # levels: a first-player node joins once all its successors have.
    rev: list[list[int]] = [[] for _ in owners]
    for v, targets in enumerate(edges):
        for w in targets:
            rev[w].append(v)
    level: dict[int, int] = {}
    queue: deque[int] = deque()
    cnt = [0] * len(owners)
    for v in range(len(owners)):
        if prios[v] == 0:
            level[v] = 0
            queue.append(v)
        elif owners[v] is Player.P1:
            cnt[v] = len(edges[v])
            if cnt[v] == 0:
                level[v] = 1
                queue.append(v)
    while queue:
        w = queue.popleft()
        for v in rev[w]:
            if v in level:
                continue
            if owners[v] is Player.P2:
                level[v] = level[w] + 1
                queue.append(v)
            else:
                cnt[v] -= 1
                if cnt[v] == 0:
                    level[v] = 1 + max(level[u] for u in edges[v])
                    queue.append(v)
    almost = frozenset(cfg for cfg, v in rounds.items() if v in level)
    sigma: dict[tuple[int, Region, str], int] = {}
    for (q, r, a), v in commits.items():
        if v not in level or q in finals:
            continue
        best = None
        for t, w in zip(tids[v], edges[v]):
            if w in level and level[w] < level[v] and (best is None or t < best):
                best = t
        assert best is not None
        sigma[(q, r, a)] = best
    return _AfGame(arena, rounds, commits, tuple(tids), level, almost, sigma)


def almost_final_regions(ta: TimedAutomaton) -> frozenset[tuple[int, Region]]:
    """Configuration regions from which reaching a final state is forced.

    A pair (state, region) is returned exactly when the second player
    wins the single-copy game where the first player picks delays and
    letters and she must steer the run into a final state.  Every
    region of a final state qualifies, and the set is closed under time
    successors of its members.
    """
    _require_supported(ta)
    if ta.acceptance.kind is not AcceptanceKind.REACHABILITY:
        raise UnsupportedError("almost-final regions are defined for reachability acceptance")
    if not validate(ta).complete:
        raise InputError("almost-final analysis needs an input-complete automaton; complete it with validate() first")
    return _af_game(ta).almost


# ---------------------------------------------------------------------------
# Resolvers.


@dataclass(frozen=True, eq=False)
class RegionResolver:
    """Positional transition choices per (state, clock region, letter).

    ``automaton`` is the completed automaton the transition ids refer
    to.  ``table`` holds the main choices; for reachability,
    ``final_table`` holds the choices inside almost-final regions and
    ``settled`` lists states where acceptance is decided (final states;
    for safety the unsafe states), where any enabled transition - the
    least by id - will do.  ``domain`` is the set of (state, region)
    configurations reachable from the initial configuration under the
    resolver's own choices.
    """

    automaton: TimedAutomaton
    kind: AcceptanceKind
    table: dict[tuple[int, Region, str], int]
    final_table: dict[tuple[int, Region, str], int]
    almost_final: frozenset[tuple[int, Region]]
    settled: frozenset[int]
    domain: frozenset[tuple[int, Region]]

    def choose(self, state: int, region: Region, letter: str) -> int:
        """The transition to fire at this configuration on this letter."""
        if state in self.settled:
            return _least_enabled(self.automaton, state, region, letter)
        if self.kind is AcceptanceKind.REACHABILITY and (state, region) in self.almost_final:
            try:
                return self.final_table[(state, region, letter)]
            except KeyError:
                raise InputError("almost-final configuration without an attractor choice") from None
        try:
            return self.table[(state, region, letter)]
        except KeyError:
            raise InputError(
                f"configuration ({self.automaton.states[state]!r}, {region.describe(self.automaton.clocks)}) "
                "is outside the resolver's reachable domain"
            ) from None

    def to_json(self) -> dict:
        """The resolver as a JSON-ready table keyed by state, region and letter."""
        ta = self.automaton
        choices = {}
        for (q, r, a), tid in sorted(
            list(self.table.items()) + list(self.final_table.items()),
            key=lambda item: (item[0][0], item[0][1].describe(ta.clocks), item[0][2]),
        ):
            choices[f"{ta.states[q]}|{r.describe(ta.clocks)}|{a}"] = tid
        return {
            "automaton": ta.name,
            "acceptance": self.kind.value,
            "choices": choices,
            "almost_final": sorted(
                f"{ta.states[q]}|{r.describe(ta.clocks)}" for q, r in self.almost_final
            ),
            "settled": sorted(ta.states[q] for q in self.settled),
        }


def _walk_resolver(
    ta: TimedAutomaton,
    settled: frozenset[int],
    almost: frozenset[tuple[int, Region]],
    sigma: dict[tuple[int, Region, str], int],
    options,
) -> tuple[dict[tuple[int, Region, str], int], frozenset[tuple[int, Region]]]:
    """Close the initial configuration under the resolver's choices.

    ``options(q, region, a)`` lists the winning main-table choices;
    settled states take the least enabled transition and almost-final
    configurations take the attractor choice.  When several choices
    win, the resolver keeps the choice it made earlier on the same
    delay chain while that choice stays winning, and takes the least
    transition id otherwise; sticking with a tentative choice as time
    elapses keeps the emitted guards coarse.  Returns the main table
    and the visited domain.
    """
    table: dict[tuple[int, Region, str], int] = {}
    start = (ta.initial, zero_region(ta.cmax))
    domain = {start}
    alive: list[tuple[int, Region]] = []
    rest: list[tuple[int, Region]] = []
    (rest if start[0] in settled else alive).append(start)
    while alive:
        q, r = alive.pop()
        carry: dict[str, int] = {}
        for r2 in delay_chain(r):
            for a in ta.alphabet:
                if (q, r2) in almost:
                    tid = sigma[(q, r2, a)]
                else:
                    tid = table.get((q, r2, a))
                    if tid is None:
                        winning = options(q, r2, a)
                        prev = carry.get(a)
                        tid = prev if prev in winning else winning[0]
                        table[(q, r2, a)] = tid
                carry[a] = tid
                t = ta.transitions[tid]
                if not region_satisfies(r2, t.guard):
                    raise InputError("resolver chose a transition that its region does not enable")
                nxt = (t.target, region_reset(r2, t.resets))
                if nxt not in domain:
                    domain.add(nxt)
                    (rest if t.target in settled else alive).append(nxt)
    # Past a settled state the word's verdict is fixed, so totality is all
    # that matters: close the domain with least enabled choices, never
    # touching entries the live walk above already committed to.
    while rest:
        q, r = rest.pop()
        for r2 in delay_chain(r):
            for a in ta.alphabet:
                if q in settled:
                    tid = _least_enabled(ta, q, r2, a)
                elif (q, r2) in almost:
                    tid = sigma[(q, r2, a)]
                else:
                    tid = table.get((q, r2, a))
                    if tid is None:
                        tid = _least_enabled(ta, q, r2, a)
                        table[(q, r2, a)] = tid
                t = ta.transitions[tid]
                nxt = (t.target, region_reset(r2, t.resets))
                if nxt not in domain:
                    domain.add(nxt)
                    rest.append(nxt)
    return table, frozenset(domain)


def _diagonal_options(
    compiled: CompiledTimedGame,
    index: dict[tuple, int],
    origins: tuple[int | None, ...],
    winning: set[int],
    key_of,
):
    """Automaton transitions that keep the diagonal play winning, sorted by id."""

    def options(q: int, r: Region, a: str) -> list[int]:
        gs = index.get(key_of(q, a))
        node = None if gs is None else compiled.node_index.get((gs, embed_diagonal(r)))
        if node is None:
            raise InputError("diagonal configuration missing from the letter game")
        good = {
            origins[compiled.moves[node][ei].tid]
            for ei, tgt in enumerate(compiled.arena.edges[node])
            if tgt in winning
        }
        if not good:
            raise InputError(
                "the letter game is lost from a configuration the resolver reaches; "
                "the automaton is not history-deterministic"
            )
        return sorted(good)

    return options


# ---------------------------------------------------------------------------
# The decision procedure.


@dataclass(frozen=True, eq=False)
class HDResult:
    """Everything the history-determinism check established.

    ``hd`` is the verdict of the two-copy letter game.  For
    reachability, ``almost_final_wins`` is the verdict of the second
    route - the letter game retargeted at almost-final regions - which
    provably agrees, and ``almost_final`` lists those regions.
    ``resolver`` is present exactly when ``hd`` holds.
    """

    hd: bool
    kind: AcceptanceKind
    automaton: TimedAutomaton
    report: ValidationReport
    g1: G1Arena
    parity: ParityResult
    almost_final_wins: bool | None
    almost_final: frozenset[tuple[int, Region]] | None
    resolver: RegionResolver | None


def analyze_hd(ta: TimedAutomaton) -> HDResult:
    """Decide history-determinism and extract a region resolver.

    The automaton is completed first; the resolver's transition ids
    refer to the completed automaton (original ids are preserved).
    """
    _require_supported(ta)
    kind = ta.acceptance.kind
    report = validate(ta)
    tac = report.completed
    g1 = g1_arena(tac)
    parity = solve_parity(g1.compiled.arena)
    hd = parity.winners[g1.compiled.initial] is Player.P2
    if kind is AcceptanceKind.SAFETY:
        resolver = None
        if hd:
            acc = set(tac.acceptance.states)
            settled = frozenset(q for q in range(len(tac.states)) if q not in acc)
            winning = parity.winning_set(Player.P2)
            options = _diagonal_options(
                g1.compiled, g1.index, g1.origins, winning,
                lambda q, a: ("l", q, q, a, False),
            )
            table, domain = _walk_resolver(tac, settled, frozenset(), {}, options)
            resolver = RegionResolver(tac, kind, table, {}, frozenset(), settled, domain)
        return HDResult(hd, kind, tac, report, g1, parity, None, None, resolver)

    af = _af_game(tac)
    _, compiled2, keys2, index2, origins2, _ = _two_copy_game(tac, flagged=False)
    n = len(tac.clocks)
    copy1 = range(n)
    copy2 = range(n, 2 * n)
    hers: list[int] = []
    his: list[int] = []
    for v, (gs, r) in enumerate(compiled2.nodes):
        key = keys2[gs]
        if key[0] == "anchor":
            continue
        if (key[2], project_region(r, copy2)) in af.almost:
            hers.append(v)
        elif (key[1], project_region(r, copy1)) in af.almost:
            his.append(v)
    arena2 = absorb_nodes(absorb_nodes(compiled2.arena, hers, 0), his, 1)
    parity2 = solve_parity(arena2)
    af_wins = parity2.winners[compiled2.initial] is Player.P2
    resolver = None
    if hd:
        finals = frozenset(tac.acceptance.states)
        winning = parity2.winning_set(Player.P2)
        options = _diagonal_options(
            compiled2, index2, origins2, winning,
            lambda q, a: ("l", q, q, a),
        )
        table, domain = _walk_resolver(tac, finals, af.almost, af.sigma, options)
        resolver = RegionResolver(tac, kind, table, dict(af.sigma), af.almost, finals, domain)
    return HDResult(hd, kind, tac, report, g1, parity, af_wins, af.almost, resolver)


def check_hd(ta: TimedAutomaton) -> bool:
    """Is the automaton history-deterministic?

    Some run resolving the nondeterminism step by step, without seeing
    the future of the word, must be accepting on every accepted word.
    Decided for safety and reachability acceptance.
    """
    return analyze_hd(ta).hd


def extract_resolver(ta: TimedAutomaton) -> RegionResolver:
    """A region resolver witnessing history-determinism; error if none exists."""
    result = analyze_hd(ta)
    if not result.hd or result.resolver is None:
        raise InputError(f"{ta.name!r} is not history-deterministic; no resolver exists")
    return result.resolver
