"""Finite parity games: Zielonka solver, certificates, Rabin reduction.

Player P2 is the even player: she wins a play iff the maximum priority
seen infinitely often is even.  Nodes with no outgoing edge lose for
their owner.  Both winning strategies are positional and extracted.
"""

from __future__ import annotations

import enum
import sys
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence


class Player(enum.Enum):
    P1 = "P1"  # wins on odd maxima
    P2 = "P2"  # wins on even maxima

    @property
    def opponent(self) -> "Player":
        return Player.P2 if self is Player.P1 else Player.P1


def winner_of_priority(p: int) -> Player:
    return Player.P2 if p % 2 == 0 else Player.P1


@dataclass(frozen=True)
class GameArena:
    owners: tuple[Player, ...]
    priorities: tuple[int, ...]
    edges: tuple[tuple[int, ...], ...]
    labels: tuple | None = None

    def __post_init__(self) -> None:
        n = len(self.owners)
        if len(self.priorities) != n or len(self.edges) != n:
            raise ValueError("arena field lengths disagree")
        for targets in self.edges:
            for w in targets:
                if not 0 <= w < n:
                    raise ValueError("edge target out of range")

    @property
    def size(self) -> int:
        return len(self.owners)


def _reverse_edges(arena: GameArena) -> list[list[tuple[int, int]]]:
    rev: list[list[tuple[int, int]]] = [[] for _ in range(arena.size)]
    for v, targets in enumerate(arena.edges):
        for ei, w in enumerate(targets):
            rev[w].append((v, ei))
    return rev


def attractor(
    arena: GameArena,
    player: Player,
    targets: Iterable[int],
    alive: set[int],
    rev: list[list[tuple[int, int]]] | None = None,
) -> tuple[set[int], dict[int, int]]:
    """Player's attractor to ``targets`` within ``alive``, with strategy.

    Opponent nodes whose alive edges all enter the set join it; an
    opponent node with no alive edge joins vacuously (it is stuck).
    """
    if rev is None:
        rev = _reverse_edges(arena)
    attr = {t for t in targets if t in alive}
    strat: dict[int, int] = {}
    queue: deque[int] = deque(sorted(attr))
    cnt: dict[int, int] = {}
    for v in alive:
        if arena.owners[v] is not player and v not in attr:
            c = sum(1 for w in arena.edges[v] if w in alive)
            cnt[v] = c
            if c == 0:
                attr.add(v)
                queue.append(v)
    while queue:
        v = queue.popleft()
        for u, ei in rev[v]:
            if u not in alive or u in attr:
                continue
            if arena.owners[u] is player:
                attr.add(u)
                strat[u] = ei
                queue.append(u)
            else:
                cnt[u] -= 1
                if cnt[u] == 0:
                    attr.add(u)
                    queue.append(u)
    return attr, strat


@dataclass
class ParityResult:
    arena: GameArena
    winners: tuple[Player, ...]
    strategy: dict[Player, dict[int, int]]

    def winning_set(self, player: Player) -> set[int]:
        return {v for v, w in enumerate(self.winners) if w is player}


def _normalize_total(arena: GameArena) -> tuple[GameArena, int]:
    """Give every dead end a forced edge to a sink won by its opponent."""
    dead = [v for v in range(arena.size) if not arena.edges[v]]
    if not dead:
        return arena, arena.size
    n = arena.size
    sink_even, sink_odd = n, n + 1  # priorities 0 / 1, self-loops
    owners = arena.owners + (Player.P1, Player.P1)
    prios = arena.priorities + (0, 1)
    edges = list(arena.edges)
    for v in dead:
        edges[v] = (sink_even,) if arena.owners[v] is Player.P1 else (sink_odd,)
    edges.extend([(sink_even,), (sink_odd,)])
    labels = None
    if arena.labels is not None:
        labels = arena.labels + ("_sink_even", "_sink_odd")
    return GameArena(owners, prios, tuple(edges), labels), n


def solve_parity(arena: GameArena) -> ParityResult:
    """Zielonka's algorithm with positional strategies for both players."""
    norm, n_orig = _normalize_total(arena)
    rev = _reverse_edges(norm)
    dead_nodes = {v for v in range(arena.size) if not arena.edges[v]}

    limit = max(sys.getrecursionlimit(), 4 * norm.size + 1000)
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(limit)
    try:
        win1, win2, strat1, strat2 = _zielonka(norm, set(range(norm.size)), rev)
    finally:
        sys.setrecursionlimit(old_limit)

    winners = tuple(
        Player.P1 if v in win1 else Player.P2 for v in range(n_orig)
    )
    s1 = {v: e for v, e in strat1.items() if v < n_orig and v not in dead_nodes}
    s2 = {v: e for v, e in strat2.items() if v < n_orig and v not in dead_nodes}
    return ParityResult(arena, winners, {Player.P1: s1, Player.P2: s2})


def _zielonka(
    arena: GameArena, alive: set[int], rev: list[list[tuple[int, int]]]
) -> tuple[set[int], set[int], dict[int, int], dict[int, int]]:
    if not alive:
        return set(), set(), {}, {}
    d = max(arena.priorities[v] for v in alive)
    pl = winner_of_priority(d)
    top = {v for v in alive if arena.priorities[v] == d}
    attr_top, astrat = attractor(arena, pl, top, alive, rev)
    w1, w2, s1, s2 = _zielonka(arena, alive - attr_top, rev)
    wins = {Player.P1: w1, Player.P2: w2}
    strats = {Player.P1: s1, Player.P2: s2}
    if not wins[pl.opponent]:
        strat_pl = dict(strats[pl])
        strat_pl.update(astrat)
        for v in sorted(top):
            if arena.owners[v] is pl and v not in strat_pl:
                for ei, w in enumerate(arena.edges[v]):
                    if w in alive:
                        strat_pl[v] = ei
                        break
        if pl is Player.P1:
            return set(alive), set(), strat_pl, {}
        return set(), set(alive), {}, strat_pl
    attr_op, bstrat = attractor(arena, pl.opponent, wins[pl.opponent], alive, rev)
    w1b, w2b, s1b, s2b = _zielonka(arena, alive - attr_op, rev)
    winsb = {Player.P1: w1b, Player.P2: w2b}
    stratsb = {Player.P1: s1b, Player.P2: s2b}
    op = pl.opponent
    win_op = winsb[op] | attr_op
    strat_op = dict(strats[op])  # valid on its old winning set
    strat_op.update(bstrat)
    strat_op.update(stratsb[op])
    win_pl = winsb[pl]
    strat_pl = stratsb[pl]
    if op is Player.P1:
        return win_op, win_pl, strat_op, strat_pl
    return win_pl, win_op, strat_pl, strat_op


# ---------------------------------------------------------------------------
# Certificates.


def strongly_connected_components(
    nodes: Iterable[int], succ: Callable[[int], Iterable[int]]
) -> list[list[int]]:
    """Iterative Tarjan; components in deterministic discovery order."""
    nodes = sorted(nodes)
    node_set = set(nodes)
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work: list[tuple[int, Iterable]] = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in node_set:
                    continue
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


def _has_bad_cycle(
    nodes: set[int],
    succ: Callable[[int], list[int]],
    priorities: Sequence[int],
    bad_parity: int,
) -> bool:
    """Is there a cycle (within ``nodes``) whose maximal priority has
    ``bad_parity``?"""
    prios = sorted({priorities[v] for v in nodes if priorities[v] % 2 == bad_parity}, reverse=True)
    for p in prios:
        sub = {v for v in nodes if priorities[v] <= p}
        comps = strongly_connected_components(sub, lambda v: [w for w in succ(v) if w in sub])
        for comp in comps:
            if not any(priorities[v] == p for v in comp):
                continue
            if len(comp) > 1:
                return True
            v = comp[0]
            if v in succ(v):
                return True
    return False


def verify_strategy(
    arena: GameArena, player: Player, claimed: set[int], strategy: dict[int, int]
) -> bool:
    """Certify: following ``strategy`` inside ``claimed`` wins for ``player``.

    Checks closure (strategy edges and all opponent edges stay inside)
    and that the strategy-restricted subgraph has no cycle whose maximal
    priority favours the opponent.
    """
    succs: dict[int, list[int]] = {}
    for v in claimed:
        if arena.owners[v] is player:
            if not arena.edges[v]:
                return False  # player stuck on a claimed node
            e = strategy.get(v)
            if e is None or not 0 <= e < len(arena.edges[v]):
                return False
            tgt = arena.edges[v][e]
            if tgt not in claimed:
                return False
            succs[v] = [tgt]
        else:
            if any(w not in claimed for w in arena.edges[v]):
                return False  # opponent can escape the claimed region
            succs[v] = list(arena.edges[v])
    bad_parity = 1 if player is Player.P2 else 0
    return not _has_bad_cycle(set(claimed), lambda v: succs[v], arena.priorities, bad_parity)


def solve_brute_force(arena: GameArena) -> tuple[Player, ...]:
    """Reference solver: enumerate P2's positional strategies."""
    import itertools

    norm, n_orig = _normalize_total(arena)
    p2_nodes = [v for v in range(norm.size) if norm.owners[v] is Player.P2]
    w2: set[int] = set()
    choices = [range(len(norm.edges[v])) for v in p2_nodes]
    for combo in itertools.product(*choices):
        fixed: dict[int, int] = dict(zip(p2_nodes, combo))

        def succ(v: int) -> list[int]:
            if norm.owners[v] is Player.P2:
                return [norm.edges[v][fixed[v]]]
            return list(norm.edges[v])

        # Nodes lying on (or reaching) a cycle with odd maximum are P1 wins.
        all_nodes = set(range(norm.size))
        bad_seed: set[int] = set()
        odd_prios = sorted({p for p in norm.priorities if p % 2 == 1}, reverse=True)
        for p in odd_prios:
            sub = {v for v in all_nodes if norm.priorities[v] <= p}
            for comp in strongly_connected_components(
                sub, lambda v: [w for w in succ(v) if w in sub]
            ):
                if not any(norm.priorities[v] == p for v in comp):
                    continue
                if len(comp) > 1 or comp[0] in succ(comp[0]):
                    bad_seed.update(comp)
        # Backward reachability of bad_seed in the fixed graph.
        rev: list[list[int]] = [[] for _ in range(norm.size)]
        for v in all_nodes:
            for w in succ(v):
                rev[w].append(v)
        reach_bad = set(bad_seed)
        queue = deque(sorted(bad_seed))
        while queue:
            v = queue.popleft()
            for u in rev[v]:
                if u not in reach_bad:
                    reach_bad.add(u)
                    queue.append(u)
        w2 |= all_nodes - reach_bad
        if len(w2) == norm.size:
            break
    return tuple(Player.P2 if v in w2 else Player.P1 for v in range(n_orig))


# ---------------------------------------------------------------------------
# Nonemptiness of a parity graph (no owners): accepting lasso search.


def parity_nonemptiness(
    priorities: Sequence[int],
    edges: Sequence[Sequence[tuple[int, int]]],
    initial: int,
) -> tuple[list[int], list[int]] | None:
    """Find a reachable cycle with even maximal priority.

    ``edges[v]`` lists ``(target, edge_id)``.  Returns (stem, cycle) as
    edge-id sequences, or None.  The cycle's maximum priority is even.
    """
    n = len(priorities)

    def path_to(goal: int, start: int, within: set[int] | None) -> list[int] | None:
        """Edge-id path from start to goal (empty when start == goal)."""
        if start == goal:
            return []
        parent: dict[int, tuple[int, int]] = {}
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w, ei in edges[v]:
                if within is not None and w not in within:
                    continue
                if w in seen:
                    continue
                seen.add(w)
                parent[w] = (v, ei)
                if w == goal:
                    path: list[int] = []
                    cur = w
                    while cur != start:
                        u, e2 = parent[cur]
                        path.append(e2)
                        cur = u
                    path.reverse()
                    return path
                queue.append(w)
        return None

    for p in sorted({x for x in priorities if x % 2 == 0}, reverse=True):
        sub = {v for v in range(n) if priorities[v] <= p}
        comps = strongly_connected_components(
            sub, lambda v: [w for w, _ in edges[v] if w in sub]
        )
        for comp in comps:
            comp_set = set(comp)
            anchors = [v for v in comp if priorities[v] == p]
            if not anchors:
                continue
            for v in anchors:
                stem = path_to(v, initial, None)
                if stem is None:
                    continue
                # one step out of v, then back to v inside the component
                for w, ei in edges[v]:
                    if w not in comp_set:
                        continue
                    back = path_to(v, w, comp_set)
                    if back is not None:
                        return stem, [ei] + back
    return None


# ---------------------------------------------------------------------------
# Rabin pairs to parity via index appearance records.


@dataclass
class LarReduction:
    arena: GameArena
    payload: tuple[tuple[int, tuple[int, ...], int], ...]  # (orig node, record, priority)
    initial: int
    pairs: tuple[tuple[frozenset[int], frozenset[int]], ...]


def _lar_step(
    perm: tuple[int, ...],
    node: int,
    pairs: Sequence[tuple[frozenset[int], frozenset[int]]],
) -> tuple[tuple[int, ...], int]:
    e = 0
    f = 0
    fhit: list[int] = []
    rest: list[int] = []
    for pos, idx in enumerate(perm, start=1):
        fin, inf = pairs[idx]
        if node in fin:
            e = max(e, pos)
            fhit.append(idx)
        else:
            rest.append(idx)
        if node in inf:
            f = max(f, pos)
    new_perm = tuple(fhit + rest)
    prio = 2 * e + 1 if e >= f else 2 * f
    return new_perm, prio


def rabin_to_parity_lar(
    arena: GameArena,
    pairs: Sequence[tuple[frozenset[int], frozenset[int]]],
    initial: int,
) -> LarReduction:
    """Expand a Rabin game (P2 wins iff some pair has its finite set
    avoided eventually and its infinite set hit forever) into a parity
    game whose nodes carry an index appearance record."""
    pairs = tuple((frozenset(f), frozenset(i)) for f, i in pairs)
    ident = tuple(range(len(pairs)))
    start_perm, start_prio = _lar_step(ident, initial, pairs)
    start = (initial, start_perm, start_prio)
    index: dict[tuple[int, tuple[int, ...], int], int] = {start: 0}
    order = [start]
    edges: list[tuple[int, ...]] = []
    i = 0
    while i < len(order):
        v, perm, _ = order[i]
        i += 1
        row = []
        for w in arena.edges[v]:
            nperm, nprio = _lar_step(perm, w, pairs)
            key = (w, nperm, nprio)
            if key not in index:
                index[key] = len(order)
                order.append(key)
            row.append(index[key])
        edges.append(tuple(row))
    owners = tuple(arena.owners[v] for v, _, _ in order)
    prios = tuple(h for _, _, h in order)
    new_arena = GameArena(owners, prios, tuple(edges))
    return LarReduction(new_arena, tuple(order), 0, pairs)


def absorb_nodes(arena: GameArena, nodes: Iterable[int], priority: int) -> GameArena:
    """Turn the given nodes into absorbing self-loops with the priority."""
    nodes = set(nodes)
    edges = tuple(
        (v,) if v in nodes else targets for v, targets in enumerate(arena.edges)
    )
    prios = tuple(
        priority if v in nodes else p for v, p in enumerate(arena.priorities)
    )
    return GameArena(arena.owners, prios, edges, arena.labels)
