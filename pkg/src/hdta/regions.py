"""Region abstraction for timed automata.

A region records, per clock, either "above its maximal constant" or the
integer part together with the ordering of clock fractions: which
bounded clocks have fraction zero, and the ascending blocks of equal
positive fractions.  Two valuations in the same region satisfy the same
guards and stay region-equivalent under delays and resets, which makes
the abstraction a finite bisimulation quotient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .ta import (
    Guard,
    GuardAtom,
    InputError,
    Rel,
    TimedAutomaton,
    UnsupportedError,
)


@dataclass(frozen=True)
class Region:
    """One region of the clock space for the given per-clock bounds.

    ``parts[i]`` is ``None`` when clock ``i`` exceeds ``cmax[i]``,
    otherwise its integer part.  ``zero_frac`` lists bounded clocks with
    fraction zero; ``blocks`` lists the groups of bounded clocks with
    equal positive fractions, in ascending fraction order.
    """

    cmax: tuple[int, ...]
    parts: tuple[int | None, ...]
    zero_frac: frozenset[int]
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        bounded = {i for i, p in enumerate(self.parts) if p is not None}
        claimed = set(self.zero_frac)
        for b in self.blocks:
            if not b:
                raise InputError("empty fraction block")
            claimed |= set(b)
        if claimed != bounded:
            raise InputError("region fraction data does not match bounded clocks")
        for i in bounded:
            if not 0 <= self.parts[i] <= self.cmax[i]:
                raise InputError("region integer part out of range")
            if self.parts[i] == self.cmax[i] and i not in self.zero_frac:
                raise InputError("clock at its maximal constant must have fraction zero")

    @property
    def nclocks(self) -> int:
        return len(self.parts)

    def is_unbounded(self, clock: int) -> bool:
        return self.parts[clock] is None

    @property
    def all_unbounded(self) -> bool:
        return all(p is None for p in self.parts)

    def describe(self, clock_names: Sequence[str]) -> str:
        out = []
        block_of = {}
        for j, b in enumerate(self.blocks):
            for c in b:
                block_of[c] = j
        for i, name in enumerate(clock_names):
            p = self.parts[i]
            if p is None:
                out.append(f"{name}>{self.cmax[i]}")
            elif i in self.zero_frac:
                out.append(f"{name}={p}")
            else:
                out.append(f"{p}<{name}<{p + 1}#{block_of[i]}")
        return ";".join(out)


def region_of(values: Sequence[Fraction], cmax: Sequence[int]) -> Region:
    """The region containing the valuation."""
    if len(values) != len(cmax):
        raise InputError("valuation length does not match clock count")
    parts: list[int | None] = []
    zero: set[int] = set()
    fracs: dict[Fraction, set[int]] = {}
    for i, v in enumerate(values):
        v = Fraction(v)
        if v < 0:
            raise InputError("negative clock value")
        if v > cmax[i]:
            parts.append(None)
            continue
        k = v.numerator // v.denominator
        parts.append(k)
        f = v - k
        if f == 0:
            zero.add(i)
        else:
            fracs.setdefault(f, set()).add(i)
    blocks = tuple(frozenset(fracs[f]) for f in sorted(fracs))
    return Region(tuple(cmax), tuple(parts), frozenset(zero), blocks)


def zero_region(cmax: Sequence[int]) -> Region:
    n = len(cmax)
    return Region(tuple(cmax), (0,) * n, frozenset(range(n)), ())


def time_successor(r: Region) -> Region:
    """The next region reached by letting time pass (self for the top region)."""
    if r.all_unbounded:
        return r
    if r.zero_frac:
        # Clocks sitting on an integer start growing a fraction; those at
        # their maximal constant leave the bounded range instead.
        parts = list(r.parts)
        promoted = []
        for i in sorted(r.zero_frac):
            if parts[i] == r.cmax[i]:
                parts[i] = None
            else:
                promoted.append(i)
        blocks = ((frozenset(promoted),) + r.blocks) if promoted else r.blocks
        return Region(r.cmax, tuple(parts), frozenset(), blocks)
    # No clock on an integer: the largest fractions reach the next integer.
    top = r.blocks[-1]
    parts = list(r.parts)
    for i in top:
        parts[i] += 1
    return Region(r.cmax, tuple(parts), frozenset(top), r.blocks[:-1])


def delay_chain(r: Region) -> list[Region]:
    """All regions reachable by waiting, starting with ``r`` itself."""
    out = [r]
    cur = r
    while True:
        nxt = time_successor(cur)
        if nxt == cur:
            return out
        out.append(nxt)
        cur = nxt


def region_reset(r: Region, resets: Iterable[int]) -> Region:
    rs = frozenset(resets)
    if not rs:
        return r
    parts = tuple(0 if i in rs else p for i, p in enumerate(r.parts))
    zero = (r.zero_frac | rs) if rs else r.zero_frac
    blocks = []
    for b in r.blocks:
        rem = b - rs
        if rem:
            blocks.append(rem)
    return Region(r.cmax, parts, frozenset(zero), tuple(blocks))


def _diff_interval(r: Region, x: int, y: int) -> tuple[int, bool]:
    """Value of ``x - y`` on the region: (m, True) means exactly m,
    (m, False) means the open interval (m, m+1).  Both clocks bounded."""
    kx, ky = r.parts[x], r.parts[y]
    m = kx - ky
    zx, zy = x in r.zero_frac, y in r.zero_frac
    if zx and zy:
        return m, True
    if not zx and not zy:
        bx = by = -1
        for j, b in enumerate(r.blocks):
            if x in b:
                bx = j
            if y in b:
                by = j
        if bx == by:
            return m, True
        if bx < by:
            return m - 1, False
        return m, False
    if zx:  # frac(x)=0 < frac(y): difference in (m-1, m)
        return m - 1, False
    return m, False


def _atom_on_region(r: Region, a: GuardAtom) -> bool | None:
    """Evaluate an atom on a region; None if genuinely undetermined."""
    if a.right is None:
        p = r.parts[a.left]
        if p is None:
            if a.bound > r.cmax[a.left]:
                raise InputError(
                    "guard bound exceeds the region's clock bound; rebuild regions with this guard"
                )
            return a.rel in (Rel.GT, Rel.GE)
        if a.bound > r.cmax[a.left]:
            return a.rel in (Rel.LT, Rel.LE)  # value <= cmax < bound
        k = p
        if a.left in r.zero_frac:
            return a.rel.holds(Fraction(k), a.bound)
        # value in the open interval (k, k+1)
        if a.rel is Rel.LT or a.rel is Rel.LE:
            return a.bound >= k + 1
        return a.bound <= k
    if r.parts[a.left] is None or r.parts[a.right] is None:
        return None
    m, exact = _diff_interval(r, a.left, a.right)
    if exact:
        return a.rel.holds(Fraction(m), a.bound)
    # difference in the open interval (m, m+1)
    if a.rel is Rel.LT or a.rel is Rel.LE:
        return a.bound >= m + 1
    return a.bound <= m


def region_satisfies(r: Region, g: Guard) -> bool:
    """Does every valuation of the region satisfy the guard?

    Single-clock atoms and diagonal atoms between two bounded clocks are
    always determined on a region.  A diagonal atom involving an
    unbounded clock is undetermined; it only raises when no other atom
    already falsifies the guard.
    """
    undetermined = False
    for a in g.atoms:
        v = _atom_on_region(r, a)
        if v is False:
            return False
        if v is None:
            undetermined = True
    if undetermined:
        raise UnsupportedError(
            "diagonal guard atom undetermined on a region with an unbounded clock"
        )
    return True


def canonical_valuation(r: Region) -> tuple[Fraction, ...]:
    """One representative valuation (fractions use denominator 2(|C|+1))."""
    n = r.nclocks
    block_of = {}
    for j, b in enumerate(r.blocks):
        for c in b:
            block_of[c] = j
    vals = []
    for i in range(n):
        p = r.parts[i]
        if p is None:
            vals.append(Fraction(2 * r.cmax[i] + 1, 2))
        elif i in r.zero_frac:
            vals.append(Fraction(p))
        else:
            vals.append(p + Fraction(block_of[i] + 1, n + 1))
    return tuple(vals)


def _ordered_partitions(items: list[int]) -> list[list[frozenset[int]]]:
    """All partitions of ``items`` into an ordered sequence of nonempty blocks."""
    if not items:
        return [[]]
    out: list[list[frozenset[int]]] = []
    first, rest = items[0], items[1:]
    for sub in _ordered_partitions(rest):
        for j, b in enumerate(sub):  # join an existing block
            out.append(sub[:j] + [b | {first}] + sub[j + 1 :])
        for j in range(len(sub) + 1):  # or sit alone at position j
            out.append(sub[:j] + [frozenset({first})] + sub[j:])
    return out


def enumerate_regions(cmax: Sequence[int]) -> list[Region]:
    """All regions of the clock space with the given per-clock bounds."""
    n = len(cmax)
    per_clock: list[list[tuple[int | None, str]]] = []
    for i in range(n):
        opts: list[tuple[int | None, str]] = [(None, "unb")]
        for k in range(cmax[i] + 1):
            opts.append((k, "zero"))
        for k in range(cmax[i]):
            opts.append((k, "pos"))
        per_clock.append(opts)
    out: list[Region] = []

    def rec(i: int, parts: list[int | None], zero: set[int], pos: list[int]) -> None:
        if i == n:
            for blocks in _ordered_partitions(pos):
                out.append(Region(tuple(cmax), tuple(parts), frozenset(zero), tuple(blocks)))
            return
        for k, kind in per_clock[i]:
            parts.append(k)
            if kind == "zero":
                zero.add(i)
            elif kind == "pos":
                pos.append(i)
            rec(i + 1, parts, zero, pos)
            parts.pop()
            if kind == "zero":
                zero.discard(i)
            elif kind == "pos":
                pos.pop()

    rec(0, [], set(), [])
    return out


def embed_diagonal(r: Region, offset: int | None = None) -> Region:
    """Duplicate every clock: the pair (i, i+n) shares part and fraction."""
    n = r.nclocks
    if offset is None:
        offset = n
    if offset != n:
        raise InputError("diagonal embedding duplicates the full clock set")
    parts = r.parts + r.parts
    zero = frozenset(set(r.zero_frac) | {i + n for i in r.zero_frac})
    blocks = tuple(frozenset(set(b) | {i + n for i in b}) for b in r.blocks)
    return Region(r.cmax + r.cmax, parts, zero, blocks)


def project_region(r: Region, clocks: Sequence[int]) -> Region:
    """Restrict the region to the given clocks (in the given order)."""
    remap = {c: i for i, c in enumerate(clocks)}
    parts = tuple(r.parts[c] for c in clocks)
    cmax = tuple(r.cmax[c] for c in clocks)
    zero = frozenset(remap[c] for c in r.zero_frac if c in remap)
    blocks = []
    for b in r.blocks:
        kept = frozenset(remap[c] for c in b if c in remap)
        if kept:
            blocks.append(kept)
    return Region(cmax, parts, zero, tuple(blocks))


# ---------------------------------------------------------------------------
# Region guards: a guard whose solution set is exactly one region.


def region_guard(r: Region) -> Guard:
    """Characteristic guard of the region (window atoms plus fraction order).

    Fraction ordering between bounded clocks is expressed with diagonal
    atoms; every diagonal atom is accompanied by the per-clock window
    atoms, so the guard stays decidable on arbitrary regions.
    """
    atoms: list[GuardAtom] = []
    for i in range(r.nclocks):
        p = r.parts[i]
        if p is None:
            atoms.append(GuardAtom(i, Rel.GT, r.cmax[i]))
        elif i in r.zero_frac:
            atoms.append(GuardAtom(i, Rel.LE, p))
            atoms.append(GuardAtom(i, Rel.GE, p))
        else:
            atoms.append(GuardAtom(i, Rel.GT, p))
            atoms.append(GuardAtom(i, Rel.LT, p + 1))

    def eq_atoms(x: int, y: int) -> list[GuardAtom]:
        # frac(x) == frac(y)  <=>  x - y == parts[x] - parts[y]
        m = r.parts[x] - r.parts[y]
        if m < 0:
            x, y, m = y, x, -m
        return [GuardAtom(x, Rel.LE, m, y), GuardAtom(x, Rel.GE, m, y)]

    def lt_atom(x: int, y: int) -> GuardAtom:
        # frac(x) < frac(y)  <=>  x - y < parts[x] - parts[y]
        m = r.parts[x] - r.parts[y]
        if m > 0:
            return GuardAtom(x, Rel.LT, m, y)
        return GuardAtom(y, Rel.GT, -m, x)

    chain: list[int] = []  # one representative per block, ascending fractions
    for b in r.blocks:
        members = sorted(b)
        rep = members[0]
        for other in members[1:]:
            atoms.extend(eq_atoms(rep, other))
        chain.append(rep)
    for lo, hi in zip(chain, chain[1:]):
        atoms.append(lt_atom(lo, hi))
    if r.zero_frac and chain:
        # Zero-fraction clocks sit below every positive fraction; implied by
        # the window atoms (integer value vs strict interval), so no atom.
        pass
    return Guard.of(*atoms)


# ---------------------------------------------------------------------------
# Region graph of a timed automaton.


@dataclass(frozen=True)
class RegionEdge:
    kind: str  # "delay" or "trans"
    tid: int  # -1 for delay edges
    target: int


@dataclass
class RegionGraph:
    ta: TimedAutomaton
    nodes: list[tuple[int, Region]]
    node_index: dict[tuple[int, Region], int]
    edges: list[list[RegionEdge]]

    def node_of(self, state: int, region: Region) -> int:
        return self.node_index[(state, region)]


def build_region_graph(ta: TimedAutomaton) -> RegionGraph:
    """Reachable region graph: delay edges step to the time successor,
    transition edges fire enabled transitions without waiting."""
    start = (ta.initial, zero_region(ta.cmax))
    nodes: list[tuple[int, Region]] = [start]
    index = {start: 0}
    edges: list[list[RegionEdge]] = []
    i = 0
    while i < len(nodes):
        q, r = nodes[i]
        out: list[RegionEdge] = []

        def visit(node: tuple[int, Region]) -> int:
            if node not in index:
                index[node] = len(nodes)
                nodes.append(node)
            return index[node]

        succ = time_successor(r)
        if succ != r:
            out.append(RegionEdge("delay", -1, visit((q, succ))))
        for t in ta.transitions_from[q]:
            if region_satisfies(r, t.guard):
                out.append(RegionEdge("trans", t.tid, visit((t.target, region_reset(r, t.resets)))))
        edges.append(out)
        i += 1
    return RegionGraph(ta, nodes, index, edges)
