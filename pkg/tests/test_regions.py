"""Region abstraction: construction, successors, guards, graph."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from conftest import frac, g, mk_ta
from oracles import naive_region_equivalent, random_valuation

from hdta.ta import Acceptance, Guard, GuardAtom, InputError, Rel, UnsupportedError
from hdta.regions import (
    Region,
    build_region_graph,
    canonical_valuation,
    delay_chain,
    embed_diagonal,
    enumerate_regions,
    project_region,
    region_guard,
    region_of,
    region_reset,
    region_satisfies,
    time_successor,
    zero_region,
)


def test_region_of_hand_values():
    r = region_of((frac(1, 2), frac(1)), (2, 1))
    assert r.parts == (0, 1)
    assert r.zero_frac == frozenset({1})
    assert r.blocks == (frozenset({0}),)
    top = region_of((frac(5, 2), frac(3, 2)), (2, 1))
    assert top.parts == (None, None)
    mid = region_of((frac(1, 3), frac(2, 3)), (1, 1))
    assert mid.blocks == (frozenset({0}), frozenset({1}))
    tie = region_of((frac(4, 3), frac(1, 3)), (2, 1))
    assert tie.blocks == (frozenset({0, 1}),)


def test_region_of_matches_textbook_equivalence():
    rng = random.Random(11)
    cmax = (2, 1, 1)
    for _ in range(400):
        v1 = random_valuation(rng, 3, cmax)
        v2 = random_valuation(rng, 3, cmax)
        same = region_of(v1, cmax) == region_of(v2, cmax)
        assert same == naive_region_equivalent(v1, v2, cmax)


def test_time_successor_hand_chain():
    cmax = (1, 1)
    r = region_of((frac(3, 10), frac(7, 10)), cmax)
    chain = [r]
    cur = r
    while not cur.all_unbounded:
        cur = time_successor(cur)
        chain.append(cur)
    # 0<x<y<1 -> y=1 -> x in (0,1), y>1 -> x=1, y>1 -> both above
    assert chain[1].parts == (0, 1) and chain[1].zero_frac == frozenset({1})
    assert chain[2].parts == (0, None)
    assert chain[3].parts == (1, None) and chain[3].zero_frac == frozenset({0})
    assert chain[4].all_unbounded
    assert time_successor(chain[4]) == chain[4]


def test_time_successor_matches_smallest_real_delay():
    rng = random.Random(23)
    cmax = (2, 1)
    one = Fraction(1)
    for _ in range(300):
        v = random_valuation(rng, 2, cmax)
        r = region_of(v, cmax)
        succ = time_successor(r)
        if r.all_unbounded:
            assert succ == r
            continue
        fracs = [
            v[i] - (v[i].numerator // v[i].denominator)
            for i in range(2)
            if v[i] <= cmax[i]
        ]
        maxfrac = max(fracs)
        if any(f == 0 for f in fracs):
            # clocks on integers start growing: any small positive delay
            d = (one - maxfrac) / 2 if maxfrac > 0 else Fraction(1, 2)
        else:
            d = one - maxfrac  # largest fractions reach the next integer
        assert region_of(tuple(x + d for x in v), cmax) == succ


def test_delay_chain_is_exactly_the_future_of_a_valuation():
    rng = random.Random(5)
    cmax = (1, 2)
    for _ in range(200):
        v = random_valuation(rng, 2, cmax)
        chain = delay_chain(region_of(v, cmax))
        assert chain[-1].all_unbounded
        for _ in range(20):
            den = rng.choice([1, 2, 3, 5, 7])
            d = Fraction(rng.randrange(0, 30), den)
            assert region_of(tuple(x + d for x in v), cmax) in chain
    # and the chain is duplicate-free
    assert len(set(chain)) == len(chain)


def test_region_reset_commutes_with_valuation_reset():
    rng = random.Random(17)
    cmax = (2, 1, 1)
    for _ in range(300):
        v = random_valuation(rng, 3, cmax)
        resets = frozenset(i for i in range(3) if rng.random() < 0.4)
        reset_v = tuple(Fraction(0) if i in resets else x for i, x in enumerate(v))
        assert region_of(reset_v, cmax) == region_reset(region_of(v, cmax), resets)


def test_region_satisfies_is_constant_on_regions():
    rng = random.Random(29)
    cmax = (2, 2)
    rels = ["<", "<=", ">", ">="]
    for _ in range(300):
        v = random_valuation(rng, 2, cmax)
        r = region_of(v, cmax)
        atoms = [
            GuardAtom(rng.randrange(2), Rel(rng.choice(rels)), rng.randrange(0, 3))
            for _ in range(rng.randrange(1, 4))
        ]
        gu = Guard.of(*atoms)
        assert region_satisfies(r, gu) == gu.holds(v)
        assert gu.holds(canonical_valuation(r)) == gu.holds(v)


def test_region_satisfies_diagonal_between_bounded_clocks():
    cmax = (2, 2)
    r = region_of((frac(3, 2), frac(1, 2)), cmax)  # x - y = 1 exactly
    assert region_satisfies(r, g((0, "<=", 1, 1)))
    assert region_satisfies(r, g((0, ">=", 1, 1)))
    assert not region_satisfies(r, g((0, "<", 1, 1)))
    r2 = region_of((frac(7, 4), frac(1, 2)), cmax)  # x - y in (1, 2)
    assert region_satisfies(r2, g((0, ">", 1, 1)))
    assert region_satisfies(r2, g((0, "<", 2, 1)))
    assert not region_satisfies(r2, g((0, "<=", 1, 1)))


def test_region_satisfies_diagonal_with_unbounded_clock():
    cmax = (1, 1)
    r = region_of((frac(3), frac(5)), cmax)
    with pytest.raises(UnsupportedError):
        region_satisfies(r, g((0, "<=", 0, 1)))
    # a false window atom decides the guard before the diagonal matters
    assert not region_satisfies(r, g((0, "<=", 0, 1), (0, "<=", 1)))


def test_region_satisfies_random_diagonals_on_bounded_regions():
    rng = random.Random(31)
    cmax = (2, 2)
    rels = ["<", "<=", ">", ">="]
    for _ in range(300):
        v = random_valuation(rng, 2, cmax)
        r = region_of(v, cmax)
        if r.parts[0] is None or r.parts[1] is None:
            continue
        x, y = (0, 1) if rng.random() < 0.5 else (1, 0)
        gu = Guard.of(GuardAtom(x, Rel(rng.choice(rels)), rng.randrange(0, 3), y))
        assert region_satisfies(r, gu) == gu.holds(v)


def test_canonical_valuation_round_trips():
    for cmax in [(1,), (2, 1), (1, 1, 2)]:
        for r in enumerate_regions(cmax):
            assert region_of(canonical_valuation(r), cmax) == r


def test_enumerate_regions_counts():
    # one clock, cmax 1: x=0, 0<x<1, x=1, x>1
    assert len(enumerate_regions((1,))) == 4
    # two clocks cmax (1,1): 3*3 point combos + 2*3 one-fraction + 3 orderings
    assert len(enumerate_regions((1, 1))) == 18
    regions = enumerate_regions((2, 1))
    assert len(regions) == len(set(regions))
    vals = {canonical_valuation(r) for r in regions}
    assert len(vals) == len(regions)


def test_region_guard_is_characteristic():
    for cmax in [(1,), (1, 1), (2, 1)]:
        regions = enumerate_regions(cmax)
        for r in regions:
            gu = region_guard(r)
            assert region_satisfies(r, gu)
            assert gu.holds(canonical_valuation(r))
            for other in regions:
                if other != r:
                    assert not region_satisfies(other, gu)


def test_region_guard_on_random_valuations():
    rng = random.Random(37)
    cmax = (2, 1)
    for _ in range(300):
        v = random_valuation(rng, 2, cmax)
        r = region_of(v, cmax)
        gu = region_guard(r)
        assert gu.holds(v)
        w = random_valuation(rng, 2, cmax)
        assert gu.holds(w) == (region_of(w, cmax) == r)


def test_embed_and_project():
    cmax = (1, 2)
    for r in enumerate_regions(cmax):
        d = embed_diagonal(r)
        assert project_region(d, [0, 1]) == r
        assert project_region(d, [2, 3]) == r
        # embedded copies are fraction-tied pairwise
        for b in d.blocks:
            assert {i % 2 if False else i for i in b} == set(b)


def test_region_graph_deterministic_and_sane():
    ta = mk_ta(
        "rg",
        ["p", "q"],
        ["x"],
        ["a"],
        [
            (0, g((0, "<", 1)), "a", set(), 1),
            (0, g((0, ">=", 1)), "a", set(), 0),
            (1, Guard.true(), "a", {0}, 0),
        ],
        Acceptance.safety([0, 1]),
    )
    g1 = build_region_graph(ta)
    g2 = build_region_graph(ta)
    assert g1.nodes == g2.nodes
    assert g1.edges == g2.edges
    assert g1.nodes[0] == (0, zero_region((1,)))
    for row, (q, r) in zip(g1.edges, g1.nodes):
        for e in row:
            if e.kind == "delay":
                assert g1.nodes[e.target] == (q, time_successor(r))
            else:
                t = ta.transitions[e.tid]
                assert t.source == q and region_satisfies(r, t.guard)
                assert g1.nodes[e.target] == (
                    t.target,
                    region_reset(r, t.resets),
                )


def test_zero_region_and_invariants():
    z = zero_region((1, 2))
    assert z.parts == (0, 0) and z.zero_frac == frozenset({0, 1})
    with pytest.raises(InputError):
        Region((1,), (2,), frozenset({0}), ())
    with pytest.raises(InputError):
        Region((1,), (1,), frozenset(), (frozenset({0}),))
