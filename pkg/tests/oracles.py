"""Independent reference implementations used to pin expected values.

Everything here is written directly from first principles (definitions,
brute force, or networkx) and deliberately avoids the package's own
algorithms, so tests compare two independent computations.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def naive_region_equivalent(v1, v2, cmax) -> bool:
    """Textbook clock-equivalence: same threshold behaviour, same integer
    parts, same zero-fraction pattern, same fraction order."""
    n = len(cmax)
    for i in range(n):
        above1, above2 = v1[i] > cmax[i], v2[i] > cmax[i]
        if above1 != above2:
            return False
        if above1:
            continue
        f1 = v1[i] - (v1[i].numerator // v1[i].denominator)
        f2 = v2[i] - (v2[i].numerator // v2[i].denominator)
        if (v1[i].numerator // v1[i].denominator) != (v2[i].numerator // v2[i].denominator):
            return False
        if (f1 == 0) != (f2 == 0):
            return False
    for i in range(n):
        for j in range(n):
            if v1[i] <= cmax[i] and v1[j] <= cmax[j]:
                f1i = v1[i] - (v1[i].numerator // v1[i].denominator)
                f1j = v1[j] - (v1[j].numerator // v1[j].denominator)
                f2i = v2[i] - (v2[i].numerator // v2[i].denominator)
                f2j = v2[j] - (v2[j].numerator // v2[j].denominator)
                if (f1i <= f1j) != (f2i <= f2j):
                    return False
    return True


def random_valuation(rng, n, cmax, denominator_pool=(2, 3, 4, 5, 6, 7)) -> tuple:
    vals = []
    for i in range(n):
        den = rng.choice(denominator_pool)
        num = rng.randrange(0, (cmax[i] + 2) * den)
        vals.append(Fraction(num, den))
    return tuple(vals)


def rabin_accepts_cycle(cycle_nodes, pairs) -> bool:
    """Does a play whose infinitely repeated node set is ``cycle_nodes``
    satisfy some Rabin pair?"""
    inf = set(cycle_nodes)
    for fin, rec in pairs:
        if not (inf & set(fin)) and (inf & set(rec)):
            return True
    return False


def graph_even_lasso_exists(priorities, edges, initial) -> bool:
    """Brute force: is some cycle with even maximal priority reachable?

    ``edges[v]`` lists (target, edge_id).  Uses networkx for cycle
    enumeration, independent of the package's search.
    """
    import networkx as nx

    g = nx.DiGraph()
    g.add_nodes_from(range(len(priorities)))
    for v, row in enumerate(edges):
        for w, _ in row:
            g.add_edge(v, w)
    reachable = {initial} | set(nx.descendants(g, initial))
    for cyc in nx.simple_cycles(g):
        if not set(cyc) <= reachable:
            continue
        if max(priorities[v] for v in cyc) % 2 == 0:
            return True
    return False


def brute_guard_unsat(atoms_eval, nclocks, cmax_hint, steps=4) -> bool:
    """Grid search for a satisfying valuation; True means none found.

    ``atoms_eval(values) -> bool``.  Samples integers and simple
    fractions up to cmax_hint + 1 in every coordinate.
    """
    pool = []
    top = cmax_hint + 1
    for k in range(0, top * steps + 1):
        pool.append(Fraction(k, steps))
    for combo in itertools.product(pool, repeat=nclocks):
        if atoms_eval(combo):
            return False
    return True
