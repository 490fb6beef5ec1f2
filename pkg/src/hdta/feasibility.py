"""Exact feasibility of rational linear-inequality systems.

Small Fourier-Motzkin eliminator over ``fractions.Fraction`` that keeps
strict and weak inequalities apart and, when the system is feasible,
returns one exact model (no floating point anywhere).  Used for guard
satisfiability, determinism checks and witness realization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

_ZERO = Fraction(0)


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(c*x for x, c in coeffs) <= rhs`` (or ``<`` when strict)."""

    coeffs: tuple[tuple[int, Fraction], ...]
    strict: bool
    rhs: Fraction

    @staticmethod
    def make(coeffs: Mapping[int, Fraction | int], strict: bool, rhs: Fraction | int) -> "LinearConstraint":
        items = tuple(sorted((v, Fraction(c)) for v, c in coeffs.items() if c != 0))
        return LinearConstraint(items, strict, Fraction(rhs))


def _normalize(con: LinearConstraint) -> LinearConstraint:
    """Scale so the leading coefficient is +-1 (canonical form for dedup)."""
    if not con.coeffs:
        return con
    lead = abs(con.coeffs[0][1])
    if lead == 1:
        return con
    return LinearConstraint(
        tuple((v, c / lead) for v, c in con.coeffs), con.strict, con.rhs / lead
    )


def _combine(pos: LinearConstraint, neg: LinearConstraint, var: int) -> LinearConstraint:
    """Eliminate ``var`` from a pair with positive/negative coefficient."""
    a = dict(pos.coeffs)[var]
    b = dict(neg.coeffs)[var]
    # a > 0, b < 0; multiply pos by -b and neg by a, then add.
    coeffs: dict[int, Fraction] = {}
    for v, c in pos.coeffs:
        coeffs[v] = coeffs.get(v, _ZERO) + c * (-b)
    for v, c in neg.coeffs:
        coeffs[v] = coeffs.get(v, _ZERO) + c * a
    coeffs.pop(var, None)
    rhs = pos.rhs * (-b) + neg.rhs * a
    items = tuple(sorted((v, c) for v, c in coeffs.items() if c != 0))
    return LinearConstraint(items, pos.strict or neg.strict, rhs)


def solve(constraints: Iterable[LinearConstraint], nvars: int) -> list[Fraction] | None:
    """Return one exact model as a list indexed by variable, or None.

    Variables are unrestricted; callers add nonnegativity explicitly.
    """
    system = list(constraints)

    def run(cons: list[LinearConstraint], k: int) -> list[Fraction] | None:
        pending: list[LinearConstraint] = []
        for con in cons:
            if not con.coeffs:
                if con.strict:
                    if not _ZERO < con.rhs:
                        return None
                elif not _ZERO <= con.rhs:
                    return None
            else:
                pending.append(con)
        if k == 0:
            return []
        var = k - 1
        base: list[LinearConstraint] = []
        uppers: list[LinearConstraint] = []
        lowers: list[LinearConstraint] = []
        for con in pending:
            coeff = dict(con.coeffs).get(var)
            if coeff is None:
                base.append(con)
            elif coeff > 0:
                uppers.append(con)
            else:
                lowers.append(con)
        combined: dict[tuple, LinearConstraint] = {}
        for con in base:
            norm = _normalize(con)
            combined[(norm.coeffs, norm.strict, norm.rhs)] = norm
        for up in uppers:
            for lo in lowers:
                norm = _normalize(_combine(up, lo, var))
                if not norm.coeffs:
                    if norm.strict:
                        if not _ZERO < norm.rhs:
                            return None
                    elif not _ZERO <= norm.rhs:
                        return None
                    continue
                combined.setdefault((norm.coeffs, norm.strict, norm.rhs), norm)
        sub = run(list(combined.values()), var)
        if sub is None:
            return None

        def bound(con: LinearConstraint) -> tuple[Fraction, bool]:
            coeff = dict(con.coeffs)[var]
            rest = con.rhs
            for v, c in con.coeffs:
                if v != var:
                    rest -= c * sub[v]
            return rest / coeff, con.strict

        lo_val: Fraction | None = None
        lo_strict = False
        for con in lowers:
            val, strict = bound(con)  # coeff < 0: value is a lower bound
            if lo_val is None or val > lo_val or (val == lo_val and strict):
                lo_val, lo_strict = val, strict
        up_val: Fraction | None = None
        up_strict = False
        for con in uppers:
            val, strict = bound(con)
            if up_val is None or val < up_val or (val == up_val and strict):
                up_val, up_strict = val, strict
        if lo_val is None and up_val is None:
            value = _ZERO
        elif lo_val is None:
            value = up_val - 1 if up_strict else up_val
        elif up_val is None:
            value = lo_val + 1 if lo_strict else lo_val
        else:
            if lo_val == up_val:
                if lo_strict or up_strict:
                    return None
                value = lo_val
            else:
                value = (lo_val + up_val) / 2
        sub.append(value)
        return sub

    return run(system, nvars)


def feasible(constraints: Iterable[LinearConstraint], nvars: int) -> bool:
    return solve(constraints, nvars) is not None
