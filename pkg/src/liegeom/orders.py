"""Integer feasibility conditions for generalised hexagon orders.

Everything is exact big-integer arithmetic: the square-root of st is an
integer square root whose exactness is asserted, and integrality of the
multiplicity expressions is a divisibility test on exact fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class HexOrder:
    s: int
    t: int

    def __post_init__(self):
        if self.s < 2 or self.t < 2:
            raise ValueError("hexagon orders need s, t >= 2")


def st_square_check(o: HexOrder) -> bool:
    """True iff s*t is a perfect square."""
    st = o.s * o.t
    r = math.isqrt(st)
    return r * r == st


def multiplicity_integrality(o: HexOrder) -> tuple[bool, bool]:
    """Integrality of st(1+s+t+st)(1 +- sqrt(st) + st) / (2(s+t +- sqrt(st)))."""
    s, t = o.s, o.t
    st = s * t
    r = math.isqrt(st)
    if r * r != st:
        raise ValueError("multiplicities need st to be a perfect square")
    out = []
    for sign in (1, -1):
        num = st * (1 + s + t + st) * (1 + sign * r + st)
        den = 2 * (s + t + sign * r)
        out.append(Fraction(num, den).denominator == 1)
    return tuple(out)  # type: ignore[return-value]


def feasible_hexagon_order(o: HexOrder) -> bool:
    if not st_square_check(o):
        return False
    plus, minus = multiplicity_integrality(o)
    return plus and minus


@dataclass
class NonexReport:
    t_max: int
    excluded: list[tuple[int, int, str]]   # (t, s, failed condition)
    failures: list[tuple[int, int]]        # feasible orders, i.e. falsifications

    @property
    def all_excluded(self) -> bool:
        return not self.failures


def verify_nonex(t_max: int) -> NonexReport:
    """Exclude every order (t + t^2, t) for t in [2, t_max]."""
    excluded = []
    failures = []
    for t in range(2, t_max + 1):
        s = t + t * t
        o = HexOrder(s, t)
        if not st_square_check(o):
            excluded.append((t, s, "st-square"))
            continue
        plus, minus = multiplicity_integrality(o)
        if not plus:
            excluded.append((t, s, "plus-integrality"))
        elif not minus:
            excluded.append((t, s, "minus-integrality"))
        else:
            failures.append((t, s))
    return NonexReport(t_max, excluded, failures)
