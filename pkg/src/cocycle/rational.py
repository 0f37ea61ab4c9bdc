"""Exact rational arithmetic, quotient chains, and rational approximation.

Rationals are plain ``fractions.Fraction`` values: arbitrary precision,
always stored reduced, denominator positive.  Everything downstream keys
caches and sample tables by these exact values, so no float is ever used
to identify a lattice point.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

Rational = Fraction

ONE_HALF = Fraction(1, 2)

_RATIONAL_PATTERN = re.compile(r"[+-]?\d+(?:/\d+)?\Z")

__all__ = [
    "Rational",
    "ONE_HALF",
    "EuclidChain",
    "reduce",
    "parse_rational",
    "format_rational",
    "euclid_chain",
    "approximants",
]


def reduce(num: int, den: int) -> Rational:
    """Return num/den in lowest terms with a positive denominator."""
    if den == 0:
        raise ValueError("denominator must be nonzero")
    return Fraction(num, den)


def parse_rational(text: str) -> Rational:
    """Parse 'p/n' or a bare integer; optional sign, no whitespace."""
    if not _RATIONAL_PATTERN.match(text):
        raise ValueError(f"invalid rational literal {text!r}")
    if "/" in text:
        num, den = text.split("/")
        return reduce(int(num), int(den))
    return Fraction(int(text))


def format_rational(r: Rational) -> str:
    """Render as 'p/n' (denominator kept even when it is 1)."""
    return f"{r.numerator}/{r.denominator}"


@dataclass(frozen=True)
class EuclidChain:
    """Quotient chain of a reduced fraction p/n in (0, 1/2).

    Step j records (m_j, p_{j+1}) where m_j = floor(n / p_j) and
    p_{j+1} = n mod p_j.  The dividend n is fixed: every step divides the
    same n by the current remainder, so remainders strictly decrease to 0
    and quotients never decrease.  On (0, 1/2) the first quotient is >= 2.
    """

    n: int
    steps: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1 or not self.steps:
            raise ValueError("chain needs n >= 1 and at least one step")
        self.remainders()  # full consistency check

    def remainders(self) -> list[int]:
        """Recover [p_0, ..., p_k] from the steps; validates the chain."""
        m0, p1 = self.steps[0]
        if m0 < 1 or (self.n - p1) % m0:
            raise ValueError("inconsistent first step")
        rems = [(self.n - p1) // m0]
        prev_m = 0
        for m, nxt in self.steps:
            p = rems[-1]
            if not (0 < p and 0 <= nxt < p):
                raise ValueError("remainders must strictly decrease to zero")
            if self.n != m * p + nxt:
                raise ValueError("step does not divide n")
            if m < prev_m:
                raise ValueError("quotients must be nondecreasing")
            prev_m = m
            rems.append(nxt)
        if rems[-1] != 0:
            raise ValueError("chain must terminate at remainder zero")
        return rems

    def quotients(self) -> list[int]:
        return [m for m, _ in self.steps]


def euclid_chain(r: Rational) -> EuclidChain:
    """Quotient chain for r = p/n in the open interval (0, 1/2).

    Repeatedly divides the fixed n by the current remainder:
    m_j = floor(n / p_j), p_{j+1} = n - m_j * p_j, until the remainder
    hits zero.  Raises ValueError outside the domain.
    """
    r = Fraction(r)
    if not Fraction(0) < r < ONE_HALF:
        raise ValueError(f"chain domain is (0, 1/2), got {r}")
    n = r.denominator
    p = r.numerator
    steps: list[tuple[int, int]] = []
    while p:
        m, p = divmod(n, p)
        steps.append((m, p))
    return EuclidChain(n=n, steps=tuple(steps))


def _dyadic_near(value: Fraction, level: int) -> Rational:
    # Nearest multiple of 2**-level; ties round down.
    scaled = value * (1 << level)
    num = scaled.numerator // scaled.denominator
    if scaled - num > ONE_HALF:
        num += 1
    return Fraction(num, 1 << level)


def _convergents(value: Fraction, count: int) -> list[Rational]:
    # Standard continued-fraction recurrence.  The leading integer-part
    # convergent is dropped; a terminating expansion repeats its last
    # (exact) convergent to fill the requested count.
    num, den = value.numerator, value.denominator
    p_prev, p_prev2 = 1, 0
    q_prev, q_prev2 = 0, 1
    out: list[Rational] = []
    first = True
    while den:
        a, rem = divmod(num, den)
        p = a * p_prev + p_prev2
        q = a * q_prev + q_prev2
        p_prev2, p_prev = p_prev, p
        q_prev2, q_prev = q_prev, q
        num, den = den, rem
        if first:
            first = False
            continue
        out.append(Fraction(p, q))
        if len(out) == count:
            break
    if not out:
        out.append(Fraction(p_prev, q_prev))  # integer target
    while len(out) < count:
        out.append(out[-1])
    return out


def approximants(t: float | Rational, strategy: str, count: int) -> list[Rational]:
    """Rational sequence converging to t.

    strategy 'dyadic': nearest multiple of 2**-j for j = 1..count (ties
    round down), so |t - q_j| <= 2**-(j+1).  strategy 'convergents':
    continued-fraction convergents of t, which satisfy
    |t - q| < 1/den(q)**2.  Floats are treated through their exact binary
    value; exact rationals may be passed directly.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if isinstance(t, Fraction):
        exact = t
    else:
        tf = float(t)
        if not math.isfinite(tf):
            raise ValueError("t must be finite")
        exact = Fraction(tf)
    if strategy == "dyadic":
        return [_dyadic_near(exact, j) for j in range(1, count + 1)]
    if strategy == "convergents":
        return _convergents(exact, count)
    raise ValueError(f"unknown strategy {strategy!r}")
