"""Shared oracles for the test suite.

Each builtin seed g has the closed-form solution f(t) = g(t) - (g(1) -
g(0)) * t, the unique continuous solution of F(x, y) = f(x+y) - f(x) -
f(y) with f(1) = f(0) when F is the additivity defect of g.  Tests
compare reconstructions against these, never against the code under
test.
"""

from __future__ import annotations

import math

from cocycle import builtin_seed, cocycle_from_seed

SEED_FUNCS = {
    "square": lambda t: t * t,
    "cube": lambda t: t**3,
    "expo": math.exp,
    "sine": math.sin,
    "hoelder": lambda t: math.sqrt(abs(t)),
}

SMOOTH_SEEDS = ("square", "cube", "expo", "sine")
ALL_SEEDS = tuple(SEED_FUNCS)


def seed_kernel(name: str):
    """F(x, y) = g(x+y) - g(x) - g(y) for the named builtin seed."""
    return cocycle_from_seed(builtin_seed(name))


def oracle_solution(name: str):
    """Closed-form f normalized by f(1) = f(0)."""
    g = SEED_FUNCS[name]
    slope = g(1.0) - g(0.0)
    return lambda t: g(float(t)) - slope * float(t)
