from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocycle import (
    EuclidChain,
    approximants,
    euclid_chain,
    format_rational,
    parse_rational,
    reduce,
)


class TestReduce:
    def test_gcd_cancellation(self):
        assert reduce(4, 6) == Fraction(2, 3)

    def test_zero_numerator(self):
        assert reduce(0, 5) == Fraction(0)

    def test_sign_moves_to_numerator(self):
        r = reduce(3, -9)
        assert r == Fraction(-1, 3)
        assert r.denominator == 3

    def test_zero_denominator_rejected(self):
        with pytest.raises(ValueError):
            reduce(1, 0)

    @given(st.integers(-10**6, 10**6), st.integers(1, 10**6), st.integers(1, 1000))
    @settings(max_examples=100, deadline=None)
    def test_scaling_invariance(self, num, den, k):
        assert reduce(num * k, den * k) == reduce(num, den)


class TestParseFormat:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("3/4", Fraction(3, 4)),
            ("-2/5", Fraction(-2, 5)),
            ("+1/2", Fraction(1, 2)),
            ("7", Fraction(7)),
            ("-0", Fraction(0)),
            ("6/4", Fraction(3, 2)),
        ],
    )
    def test_valid(self, text, expected):
        assert parse_rational(text) == expected

    @pytest.mark.parametrize("text", ["1.5", "a/b", "1 / 2", "", "1/2/3", "2e3", "1/-2"])
    def test_invalid_syntax(self, text):
        with pytest.raises(ValueError):
            parse_rational(text)

    def test_zero_denominator(self):
        with pytest.raises(ValueError):
            parse_rational("1/0")

    def test_format_round_trip(self):
        for r in (Fraction(3, 7), Fraction(-1, 3), Fraction(5)):
            assert parse_rational(format_rational(r)) == r


class TestEuclidChain:
    @pytest.mark.parametrize(
        "r,steps",
        [
            (Fraction(2, 5), ((2, 1), (5, 0))),
            (Fraction(1, 3), ((3, 0),)),
            (Fraction(3, 7), ((2, 1), (7, 0))),
        ],
    )
    def test_known_chains(self, r, steps):
        chain = euclid_chain(r)
        assert chain.n == r.denominator
        assert chain.steps == steps

    @pytest.mark.parametrize("r", [Fraction(0), Fraction(1, 2), Fraction(3, 5), Fraction(-1, 4), Fraction(2)])
    def test_domain_errors(self, r):
        with pytest.raises(ValueError):
            euclid_chain(r)

    @given(st.integers(2, 500), st.integers(1, 10**4))
    @settings(max_examples=150, deadline=None)
    def test_chain_invariants(self, p, n_seed):
        # draw a reduced p/n strictly inside (0, 1/2)
        n = 2 * p + 1 + (n_seed % (8 * p))
        g = math.gcd(p, n)
        p, n = p // g, n // g
        if p == 0 or 2 * p >= n:
            return
        chain = euclid_chain(Fraction(p, n))
        rems = chain.remainders()
        assert rems[0] == p and rems[-1] == 0
        assert all(a > b for a, b in zip(rems, rems[1:]))
        quots = chain.quotients()
        assert quots[0] >= 2
        assert all(a <= b for a, b in zip(quots, quots[1:]))
        for (m, nxt), cur in zip(chain.steps, rems):
            assert n == m * cur + nxt

    def test_inconsistent_steps_rejected(self):
        with pytest.raises(ValueError):
            EuclidChain(n=5, steps=((2, 2), (5, 0)))  # 5 != 2*?+2 consistently
        with pytest.raises(ValueError):
            EuclidChain(n=7, steps=((2, 1),))  # does not terminate at 0
        with pytest.raises(ValueError):
            EuclidChain(n=7, steps=((3, 1), (2, 0)))  # quotients decrease


class TestApproximants:
    def test_dyadic_exact_target(self):
        assert approximants(0.75, "dyadic", 3) == [
            Fraction(1, 2),
            Fraction(3, 4),
            Fraction(3, 4),
        ]

    def test_convergents_of_sqrt2_minus_1(self):
        got = approximants(math.sqrt(2) - 1, "convergents", 4)
        assert got == [Fraction(1, 2), Fraction(2, 5), Fraction(5, 12), Fraction(12, 29)]

    def test_convergents_of_exact_rational(self):
        assert approximants(Fraction(1, 3), "convergents", 1) == [Fraction(1, 3)]

    def test_convergents_pad_with_exact_tail(self):
        got = approximants(Fraction(1, 3), "convergents", 3)
        assert got == [Fraction(1, 3)] * 3

    def test_dyadic_error_bound(self):
        t = math.pi / 4
        for j, q in enumerate(approximants(t, "dyadic", 20), start=1):
            assert abs(t - float(q)) <= 2.0 ** -(j + 1) + 1e-18
            assert q.denominator <= 2**j

    @pytest.mark.parametrize("t", [math.sqrt(2), math.sqrt(3), math.e, math.pi / 3])
    def test_convergent_quality(self, t):
        # classic best-approximation property, checked in exact arithmetic
        exact = Fraction(t)
        for q in approximants(t, "convergents", 12):
            assert abs(exact - q) < Fraction(1, q.denominator**2)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            approximants(math.inf, "dyadic", 3)

    def test_rejects_unknown_strategy(self):
        with pytest.raises(ValueError):
            approximants(0.5, "farey", 3)

    def test_rejects_bad_count(self):
        with pytest.raises(ValueError):
            approximants(0.5, "dyadic", 0)
