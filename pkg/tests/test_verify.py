from __future__ import annotations

import json
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import ALL_SEEDS, oracle_solution, seed_kernel
from cocycle import (
    affine_difference,
    bivariate_expression,
    check_bound_c0,
    cocycle_residual,
    grid_keys,
    kurepa_residual,
    modulus_estimate,
    modulus_probe,
    modulus_profile,
    reconstruct_table,
    symmetry_residual,
)

F_BILINEAR = bivariate_expression("2*x*y")
F_SKEW = bivariate_expression("x*y^2")

_REPORT_KEYS = [
    "check",
    "params",
    "max_residual",
    "witness",
    "lhs",
    "rhs",
    "slack",
    "pass",
    "tolerance",
]


def _random_points(n, dim, span=1.0, seed=0):
    rng = random.Random(seed)
    return [tuple(rng.uniform(-span, span) for _ in range(dim)) for _ in range(n)]


class TestKurepaResidual:
    def test_bilinear_satisfies_identity(self):
        report = kurepa_residual(F_BILINEAR, _random_points(200, 3))
        assert report.passed
        assert report.results[0].max_residual <= 1e-12

    def test_skew_counterexample_at_unit_triple(self):
        # (x+y)z^2 + xy^2 = 3 versus yz^2 + x(y+z)^2 = 5 at (1,1,1)
        report = kurepa_residual(F_SKEW, [(1.0, 1.0, 1.0)])
        result = report.results[0]
        assert result.max_residual == 2.0
        assert not report.passed
        assert result.witness == (1.0, 1.0, 1.0)

    def test_constant_kernel_passes(self):
        F = bivariate_expression("3")
        report = kurepa_residual(F, _random_points(50, 3))
        assert report.results[0].max_residual == 0.0

    def test_witness_reevaluates_to_maximum(self):
        report = kurepa_residual(F_SKEW, _random_points(100, 3, seed=5))
        x, y, z = report.results[0].witness
        again = abs(
            F_SKEW(x + y, z) + F_SKEW(x, y) - F_SKEW(y, z) - F_SKEW(x, y + z)
        )
        assert again == report.results[0].max_residual

    def test_empty_samples_rejected(self):
        with pytest.raises(ValueError):
            kurepa_residual(F_BILINEAR, [])


class TestSymmetryResidual:
    def test_cocycle_is_symmetric(self):
        for name in ALL_SEEDS:
            report = symmetry_residual(seed_kernel(name), _random_points(100, 2, 2.0))
            assert report.results[0].max_residual <= 1e-12

    def test_skew_kernel_detected(self):
        report = symmetry_residual(F_SKEW, [(1.0, 2.0)])
        assert report.results[0].max_residual == 2.0
        assert not report.passed


class TestCocycleResidual:
    def test_callable_oracle(self):
        report = cocycle_residual(
            F_BILINEAR, lambda t: float(t) ** 2 - float(t), _random_points(100, 2)
        )
        assert report.results[0].max_residual <= 1e-12

    def test_zero_kernel_zero_solution(self):
        F = bivariate_expression("0")
        report = cocycle_residual(F, lambda t: 0.0, _random_points(20, 2))
        assert report.results[0].max_residual == 0.0

    def test_corrupted_table_caught_with_witness(self):
        keys = grid_keys((0, 1), denominators=4)
        table = reconstruct_table(F_BILINEAR, keys)
        table.samples[Fraction(1, 2)] += 0.1
        pairs = [
            (Fraction(1, 4), Fraction(1, 4)),
            (Fraction(1, 3), Fraction(1, 3)),
            (Fraction(1, 4), Fraction(1, 2)),
            (Fraction(1, 3), Fraction(2, 3)),
        ]
        report = cocycle_residual(F_BILINEAR, table, pairs)
        result = report.results[0]
        assert result.max_residual >= 0.1 - 1e-9
        assert Fraction(1, 2) in set(result.witness) | {sum(result.witness)}

    def test_table_without_extension_rule(self):
        table = reconstruct_table(F_BILINEAR, grid_keys((0, 1), denominators=2))
        with pytest.raises(LookupError):
            cocycle_residual(F_BILINEAR, table, [(Fraction(1, 5), Fraction(1, 5))])


class TestModulusEstimate:
    def test_identity_map(self):
        got = modulus_estimate(lambda t: t, 0.1, (0.0, 1.0), 0.05)
        assert got == pytest.approx(0.1, abs=1e-12)

    def test_constant(self):
        assert modulus_estimate(lambda t: 7.0, 0.25, (0.0, 1.0), 0.05) == 0.0

    def test_parabola_on_symmetric_interval(self):
        got = modulus_estimate(lambda t: t * t - t, 1 / 8, (-1.0, 1.0), 1 / 64)
        assert got == pytest.approx(23 / 64, abs=1e-12)

    def test_parabola_against_brute_force(self):
        # independent check: direct max over all pairs of a fine grid
        xs = np.linspace(-1.0, 1.0, 257)
        vals = xs * xs - xs
        brute = 0.0
        for i in range(len(xs)):
            close = np.abs(xs - xs[i]) <= 1 / 8 + 1e-12
            brute = max(brute, float(np.max(np.abs(vals[close] - vals[i]))))
        got = modulus_estimate(lambda t: t * t - t, 1 / 8, (-1.0, 1.0), 1 / 128)
        assert got == pytest.approx(brute, abs=1e-9)

    def test_two_dimensional(self):
        got = modulus_estimate(F_BILINEAR, 0.25, ((0.0, 1.0), (0.0, 1.0)), 1 / 16)
        # independent brute force on a 2x finer nested grid, all pairs;
        # it sees a superset of the estimator's pairs, so it dominates
        xs = np.linspace(0, 1, 33)
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        vals = 2 * X * Y
        brute = 0.0
        flatX, flatY, flatV = X.ravel(), Y.ravel(), vals.ravel()
        for i in range(len(flatV)):
            d2 = (flatX - flatX[i]) ** 2 + (flatY - flatY[i]) ** 2
            close = d2 <= 0.25**2 * (1 + 1e-12)
            brute = max(brute, float(np.max(np.abs(flatV[close] - flatV[i]))))
        # axis moves alone give 2 * delta at the far edge
        assert 0.5 - 1e-12 <= got <= brute + 1e-12

    def test_monotone_in_delta(self):
        f = lambda t: math.sin(3 * t)
        small = modulus_estimate(f, 0.1, (0.0, 2.0), 0.02)
        large = modulus_estimate(f, 0.3, (0.0, 2.0), 0.02)
        assert small <= large + 1e-15

    def test_monotone_in_domain(self):
        f = lambda t: t * t
        inner = modulus_estimate(f, 0.25, (0.0, 1.0), 0.05)
        outer = modulus_estimate(f, 0.25, (-2.0, 2.0), 0.05)
        assert inner <= outer + 1e-15

    def test_step_must_not_exceed_delta(self):
        with pytest.raises(ValueError):
            modulus_estimate(lambda t: t, 0.1, (0.0, 1.0), 0.2)

    def test_empty_domain(self):
        with pytest.raises(ValueError):
            modulus_estimate(lambda t: t, 0.1, (1.0, 1.0), 0.05)

    def test_positive_delta_required(self):
        with pytest.raises(ValueError):
            modulus_estimate(lambda t: t, 0.0, (0.0, 1.0), 0.05)


class TestModulusProbe:
    def test_identity_map(self):
        assert modulus_probe(lambda t: t, 0.1, (0.0, 1.0)) == pytest.approx(0.1, abs=1e-12)

    def test_never_exceeds_fine_grid_estimate(self):
        f = lambda t: math.sin(4 * t) + t
        probe = modulus_probe(f, 0.125, (0.0, 2.0))
        grid = modulus_estimate(f, 0.125, (0.0, 2.0), 0.125 / 16)
        assert probe <= grid + 1e-9

    def test_captures_square_root_edge(self):
        # the defect of sqrt(|t|) decays like sqrt(delta) near the axes;
        # anchors on the box edge must see it
        F = seed_kernel("hoelder")
        f00 = F(0.0, 0.0)
        H = lambda x, y: F(x, y) - f00
        delta = 1 / 256
        got = modulus_probe(H, delta, ((0.0, 1.0), (0.0, 1.0)))
        assert got >= 0.8 * (math.sqrt(delta) - delta)

    def test_small_delta_cost_is_flat(self):
        F = seed_kernel("square")
        for delta in (1e-3, 1e-6, 1e-9):
            got = modulus_probe(F, delta, ((-1.0, 1.0), (-1.0, 1.0)))
            assert 0.0 < got <= 6 * delta + 1e-15


class TestModulusProfile:
    def test_entries_match_single_calls(self):
        f = lambda t: t * t - t
        prof = modulus_profile(f, [1 / 8, 1 / 4], (-1.0, 1.0), 1 / 32)
        assert prof.omega(1 / 8) == modulus_estimate(f, 1 / 8, (-1.0, 1.0), 1 / 32)
        assert prof.omega(1 / 4) == modulus_estimate(f, 1 / 4, (-1.0, 1.0), 1 / 32)

    def test_missing_delta(self):
        prof = modulus_profile(lambda t: t, [1 / 8], (0.0, 1.0), 1 / 16)
        with pytest.raises(KeyError):
            prof.omega(1 / 2)


class TestBoundChecks:
    def test_bilinear_passes(self):
        table = reconstruct_table(F_BILINEAR, grid_keys((-1, 1), denominators=32))
        report = check_bound_c0(
            F_BILINEAR, table, [Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)], 1
        )
        assert report.passed
        kinds = {r.check for r in report.results}
        assert kinds == {"modulus-bound", "lattice-bound"}

    def test_transfer_factor_is_three(self):
        # right side must be exactly 3x the kernel modulus estimate
        table = reconstruct_table(F_BILINEAR, grid_keys((-1, 1), denominators=16))
        report = check_bound_c0(F_BILINEAR, table, [Fraction(1, 8)], 1)
        row = next(r for r in report.results if r.check == "modulus-bound")
        step = row.params["grid_step"]
        omega = modulus_estimate(F_BILINEAR, 1 / 8, ((-1.0, 1.0), (-1.0, 1.0)), step)
        assert row.rhs == pytest.approx(3.0 * omega, rel=1e-12)

    def test_delta_domain_validation(self):
        table = reconstruct_table(F_BILINEAR, grid_keys((-1, 1), denominators=8))
        for bad in (Fraction(1, 2), Fraction(3, 5), Fraction(0), Fraction(-1, 4)):
            with pytest.raises(ValueError):
                check_bound_c0(F_BILINEAR, table, [bad], 1)

    def test_requires_deltas(self):
        table = reconstruct_table(F_BILINEAR, grid_keys((-1, 1), denominators=8))
        with pytest.raises(ValueError):
            check_bound_c0(F_BILINEAR, table, [], 1)

    def test_requires_fine_enough_table(self):
        table = reconstruct_table(F_BILINEAR, grid_keys((-1, 1), denominators=4))
        with pytest.raises(ValueError):
            check_bound_c0(F_BILINEAR, table, [Fraction(1, 16)], 1)

    def test_rejects_small_box(self):
        table = reconstruct_table(F_BILINEAR, grid_keys((-1, 1), denominators=8))
        with pytest.raises(ValueError):
            check_bound_c0(F_BILINEAR, table, [Fraction(1, 4)], 0)

    def test_callable_solution_accepted(self):
        oracle = oracle_solution("square")
        report = check_bound_c0(F_BILINEAR, oracle, [Fraction(1, 8)], 1)
        assert report.passed

    def test_ndjson_schema(self):
        table = reconstruct_table(F_BILINEAR, grid_keys((-1, 1), denominators=8))
        report = check_bound_c0(F_BILINEAR, table, [Fraction(1, 8)], 1)
        lines = report.to_ndjson().strip().split("\n")
        assert len(lines) == 2
        for line in lines:
            obj = json.loads(line)
            assert list(obj) == _REPORT_KEYS
        first = json.loads(lines[0])
        assert first["params"]["delta"] == "1/8"


class TestAffineDifference:
    def test_exact_affine_gap(self):
        grid = [Fraction(k, 8) for k in range(9)]
        slope, intercept, residual = affine_difference(
            lambda t: float(t) ** 2, lambda t: float(t) ** 2 - float(t), grid
        )
        assert slope == pytest.approx(1.0, abs=1e-12)
        assert intercept == pytest.approx(0.0, abs=1e-12)
        assert residual <= 1e-12

    def test_identical_functions(self):
        grid = [0.0, 0.5, 1.0]
        slope, intercept, residual = affine_difference(math.sin, math.sin, grid)
        assert slope == 0.0 and intercept == 0.0 and residual == 0.0

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            affine_difference(math.sin, math.cos, [0.0])
