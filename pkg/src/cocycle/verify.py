"""Residual checks, modulus-of-continuity estimation, and bound checks.

Residual checks report the largest violation of an identity over a
sample set together with the witness point attaining it.  Moduli of
continuity are estimated from below on finite grids; the bound check
compares the reconstruction's modulus against three times the kernel's,
and the lattice values of h against twice the kernel modulus at the same
scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .continuous import LatticeSolver, ReconstructedFunction
from .rational import ONE_HALF

__all__ = [
    "CheckResult",
    "VerificationReport",
    "ModulusProfile",
    "kurepa_residual",
    "symmetry_residual",
    "cocycle_residual",
    "modulus_estimate",
    "modulus_probe",
    "modulus_profile",
    "check_bound_c0",
    "affine_difference",
]

# Default absolute tolerance for exact-lattice checks.
DEFAULT_TOLERANCE = 1e-9

# The lattice bound |h| <= 2*omega involves grid estimates on both sides;
# checks at that scale default to the looser limit tolerance.
LATTICE_TOLERANCE = 1e-6

# Full grid estimation is quadratic in the axis size; beyond this many
# points per axis the sparse probe takes over.
_GRID_AXIS_LIMIT = 1024


def _jsonable(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


@dataclass
class CheckResult:
    """One verified statement: either a residual maximum or a bound."""

    check: str
    params: dict
    passed: bool
    tolerance: float
    max_residual: float | None = None
    witness: tuple | None = None
    lhs: float | None = None
    rhs: float | None = None
    slack: float | None = None

    def to_json_obj(self) -> dict:
        return {
            "check": self.check,
            "params": _jsonable(self.params),
            "max_residual": self.max_residual,
            "witness": _jsonable(self.witness),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "pass": self.passed,
            "tolerance": self.tolerance,
        }


@dataclass
class VerificationReport:
    """A list of check results; one NDJSON object per check."""

    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_ndjson(self) -> str:
        return "\n".join(json.dumps(r.to_json_obj()) for r in self.results) + "\n"


@dataclass(frozen=True)
class ModulusProfile:
    """Grid estimates of a modulus of continuity, per delta."""

    entries: tuple[tuple[float, float], ...]
    domain: tuple
    grid_step: float

    def omega(self, delta: float) -> float:
        for d, w in self.entries:
            if d == delta:
                return w
        raise KeyError(f"no entry for delta={delta}")


# --- residual checks ---------------------------------------------------

def _residual_scan(points, residual_fn):
    worst = -1.0
    witness = None
    for pt in points:
        r = abs(residual_fn(pt))
        if r > worst:
            worst = r
            witness = pt
    if witness is None:
        raise ValueError("empty sample set")
    return worst, witness


def kurepa_residual(F, triples, tolerance: float = DEFAULT_TOLERANCE) -> VerificationReport:
    """Largest violation of F(x+y,z) + F(x,y) = F(y,z) + F(x,y+z)."""

    def resid(pt):
        x, y, z = (float(v) for v in pt)
        return F(x + y, z) + F(x, y) - F(y, z) - F(x, y + z)

    worst, witness = _residual_scan(triples, resid)
    result = CheckResult(
        check="kurepa",
        params={"samples": len(list(triples)) if hasattr(triples, "__len__") else None},
        passed=worst <= tolerance,
        tolerance=tolerance,
        max_residual=worst,
        witness=tuple(witness),
    )
    return VerificationReport([result])


def symmetry_residual(F, pairs, tolerance: float = DEFAULT_TOLERANCE) -> VerificationReport:
    """Largest violation of F(x, y) = F(y, x)."""

    def resid(pt):
        x, y = (float(v) for v in pt)
        return F(x, y) - F(y, x)

    worst, witness = _residual_scan(pairs, resid)
    result = CheckResult(
        check="symmetry",
        params={"samples": len(list(pairs)) if hasattr(pairs, "__len__") else None},
        passed=worst <= tolerance,
        tolerance=tolerance,
        max_residual=worst,
        witness=tuple(witness),
    )
    return VerificationReport([result])


def _eval_f(f, t):
    if isinstance(f, ReconstructedFunction):
        return f.value_at(t)
    return float(f(t))


def cocycle_residual(F, f, pairs, tolerance: float = DEFAULT_TOLERANCE) -> VerificationReport:
    """Largest violation of F(x, y) = f(x+y) - f(x) - f(y).

    ``f`` may be a callable or a sample table; table lookups outside the
    stored keys raise LookupError (tables carry no extension rule).
    """

    def resid(pt):
        x, y = pt
        total = x + y  # exact when x, y are Fractions
        lhs = float(F(float(x), float(y)))
        return lhs - (_eval_f(f, total) - _eval_f(f, x) - _eval_f(f, y))

    worst, witness = _residual_scan(pairs, resid)
    result = CheckResult(
        check="cocycle",
        params={"samples": len(list(pairs)) if hasattr(pairs, "__len__") else None},
        passed=worst <= tolerance,
        tolerance=tolerance,
        max_residual=worst,
        witness=tuple(witness),
    )
    return VerificationReport([result])


# --- modulus estimation -----------------------------------------------

def _parse_domain(domain):
    # (a, b) -> 1D interval; ((a, b), (c, d)) -> 2D box.
    first = domain[0]
    if isinstance(first, (tuple, list)):
        (a, b), (c, d) = domain
        return "2d", (float(a), float(b), float(c), float(d))
    a, b = domain
    return "1d", (float(a), float(b))


def _axis(a: float, b: float, step: float) -> np.ndarray:
    if not b > a:
        raise ValueError("empty grid: domain must have positive extent")
    n = max(1, math.ceil((b - a) / step - 1e-12))
    return np.linspace(a, b, n + 1)


def _eval_axis(fn, xs: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(fn(xs), dtype=np.float64)
        if vals.shape == xs.shape:
            return vals
    except (TypeError, LookupError):
        pass
    return np.array([float(fn(float(x))) for x in xs], dtype=np.float64)


def _eval_grid(fn, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    try:
        vals = np.asarray(fn(X, Y), dtype=np.float64)
        if vals.shape == X.shape:
            return vals
    except (TypeError, LookupError):
        pass
    return np.array(
        [[float(fn(float(x), float(y))) for y in ys] for x in xs],
        dtype=np.float64,
    )


def _window_max_1d(vals: np.ndarray, step: float, delta: float) -> float:
    kmax = int(math.floor(delta / step + 1e-9))
    worst = 0.0
    for k in range(1, kmax + 1):
        if k >= len(vals):
            break
        worst = max(worst, float(np.max(np.abs(vals[k:] - vals[:-k]))))
    return worst


def _window_max_2d(vals: np.ndarray, sx: float, sy: float, delta: float) -> float:
    imax = int(math.floor(delta / sx + 1e-9))
    jmax = int(math.floor(delta / sy + 1e-9))
    worst = 0.0
    d2 = delta * delta * (1.0 + 1e-12)
    for di in range(0, imax + 1):
        for dj in range(-jmax, jmax + 1):
            if di == 0 and dj <= 0:
                continue  # each unordered pair once
            if (di * sx) ** 2 + (dj * sy) ** 2 > d2:
                continue
            if di >= vals.shape[0] or abs(dj) >= vals.shape[1]:
                continue
            if dj >= 0:
                a = vals[di:, dj:]
                b = vals[: vals.shape[0] - di, : vals.shape[1] - dj]
            else:
                a = vals[di:, :dj]
                b = vals[: vals.shape[0] - di, -dj:]
            worst = max(worst, float(np.max(np.abs(a - b))))
    return worst


def modulus_estimate(fn, delta: float, domain, grid_step: float) -> float:
    """Grid lower estimate of sup |fn(a) - fn(b)| over |a - b| <= delta.

    The grid spans the domain with spacing at most ``grid_step`` (which
    must not exceed delta); distances in two dimensions are Euclidean.
    """
    delta = float(delta)
    grid_step = float(grid_step)
    if delta <= 0 or grid_step <= 0:
        raise ValueError("delta and grid_step must be positive")
    if grid_step > delta:
        raise ValueError("grid_step must not exceed delta")
    shape, bounds = _parse_domain(domain)
    if shape == "1d":
        a, b = bounds
        xs = _axis(a, b, grid_step)
        vals = _eval_axis(fn, xs)
        return _window_max_1d(vals, float(xs[1] - xs[0]), delta)
    a, b, c, d = bounds
    xs = _axis(a, b, grid_step)
    ys = _axis(c, d, grid_step)
    vals = _eval_grid(fn, xs, ys)
    return _window_max_2d(vals, float(xs[1] - xs[0]), float(ys[1] - ys[0]), delta)


def modulus_probe(fn, delta: float, domain, anchors: int = 33) -> float:
    """Sparse lower estimate of the modulus: pairs at distance exactly
    delta from an anchor lattice, probed along the axes and diagonals.

    Unlike ``modulus_estimate`` the cost is independent of delta, so this
    serves the small-delta regime where a full grid is unaffordable.
    """
    delta = float(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if anchors < 2:
        raise ValueError("need at least 2 anchors")
    shape, bounds = _parse_domain(domain)
    if shape == "1d":
        a, b = bounds
        xs = np.linspace(a, b, anchors)
        vals = _eval_axis(fn, xs)
        worst = 0.0
        for sign in (1.0, -1.0):
            target = xs + sign * delta
            mask = (target >= a) & (target <= b)
            if not mask.any():
                continue
            moved = _eval_axis(fn, target[mask])
            worst = max(worst, float(np.max(np.abs(moved - vals[mask]))))
        return worst
    a, b, c, d = bounds
    xs = np.linspace(a, b, anchors)
    ys = np.linspace(c, d, anchors)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    base = _eval_grid(fn, xs, ys)
    diag = delta / math.sqrt(2.0)
    directions = [
        (delta, 0.0), (-delta, 0.0), (0.0, delta), (0.0, -delta),
        (diag, diag), (diag, -diag), (-diag, diag), (-diag, -diag),
    ]
    worst = 0.0
    for dx, dy in directions:
        tx = X + dx
        ty = Y + dy
        mask = (tx >= a) & (tx <= b) & (ty >= c) & (ty <= d)
        if not mask.any():
            continue
        try:
            moved = np.asarray(fn(tx[mask], ty[mask]), dtype=np.float64)
        except (TypeError, LookupError):
            moved = np.array(
                [float(fn(float(px), float(py))) for px, py in zip(tx[mask], ty[mask])],
                dtype=np.float64,
            )
        worst = max(worst, float(np.max(np.abs(moved - base[mask]))))
    return worst


def modulus_profile(fn, deltas, domain, grid_step: float) -> ModulusProfile:
    """Modulus estimates for several deltas on one shared grid."""
    entries = tuple(
        (float(d), modulus_estimate(fn, float(d), domain, grid_step)) for d in deltas
    )
    return ModulusProfile(entries=entries, domain=tuple(domain), grid_step=float(grid_step))


# --- bound checks ------------------------------------------------------

def _as_bound_delta(delta) -> Fraction:
    d = Fraction(delta) if not isinstance(delta, Fraction) else delta
    if not Fraction(0) < d < ONE_HALF:
        raise ValueError(f"delta must lie in (0, 1/2), got {d}")
    return d


def _table_from(f, deltas, M: int):
    if isinstance(f, ReconstructedFunction):
        keys = [k for k in f.samples if -M <= k <= M]
        keys.sort()
        vals = [f.samples[k] for k in keys]
        return keys, vals
    den = 2 * max(d.denominator for d in deltas)
    keys = [Fraction(k, den) for k in range(-M * den, M * den + 1)]
    vals = [float(f(k)) for k in keys]
    return keys, vals


def check_bound_c0(
    F,
    f,
    deltas,
    M: int = 1,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    lattice_tolerance: float = LATTICE_TOLERANCE,
) -> VerificationReport:
    """Continuity transfer checks for a reconstruction f of kernel F.

    For each rational delta in (0, 1/2), checks that the modulus of f on
    [-M, M] is at most 3 times the modulus of F on the square (the kernel
    modulus is estimated on a grid 4x finer than f's sample spacing), and
    that |h(delta)| <= 2 * omega(H; delta) on the unit square, where
    h = f + F(0,0) is the normalized lattice solution.

    ``f`` is a ReconstructedFunction or a callable accepting Fractions.
    """
    from .continuous import h_rational  # deferred to avoid a module cycle

    if M < 1:
        raise ValueError("M must be >= 1")
    ds = [_as_bound_delta(d) for d in deltas]
    if not ds:
        raise ValueError("need at least one delta")
    keys, vals = _table_from(f, ds, M)
    if len(keys) < 2:
        raise ValueError("sample table too small on [-M, M]")
    kf = np.array([float(k) for k in keys])
    vf = np.array(vals)
    gaps = np.diff(kf)
    f_step = float(np.max(gaps))
    box = ((-float(M), float(M)), (-float(M), float(M)))
    kernel_step = f_step / 4.0
    xs = _axis(-float(M), float(M), kernel_step)
    kernel_vals = _eval_grid(F, xs, xs)
    actual_step = float(xs[1] - xs[0])

    f00 = float(F(0.0, 0.0))

    def H(x, y):
        return F(x, y) - f00

    solver = LatticeSolver(F)
    unit_box = ((0.0, 1.0), (0.0, 1.0))
    results: list[CheckResult] = []
    for d in ds:
        df = float(d)
        if f_step > df:
            raise ValueError(
                f"sample spacing {f_step} too coarse for delta {d}"
            )
        # reconstruction side: pairs of stored samples within delta
        left = 0.0
        j = 0
        for i in range(len(kf)):
            j = max(j, i + 1)
            while j < len(kf) and kf[j] - kf[i] <= df + 1e-12:
                j += 1
            if j > i + 1:
                window = vf[i + 1 : j]
                left = max(left, float(np.max(np.abs(window - vf[i]))))
        right = 3.0 * _window_max_2d(kernel_vals, actual_step, actual_step, df)
        results.append(
            CheckResult(
                check="modulus-bound",
                params={"delta": d, "M": M, "grid_step": actual_step},
                passed=left <= right + tolerance,
                tolerance=tolerance,
                lhs=left,
                rhs=right,
                slack=right - left,
            )
        )
        # lattice side: |h(p/n)| against twice the kernel modulus at p/n
        h_val = h_rational(F, d, solver=solver)
        if 4 * d.denominator <= _GRID_AXIS_LIMIT * d.numerator:
            omega_h = modulus_estimate(H, df, unit_box, df / 4.0)
        else:
            omega_h = modulus_probe(H, df, unit_box)
        lhs = abs(h_val)
        rhs = 2.0 * omega_h
        results.append(
            CheckResult(
                check="lattice-bound",
                params={"delta": d},
                passed=lhs <= rhs + lattice_tolerance,
                tolerance=lattice_tolerance,
                lhs=lhs,
                rhs=rhs,
                slack=rhs - lhs,
            )
        )
    return VerificationReport(results)


def affine_difference(f1, f2, grid) -> tuple[float, float, float]:
    """Least-squares affine fit to f1 - f2 on the grid.

    Returns (slope, intercept, max_residual); two solutions of the same
    cocycle equation differ by an affine function, so the residual is the
    observable disagreement.
    """
    pts = list(grid)
    if len(pts) < 2:
        raise ValueError("need at least 2 grid points")
    xs = np.array([float(t) for t in pts])
    diffs = np.array([_eval_f(f1, t) - _eval_f(f2, t) for t in pts])
    slope, intercept = np.polyfit(xs, diffs, 1)
    residual = float(np.max(np.abs(diffs - (slope * xs + intercept))))
    return float(slope), float(intercept), residual
