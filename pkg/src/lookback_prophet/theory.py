"""Closed-form bound curves and the implicit-equation root solvers.

Everything needed to tabulate the competitive-ratio bounds as functions
of the recovery fraction gamma in the three order models:

- adversarial: 1/(2 - gamma), tight (same curve is lower and upper);
- random order: upper (1-g)^{3/2} (sqrt(3-g) - sqrt(1-g)) + g, lower
  1 - (1-g) p_g with p_g the root of 1 - (1-g) p = (1-p)/(-log p),
  plus the explicit relaxation 1 - ((1-g)/e) / (1 - (1-1/e) g);
- IID: upper U(g) = 1 - (1-g) (e^2 log(3-g) - (2-g)) /
  (2(2e^2-1) - (3e^2-1) g), finite-n lower via the root a_{n,g} of
  (1/(1-a/n)^n - 1)(1/a - 1) = g, asymptotic lower equal to the
  random-order curve.

Root solvers use plain bisection: both residuals are strictly monotone,
so convergence is unconditional and bit-for-bit reproducible.  The
degenerate gamma = 1 endpoints (log singularities) are returned
analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterOutOfRange

BISECTION_MAX_ITER = 200
RESIDUAL_TOL = 1e-12

CURVE_LABELS = (
    "adv_tight",
    "ro_upper",
    "ro_lower",
    "ro_lower_explicit",
    "iid_upper",
    "iid_lower",
    "identity",
)

CSV_HEADER = "gamma," + ",".join(CURVE_LABELS)


@dataclass(frozen=True)
class RootSolution:
    value: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class BoundCurve:
    label: str
    gamma_grid: tuple[float, ...]
    values: tuple[float, ...]


def _check_gamma(gamma: float) -> None:
    if not 0.0 <= gamma <= 1.0:
        raise ParameterOutOfRange(f"gamma must lie in [0,1], got {gamma}")


def adversarial_bound(gamma: float) -> float:
    """Tight adversarial-order ratio 1/(2 - gamma)."""
    _check_gamma(gamma)
    return 1.0 / (2.0 - gamma)


def random_order_upper(gamma: float) -> float:
    _check_gamma(gamma)
    return (1.0 - gamma) ** 1.5 * (math.sqrt(3.0 - gamma) - math.sqrt(1.0 - gamma)) + gamma


def _bisect_increasing(f, lo: float, hi: float) -> RootSolution:
    """Root of an increasing f with f(lo) < 0 < f(hi), to |f| <= 1e-12."""
    mid = 0.5 * (lo + hi)
    for it in range(1, BISECTION_MAX_ITER + 1):
        mid = 0.5 * (lo + hi)
        r = f(mid)
        if abs(r) <= RESIDUAL_TOL:
            return RootSolution(mid, r, it)
        if r < 0.0:
            lo = mid
        else:
            hi = mid
    return RootSolution(mid, f(mid), BISECTION_MAX_ITER)


def solve_p_gamma(gamma: float) -> RootSolution:
    """The rejection probability p solving 1 - (1-gamma) p = (1-p)/(-log p)."""
    _check_gamma(gamma)
    if gamma == 1.0:
        return RootSolution(1.0, 0.0, 0)  # (1-p)/(-log p) -> 1 as p -> 1

    def residual(p: float) -> float:
        return (1.0 - p) / (-math.log(p)) - (1.0 - (1.0 - gamma) * p)

    return _bisect_increasing(residual, 1e-12, 1.0 - 1e-12)


def random_order_lower(gamma: float) -> float:
    """Single-threshold random-order guarantee: 1 - (1-gamma) p_gamma."""
    _check_gamma(gamma)
    return 1.0 - (1.0 - gamma) * solve_p_gamma(gamma).value


def random_order_lower_explicit(gamma: float) -> float:
    """Explicit relaxation of the random-order guarantee."""
    _check_gamma(gamma)
    inv_e = math.exp(-1.0)
    return 1.0 - (1.0 - gamma) * inv_e / (1.0 - (1.0 - inv_e) * gamma)


def iid_upper(gamma: float) -> float:
    """Upper bound U(gamma) for arbitrary algorithms on IID instances."""
    _check_gamma(gamma)
    e2 = math.exp(2.0)
    num = e2 * math.log(3.0 - gamma) - (2.0 - gamma)
    den = 2.0 * (2.0 * e2 - 1.0) - (3.0 * e2 - 1.0) * gamma
    return 1.0 - (1.0 - gamma) * num / den


def solve_a_n_gamma(n: int, gamma: float) -> RootSolution:
    """The per-item tail level a solving (1/(1-a/n)^n - 1)(1/a - 1) = gamma.

    The map is decreasing from 1 (a -> 0) to 0 (a = 1), so gamma = 0
    returns a = 1 exactly and gamma = 1 degenerates to a = 0, both
    analytic.
    """
    if n < 2:
        raise ParameterOutOfRange("need n >= 2")
    _check_gamma(gamma)
    if gamma == 0.0:
        return RootSolution(1.0, 0.0, 0)
    if gamma == 1.0:
        return RootSolution(0.0, 0.0, 0)

    def residual(a: float) -> float:
        # gamma - g(a), increasing in a; log1p/expm1 keep huge n accurate
        g = math.expm1(-n * math.log1p(-a / n)) * (1.0 / a - 1.0)
        return gamma - g

    return _bisect_increasing(residual, 1e-15, 1.0)


def iid_lower_n(n: int, gamma: float) -> float:
    """Finite-n IID single-threshold guarantee (1 - (1-a/n)^n) / a."""
    if n < 2:
        raise ParameterOutOfRange("need n >= 2")
    _check_gamma(gamma)
    if gamma == 1.0:
        return 1.0  # limit of (1 - (1-a/n)^n)/a as a -> 0
    a = solve_a_n_gamma(n, gamma).value
    return (1.0 - (1.0 - a / n) ** n) / a


def generic_bounds(gamma: float, alpha: float, beta: float) -> tuple[float, float]:
    """Bounds inherited from the classical problem: the trivial
    wait-and-recover policy gives max(gamma, alpha); nothing beats
    (1-gamma) beta + gamma."""
    _check_gamma(gamma)
    if not 0.0 <= alpha <= beta <= 1.0:
        raise ParameterOutOfRange("need 0 <= alpha <= beta <= 1")
    return max(gamma, alpha), (1.0 - gamma) * beta + gamma


def default_gamma_grid(points: int = 101) -> tuple[float, ...]:
    if points < 2:
        raise ParameterOutOfRange("grid needs >= 2 points")
    return tuple(i / (points - 1) for i in range(points))


def bound_table(gamma_grid=None) -> list[BoundCurve]:
    """All seven curves on a shared gamma grid (IID asymptotic lower
    equals the random-order lower)."""
    grid = tuple(default_gamma_grid() if gamma_grid is None else gamma_grid)
    if any(not 0.0 <= g <= 1.0 for g in grid):
        bad = next(g for g in grid if not 0.0 <= g <= 1.0)
        raise ParameterOutOfRange(f"gamma grid value out of [0,1]: {bad}")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ParameterOutOfRange("gamma grid must be sorted")

    ro_lower = tuple(random_order_lower(g) for g in grid)
    columns = {
        "adv_tight": tuple(adversarial_bound(g) for g in grid),
        "ro_upper": tuple(random_order_upper(g) for g in grid),
        "ro_lower": ro_lower,
        "ro_lower_explicit": tuple(random_order_lower_explicit(g) for g in grid),
        "iid_upper": tuple(iid_upper(g) for g in grid),
        "iid_lower": ro_lower,
        "identity": grid,
    }
    return [BoundCurve(label, grid, columns[label]) for label in CURVE_LABELS]


def bound_table_csv(curves: list[BoundCurve]) -> str:
    """CSV per the report schema, 15 significant digits."""
    by_label = {c.label: c for c in curves}
    grid = curves[0].gamma_grid
    lines = [CSV_HEADER]
    for i, g in enumerate(grid):
        row = [f"{g:.15g}"] + [f"{by_label[lab].values[i]:.15g}" for lab in CURVE_LABELS]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
