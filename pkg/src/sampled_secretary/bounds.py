"""Closed-form competitive-ratio bounds and the per-round profit predictor.

Everything here is a pure function of (n, h) and, for the predictor, the
realized integer sampling length.  Lower bounds are what the shipped policies
guarantee; upper bounds are what no online algorithm can beat in the matching
model.  ``aos_*`` refers to the adversarial-order game with a sample, and
``ros_*`` to the random-order one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from scipy.integrate import quad


def _bisect(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Plain bisection; requires a sign change on [lo, hi]."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if fm * flo > 0.0:
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=1)
def r_constant() -> float:
    """Root of exp(-exp(-x)) = x on [0, 1], approximately 0.567."""
    return _bisect(lambda x: math.exp(-math.exp(-x)) - x, 0.0, 1.0, 1e-12)


@lru_cache(maxsize=1)
def hill_kertz_ratio() -> float:
    """Optimal guarantee 1/beta for the known-distribution i.i.d. selection
    problem, approximately 0.745.

    beta solves integral_0^1 dy / (y*(1 - ln y) + (beta - 1)) = 1.  The
    integrand is bounded and continuous on (0, 1] with limit 1/(beta - 1) at
    0, so adaptive quadrature needs no endpoint special-casing.
    """

    def residual(beta: float) -> float:
        def integrand(y: float) -> float:
            return 1.0 / (y * (1.0 - math.log(y)) + (beta - 1.0))

        val, _err = quad(integrand, 0.0, 1.0, limit=200)
        return val - 1.0

    beta = _bisect(residual, 1.0 + 1e-9, 2.0, 1e-12)
    assert abs(residual(beta)) <= 1e-6
    return 1.0 / beta


def aos_lower(n: int, h: int) -> float:
    """Guaranteed ratio in the adversarial-order game: h/(n+h-1) while the
    history is short (h <= n-1), and 1/2 from h >= n on."""
    _check_nh(n, h)
    if h >= n:
        return 0.5
    if h == 0:
        return 0.0
    return h / (n + h - 1)


def aos_upper(n: int, h: int) -> float:
    """Best possible ratio in the adversarial-order game.

    min of the short-history cap h/(n+h-1) and the long-history cap
    (1/2) * 2^n/(2^n - 1).  The short-history cap is only established for
    h >= 1; for h = 0 the long-history cap alone is returned.
    """
    _check_nh(n, h)
    long_cap = 0.5 * 2.0**n / (2.0**n - 1.0) if n < 60 else 0.5
    if h == 0:
        return min(long_cap, 1.0)
    return min(h / (n + h - 1) if n + h > 1 else 1.0, long_cap, 1.0)


def q_schedule(n: int, h: int) -> tuple[float, int]:
    """Sampling-phase fraction q = max(exp(-exp(-h/n)) - h/n, 0) and the
    realized integer number of sampling rounds floor(q*n)."""
    _check_nh(n, h)
    q = max(math.exp(-math.exp(-h / n)) - h / n, 0.0)
    return q, int(math.floor(q * n))


def ros_lower(n: int, h: int) -> float:
    """Guaranteed ratio of the three-phase policy in the random-order game."""
    _check_nh(n, h)
    if h >= n:
        return 1.0 - (1.0 - 1.0 / n) ** n
    x = h / n
    if h <= r_constant() * n:
        return math.exp(-math.exp(-x))
    return x * (1.0 - math.log(x) - math.exp(-x))


def ros_upper(n: int, h: int) -> float:
    """Best possible ratio in the random-order game, capped by the
    known-distribution constant and clamped to 1."""
    _check_nh(n, h)
    if h / (n + h) <= 1.0 / math.e:
        cap = (1.0 / math.e) * (n + h) / n + 1.0 / n
    else:
        cap = (h / n) * math.log((h + n) / h) + 1.0 / n
    return min(cap, hill_kertz_ratio(), 1.0)


def analytic_round_profit(n: int, h: int, q_rounds: int, round_index: int) -> float:
    """Predicted profit of the three-phase policy at one round, as a fraction
    of E[OPT].

    Sampling rounds contribute 0.  Rounds in the best-so-far phase contribute
    (h+s)/(h+l-1) * 1/n where s is the realized sampling length.  Rounds in
    the subset-threshold phase decay geometrically from the phase boundary.
    The best-so-far expression is exact only at the phase boundary l = n-h;
    strictly before it the true profit depends on the value profile and this
    expression is a lower bound (see the per-round cross-check in the oracle
    module).
    """
    if not 1 <= round_index <= n:
        raise ValueError(f"round_index must be in [1, {n}], got {round_index}")
    if not 0 <= q_rounds <= n:
        raise ValueError(f"q_rounds must be in [0, {n}], got {q_rounds}")
    _check_nh(n, h)
    s, l = q_rounds, round_index
    if l <= s:
        return 0.0
    if h <= n - 1 and l <= n - h:
        prefix = (h + s) / (h + l - 1) if h + l - 1 > 0 else 1.0
        return prefix / n
    # Threshold phase: no-accept mass carried over from the boundary, then a
    # (1 - 1/n) survival factor per round.
    if h <= n - 1 and s <= n - h:
        carried = (h + s) / n
        boundary = n - h
    else:
        carried = 1.0
        boundary = s
    return carried * (1.0 - 1.0 / n) ** (l - boundary - 1) / n


def analytic_total(n: int, h: int, q_rounds: int) -> float:
    """Sum of the per-round predictions over all n rounds (direct summation,
    no logarithmic or exponential relaxation)."""
    return sum(analytic_round_profit(n, h, q_rounds, l) for l in range(1, n + 1))


@dataclass(frozen=True)
class BoundReport:
    """All closed-form bounds for one (n, h), plus the sampling schedule."""

    n: int
    h: int
    aos_lower: float
    aos_upper: float
    ros_lower: float
    ros_upper: float
    q: float
    q_rounds: int


def bound_report(n: int, h: int) -> BoundReport:
    q, s = q_schedule(n, h)
    return BoundReport(
        n=n,
        h=h,
        aos_lower=aos_lower(n, h),
        aos_upper=aos_upper(n, h),
        ros_lower=ros_lower(n, h),
        ros_upper=ros_upper(n, h),
        q=q,
        q_rounds=s,
    )


def _check_nh(n: int, h: int) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if h < 0:
        raise ValueError(f"h must be >= 0, got {h}")
