"""Exact expected values for small instances by full enumeration.

Every split of the instance, every arrival order, and every internal random
choice of the policy is integrated with exact rational weights; a single
final division produces the floats everyone else asserts against.  This is
the ground truth the bounds, policies, and Monte Carlo modules are tested
against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .adversaries import worst_order_exact
from .bounds import analytic_round_profit
from .core import ArrivalOrder, Instance, SecretaryError, SplitSample, make_instance
from .policies import PolicyKind, PolicySpec, expected_profit_for_order


class BudgetExceededError(SecretaryError, ValueError):
    """Full enumeration would exceed the configured leaf budget."""


DEFAULT_BUDGET = 100_000_000


@dataclass(frozen=True)
class ExactResult:
    """Exact expectations for one (instance, policy) pair."""

    expected_alg: float
    expected_opt: float
    ratio: float
    per_round_profit: tuple[float, ...]
    enumerated_worlds: int


def _branch_estimate(instance: Instance, spec: PolicySpec) -> int:
    n, h = instance.n, instance.h
    if spec.kind is PolicyKind.AOS_LONG:
        return max(h, 1)
    if spec.kind is PolicyKind.COMBINED:
        return 2**n * n
    return n


def _check_budget(instance: Instance, spec: PolicySpec, budget: int) -> int:
    n, h = instance.n, instance.h
    worlds = math.comb(n + h, h) * math.factorial(n)
    if worlds * _branch_estimate(instance, spec) > budget:
        raise BudgetExceededError(
            f"enumeration needs ~{worlds * _branch_estimate(instance, spec)} leaves "
            f"(budget {budget}); reduce n+h or raise the budget"
        )
    return worlds


def _splits(instance: Instance) -> Iterable[SplitSample]:
    indices = range(instance.size)
    for hist in itertools.combinations(indices, instance.h):
        hist_set = frozenset(hist)
        yield SplitSample(hist_set, frozenset(indices) - hist_set)


def _expected_opt(instance: Instance) -> Fraction:
    total = Fraction(0)
    for split in _splits(instance):
        total += Fraction(max(instance.values[i] for i in split.online))
    return total / math.comb(instance.size, instance.h)


def exact_ros(instance: Instance, spec: PolicySpec, budget: int = DEFAULT_BUDGET) -> ExactResult:
    """Exact expectations in the random-order game: uniform split, uniform
    arrival order, policy randomness integrated exactly."""
    worlds = _check_budget(instance, spec, budget)
    n = instance.n
    n_orders = math.factorial(n)
    n_splits = math.comb(instance.size, instance.h)
    weight = Fraction(1, n_splits * n_orders)
    per_round = [Fraction(0)] * n
    for split in _splits(instance):
        for perm in itertools.permutations(sorted(split.online)):
            rounds, _total = expected_profit_for_order(instance, split, ArrivalOrder(perm), spec)
            for i, r in enumerate(rounds):
                per_round[i] += weight * r
    return _finish(per_round, _expected_opt(instance), worlds)


def exact_aos(instance: Instance, spec: PolicySpec, budget: int = DEFAULT_BUDGET) -> ExactResult:
    """Exact expectations in the adversarial-order game: uniform split, then
    the exact worst order for that split (min over all n! orders of the
    policy's randomness-averaged profit)."""
    worlds = _check_budget(instance, spec, budget)
    n = instance.n
    n_splits = math.comb(instance.size, instance.h)
    weight = Fraction(1, n_splits)
    per_round = [Fraction(0)] * n
    for split in _splits(instance):
        order, _value = worst_order_exact(instance, split, spec, max_n=max(n, 8))
        rounds, _total = expected_profit_for_order(instance, split, order, spec)
        for i, r in enumerate(rounds):
            per_round[i] += weight * r
    return _finish(per_round, _expected_opt(instance), worlds)


def _finish(per_round: list[Fraction], eopt: Fraction, worlds: int) -> ExactResult:
    ealg = sum(per_round, Fraction(0))
    ratio = float(ealg / eopt) if eopt > 0 else 0.0
    return ExactResult(
        expected_alg=float(ealg),
        expected_opt=float(eopt),
        ratio=ratio,
        per_round_profit=tuple(float(r) for r in per_round),
        enumerated_worlds=worlds,
    )


def per_round_cross_check(
    n: int, h: int, q_rounds: int, value_profile: Sequence[float], budget: int = DEFAULT_BUDGET
) -> float:
    """Max absolute deviation between the exact per-round profits of the
    three-phase policy and the closed-form prediction times E[OPT].

    The prediction is exact for sampling rounds, the best-so-far boundary
    round l = n-h, and every subset-threshold round; strictly interior
    best-so-far rounds genuinely depend on the value profile and deviate.
    """
    if len(value_profile) != n + h:
        raise ValueError(f"value profile must have n+h = {n + h} entries")
    instance = make_instance(value_profile, h)
    result = exact_ros(instance, PolicySpec(PolicyKind.ROS, q_rounds=q_rounds), budget)
    worst = 0.0
    for l in range(1, n + 1):
        predicted = analytic_round_profit(n, h, q_rounds, l) * result.expected_opt
        worst = max(worst, abs(result.per_round_profit[l - 1] - predicted))
    return worst


# ---------------------------------------------------------------------------
# Combinatorial propositions used inside the guarantees
# ---------------------------------------------------------------------------


def check_max_subset_inequality(ground_set: Sequence[float], k: int, n: int) -> bool:
    """E[max of uniform k-subset] >= (k/n) * E[max of uniform n-subset],
    verified by exact enumeration of all subsets of the ground set."""
    if not 1 <= k <= n <= len(ground_set):
        raise ValueError(f"need 1 <= k <= n <= |ground set|, got k={k}, n={n}")
    if len(ground_set) > 20:
        raise ValueError("ground set capped at 20 elements for enumeration")
    return expected_subset_max(ground_set, k) >= Fraction(k, n) * expected_subset_max(ground_set, n)


def expected_subset_max(ground_set: Sequence[float], k: int) -> Fraction:
    values = [Fraction(float(v)) for v in ground_set]
    total = Fraction(0)
    for comb in itertools.combinations(values, k):
        total += max(comb)
    return total / math.comb(len(values), k)


def check_binomial_ratio_bound(max_n: int = 30, ratios: Sequence[float] = (1.0, 1.5, 2.0, 3.0)) -> bool:
    """C(n, k) <= (1/r^k) * C(r*n, k) for every r in ``ratios``, every n up to
    ``max_n`` with r*n integral, and every k <= n; exact rational arithmetic."""
    for r in ratios:
        frac_r = Fraction(r).limit_denominator(1000)
        for n in range(1, max_n + 1):
            rn = frac_r * n
            if rn.denominator != 1:
                continue
            for k in range(1, n + 1):
                if frac_r**k * math.comb(n, k) > math.comb(int(rn), k):
                    return False
    return True


def proposition_checks(k: int, n: int, ground_set: Sequence[float]) -> bool:
    """Both supporting propositions at once: the subset-maximum inequality on
    the given arguments and the binomial ratio bound on its full stated range."""
    return check_max_subset_inequality(ground_set, k, n) and check_binomial_ratio_bound()
