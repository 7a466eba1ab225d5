"""Adversarial instances and arrival orders, plus exhaustive worst-order search.

The adversary in the adversarial-order game sees the realized history set
before committing to an arrival order of the online candidates; it never sees
the policy's internal random draws.  ``worst_order_value`` therefore minimizes
the policy's expected profit (expectation over internal randomness only) over
all n! orders.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import ArrivalOrder, Instance, SecretaryError, SplitSample, best_candidate, make_instance
from .policies import (
    PolicyKind,
    PolicySpec,
    expected_profit_for_order,
    history_threshold_distribution,
)


class TooLargeError(SecretaryError, ValueError):
    """Exhaustive order search refused: n exceeds the configured cap."""


class BadShapeError(SecretaryError, ValueError):
    """An epsilon/zero family was requested with inconsistent parameters."""


class NotEpsZeroInstanceError(SecretaryError, ValueError):
    """The instance is not of the epsilon/zero shape this order requires."""


class AdversaryKind(enum.Enum):
    INCREASING_UNSEEN_FIRST = "increasing-unseen"
    EPS_ZERO = "eps-zero"
    EXHAUSTIVE = "exhaustive"


def increasing_unseen_first(instance: Instance, split: SplitSample) -> ArrivalOrder:
    """Reveal the online candidates beating the best history candidate first,
    in increasing order; then the rest in decreasing order.

    The suffix order is a deliberate choice: decreasing values can never
    become a running maximum, so the prefix carries all the action.
    """
    hbest = best_candidate(instance, split.history)
    online = instance.candidates(split.online)
    unseen_better = sorted(c for c in online if hbest is None or c > hbest)
    rest = sorted((c for c in online if not (hbest is None or c > hbest)), reverse=True)
    return ArrivalOrder(tuple(c.index for c in unseen_better + rest))


@dataclass(frozen=True)
class EpsZeroFamily:
    """The two-instance family behind the long-history upper bound and the
    both-models trade-off: m candidates of a small value epsilon, zeros for
    the rest, and (variant I2 only) one candidate alpha = (n+h)/n."""

    n: int
    h: int
    epsilon: float
    variant: str  # "I1" or "I2"
    m: int

    def __post_init__(self) -> None:
        if self.variant not in ("I1", "I2"):
            raise BadShapeError(f"variant must be I1 or I2, got {self.variant!r}")
        if self.epsilon <= 0:
            raise BadShapeError(f"epsilon must be positive, got {self.epsilon}")
        limit = self.n + self.h if self.variant == "I1" else self.n + self.h - 1
        if not 1 <= self.m <= limit:
            raise BadShapeError(f"m must be in [1, {limit}] for {self.variant}, got {self.m}")
        if self.variant == "I2" and self.alpha <= self.epsilon:
            raise BadShapeError("alpha must exceed epsilon; pick a smaller epsilon")

    @property
    def alpha(self) -> float:
        return (self.n + self.h) / self.n

    @classmethod
    def half_split(cls, n: int, h: int, epsilon: float, variant: str = "I1") -> "EpsZeroFamily":
        """m = floor((n+h)/2) epsilon-candidates (the paper-style construction
        assumes n+h even; odd sizes round down)."""
        return cls(n=n, h=h, epsilon=epsilon, variant=variant, m=(n + h) // 2)

    @classmethod
    def tradeoff(cls, n: int, h: int, epsilon: float) -> "EpsZeroFamily":
        """m = ceil(((n+h)/n) * ln n) epsilon-candidates, variant I1."""
        m = max(1, math.ceil((n + h) / n * math.log(n))) if n > 1 else 1
        return cls(n=n, h=h, epsilon=epsilon, variant="I1", m=m)


def eps_zero_instance(family: EpsZeroFamily) -> Instance:
    """Materialize the family as an instance.  For I2 alpha sits at index 0,
    then the epsilon block, then the zero block."""
    eps_block = [family.epsilon] * family.m
    if family.variant == "I1":
        values = eps_block + [0.0] * (family.n + family.h - family.m)
    else:
        values = [family.alpha] + eps_block + [0.0] * (family.n + family.h - 1 - family.m)
    return make_instance(values, family.h)


def _classify_eps_zero(instance: Instance) -> tuple[int | None, list[int], list[int]]:
    positives = sorted({v for v in instance.values if v > 0.0}, reverse=True)
    if not positives or len(positives) > 2:
        raise NotEpsZeroInstanceError("expected one epsilon level and at most one alpha")
    if len(positives) == 2:
        alpha_val, eps_val = positives
        alpha_idx = [i for i, v in enumerate(instance.values) if v == alpha_val]
        if len(alpha_idx) != 1:
            raise NotEpsZeroInstanceError("alpha must be unique")
        alpha = alpha_idx[0]
    else:
        eps_val = positives[0]
        alpha = None
    eps = [i for i, v in enumerate(instance.values) if v == eps_val]
    zero = [i for i, v in enumerate(instance.values) if v == 0.0]
    if (1 if alpha is not None else 0) + len(eps) + len(zero) != instance.size:
        raise NotEpsZeroInstanceError("values must be exactly {0, epsilon} or {0, epsilon, alpha}")
    return alpha, eps, zero


def eps_zero_order(instance: Instance, split: SplitSample) -> ArrivalOrder:
    """Reveal online epsilon-candidates, then online zeros, then alpha last if
    it is online; increasing index inside each block."""
    alpha, eps, zero = _classify_eps_zero(instance)
    seq = [i for i in eps if i in split.online]
    seq += [i for i in zero if i in split.online]
    if alpha is not None and alpha in split.online:
        seq.append(alpha)
    return ArrivalOrder(tuple(seq))


def order_for(kind: AdversaryKind, instance: Instance, split: SplitSample,
              spec: PolicySpec | None = None) -> ArrivalOrder:
    if kind is AdversaryKind.INCREASING_UNSEEN_FIRST:
        return increasing_unseen_first(instance, split)
    if kind is AdversaryKind.EPS_ZERO:
        return eps_zero_order(instance, split)
    if kind is AdversaryKind.EXHAUSTIVE:
        if spec is None:
            raise ValueError("exhaustive adversary needs the policy spec")
        return worst_order_value(instance, split, spec)[0]
    raise AssertionError(f"unhandled adversary kind {kind}")


def worst_order_value(
    instance: Instance,
    split: SplitSample,
    spec: PolicySpec,
    max_n: int = 8,
    max_branches: int = 1_000_000,
) -> tuple[ArrivalOrder, float]:
    """Exhaustively minimize the policy's exact expected profit over all n!
    arrival orders of the online set.

    The expectation is over internal randomness only; the adversary commits
    to the order knowing the split but not the draws.  Ties between orders go
    to the first one in lexicographic index order, so results are stable.
    """
    order, value = worst_order_exact(instance, split, spec, max_n, max_branches)
    return order, float(value)


def worst_order_exact(
    instance: Instance,
    split: SplitSample,
    spec: PolicySpec,
    max_n: int = 8,
    max_branches: int = 1_000_000,
) -> tuple[ArrivalOrder, Fraction]:
    n = instance.n
    if n > max_n:
        raise TooLargeError(f"exhaustive order search capped at n <= {max_n}, got n = {n}")
    evaluate = _order_total_evaluator(instance, split, spec, max_branches)
    best_order: tuple[int, ...] | None = None
    best_value: Fraction | None = None
    for perm in itertools.permutations(sorted(split.online)):
        total = evaluate(perm)
        if best_value is None or total < best_value:
            best_order, best_value = perm, total
    assert best_order is not None and best_value is not None
    return ArrivalOrder(best_order), best_value


def _order_total_evaluator(
    instance: Instance, split: SplitSample, spec: PolicySpec, max_branches: int
):
    """Per-split closure computing one order's exact expected profit.

    The two adversarial-order policies get specialized fast paths (the
    exhaustive search evaluates every one of the n! orders, and the split
    -level precomputation is shared across them); the rest fall back to the
    generic per-order evaluator.
    """
    cand = {i: instance.candidate(i) for i in split.online}
    vals = {i: Fraction(instance.values[i]) for i in split.online}

    if spec.kind is PolicyKind.AOS_SHORT:
        hbest = best_candidate(instance, split.history)

        def evaluate_short(perm: tuple[int, ...]) -> Fraction:
            for i in perm:
                if hbest is None or cand[i] > hbest:
                    return vals[i]
            return Fraction(0)

        return evaluate_short

    if spec.kind is PolicyKind.AOS_LONG:
        history_sorted = sorted(instance.candidates(split.history), reverse=True)
        dist = history_threshold_distribution(history_sorted, instance.n)

        def evaluate_long(perm: tuple[int, ...]) -> Fraction:
            total = Fraction(0)
            for thr, weight in dist:
                for i in perm:
                    if thr is None or cand[i] > thr:
                        total += weight * vals[i]
                        break
            return total

        return evaluate_long

    def evaluate_generic(perm: tuple[int, ...]) -> Fraction:
        return expected_profit_for_order(
            instance, split, ArrivalOrder(perm), spec, max_branches=max_branches
        )[1]

    return evaluate_generic
