"""The four online policies behind one step-wise contract.

A policy is initialized with the history values, the online length n and a
random stream, and is then asked once per round whether to accept the arriving
candidate.  All four rules are comparison-based, so every decision goes
through the candidate total order from :mod:`.core` (value, ties to the lower
index):

* ``AOS_SHORT`` ("alg1"): accept the first candidate beating everything
  observed so far, history included.
* ``AOS_LONG`` ("alg2"): draw a uniform (n-1)-subset of the history once and
  accept the first candidate beating its maximum.  Needs h >= n-1.
* ``ROS`` ("alg3"): reject the first floor(q*n) rounds outright, then accept
  best-so-far while fewer than n candidates have been observed in total, then
  per round draw a fresh uniform (n-1)-subset of everything observed and
  accept a candidate beating its maximum.
* ``COMBINED`` ("combined"): pre-draw n disjoint uniform (n-1)-subsets of the
  history and accept at round l iff the candidate beats the maximum of the
  l-th subset.  Needs h >= n*(n-1).

``expected_profit_for_order`` evaluates a policy's exact expected profit on a
fixed split and arrival order, averaging over the policy's internal
randomness with exact rational weights; it is the workhorse of the oracle and
worst-order modules.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .bounds import q_schedule
from .core import (
    ArrivalOrder,
    Candidate,
    Instance,
    SecretaryError,
    SplitSample,
    TrialOutcome,
    opt_value,
)


class HistoryTooSmallError(SecretaryError, ValueError):
    """The policy needs a larger history set than the instance provides."""


class CalledAfterAcceptError(SecretaryError, RuntimeError):
    """decide() was called again after the policy already accepted."""


class RoundSkewError(SecretaryError, RuntimeError):
    """Rounds must be fed in order 1, 2, ... with no gaps."""


class RandomnessNotEnumerableError(SecretaryError, ValueError):
    """Exact evaluation would branch over too many internal random choices."""


class PolicyKind(enum.Enum):
    AOS_SHORT = "alg1"
    AOS_LONG = "alg2"
    ROS = "alg3"
    COMBINED = "combined"


class Phase(enum.Enum):
    SAMPLING = "sampling"
    PHASE1 = "phase1"
    PHASE2 = "phase2"


@dataclass(frozen=True)
class PolicySpec:
    """Which policy to run, with the optional sampling-length override for
    ROS and the debug mode that keeps drawing subsets after an accept."""

    kind: PolicyKind
    q_rounds: int | None = None
    predraw_phase2: bool = False


def parse_policy(name: str, q_rounds: int | None = None) -> PolicySpec:
    try:
        kind = PolicyKind(name)
    except ValueError:
        valid = ", ".join(k.value for k in PolicyKind)
        raise ValueError(f"unknown policy {name!r} (expected one of: {valid})") from None
    if q_rounds is not None and kind is not PolicyKind.ROS:
        raise ValueError("--q-rounds only applies to alg3")
    return PolicySpec(kind, q_rounds=q_rounds)


@dataclass
class PolicyState:
    """Mutable per-run state; one instance per game, never shared."""

    kind: PolicyKind
    n: int
    h: int
    observed: list[Candidate]
    q_rounds: int = 0
    threshold: Candidate | None = None
    fixed_subsets: tuple[tuple[Candidate, ...], ...] | None = None
    round: int = 0
    accepted: bool = False
    phase: Phase = Phase.PHASE1


def _canonical_history(history: Iterable[Candidate]) -> list[Candidate]:
    # Sorted best-first so behavior cannot depend on presentation order.
    return sorted(history, reverse=True)


def resolve_q_rounds(spec: PolicySpec, n: int, h: int) -> int:
    if spec.q_rounds is not None:
        if not 0 <= spec.q_rounds <= n:
            raise ValueError(f"q_rounds override must be in [0, {n}], got {spec.q_rounds}")
        return spec.q_rounds
    return q_schedule(n, h)[1]


def init_policy(
    spec: PolicySpec,
    history: Iterable[Candidate],
    n: int,
    rng: np.random.Generator,
) -> PolicyState:
    hist = _canonical_history(history)
    h = len(hist)
    state = PolicyState(kind=spec.kind, n=n, h=h, observed=list(hist))
    if spec.kind is PolicyKind.AOS_SHORT:
        return state
    if spec.kind is PolicyKind.AOS_LONG:
        if h < n - 1:
            raise HistoryTooSmallError(f"alg2 needs h >= n-1 = {n - 1}, got h = {h}")
        if n >= 2:
            chosen = rng.choice(h, size=n - 1, replace=False)
            # hist is sorted best-first, so the subset max sits at the
            # smallest chosen position.
            state.threshold = hist[int(chosen.min())]
        return state
    if spec.kind is PolicyKind.ROS:
        state.q_rounds = resolve_q_rounds(spec, n, h)
        state.phase = Phase.SAMPLING if state.q_rounds >= 1 else Phase.PHASE1
        return state
    if spec.kind is PolicyKind.COMBINED:
        need = n * (n - 1)
        if h < need:
            raise HistoryTooSmallError(f"combined needs h >= n*(n-1) = {need}, got h = {h}")
        perm = rng.permutation(h)
        subsets = tuple(
            tuple(hist[int(j)] for j in perm[k * (n - 1) : (k + 1) * (n - 1)])
            for k in range(n)
        )
        state.fixed_subsets = subsets
        return state
    raise AssertionError(f"unhandled policy kind {spec.kind}")


def _beats_all(candidate: Candidate, others: Sequence[Candidate]) -> bool:
    return all(candidate > o for o in others)


def decide(
    state: PolicyState,
    candidate: Candidate,
    round_index: int,
    rng: np.random.Generator,
) -> bool:
    """Feed one arriving candidate; returns True on accept and updates state."""
    if state.accepted:
        raise CalledAfterAcceptError("policy already accepted a candidate")
    if round_index != state.round + 1:
        raise RoundSkewError(f"expected round {state.round + 1}, got {round_index}")
    if round_index > state.n:
        raise RoundSkewError(f"round {round_index} exceeds n = {state.n}")
    state.round = round_index

    if state.kind is PolicyKind.AOS_SHORT:
        accept = _beats_all(candidate, state.observed)
        state.observed.append(candidate)
    elif state.kind is PolicyKind.AOS_LONG:
        accept = state.threshold is None or candidate > state.threshold
        state.observed.append(candidate)
    elif state.kind is PolicyKind.ROS:
        prior = state.observed
        if round_index <= state.q_rounds:
            state.phase = Phase.SAMPLING
            accept = False
        elif state.h + round_index <= state.n:
            state.phase = Phase.PHASE1
            accept = _beats_all(candidate, prior)
        else:
            state.phase = Phase.PHASE2
            accept = candidate > _draw_subset_max(prior, state.n - 1, rng)
        state.observed.append(candidate)
    elif state.kind is PolicyKind.COMBINED:
        assert state.fixed_subsets is not None
        subset = state.fixed_subsets[round_index - 1]
        accept = _beats_all(candidate, subset)
        state.observed.append(candidate)
    else:
        raise AssertionError(f"unhandled policy kind {state.kind}")

    if accept:
        state.accepted = True
    return accept


def _draw_subset_max(pool: Sequence[Candidate], size: int, rng: np.random.Generator) -> Candidate:
    if size <= 0:
        return Candidate.of(-math.inf, 0)
    chosen = rng.choice(len(pool), size=size, replace=False)
    return max(pool[int(i)] for i in chosen)


def run_policy(
    spec: PolicySpec,
    instance: Instance,
    split: SplitSample,
    order: ArrivalOrder,
    rng: np.random.Generator,
) -> TrialOutcome:
    """Drive init + decide over one arrival order; stops at the first accept."""
    history = instance.candidates(sorted(split.history))
    state = init_policy(spec, history, instance.n, rng)
    accepted: int | None = None
    accept_round: int | None = None
    for round_index, idx in enumerate(order.sequence, start=1):
        cand = instance.candidate(idx)
        if decide(state, cand, round_index, rng):
            accepted = idx
            accept_round = round_index
            break
    if spec.predraw_phase2 and spec.kind is PolicyKind.ROS and accepted is not None:
        # Debug mode mirroring the draw-everything analysis device: keep
        # drawing the per-round subsets after the accept.  Outcomes are
        # unchanged (the extra draws happen after the decision), which a test
        # asserts bit-for-bit.
        for round_index in range(state.round + 1, state.n + 1):
            if state.h + round_index > state.n and round_index > state.q_rounds:
                pool_size = state.h + round_index - 1
                if state.n - 1 >= 1:
                    rng.choice(pool_size, size=state.n - 1, replace=False)
    profit = instance.values[accepted] if accepted is not None else 0.0
    return TrialOutcome(
        accepted=accepted,
        profit=profit,
        accept_round=accept_round,
        opt_value=opt_value(instance, split),
    )


# ---------------------------------------------------------------------------
# Exact per-order evaluation (averages over the policy's internal randomness)
# ---------------------------------------------------------------------------


def expected_profit_for_order(
    instance: Instance,
    split: SplitSample,
    order: ArrivalOrder,
    spec: PolicySpec,
    max_branches: int = 1_000_000,
) -> tuple[list[Fraction], Fraction]:
    """Exact expected profit of a policy on one fixed (split, order).

    Returns (per-round profits, total) as exact rationals.  Internal
    randomness is integrated out exactly: the one-shot history subset of alg2
    via the distribution of its maximum, the fresh per-round subsets of alg3
    via the counting identity P(candidate beats the subset max) =
    C(#worse, n-1)/C(#observed, n-1), and the disjoint subsets of the
    combined policy by literal enumeration (bounded by ``max_branches``).
    """
    history = _canonical_history(instance.candidates(split.history))
    arrivals = instance.candidates(order.sequence)
    n = instance.n
    kind = spec.kind

    if kind is PolicyKind.AOS_SHORT:
        return _exact_best_so_far(history, arrivals, n)
    if kind is PolicyKind.AOS_LONG:
        return _exact_history_threshold(history, arrivals, n)
    if kind is PolicyKind.ROS:
        s = resolve_q_rounds(spec, n, len(history))
        return _exact_three_phase(history, arrivals, n, s)
    if kind is PolicyKind.COMBINED:
        return _exact_combined(history, arrivals, n, max_branches)
    raise AssertionError(f"unhandled policy kind {kind}")


def _exact_best_so_far(
    history: list[Candidate], arrivals: list[Candidate], n: int
) -> tuple[list[Fraction], Fraction]:
    per_round = [Fraction(0)] * n
    # A rejected candidate never beats the running max, so the max over
    # everything observed stays max(history) until the first accept.
    best = history[0] if history else None
    for l, cand in enumerate(arrivals, start=1):
        if best is None or cand > best:
            per_round[l - 1] = Fraction(cand.value)
            break
    return per_round, sum(per_round, Fraction(0))


def history_threshold_distribution(
    history_sorted: Sequence[Candidate], n: int
) -> list[tuple[Candidate | None, Fraction]]:
    """Distribution of the maximum of a uniform (n-1)-subset of the history
    (sorted best-first).  For n = 1 the subset is empty and the threshold is
    None, meaning "accept anything"."""
    h = len(history_sorted)
    if h < n - 1:
        raise HistoryTooSmallError(f"alg2 needs h >= n-1 = {n - 1}, got h = {h}")
    if n == 1:
        return [(None, Fraction(1))]
    total = math.comb(h, n - 1)
    dist: list[tuple[Candidate | None, Fraction]] = []
    for j, thr in enumerate(history_sorted):
        ways = math.comb(h - 1 - j, n - 2) if h - 1 - j >= n - 2 else 0
        if ways:
            dist.append((thr, Fraction(ways, total)))
    return dist


def _exact_history_threshold(
    history: list[Candidate], arrivals: list[Candidate], n: int
) -> tuple[list[Fraction], Fraction]:
    per_round = [Fraction(0)] * n
    for thr, weight in history_threshold_distribution(history, n):
        for l, cand in enumerate(arrivals, start=1):
            if thr is None or cand > thr:
                per_round[l - 1] += weight * Fraction(cand.value)
                break
    return per_round, sum(per_round, Fraction(0))


def _exact_three_phase(
    history: list[Candidate], arrivals: list[Candidate], n: int, q_rounds: int
) -> tuple[list[Fraction], Fraction]:
    h = len(history)
    per_round = [Fraction(0)] * n
    reach = Fraction(1)
    observed = list(history)
    for l, cand in enumerate(arrivals, start=1):
        if l <= q_rounds:
            p = Fraction(0)
        elif h + l <= n:
            p = Fraction(1 if _beats_all(cand, observed) else 0)
        else:
            worse = sum(1 for o in observed if o < cand)
            p = Fraction(math.comb(worse, n - 1), math.comb(h + l - 1, n - 1))
        per_round[l - 1] = reach * p * Fraction(cand.value)
        reach *= 1 - p
        if reach == 0:
            break
        observed.append(cand)
    return per_round, sum(per_round, Fraction(0))


def _disjoint_subset_system_prob(sizes: list[int], h: int, k: int) -> Fraction:
    """Probability that disjoint uniform k-subsets S_1..S_t of an h-set land
    inside given lower sets of sizes b_1..b_t.

    Lower sets of one total order are nested, so filling the smallest
    constraint first gives an exact product count.
    """
    num = Fraction(1)
    for j, b in enumerate(sorted(sizes)):
        used = j * k
        if b - used < k:
            return Fraction(0)
        num *= Fraction(math.comb(b - used, k), math.comb(h - used, k))
    return num


def _exact_combined(
    history: list[Candidate], arrivals: list[Candidate], n: int, max_branches: int
) -> tuple[list[Fraction], Fraction]:
    h = len(history)
    k = n - 1
    if h < n * k:
        raise HistoryTooSmallError(f"combined needs h >= n*(n-1) = {n * k}, got h = {h}")
    if 2**n > max_branches:
        raise RandomnessNotEnumerableError(
            f"combined policy evaluation needs 2^{n} inclusion-exclusion terms (> {max_branches})"
        )
    per_round = [Fraction(0)] * n
    if k == 0:
        per_round[0] = Fraction(arrivals[0].value)
        return per_round, per_round[0]
    # Acceptance at round l is the event "subset l fits below candidate l".
    # The constraint sets are nested (lower sets of the history order), so
    # P(first accept at l) follows by inclusion-exclusion over which earlier
    # rounds also accept, each term a closed-form disjoint-subset count.
    below = [sum(1 for x in history if x < c) for c in arrivals]
    for l in range(1, n + 1):
        prob = Fraction(0)
        for also_accept in itertools.chain.from_iterable(
            itertools.combinations(range(l - 1), t) for t in range(l)
        ):
            sizes = [below[j] for j in also_accept] + [below[l - 1]]
            term = _disjoint_subset_system_prob(sizes, h, k)
            prob += (-1) ** len(also_accept) * term
        per_round[l - 1] = prob * Fraction(arrivals[l - 1].value)
    return per_round, sum(per_round, Fraction(0))
