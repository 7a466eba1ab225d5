"""Seeded large-scale trial runner for ratios beyond enumeration range.

The random-order model is simulated by a batched engine that works in rank
space: a trial is a uniform permutation of the candidate ranks, the first h
positions form the history, and every policy rule is a rank comparison (the
tie-break is baked into the ranks).  Per-round subset draws of the three-phase
policy are realized as Bernoulli draws with the exact subset-counting
acceptance probability, which has the same distribution as materializing the
subset.  Batches have a fixed size and each batch owns its own counter-based
stream, so results are bit-identical for a given seed no matter how work is
scheduled.

Adversarial-order estimation drives the single-trial policy runner per trial
(adversary orders are deterministic functions of the split), which is plenty
at the small sizes where those experiments live.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .adversaries import (
    AdversaryKind,
    EpsZeroFamily,
    TooLargeError,
    eps_zero_instance,
    order_for,
    worst_order_exact,
)
from .core import (
    Instance,
    RandomStream,
    SecretaryError,
    SplitSample,
    make_instance,
    opt_value,
    sample_split,
)
from .policies import (
    HistoryTooSmallError,
    PolicyKind,
    PolicySpec,
    resolve_q_rounds,
    run_policy,
)

BATCH_SIZE = 16384
AOS_STREAM_BASE = 1 << 32


class InvalidDistError(SecretaryError, ValueError):
    """The distribution spec has an unsupported kind or parameter range."""


@dataclass(frozen=True)
class RatioEstimate:
    """Aggregated trial statistics; ratio = mean_alg / mean_opt."""

    mean_alg: float
    mean_opt: float
    ratio: float
    alg_std_err: float
    ratio_std_err: float
    trials: int
    seed: int


@dataclass(frozen=True)
class DistSpec:
    """An i.i.d. value distribution: uniform01, exponential(rate), or
    pareto(shape) with shape > 1 so the expected maximum exists."""

    kind: str
    rate: float | None = None
    shape: float | None = None

    def __post_init__(self) -> None:
        if self.kind == "uniform01":
            return
        if self.kind == "exponential":
            if self.rate is None or self.rate <= 0:
                raise InvalidDistError(f"exponential needs rate > 0, got {self.rate}")
            return
        if self.kind == "pareto":
            if self.shape is None or self.shape <= 1:
                raise InvalidDistError(f"pareto needs shape > 1, got {self.shape}")
            return
        raise InvalidDistError(f"unknown distribution kind {self.kind!r}")

    def sample(self, gen: np.random.Generator, size: tuple[int, int]) -> np.ndarray:
        if self.kind == "uniform01":
            return gen.random(size)
        if self.kind == "exponential":
            return gen.exponential(1.0 / float(self.rate), size)
        return 1.0 + gen.pareto(float(self.shape), size)


def _validate_policy(spec: PolicySpec, n: int, h: int) -> None:
    if spec.kind is PolicyKind.AOS_LONG and h < n - 1:
        raise HistoryTooSmallError(f"alg2 needs h >= n-1 = {n - 1}, got h = {h}")
    if spec.kind is PolicyKind.COMBINED and h < n * (n - 1):
        raise HistoryTooSmallError(f"combined needs h >= n*(n-1) = {n * (n - 1)}, got h = {h}")


def _phase2_tables(n: int, h: int, q_rounds: int) -> dict[int, np.ndarray]:
    """Per-round acceptance probability indexed by the count of worse
    observed candidates: P = C(worse, n-1) / C(observed, n-1)."""
    k = n - 1
    tables: dict[int, np.ndarray] = {}
    for l in range(1, n + 1):
        if l <= q_rounds or h + l <= n:
            continue
        m = h + l - 1
        denom = math.comb(m, k)
        tables[l] = np.array(
            [float(Fraction(math.comb(w, k), denom)) if w >= k else 0.0 for w in range(m + 1)],
            dtype=np.float64,
        )
    return tables


def _accept_matrix(
    spec: PolicySpec,
    ranks: np.ndarray,
    n: int,
    h: int,
    q_rounds: int,
    tables: dict[int, np.ndarray],
    gen: np.random.Generator,
) -> np.ndarray:
    """Per-trial, per-round accept decisions for one batch of rank rows.

    Draw order is fixed per policy so a (seed, stream) pair always replays
    the same batch.
    """
    b = ranks.shape[0]
    sentinel = n + h  # larger than any real rank; plays the role of max(empty) = -inf
    online = ranks[:, h:]
    kind = spec.kind

    if kind in (PolicyKind.AOS_SHORT, PolicyKind.ROS):
        base = ranks[:, :h].min(axis=1) if h > 0 else np.full(b, sentinel, dtype=ranks.dtype)
        prefix = np.minimum.accumulate(
            np.concatenate([base[:, None], online[:, : n - 1]], axis=1), axis=1
        )
    if kind is PolicyKind.AOS_SHORT:
        return online < prefix

    if kind is PolicyKind.ROS:
        u = gen.random((b, n))
        accept = np.zeros((b, n), dtype=bool)
        for l in range(1, n + 1):
            if l <= q_rounds:
                continue
            col = l - 1
            if h + l <= n:
                accept[:, col] = online[:, col] < prefix[:, col]
            else:
                cur = ranks[:, h + col]
                worse = (ranks[:, : h + col] > cur[:, None]).sum(axis=1)
                accept[:, col] = u[:, col] < tables[l][worse]
        return accept

    if kind is PolicyKind.AOS_LONG:
        if n >= 2:
            u = gen.random((b, h))
            chosen = np.argsort(u, axis=1)[:, : n - 1]
            thr = np.take_along_axis(ranks[:, :h], chosen, axis=1).min(axis=1)
        else:
            thr = np.full(b, sentinel, dtype=ranks.dtype)
        return online < thr[:, None]

    if kind is PolicyKind.COMBINED:
        need = n * (n - 1)
        if need >= 1:
            u = gen.random((b, h))
            chosen = np.argsort(u, axis=1)[:, :need]
            sub = np.take_along_axis(ranks[:, :h], chosen, axis=1).reshape(b, n, n - 1)
            thr = sub.min(axis=2)
        else:
            thr = np.full((b, n), sentinel, dtype=ranks.dtype)
        return online < thr

    raise AssertionError(f"unhandled policy kind {kind}")


def _profit_and_opt(
    accept: np.ndarray, online_ranks: np.ndarray, value_by_rank: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    b = accept.shape[0]
    rows = np.arange(b)
    got = accept.any(axis=1)
    first = accept.argmax(axis=1)
    accepted_rank = online_ranks[rows, first]
    if value_by_rank.ndim == 1:
        profit = np.where(got, value_by_rank[accepted_rank], 0.0)
        opt = value_by_rank[online_ranks.min(axis=1)]
    else:
        profit = np.where(got, value_by_rank[rows, accepted_rank], 0.0)
        opt = value_by_rank[rows, online_ranks.min(axis=1)]
    return profit, opt


class _Sums:
    """Order-stable accumulation of per-trial profit/opt moments."""

    def __init__(self) -> None:
        self.t = 0
        self.p = self.p2 = self.o = self.o2 = self.po = 0.0

    def add(self, profit: np.ndarray, opt: np.ndarray) -> None:
        self.t += profit.shape[0]
        self.p += float(profit.sum())
        self.p2 += float((profit * profit).sum())
        self.o += float(opt.sum())
        self.o2 += float((opt * opt).sum())
        self.po += float((profit * opt).sum())

    def estimate(self, seed: int, scale: float = 1.0) -> RatioEstimate:
        t = self.t
        mean_p = self.p / t
        mean_o = self.o / t
        var_p = max(self.p2 / t - mean_p**2, 0.0)
        var_o = max(self.o2 / t - mean_o**2, 0.0)
        cov = self.po / t - mean_p * mean_o
        ratio = mean_p / mean_o if mean_o > 0 else 0.0
        alg_se = math.sqrt(var_p / t)
        if mean_o > 0:
            delta_var = (
                var_p / mean_o**2
                + mean_p**2 * var_o / mean_o**4
                - 2.0 * mean_p * cov / mean_o**3
            )
            ratio_se = math.sqrt(max(delta_var, 0.0) / t)
        else:
            ratio_se = 0.0
        return RatioEstimate(
            mean_alg=mean_p * scale,
            mean_opt=mean_o * scale,
            ratio=ratio,
            alg_std_err=alg_se * scale,
            ratio_std_err=ratio_se,
            trials=t,
            seed=seed,
        )


def _run_batched(
    trials: int,
    seed: int,
    stream_namespace: int,
    batch_fn: Callable[[np.random.Generator, int], tuple[np.ndarray, np.ndarray]],
    scale: float = 1.0,
) -> RatioEstimate:
    sums = _Sums()
    n_batches = (trials + BATCH_SIZE - 1) // BATCH_SIZE
    for i in range(n_batches):
        gen = RandomStream(seed, stream_namespace + i).generator()
        used = min(BATCH_SIZE, trials - i * BATCH_SIZE)
        profit, opt = batch_fn(gen, used)
        sums.add(profit[:used], opt[:used])
    return sums.estimate(seed, scale)


def run_trials(
    instance: Instance,
    spec: PolicySpec,
    model: str = "ros",
    order: AdversaryKind | str | None = None,
    trials: int = 100_000,
    seed: int = 0,
    stream_namespace: int = 0,
) -> RatioEstimate:
    """Estimate E[ALG] and E[OPT] over seeded trials.

    model "ros": uniform split and uniform arrival order per trial (batched
    engine).  model "aos": uniform split, then the given adversary's order
    for that split, with one stream per trial.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    n, h = instance.n, instance.h
    _validate_policy(spec, n, h)
    if model == "ros":
        return _run_trials_ros(instance, spec, trials, seed, stream_namespace)
    if model == "aos":
        kind = AdversaryKind(order) if isinstance(order, str) else order
        if kind is None:
            kind = AdversaryKind.INCREASING_UNSEEN_FIRST
        return _run_trials_aos(instance, spec, kind, trials, seed, stream_namespace)
    raise ValueError(f"model must be 'ros' or 'aos', got {model!r}")


def _run_trials_ros(
    instance: Instance, spec: PolicySpec, trials: int, seed: int, stream_namespace: int
) -> RatioEstimate:
    n, h = instance.n, instance.h
    size = instance.size
    q_rounds = resolve_q_rounds(spec, n, h) if spec.kind is PolicyKind.ROS else 0
    tables = _phase2_tables(n, h, q_rounds) if spec.kind is PolicyKind.ROS else {}
    inst_ranks = instance.ranks()
    values = np.asarray(instance.values, dtype=np.float64)
    scale = float(values.max()) if float(values.max()) > 0 else 1.0
    by_rank = np.sort(values)[::-1] / scale  # rank 0 = best value

    def batch(gen: np.random.Generator, used: int) -> tuple[np.ndarray, np.ndarray]:
        u = gen.random((BATCH_SIZE, size))[:used]
        perm = np.argsort(u, axis=1)
        ranks = inst_ranks[perm]
        accept = _accept_matrix(spec, ranks, n, h, q_rounds, tables, gen)
        return _profit_and_opt(accept, ranks[:, h:], by_rank)

    return _run_batched(trials, seed, stream_namespace, batch, scale)


def _run_trials_aos(
    instance: Instance,
    spec: PolicySpec,
    order_kind: AdversaryKind,
    trials: int,
    seed: int,
    stream_namespace: int,
) -> RatioEstimate:
    sums = _Sums()
    worst_cache: dict[frozenset[int], tuple] = {}
    for t in range(trials):
        gen = RandomStream(seed, stream_namespace + t).generator()
        split = sample_split(instance, gen)
        if order_kind is AdversaryKind.EXHAUSTIVE:
            if split.history not in worst_cache:
                worst_cache[split.history] = worst_order_exact(instance, split, spec)
            order = worst_cache[split.history][0]
        else:
            order = order_for(order_kind, instance, split, spec)
        outcome = run_policy(spec, instance, split, order, gen)
        sums.add(np.array([outcome.profit]), np.array([outcome.opt_value]))
    return sums.estimate(seed)


def iid_prophet_trials(
    dist: DistSpec,
    n: int,
    h: int,
    spec: PolicySpec,
    trials: int,
    seed: int,
    stream_namespace: int = 0,
) -> RatioEstimate:
    """Trials with fresh i.i.d. values each time: the first h draws are the
    training sample, the remaining n arrive in draw order (which is uniform
    by exchangeability); mean_opt estimates E[max of the n online draws]."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if n < 1 or h < 0:
        raise ValueError(f"need n >= 1 and h >= 0, got n={n}, h={h}")
    _validate_policy(spec, n, h)
    q_rounds = resolve_q_rounds(spec, n, h) if spec.kind is PolicyKind.ROS else 0
    tables = _phase2_tables(n, h, q_rounds) if spec.kind is PolicyKind.ROS else {}
    size = n + h

    def batch(gen: np.random.Generator, used: int) -> tuple[np.ndarray, np.ndarray]:
        values = dist.sample(gen, (BATCH_SIZE, size))[:used]
        # Rank 0 = highest value; stable sort breaks float ties toward the
        # earlier draw, matching the candidate total order.
        order = np.argsort(-values, axis=1, kind="stable")
        ranks = np.empty_like(order)
        np.put_along_axis(ranks, order, np.arange(size)[None, :].repeat(order.shape[0], 0), 1)
        by_rank = np.take_along_axis(values, order, axis=1)
        accept = _accept_matrix(spec, ranks, n, h, q_rounds, tables, gen)
        return _profit_and_opt(accept, ranks[:, h:], by_rank)

    return _run_batched(trials, seed, stream_namespace, batch)


def tradeoff_experiment(
    n: int,
    h: int,
    spec: PolicySpec,
    epsilon: float,
    trials: int,
    seed: int,
) -> RatioEstimate:
    """Random-order ratio of a policy on the trade-off instance: a thin layer
    of epsilon-candidates over zeros, sized so missing all of them is rare.
    Callers compare the result against 1 - c + epsilon for a policy that is
    c-competitive under adversarial order."""
    instance = eps_zero_instance(EpsZeroFamily.tradeoff(n, h, epsilon))
    return run_trials(instance, spec, model="ros", trials=trials, seed=seed)


def combined_policy_check(
    n: int,
    trials: int,
    seed: int,
) -> tuple[RatioEstimate, RatioEstimate]:
    """Both-models check of the pre-partitioned policy at h = n*(n-1).

    Random-order side: batched trials.  Adversarial side: Monte Carlo over
    splits with the exact worst order (minimum over all n! orders of the
    partition-averaged profit) computed once per distinct split.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > 5:
        raise TooLargeError("adversarial side is exhaustive per split; capped at n <= 5")
    h = n * (n - 1)
    values = [float(2**k) for k in range(n + h)]
    instance = make_instance(values, h)
    spec = PolicySpec(PolicyKind.COMBINED)
    ros_est = run_trials(instance, spec, model="ros", trials=trials, seed=seed)

    sums = _Sums()
    cache: dict[frozenset[int], tuple[float, float]] = {}
    scale = float(max(values))
    size = instance.size
    n_batches = (trials + BATCH_SIZE - 1) // BATCH_SIZE
    for i in range(n_batches):
        gen = RandomStream(seed, AOS_STREAM_BASE + i).generator()
        used = min(BATCH_SIZE, trials - i * BATCH_SIZE)
        u = gen.random((BATCH_SIZE, size))[:used]
        perm = np.argsort(u, axis=1)
        profits = np.empty(used)
        opts = np.empty(used)
        for row in range(used):
            hist = frozenset(int(j) for j in perm[row, :h])
            if hist not in cache:
                split = SplitSample(hist, frozenset(range(size)) - hist)
                cache[hist] = (
                    float(worst_order_exact(instance, split, spec)[1]) / scale,
                    opt_value(instance, split) / scale,
                )
            profits[row], opts[row] = cache[hist]
        sums.add(profits, opts)
    return ros_est, sums.estimate(seed, scale)
