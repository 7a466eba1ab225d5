"""Data model shared by every other module.

Two games are played against an adversary that owns a pool of ``n + h``
non-negative candidate values.  A uniformly random ``h``-subset (the history
set) is revealed to the player up front; the remaining ``n`` candidates (the
online set) then arrive one at a time, either in an order chosen by the
adversary (AOS model) or in uniformly random order (ROS model).  The player
may irrevocably accept at most one arriving candidate and competes with the
expected maximum of the online set.

This module owns the instance/split/order types, the candidate total order
(value ties broken toward the lower index), the seeded randomness contract,
and the profit/OPT accounting used everywhere else.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

_MASK64 = (1 << 64) - 1


class SecretaryError(Exception):
    """Base class for every domain error raised by this package."""


class NegativeValueError(SecretaryError, ValueError):
    """A candidate value was negative (values must be >= 0)."""


class SampleTooLargeError(SecretaryError, ValueError):
    """h left no online candidate (need h <= len(values) - 1)."""


class EmptyInstanceError(SecretaryError, ValueError):
    """No candidate values were supplied."""


@dataclass(frozen=True, order=True)
class Candidate:
    """A candidate in the strict total order used for every comparison.

    Higher value wins; on equal values the lower index wins.  The dataclass
    ordering on ``(value, neg_index)`` implements exactly that, so ``a > b``
    reads "a beats b".
    """

    value: float
    neg_index: int

    @property
    def index(self) -> int:
        return -self.neg_index

    @staticmethod
    def of(value: float, index: int) -> "Candidate":
        return Candidate(float(value), -int(index))


@dataclass(frozen=True)
class Instance:
    """A fixed pool of candidate values plus the sample size h."""

    values: tuple[float, ...]
    h: int

    @property
    def n(self) -> int:
        return len(self.values) - self.h

    @property
    def size(self) -> int:
        return len(self.values)

    def candidate(self, index: int) -> Candidate:
        return Candidate.of(self.values[index], index)

    def candidates(self, indices: Iterable[int]) -> list[Candidate]:
        return [self.candidate(i) for i in indices]

    def ranks(self) -> np.ndarray:
        """Rank of every index under the total order (0 = best candidate)."""
        order = sorted(range(self.size), key=lambda i: self.candidate(i), reverse=True)
        ranks = np.empty(self.size, dtype=np.int64)
        for r, i in enumerate(order):
            ranks[i] = r
        return ranks


@dataclass(frozen=True)
class SplitSample:
    """A realized partition of the instance indices into history and online."""

    history: frozenset[int]
    online: frozenset[int]


@dataclass(frozen=True)
class ArrivalOrder:
    """A permutation of the online indices; position k arrives at round k+1."""

    sequence: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.sequence)


@dataclass(frozen=True)
class TrialOutcome:
    """One realized game: what was accepted, when, and what OPT was."""

    accepted: int | None
    profit: float
    accept_round: int | None
    opt_value: float


@dataclass(frozen=True)
class RandomStream:
    """Seeding record for one reproducible stream of randomness.

    Streams are counter-based (Philox) keyed on ``(seed, stream_id)``: equal
    pairs replay the identical draw sequence, distinct pairs are independent,
    so per-trial streams can be handed to parallel workers in any schedule
    without changing results.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = (self.seed & _MASK64) | ((self.stream_id & _MASK64) << 64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, stream_id: int) -> "RandomStream":
        return RandomStream(self.seed, stream_id)


def make_instance(values: Sequence[float], h: int) -> Instance:
    """Validate and build an instance; n is derived as len(values) - h."""
    vals = tuple(float(v) for v in values)
    if not vals:
        raise EmptyInstanceError("instance needs at least one candidate value")
    for v in vals:
        if not np.isfinite(v) or v < 0.0:
            raise NegativeValueError(f"candidate values must be finite and >= 0, got {v!r}")
    if h < 0:
        raise NegativeValueError(f"sample size h must be >= 0, got {h}")
    if h >= len(vals):
        raise SampleTooLargeError(
            f"sample size h={h} leaves no online candidate for {len(vals)} values"
        )
    return Instance(vals, int(h))


def sample_split(instance: Instance, rng: np.random.Generator) -> SplitSample:
    """Draw the history set uniformly among all h-subsets of the indices."""
    perm = rng.permutation(instance.size)
    hist = frozenset(int(i) for i in perm[: instance.h])
    online = frozenset(range(instance.size)) - hist
    return SplitSample(hist, online)


def sample_order(split: SplitSample, rng: np.random.Generator) -> ArrivalOrder:
    """Draw a uniformly random arrival order of the online indices."""
    online = np.fromiter(sorted(split.online), dtype=np.int64)
    return ArrivalOrder(tuple(int(i) for i in rng.permutation(online)))


def opt_value(instance: Instance, split: SplitSample) -> float:
    """Maximum value over the online set (ties do not change the value)."""
    return max(instance.values[i] for i in split.online)


def best_candidate(instance: Instance, indices: Iterable[int]) -> Candidate | None:
    """Best candidate among ``indices`` under the total order, None if empty."""
    cands = instance.candidates(indices)
    return max(cands) if cands else None


def instance_to_json(instance: Instance) -> str:
    return json.dumps({"values": list(instance.values), "h": instance.h})


def instance_from_json(text: str) -> Instance:
    obj = json.loads(text)
    return make_instance(obj["values"], int(obj["h"]))
