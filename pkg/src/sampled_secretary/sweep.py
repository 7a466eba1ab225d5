"""Bound-curve sweeps over a grid of history sizes, with optional Monte Carlo
columns, and their CSV serialization.

The CSV dialect is fixed: comma separator, '.' decimal point, one header row,
LF line endings, no quoting (all cells are numeric).  Rows are emitted in grid
order regardless of how the Monte Carlo points were scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import bounds
from .core import make_instance
from .montecarlo import RatioEstimate, run_trials
from .policies import PolicySpec, parse_policy

_POINT_STREAM_STRIDE = 1 << 32


@dataclass(frozen=True)
class SweepRow:
    n: int
    h: int
    h_over_n: float
    aos_lower: float
    aos_upper: float
    ros_lower: float
    ros_upper: float
    analytic_total: float
    mc_ratio: float | None = None
    mc_std_err: float | None = None


@dataclass(frozen=True)
class HGrid:
    start: int
    step: int
    stop: int

    def points(self) -> list[int]:
        if self.step <= 0 or self.start < 0 or self.stop < self.start:
            raise ValueError(f"bad grid {self.start}:{self.step}:{self.stop}")
        return list(range(self.start, self.stop + 1, self.step))

    @classmethod
    def parse(cls, text: str) -> "HGrid":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:step:end, got {text!r}")
        try:
            start, step, stop = (int(p) for p in parts)
        except ValueError:
            raise ValueError(f"grid components must be integers, got {text!r}") from None
        grid = cls(start, step, stop)
        grid.points()
        return grid


def stress_values(n: int, h: int) -> list[float]:
    """Geometric largest-gap value profile used for the optional Monte Carlo
    columns.  The exponent step shrinks for huge instances so the top value
    stays finite in double precision.  A stress profile, not a worst case."""
    size = n + h
    step = min(1.0, 600.0 / size)
    return [math.exp(step * k * math.log(2.0)) for k in range(size)]


def _mc_point(n: int, h: int, spec: PolicySpec, trials: int, seed: int, index: int) -> RatioEstimate:
    instance = make_instance(stress_values(n, h), h)
    return run_trials(
        instance,
        spec,
        model="ros",
        trials=trials,
        seed=seed,
        stream_namespace=(index + 1) * _POINT_STREAM_STRIDE,
    )


def compute_sweep(
    n: int,
    grid: HGrid,
    mc_trials: int | None = None,
    seed: int = 0,
    policy: str = "alg3",
    threads: int = 1,
) -> list[SweepRow]:
    hs = grid.points()
    estimates: list[RatioEstimate | None] = [None] * len(hs)
    if mc_trials:
        spec = parse_policy(policy)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [
                    pool.submit(_mc_point, n, h, spec, mc_trials, seed, i)
                    for i, h in enumerate(hs)
                ]
                estimates = [f.result() for f in futures]
        else:
            estimates = [_mc_point(n, h, spec, mc_trials, seed, i) for i, h in enumerate(hs)]
    rows = []
    for h, est in zip(hs, estimates):
        q, q_rounds = bounds.q_schedule(n, h)
        rows.append(
            SweepRow(
                n=n,
                h=h,
                h_over_n=h / n,
                aos_lower=bounds.aos_lower(n, h),
                aos_upper=bounds.aos_upper(n, h),
                ros_lower=bounds.ros_lower(n, h),
                ros_upper=bounds.ros_upper(n, h),
                analytic_total=bounds.analytic_total(n, h, q_rounds),
                mc_ratio=est.ratio if est else None,
                mc_std_err=est.alg_std_err / est.mean_opt if est and est.mean_opt > 0 else (0.0 if est else None),
            )
        )
    return rows


_BASE_COLUMNS = [
    "n",
    "h",
    "h_over_n",
    "aos_lower",
    "aos_upper",
    "ros_lower",
    "ros_upper",
    "analytic_total",
]
_MC_COLUMNS = ["mc_ratio", "mc_std_err"]


def _fmt(x: float) -> str:
    return format(x, ".12g")


def rows_to_csv(rows: list[SweepRow]) -> str:
    with_mc = any(r.mc_ratio is not None for r in rows)
    columns = _BASE_COLUMNS + (_MC_COLUMNS if with_mc else [])
    lines = [",".join(columns)]
    for r in rows:
        cells = [str(r.n), str(r.h)] + [
            _fmt(getattr(r, c)) for c in _BASE_COLUMNS[2:]
        ]
        if with_mc:
            cells += [_fmt(r.mc_ratio), _fmt(r.mc_std_err)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def rows_from_csv(text: str) -> list[SweepRow]:
    lines = [ln for ln in text.split("\n") if ln]
    header = lines[0].split(",")
    if header[: len(_BASE_COLUMNS)] != _BASE_COLUMNS:
        raise ValueError(f"unexpected sweep header {header!r}")
    with_mc = header[len(_BASE_COLUMNS) :] == _MC_COLUMNS
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        base = dict(zip(_BASE_COLUMNS, cells))
        rows.append(
            SweepRow(
                n=int(base["n"]),
                h=int(base["h"]),
                h_over_n=float(base["h_over_n"]),
                aos_lower=float(base["aos_lower"]),
                aos_upper=float(base["aos_upper"]),
                ros_lower=float(base["ros_lower"]),
                ros_upper=float(base["ros_upper"]),
                analytic_total=float(base["analytic_total"]),
                mc_ratio=float(cells[8]) if with_mc else None,
                mc_std_err=float(cells[9]) if with_mc else None,
            )
        )
    return rows
