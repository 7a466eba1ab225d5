"""Pydantic request/response models for the HTTP service.

The CLI builds these same models and either calls the handlers in process or
posts them to a running server, so the wire format is defined exactly once.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..bounds import BoundReport
from ..montecarlo import RatioEstimate
from ..oracle import ExactResult
from ..sweep import SweepRow

PolicyName = Literal["alg1", "alg2", "alg3", "combined"]
ModelName = Literal["ros", "aos"]
OrderName = Literal["increasing-unseen", "eps-zero", "exhaustive", "random"]


class InstancePayload(BaseModel):
    values: list[float] = Field(min_length=1)
    h: int = Field(ge=0)


class BoundsRequest(BaseModel):
    n: int = Field(ge=1)
    h: int = Field(ge=0)


class BoundReportModel(BaseModel):
    n: int
    h: int
    aos_lower: float
    aos_upper: float
    ros_lower: float
    ros_upper: float
    q: float
    q_rounds: int

    @classmethod
    def from_report(cls, report: BoundReport) -> "BoundReportModel":
        return cls(**report.__dict__)


class ExactRequest(BaseModel):
    values: list[float] = Field(min_length=1)
    h: int = Field(ge=0)
    algorithm: PolicyName = "alg3"
    model: ModelName = "ros"
    q_rounds: Optional[int] = None
    budget: Optional[int] = Field(default=None, ge=1)


class ExactResultModel(BaseModel):
    expected_alg: float
    expected_opt: float
    ratio: float
    per_round_profit: list[float]
    enumerated_worlds: int

    @classmethod
    def from_result(cls, result: ExactResult) -> "ExactResultModel":
        return cls(
            expected_alg=result.expected_alg,
            expected_opt=result.expected_opt,
            ratio=result.ratio,
            per_round_profit=list(result.per_round_profit),
            enumerated_worlds=result.enumerated_worlds,
        )


class SimulateRequest(BaseModel):
    values: list[float] = Field(min_length=1)
    h: int = Field(ge=0)
    algorithm: PolicyName = "alg3"
    model: ModelName = "ros"
    order: Optional[OrderName] = None
    q_rounds: Optional[int] = None
    trials: int = Field(default=100_000, ge=1)
    seed: int = 0


class RatioEstimateModel(BaseModel):
    mean_alg: float
    mean_opt: float
    ratio: float
    alg_std_err: float
    ratio_std_err: float
    trials: int
    seed: int

    @classmethod
    def from_estimate(cls, est: RatioEstimate) -> "RatioEstimateModel":
        return cls(**est.__dict__)


class SweepRequest(BaseModel):
    n: int = Field(ge=1)
    h_start: int = Field(ge=0)
    h_step: int = Field(ge=1)
    h_stop: int = Field(ge=0)
    mc_trials: Optional[int] = Field(default=None, ge=1)
    seed: int = 0
    policy: PolicyName = "alg3"
    threads: int = Field(default=1, ge=1)


class SweepRowModel(BaseModel):
    n: int
    h: int
    h_over_n: float
    aos_lower: float
    aos_upper: float
    ros_lower: float
    ros_upper: float
    analytic_total: float
    mc_ratio: Optional[float] = None
    mc_std_err: Optional[float] = None

    @classmethod
    def from_row(cls, row: SweepRow) -> "SweepRowModel":
        return cls(**row.__dict__)


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]


class DistPayload(BaseModel):
    kind: Literal["uniform01", "exponential", "pareto"]
    rate: Optional[float] = None
    shape: Optional[float] = None


class IidRequest(BaseModel):
    dist: DistPayload
    n: int = Field(ge=1)
    h: int = Field(ge=0)
    algorithm: PolicyName = "alg3"
    trials: int = Field(default=100_000, ge=1)
    seed: int = 0


class TradeoffRequest(BaseModel):
    n: int = Field(ge=2)
    h: int = Field(ge=0)
    algorithm: PolicyName = "alg2"
    epsilon: float = Field(default=0.01, gt=0)
    trials: int = Field(default=100_000, ge=1)
    seed: int = 0


class CombinedCheckRequest(BaseModel):
    n: int = Field(ge=1, le=5)
    trials: int = Field(default=10_000, ge=1)
    seed: int = 0


class CombinedCheckResponse(BaseModel):
    ros: RatioEstimateModel
    aos: RatioEstimateModel


class HealthResponse(BaseModel):
    status: str
    version: str
