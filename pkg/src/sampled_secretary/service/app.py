"""FastAPI service wrapping the library.

Each endpoint is a thin shim: validate the request model, call the handler,
wrap the dataclass result.  The handlers are plain functions so the CLI can
call them in process without a server; domain errors surface as HTTP 400 with
a machine-readable ``code`` (the enumeration budget maps to
``budget_exceeded`` so clients can distinguish it from bad input).
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..bounds import bound_report
from ..core import SecretaryError, make_instance
from ..montecarlo import (
    DistSpec,
    combined_policy_check,
    iid_prophet_trials,
    run_trials,
    tradeoff_experiment,
)
from ..oracle import BudgetExceededError, DEFAULT_BUDGET, exact_aos, exact_ros
from ..policies import parse_policy
from ..sweep import HGrid, compute_sweep
from .models import (
    BoundReportModel,
    BoundsRequest,
    CombinedCheckRequest,
    CombinedCheckResponse,
    ExactRequest,
    ExactResultModel,
    HealthResponse,
    IidRequest,
    RatioEstimateModel,
    SimulateRequest,
    SweepRequest,
    SweepResponse,
    SweepRowModel,
    TradeoffRequest,
)


def handle_bounds(req: BoundsRequest) -> BoundReportModel:
    return BoundReportModel.from_report(bound_report(req.n, req.h))


def handle_exact(req: ExactRequest) -> ExactResultModel:
    instance = make_instance(req.values, req.h)
    spec = parse_policy(req.algorithm, q_rounds=req.q_rounds)
    budget = req.budget if req.budget is not None else DEFAULT_BUDGET
    if req.model == "ros":
        result = exact_ros(instance, spec, budget)
    else:
        result = exact_aos(instance, spec, budget)
    return ExactResultModel.from_result(result)


def handle_simulate(req: SimulateRequest) -> RatioEstimateModel:
    instance = make_instance(req.values, req.h)
    spec = parse_policy(req.algorithm, q_rounds=req.q_rounds)
    order = None if req.order in (None, "random") else req.order
    est = run_trials(
        instance, spec, model=req.model, order=order, trials=req.trials, seed=req.seed
    )
    return RatioEstimateModel.from_estimate(est)


def handle_sweep(req: SweepRequest) -> SweepResponse:
    grid = HGrid(req.h_start, req.h_step, req.h_stop)
    rows = compute_sweep(
        req.n, grid, mc_trials=req.mc_trials, seed=req.seed, policy=req.policy,
        threads=req.threads,
    )
    return SweepResponse(rows=[SweepRowModel.from_row(r) for r in rows])


def handle_iid(req: IidRequest) -> RatioEstimateModel:
    dist = DistSpec(kind=req.dist.kind, rate=req.dist.rate, shape=req.dist.shape)
    spec = parse_policy(req.algorithm)
    est = iid_prophet_trials(dist, req.n, req.h, spec, trials=req.trials, seed=req.seed)
    return RatioEstimateModel.from_estimate(est)


def handle_tradeoff(req: TradeoffRequest) -> RatioEstimateModel:
    spec = parse_policy(req.algorithm)
    est = tradeoff_experiment(req.n, req.h, spec, req.epsilon, req.trials, req.seed)
    return RatioEstimateModel.from_estimate(est)


def handle_combined_check(req: CombinedCheckRequest) -> CombinedCheckResponse:
    ros, aos = combined_policy_check(req.n, req.trials, req.seed)
    return CombinedCheckResponse(
        ros=RatioEstimateModel.from_estimate(ros),
        aos=RatioEstimateModel.from_estimate(aos),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="sampled-secretary", version=__version__)

    @app.exception_handler(SecretaryError)
    async def domain_error(_request: Request, exc: SecretaryError) -> JSONResponse:
        code = "budget_exceeded" if isinstance(exc, BudgetExceededError) else "invalid_input"
        return JSONResponse(status_code=400, content={"detail": str(exc), "code": code})

    @app.exception_handler(ValueError)
    async def value_error(_request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc), "code": "invalid_input"})

    @app.get("/v1/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/v1/bounds", response_model=BoundReportModel)
    async def bounds_endpoint(req: BoundsRequest) -> BoundReportModel:
        return handle_bounds(req)

    @app.post("/v1/exact", response_model=ExactResultModel)
    async def exact_endpoint(req: ExactRequest) -> ExactResultModel:
        return handle_exact(req)

    @app.post("/v1/simulate", response_model=RatioEstimateModel)
    async def simulate_endpoint(req: SimulateRequest) -> RatioEstimateModel:
        return handle_simulate(req)

    @app.post("/v1/sweep", response_model=SweepResponse)
    async def sweep_endpoint(req: SweepRequest) -> SweepResponse:
        return handle_sweep(req)

    @app.post("/v1/iid", response_model=RatioEstimateModel)
    async def iid_endpoint(req: IidRequest) -> RatioEstimateModel:
        return handle_iid(req)

    @app.post("/v1/tradeoff", response_model=RatioEstimateModel)
    async def tradeoff_endpoint(req: TradeoffRequest) -> RatioEstimateModel:
        return handle_tradeoff(req)

    @app.post("/v1/combined-check", response_model=CombinedCheckResponse)
    async def combined_endpoint(req: CombinedCheckRequest) -> CombinedCheckResponse:
        return handle_combined_check(req)

    return app


app = create_app()
