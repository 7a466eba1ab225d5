"""Command-line client.

Every subcommand builds the same pydantic request the HTTP service accepts
and runs it in process; pass ``--server URL`` to post it to a running service
instead.  Exit codes: 0 success, 2 usage or invalid input, 3 enumeration
budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from pydantic import BaseModel, ValidationError

from .core import SecretaryError
from .oracle import BudgetExceededError
from .service.app import (
    handle_bounds,
    handle_combined_check,
    handle_exact,
    handle_iid,
    handle_simulate,
    handle_sweep,
    handle_tradeoff,
)
from .service.models import (
    BoundsRequest,
    CombinedCheckRequest,
    ExactRequest,
    IidRequest,
    RatioEstimateModel,
    SimulateRequest,
    SweepRequest,
    TradeoffRequest,
)
from .sweep import SweepRow, rows_to_csv

THREADS_ENV = "SAMPLED_SECRETARY_THREADS"

_ENDPOINTS = {
    "bounds": ("/v1/bounds", handle_bounds),
    "exact": ("/v1/exact", handle_exact),
    "simulate": ("/v1/simulate", handle_simulate),
    "sweep": ("/v1/sweep", handle_sweep),
    "iid": ("/v1/iid", handle_iid),
    "tradeoff": ("/v1/tradeoff", handle_tradeoff),
    "combined-check": ("/v1/combined-check", handle_combined_check),
}


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise ValueError(f"--values must be a comma-separated list of numbers, got {text!r}") from None


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sampled-secretary",
        description="Simulate, exactly evaluate, and bound-check online selection "
        "with a revealed random sample.",
    )
    parser.add_argument("--server", help="base URL of a running service; run remotely instead of in process")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, seed: bool = True) -> None:
        p.add_argument("--format", choices=["json", "csv"], default="json")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    def add_instance(p: argparse.ArgumentParser) -> None:
        p.add_argument("--values", help="comma-separated candidate values, e.g. 3,2,1")
        p.add_argument("--instance-json", help='instance as JSON {"values": [...], "h": k} (inline or a file path)')
        p.add_argument("--h", type=int, help="history sample size")

    p = sub.add_parser("bounds", help="closed-form bound report for one (n, h)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    add_common(p, seed=False)

    p = sub.add_parser("exact", help="exact expectations by full enumeration")
    add_instance(p)
    p.add_argument("--algorithm", default="alg3", choices=["alg1", "alg2", "alg3", "combined"])
    p.add_argument("--model", default="ros", choices=["ros", "aos"])
    p.add_argument("--q-rounds", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    add_common(p, seed=False)

    p = sub.add_parser("simulate", help="seeded Monte Carlo ratio estimate")
    add_instance(p)
    p.add_argument("--algorithm", default="alg3", choices=["alg1", "alg2", "alg3", "combined"])
    p.add_argument("--model", default="ros", choices=["ros", "aos"])
    p.add_argument("--order", default=None,
                   choices=["increasing-unseen", "eps-zero", "exhaustive", "random"])
    p.add_argument("--q-rounds", type=int, default=None)
    p.add_argument("--trials", type=int, default=100_000)
    add_common(p)

    p = sub.add_parser("sweep", help="bound curves over a grid of history sizes (CSV by default)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h-grid", required=True, help="start:step:end, e.g. 0:50:1500")
    p.add_argument("--mc-trials", type=int, default=None)
    p.add_argument("--policy", default="alg3", choices=["alg1", "alg2", "alg3", "combined"])
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("iid", help="trials with i.i.d. values and a training sample")
    p.add_argument("--dist", default="uniform01", choices=["uniform01", "exponential", "pareto"])
    p.add_argument("--rate", type=float, default=None)
    p.add_argument("--shape", type=float, default=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--algorithm", default="alg3", choices=["alg1", "alg2", "alg3", "combined"])
    p.add_argument("--trials", type=int, default=100_000)
    add_common(p)

    p = sub.add_parser("tradeoff", help="random-order ratio on the epsilon/zero trade-off instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--algorithm", default="alg2", choices=["alg1", "alg2", "alg3", "combined"])
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--trials", type=int, default=100_000)
    add_common(p)

    p = sub.add_parser("combined-check", help="both-models check of the pre-partitioned policy")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    add_common(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _instance_args(args: argparse.Namespace) -> tuple[list[float], int]:
    if args.instance_json:
        text = args.instance_json
        if os.path.exists(text):
            with open(text, "r", encoding="utf-8") as f:
                text = f.read()
        obj = json.loads(text)
        return [float(v) for v in obj["values"]], int(obj["h"])
    if args.values is None or args.h is None:
        raise ValueError("provide --values and --h (or --instance-json)")
    return _parse_values(args.values), args.h


def _build_request(args: argparse.Namespace) -> BaseModel:
    cmd = args.command
    if cmd == "bounds":
        return BoundsRequest(n=args.n, h=args.h)
    if cmd == "exact":
        values, h = _instance_args(args)
        return ExactRequest(values=values, h=h, algorithm=args.algorithm, model=args.model,
                            q_rounds=args.q_rounds, budget=args.budget)
    if cmd == "simulate":
        values, h = _instance_args(args)
        return SimulateRequest(values=values, h=h, algorithm=args.algorithm, model=args.model,
                               order=args.order, q_rounds=args.q_rounds, trials=args.trials,
                               seed=args.seed)
    if cmd == "sweep":
        from .sweep import HGrid

        grid = HGrid.parse(args.h_grid)
        threads = args.threads if args.threads is not None else _default_threads()
        return SweepRequest(n=args.n, h_start=grid.start, h_step=grid.step, h_stop=grid.stop,
                            mc_trials=args.mc_trials, seed=args.seed, policy=args.policy,
                            threads=threads)
    if cmd == "iid":
        return IidRequest(dist={"kind": args.dist, "rate": args.rate, "shape": args.shape},
                          n=args.n, h=args.h, algorithm=args.algorithm, trials=args.trials,
                          seed=args.seed)
    if cmd == "tradeoff":
        return TradeoffRequest(n=args.n, h=args.h, algorithm=args.algorithm,
                               epsilon=args.epsilon, trials=args.trials, seed=args.seed)
    if cmd == "combined-check":
        return CombinedCheckRequest(n=args.n, trials=args.trials, seed=args.seed)
    raise AssertionError(cmd)


def _run_remote(server: str, path: str, request: BaseModel) -> tuple[int, dict]:
    import httpx

    resp = httpx.post(server.rstrip("/") + path, json=request.model_dump(), timeout=600.0)
    return resp.status_code, resp.json()


def _csv_ratio(payload: dict) -> str:
    cols = ["mean_alg", "mean_opt", "ratio", "alg_std_err", "ratio_std_err", "trials", "seed"]
    return ",".join(cols) + "\n" + ",".join(format(payload[c], ".12g") for c in cols) + "\n"


def _render(command: str, payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2)
    if command == "bounds":
        cols = ["n", "h", "aos_lower", "aos_upper", "ros_lower", "ros_upper", "q", "q_rounds"]
        return ",".join(cols) + "\n" + ",".join(format(payload[c], ".12g") for c in cols) + "\n"
    if command in ("simulate", "iid", "tradeoff"):
        return _csv_ratio(payload)
    if command == "combined-check":
        out = "side," + "mean_alg,mean_opt,ratio,alg_std_err,ratio_std_err,trials,seed\n"
        for side in ("ros", "aos"):
            row = payload[side]
            out += side + "," + ",".join(
                format(row[c], ".12g")
                for c in ["mean_alg", "mean_opt", "ratio", "alg_std_err", "ratio_std_err", "trials", "seed"]
            ) + "\n"
        return out
    if command == "sweep":
        rows = [SweepRow(**r) for r in payload["rows"]]
        return rows_to_csv(rows)
    raise ValueError(f"--format csv is not supported for {command!r}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("sampled_secretary.service:app", host=args.host, port=args.port)
        return 0

    try:
        request = _build_request(args)
    except (ValueError, ValidationError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    path, handler = _ENDPOINTS[args.command]
    try:
        if args.server:
            status, payload = _run_remote(args.server, path, request)
            if status != 200:
                print(f"error: {payload.get('detail', payload)}", file=sys.stderr)
                return 3 if payload.get("code") == "budget_exceeded" else 2
        else:
            payload = handler(request).model_dump()
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SecretaryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    fmt = getattr(args, "format", "json")
    try:
        print(_render(args.command, payload, fmt))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
