"""Online selection with a revealed random sample: simulation, exact
evaluation, and bound checking for the adversarial-order and random-order
games."""

__version__ = "0.1.0"

from .core import (
    ArrivalOrder,
    Candidate,
    Instance,
    RandomStream,
    SecretaryError,
    SplitSample,
    TrialOutcome,
    instance_from_json,
    instance_to_json,
    make_instance,
    opt_value,
    sample_order,
    sample_split,
)
from .policies import PolicyKind, PolicySpec, parse_policy, run_policy

__all__ = [
    "__version__",
    "ArrivalOrder",
    "Candidate",
    "Instance",
    "RandomStream",
    "SecretaryError",
    "SplitSample",
    "TrialOutcome",
    "instance_from_json",
    "instance_to_json",
    "make_instance",
    "opt_value",
    "sample_order",
    "sample_split",
    "PolicyKind",
    "PolicySpec",
    "parse_policy",
    "run_policy",
]
