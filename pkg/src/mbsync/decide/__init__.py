"""Decision procedures with witnesses."""

from .verdict import Budget, Verdict
from .reach import reachable, reachable_boundaries
from .sync import check_sync
from .properties import check_mbsim, check_r_closed, model_check
from .ksync import check_ksync, infer_k
from .bench import gen_benchmark

__all__ = [
    "Budget",
    "Verdict",
    "reachable",
    "reachable_boundaries",
    "check_sync",
    "check_mbsim",
    "check_r_closed",
    "model_check",
    "check_ksync",
    "infer_k",
    "gen_benchmark",
]
