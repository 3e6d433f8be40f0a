"""A priori TSP algorithms, exact evaluators and LP bound certificates."""

import json as _json

from ._core import (
    BudgetExceeded,
    Instance,
    InvalidInput,
    NumericalFailure,
    expected_cost,
    expected_cost_bruteforce,
    expected_cost_mc,
    lb_row,
    mrr_bound,
    mrr_lb_ratio,
    optimal_apriori_cost,
    run_cli,
    sampling_bound,
    solve,
    tsp,
    verify_certificate,
)

__all__ = [
    "BudgetExceeded",
    "Instance",
    "InvalidInput",
    "NumericalFailure",
    "cli_json",
    "expected_cost",
    "expected_cost_bruteforce",
    "expected_cost_mc",
    "lb_row",
    "mrr_bound",
    "mrr_lb_ratio",
    "optimal_apriori_cost",
    "run_cli",
    "sampling_bound",
    "solve",
    "tsp",
    "verify_certificate",
]


def cli_json(*args):
    """Run a CLI subcommand in-process and return (exit_code, parsed_json_or_None)."""
    code, out, _ = run_cli([str(a) for a in args])
    return code, (_json.loads(out) if out.strip() else None)
