"""Bernstein-type tail bounds for finite Markov chains."""

from ._core import (
    Chain,
    Error,
    chernoff_bound,
    classical_bound,
    combinatorial_weight,
    conjugates,
    lp_perturbed_norm,
    lp_scaled_variance,
    mgf_bound,
    proxy_table,
    run_command,
    tail_bound,
)

__all__ = [
    "Chain",
    "Error",
    "chernoff_bound",
    "classical_bound",
    "combinatorial_weight",
    "conjugates",
    "lp_perturbed_norm",
    "lp_scaled_variance",
    "mgf_bound",
    "proxy_table",
    "run_command",
    "tail_bound",
]
