"""Longest increasing paths in the random subgraph Q^d_p of the hypercube."""

from .analysis import (
    expected_path_count,
    overlap_profile,
    second_moment_exact,
    subcritical_delta,
    survival_probability,
    yk_upper_bound,
)
from .edge_sampler import RandomSubgraph, derive_seed, restrict_to_subcube
from .hypercube import Subcube, Vertex
from .paths import count_antipodal_paths, longest_increasing_path

__version__ = "0.1.0"

__all__ = [
    "RandomSubgraph",
    "Subcube",
    "Vertex",
    "count_antipodal_paths",
    "derive_seed",
    "expected_path_count",
    "longest_increasing_path",
    "overlap_profile",
    "restrict_to_subcube",
    "second_moment_exact",
    "subcritical_delta",
    "survival_probability",
    "yk_upper_bound",
]
