"""Random transposition walk on S_n with a coupled random multigraph.

The package simulates the uniform random transposition walk started at the
identity, maintains its cycle structure incrementally, couples it edge-for-edge
to an evolving Erdos-Renyi multigraph, and checks the sub/critical/supercritical
limit laws for fragmentation counts, Cayley distance, and large-cycle mass.
A signed-genome module provides the breakpoint-graph parsimony bound and a
reversal walk driven by the same random pairs, and a small queueing module
covers the birth-death approximation used for fragments of large cycles.
"""

from cyclewalk.theory import (
    alpha,
    borel_inf,
    borel_pmf,
    cluster_tail_bound,
    expected_tree_count,
    g_components,
    kappa,
    lambda_asymptotic,
    phi_factorial,
    rho,
    sigma_clt,
    theta,
    u_distance,
)
from cyclewalk.permcycle import DynamicPermutation, TranspositionEffect
from cyclewalk.graphcouple import EvolvingMultigraph
from cyclewalk.walk import WalkConfig, run

__version__ = "0.1.0"

__all__ = [
    "DynamicPermutation",
    "EvolvingMultigraph",
    "TranspositionEffect",
    "WalkConfig",
    "alpha",
    "borel_inf",
    "borel_pmf",
    "cluster_tail_bound",
    "expected_tree_count",
    "g_components",
    "kappa",
    "lambda_asymptotic",
    "phi_factorial",
    "rho",
    "run",
    "sigma_clt",
    "theta",
    "u_distance",
    "__version__",
]
