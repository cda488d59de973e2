"""Fully nonlinear operators on constant-curvature model manifolds.

Thin Python surface over the C++ core: closed-form geometry, the operator
catalog, structural condition checks, barrier certification and the discrete
maximum-principle testbed.
"""

from curvops._core import (
    Kernel,
    Manifold,
    catalog,
    certify_barrier,
    check_kernel,
    condition_matrix,
    eigenvalues,
    kernel,
    smp_spike,
    solve_dirichlet,
)

__all__ = [
    "Kernel",
    "Manifold",
    "catalog",
    "certify_barrier",
    "check_kernel",
    "condition_matrix",
    "eigenvalues",
    "kernel",
    "smp_spike",
    "solve_dirichlet",
]

__version__ = "0.1.0"
