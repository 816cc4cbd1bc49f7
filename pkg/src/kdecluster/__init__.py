"""Density-based first-split clustering from kernel density level sets."""

from kdecluster.kernels import (
    EUCLIDEAN,
    SUPREMUM,
    Kernel,
    eval_scaled,
    make_kernel,
    tail_kappa1,
    tail_kappa_inf,
)

__all__ = [
    "EUCLIDEAN",
    "SUPREMUM",
    "Kernel",
    "eval_scaled",
    "make_kernel",
    "tail_kappa1",
    "tail_kappa_inf",
]

__version__ = "0.1.0"
