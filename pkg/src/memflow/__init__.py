"""Entropy decay for Ornstein-Uhlenbeck diffusion with memory kernels."""

from memflow import _backend
from memflow.kernels import (
    KernelSpec,
    Tail,
    audit_admissibility,
    eval_kernel,
    eval_kernel_derivative,
    exponential,
    l1_norm,
    laplace_transform,
    parse_kernel,
    powerlaw,
    stretched,
    tabulated,
    zero,
)
from memflow.volterra import (
    RelaxationCurve,
    ResolventCurve,
    TimeGrid,
    closed_form_exponential,
    convolve,
    empirical_order,
    solve_relaxation,
    solve_resolvent,
    tail_slopes,
    verify_duhamel,
    verify_laplace_identity,
)

__version__ = "0.1.0"
BACKEND = _backend.NAME
