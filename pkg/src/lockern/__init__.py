"""Localized Hermite kernels for scattered-data approximation on unknown
manifolds, with feature pipelines and kernel classifiers for micro-Doppler
style gesture recognition."""

from .hermite import (
    LocalizedKernelSpec,
    build_localized_kernel,
    eval_localized,
    eval_localized_direct,
)
from .kernels import KernelSpec, gram

__all__ = [
    "LocalizedKernelSpec",
    "build_localized_kernel",
    "eval_localized",
    "eval_localized_direct",
    "KernelSpec",
    "gram",
]
