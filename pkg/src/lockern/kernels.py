"""Kernel zoo over feature representations.

Implements the Grassmann projection-distance kernel, the Laplace and Gaussian
kernels on (U, Sigma) SVD features, the plain Euclidean RBF, the localized
Hermite kernel on flat vectors, Gram assembly, and the derived second-order
kernel Psi used by the theoretical least-squares normal equations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hermite import LocalizedKernelSpec, build_localized_kernel, eval_localized

__all__ = [
    "KernelSpec",
    "GramMatrix",
    "DiscreteQuadrature",
    "canonicalize_signs",
    "grassmann_kernel",
    "laplace_svd_kernel",
    "gaussian_svd_kernel",
    "euclidean_rbf",
    "localized_distance_kernel",
    "kernel_fn",
    "gram",
    "psi_kernel",
]

KERNEL_KINDS = ("grassmann", "laplace_svd", "gaussian_svd", "euclidean_rbf", "localized")

# Defaults from the experimental protocol this library reproduces.
DEFAULT_PARAMS = {
    "grassmann": {"gamma": 0.2},
    "laplace_svd": {"alpha": 0.2, "beta": 0.0042},
    "gaussian_svd": {"alpha": 0.2, "beta": 0.12},
    "euclidean_rbf": {"gamma": 2.1e-7},
    "localized": {"gamma": 0.8, "N": 4.0, "q": 2},
}


@dataclass(frozen=True)
class KernelSpec:
    """Which kernel to use, with its hyperparameters."""

    kind: str
    params: dict = field(default_factory=dict)
    _localized: LocalizedKernelSpec | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        merged = dict(DEFAULT_PARAMS[self.kind])
        merged.update(self.params)
        object.__setattr__(self, "params", merged)
        if self.kind == "localized" and self._localized is None:
            spec = build_localized_kernel(
                N=merged["N"], q=int(merged["q"]), gamma=merged["gamma"]
            )
            object.__setattr__(self, "_localized", spec)

    @property
    def localized(self) -> LocalizedKernelSpec:
        if self._localized is None:
            raise ValueError("not a localized kernel")
        return self._localized


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    spec: KernelSpec
    point_ids: list


@dataclass(frozen=True)
class DiscreteQuadrature:
    """Nodes, positive weights and density values realizing d(tau) = f_0 d(mu)."""

    nodes: list
    weights: np.ndarray
    density_f0: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        f0 = np.asarray(self.density_f0, dtype=float)
        if len(self.nodes) == 0:
            raise ValueError("quadrature must have at least one node")
        if np.any(w <= 0) or not np.isfinite(w.sum()):
            raise ValueError("weights must be positive and finite")
        if np.any(f0 <= 0):
            raise ValueError("density must be strictly positive at every node")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "density_f0", f0)


def canonicalize_signs(U: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive.

    SVD leaves per-column signs arbitrary; the Laplace/Gaussian SVD kernels
    use ||U1 - U2||_F, so a shared sign convention is required.
    """
    U = np.array(U, dtype=float)
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def _check_orthonormal(U: np.ndarray, tol: float = 1e-8) -> None:
    r = U.shape[1]
    err = np.linalg.norm(U.T @ U - np.eye(r))
    if err > tol:
        raise ValueError(f"columns not orthonormal (||U'U - I|| = {err:.2e})")


def grassmann_kernel(U1: np.ndarray, U2: np.ndarray, gamma: float = 0.2) -> float:
    """exp(-gamma (r - ||U1' U2||_F^2)), the projection-distance kernel."""
    U1 = np.asarray(U1, dtype=float)
    U2 = np.asarray(U2, dtype=float)
    if U1.shape != U2.shape:
        raise ValueError("basis shape mismatch")
    _check_orthonormal(U1)
    _check_orthonormal(U2)
    r = U1.shape[1]
    # squared projection distance; clamp round-off so identical subspaces
    # yield exactly 1
    d = r - float(np.linalg.norm(U1.T @ U2) ** 2)
    d = 0.0 if abs(d) < 1e-12 else max(d, 0.0)
    return math.exp(-gamma * d)


def laplace_svd_kernel(U1, S1, U2, S2, alpha: float = 0.2, beta: float = 0.0042) -> float:
    """exp(-alpha ||U1-U2||_F - beta ||S1-S2||_2) on SVD features."""
    U1, U2 = np.asarray(U1, float), np.asarray(U2, float)
    S1, S2 = np.asarray(S1, float), np.asarray(S2, float)
    if U1.shape != U2.shape or S1.shape != S2.shape:
        raise ValueError("feature shape mismatch")
    return math.exp(-alpha * np.linalg.norm(U1 - U2) - beta * np.linalg.norm(S1 - S2))


def gaussian_svd_kernel(U1, S1, U2, S2, alpha: float = 0.2, beta: float = 0.12) -> float:
    """exp(-alpha ||U1-U2||_F^2 - beta ||S1-S2||_2^2) on SVD features."""
    U1, U2 = np.asarray(U1, float), np.asarray(U2, float)
    S1, S2 = np.asarray(S1, float), np.asarray(S2, float)
    if U1.shape != U2.shape or S1.shape != S2.shape:
        raise ValueError("feature shape mismatch")
    return math.exp(
        -alpha * np.linalg.norm(U1 - U2) ** 2 - beta * np.linalg.norm(S1 - S2) ** 2
    )


def euclidean_rbf(x, y, gamma: float = 2.1e-7) -> float:
    x = np.asarray(x, float).ravel()
    y = np.asarray(y, float).ravel()
    if x.shape != y.shape:
        raise ValueError("vector length mismatch")
    return math.exp(-gamma * float(np.sum((x - y) ** 2)))


def localized_distance_kernel(spec: LocalizedKernelSpec, x, y) -> float:
    """Localized kernel on the scaled Euclidean distance gamma*||x - y||."""
    x = np.asarray(x, float).ravel()
    y = np.asarray(y, float).ravel()
    if x.shape != y.shape:
        raise ValueError("vector length mismatch")
    return float(eval_localized(spec, spec.gamma * np.linalg.norm(x - y)))


def kernel_fn(spec: KernelSpec):
    """Binary kernel callable for a KernelSpec, on the matching feature kind."""
    p = spec.params
    if spec.kind == "grassmann":
        return lambda a, b: grassmann_kernel(a.U, b.U, p["gamma"])
    if spec.kind == "laplace_svd":
        return lambda a, b: laplace_svd_kernel(a.U, a.S, b.U, b.S, p["alpha"], p["beta"])
    if spec.kind == "gaussian_svd":
        return lambda a, b: gaussian_svd_kernel(a.U, a.S, b.U, b.S, p["alpha"], p["beta"])
    if spec.kind == "euclidean_rbf":
        return lambda a, b: euclidean_rbf(a, b, p["gamma"])
    loc = spec.localized
    return lambda a, b: localized_distance_kernel(loc, a, b)


def gram(spec: KernelSpec, points: Sequence, point_ids=None) -> GramMatrix:
    """Symmetric Gram matrix; each off-diagonal entry computed once."""
    M = len(points)
    if M == 0:
        raise ValueError("no points")
    if spec.kind == "localized":
        # Flat-vector case vectorizes through the pairwise distance matrix.
        X = np.asarray([np.asarray(p, float).ravel() for p in points])
        sq = np.sum(X * X, axis=1)
        d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * X @ X.T, 0.0)
        dist = np.sqrt(d2)
        dist = 0.5 * (dist + dist.T)
        K = eval_localized(spec.localized, spec.params["gamma"] * dist)
        K = 0.5 * (K + K.T)
    else:
        k = kernel_fn(spec)
        K = np.empty((M, M))
        for i in range(M):
            for j in range(i, M):
                K[i, j] = K[j, i] = k(points[i], points[j])
    ids = list(point_ids) if point_ids is not None else list(range(M))
    return GramMatrix(entries=K, spec=spec, point_ids=ids)


def psi_kernel(spec: KernelSpec, quad: DiscreteQuadrature, x, y) -> float:
    """Discrete Psi(x, y) = sum_z w_z f0(z) k(x, z) k(y, z)."""
    k = kernel_fn(spec)
    kx = np.array([k(x, z) for z in quad.nodes])
    ky = np.array([k(y, z) for z in quad.nodes])
    return float(np.sum(quad.weights * quad.density_f0 * kx * ky))
