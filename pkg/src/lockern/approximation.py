"""Empirical-risk and theoretical least-squares minimizers over the span of
kernel translates, plus the diagnostics (minimal separation, diagonal
dominance, pointwise error profiles) used to verify the pointwise error
behavior numerically.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .kernels import DiscreteQuadrature, KernelSpec, gram, kernel_fn, psi_kernel

__all__ = [
    "CollocationModel",
    "ErrorProfile",
    "euclidean_metric",
    "minimal_separation",
    "dominance_diagnostic",
    "fit_empirical",
    "fit_theoretical",
    "sigma_n",
    "evaluate",
    "error_profile",
]

COND_LIMIT = 1e12


def euclidean_metric(x, y) -> float:
    return float(np.linalg.norm(np.asarray(x, float).ravel() - np.asarray(y, float).ravel()))


@dataclass(frozen=True)
class CollocationModel:
    nodes: list
    coeffs: np.ndarray
    spec: KernelSpec
    eta: float  # minimal separation of the node set
    dominance_ratio: float


@dataclass(frozen=True)
class ErrorProfile:
    probe_points: list
    delta: np.ndarray  # distance to nearest node
    abs_error: np.ndarray
    model_value: np.ndarray

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["delta", "abs_error", "model_value"])
            for d, e, v in zip(self.delta, self.abs_error, self.model_value):
                w.writerow([repr(float(d)), repr(float(e)), repr(float(v))])


def minimal_separation(points, metric=euclidean_metric) -> float:
    """Smallest pairwise distance; brute-force pair scan."""
    if len(points) < 2:
        raise ValueError("need at least two points")
    best = np.inf
    for j in range(len(points)):
        for k in range(j + 1, len(points)):
            best = min(best, metric(points[j], points[k]))
    return float(best)


def _collocation_matrix(spec: KernelSpec, nodes) -> np.ndarray:
    return gram(spec, list(nodes)).entries


def dominance_diagnostic(spec: KernelSpec, nodes) -> float:
    """max_k sum_{j != k} |K(y_j, y_k)| / K(y_k, y_k); below 1/2 certifies
    strict diagonal dominance of the collocation system."""
    if len(nodes) < 2:
        raise ValueError("need at least two nodes")
    K = _collocation_matrix(spec, nodes)
    diag = np.diag(K)
    if np.any(diag == 0):
        raise ValueError("zero diagonal kernel value")
    off = np.sum(np.abs(K), axis=0) - np.abs(diag)
    return float(np.max(off / np.abs(diag)))


def fit_empirical(spec: KernelSpec, nodes, values) -> CollocationModel:
    """Interpolatory fit: solve sum_k a_k K(y_j, y_k) = f_j directly."""
    nodes = list(nodes)
    values = np.asarray(values, dtype=float)
    if len(nodes) != len(values):
        raise ValueError("nodes/values length mismatch")
    K = _collocation_matrix(spec, nodes)
    cond = np.linalg.cond(K)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ValueError(
            f"collocation matrix condition {cond:.2e} exceeds {COND_LIMIT:.0e}; "
            "increase the kernel bandwidth N or spread the nodes further apart"
        )
    coeffs = np.linalg.solve(K, values)
    eta = minimal_separation(nodes) if len(nodes) > 1 else np.inf
    ratio = dominance_diagnostic(spec, nodes) if len(nodes) > 1 else 0.0
    return CollocationModel(nodes=nodes, coeffs=coeffs, spec=spec, eta=eta, dominance_ratio=ratio)


def sigma_n(spec: KernelSpec, f_values, quad: DiscreteQuadrature, x) -> float:
    """Discretized kernel smoothing operator: sum_z w_z f(z) K(x, z)."""
    f_values = np.asarray(f_values, dtype=float)
    if len(f_values) != len(quad.nodes):
        raise ValueError("f values must align with quadrature nodes")
    k = kernel_fn(spec)
    kx = np.array([k(x, z) for z in quad.nodes])
    return float(np.sum(quad.weights * f_values * kx))


def fit_theoretical(spec: KernelSpec, nodes, f_values, quad: DiscreteQuadrature) -> CollocationModel:
    """Solve the normal equations of the least-squares problem in the span of
    kernel translates:  sum_l a_l Psi(y_l, y_j) = smoothing of f * f0 at y_j,
    with both sides realized on the same quadrature.
    """
    nodes = list(nodes)
    f_values = np.asarray(f_values, dtype=float)
    if len(f_values) != len(quad.nodes):
        raise ValueError("f values must align with quadrature nodes")
    M = len(nodes)
    P = np.empty((M, M))
    for j in range(M):
        for l in range(j, M):
            P[j, l] = P[l, j] = psi_kernel(spec, quad, nodes[l], nodes[j])
    rhs = np.array([sigma_n(spec, f_values * quad.density_f0, quad, y) for y in nodes])
    cond = np.linalg.cond(P)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ValueError(f"normal-equation matrix condition {cond:.2e} exceeds {COND_LIMIT:.0e}")
    coeffs = np.linalg.solve(P, rhs)
    eta = minimal_separation(nodes) if M > 1 else np.inf
    ratio = dominance_diagnostic(spec, nodes) if M > 1 else 0.0
    return CollocationModel(nodes=nodes, coeffs=coeffs, spec=spec, eta=eta, dominance_ratio=ratio)


def evaluate(model: CollocationModel, x) -> float:
    k = kernel_fn(model.spec)
    return float(sum(a * k(x, y) for a, y in zip(model.coeffs, model.nodes)))


def error_profile(model: CollocationModel, truth, probes, metric=euclidean_metric) -> ErrorProfile:
    """Per-probe distance to the nearest node, absolute error against the
    truth values, and raw model value, sorted by that distance."""
    truth = np.asarray(truth, dtype=float)
    if len(probes) == 0:
        raise ValueError("no probes")
    delta = np.array([min(metric(x, y) for y in model.nodes) for x in probes])
    vals = np.array([evaluate(model, x) for x in probes])
    err = np.abs(vals - truth)
    order = np.argsort(delta, kind="stable")
    return ErrorProfile(
        probe_points=[probes[i] for i in order],
        delta=delta[order],
        abs_error=err[order],
        model_value=vals[order],
    )
