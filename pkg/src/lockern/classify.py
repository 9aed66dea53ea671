"""Kernel classifiers: soft-margin SVM trained by pairwise dual decomposition
with greedy most-violating-pair selection, a one-vs-rest multiclass wrapper,
and a deterministic k-nearest-neighbor vote.
"""
from __future__ import annotations

import ast
import warnings
from dataclasses import dataclass

import numpy as np

from .kernels import GramMatrix, KernelSpec

__all__ = [
    "SvmModel",
    "MulticlassModel",
    "label_indicators",
    "svm_train_binary",
    "svm_predict",
    "one_vs_rest_train",
    "one_vs_rest_predict",
    "knn_predict",
    "dump_model",
    "load_model",
]

KKT_TOL = 1e-3
MAX_PAIR_UPDATES = 10**6


@dataclass(frozen=True)
class SvmModel:
    support_coeffs: np.ndarray  # alpha_i * y_i for support vectors
    support_ids: np.ndarray  # indices into the training set
    bias: float
    spec: KernelSpec | None
    C: float


@dataclass(frozen=True)
class MulticlassModel:
    models: list  # one binary SvmModel per class, one-vs-rest
    classes: list


def label_indicators(labels, classes=None):
    """Signed class-membership targets: row c is +1 where the label equals
    classes[c] and -1 elsewhere. Returns (classes, indicator matrix)."""
    labels = np.asarray(labels)
    if classes is None:
        classes = sorted(np.unique(labels).tolist())
    elif not set(np.unique(labels).tolist()) <= set(classes):
        raise ValueError("labels contain classes outside the given list")
    signs = np.where(labels[None, :] == np.asarray(classes)[:, None], 1.0, -1.0)
    return list(classes), signs


def svm_train_binary(gram: GramMatrix | np.ndarray, labels, C: float = 1.0) -> SvmModel:
    """Solve the soft-margin dual on a precomputed Gram matrix.

    Greedy maximal-KKT-violating-pair updates until the violation gap drops
    below KKT_TOL or the pair-update cap is hit; deterministic (no RNG).
    """
    K = gram.entries if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=float)
    spec = gram.spec if isinstance(gram, GramMatrix) else None
    y = np.asarray(labels, dtype=float)
    M = len(y)
    if K.shape != (M, M):
        raise ValueError("gram/label size mismatch")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be in {-1, +1}")
    if len(np.unique(y)) < 2:
        raise ValueError("need at least one sample of each class")
    if C <= 0:
        raise ValueError("C must be positive")

    eigmin = np.linalg.eigvalsh(K)[0]
    if eigmin < -1e-3 * np.trace(K) / M:
        warnings.warn(f"Gram matrix is noticeably indefinite (min eig {eigmin:.3e})")

    alpha = np.zeros(M)
    grad = -np.ones(M)  # gradient of the dual objective 1/2 a'Qa - 1'a
    Q = K * np.outer(y, y)
    tau = 1e-12
    for _ in range(MAX_PAIR_UPDATES):
        yg = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        i = int(np.flatnonzero(up)[np.argmax(yg[up])])
        j = int(np.flatnonzero(low)[np.argmin(yg[low])])
        if yg[i] - yg[j] < KKT_TOL:
            break
        # curvature along the feasible pair direction (da_i, da_j) = (y_i, -y_j)t
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta <= 0:
            eta = tau
        step = (yg[i] - yg[j]) / eta
        # move alpha_i up and alpha_j down along the equality constraint
        max_i = C - alpha[i] if y[i] > 0 else alpha[i]
        max_j = alpha[j] if y[j] > 0 else C - alpha[j]
        step = min(step, max_i, max_j)
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        grad += step * (Q[:, i] * y[i] - Q[:, j] * y[j]) * 1.0
    yg = -y * grad
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    hi = np.max(yg[up]) if up.any() else 0.0
    lo = np.min(yg[low]) if low.any() else 0.0
    bias = (hi + lo) / 2.0  # yg equals the bias at free support vectors

    sv = np.flatnonzero(alpha > 1e-12)
    return SvmModel(
        support_coeffs=alpha[sv] * y[sv],
        support_ids=sv,
        bias=float(bias),
        spec=spec,
        C=float(C),
    )


def svm_predict(model: SvmModel, gram_row) -> float:
    """Decision value for one sample given its kernel values vs. the support
    set (ordered as model.support_ids)."""
    gram_row = np.asarray(gram_row, dtype=float)
    if gram_row.shape != model.support_coeffs.shape:
        raise ValueError("kernel row length must match support set")
    return float(np.dot(model.support_coeffs, gram_row) + model.bias)


def one_vs_rest_train(gram: GramMatrix | np.ndarray, labels, C: float = 1.0) -> MulticlassModel:
    classes, signs = label_indicators(labels)
    if len(classes) < 2:
        raise ValueError("need at least two classes")
    models = [svm_train_binary(gram, y, C) for y in signs]
    return MulticlassModel(models=models, classes=classes)


def one_vs_rest_predict(mc: MulticlassModel, kernel_row: np.ndarray):
    """Predict from a full kernel row vs. the training set (length M).

    Highest decision value wins; ties break to the lowest class index.
    """
    kernel_row = np.asarray(kernel_row, dtype=float)
    scores = [svm_predict(m, kernel_row[m.support_ids]) for m in mc.models]
    return mc.classes[int(np.argmax(scores))]


def knn_predict(train_features, train_labels, x, k: int, metric):
    """Majority vote among the k nearest training points.

    Ties break by smaller mean distance among tied classes, then by lowest
    label; fully deterministic.
    """
    if len(train_features) == 0:
        raise ValueError("empty training set")
    if k < 1 or k > len(train_features):
        raise ValueError("k out of range")
    dists = np.array([metric(x, f) for f in train_features])
    order = np.argsort(dists, kind="stable")[:k]
    votes = {}
    for idx in order:
        lab = train_labels[idx]
        cnt, dsum = votes.get(lab, (0, 0.0))
        votes[lab] = (cnt + 1, dsum + dists[idx])
    ranked = sorted(votes.items(), key=lambda kv: (-kv[1][0], kv[1][1] / kv[1][0], str(kv[0])))
    return ranked[0][0]


def dump_model(model: SvmModel, path) -> None:
    """Plain-text dump: header lines, then one `index,coefficient` line per
    support vector."""
    with open(path, "w") as fh:
        kind = model.spec.kind if model.spec is not None else "none"
        params = model.spec.params if model.spec is not None else {}
        fh.write(f"kernel={kind}\n")
        fh.write("params=" + ",".join(f"{k}:{v!r}" for k, v in sorted(params.items())) + "\n")
        fh.write(f"C={model.C!r}\n")
        fh.write(f"bias={model.bias!r}\n")
        for idx, coef in zip(model.support_ids, model.support_coeffs):
            fh.write(f"{int(idx)},{float(coef)!r}\n")


def load_model(path) -> SvmModel:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    header = dict(ln.split("=", 1) for ln in lines[:4])
    kind = header["kernel"]
    spec = None
    if kind != "none":
        params = {}
        if header["params"]:
            for item in header["params"].split(","):
                k, v = item.split(":", 1)
                params[k] = ast.literal_eval(v)
        spec = KernelSpec(kind=kind, params=params)
    ids, coeffs = [], []
    for ln in lines[4:]:
        if not ln:
            continue
        i, c = ln.split(",")
        ids.append(int(i))
        coeffs.append(float(c))
    return SvmModel(
        support_coeffs=np.array(coeffs),
        support_ids=np.array(ids, dtype=int),
        bias=float(header["bias"]),
        spec=spec,
        C=float(header["C"]),
    )
