"""Synthetic data generators and the experiment harness: repeated stratified
splits, feature-dimension sweeps, training-fraction sweeps and
hold-one-subject-out evaluation.
"""
from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .classify import knn_predict, one_vs_rest_predict, one_vs_rest_train
from .features import (
    Spectrogram,
    fit_pca,
    log_threshold,
    normalize,
    pca_project,
    stft,
    svd_features,
    zero_pad_vectorize,
)
from .kernels import KernelSpec, gram, kernel_fn

__all__ = [
    "SyntheticManifoldSet",
    "SyntheticGestureSet",
    "ExperimentConfig",
    "ResultRow",
    "ResultTable",
    "gen_circle",
    "gen_synthetic_gestures",
    "run_experiment",
    "sweep_dimension",
    "sweep_train_fraction",
    "holdout_subject",
]

SUBJECT_NAMES = "ABCDEF"


@dataclass(frozen=True)
class SyntheticManifoldSet:
    ambient_dim: int
    points: np.ndarray  # M x Q
    angles: np.ndarray  # circle parameters of the noiseless points
    truth: np.ndarray
    noise_sigma: float


@dataclass(frozen=True)
class SyntheticGestureSet:
    samples: list  # of Spectrogram with label/subject set
    classes: int
    subjects: list


@dataclass(frozen=True)
class ExperimentConfig:
    preprocessing: str = "binary"  # binary | unit | magnitude
    feature: str = "pca"  # pca | svd
    r: int = 30
    kernel_kind: str = "localized"
    kernel_params: dict = field(default_factory=dict)
    classifier: str = "svm"  # svm | knn
    knn_k: int = 5
    C: float = 1.0
    train_ratio: float = 0.8
    trials: int = 5
    seed: int = 42

    def method_name(self) -> str:
        if self.feature == "pca":
            if self.classifier == "knn":
                return "PCA KNN"
            if self.kernel_kind == "localized":
                N = self.kernel_params.get("N", 8.0)
                return f"PCA LocSVM{2 * int(N * N / 2)}"
            return f"PCA {self.kernel_kind} SVM"
        return f"{self.kernel_kind} SVD {'KNN' if self.classifier == 'knn' else 'SVM'}"


@dataclass(frozen=True)
class ResultRow:
    method: str
    r: int
    accuracy_mean: float  # percent
    accuracy_var: float
    train_time_s: float
    test_time_s: float


@dataclass
class ResultTable:
    rows: list

    def write_csv(self, path, include_timing: bool = True, extra: dict | None = None) -> None:
        extra = extra or {}
        cols = list(extra) + ["method", "r", "accuracy_mean", "accuracy_var"]
        if include_timing:
            cols += ["train_time_s", "test_time_s"]
        with open(path, "w", newline="\n") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for row in self.rows:
                out = list(extra.values()) + [
                    row.method,
                    row.r,
                    repr(row.accuracy_mean),
                    repr(row.accuracy_var),
                ]
                if include_timing:
                    out += [repr(row.train_time_s), repr(row.test_time_s)]
                w.writerow(out)


def gen_circle(Q: int, M: int, noise_sigma: float = 0.0, seed: int = 42) -> SyntheticManifoldSet:
    """M equispaced points on a unit circle embedded in R^Q by a fixed random
    rotation, with optional isotropic noise; truth is sin(3 theta)."""
    if Q < 2 or M < 2:
        raise ValueError("need Q >= 2 and M >= 2")
    rng = np.random.default_rng(seed)
    theta = 2.0 * math.pi * np.arange(M) / M
    flat = np.zeros((M, Q))
    flat[:, 0] = np.cos(theta)
    flat[:, 1] = np.sin(theta)
    rot, _ = np.linalg.qr(rng.normal(size=(Q, Q)))
    pts = flat @ rot.T
    if noise_sigma > 0:
        pts = pts + rng.normal(scale=noise_sigma, size=pts.shape)
    return SyntheticManifoldSet(
        ambient_dim=Q,
        points=pts,
        angles=theta,
        truth=np.sin(3.0 * theta),
        noise_sigma=float(noise_sigma),
    )


# class templates: (duration frames, chirp rate, doppler offset, oscillation depth, pulses)
_GESTURE_TEMPLATES = {
    0: dict(duration=700, rate=8e-5, offset=0.10, osc=0.0, pulses=1),  # short up-chirp
    1: dict(duration=1600, rate=0.0, offset=0.18, osc=0.12, pulses=1),  # long oscillation
    2: dict(duration=1100, rate=0.0, offset=0.26, osc=0.0, pulses=2),  # double pulse
    3: dict(duration=900, rate=-8e-5, offset=0.34, osc=0.0, pulses=1),  # down-chirp
}


def _gesture_signal(template: dict, subject_factor: float, rng) -> np.ndarray:
    dur = int(template["duration"] * subject_factor * rng.uniform(0.85, 1.15))
    t = np.arange(dur, dtype=float)
    n_comp = rng.integers(2, 5)  # up to 4 scatterer components
    sig = np.zeros(dur, dtype=complex)
    for c in range(n_comp):
        rate = template["rate"] * subject_factor * rng.uniform(0.9, 1.1)
        offset = template["offset"] * subject_factor * rng.uniform(0.95, 1.05) + 0.01 * c
        osc = template["osc"] * rng.uniform(0.9, 1.1)
        phase = 2.0 * math.pi * (offset * t + 0.5 * rate * t * t)
        if osc > 0:
            phase = phase + 2.0 * math.pi * osc * dur / (2 * math.pi * 8) * np.sin(
                2.0 * math.pi * 8 * t / dur
            )
        amp = np.ones(dur)
        if template["pulses"] == 2:
            # two bursts separated by a quiet gap
            amp = np.where((t < dur * 0.35) | (t > dur * 0.6), 1.0, 0.05)
        sig = sig + (amp / (1 + c)) * np.exp(1j * phase)
    noise = rng.normal(scale=0.05, size=dur) + 1j * rng.normal(scale=0.05, size=dur)
    return sig + noise


def gen_synthetic_gestures(
    classes: int = 4,
    subjects: int = 6,
    per_cell: int = 10,
    seed: int = 42,
    fft_size: int = 64,
    hop: int = 32,
) -> SyntheticGestureSet:
    """Synthetic chirp-mixture gesture set: class-specific templates, subject-
    specific multiplicative perturbations, varying spectrogram widths."""
    if classes < 1 or subjects < 1 or per_cell < 1:
        raise ValueError("counts must be >= 1")
    if classes > len(_GESTURE_TEMPLATES):
        raise ValueError(f"at most {len(_GESTURE_TEMPLATES)} gesture classes available")
    rng = np.random.default_rng(seed)
    window = np.hanning(fft_size)
    samples = []
    subject_ids = [SUBJECT_NAMES[s] for s in range(subjects)]
    for label in range(classes):
        for s in range(subjects):
            factor = 1.0 + 0.06 * (s - (subjects - 1) / 2.0)
            for _ in range(per_cell):
                sig = _gesture_signal(_GESTURE_TEMPLATES[label], factor, rng)
                spec = stft(sig, window, hop=hop, fft_size=fft_size,
                            label=label, subject=subject_ids[s])
                samples.append(spec)
    return SyntheticGestureSet(samples=samples, classes=classes, subjects=subject_ids)


def _preprocess(spec: Spectrogram, mode: str) -> Spectrogram:
    if mode == "magnitude":
        return spec
    thresholded = log_threshold(spec)
    return normalize(thresholded, mode)


def _stratified_split(labels, train_ratio: float, rng):
    labels = np.asarray(labels)
    train_idx, test_idx = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        idx = idx[rng.permutation(len(idx))]
        n_train = int(round(train_ratio * len(idx)))
        n_train = min(max(n_train, 1), len(idx) - 1) if len(idx) > 1 else len(idx)
        train_idx.extend(idx[:n_train])
        test_idx.extend(idx[n_train:])
    return np.array(sorted(train_idx)), np.array(sorted(test_idx))


def _extract_features(config: ExperimentConfig, train_specs, test_specs, target_frames: int):
    """Fit-on-train feature extraction; returns per-sample feature lists."""
    if config.feature == "pca":
        train_mat = np.stack([zero_pad_vectorize(s, target_frames) for s in train_specs])
        basis = fit_pca(train_mat, config.r)
        train_f = [pca_project(basis, v) for v in train_mat]
        test_f = [pca_project(basis, zero_pad_vectorize(s, target_frames)) for s in test_specs]
        # put typical nearest-neighbor distances at the scale the localized
        # kernel's bump expects; the scale derives from the training fold only
        scale = _nn_scale(train_f)
        train_f = [v * scale for v in train_f]
        test_f = [v * scale for v in test_f]
        return train_f, test_f
    if config.feature == "svd":
        train_f = [svd_features(s, config.r) for s in train_specs]
        test_f = [svd_features(s, config.r) for s in test_specs]
        return train_f, test_f
    raise ValueError(f"unknown feature kind {config.feature!r}")


def _nn_scale(features) -> float:
    """1 / median nearest-neighbor distance of the training features."""
    X = np.stack(features)
    sq = np.sum(X * X, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * X @ X.T, 0.0)
    np.fill_diagonal(d2, np.inf)
    nn = np.sqrt(np.min(d2, axis=1))
    med = float(np.median(nn))
    # 0.4 places the median neighbor well inside the localized kernel's bump
    return 0.4 / med if med > 0 else 1.0


def _kernel_spec(config: ExperimentConfig) -> KernelSpec:
    params = dict(config.kernel_params)
    if config.kernel_kind == "localized":
        # manifold dimension never exceeds the feature-space dimension
        q = int(params.get("q", 18))
        params["q"] = max(1, min(q, config.r))
    return KernelSpec(kind=config.kernel_kind, params=params)


def _run_single_trial(config: ExperimentConfig, dataset: SyntheticGestureSet,
                      trial: int, train_pool=None):
    rng = np.random.default_rng(config.seed + trial)
    labels = [s.label for s in dataset.samples]
    pool = np.arange(len(dataset.samples)) if train_pool is None else np.asarray(train_pool)
    train_idx, test_idx = _stratified_split(np.asarray(labels)[pool], config.train_ratio, rng)
    train_idx, test_idx = pool[train_idx], pool[test_idx]
    return _fit_and_score(config, dataset, train_idx, test_idx)


def _fit_and_score(config: ExperimentConfig, dataset: SyntheticGestureSet, train_idx, test_idx):
    samples = dataset.samples
    target_frames = max(s.data.shape[1] for s in samples)
    train_specs = [_preprocess(samples[i], config.preprocessing) for i in train_idx]
    test_specs = [_preprocess(samples[i], config.preprocessing) for i in test_idx]
    train_labels = [samples[i].label for i in train_idx]
    test_labels = [samples[i].label for i in test_idx]
    if len(set(train_labels)) < dataset.classes:
        raise ValueError("a class is missing from the training fold")

    t0 = time.perf_counter()
    train_f, test_f = _extract_features(config, train_specs, test_specs, target_frames)

    if config.classifier == "svm":
        spec = _kernel_spec(config)
        G = gram(spec, train_f)
        model = one_vs_rest_train(G, train_labels, C=config.C)
        train_time = time.perf_counter() - t0
        t1 = time.perf_counter()
        k = kernel_fn(spec)
        preds = []
        for xf in test_f:
            row = np.array([k(xf, tf) for tf in train_f])
            preds.append(one_vs_rest_predict(model, row))
        test_time = time.perf_counter() - t1
    elif config.classifier == "knn":
        train_time = time.perf_counter() - t0
        t1 = time.perf_counter()
        metric = lambda a, b: float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
        preds = [
            knn_predict(train_f, train_labels, xf, config.knn_k, metric) for xf in test_f
        ]
        test_time = time.perf_counter() - t1
    else:
        raise ValueError(f"unknown classifier {config.classifier!r}")

    acc = 100.0 * float(np.mean(np.asarray(preds) == np.asarray(test_labels)))
    return acc, train_time, test_time


def run_experiment(config: ExperimentConfig, dataset: SyntheticGestureSet,
                   train_pool=None) -> ResultTable:
    """Mean/variance accuracy and wall-clock times over repeated stratified
    splits (one row)."""
    if config.trials < 1:
        raise ValueError("trials must be >= 1")
    accs, t_train, t_test = [], 0.0, 0.0
    for trial in range(config.trials):
        acc, tt, te = _run_single_trial(config, dataset, trial, train_pool=train_pool)
        accs.append(acc)
        t_train += tt
        t_test += te
    accs = np.array(accs)
    row = ResultRow(
        method=config.method_name(),
        r=config.r,
        accuracy_mean=float(accs.mean()),
        accuracy_var=float(accs.var()),
        train_time_s=t_train / config.trials,
        test_time_s=t_test / config.trials,
    )
    return ResultTable(rows=[row])


def sweep_dimension(config: ExperimentConfig, dataset: SyntheticGestureSet, r_values):
    """One ResultTable per feature dimension r; invalid r are skipped with a
    note row. The localized kernel's q is clamped to r inside the run."""
    out = []
    min_shape = min(min(s.data.shape) for s in dataset.samples)
    for r in r_values:
        if config.feature == "svd" and r > min_shape:
            out.append((r, None))
            continue
        try:
            out.append((r, run_experiment(replace(config, r=r), dataset)))
        except ValueError:
            out.append((r, None))
    return out


def sweep_train_fraction(config: ExperimentConfig, dataset: SyntheticGestureSet,
                         fractions=(0.2, 0.4, 0.6, 0.8)):
    """Per fraction: stratified subsample of the training pool, then the usual
    repeated-split protocol on that subsample."""
    labels = np.asarray([s.label for s in dataset.samples])
    out = []
    for frac in fractions:
        rng = np.random.default_rng(config.seed)
        pool, _ = _stratified_split(labels, frac, rng) if frac < 1.0 else (
            np.arange(len(labels)), np.array([], dtype=int))
        try:
            out.append((frac, run_experiment(config, dataset, train_pool=pool)))
        except ValueError:
            out.append((frac, None))
    return out


def holdout_subject(config: ExperimentConfig, dataset: SyntheticGestureSet) -> ResultTable:
    """Train on all subjects but one, test on the held-out subject; one row
    per fold. Features are refit per fold."""
    if len(dataset.subjects) < 2:
        raise ValueError("need at least two subjects")
    rows = []
    for subject in dataset.subjects:
        train_idx = np.array([i for i, s in enumerate(dataset.samples) if s.subject != subject])
        test_idx = np.array([i for i, s in enumerate(dataset.samples) if s.subject == subject])
        acc, tt, te = _fit_and_score(config, dataset, train_idx, test_idx)
        rows.append(
            ResultRow(
                method=f"{config.method_name()} holdout={subject}",
                r=config.r,
                accuracy_mean=acc,
                accuracy_var=0.0,
                train_time_s=tt,
                test_time_s=te,
            )
        )
    return ResultTable(rows=rows)
