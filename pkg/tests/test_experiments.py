import math

import numpy as np
import pytest

from lockern.experiments import (
    ExperimentConfig,
    gen_circle,
    gen_synthetic_gestures,
    holdout_subject,
    run_experiment,
    sweep_dimension,
    sweep_train_fraction,
    _extract_features,
    _preprocess,
    _stratified_split,
)


@pytest.fixture(scope="module")
def small_gestures():
    return gen_synthetic_gestures(per_cell=4, seed=42)


class TestGenCircle:
    def test_unit_norms(self):
        data = gen_circle(Q=5, M=16, noise_sigma=0.0, seed=0)
        np.testing.assert_allclose(np.linalg.norm(data.points, axis=1), 1.0, atol=1e-12)

    def test_antipodal_distance(self):
        data = gen_circle(Q=3, M=8, noise_sigma=0.0, seed=1)
        assert np.linalg.norm(data.points[0] - data.points[4]) == pytest.approx(2.0, abs=1e-12)

    def test_adjacent_chordal_distance(self):
        M = 20
        data = gen_circle(Q=4, M=M, noise_sigma=0.0, seed=2)
        d = np.linalg.norm(data.points[0] - data.points[1])
        assert d == pytest.approx(2.0 * math.sin(math.pi / M), rel=1e-12)

    def test_truth_values(self):
        data = gen_circle(Q=2, M=12, seed=3)
        np.testing.assert_allclose(data.truth, np.sin(3.0 * data.angles))

    def test_noise_perturbs(self):
        clean = gen_circle(Q=3, M=10, noise_sigma=0.0, seed=4)
        noisy = gen_circle(Q=3, M=10, noise_sigma=0.1, seed=4)
        assert np.max(np.abs(clean.points - noisy.points)) > 0.0

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            gen_circle(Q=1, M=10)
        with pytest.raises(ValueError):
            gen_circle(Q=2, M=1)


class TestGenGestures:
    def test_counts_and_metadata(self, small_gestures):
        ds = small_gestures
        assert len(ds.samples) == 4 * 6 * 4
        assert ds.classes == 4
        assert ds.subjects == list("ABCDEF")
        labels = {s.label for s in ds.samples}
        assert labels == {0, 1, 2, 3}
        for s in ds.samples:
            assert s.state == "magnitude"
            assert s.data.shape[0] == 64

    def test_widths_vary(self, small_gestures):
        widths = {s.data.shape[1] for s in small_gestures.samples}
        assert len(widths) > 5

    def test_classes_are_separated(self, small_gestures):
        # mean within-class feature distance below mean between-class distance
        from lockern.features import zero_pad_vectorize

        ds = small_gestures
        target = max(s.data.shape[1] for s in ds.samples)
        feats, labels = [], []
        for s in ds.samples[:: 4]:
            feats.append(zero_pad_vectorize(_preprocess(s, "binary"), target))
            labels.append(s.label)
        feats = np.stack(feats)
        labels = np.array(labels)
        within, between = [], []
        for i in range(len(feats)):
            for j in range(i + 1, len(feats)):
                d = np.linalg.norm(feats[i] - feats[j])
                (within if labels[i] == labels[j] else between).append(d)
        assert np.mean(within) < np.mean(between)

    def test_deterministic(self):
        a = gen_synthetic_gestures(per_cell=2, seed=7)
        b = gen_synthetic_gestures(per_cell=2, seed=7)
        for sa, sb in zip(a.samples, b.samples):
            np.testing.assert_array_equal(sa.data, sb.data)

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            gen_synthetic_gestures(classes=0)
        with pytest.raises(ValueError):
            gen_synthetic_gestures(classes=9)


class TestStratifiedSplit:
    def test_per_class_counts(self):
        labels = np.repeat([0, 1, 2], 10)
        rng = np.random.default_rng(0)
        train, test = _stratified_split(labels, 0.8, rng)
        assert len(train) == 24 and len(test) == 6
        for c in (0, 1, 2):
            assert np.sum(labels[train] == c) == 8
            assert np.sum(labels[test] == c) == 2

    def test_disjoint_cover(self):
        labels = np.repeat([0, 1], 7)
        rng = np.random.default_rng(1)
        train, test = _stratified_split(labels, 0.6, rng)
        assert set(train) & set(test) == set()
        assert sorted(list(train) + list(test)) == list(range(14))

    def test_keeps_one_test_sample(self):
        # rounding never empties either side of a multi-sample class
        labels = np.array([0, 0, 0, 1, 1, 1])
        rng = np.random.default_rng(2)
        train, test = _stratified_split(labels, 0.99, rng)
        for c in (0, 1):
            assert np.sum(labels[train] == c) >= 1
            assert np.sum(labels[test] == c) >= 1


class TestFeatureExtraction:
    def test_pca_fit_on_train_only(self, small_gestures):
        # identical training fold must give identical features regardless of
        # what is in the test fold
        ds = small_gestures
        config = ExperimentConfig(r=5)
        target = max(s.data.shape[1] for s in ds.samples)
        train = [_preprocess(s, "binary") for s in ds.samples[:40]]
        test_a = [_preprocess(s, "binary") for s in ds.samples[40:44]]
        test_b = [_preprocess(s, "binary") for s in ds.samples[60:70]]
        fa, _ = _extract_features(config, train, test_a, target)
        fb, _ = _extract_features(config, train, test_b, target)
        for va, vb in zip(fa, fb):
            np.testing.assert_array_equal(va, vb)

    def test_svd_feature_shape(self, small_gestures):
        config = ExperimentConfig(feature="svd", r=4)
        specs = [_preprocess(s, "binary") for s in small_gestures.samples[:6]]
        train_f, test_f = _extract_features(config, specs[:4], specs[4:], 100)
        assert all(f.U.shape == (64, 4) and f.S.shape == (4,) for f in train_f + test_f)

    def test_unknown_feature(self):
        with pytest.raises(ValueError):
            _extract_features(ExperimentConfig(feature="wavelet"), [], [], 10)


class TestRunExperiment:
    def test_knn_perfect_on_easy_data(self, small_gestures):
        config = ExperimentConfig(classifier="knn", knn_k=1, r=10, trials=1, seed=42)
        table = run_experiment(config, small_gestures)
        row = table.rows[0]
        assert row.method == "PCA KNN"
        assert row.accuracy_mean > 90.0
        assert row.accuracy_var == 0.0  # single trial
        assert row.train_time_s >= 0.0

    def test_localized_svm_runs(self, small_gestures):
        config = ExperimentConfig(
            kernel_kind="localized", kernel_params={"N": 8.0}, r=8, trials=1, seed=42
        )
        table = run_experiment(config, small_gestures)
        assert table.rows[0].method == "PCA LocSVM64"
        assert table.rows[0].accuracy_mean > 50.0

    def test_reproducible(self, small_gestures):
        config = ExperimentConfig(classifier="knn", knn_k=3, r=6, trials=2, seed=9)
        a = run_experiment(config, small_gestures).rows[0]
        b = run_experiment(config, small_gestures).rows[0]
        assert a.accuracy_mean == b.accuracy_mean
        assert a.accuracy_var == b.accuracy_var

    def test_trials_validated(self, small_gestures):
        with pytest.raises(ValueError):
            run_experiment(ExperimentConfig(trials=0), small_gestures)

    def test_method_names(self):
        assert ExperimentConfig(feature="pca", classifier="knn").method_name() == "PCA KNN"
        assert (
            ExperimentConfig(kernel_params={"N": 4.0}).method_name() == "PCA LocSVM16"
        )
        assert (
            ExperimentConfig(feature="svd", kernel_kind="grassmann").method_name()
            == "grassmann SVD SVM"
        )


class TestSweeps:
    def test_dimension_sweep_clamps_q(self, small_gestures):
        config = ExperimentConfig(
            kernel_kind="localized", kernel_params={"N": 4.0, "q": 18}, trials=1, seed=42
        )
        out = sweep_dimension(config, small_gestures, [2, 6])
        assert [r for r, _ in out] == [2, 6]
        for _, table in out:
            assert table is not None
            assert table.rows[0].accuracy_mean >= 25.0

    def test_dimension_sweep_skips_invalid_svd_rank(self, small_gestures):
        config = ExperimentConfig(feature="svd", kernel_kind="grassmann", trials=1, seed=42)
        out = sweep_dimension(config, small_gestures, [2, 10_000])
        assert out[0][1] is not None
        assert out[1][1] is None

    def test_fraction_one_matches_plain_run(self, small_gestures):
        config = ExperimentConfig(classifier="knn", knn_k=1, r=6, trials=1, seed=42)
        out = sweep_train_fraction(config, small_gestures, fractions=(1.0,))
        plain = run_experiment(config, small_gestures)
        assert out[0][1].rows[0].accuracy_mean == plain.rows[0].accuracy_mean

    def test_fraction_sweep_shrinks_pool(self, small_gestures):
        config = ExperimentConfig(classifier="knn", knn_k=1, r=6, trials=1, seed=42)
        out = sweep_train_fraction(config, small_gestures, fractions=(0.3, 1.0))
        assert all(table is not None for _, table in out)


class TestHoldout:
    def test_one_row_per_subject(self, small_gestures):
        config = ExperimentConfig(classifier="knn", knn_k=1, r=6, seed=42)
        table = holdout_subject(config, small_gestures)
        assert len(table.rows) == 6
        for subject, row in zip("ABCDEF", table.rows):
            assert row.method.endswith(f"holdout={subject}")
            assert 0.0 <= row.accuracy_mean <= 100.0

    def test_needs_two_subjects(self):
        ds = gen_synthetic_gestures(per_cell=2, subjects=1, seed=0)
        with pytest.raises(ValueError):
            holdout_subject(ExperimentConfig(), ds)
