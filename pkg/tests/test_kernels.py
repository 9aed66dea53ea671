import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lockern.features import SubspaceFeature
from lockern.hermite import build_localized_kernel
from lockern.kernels import (
    DiscreteQuadrature,
    KernelSpec,
    canonicalize_signs,
    euclidean_rbf,
    gaussian_svd_kernel,
    gram,
    grassmann_kernel,
    kernel_fn,
    laplace_svd_kernel,
    localized_distance_kernel,
    psi_kernel,
)


def random_orthonormal(p, r, rng):
    Q, _ = np.linalg.qr(rng.standard_normal((p, r)))
    return Q[:, :r]


class TestGrassmann:
    def test_identity_peak(self):
        rng = np.random.default_rng(0)
        U = random_orthonormal(6, 3, rng)
        assert grassmann_kernel(U, U, gamma=0.2) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_subspaces(self):
        U1 = np.eye(4)[:, :2]
        U2 = np.eye(4)[:, 2:]
        assert grassmann_kernel(U1, U2, gamma=0.5) == pytest.approx(math.exp(-0.5 * 2), abs=1e-12)

    def test_principal_angle_oracle(self):
        # r - ||U1'U2||_F^2 = sum_i sin^2(theta_i), theta_i from the SVD of U1'U2
        rng = np.random.default_rng(7)
        U1 = random_orthonormal(8, 3, rng)
        U2 = random_orthonormal(8, 3, rng)
        cosines = np.linalg.svd(U1.T @ U2, compute_uv=False)
        expect = math.exp(-0.2 * float(np.sum(1.0 - cosines**2)))
        assert grassmann_kernel(U1, U2, gamma=0.2) == pytest.approx(expect, rel=1e-12)

    def test_rotation_invariance(self):
        # the kernel depends only on the column span
        rng = np.random.default_rng(3)
        U1 = random_orthonormal(6, 3, rng)
        U2 = random_orthonormal(6, 3, rng)
        R, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        assert grassmann_kernel(U1 @ R, U2) == pytest.approx(grassmann_kernel(U1, U2), abs=1e-10)

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError):
            grassmann_kernel(np.ones((4, 2)), np.eye(4)[:, :2])


class TestSvdKernels:
    def test_laplace_sigma_only(self):
        U = np.eye(3)[:, :2]
        val = laplace_svd_kernel(U, [7.0, 2.0], U, [2.0, 2.0], alpha=0.2, beta=0.0042)
        assert val == pytest.approx(math.exp(-0.0042 * 5.0), rel=1e-12)

    def test_gaussian_sigma_only(self):
        U = np.eye(3)[:, :2]
        val = gaussian_svd_kernel(U, [3.0, 1.0], U, [2.0, 1.0], alpha=0.2, beta=0.12)
        assert val == pytest.approx(math.exp(-0.12), rel=1e-12)

    def test_gaussian_basis_term(self):
        U1 = np.eye(2)
        U2 = np.eye(2)[:, ::-1]
        # ||U1 - U2||_F^2 = 4
        val = gaussian_svd_kernel(U1, [1.0], U2, [1.0], alpha=0.06, beta=0.12)
        assert val == pytest.approx(math.exp(-0.24), rel=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            laplace_svd_kernel(np.eye(3), [1, 1, 1], np.eye(2), [1, 1])


class TestEuclideanRbf:
    def test_loop_oracle(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal(20)
        y = rng.standard_normal(20)
        sq = sum((a - b) ** 2 for a, b in zip(x, y))
        assert euclidean_rbf(x, y, gamma=0.03) == pytest.approx(math.exp(-0.03 * sq), rel=1e-12)

    def test_identity(self):
        assert euclidean_rbf([1.0, 2.0], [1.0, 2.0]) == 1.0


class TestLocalizedDistance:
    def test_gaussian_at_n1(self):
        # N=1 collapses to a pure Gaussian of the scaled distance
        spec = build_localized_kernel(1.0, 2, gamma=0.5)
        x = np.array([1.0, 0.0, 2.0])
        y = np.array([0.0, 2.0, 0.0])
        d = np.linalg.norm(x - y)
        v0 = localized_distance_kernel(spec, x, x)
        expect = v0 * math.exp(-((0.5 * d) ** 2) / 2.0)
        assert localized_distance_kernel(spec, x, y) == pytest.approx(expect, rel=1e-10)

    def test_symmetry(self):
        spec = build_localized_kernel(4.0, 2, gamma=0.8)
        rng = np.random.default_rng(5)
        for _ in range(100):
            x, y = rng.standard_normal(6), rng.standard_normal(6)
            assert localized_distance_kernel(spec, x, y) == localized_distance_kernel(spec, y, x)


class TestCanonicalizeSigns:
    def test_flips_negative_peak(self):
        U = np.array([[0.6, -0.8], [-0.8, -0.6]])
        out = canonicalize_signs(U)
        np.testing.assert_allclose(out, [[-0.6, 0.8], [0.8, 0.6]])

    def test_idempotent(self):
        rng = np.random.default_rng(9)
        U = random_orthonormal(5, 3, rng)
        once = canonicalize_signs(U)
        np.testing.assert_array_equal(canonicalize_signs(once), once)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=30, deadline=None)
    def test_sign_choice_is_invariant(self, seed):
        rng = np.random.default_rng(seed)
        U = random_orthonormal(6, 2, rng)
        flips = np.array([1.0, -1.0])
        np.testing.assert_allclose(canonicalize_signs(U * flips), canonicalize_signs(U))


class TestGram:
    def test_single_point(self):
        g = gram(KernelSpec("euclidean_rbf", {"gamma": 1.0}), [np.zeros(3)])
        assert g.entries.shape == (1, 1)
        assert g.entries[0, 0] == 1.0

    def test_duplicate_points(self):
        pts = [np.array([1.0, 2.0]), np.array([1.0, 2.0]), np.array([0.0, 0.0])]
        g = gram(KernelSpec("euclidean_rbf", {"gamma": 0.5}), pts)
        assert g.entries[0, 1] == pytest.approx(1.0)
        np.testing.assert_allclose(g.entries[0], g.entries[1])

    def test_matches_pairwise_callable(self):
        rng = np.random.default_rng(21)
        pts = [rng.standard_normal(4) for _ in range(12)]
        spec = KernelSpec("localized", {"N": 4.0, "q": 2, "gamma": 0.8})
        g = gram(spec, pts)
        k = kernel_fn(spec)
        expect = np.array([[k(a, b) for b in pts] for a in pts])
        np.testing.assert_allclose(g.entries, expect, atol=1e-10)

    def test_psd_rbf(self):
        rng = np.random.default_rng(2)
        pts = [rng.standard_normal(3) for _ in range(30)]
        g = gram(KernelSpec("euclidean_rbf", {"gamma": 0.3}), pts)
        eigs = np.linalg.eigvalsh(g.entries)
        assert eigs.min() > -1e-8

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            gram(KernelSpec("euclidean_rbf"), [])

    def test_grassmann_features(self):
        rng = np.random.default_rng(13)
        feats = [SubspaceFeature(U=random_orthonormal(6, 2, rng), S=np.ones(2)) for _ in range(5)]
        g = gram(KernelSpec("grassmann", {"gamma": 0.2}), feats)
        np.testing.assert_allclose(np.diag(g.entries), 1.0, atol=1e-12)
        np.testing.assert_allclose(g.entries, g.entries.T)


class TestKernelSpec:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            KernelSpec("fourier")

    def test_defaults_merged(self):
        spec = KernelSpec("laplace_svd", {"alpha": 0.5})
        assert spec.params["alpha"] == 0.5
        assert spec.params["beta"] == 0.0042

    def test_localized_property_guard(self):
        with pytest.raises(ValueError):
            _ = KernelSpec("grassmann").localized


class TestPsiKernel:
    def test_single_node_hand_sum(self):
        spec = KernelSpec("euclidean_rbf", {"gamma": 1.0})
        quad = DiscreteQuadrature(nodes=[np.array([0.0])], weights=[2.0], density_f0=[3.0])
        x, y = np.array([1.0]), np.array([2.0])
        expect = 2.0 * 3.0 * math.exp(-1.0) * math.exp(-4.0)
        assert psi_kernel(spec, quad, x, y) == pytest.approx(expect, rel=1e-12)

    def test_two_node_hand_sum(self):
        spec = KernelSpec("euclidean_rbf", {"gamma": 0.5})
        nodes = [np.array([0.0]), np.array([1.0])]
        quad = DiscreteQuadrature(nodes=nodes, weights=[1.0, 0.5], density_f0=[1.0, 2.0])
        x, y = np.array([0.5]), np.array([1.5])

        def k(a, b):
            return math.exp(-0.5 * (a - b) ** 2)

        expect = 1.0 * 1.0 * k(0.5, 0.0) * k(1.5, 0.0) + 0.5 * 2.0 * k(0.5, 1.0) * k(1.5, 1.0)
        assert psi_kernel(spec, quad, x, y) == pytest.approx(expect, rel=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(17)
        spec = KernelSpec("localized", {"N": 2.0, "q": 1, "gamma": 1.0})
        nodes = [rng.standard_normal(2) for _ in range(10)]
        quad = DiscreteQuadrature(nodes=nodes, weights=np.ones(10), density_f0=np.ones(10))
        x, y = rng.standard_normal(2), rng.standard_normal(2)
        assert psi_kernel(spec, quad, x, y) == pytest.approx(psi_kernel(spec, quad, y, x), rel=1e-12)

    def test_far_apart_points_vanish(self):
        # both factors inherit the localization of the base kernel
        spec = KernelSpec("localized", {"N": 4.0, "q": 2, "gamma": 1.0})
        nodes = [np.array([float(i), 0.0]) for i in range(-2, 3)]
        quad = DiscreteQuadrature(nodes=nodes, weights=np.ones(5), density_f0=np.ones(5))
        near = psi_kernel(spec, quad, np.zeros(2), np.zeros(2))
        far = psi_kernel(spec, quad, np.array([30.0, 0.0]), np.zeros(2))
        assert abs(far) < 1e-6 * abs(near)

    def test_quadrature_validation(self):
        with pytest.raises(ValueError):
            DiscreteQuadrature(nodes=[np.zeros(1)], weights=[-1.0], density_f0=[1.0])
        with pytest.raises(ValueError):
            DiscreteQuadrature(nodes=[np.zeros(1)], weights=[1.0], density_f0=[0.0])
        with pytest.raises(ValueError):
            DiscreteQuadrature(nodes=[], weights=[], density_f0=[])
