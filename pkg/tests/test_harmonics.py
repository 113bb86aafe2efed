import math

import numpy as np
import pytest

from valgeo._harmonics import (
    even_harmonic_blocks,
    gegenbauer_normalized,
    harmonic_dimension,
    kernel_mean_quadrature,
    monomial_exponents,
    sphere_moment,
    sphere_quadrature,
)
from valgeo.errors import ScopeError


class TestMoments:
    def test_odd_vanishes(self):
        assert sphere_moment(np.array([1, 2, 0]), 3) == 0.0

    def test_second_moment(self):
        for n in (3, 4, 7):
            gamma = np.zeros(n, dtype=int)
            gamma[0] = 2
            assert sphere_moment(gamma, n) == pytest.approx(1.0 / n, rel=1e-14)

    def test_fourth_moments(self):
        # E[x1^4] = 3/(n(n+2)), E[x1^2 x2^2] = 1/(n(n+2)).
        n = 4
        g4 = np.array([4, 0, 0, 0])
        g22 = np.array([2, 2, 0, 0])
        assert sphere_moment(g4, n) == pytest.approx(3 / (n * (n + 2)), rel=1e-14)
        assert sphere_moment(g22, n) == pytest.approx(1 / (n * (n + 2)), rel=1e-14)

    def test_monomial_count(self):
        assert len(monomial_exponents(3, 4)) == math.comb(4 + 2, 2)


class TestSphereQuadrature:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_polynomial_exactness(self, n):
        nodes, weights = sphere_quadrature(n, 10)
        assert weights.sum() == pytest.approx(1.0, rel=1e-12)
        rng = np.random.default_rng(5)
        for _ in range(10):
            gamma = rng.integers(0, 5, size=n)
            if gamma.sum() > 10:
                continue
            quad = float(weights @ np.prod(nodes ** gamma, axis=1))
            assert quad == pytest.approx(sphere_moment(gamma, n), abs=1e-12)

    def test_nodes_on_sphere(self):
        nodes, _ = sphere_quadrature(4, 8)
        assert np.abs(np.linalg.norm(nodes, axis=1) - 1.0).max() < 1e-12

    def test_antipodal_symmetry(self):
        nodes, weights = sphere_quadrature(3, 8)
        odd = float(weights @ nodes[:, 0] ** 3)
        assert abs(odd) < 1e-14


class TestHarmonicBasis:
    @pytest.mark.parametrize("n", [3, 4])
    def test_block_dimensions(self, n):
        basis = even_harmonic_blocks(n, 8)
        for block in basis.blocks:
            assert block.size == harmonic_dimension(n, block.degree)

    def test_degree_zero_constant(self):
        basis = even_harmonic_blocks(3, 4)
        pts = sphere_quadrature(3, 4)[0]
        vals = basis.blocks[0].eval_points(pts)
        assert np.allclose(vals, 1.0)

    @pytest.mark.parametrize("n", [3, 4])
    def test_orthonormal_by_quadrature(self, n):
        # Independent oracle: numerical integration over the sphere.
        basis = even_harmonic_blocks(n, 6)
        nodes, weights = sphere_quadrature(n, 14)
        y = basis.eval_points(nodes)
        gram = (y * weights[:, None]).T @ y
        assert np.abs(gram - np.eye(basis.size)).max() < 1e-8

    def test_even_parity(self):
        basis = even_harmonic_blocks(3, 8)
        pts = np.random.default_rng(6).normal(size=(20, 3))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        assert np.allclose(basis.eval_points(pts), basis.eval_points(-pts))

    def test_scope_errors(self):
        with pytest.raises(ScopeError):
            even_harmonic_blocks(5, 4)
        with pytest.raises(ScopeError):
            even_harmonic_blocks(3, 7)
        with pytest.raises(ScopeError):
            even_harmonic_blocks(3, 14)

    def test_harmonicity(self):
        # Laplacian of each degree-4 basis polynomial vanishes at random points.
        basis = even_harmonic_blocks(3, 4)
        block = basis.blocks[2]
        rng = np.random.default_rng(7)
        x = rng.normal(size=3)
        h = 1e-5
        for r in range(block.size):
            def poly(p, _r=r):
                return float(block.eval_points((p / np.linalg.norm(p))[None, :])[0, _r]) * np.linalg.norm(p) ** 4

            lap = 0.0
            for i in range(3):
                e = np.zeros(3)
                e[i] = h
                lap += poly(x + e) - 2 * poly(x) + poly(x - e)
            assert abs(lap / h**2) < 1e-4


class TestGegenbauer:
    def test_normalized_at_one(self):
        for n in (2, 3, 4, 6):
            for d in (0, 2, 4, 8):
                assert gegenbauer_normalized(n, d, 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_legendre_special_case(self):
        from scipy.special import eval_legendre

        t = np.linspace(-1, 1, 11)
        assert np.allclose(gegenbauer_normalized(3, 4, t), eval_legendre(4, t))

    def test_kernel_mean_polynomial_exact(self):
        # E[t^2] for t = <u, v> equals 1/n.
        for n in (3, 4, 5):
            val = kernel_mean_quadrature(lambda t: t**2, n, 2)
            assert val == pytest.approx(1.0 / n, rel=1e-12)
