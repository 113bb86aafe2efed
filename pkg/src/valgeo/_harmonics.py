"""Real spherical harmonics as harmonic polynomials, plus sphere quadrature.

Works uniformly for S^2 and S^3 (ambient n = 3, 4): a basis of harmonic
homogeneous polynomials of degree d is the nullspace of the Laplacian acting
on monomial coefficients, and the Gram matrix over the sphere is assembled
from the exact monomial moments

    E[x^gamma] = prod_i (gamma_i - 1)!! / prod_{k < |gamma|/2} (n + 2k)

(all gamma_i even; zero otherwise), so the basis is orthonormalized without
any numerical integration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ScopeError


def monomial_exponents(n: int, d: int) -> np.ndarray:
    """Exponent vectors of the degree-d monomials in n variables (lex order)."""
    combos = [
        e
        for e in itertools.product(range(d + 1), repeat=n)
        if sum(e) == d
    ]
    combos.sort()
    return np.array(combos, dtype=int).reshape(len(combos), n)


def _double_factorial(m: int) -> float:
    if m <= 0:
        return 1.0
    return float(np.prod(np.arange(m, 0, -2, dtype=float)))


def sphere_moment(gamma: np.ndarray, n: int) -> float:
    """E[x^gamma] for x uniform on S^{n-1}."""
    gamma = np.asarray(gamma, dtype=int)
    if np.any(gamma % 2 == 1):
        return 0.0
    total = int(gamma.sum())
    num = 1.0
    for g in gamma:
        num *= _double_factorial(int(g) - 1)
    den = 1.0
    for k in range(total // 2):
        den *= n + 2 * k
    return num / den


def _laplacian_matrix(exps_d: np.ndarray, exps_dm2: np.ndarray) -> np.ndarray:
    """Matrix of the Laplacian from degree-d to degree-(d-2) monomial coefficients."""
    index = {tuple(e): i for i, e in enumerate(exps_dm2)}
    n = exps_d.shape[1]
    lap = np.zeros((len(exps_dm2), len(exps_d)))
    for j, e in enumerate(exps_d):
        for i in range(n):
            if e[i] >= 2:
                target = e.copy()
                target[i] -= 2
                lap[index[tuple(target)], j] += e[i] * (e[i] - 1)
    return lap


def _harmonic_space(n: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """(exponents, coefficient rows) spanning the harmonic polynomials of degree d."""
    exps = monomial_exponents(n, d)
    if d < 2:
        return exps, np.eye(len(exps))
    lap = _laplacian_matrix(exps, monomial_exponents(n, d - 2))
    _, sv, vt = np.linalg.svd(lap)
    rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0] if sv.size else 1.0)))
    null = vt[rank:]
    return exps, null


def harmonic_dimension(n: int, d: int) -> int:
    """dim of the spherical harmonics of degree d on S^{n-1}."""
    if d == 0:
        return 1
    return math.comb(d + n - 1, n - 1) - math.comb(d + n - 3, n - 1)


@dataclass(frozen=True)
class HarmonicBlock:
    degree: int
    exponents: np.ndarray
    coefficients: np.ndarray  # (block size, n monomials), orthonormal rows

    @property
    def size(self) -> int:
        return self.coefficients.shape[0]

    def eval_points(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the block at unit vectors; returns (npoints, size)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        mono = np.ones((x.shape[0], len(self.exponents)))
        dmax = int(self.exponents.max(initial=0))
        powers = np.stack([x**p for p in range(dmax + 1)], axis=0)
        for t, e in enumerate(self.exponents):
            col = np.ones(x.shape[0])
            for i, p in enumerate(e):
                if p:
                    col = col * powers[p, :, i]
            mono[:, t] = col
        return mono @ self.coefficients.T


@dataclass(frozen=True)
class HarmonicBasis:
    """Orthonormal (probability measure) real harmonics of the even degrees."""

    ambient_dim: int
    blocks: tuple[HarmonicBlock, ...]

    @property
    def size(self) -> int:
        return sum(b.size for b in self.blocks)

    @property
    def degrees(self) -> np.ndarray:
        return np.concatenate([[b.degree] * b.size for b in self.blocks]).astype(int)

    @property
    def labels(self) -> list[tuple[int, int]]:
        return [(b.degree, j) for b in self.blocks for j in range(b.size)]

    def eval_points(self, x: np.ndarray) -> np.ndarray:
        return np.hstack([b.eval_points(x) for b in self.blocks])


def even_harmonic_blocks(n: int, d_max: int) -> HarmonicBasis:
    """Orthonormal harmonics of even degree 0, 2, ..., d_max on S^{n-1}.

    Supported for n in {3, 4} and d_max <= 12 (desk scope).
    """
    if n not in (3, 4):
        raise ScopeError(f"harmonic bases implemented for ambient dim 3 and 4, not {n}")
    if d_max % 2 != 0 or d_max < 0 or d_max > 12:
        raise ScopeError(f"d_max must be even in [0, 12], got {d_max}")
    blocks = []
    for d in range(0, d_max + 1, 2):
        exps, rows = _harmonic_space(n, d)
        pair_moments = np.empty((len(exps), len(exps)))
        for a in range(len(exps)):
            for b in range(a, len(exps)):
                m = sphere_moment(exps[a] + exps[b], n)
                pair_moments[a, b] = m
                pair_moments[b, a] = m
        gram = rows @ pair_moments @ rows.T
        chol = np.linalg.cholesky(gram)
        ortho = np.linalg.solve(chol, rows)
        if d == 0:
            ortho = np.abs(ortho)  # the constant harmonic is +1
        blocks.append(HarmonicBlock(degree=d, exponents=exps, coefficients=ortho))
    return HarmonicBasis(ambient_dim=n, blocks=tuple(blocks))


# ---------------------------------------------------------------------------
# Gegenbauer kernels and 1-D eigenvalue quadratures
# ---------------------------------------------------------------------------


def gegenbauer_normalized(n: int, d: int, t) -> np.ndarray:
    """Gegenbauer polynomial for S^{n-1} zonal harmonics, normalized to 1 at t=1."""
    t = np.asarray(t, dtype=float)
    if n < 2:
        raise ScopeError("need ambient dimension >= 2")
    if n == 2:
        return special.eval_chebyt(d, t)
    lam = (n - 2) / 2.0
    ref = special.eval_gegenbauer(d, lam, 1.0)
    return special.eval_gegenbauer(d, lam, t) / ref


def _weight_normalizer(n: int) -> float:
    """Integral of (1-t^2)^((n-3)/2) over [-1, 1]."""
    return math.sqrt(math.pi) * math.gamma((n - 1) / 2.0) / math.gamma(n / 2.0)


def kernel_mean_quadrature(kernel, n: int, poly_degree: int) -> float:
    """E[kernel(t)] for t = <u, v> with u, v uniform on S^{n-1}.

    Gauss-Jacobi quadrature in the weight (1-t^2)^((n-3)/2); exact when the
    kernel is a polynomial of degree <= 2*npoints - 1.
    """
    npts = max(poly_degree // 2 + 2, 8)
    a = (n - 3) / 2.0
    nodes, weights = special.roots_jacobi(npts, a, a)
    return float(weights @ kernel(nodes)) / _weight_normalizer(n)


def sphere_quadrature(n: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric node set and probability weights on S^{n-1}.

    Exact for all polynomials up to the given degree.  Built recursively:
    S^{m-1} = Gauss-Jacobi nodes in the first coordinate times a rule on
    S^{m-2}; the base circle rule is a uniform (even) grid.
    """
    if n < 2:
        raise ScopeError("need ambient dimension >= 2")
    if n == 2:
        m = degree + 2 + (degree % 2)  # even count, exact past the degree
        theta = 2.0 * math.pi * np.arange(m) / m
        nodes = np.column_stack([np.cos(theta), np.sin(theta)])
        return nodes, np.full(m, 1.0 / m)
    sub_nodes, sub_weights = sphere_quadrature(n - 1, degree)
    a = (n - 3) / 2.0
    npts = degree // 2 + 2
    t, wt = special.roots_jacobi(npts, a, a)
    wt = wt / wt.sum()
    r = np.sqrt(np.maximum(1.0 - t**2, 0.0))
    nodes = np.concatenate(
        [
            np.column_stack([np.full(len(sub_nodes), ti), ri * sub_nodes])
            for ti, ri in zip(t, r)
        ]
    )
    weights = np.concatenate([wi * sub_weights for wi in wt])
    return nodes, weights
