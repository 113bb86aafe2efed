"""Even valuation expressions: Klain functions, products, and the Lambda map.

Expression trees are built from intrinsic volumes, projection valuations
vol_i(Pr_F K), Crofton integrals against a function on a Grassmannian, the
two-factor product realized as the volume of a stacked-projection image, and
the derivative-at-zero operator Lambda phi(K) = d/deps vol-style phi(K+eps D).
Everything here is even and translation invariant by construction; degrees
are tracked structurally (Lambda lowers the degree by one).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .base import Estimate, mean_and_stderr, unit_ball_volume
from .bodies import (
    Ball,
    Polytope,
    ball_intrinsic_volumes,
    fit_polynomial,
    hull_volume,
    kubota_coefficient,
    kubota_estimate,
    parallel_body_volumes,
    project,
)
from .errors import DimensionError, PolynomialFitError, ScopeError
from .grassmann import (
    SeededSampler,
    Subspace,
    cos_angle,
    cos_angles_with_bases,
    haar_bases_batch,
    haar_unit_vectors,
    orthonormal_basis,
    sin_angle,
    span_sum,
)
from .transforms import GFunction, constant_gfunction, zonal_harmonic

_CHUNK = 8192

BodySpec = Polytope | Ball


# ---------------------------------------------------------------------------
# Expression types
# ---------------------------------------------------------------------------


class ValuationExpr:
    """Base class; every constructor yields an even, translation-invariant valuation."""

    parity = "even"

    @property
    def degree(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class IntrinsicVolume(ValuationExpr):
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise DimensionError("intrinsic volume degree must be nonnegative")

    @property
    def degree(self) -> int:
        return self.k


@dataclass(frozen=True)
class ProjectionVal(ValuationExpr):
    """K -> vol_i(Pr_F K) for a fixed i-dimensional subspace F."""

    subspace: Subspace

    @property
    def degree(self) -> int:
        return self.subspace.dim


@dataclass(frozen=True)
class CroftonVal(ValuationExpr):
    """K -> E_F[ f(F) vol_i(Pr_F K) ] over Haar F in Gr_i."""

    f: GFunction
    i: int

    def __post_init__(self):
        if self.f.grass_dim != self.i:
            raise DimensionError("Crofton function lives on the wrong Grassmannian")

    @property
    def degree(self) -> int:
        return self.i


@dataclass(frozen=True)
class ProductProj(ValuationExpr):
    """Product of two projection valuations: the stacked-projection volume.

    Degree dim F1 + dim F2; when that exceeds the ambient dimension the
    embedded image is degenerate and the valuation is identically zero
    (legal, not an error).
    """

    f1: Subspace
    f2: Subspace

    def __post_init__(self):
        if self.f1.ambient_dim != self.f2.ambient_dim:
            raise DimensionError("factors live in different ambient spaces")

    @property
    def degree(self) -> int:
        return self.f1.dim + self.f2.dim


@dataclass(frozen=True)
class Lambda(ValuationExpr):
    """Derivative at 0 of the inner valuation on outer parallel bodies."""

    inner: ValuationExpr

    def __post_init__(self):
        if self.inner.degree < 1:
            raise DimensionError("Lambda requires inner degree >= 1")

    @property
    def degree(self) -> int:
        return self.inner.degree - 1


@dataclass(frozen=True)
class CustomVal(ValuationExpr):
    """Plumbing node for composed constructions (e.g. Kubota-averaged powers)."""

    evaluator: Callable[[BodySpec, int, SeededSampler], Estimate] = field(repr=False)
    deg: int
    name: str = "custom"

    @property
    def degree(self) -> int:
        return self.deg


# ---------------------------------------------------------------------------
# Elementary evaluations
# ---------------------------------------------------------------------------


def _map_ball_volume(m: np.ndarray, l: Subspace, q: int) -> float:
    """q-volume of the image of the unit ball of L under the q x n map m."""
    if q == 0:
        return 1.0
    if l.dim < q:
        return 0.0
    sv = np.linalg.svd(m @ l.basis, compute_uv=False)
    return float(unit_ball_volume(q) * np.prod(sv[:q]))


def projected_ball_volume(f: Subspace, l: Subspace) -> float:
    """vol_i(Pr_F D_L) with i = dim F (the Klain function of a projection valuation)."""
    return _map_ball_volume(f.basis.T, l, f.dim)


def product_projection(f1: Subspace, f2: Subspace, k: Polytope) -> float:
    """The two-factor valuation product evaluated on a polytope.

    Embeds each vertex v as (Pr_F1 v, Pr_F2 v) in F1 (+) F2 and returns the
    exact hull volume there: the product of Lebesgue measures of the two
    stacked projections.
    """
    if k.ambient_dim != f1.ambient_dim or k.ambient_dim != f2.ambient_dim:
        raise DimensionError("ambient dimensions differ")
    embedded = np.hstack([k.vertices @ f1.basis, k.vertices @ f2.basis])
    return hull_volume(Polytope(f1.dim + f2.dim, embedded))


def _crofton_eval(expr: CroftonVal, body: BodySpec, budget: int, s: SeededSampler) -> Estimate:
    n = body.ambient_dim
    i = expr.i
    vals = np.empty(budget)
    done = 0
    chunk_idx = 0
    while done < budget:
        c = min(_CHUNK, budget - done)
        bases = haar_bases_batch(n, i, c, s.substream(chunk_idx))
        fvals = expr.f.eval_bases(bases)
        for t in range(c):
            if isinstance(body, Ball):
                vol = projected_ball_volume(Subspace(n, bases[t]), body.subspace)
            else:
                vol = _raw_hull_volume(body.vertices @ bases[t])
            vals[done + t] = fvals[t] * vol
        done += c
        chunk_idx += 1
    return mean_and_stderr(vals)


def _raw_hull_volume(points: np.ndarray) -> float:
    k = points.shape[1]
    if k == 0:
        return 1.0
    if k == 1:
        return float(points.max() - points.min())
    try:
        return float(ConvexHull(points).volume)
    except QhullError:
        return 0.0


def evaluate(expr: ValuationExpr, body: BodySpec, budget: int, s: SeededSampler) -> Estimate:
    """Evaluate a valuation expression on a polytope or a subspace ball.

    Exact paths (projection valuations on polytopes, intrinsic volumes of
    balls, stacked products) return zero standard error; Monte-Carlo paths
    spend ``budget`` samples.
    """
    if isinstance(expr, IntrinsicVolume):
        k = expr.k
        n = body.ambient_dim
        if k > n:
            return Estimate(0.0, 0.0)
        if isinstance(body, Ball):
            ldim = body.dim
            if k > ldim:
                return Estimate(0.0, 0.0)
            return Estimate(ball_intrinsic_volumes(ldim)[k], 0.0)
        if k == 0:
            return Estimate(1.0, 0.0)
        if k == n:
            return Estimate(hull_volume(body), 0.0)
        return kubota_estimate(body, k, budget, s)
    if isinstance(expr, ProjectionVal):
        f = expr.subspace
        if f.ambient_dim != body.ambient_dim:
            raise DimensionError("ambient dimensions differ")
        if isinstance(body, Ball):
            return Estimate(projected_ball_volume(f, body.subspace), 0.0)
        return Estimate(hull_volume(project(body, f)), 0.0)
    if isinstance(expr, CroftonVal):
        return _crofton_eval(expr, body, budget, s)
    if isinstance(expr, ProductProj):
        if isinstance(body, Ball):
            m = np.vstack([expr.f1.basis.T, expr.f2.basis.T])
            return Estimate(_map_ball_volume(m, body.subspace, expr.degree), 0.0)
        return Estimate(product_projection(expr.f1, expr.f2, body), 0.0)
    if isinstance(expr, Lambda):
        if isinstance(body, Ball):
            raise ScopeError("Lambda is evaluated on polytopes (parallel bodies of "
                             "subspace balls are not subspace balls)")
        return lambda_apply(expr, body, None, budget, s)
    if isinstance(expr, CustomVal):
        return expr.evaluator(body, budget, s)
    raise TypeError(f"unknown expression {expr!r}")


# ---------------------------------------------------------------------------
# Klain functions
# ---------------------------------------------------------------------------


def klain_function(expr: ValuationExpr, budget: int = 4096,
                   s: SeededSampler | None = None, ambient_dim: int | None = None) -> GFunction:
    """The Klain function L -> phi(D_L) on Gr_deg, as an evaluable GFunction.

    Closed forms are used for intrinsic volumes, projection valuations and
    stacked products; Crofton integrals evaluate by Monte-Carlo with a fixed
    derived stream, so the returned evaluator is a pure function of L.
    """
    deg = expr.degree
    if isinstance(expr, IntrinsicVolume):
        const = unit_ball_volume(deg)

        def ev(sub: Subspace) -> float:
            return const

        n = ambient_dim
    elif isinstance(expr, ProjectionVal):
        def ev(sub: Subspace) -> float:
            return projected_ball_volume(expr.subspace, sub)

        n = expr.subspace.ambient_dim
    elif isinstance(expr, ProductProj):
        m = np.vstack([expr.f1.basis.T, expr.f2.basis.T])

        def ev(sub: Subspace) -> float:
            return _map_ball_volume(m, sub, deg)

        n = expr.f1.ambient_dim
    else:
        base = s if s is not None else SeededSampler(0)

        def ev(sub: Subspace) -> float:
            return evaluate(expr, Ball(sub), budget, base.substream(0)).value

        n = ambient_dim
    if n is None:
        raise DimensionError("ambient_dim required for this expression type")
    return GFunction(n, deg, ev, name=f"klain({type(expr).__name__})")


# ---------------------------------------------------------------------------
# Claim 2.3: exact two-sided identity
# ---------------------------------------------------------------------------


def claim23_check(e: Subspace, f: Subspace, l: Subspace) -> tuple[float, float]:
    """Both sides of the stacked-projection ball-volume identity.

    lhs: exact volume of (Pr_E (+) Pr_F)(D_L) by singular values;
    rhs: kappa_{dim L} |cos(L, E+F)| |sin(E, F)|.
    Degenerate configurations (E meets F) give 0 = 0.
    """
    if l.dim != e.dim + f.dim:
        raise DimensionError("need dim L = dim E + dim F")
    m = np.vstack([e.basis.T, f.basis.T])
    lhs = _map_ball_volume(m, l, l.dim)
    rhs = unit_ball_volume(l.dim) * cos_angle(l, span_sum(e, f)) * sin_angle(e, f)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Lemma 2.2: restricted cosine average vs direct product evaluation
# ---------------------------------------------------------------------------


def lemma22_formula(f: Subspace, k: int, l: Subspace, n_samples: int,
                    s: SeededSampler) -> Estimate:
    """Average of |cos(L, R)| over Haar (k+i)-subspaces R containing F.

    Represents the Klain function of V_k times the projection valuation of F
    up to a normalizing constant (compare against ``lemma22_direct`` by
    proportionality fitting).  k = 0 degenerates to the exact cosine with F.
    """
    n = f.ambient_dim
    i = f.dim
    if i + k > n:
        raise DimensionError("k + dim F exceeds ambient dimension")
    if l.dim != k + i:
        raise DimensionError("L must have dimension k + dim F")
    if k == 0:
        return Estimate(cos_angle(l, f), 0.0)
    if i == 0:
        comp_basis = np.eye(n)
    else:
        from .grassmann import orthocomplement

        comp_basis = orthocomplement(f).basis
    vals = np.empty(n_samples)
    done = 0
    chunk_idx = 0
    while done < n_samples:
        c = min(_CHUNK, n_samples - done)
        w = haar_bases_batch(n - i, k, c, s.substream(chunk_idx))
        lift = np.einsum("nm,smk->snk", comp_basis, w)
        stack = np.concatenate(
            [np.broadcast_to(f.basis, (c, n, i)), lift], axis=2
        )
        vals[done : done + c] = cos_angles_with_bases(l, stack)
        done += c
        chunk_idx += 1
    return mean_and_stderr(vals)


def lemma22_direct(f: Subspace, k: int, l: Subspace, n_samples: int,
                   s: SeededSampler) -> Estimate:
    """Klain function of V_k times the projection valuation of F, evaluated at L.

    Kubota average over Haar E in Gr_k of the exact stacked-projection ball
    volume, with the Kubota constant made explicit; the independent route
    that ``lemma22_formula`` is checked against.
    """
    n = f.ambient_dim
    i = f.dim
    q = k + i
    if l.dim != q:
        raise DimensionError("L must have dimension k + dim F")
    if k == 0:
        return Estimate(projected_ball_volume(f, l), 0.0)
    kappa_q = unit_ball_volume(q)
    c_nk = kubota_coefficient(n, k)
    vals = np.empty(n_samples)
    done = 0
    chunk_idx = 0
    while done < n_samples:
        c = min(_CHUNK, n_samples - done)
        e_bases = haar_bases_batch(n, k, c, s.substream(chunk_idx))
        stack = np.concatenate(
            [np.swapaxes(e_bases, 1, 2), np.broadcast_to(f.basis.T, (c, i, n))], axis=1
        )
        m = stack @ l.basis
        vals[done : done + c] = kappa_q * np.abs(np.linalg.det(m))
        done += c
        chunk_idx += 1
    est = mean_and_stderr(vals)
    return Estimate(c_nk * est.value, c_nk * est.stderr)


# ---------------------------------------------------------------------------
# Lemma 2.4: multiply-by-V_k as cosine-after-Radon
# ---------------------------------------------------------------------------


def multiply_by_intrinsic(f: GFunction, i: int, k: int,
                          n_samples: int = 8192,
                          s: SeededSampler | None = None) -> GFunction:
    """Klain-side representative of V_k times the Crofton valuation of f.

    Returns the composed-transform function on Gr_{k+i}: at L it averages
    |cos(L, R)| f(F') over Haar R in Gr_{k+i} and Haar F' inside R (a
    one-sample estimator of the cosine transform applied after the Radon
    transform), up to the lemma's unspecified constant.
    """
    if f.grass_dim != i:
        raise DimensionError("f lives on the wrong Grassmannian")
    n = f.ambient_dim
    q = k + i
    if q > n:
        raise DimensionError("k + i exceeds ambient dimension")
    base = s if s is not None else SeededSampler(0)

    def ev(l: Subspace) -> float:
        vals = np.empty(n_samples)
        done = 0
        chunk_idx = 0
        while done < n_samples:
            c = min(_CHUNK, n_samples - done)
            sub = base.substream(chunk_idx)
            r_bases = haar_bases_batch(n, q, c, sub)
            w = haar_bases_batch(q, i, c, sub)
            fp = r_bases @ w
            cosines = cos_angles_with_bases(l, r_bases)
            vals[done : done + c] = cosines * f.eval_bases(fp)
            done += c
            chunk_idx += 1
        return float(vals.mean())

    return GFunction(n, q, ev, name=f"V_{k}*crofton({f.name})")


def lemma24_direct(f: GFunction, i: int, k: int, l: Subspace, n_samples: int,
                   s: SeededSampler) -> Estimate:
    """Direct Klain-function of V_k * (Crofton valuation of f) at L.

    Monte-Carlo over independent Haar pairs (E, F) of f(F) times the exact
    stacked-projection ball volume, scaled by the Kubota constant.
    """
    n = f.ambient_dim
    q = k + i
    if l.dim != q:
        raise DimensionError("L must have dimension k + i")
    kappa_q = unit_ball_volume(q)
    c_nk = kubota_coefficient(n, k)
    vals = np.empty(n_samples)
    done = 0
    chunk_idx = 0
    while done < n_samples:
        c = min(_CHUNK, n_samples - done)
        sub = s.substream(chunk_idx)
        e_bases = haar_bases_batch(n, k, c, sub)
        f_bases = haar_bases_batch(n, i, c, sub)
        stack = np.concatenate(
            [np.swapaxes(e_bases, 1, 2), np.swapaxes(f_bases, 1, 2)], axis=1
        )
        dets = kappa_q * np.abs(np.linalg.det(stack @ l.basis))
        vals[done : done + c] = dets * f.eval_bases(f_bases)
        done += c
        chunk_idx += 1
    est = mean_and_stderr(vals)
    return Estimate(c_nk * est.value, c_nk * est.stderr)


def fit_proportionality(direct: np.ndarray, formula: np.ndarray) -> tuple[float, float]:
    """Least-squares scalar alpha with direct ~ alpha * formula, and rel residual."""
    direct = np.asarray(direct, dtype=float)
    formula = np.asarray(formula, dtype=float)
    denom = float(formula @ formula)
    if denom == 0.0:
        raise ValueError("formula side is identically zero")
    alpha = float(direct @ formula) / denom
    residual = float(np.linalg.norm(direct - alpha * formula) / np.linalg.norm(direct))
    return alpha, residual


# ---------------------------------------------------------------------------
# Lambda: polynomial fit on outer parallel bodies
# ---------------------------------------------------------------------------


def _shadow_steiner_coeff_samples(
    body: Polytope, k: int, n_samples: int, s: SeededSampler
) -> np.ndarray:
    """Per-sample eps-polynomial coefficients of vol_k(Pr_E K + eps D_E).

    For k <= 2 the planar Steiner formula is exact per sample:
    length + 2 eps (k=1); area + perimeter eps + pi eps^2 (k=2).
    Returns an (n_samples, k+1) coefficient array.
    """
    n = body.ambient_dim
    coeffs = np.zeros((n_samples, k + 1))
    done = 0
    chunk_idx = 0
    while done < n_samples:
        c = min(_CHUNK, n_samples - done)
        sub = s.substream(chunk_idx)
        if k == 1:
            dirs = haar_unit_vectors(n, c, sub)
            supports = body.vertices @ dirs.T
            coeffs[done : done + c, 0] = supports.max(axis=0) - supports.min(axis=0)
            coeffs[done : done + c, 1] = 2.0
        elif k == 2:
            bases = haar_bases_batch(n, 2, c, sub)
            proj = np.einsum("vn,snk->svk", body.vertices, bases)
            for t in range(c):
                area, per = _area_perimeter(proj[t])
                coeffs[done + t] = (area, per, math.pi)
        else:
            raise ScopeError("exact shadow Steiner supports k <= 2")
        done += c
        chunk_idx += 1
    return coeffs


def _area_perimeter(points: np.ndarray) -> tuple[float, float]:
    """Area and perimeter of the 2-d hull; degenerate clouds give (0, 2*length)."""
    try:
        hull = ConvexHull(points)
        return float(hull.volume), float(hull.area)
    except QhullError:
        center = points.mean(axis=0)
        centered = points - center
        _, sv, vt = np.linalg.svd(centered, full_matrices=False)
        t = centered @ vt[0]
        return 0.0, 2.0 * float(t.max() - t.min())


def parallel_valuation_values(
    expr: ValuationExpr, body: Polytope, eps_grid: np.ndarray, budget: int,
    s: SeededSampler,
) -> tuple[np.ndarray, np.ndarray]:
    """Values (and standard errors) of expr(K + eps D) on a grid of radii."""
    n = body.ambient_dim
    eps_grid = np.asarray(eps_grid, dtype=float)

    def from_coeff_samples(coeffs: np.ndarray, scale: float) -> tuple[np.ndarray, np.ndarray]:
        powers = eps_grid[None, :] ** np.arange(coeffs.shape[1])[:, None]
        mean_c = coeffs.mean(axis=0)
        values = scale * (mean_c @ powers)
        centered = coeffs - mean_c
        cov = centered.T @ centered / (coeffs.shape[0] * max(coeffs.shape[0] - 1, 1))
        var = np.einsum("pe,pq,qe->e", powers, cov, powers)
        return values, scale * np.sqrt(np.maximum(var, 0.0))

    if isinstance(expr, IntrinsicVolume):
        k = expr.k
        if k == 0:
            return np.ones_like(eps_grid), np.zeros_like(eps_grid)
        if k == n:
            return parallel_body_volumes(body, eps_grid, budget, s)
        if k <= 2:
            coeffs = _shadow_steiner_coeff_samples(body, k, budget, s)
            return from_coeff_samples(coeffs, kubota_coefficient(n, k))
        raise ScopeError(
            f"parallel-body evaluation of V_{k} in R^{n} needs k <= 2 or k = n"
        )
    if isinstance(expr, ProjectionVal):
        q = project(body, expr.subspace)
        i = expr.subspace.dim
        if i == 0:
            return np.ones_like(eps_grid), np.zeros_like(eps_grid)
        if i == 1:
            length = float(q.vertices.max() - q.vertices.min())
            return length + 2.0 * eps_grid, np.zeros_like(eps_grid)
        if i == 2:
            area, per = _area_perimeter(q.vertices)
            return area + per * eps_grid + math.pi * eps_grid**2, np.zeros_like(eps_grid)
        return parallel_body_volumes(q, eps_grid, budget, s)
    if isinstance(expr, CroftonVal):
        i = expr.i
        if i > 2:
            raise ScopeError("parallel-body Crofton evaluation needs i <= 2")
        vals = np.zeros((budget, len(eps_grid)))
        done = 0
        chunk_idx = 0
        while done < budget:
            c = min(_CHUNK, budget - done)
            sub = s.substream(chunk_idx)
            bases = haar_bases_batch(n, i, c, sub)
            proj = np.einsum("vn,snk->svk", body.vertices, bases)
            fvals = expr.f.eval_bases(bases)
            for t in range(c):
                if i == 1:
                    col = proj[t][:, 0]
                    vals[done + t] = fvals[t] * (col.max() - col.min() + 2.0 * eps_grid)
                else:
                    area, per = _area_perimeter(proj[t])
                    vals[done + t] = fvals[t] * (
                        area + per * eps_grid + math.pi * eps_grid**2
                    )
            done += c
            chunk_idx += 1
        mean = vals.mean(axis=0)
        stderr = vals.std(axis=0, ddof=1) / math.sqrt(budget)
        return mean, stderr
    raise ScopeError(f"parallel-body evaluation not supported for {type(expr).__name__}")


def default_lambda_grid(body: Polytope, degree: int) -> np.ndarray:
    """Chebyshev radii on [0, 0.6 diam(K)] with degree + 3 points."""
    count = degree + 3
    d = body.diameter()
    if d == 0.0:
        d = 1.0
    i = np.arange(count)
    nodes = 0.3 * d * (1.0 - np.cos((2 * i + 1) * np.pi / (2 * count)))
    return np.sort(nodes)


def lambda_apply(expr: Lambda, body: Polytope, eps_grid, budget: int,
                 s: SeededSampler, max_residual: float = 0.02) -> Estimate:
    """Evaluate (possibly nested) Lambda expressions by polynomial fitting.

    phi(K + eps D) is a polynomial of degree deg(phi) in eps; m nested
    Lambda layers return m! times its eps^m coefficient.  The fit residual
    is a built-in diagnostic: residuals above ``max_residual`` raise
    PolynomialFitError (the sample budget was too small for the grid).
    """
    layers = 0
    base: ValuationExpr = expr
    while isinstance(base, Lambda):
        layers += 1
        base = base.inner
    d = base.degree
    if eps_grid is None:
        eps_grid = default_lambda_grid(body, d)
    eps_grid = np.asarray(eps_grid, dtype=float)
    if len(np.unique(eps_grid)) < d + 2:
        raise ValueError(f"need at least {d + 2} distinct grid points")
    values, stderrs = parallel_valuation_values(base, body, eps_grid, budget, s)
    coeffs, residual, _cond = fit_polynomial(eps_grid, values, d)
    if residual > max_residual:
        raise PolynomialFitError(
            f"fit residual {residual:.3g} exceeds {max_residual:.3g}; raise the budget"
        )
    # Propagate the per-point standard errors through the pseudo-inverse.
    scale = float(np.abs(eps_grid).max()) or 1.0
    design = np.vander(eps_grid / scale, d + 1, increasing=True)
    pinv = np.linalg.pinv(design)
    coeff_stderr = np.sqrt((pinv**2) @ stderrs**2) / scale ** np.arange(d + 1)
    value = math.factorial(layers) * coeffs[layers]
    stderr = math.factorial(layers) * float(coeff_stderr[layers])
    return Estimate(float(value), stderr)


# ---------------------------------------------------------------------------
# Proportionality verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProportionalityReport:
    ratios: np.ndarray
    mean_ratio: float
    spread: float
    proportional: bool
    skipped: list[int]
    values_a: list[Estimate]
    values_b: list[Estimate]

    def to_dict(self) -> dict:
        return {
            "ratios": self.ratios.tolist(),
            "mean_ratio": self.mean_ratio,
            "spread": self.spread,
            "proportional": self.proportional,
            "skipped": self.skipped,
            "values_a": [[e.value, e.stderr] for e in self.values_a],
            "values_b": [[e.value, e.stderr] for e in self.values_b],
        }


def proportionality_check(a: ValuationExpr, b: ValuationExpr, bodies, budget: int,
                          s: SeededSampler, tol: float = 0.03) -> ProportionalityReport:
    """Evaluate two same-degree valuations on test bodies and compare ratios.

    Reports the per-body ratio a/b, their mean, and the relative spread; the
    verdict is "proportional" when the spread is within ``tol``.  Bodies on
    which b vanishes (relative to its typical size) are excluded with a
    warning.  Only proportionality is asserted; the constant is reported.
    """
    if a.degree != b.degree:
        raise DimensionError("expressions have different homogeneity degrees")
    vals_a = [evaluate(a, body, budget, s.substream(2 * j)) for j, body in enumerate(bodies)]
    vals_b = [evaluate(b, body, budget, s.substream(2 * j + 1)) for j, body in enumerate(bodies)]
    scale_b = max(abs(v.value) for v in vals_b)
    ratios = []
    skipped = []
    for j, (va, vb) in enumerate(zip(vals_a, vals_b)):
        if abs(vb.value) <= 1e-9 * max(scale_b, 1e-300):
            warnings.warn(f"body {j} excluded: denominator approximately zero")
            skipped.append(j)
        else:
            ratios.append(va.value / vb.value)
    ratios = np.asarray(ratios)
    mean_ratio = float(ratios.mean()) if ratios.size else math.nan
    if ratios.size and mean_ratio != 0.0:
        spread = float(np.abs(ratios - mean_ratio).max() / abs(mean_ratio))
    else:
        spread = math.inf
    return ProportionalityReport(
        ratios=ratios,
        mean_ratio=mean_ratio,
        spread=spread,
        proportional=bool(spread <= tol),
        skipped=skipped,
        values_a=vals_a,
        values_b=vals_b,
    )


def v1_power(n: int, p: int) -> CustomVal:
    """The p-th power of V_1 as a Kubota-averaged stacked-projection volume.

    Iterating the two-factor product formula, V_1^p(K) is the Kubota-constant
    power times the mean volume of the image of K under p independent Haar
    line projections.
    """
    if p < 1:
        raise DimensionError("power must be >= 1")
    c1p = kubota_coefficient(n, 1) ** p

    def ev(body: BodySpec, budget: int, s: SeededSampler) -> Estimate:
        vals = np.empty(budget)
        done = 0
        chunk_idx = 0
        while done < budget:
            c = min(_CHUNK, budget - done)
            dirs = haar_unit_vectors(n, c * p, s.substream(chunk_idx)).reshape(c, p, n)
            if isinstance(body, Ball):
                for t in range(c):
                    vals[done + t] = _map_ball_volume(dirs[t], body.subspace, p)
            else:
                embedded = np.einsum("vn,spn->svp", body.vertices, dirs)
                for t in range(c):
                    vals[done + t] = _raw_hull_volume(embedded[t])
            done += c
            chunk_idx += 1
        est = mean_and_stderr(vals)
        return Estimate(c1p * est.value, c1p * est.stderr)

    return CustomVal(evaluator=ev, deg=p, name=f"V1^{p}")


# ---------------------------------------------------------------------------
# JSON expression trees
# ---------------------------------------------------------------------------


def expr_to_json(expr: ValuationExpr) -> dict:
    """Serialize an expression tree (Crofton nodes need a declarative GFunction)."""
    if isinstance(expr, IntrinsicVolume):
        return {"op": "IntrinsicVolume", "k": expr.k}
    if isinstance(expr, ProjectionVal):
        return {
            "op": "ProjectionVal",
            "ambient_dim": expr.subspace.ambient_dim,
            "basis": expr.subspace.basis.tolist(),
        }
    if isinstance(expr, ProductProj):
        return {
            "op": "ProductProj",
            "ambient_dim": expr.f1.ambient_dim,
            "basis1": expr.f1.basis.tolist(),
            "basis2": expr.f2.basis.tolist(),
        }
    if isinstance(expr, CroftonVal):
        if expr.f.spec is None:
            raise ValueError("CroftonVal carries a non-declarative function")
        return {
            "op": "CroftonVal",
            "i": expr.i,
            "ambient_dim": expr.f.ambient_dim,
            "f": expr.f.spec,
        }
    if isinstance(expr, Lambda):
        return {"op": "Lambda", "arg": expr_to_json(expr.inner)}
    raise ValueError(f"{type(expr).__name__} is not JSON-serializable")


def _gfunction_from_spec(n: int, i: int, spec: dict) -> GFunction:
    kind = spec.get("kind")
    if kind == "constant":
        return constant_gfunction(n, i, float(spec["value"]))
    if kind == "zonal":
        return zonal_harmonic(n, int(spec["degree"]), np.asarray(spec["axis"], dtype=float))
    raise ValueError(f"unknown GFunction spec {spec!r}")


def expr_from_json(d: dict) -> ValuationExpr:
    op = d["op"]
    if op == "IntrinsicVolume":
        return IntrinsicVolume(int(d["k"]))
    if op == "ProjectionVal":
        return ProjectionVal(orthonormal_basis(np.asarray(d["basis"], dtype=float)))
    if op == "ProductProj":
        return ProductProj(
            orthonormal_basis(np.asarray(d["basis1"], dtype=float)),
            orthonormal_basis(np.asarray(d["basis2"], dtype=float)),
        )
    if op == "CroftonVal":
        i = int(d["i"])
        return CroftonVal(_gfunction_from_spec(int(d["ambient_dim"]), i, d["f"]), i)
    if op == "Lambda":
        return Lambda(expr_from_json(d["arg"]))
    raise ValueError(f"unknown op {op!r}")
