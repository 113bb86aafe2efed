"""Polytope geometry: projections, exact volumes, Steiner fits, Kubota MC.

Polytopes are stored by their extreme points.  Exact volumes go through
Qhull (intended range n <= 6); Minkowski-ball volumes vol(K + eps D) are
estimated by Monte-Carlo membership using the min-norm-point kernel; the
Cauchy-Kubota estimator is calibrated to be exact on the unit ball.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ._kernels import hull_distances
from .base import Estimate, mean_and_stderr, unit_ball_volume
from .errors import ConditioningWarning, DimensionError
from .grassmann import SeededSampler, Subspace, haar_bases_batch, haar_unit_vectors

_DEDUP_TOL = 1e-9
_AFFINE_TOL = 1e-9
_CHUNK = 8192


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polytope:
    """Convex polytope given by its extreme points.

    Redundant input points are removed on construction and the affine
    dimension is recorded; lower-dimensional polytopes (which arise under
    projection) are legal and have volume 0 in their ambient space.
    """

    ambient_dim: int
    vertices: np.ndarray = field(repr=False)
    affine_dim: int = field(default=-1)

    def __post_init__(self):
        v = np.ascontiguousarray(np.atleast_2d(np.asarray(self.vertices, dtype=float)))
        if v.shape[0] == 0:
            raise ValueError("empty vertex list")
        if v.shape[1] != self.ambient_dim:
            raise DimensionError(
                f"vertex dimension {v.shape[1]} != ambient dimension {self.ambient_dim}"
            )
        v, adim = _extreme_points(v)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "affine_dim", adim)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def diameter(self) -> float:
        v = self.vertices
        if v.shape[0] == 1:
            return 0.0
        d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))

    def __repr__(self) -> str:
        return (
            f"Polytope(ambient_dim={self.ambient_dim}, "
            f"n_vertices={self.n_vertices}, affine_dim={self.affine_dim})"
        )


@dataclass(frozen=True)
class Ball:
    """The unit Euclidean ball D_L of a linear subspace L."""

    subspace: Subspace

    @property
    def ambient_dim(self) -> int:
        return self.subspace.ambient_dim

    @property
    def dim(self) -> int:
        return self.subspace.dim


@dataclass(frozen=True)
class SteinerPolynomial:
    """Fit of vol(K + eps D) = sum_m coefficients[m] * eps^m.

    The coefficient of eps^m is kappa_m * V_{n-m}(K), so intrinsic volumes
    are read off by dividing by ball volumes.
    """

    degree: int
    coefficients: np.ndarray
    fit_residual: float = 0.0
    condition_number: float = 1.0
    grid: np.ndarray | None = None
    volumes: np.ndarray | None = None
    volume_stderrs: np.ndarray | None = None

    def intrinsic_volumes(self) -> "IntrinsicVolumeVector":
        n = self.degree
        vals = np.array(
            [self.coefficients[n - j] / unit_ball_volume(n - j) for j in range(n + 1)]
        )
        return IntrinsicVolumeVector(values=vals)


@dataclass(frozen=True)
class IntrinsicVolumeVector:
    """Values V_0 .. V_n; V_0 is the Euler characteristic (1 for nonempty K)."""

    values: np.ndarray

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])

    @property
    def degree(self) -> int:
        return len(self.values) - 1


# ---------------------------------------------------------------------------
# Construction helpers
# ---------------------------------------------------------------------------


def _dedupe(points: np.ndarray) -> np.ndarray:
    scale = 1.0 + float(np.abs(points).max(initial=0.0))
    kept: list[np.ndarray] = []
    for p in points:
        if all(np.linalg.norm(p - q) > _DEDUP_TOL * scale for q in kept):
            kept.append(p)
    return np.array(kept)


def _extreme_points(points: np.ndarray) -> tuple[np.ndarray, int]:
    """Hull-reduce a point cloud; returns (extreme points, affine dimension)."""
    n = points.shape[1]
    if n == 0:
        return points[:1].copy(), 0
    pts = _dedupe(points)
    if pts.shape[0] == 1:
        return pts, 0
    center = pts.mean(axis=0)
    centered = pts - center
    u, sv, vt = np.linalg.svd(centered, full_matrices=False)
    scale = max(1.0, sv[0])
    adim = int(np.sum(sv > _AFFINE_TOL * scale))
    if adim == 0:
        return pts[:1].copy(), 0
    coords = centered @ vt[:adim].T
    if adim == 1:
        idx = sorted({int(np.argmin(coords[:, 0])), int(np.argmax(coords[:, 0]))})
        return pts[idx], 1
    if pts.shape[0] <= adim + 1:
        return pts, adim
    try:
        hull = ConvexHull(coords)
    except QhullError:
        hull = ConvexHull(coords, qhull_options="QJ")
    idx = sorted(int(i) for i in hull.vertices)
    return pts[idx], adim


def make_cube(n: int, side: float = 1.0, centered: bool = False) -> Polytope:
    """Axis-aligned cube [0, side]^n (or centered at the origin)."""
    if n < 1:
        raise DimensionError("n >= 1 required")
    corners = np.array(np.meshgrid(*([[0.0, side]] * n), indexing="ij")).reshape(n, -1).T
    if centered:
        corners = corners - side / 2.0
    return Polytope(n, corners)


def make_box(sides: Sequence[float]) -> Polytope:
    sides = np.asarray(sides, dtype=float)
    n = len(sides)
    corners = np.array(np.meshgrid(*[[0.0, s] for s in sides], indexing="ij")).reshape(n, -1).T
    return Polytope(n, corners)


def make_simplex(n: int) -> Polytope:
    """Standard simplex conv{0, e_1, ..., e_n}; volume 1/n!."""
    if n < 1:
        raise DimensionError("n >= 1 required")
    return Polytope(n, np.vstack([np.zeros(n), np.eye(n)]))


def make_crosspolytope(n: int) -> Polytope:
    if n < 1:
        raise DimensionError("n >= 1 required")
    return Polytope(n, np.vstack([np.eye(n), -np.eye(n)]))


def make_random_polytope(n: int, m: int, s: SeededSampler) -> Polytope:
    """Hull of m Haar-random points on the unit sphere."""
    if m < n + 1:
        raise ValueError(f"need m >= n+1 points, got m={m}, n={n}")
    return Polytope(n, haar_unit_vectors(n, m, s))


def translate(p: Polytope, x) -> Polytope:
    return Polytope(p.ambient_dim, p.vertices + np.asarray(x, dtype=float))


def scale(p: Polytope, lam: float) -> Polytope:
    return Polytope(p.ambient_dim, p.vertices * float(lam))


def negate(p: Polytope) -> Polytope:
    return Polytope(p.ambient_dim, -p.vertices)


def polytope_to_json(p: Polytope) -> dict:
    return {"ambient_dim": p.ambient_dim, "vertices": p.vertices.tolist()}


def polytope_from_json(d: dict) -> Polytope:
    return Polytope(int(d["ambient_dim"]), np.asarray(d["vertices"], dtype=float))


# ---------------------------------------------------------------------------
# Projections and exact volumes
# ---------------------------------------------------------------------------


def project(p: Polytope, e: Subspace) -> Polytope:
    """Orthogonal projection onto E, expressed in E-coordinates."""
    if p.ambient_dim != e.ambient_dim:
        raise DimensionError("ambient dimensions differ")
    return Polytope(e.dim, p.vertices @ e.basis)


def hull_volume(p: Polytope) -> float:
    """Exact ambient-dimensional volume (0 for lower-dimensional bodies).

    The 0-dimensional convention vol_0(point) = 1 makes degree-0 integrals
    (Euler characteristic) come out right.
    """
    n = p.ambient_dim
    if n == 0:
        return 1.0
    if p.affine_dim < n:
        return 0.0
    if n == 1:
        return float(p.vertices.max() - p.vertices.min())
    return float(ConvexHull(p.vertices).volume)


def _raw_volume(points: np.ndarray) -> float:
    """Hull volume of a raw point cloud; 0 if degenerate.  Internal fast path."""
    k = points.shape[1]
    if k == 0:
        return 1.0
    if k == 1:
        return float(points.max() - points.min())
    try:
        return float(ConvexHull(points).volume)
    except QhullError:
        return 0.0


def minkowski_segment(p: Polytope, u, lam: float) -> Polytope:
    """Minkowski sum of P with the segment [0, lam*u]."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    u = np.asarray(u, dtype=float)
    if lam == 0.0 or np.allclose(u, 0.0):
        return p
    return Polytope(p.ambient_dim, np.vstack([p.vertices, p.vertices + lam * u]))


def dist_to_polytope(x, p: Polytope) -> float:
    """Euclidean distance from a point to the polytope (min-norm-point kernel)."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if x.shape[1] != p.ambient_dim:
        raise DimensionError("point dimension mismatch")
    return float(hull_distances(x, p.vertices)[0])


def contains_points(p: Polytope, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    scale_ = 1.0 + float(np.abs(p.vertices).max())
    return hull_distances(points, p.vertices) <= tol * scale_


def _sobol_draw(engine, count: int) -> np.ndarray:
    """Draw from a Sobol engine, quieting the power-of-two balance notice.

    Chunks are powers of two except possibly the last one; the slight
    imbalance there is irrelevant at these sample counts.
    """
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*balance properties of Sobol.*")
        return engine.random(count)


def mc_hull_volume(p: Polytope, n_samples: int, s: SeededSampler,
                   method: str = "mc") -> Estimate:
    """Rejection-sampling volume estimate (independent of Qhull volumes).

    ``method="mc"`` draws plain uniform points, so the returned standard
    error has the usual binomial meaning; ``method="qmc"`` uses a seeded
    scrambled Sobol net for a tighter estimate (stderr then conservative).
    """
    lo, hi = p.bounding_box()
    widths = hi - lo
    box_vol = float(np.prod(widths))
    if box_vol == 0.0:
        return Estimate(0.0, 0.0)
    if method not in ("mc", "qmc"):
        raise ValueError(f"unknown method {method!r}")
    engine = None
    if method == "qmc":
        from scipy.stats import qmc

        engine = qmc.Sobol(d=p.ambient_dim, scramble=True, seed=s.substream(0).rng)
    hits = 0
    done = 0
    chunk_idx = 0
    while done < n_samples:
        c = min(_CHUNK, n_samples - done)
        if engine is not None:
            u = _sobol_draw(engine, c)
        else:
            u = s.substream(chunk_idx).uniform(size=(c, p.ambient_dim))
        pts = lo + u * widths
        hits += int(np.count_nonzero(contains_points(p, pts)))
        done += c
        chunk_idx += 1
    frac = hits / n_samples
    stderr = box_vol * math.sqrt(max(frac * (1.0 - frac), 0.0) / n_samples)
    return Estimate(box_vol * frac, stderr)


# ---------------------------------------------------------------------------
# Exact intrinsic-volume oracles
# ---------------------------------------------------------------------------


def box_intrinsic_volumes(sides: Sequence[float]) -> IntrinsicVolumeVector:
    """V_j of an axis-aligned box: the elementary symmetric polynomials e_j."""
    sides = np.asarray(sides, dtype=float)
    if np.any(sides < 0):
        raise ValueError("sides must be nonnegative")
    # Ascending coefficients of prod_i (1 + s_i t): entry j is e_j(sides).
    coeffs = np.array([1.0])
    for si in sides:
        coeffs = np.convolve(coeffs, np.array([1.0, si]))
    return IntrinsicVolumeVector(values=coeffs)


def ball_intrinsic_volumes(n: int, r: float = 1.0) -> IntrinsicVolumeVector:
    """V_j of the n-ball of radius r: binom(n,j) kappa_n / kappa_{n-j} r^j."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    vals = np.array(
        [
            math.comb(n, j) * unit_ball_volume(n) / unit_ball_volume(n - j) * r**j
            for j in range(n + 1)
        ]
    )
    return IntrinsicVolumeVector(values=vals)


def surface_area(p: Polytope) -> float:
    """Total (n-1)-measure of the boundary of a full-dimensional polytope."""
    if p.affine_dim < p.ambient_dim:
        raise DimensionError("surface area needs a full-dimensional polytope")
    _, areas = _facet_decomposition(p)
    return float(areas.sum())


def polytope_intrinsic_volumes(p: Polytope) -> IntrinsicVolumeVector:
    """Exact intrinsic volumes of a full-dimensional polytope in R^2 or R^3.

    Classical closed forms: V_{n-1} is half the surface measure, and in R^3
    the mean-width term is the edge sum V_1 = sum_e len(e) theta(e) / (2 pi)
    with theta the exterior (normal) angle.  Triangulation diagonals have
    angle 0, so the formula is safe on Qhull's simplicial facets.
    """
    n = p.ambient_dim
    if p.affine_dim < n:
        raise DimensionError("full-dimensional polytope required")
    if n == 2:
        hull = ConvexHull(p.vertices)
        return IntrinsicVolumeVector(
            values=np.array([1.0, hull.area / 2.0, hull.volume])
        )
    if n != 3:
        raise DimensionError("exact polytope intrinsic volumes implemented for n = 2, 3")
    hull = ConvexHull(p.vertices, qhull_options="Qt")
    normals = hull.equations[:, :3]
    v1 = 0.0
    for fi, simplex in enumerate(hull.simplices):
        for local, fj in enumerate(hull.neighbors[fi]):
            if fj <= fi:
                continue
            shared = [v for li, v in enumerate(simplex) if li != local]
            length = float(np.linalg.norm(p.vertices[shared[0]] - p.vertices[shared[1]]))
            cosang = float(np.clip(normals[fi] @ normals[fj], -1.0, 1.0))
            v1 += length * math.acos(cosang) / (2.0 * math.pi)
    return IntrinsicVolumeVector(
        values=np.array([1.0, v1, surface_area(p) / 2.0, hull_volume(p)])
    )


# ---------------------------------------------------------------------------
# Cauchy-Kubota Monte-Carlo estimator
# ---------------------------------------------------------------------------


def kubota_coefficient(n: int, k: int) -> float:
    """Normalization making the mean-projection estimator exact on the unit ball.

    The mean k-volume of projections of the unit n-ball is kappa_k, so the
    constant is V_k(ball) / kappa_k = binom(n,k) kappa_n / (kappa_{n-k} kappa_k).
    """
    if not 0 <= k <= n:
        raise DimensionError(f"need 0 <= k <= n, got k={k}, n={n}")
    return math.comb(n, k) * unit_ball_volume(n) / (
        unit_ball_volume(n - k) * unit_ball_volume(k)
    )


def _facet_decomposition(p: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """(unit normals, (n-1)-areas) of the simplicial facets of a full-dim polytope."""
    hull = ConvexHull(p.vertices, qhull_options="Qt")
    n = p.ambient_dim
    normals = hull.equations[:, :n]
    areas = np.empty(len(hull.simplices))
    fact = math.factorial(n - 1)
    for i, simplex in enumerate(hull.simplices):
        pts = p.vertices[simplex]
        edges = pts[1:] - pts[0]
        gram = edges @ edges.T
        det = np.linalg.det(gram)
        areas[i] = math.sqrt(max(det, 0.0)) / fact
    return normals, areas


def shadow_volume(p: Polytope, direction: np.ndarray) -> float:
    """vol_{n-1} of the projection of a full-dimensional P along a unit direction.

    Cauchy's projection formula: half the sum over facets of area times
    |<normal, direction>|.
    """
    normals, areas = _facet_decomposition(p)
    u = np.asarray(direction, dtype=float)
    return 0.5 * float(areas @ np.abs(normals @ u))


def _kubota_samples_polytope(p: Polytope, k: int, n_samples: int, s: SeededSampler) -> np.ndarray:
    n = p.ambient_dim
    vals = np.empty(n_samples)
    use_cauchy = k == n - 1 and k >= 2 and p.affine_dim == n
    normals = areas = None
    if use_cauchy:
        normals, areas = _facet_decomposition(p)
    done = 0
    chunk_idx = 0
    while done < n_samples:
        c = min(_CHUNK, n_samples - done)
        sub = s.substream(chunk_idx)
        if k == 1:
            dirs = haar_unit_vectors(n, c, sub)
            supports = p.vertices @ dirs.T
            vals[done : done + c] = supports.max(axis=0) - supports.min(axis=0)
        elif use_cauchy:
            dirs = haar_unit_vectors(n, c, sub)
            vals[done : done + c] = 0.5 * (np.abs(dirs @ normals.T) @ areas)
        else:
            bases = haar_bases_batch(n, k, c, sub)
            proj = np.einsum("vn,snk->svk", p.vertices, bases)
            for i in range(c):
                vals[done + i] = _raw_volume(proj[i])
        done += c
        chunk_idx += 1
    return vals


def _kubota_samples_ball(b: Ball, k: int, n_samples: int, s: SeededSampler) -> np.ndarray:
    n = b.ambient_dim
    l = b.dim
    if l < k:
        return np.zeros(n_samples)
    kappa_k = unit_ball_volume(k)
    vals = np.empty(n_samples)
    done = 0
    chunk_idx = 0
    while done < n_samples:
        c = min(_CHUNK, n_samples - done)
        bases = haar_bases_batch(n, k, c, s.substream(chunk_idx))
        m = np.einsum("snk,nl->skl", bases, b.subspace.basis)
        sv = np.linalg.svd(m, compute_uv=False)
        vals[done : done + c] = kappa_k * np.prod(np.clip(sv, 0.0, 1.0), axis=1)
        done += c
        chunk_idx += 1
    return vals


def kubota_estimate(body, k: int, n_samples: int, s: SeededSampler) -> Estimate:
    """Monte-Carlo intrinsic volume V_k via mean projection volumes.

    Averages vol_k of projections onto Haar-random k-subspaces and rescales
    by ``kubota_coefficient``.  Exact (zero variance) for k = 0 and k = n.
    """
    n = body.ambient_dim
    if not 0 <= k <= n:
        raise DimensionError(f"need 0 <= k <= n, got k={k}, n={n}")
    if k == 0:
        return Estimate(1.0, 0.0)
    c = kubota_coefficient(n, k)
    if k == n:
        if isinstance(body, Ball):
            vol = unit_ball_volume(n) if body.dim == n else 0.0
        else:
            vol = hull_volume(body)
        return Estimate(vol, 0.0)
    if isinstance(body, Ball):
        vals = _kubota_samples_ball(body, k, n_samples, s)
    else:
        vals = _kubota_samples_polytope(body, k, n_samples, s)
    est = mean_and_stderr(vals)
    return Estimate(c * est.value, c * est.stderr)


# ---------------------------------------------------------------------------
# Steiner polynomial fit
# ---------------------------------------------------------------------------


def default_epsilon_grid(p: Polytope, count: int | None = None) -> np.ndarray:
    """Chebyshev-spaced grid on [0, diam(P)] (controls fit conditioning)."""
    n = p.ambient_dim
    if count is None:
        count = n + 3
    d = p.diameter()
    if d == 0.0:
        d = 1.0
    i = np.arange(count)
    nodes = 0.5 * d * (1.0 - np.cos((2 * i + 1) * np.pi / (2 * count)))
    return np.sort(nodes)


def parallel_body_volumes(
    p: Polytope, eps_grid: np.ndarray, n_samples: int, s: SeededSampler
) -> tuple[np.ndarray, np.ndarray]:
    """Membership estimates of vol(P + eps D) on a grid of radii.

    One scrambled-Sobol point set (seeded through the sampler, so fully
    reproducible) serves the whole grid: the estimates are then monotone in
    eps, which stabilizes the polynomial fit.  The reported standard errors
    use the binomial formula and are conservative for scrambled nets.
    """
    from scipy.stats import qmc

    eps_grid = np.asarray(eps_grid, dtype=float)
    eps_max = float(eps_grid.max())
    lo, hi = p.bounding_box()
    lo = lo - eps_max
    hi = hi + eps_max
    widths = hi - lo
    box_vol = float(np.prod(widths))
    engine = qmc.Sobol(d=p.ambient_dim, scramble=True, seed=s.substream(0).rng)
    counts = np.zeros(len(eps_grid), dtype=np.int64)
    done = 0
    while done < n_samples:
        c = min(_CHUNK, n_samples - done)
        pts = lo + _sobol_draw(engine, c) * widths
        d = hull_distances(pts, p.vertices)
        counts += (d[None, :] <= eps_grid[:, None]).sum(axis=1)
        done += c
    frac = counts / n_samples
    vols = box_vol * frac
    stderrs = box_vol * np.sqrt(np.maximum(frac * (1.0 - frac), 0.0) / n_samples)
    return vols, stderrs


def fit_polynomial(
    x: np.ndarray, y: np.ndarray, degree: int
) -> tuple[np.ndarray, float, float]:
    """Least-squares polynomial fit; returns (ascending coeffs, rel residual, cond).

    The abscissa is rescaled to [0, 1] before solving; the condition number
    refers to the rescaled design matrix.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x_scale = float(np.abs(x).max())
    if x_scale == 0.0:
        x_scale = 1.0
    design = np.vander(x / x_scale, degree + 1, increasing=True)
    cond = float(np.linalg.cond(design))
    if cond > 1e8:
        warnings.warn(
            f"epsilon grid gives condition number {cond:.3g}", ConditioningWarning
        )
    sol, *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ sol
    denom = float(np.linalg.norm(y))
    residual = float(np.linalg.norm(y - fitted)) / (denom if denom > 0 else 1.0)
    coeffs = sol / x_scale ** np.arange(degree + 1)
    return coeffs, residual, cond


def steiner_fit(
    p: Polytope, eps_grid, n_samples: int, s: SeededSampler
) -> SteinerPolynomial:
    """Fit the Steiner polynomial of P from MC estimates of vol(P + eps D)."""
    n = p.ambient_dim
    eps_grid = np.asarray(eps_grid, dtype=float)
    if np.any(eps_grid < 0):
        raise ValueError("epsilon grid must be nonnegative")
    if len(np.unique(eps_grid)) < n + 1:
        raise ValueError(f"need at least {n + 1} distinct grid points")
    vols, stderrs = parallel_body_volumes(p, eps_grid, n_samples, s)
    coeffs, residual, cond = fit_polynomial(eps_grid, vols, n)
    return SteinerPolynomial(
        degree=n,
        coefficients=coeffs,
        fit_residual=residual,
        condition_number=cond,
        grid=eps_grid,
        volumes=vols,
        volume_stderrs=stderrs,
    )
