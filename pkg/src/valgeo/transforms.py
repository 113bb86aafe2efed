"""Radon and cosine transforms on Grassmannians, and the Lefschetz probe.

Functions on a Grassmannian are evaluable objects (``GFunction``); the two
transforms are Monte-Carlo averages against the Haar measure.  On lines
(Gr_1) the even spherical harmonics diagonalize both transforms, which gives
independent one-dimensional quadrature oracles:

* cosine transform eigenvalue: mean of |t| against the degree-d Gegenbauer
  polynomial in the weight (1 - t^2)^((n-3)/2);
* hyperplane Radon eigenvalue: the great-subsphere average of a zonal
  harmonic (equals the normalized Gegenbauer polynomial at 0).

The discretized multiply-by-V1 operator (cosine after Radon, pulled back to
lines through orthocomplements) is assembled by plain Monte-Carlo inner
products, and its spectrum is the desk-scale injectivity probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from ._harmonics import (
    _weight_normalizer,
    even_harmonic_blocks,
    gegenbauer_normalized,
    kernel_mean_quadrature,
)
from .base import Estimate, mean_and_stderr
from .errors import DimensionError, PrecisionError, ScopeError
from .grassmann import (
    SeededSampler,
    Subspace,
    cos_angle,
    haar_subspace,
    haar_unit_vectors,
    orthocomplement,
    orthonormal_basis,
    sample_containing,
    sample_within,
    unit_vectors_orthogonal_to,
)

_CHUNK = 8192


# ---------------------------------------------------------------------------
# Evaluable functions on Grassmannians
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GFunction:
    """A scalar function on Gr_k(R^n) given by a pure evaluator.

    The evaluator must depend only on the subspace, not on the basis chosen
    to represent it (checked in the tests by re-randomizing bases).  Closed
    forms may supply ``batch_evaluator`` acting on a stack of bases; Monte-
    Carlo loops use it when present.
    """

    ambient_dim: int
    grass_dim: int
    evaluator: Callable[[Subspace], float] = field(repr=False)
    name: str = ""
    spec: dict | None = None
    batch_evaluator: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, repr=False
    )

    def __call__(self, subspace: Subspace) -> float:
        if subspace.ambient_dim != self.ambient_dim or subspace.dim != self.grass_dim:
            raise DimensionError(
                f"{self.name or 'GFunction'} expects Gr_{self.grass_dim}(R^{self.ambient_dim})"
            )
        return float(self.evaluator(subspace))

    def eval_bases(self, bases: np.ndarray) -> np.ndarray:
        """Evaluate on a (count, n, k) stack of orthonormal bases."""
        if self.batch_evaluator is not None:
            return np.asarray(self.batch_evaluator(bases), dtype=float)
        return np.array(
            [self.evaluator(Subspace(self.ambient_dim, b)) for b in bases], dtype=float
        )


def constant_gfunction(n: int, k: int, value: float = 1.0) -> GFunction:
    return GFunction(n, k, lambda _s: value, name=f"const({value})",
                     spec={"kind": "constant", "value": value},
                     batch_evaluator=lambda bases: np.full(bases.shape[0], value))


def zonal_harmonic(n: int, d: int, axis) -> GFunction:
    """Zonal spherical harmonic of degree d on lines: G_d(<axis, u>)."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)

    def ev(sub: Subspace) -> float:
        u = sub.basis[:, 0]
        return float(gegenbauer_normalized(n, d, float(axis @ u)))

    def ev_batch(bases: np.ndarray) -> np.ndarray:
        return gegenbauer_normalized(n, d, bases[:, :, 0] @ axis)

    return GFunction(n, 1, ev, name=f"zonal(d={d})",
                     spec={"kind": "zonal", "degree": d, "axis": axis.tolist()},
                     batch_evaluator=ev_batch)


# ---------------------------------------------------------------------------
# The transforms as Monte-Carlo operators
# ---------------------------------------------------------------------------


def radon_apply(f: GFunction, j: int, h: Subspace, n_samples: int, s: SeededSampler) -> Estimate:
    """Radon transform (R_{j,i} f)(H): average of f over subspaces through/in H.

    For j < i averages over Haar i-subspaces containing H, for j > i over
    Haar i-subspaces inside H.  i = j is undefined.
    """
    i = f.grass_dim
    if h.dim != j:
        raise DimensionError(f"H has dimension {h.dim}, expected j={j}")
    if i == j:
        raise DimensionError("Radon transform requires i != j")
    vals = np.empty(n_samples)
    done = 0
    chunk_idx = 0
    while done < n_samples:
        c = min(_CHUNK, n_samples - done)
        sub = s.substream(chunk_idx)
        for t in range(c):
            sample = sample_containing(h, i, sub) if j < i else sample_within(h, i, sub)
            vals[done + t] = f(sample)
        done += c
        chunk_idx += 1
    return mean_and_stderr(vals)


def cosine_apply(f: GFunction, j: int, e: Subspace, n_samples: int, s: SeededSampler) -> Estimate:
    """Cosine transform (T_{j,i} f)(E) = E_F[ |cos(E, F)| f(F) ] over Haar F in Gr_i."""
    i = f.grass_dim
    n = f.ambient_dim
    if not (1 <= i <= n - 1 and 1 <= j <= n - 1):
        raise DimensionError("cosine transform needs 1 <= i, j <= n-1")
    if e.dim != j:
        raise DimensionError(f"E has dimension {e.dim}, expected j={j}")
    vals = np.empty(n_samples)
    done = 0
    chunk_idx = 0
    while done < n_samples:
        c = min(_CHUNK, n_samples - done)
        sub = s.substream(chunk_idx)
        for t in range(c):
            fs = haar_subspace(n, i, sub)
            vals[done + t] = cos_angle(e, fs) * f(fs)
        done += c
        chunk_idx += 1
    return mean_and_stderr(vals)


# ---------------------------------------------------------------------------
# Harmonic bases and eigenvalue oracles
# ---------------------------------------------------------------------------


def even_harmonic_basis(n: int, d_max: int) -> list[GFunction]:
    """Orthonormal even-degree harmonics on Gr_1(R^n) as GFunctions.

    Orthonormal with respect to the uniform probability measure; only even
    degrees exist on the projective quotient.  Supported for n in {3, 4}.
    """
    basis = even_harmonic_blocks(n, d_max)
    out = []
    for block in basis.blocks:
        for row in range(block.size):
            def ev(sub: Subspace, _b=block, _r=row) -> float:
                u = sub.basis[:, 0]
                return float(_b.eval_points(u[None, :])[0, _r])

            def ev_batch(bases: np.ndarray, _b=block, _r=row) -> np.ndarray:
                return _b.eval_points(bases[:, :, 0])[:, _r]

            out.append(
                GFunction(
                    n,
                    1,
                    ev,
                    name=f"Y[{block.degree},{row}]",
                    spec={"kind": "harmonic", "degree": block.degree, "order": row},
                    batch_evaluator=ev_batch,
                )
            )
    return out


def funk_hecke_cosine_eigen(n: int, d: int) -> float:
    """Eigenvalue of the |cos| kernel on degree-d harmonics of S^{n-1}.

    One-dimensional quadrature of |t| G_d(t) with weight (1-t^2)^((n-3)/2),
    normalized so that d = 0 gives the mean of |cos|.  The integrand has a
    kink at 0, so the integral is taken adaptively on [0, 1] (the integrand
    is even for even d).
    """
    if d % 2 != 0 or d < 0:
        raise DimensionError("even nonnegative degree required")
    if n < 2:
        raise ScopeError("need ambient dimension >= 2")
    nu = (n - 3) / 2.0
    if n == 2:
        def g(t):
            return t * gegenbauer_normalized(n, d, t) / math.sqrt(1.0 + t)

        val, err = integrate.quad(g, 0.0, 1.0, weight="alg", wvar=(0.0, -0.5),
                                  epsabs=1e-13, epsrel=1e-13, limit=200)
    else:
        def g(t):
            return t * gegenbauer_normalized(n, d, t) * (1.0 - t * t) ** nu

        val, err = integrate.quad(g, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=200)
    if err > 1e-9 * max(1.0, abs(val)):
        raise PrecisionError(f"cosine eigenvalue quadrature error {err:.2e}")
    return 2.0 * val / _weight_normalizer(n)


def funk_radon_eigen(n: int, d: int) -> float:
    """Eigenvalue of the hyperplane Radon transform on even degree-d harmonics.

    Computed as a quadrature of the great-subsphere average of a zonal
    harmonic at a generic pole (no closed form is consumed; the answer
    happens to be the normalized Gegenbauer value at 0).
    """
    if d % 2 != 0 or d < 0:
        raise DimensionError("even nonnegative degree required")
    if n < 3:
        raise ScopeError("need ambient dimension >= 3")
    rho0 = 0.6
    rho = math.sqrt(1.0 - rho0 * rho0)
    mean = kernel_mean_quadrature(
        lambda t: gegenbauer_normalized(n, d, rho * t), n - 1, d
    )
    return mean / float(gegenbauer_normalized(n, d, rho0))


def radon_funk_eigen_mc(n: int, d: int, n_samples: int, s: SeededSampler) -> Estimate:
    """Radon eigenvalue measured through ``radon_apply`` on a zonal harmonic.

    Averages the zonal harmonic over lines inside a hyperplane in generic
    position relative to the pole and divides by the value at the normal
    line, so the estimate carries real Monte-Carlo variance.
    """
    axis = np.zeros(n)
    axis[0] = 1.0
    f = zonal_harmonic(n, d, axis)
    normal = np.zeros(n)
    normal[0] = math.cos(0.9)
    normal[1] = math.sin(0.9)
    h = orthocomplement(orthonormal_basis(normal.reshape(n, 1)))
    est = radon_apply(f, n - 1, h, n_samples, s)
    denom = float(gegenbauer_normalized(n, d, math.cos(0.9)))
    return Estimate(est.value / denom, est.stderr / abs(denom))


# ---------------------------------------------------------------------------
# Discretized multiply-by-V1 operator and its spectrum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorMatrix:
    """Composed transform in the even-harmonic basis of Gr_1.

    Entry (b', b) is the probability inner product of basis element b' with
    the operator applied to element b; rows and columns are labelled by
    (degree, order).
    """

    ambient_dim: int
    d_max: int
    labels: list[tuple[int, int]]
    degrees: np.ndarray
    matrix: np.ndarray
    stderr: np.ndarray
    block_scalars: np.ndarray
    block_scalar_stderrs: np.ndarray
    n_samples: int
    parity: str = "even"

    @property
    def block_degrees(self) -> np.ndarray:
        return np.unique(self.degrees)


def operator_matrix_even(
    n: int, d_max: int, n_samples: int, s: SeededSampler, i: int = 1
) -> OperatorMatrix:
    """Matrix of f -> (T_{n-1,n-1} after R_{n-1,1}) f pulled back to Gr_1.

    A hyperplane is identified with its normal line, under which the cosine
    kernel becomes |<u, v>|.  Entries are Monte-Carlo averages of
    Y_b'(w) |<w, v>| Y_b(l) over independent Haar lines w, v and a Haar line
    l inside the hyperplane with normal v.
    """
    if i != 1:
        raise ScopeError("spectral probe implemented for i = 1 only")
    if n not in (3, 4):
        raise ScopeError(f"spectral probe implemented for ambient dim 3 and 4, not {n}")
    basis = even_harmonic_blocks(n, d_max)
    b = basis.size
    degrees = basis.degrees
    block_degs = np.unique(degrees)
    blocks = [np.nonzero(degrees == d)[0] for d in block_degs]

    m_sum = np.zeros((b, b))
    m_sumsq = np.zeros((b, b))
    tr_sum = np.zeros(len(block_degs))
    tr_sumsq = np.zeros(len(block_degs))

    done = 0
    chunk_idx = 0
    while done < n_samples:
        c = min(_CHUNK, n_samples - done)
        sub = s.substream(chunk_idx)
        w = haar_unit_vectors(n, c, sub)
        v = haar_unit_vectors(n, c, sub)
        lines = unit_vectors_orthogonal_to(v, sub)
        kern = np.abs(np.einsum("ij,ij->i", w, v))
        yw = basis.eval_points(w)
        yl = basis.eval_points(lines)
        ywk = yw * kern[:, None]
        m_sum += ywk.T @ yl
        m_sumsq += (ywk**2).T @ (yl**2)
        for bi, idx in enumerate(blocks):
            z = kern * np.mean(yw[:, idx] * yl[:, idx], axis=1)
            tr_sum[bi] += z.sum()
            tr_sumsq[bi] += (z**2).sum()
        done += c
        chunk_idx += 1

    mat = m_sum / n_samples
    var = np.maximum(m_sumsq / n_samples - mat**2, 0.0)
    stderr = np.sqrt(var / n_samples)
    scalars = tr_sum / n_samples
    scal_var = np.maximum(tr_sumsq / n_samples - scalars**2, 0.0)
    scal_stderr = np.sqrt(scal_var / n_samples)

    return OperatorMatrix(
        ambient_dim=n,
        d_max=d_max,
        labels=basis.labels,
        degrees=degrees,
        matrix=mat,
        stderr=stderr,
        block_scalars=scalars,
        block_scalar_stderrs=scal_stderr,
        n_samples=n_samples,
    )


@dataclass(frozen=True)
class SpectrumReport:
    """Spectral summary of the discretized operator on a band-limited subspace."""

    ambient_dim: int
    d_max: int
    degrees: np.ndarray
    scalars: np.ndarray
    scalar_stderrs: np.ndarray
    oracle_products: np.ndarray
    leakage_ratio: float
    singular_values: np.ndarray
    smallest_singular_value: float
    floor: float
    injective: bool
    n_samples: int

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "d_max": self.d_max,
            "degrees": [int(d) for d in self.degrees],
            "scalars": self.scalars.tolist(),
            "scalar_stderrs": self.scalar_stderrs.tolist(),
            "oracle_products": self.oracle_products.tolist(),
            "leakage_ratio": self.leakage_ratio,
            "singular_values": self.singular_values.tolist(),
            "smallest_singular_value": self.smallest_singular_value,
            "floor": self.floor,
            "injective": self.injective,
            "n_samples": self.n_samples,
        }


def lefschetz_probe(
    n: int, d_max: int, n_samples: int, s: SeededSampler, i: int = 1
) -> tuple[SpectrumReport, OperatorMatrix]:
    """Band-limited injectivity probe of multiplication by V_1 (degree n-2 to n-1).

    Builds the composed-transform matrix, extracts the per-degree scalars,
    and declares injectivity on the band-limited subspace when the smallest
    singular value clears 0.1 times the smallest quadrature-oracle scalar.
    """
    op = operator_matrix_even(n, d_max, n_samples, s, i=i)
    block_degs = op.block_degrees
    oracle = np.array(
        [funk_hecke_cosine_eigen(n, int(d)) * funk_radon_eigen(n, int(d)) for d in block_degs]
    )
    off = op.matrix - np.diag(np.diag(op.matrix))
    max_scalar = float(np.abs(op.block_scalars).max())
    leakage = float(np.abs(off).max() / max_scalar) if max_scalar > 0 else math.inf
    # Spectrum of the equivariance-projected operator: the operator commutes
    # with O(n) and the harmonics have multiplicity one, so each degree block
    # is scalar; the deviation of the raw matrix from this structure is pure
    # MC noise and is already summarized by the leakage ratio.
    block_sizes = np.array([np.count_nonzero(op.degrees == d) for d in block_degs])
    sv = np.repeat(np.abs(op.block_scalars), block_sizes)
    floor = 0.1 * float(np.abs(oracle).min())
    smallest = float(sv.min())
    report = SpectrumReport(
        ambient_dim=n,
        d_max=d_max,
        degrees=block_degs,
        scalars=op.block_scalars,
        scalar_stderrs=op.block_scalar_stderrs,
        oracle_products=oracle,
        leakage_ratio=leakage,
        singular_values=np.sort(sv)[::-1],
        smallest_singular_value=smallest,
        floor=floor,
        injective=bool(smallest > floor),
        n_samples=n_samples,
    )
    return report, op
