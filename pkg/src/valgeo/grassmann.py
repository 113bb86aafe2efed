"""Linear subspaces of R^n, Haar sampling, and angle functionals.

A subspace is stored as an orthonormal basis (n x k matrix).  The two scalar
functionals are

    cos_angle(E, F)  -- volume contraction factor of the orthogonal
                        projection of E onto F (product of the cosines of
                        the principal angles),
    sin_angle(E, F)  -- cos_angle(E, orthocomplement(F)),

with the conventions cos = 1 on the zero subspace (empty product) and the
higher-dimensional branch evaluated through orthocomplements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import unit_ball_volume
from .errors import DimensionError, RankError

ORTHO_TOL = 1e-12
RANK_TOL = 1e-10


@dataclass(frozen=True)
class Subspace:
    """A k-dimensional linear subspace of R^n given by an orthonormal basis.

    Attributes
    ----------
    ambient_dim : int
        Dimension n of the surrounding space.
    basis : ndarray, shape (n, k)
        Orthonormal columns spanning the subspace.  k = 0 (empty basis)
        encodes the zero subspace.
    """

    ambient_dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.ascontiguousarray(np.asarray(self.basis, dtype=float))
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise DimensionError(
                f"basis shape {b.shape} incompatible with ambient dim {self.ambient_dim}"
            )
        if b.shape[1] > self.ambient_dim:
            raise DimensionError(f"subspace dim {b.shape[1]} exceeds ambient {self.ambient_dim}")
        if b.shape[1] > 0:
            gram = b.T @ b
            if not np.allclose(gram, np.eye(b.shape[1]), atol=ORTHO_TOL):
                raise ValueError("basis columns are not orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        """The n x n orthogonal projection matrix onto the subspace."""
        return self.basis @ self.basis.T

    def contains_vector(self, v: np.ndarray, tol: float = 1e-9) -> bool:
        v = np.asarray(v, dtype=float)
        return bool(np.linalg.norm(self.projector() @ v - v) <= tol * (1.0 + np.linalg.norm(v)))

    def __repr__(self) -> str:
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


def full_space(n: int) -> Subspace:
    return Subspace(n, np.eye(n))


def zero_subspace(n: int) -> Subspace:
    return Subspace(n, np.zeros((n, 0)))


def coordinate_subspace(n: int, axes) -> Subspace:
    """Span of the given coordinate axes (0-based indices)."""
    axes = list(axes)
    b = np.zeros((n, len(axes)))
    for j, a in enumerate(axes):
        b[a, j] = 1.0
    return Subspace(n, b)


class SeededSampler:
    """Deterministic random stream keyed by (seed, stream_id).

    The same (seed, stream_id) pair reproduces the identical sequence on any
    run.  ``substream`` derives independent child streams with a fixed
    labelling, so chunked Monte-Carlo loops give results independent of how
    the chunks are scheduled.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,)))
        )

    @property
    def rng(self) -> np.random.Generator:
        return self._rng

    def substream(self, index: int) -> "SeededSampler":
        """Child sampler labelled by ``index``; independent of call order."""
        child = SeededSampler.__new__(SeededSampler)
        child.seed = self.seed
        child.stream_id = self.stream_id
        child._rng = np.random.Generator(
            np.random.PCG64(
                np.random.SeedSequence(
                    entropy=self.seed, spawn_key=(self.stream_id, int(index))
                )
            )
        )
        return child

    def standard_normal(self, shape) -> np.ndarray:
        return self._rng.standard_normal(shape)

    def uniform(self, low=0.0, high=1.0, size=None) -> np.ndarray:
        return self._rng.uniform(low, high, size)

    def __repr__(self) -> str:
        return f"SeededSampler(seed={self.seed}, stream_id={self.stream_id})"


def _signed_qr(m: np.ndarray) -> np.ndarray:
    """QR orthonormalization with the sign of R's diagonal fixed positive.

    Makes the decomposition unique for full-rank input, so Haar sampling is
    reproducible bit for bit.
    """
    q, r = np.linalg.qr(m)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def orthonormal_basis(m: np.ndarray) -> Subspace:
    """Subspace spanned by the columns of ``m``.

    Raises
    ------
    RankError
        If the columns are linearly dependent (threshold 1e-10 relative).
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise DimensionError("expected a 2-d matrix")
    n, k = m.shape
    if k == 0:
        return zero_subspace(n)
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size < k or sv[-1] <= RANK_TOL * max(1.0, sv[0]):
        raise RankError(f"matrix of shape {m.shape} is rank deficient")
    return Subspace(n, _signed_qr(m))


def haar_subspace(n: int, k: int, s: SeededSampler) -> Subspace:
    """Haar (rotation-invariant) random k-subspace of R^n.

    Orthonormalizes an n x k matrix of iid standard Gaussians; the resulting
    distribution is the unique O(n)-invariant probability measure on the
    Grassmannian.
    """
    if not 0 <= k <= n:
        raise DimensionError(f"need 0 <= k <= n, got k={k}, n={n}")
    if k == 0:
        return zero_subspace(n)
    g = s.standard_normal((n, k))
    return Subspace(n, _signed_qr(g))


def orthocomplement(e: Subspace) -> Subspace:
    """The orthogonal complement, of dimension n - dim(e)."""
    n, k = e.ambient_dim, e.dim
    if k == 0:
        return full_space(n)
    if k == n:
        return zero_subspace(n)
    q, _ = np.linalg.qr(e.basis, mode="complete")
    comp = q[:, k:]
    # Column signs of the complete factor are arbitrary; fix them for
    # reproducibility.
    signs = np.sign(comp[np.argmax(np.abs(comp), axis=0), np.arange(comp.shape[1])])
    signs[signs == 0] = 1.0
    return Subspace(n, comp * signs)


def span_sum(e: Subspace, f: Subspace) -> Subspace:
    """The linear span of E union F (dimension by rank with threshold 1e-10)."""
    if e.ambient_dim != f.ambient_dim:
        raise DimensionError("ambient dimensions differ")
    n = e.ambient_dim
    stacked = np.hstack([e.basis, f.basis])
    if stacked.shape[1] == 0:
        return zero_subspace(n)
    u, sv, _ = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(sv > RANK_TOL * max(1.0, sv[0])))
    return Subspace(n, u[:, :rank])


def cos_angle(e: Subspace, f: Subspace) -> float:
    """|cos(E, F)|: the factor by which projection onto F scales dim(E)-volume.

    Computed as the product of the singular values of Q_F^T Q_E when
    dim E <= dim F; when dim E > dim F it is evaluated on the
    orthocomplements, matching the volume-ratio definition on the nose.
    Conventions: the zero subspace gives 1 (empty product).
    """
    if e.ambient_dim != f.ambient_dim:
        raise DimensionError("ambient dimensions differ")
    if e.dim == 0:
        return 1.0
    if e.dim > f.dim:
        return cos_angle(orthocomplement(e), orthocomplement(f))
    if f.dim == e.ambient_dim:
        return 1.0
    sv = np.linalg.svd(f.basis.T @ e.basis, compute_uv=False)
    return float(np.prod(np.clip(sv, 0.0, 1.0)))


def sin_angle(e: Subspace, f: Subspace) -> float:
    """|sin(E, F)| = |cos(E, orthocomplement(F))|."""
    return cos_angle(e, orthocomplement(f))


def sample_containing(h: Subspace, i: int, s: SeededSampler) -> Subspace:
    """Haar-random i-subspace containing H.

    Returns H + W where W is Haar in the orthocomplement of H; the law is
    invariant under the stabilizer of H in O(n).
    """
    n, k = h.ambient_dim, h.dim
    if i <= k or i > n:
        raise DimensionError(f"need dim H < i <= n, got dim H={k}, i={i}, n={n}")
    comp = orthocomplement(h)
    g = s.standard_normal((n - k, i - k))
    w = comp.basis @ _signed_qr(g)
    return Subspace(n, np.hstack([h.basis, w]))


def sample_within(h: Subspace, i: int, s: SeededSampler) -> Subspace:
    """Haar-random i-subspace contained in H."""
    n, k = h.ambient_dim, h.dim
    if i >= k or i < 0:
        raise DimensionError(f"need 0 <= i < dim H, got dim H={k}, i={i}")
    if i == 0:
        return zero_subspace(n)
    g = s.standard_normal((k, i))
    return Subspace(n, h.basis @ _signed_qr(g))


def ellipsoid_image_volume(a: np.ndarray, l: Subspace) -> float:
    """Volume of the image A(D_L) of the unit ball of L under a linear map.

    With d = dim L this is kappa_d times the product of the singular values
    of A restricted to L; zero when the restriction is rank deficient.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[1] != l.ambient_dim:
        raise DimensionError(f"map shape {a.shape} incompatible with ambient {l.ambient_dim}")
    d = l.dim
    if d == 0:
        return 0.0
    if d > a.shape[0]:
        raise DimensionError(f"dim L = {d} exceeds target dimension {a.shape[0]}")
    sv = np.linalg.svd(a @ l.basis, compute_uv=False)
    return float(unit_ball_volume(d) * np.prod(sv))


# ---------------------------------------------------------------------------
# Vectorized sampling helpers.  Distributionally identical to looping the
# public samplers; unit tests pin the agreement.
# ---------------------------------------------------------------------------


def haar_unit_vectors(n: int, count: int, s: SeededSampler) -> np.ndarray:
    """(count, n) array of independent uniform unit vectors."""
    g = s.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def haar_bases_batch(n: int, k: int, count: int, s: SeededSampler) -> np.ndarray:
    """(count, n, k) stack of independent Haar orthonormal bases."""
    g = s.standard_normal((count, n, k))
    q, r = np.linalg.qr(g)
    diag = np.einsum("sii->si", r)
    signs = np.sign(diag)
    signs[signs == 0] = 1.0
    return q * signs[:, None, :]


def unit_vectors_orthogonal_to(v: np.ndarray, s: SeededSampler) -> np.ndarray:
    """For each row v_i, a uniform unit vector in the hyperplane v_i^perp."""
    v = np.asarray(v, dtype=float)
    g = s.standard_normal(v.shape)
    g -= v * np.einsum("ij,ij->i", g, v)[:, None]
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def cos_angles_with_bases(l: Subspace, bases: np.ndarray) -> np.ndarray:
    """cos_angle(L, R_s) for a stack of bases R_s of dimension >= dim L."""
    k = l.dim
    if k == 0:
        return np.ones(bases.shape[0])
    m = np.einsum("snk,nj->skj", bases, l.basis)
    if m.shape[1] == m.shape[2]:
        return np.abs(np.linalg.det(m))
    sv = np.linalg.svd(m, compute_uv=False)
    return np.prod(np.clip(sv, 0.0, 1.0), axis=1)
