"""Field-generic dense linear algebra: singular values, matrix exponential,
numerical spans, and Haar sampling of the compact classical groups.

Matrices are plain numpy arrays.  Real and complex entries are stored
directly; quaternionic matrices are stored through the standard 2x2 complex
embedding (an n x n quaternionic matrix becomes a 2n x 2n complex one, with
each entry a + bj mapped to the block [[a, b], [-conj(b), conj(a)]], blocks
interleaved).  All dimension bookkeeping downstream accounts for the doubling.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np


class Field(str, Enum):
    """Base field of the group: real, complex, or quaternionic."""

    REAL = "R"
    COMPLEX = "C"
    QUATERNION = "H"


@dataclass(frozen=True)
class Tolerance:
    """Numerical cutoffs used throughout.

    rank_rel: relative singular-value cutoff for numerical ranks.
    entry_abs: absolute entrywise tolerance for identities and group membership.
    """

    rank_rel: float = 1e-9
    entry_abs: float = 1e-10

    def __post_init__(self) -> None:
        if not (0.0 < self.rank_rel < 1.0):
            raise ValueError(f"rank_rel must lie in (0, 1), got {self.rank_rel}")
        if self.entry_abs <= 0.0:
            raise ValueError(f"entry_abs must be positive, got {self.entry_abs}")


DEFAULT_TOLERANCE = Tolerance()


def rng_from(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for stream `key` of the master `seed`.

    Every sampling loop derives one stream per draw from (seed, indices), so
    results do not depend on execution order or degree of parallelism.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def _require_finite(m: np.ndarray) -> None:
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")


def singular_values(m: np.ndarray) -> np.ndarray:
    """Singular values of m in descending order.

    These are the nonnegative square roots of the eigenvalues of m* m; the
    result has length min(rows, cols).
    """
    m = np.asarray(m)
    _require_finite(m)
    return np.linalg.svd(m, compute_uv=False)


def matrix_exp(m: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring of the Taylor series.

    The argument is scaled by a power of two until its max-norm is at most
    1/2, the series is summed to machine precision, and the result is squared
    back up.  Accurate to ~1e-12 entrywise for inputs of norm up to ~10,
    which covers every exponential taken in this package.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix_exp needs a square matrix, got shape {m.shape}")
    _require_finite(m)
    dtype = complex if np.iscomplexobj(m) else float
    a = m.astype(dtype, copy=True)
    n = a.shape[0]

    nrm = np.max(np.abs(a)) * n
    squarings = 0
    if nrm > 0.5:
        squarings = int(np.ceil(np.log2(nrm / 0.5)))
        a /= 2.0**squarings

    result = np.eye(n, dtype=dtype)
    term = np.eye(n, dtype=dtype)
    for k in range(1, 40):
        term = term @ a / k
        result += term
        if np.max(np.abs(term)) < 1e-18:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def real_coordinates(m: np.ndarray) -> np.ndarray:
    """Flatten a matrix to a real coordinate vector (complex splits in two)."""
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return np.concatenate([m.real.ravel(), m.imag.ravel()])
    return np.asarray(m, dtype=float).ravel()


def span_rank(mats: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """Dimension of the real span of a family of equal-shape matrices.

    Each matrix is flattened to its real coordinates; the rank is the number
    of singular values of the stack above rank_rel times the largest one.
    """
    mats = [np.asarray(m) for m in mats]
    if not mats:
        raise ValueError("span_rank needs a nonempty list")
    shape = mats[0].shape
    for m in mats[1:]:
        if m.shape != shape:
            raise ValueError(f"shape mismatch in span_rank: {m.shape} vs {shape}")
    stack = np.stack([real_coordinates(m) for m in mats])
    s = np.linalg.svd(stack, compute_uv=False)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.sum(s > tol.rank_rel * s[0]))


# ---------------------------------------------------------------------------
# Quaternionic embedding

_J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def quaternion_embed(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Embed the quaternionic matrix A + Bj as an interleaved complex matrix.

    Supports a leading batch axis.  The embedding is multiplicative and sends
    the quaternionic conjugate transpose to the complex conjugate transpose.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("component shapes differ")
    n = a.shape[-1]
    z = np.zeros(a.shape[:-2] + (2 * a.shape[-2], 2 * n), dtype=complex)
    z[..., 0::2, 0::2] = a
    z[..., 0::2, 1::2] = b
    z[..., 1::2, 0::2] = -np.conj(b)
    z[..., 1::2, 1::2] = np.conj(a)
    return z


def quaternion_embed_real(m: np.ndarray) -> np.ndarray:
    """Embed a real matrix, viewed as quaternionic, into the complex doubling."""
    m = np.asarray(m, dtype=float)
    return np.kron(m, np.eye(2)).astype(complex)


def quaternion_structure_defect(z: np.ndarray) -> float:
    """How far a complex matrix is from the image of the quaternionic embedding."""
    z = np.asarray(z)
    n2 = z.shape[-1]
    j = np.kron(np.eye(n2 // 2), _J2)
    return float(np.max(np.abs(j @ np.conj(z) @ j.T - z)))


# ---------------------------------------------------------------------------
# Haar sampling

def _gaussians(rngs: Sequence[np.random.Generator], shape: tuple[int, ...]) -> np.ndarray:
    return np.stack([r.standard_normal(shape) for r in rngs])


def haar_orthogonal(n: int, rngs: Sequence[np.random.Generator]) -> np.ndarray:
    """Batch of Haar draws from SO(n), one per generator.

    QR of a Gaussian matrix with the R-diagonal sign correction gives Haar on
    O(n); a fixed column flip moves the determinant -1 half onto SO(n)
    without disturbing the distribution.
    """
    z = _gaussians(rngs, (n, n))
    q, r = np.linalg.qr(z)
    d = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    d = np.where(d == 0.0, 1.0, d)
    q = q * d[:, None, :]
    flip = np.linalg.det(q) < 0
    q[flip, :, -1] *= -1.0
    return q


def _haar_unitary(n: int, rngs: Sequence[np.random.Generator]) -> np.ndarray:
    g = _gaussians(rngs, (2, n, n))
    z = (g[:, 0] + 1j * g[:, 1]) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[:, None, :]


def haar_special_unitary(n: int, rngs: Sequence[np.random.Generator]) -> np.ndarray:
    """Batch of Haar draws from SU(n): Haar U(n) with a global phase correction."""
    q = _haar_unitary(n, rngs)
    det = np.linalg.det(q)
    corr = np.exp(-np.log(det) / n)
    return q * corr[:, None, None]


def haar_symplectic(n: int, rngs: Sequence[np.random.Generator]) -> np.ndarray:
    """Batch of Haar draws from the compact symplectic group Sp(n), embedded.

    Quaternionic Gaussian columns are orthonormalized by modified
    Gram-Schmidt over the quaternions (scalars act on the right), with real
    positive normalization; the result is returned as a 2n x 2n complex
    matrix through the standard embedding.
    """
    g = _gaussians(rngs, (4, n, n))
    a = (g[:, 0] + 1j * g[:, 1]).astype(complex)
    b = (g[:, 2] + 1j * g[:, 3]).astype(complex)
    for j in range(n):
        # two orthogonalization passes keep the defect near machine precision
        for _ in range(2):
            for k in range(j):
                sa = np.sum(np.conj(a[:, :, k]) * a[:, :, j] + b[:, :, k] * np.conj(b[:, :, j]), axis=1)
                sb = np.sum(np.conj(a[:, :, k]) * b[:, :, j] - b[:, :, k] * np.conj(a[:, :, j]), axis=1)
                na = a[:, :, j] - (a[:, :, k] * sa[:, None] - b[:, :, k] * np.conj(sb)[:, None])
                nb = b[:, :, j] - (a[:, :, k] * sb[:, None] + b[:, :, k] * np.conj(sa)[:, None])
                a[:, :, j], b[:, :, j] = na, nb
        nrm = np.sqrt(np.sum(np.abs(a[:, :, j]) ** 2 + np.abs(b[:, :, j]) ** 2, axis=1))
        a[:, :, j] /= nrm[:, None]
        b[:, :, j] /= nrm[:, None]
    return quaternion_embed(a, b)


def block_diag_batch(top: np.ndarray, bottom: np.ndarray) -> np.ndarray:
    """Block-diagonal stack of two batched square families."""
    m, na = top.shape[0], top.shape[-1]
    nb = bottom.shape[-1]
    dtype = np.promote_types(top.dtype, bottom.dtype)
    out = np.zeros((m, na + nb, na + nb), dtype=dtype)
    out[:, :na, :na] = top
    out[:, na:, na:] = bottom
    return out


def haar_compact_pair(p: int, q: int, field: Field,
                      rngs: Sequence[np.random.Generator]) -> np.ndarray:
    """Batch of Haar draws from the maximal compact subgroup K.

    K is SO(p) x SO(q), S(U(p) x U(q)), or Sp(p) x Sp(q) according to the
    field; one draw per generator.  For the complex field the determinant
    condition is enforced by rescaling the last column of the second block,
    which commutes with left translation by the subgroup and therefore
    preserves the Haar property.
    """
    rngs = list(rngs)
    if field is Field.REAL:
        return block_diag_batch(haar_orthogonal(p, rngs), haar_orthogonal(q, rngs))
    if field is Field.COMPLEX:
        u = _haar_unitary(p, rngs)
        v = _haar_unitary(q, rngs)
        c = np.linalg.det(u) * np.linalg.det(v)
        v[:, :, -1] /= c[:, None]
        return block_diag_batch(u, v)
    if field is Field.QUATERNION:
        return block_diag_batch(haar_symplectic(p, rngs), haar_symplectic(q, rngs))
    raise ValueError(f"unknown field {field!r}")


def haar_sample(field: Field, n: int, seed: int) -> np.ndarray:
    """One Haar draw from SO(n), SU(n), or Sp(n), deterministic in the seed.

    The quaternionic draw is returned in the 2n x 2n complex embedding.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rngs = [rng_from(seed)]
    if field is Field.REAL:
        return haar_orthogonal(n, rngs)[0]
    if field is Field.COMPLEX:
        return haar_special_unitary(n, rngs)[0]
    if field is Field.QUATERNION:
        return haar_symplectic(n, rngs)[0]
    raise ValueError(f"unknown field {field!r}")


def unitarity_defect(m: np.ndarray) -> float:
    """Max-norm of m* m - I."""
    m = np.asarray(m)
    n = m.shape[-1]
    return float(np.max(np.abs(np.conj(np.swapaxes(m, -2, -1)) @ m - np.eye(n))))


def parallel_map(fn, items: Iterable, threads: int = 1) -> list:
    """Map preserving order, optionally on a thread pool.

    Results are independent of the thread count because every item is
    processed by a pure function of its own inputs.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
