"""T-SVD factorizations, T-singular values, tubal rank, and tail energy.

Every factorization here works slice by slice in the spectral domain:
transform, factor each of the ``p // 2 + 1`` independent complex slices,
mirror the rest by conjugate symmetry, transform back.  Singular values
are aggregated across slices with the Parseval weight 1/p, which makes
them nonnegative and sorted even when the spatial diagonal of the
f-diagonal factor has sign changes.
"""

from dataclasses import dataclass

import numpy as np

from .core import (
    _as_tensor3,
    _half,
    _mirror,
    _self_conjugate,
    dft_mode3,
    idft_mode3,
)
from .errors import IndexOutOfRange, ShapeMismatch, SvdNoConvergence

__all__ = [
    "DecayTSVD",
    "TQRFactors",
    "decay_tsvd",
    "t_singular_values",
    "tubal_rank",
    "tail_energy",
    "truncate_tsvd",
    "tqr",
    "tpinv",
]


@dataclass(frozen=True)
class DecayTSVD:
    """Factorization ``a = u * s * ttranspose(v)``.

    ``u`` (m, m, p) and ``v`` (n, n, p) are orthogonal tensors and ``s``
    (m, n, p) is f-diagonal.  The spectral slices of ``s`` carry real,
    nonnegative, nonincreasing diagonals; the spatial diagonal entries
    may be negative.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class TQRFactors:
    """Thin t-QR ``y = q * r`` with q partially orthogonal and r
    f-upper-triangular in the spectral domain."""

    q: np.ndarray
    r: np.ndarray


def _slice_svd(mat, full_matrices=False, compute_uv=True):
    try:
        return np.linalg.svd(mat, full_matrices=full_matrices, compute_uv=compute_uv)
    except np.linalg.LinAlgError as e:
        raise SvdNoConvergence(str(e)) from e


def _spectral_slices(fa):
    """Yield (index, slice) over the independent half of a spectrum,
    downcasting self-conjugate slices to real."""
    p = fa.shape[2]
    for i in range(_half(p)):
        sl = fa[:, :, i]
        if _self_conjugate(i, p):
            sl = sl.real
        yield i, sl


def decay_tsvd(a):
    """Factor ``a`` as ``u * s * ttranspose(v)`` with sorted spectral diagonals.

    Each spectral slice gets a full complex SVD with singular values in
    nonincreasing order.  Self-conjugate slices are factored in real
    arithmetic so the assembled factors invert to exactly real tensors
    up to rounding.

    Returns
    -------
    DecayTSVD
    """
    a = _as_tensor3(a)
    m, n, p = a.shape
    fa = dft_mode3(a)
    fu = np.empty((m, m, p), dtype=np.complex128)
    fs = np.zeros((m, n, p), dtype=np.complex128)
    fv = np.empty((n, n, p), dtype=np.complex128)
    d = np.arange(min(m, n))
    for i, sl in _spectral_slices(fa):
        u, s, vh = _slice_svd(sl, full_matrices=True)
        fu[:, :, i] = u
        fs[d, d, i] = s
        fv[:, :, i] = vh.conj().T
    return DecayTSVD(
        u=idft_mode3(_mirror(fu)),
        s=idft_mode3(_mirror(fs)),
        v=idft_mode3(_mirror(fv)),
    )


def t_singular_values(a):
    """T-singular values of ``a``.

    The i-th value is ``sqrt(mean over slices of the squared i-th
    spectral singular value)``; by Parseval this equals the root sum of
    squares of the tube ``s[i, i, :]`` of any valid decay T-SVD.  The
    output is nonincreasing and nonnegative, and its squared sum equals
    ``frobenius_norm(a) ** 2``.

    Returns
    -------
    (min(m, n),) float array, sorted nonincreasing.
    """
    a = _as_tensor3(a)
    m, n, p = a.shape
    acc = np.zeros(min(m, n))
    for i, sl in _spectral_slices(dft_mode3(a)):
        s = _slice_svd(sl, compute_uv=False)
        weight = 1.0 if _self_conjugate(i, p) else 2.0
        acc += weight * s * s
    return np.sqrt(acc / p)


def tubal_rank(a, tol=1e-10):
    """Number of T-singular values above ``tol * sigma_1 * max(m, n)``."""
    a = _as_tensor3(a)
    sv = t_singular_values(a)
    return int(np.count_nonzero(sv > tol * sv[0] * max(a.shape[0], a.shape[1])))


def tail_energy(a, j):
    """Squared tail ``sum of sigma_i^2 for i >= j``.

    This is the squared error of the best tubal-rank-(j-1)
    approximation.  ``j`` runs from 1 (full energy, equal to the squared
    Frobenius norm) to min(m, n) + 1 (exactly zero).
    """
    a = _as_tensor3(a)
    r = min(a.shape[0], a.shape[1])
    if not 1 <= j <= r + 1:
        raise IndexOutOfRange(f"tail index {j} outside [1, {r + 1}]")
    sv = t_singular_values(a)
    return float(np.sum(sv[j - 1:] ** 2))


def truncate_tsvd(a, k):
    """Best tubal-rank-k approximation of ``a``.

    Keeps the top k singular triplets of every spectral slice.  The
    squared approximation error equals ``tail_energy(a, k + 1)``.
    """
    a = _as_tensor3(a)
    m, n, p = a.shape
    if not 1 <= k <= min(m, n):
        raise IndexOutOfRange(f"truncation rank {k} outside [1, {min(m, n)}]")
    out = np.empty((m, n, p), dtype=np.complex128)
    for i, sl in _spectral_slices(dft_mode3(a)):
        u, s, vh = _slice_svd(sl)
        out[:, :, i] = (u[:, :k] * s[:k]) @ vh[:k]
    return idft_mode3(_mirror(out))


def tqr(y):
    """Thin t-QR factorization of an (m, k, p) tensor with m >= k.

    Runs an economy QR on each spectral slice.  The q factor satisfies
    ``tprod(ttranspose(q), q) == identity_tensor(k, p)`` and the product
    ``tprod(q, r)`` reconstructs ``y``.
    """
    y = _as_tensor3(y)
    m, k, p = y.shape
    if m < k:
        raise ShapeMismatch(f"thin QR needs m >= k, got shape {y.shape}")
    fq = np.empty((m, k, p), dtype=np.complex128)
    fr = np.empty((k, k, p), dtype=np.complex128)
    for i, sl in _spectral_slices(dft_mode3(y)):
        q, r = np.linalg.qr(sl, mode="reduced")
        fq[:, :, i] = q
        fr[:, :, i] = r
    return TQRFactors(q=idft_mode3(_mirror(fq)), r=idft_mode3(_mirror(fr)))


def _pinv_matrix(mat):
    """Pseudoinverse of one spectral slice via SVD with a relative cutoff."""
    u, s, vh = _slice_svd(mat)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((mat.shape[1], mat.shape[0]), dtype=mat.dtype)
    keep = s > 1e-12 * s[0] * max(mat.shape)
    return (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T


def tpinv(a):
    """Tensor Moore-Penrose pseudoinverse.

    The spectral slices of the result are the matrix pseudoinverses of
    the spectral slices of ``a``, which makes ``bcirc`` of the result
    the matrix pseudoinverse of ``bcirc(a)``.  All four Penrose
    identities hold in the t-product sense.
    """
    a = _as_tensor3(a)
    m, n, p = a.shape
    out = np.empty((n, m, p), dtype=np.complex128)
    for i, sl in _spectral_slices(dft_mode3(a)):
        out[:, :, i] = _pinv_matrix(sl)
    return idft_mode3(_mirror(out))
