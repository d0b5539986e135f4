"""Single-pass randomized sketching and recovery.

``build_sketch`` touches the input tensor once, producing the range
sketch ``y = a * b`` and co-range sketch ``w = c * a`` for Gaussian test
tensors b and c.  The recovery routines read only the sketch: they
orthonormalize y, solve a small least-squares system against w, and
return a tubal-rank-at-most-k approximation of the original tensor.
Everything stays in the spectral domain until one final inverse
transform.

The test tensors have the impulse tube structure (only the first
frontal slice is nonzero), so each of their spectral slices equals that
first slice; the code exploits this instead of transforming them.
"""

import struct
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .core import (
    GOLDEN_SEED_SPLIT,
    _as_tensor3,
    _spectrum_head,
    _tensor_from_head,
    gaussian_random_tensor,
)
from .errors import FormatError, InvalidParams, TriangularBreakdown
from .io import read_block, write_block

__all__ = [
    "SketchParams",
    "SketchState",
    "BoundReport",
    "build_sketch",
    "recover_basic",
    "recover_stable",
    "theoretical_bound",
    "save_sketch",
    "load_sketch",
]

TSK_MAGIC = b"TSK1"
_TSK_PARAMS = struct.Struct("<QQQ")


@dataclass(frozen=True)
class SketchParams:
    """Sketch sizes and the seed the test tensors are drawn from.

    k is the range sketch size (and the rank cap of the recovered
    tensor), l >= k the co-range sketch size.  b is drawn from ``seed``,
    c from ``seed XOR 0x9E3779B97F4A7C15``, so the two are independent
    but both reproducible from one number.
    """

    k: int
    l: int
    seed: int

    def __post_init__(self):
        if not (isinstance(self.k, int) and isinstance(self.l, int)):
            raise InvalidParams("sketch sizes must be integers")
        if self.k < 1 or self.l < self.k:
            raise InvalidParams(f"need 1 <= k <= l, got k={self.k}, l={self.l}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidParams("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class SketchState:
    """Everything recovery needs; the sketched tensor itself is not kept.

    Fields: test tensors ``b`` (n, k, p) and ``c`` (l, m, p), range
    sketch ``y = a * b`` (m, k, p), co-range sketch ``w = c * a``
    (l, n, p), the parameters, and the original shape (m, n, p).
    """

    b: np.ndarray
    c: np.ndarray
    y: np.ndarray
    w: np.ndarray
    params: SketchParams
    shape: tuple


def _orth_columns(mat):
    q, _ = np.linalg.qr(mat, mode="reduced")
    return q


def build_sketch(a, params, orthonormalize=False):
    """Sketch ``a`` in one pass.

    Parameters
    ----------
    a : (m, n, p) real array
    params : SketchParams
    orthonormalize : bool
        Orthonormalize the nonzero slice of each test tensor before
        sketching (columns of b's slice; columns of c's slice, or rows
        when that slice is wide).  Off by default: the error analysis
        assumes raw Gaussian tests.

    Returns
    -------
    SketchState
    """
    a = _as_tensor3(a)
    m, n, p = a.shape
    if params.k > min(m, n):
        raise InvalidParams(
            f"sketch size k={params.k} exceeds min(m, n)={min(m, n)}"
        )
    b = gaussian_random_tensor(n, params.k, p, params.seed)
    c = gaussian_random_tensor(
        params.l, m, p, params.seed ^ GOLDEN_SEED_SPLIT
    )
    if orthonormalize:
        b[:, :, 0] = _orth_columns(b[:, :, 0])
        if params.l >= m:
            c[:, :, 0] = _orth_columns(c[:, :, 0])
        else:
            c[:, :, 0] = _orth_columns(c[:, :, 0].T).T
    fa = _spectrum_head(a)
    y = _tensor_from_head(fa @ b[:, :, 0], p)
    w = _tensor_from_head(c[:, :, 0] @ fa, p)
    return SketchState(b=b, c=c, y=y, w=w, params=params, shape=(m, n, p))


def _recover(state, stabilized):
    p = state.shape[2]
    fy = _spectrum_head(state.y)
    fw = _spectrum_head(state.w)
    c0 = state.c[:, :, 0]
    q, _ = np.linalg.qr(fy)
    cq = c0 @ q
    if stabilized:
        s, t = np.linalg.qr(cq)
        diag = np.abs(np.diagonal(t, axis1=1, axis2=2))
        bad = diag.min(axis=1) <= 1e-12 * np.linalg.norm(t, axis=(1, 2))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise TriangularBreakdown(
                f"sketched system is rank deficient on slice {i}"
            )
        rhs = np.conj(s.transpose(0, 2, 1)) @ fw
        x = np.stack(
            [solve_triangular(ti, ri, lower=False) for ti, ri in zip(t, rhs)]
        )
    else:
        x = np.linalg.pinv(cq, rcond=1e-12 * max(cq.shape[1:])) @ fw
    return _tensor_from_head(q @ x, p)


def recover_basic(state):
    """Recover an approximation from a sketch via a direct pseudoinverse.

    Per spectral slice: thin QR of the range sketch, then
    ``x = pinv(c @ q) @ w``, then ``q @ x``.  The result has tubal rank
    at most k.  Reads nothing but the sketch.
    """
    return _recover(state, stabilized=False)


def recover_stable(state):
    """Recover like :func:`recover_basic`, but solve the least-squares
    system through an extra thin QR of ``c @ q`` and a triangular
    back-substitution.  Same solution, better conditioning; raises
    :class:`TriangularBreakdown` if the triangular factor is singular.
    """
    return _recover(state, stabilized=True)


@dataclass(frozen=True)
class BoundReport:
    """A-priori expected squared-error bound for a sketch size pair.

    ``values[rho]`` holds ``(1 + f(k, l)) * (1 + f(rho, k)) * tail(rho + 1)``
    for every admissible rho in [0, k - 2], where ``f(s, t) = s / (t - s - 1)``.
    ``bound_product`` is the minimum, attained at ``rho_star``.
    ``bound_paper_rhs`` evaluates the cruder form
    ``(k / (l - k - 1)) * (k / (k - rho - 1)) * tail(rho + 1)`` at the
    same rho_star, reported for comparison.
    """

    rho_star: int
    bound_product: float
    bound_paper_rhs: float
    values: np.ndarray


def theoretical_bound(k, l, sigma):
    """Expected-error bound for sketch sizes (k, l) given T-singular values.

    Requires l > k + 1 and k >= 2 so that at least rho = 0 is
    admissible.  The mean squared Frobenius error of the recovered
    tensor is at most ``bound_product`` for Gaussian test tensors.
    """
    sigma = np.asarray(sigma, dtype=np.float64).ravel()
    if k < 2:
        raise InvalidParams(f"bound needs k >= 2, got k={k}")
    if l <= k + 1:
        raise InvalidParams(f"bound needs l > k + 1, got k={k}, l={l}")
    if k - 1 > sigma.size:
        raise InvalidParams(
            f"need at least {k - 1} singular values, got {sigma.size}"
        )
    sq = sigma * sigma
    # tails[j] = sum of sq[j:], so tail energy at index rho + 1 is tails[rho]
    tails = np.concatenate((np.cumsum(sq[::-1])[::-1], [0.0]))
    rho = np.arange(k - 1)
    values = (1.0 + k / (l - k - 1)) * (1.0 + rho / (k - rho - 1)) * tails[rho]
    rho_star = int(np.argmin(values))
    paper_rhs = (
        (k / (l - k - 1)) * (k / (k - rho_star - 1)) * tails[rho_star]
    )
    return BoundReport(
        rho_star=rho_star,
        bound_product=float(values[rho_star]),
        bound_paper_rhs=float(paper_rhs),
        values=values,
    )


def save_sketch(path, state):
    """Serialize a SketchState: magic, k, l, seed, then the four tensors
    b, c, y, w as consecutive T3B blocks."""
    with open(path, "wb") as f:
        f.write(TSK_MAGIC)
        f.write(
            _TSK_PARAMS.pack(state.params.k, state.params.l, state.params.seed)
        )
        for t in (state.b, state.c, state.y, state.w):
            write_block(f, t)


def load_sketch(path):
    """Read a sketch container back, validating shape consistency and the
    impulse structure of the test tensors."""
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != TSK_MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {TSK_MAGIC!r}")
        header = f.read(_TSK_PARAMS.size)
        if len(header) != _TSK_PARAMS.size:
            raise FormatError("truncated sketch header")
        k, l, seed = _TSK_PARAMS.unpack(header)
        b, c, y, w = (read_block(f) for _ in range(4))
        if f.read(1):
            raise FormatError("trailing bytes after sketch payload")
    m, n, p = y.shape[0], b.shape[0], b.shape[2]
    expected = {"b": (n, k, p), "c": (l, m, p), "y": (m, k, p), "w": (l, n, p)}
    for name, t in zip(expected, (b, c, y, w)):
        if t.shape != expected[name]:
            raise FormatError(
                f"inconsistent block {name}: shape {t.shape}, "
                f"expected {expected[name]}"
            )
    if b[:, :, 1:].any() or c[:, :, 1:].any():
        raise FormatError("test tensors must be zero beyond slice 1")
    try:
        params = SketchParams(k=int(k), l=int(l), seed=int(seed))
    except InvalidParams as e:
        raise FormatError(f"invalid stored parameters: {e}") from e
    return SketchState(b=b, c=c, y=y, w=w, params=params, shape=(m, n, p))
