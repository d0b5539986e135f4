"""Third-order tensor algebra built on the t-product.

A tensor is a real float64 array of shape ``(m, n, p)``.  The third axis
indexes the p frontal slices ``A[:, :, k]``; the fiber ``A[i, j, :]`` is
called a tube.  The t-product of two tensors is the block-circulant
matrix product of their slices, which the mode-3 DFT turns into p
independent matrix products, one per spectral slice.  All heavy algebra
in this package happens in that spectral domain.

Spectral tensors are complex arrays of the same shape.  Transforms of
real tensors obey the conjugate symmetry ``S[:, :, p - i] == conj(S[:, :, i])``,
so facewise work only touches the first ``p // 2 + 1`` slices and the rest
are mirrored.
"""

import numpy as np

from .errors import ImaginaryResidual, ShapeMismatch

__all__ = [
    "dft_mode3",
    "idft_mode3",
    "bcirc",
    "unfold",
    "fold",
    "tprod",
    "ttranspose",
    "identity_tensor",
    "gaussian_random_tensor",
    "frobenius_norm",
    "inner_product",
    "inf_norm",
]

GOLDEN_SEED_SPLIT = 0x9E3779B97F4A7C15


def _as_tensor3(a, name="tensor"):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 3:
        raise ShapeMismatch(f"{name} must have 3 axes, got shape {a.shape}")
    return a


def _half(p):
    # number of spectral slices that carry independent information
    return p // 2 + 1


def _self_conjugate(i, p):
    # DC slice always; Nyquist slice when p is even
    return i == 0 or (p % 2 == 0 and i == p // 2)


def _mirror(s):
    """Fill slices h..p-1 of a spectral array with the conjugate mirror."""
    p = s.shape[2]
    h = _half(p)
    if h < p:
        s[:, :, h:] = np.conj(s[:, :, p - h:0:-1])
    return s


def dft_mode3(t):
    """Mode-3 DFT: the unnormalized length-p DFT of every tube.

    Parameters
    ----------
    t : (m, n, p) real array

    Returns
    -------
    (m, n, p) complex array whose slice i holds the transform evaluated
    at frequency i.  For real input the result is conjugate symmetric
    across the third axis.
    """
    t = _as_tensor3(t)
    return np.fft.fft(t, axis=2)


def idft_mode3(s, tol=1e-8):
    """Inverse of :func:`dft_mode3`, with a realness guard.

    The inverse transform of a valid spectral tensor is real up to
    rounding.  Any entry whose imaginary part exceeds
    ``tol * (1 + |real part|)`` triggers :class:`ImaginaryResidual`,
    since that indicates the input was not the transform of a real
    tensor.  The imaginary part is discarded otherwise.
    """
    s = np.asarray(s, dtype=np.complex128)
    if s.ndim != 3:
        raise ShapeMismatch(f"spectral tensor must have 3 axes, got shape {s.shape}")
    x = np.fft.ifft(s, axis=2)
    bad = np.abs(x.imag) > tol * (1.0 + np.abs(x.real))
    if bad.any():
        worst = np.abs(x.imag)[bad].max()
        raise ImaginaryResidual(
            f"imaginary residual {worst:.3e} exceeds tolerance {tol:.1e}"
        )
    return np.ascontiguousarray(x.real)


def unfold(t):
    """Stack the frontal slices vertically into an (m*p, n) matrix."""
    t = _as_tensor3(t)
    m, n, p = t.shape
    return t.transpose(2, 0, 1).reshape(m * p, n)


def fold(mat, m, n, p):
    """Inverse of :func:`unfold`: rebuild the (m, n, p) tensor."""
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape != (m * p, n):
        raise ShapeMismatch(
            f"cannot fold shape {mat.shape} into ({m}, {n}, {p})"
        )
    return np.ascontiguousarray(mat.reshape(p, m, n).transpose(1, 2, 0))


def bcirc(t):
    """Block-circulant matrix of a tensor.

    Block (r, c) of the (m*p, n*p) result is the frontal slice
    ``A[:, :, (r - c) mod p]``, so the first block column is
    ``unfold(t)`` and each later block column is a block downshift of
    the previous one.
    """
    t = _as_tensor3(t)
    m, n, p = t.shape
    out = np.empty((m * p, n * p))
    for c in range(p):
        for r in range(p):
            out[r * m:(r + 1) * m, c * n:(c + 1) * n] = t[:, :, (r - c) % p]
    return out


def _spectrum_head(t):
    """Independent half of the mode-3 spectrum of a real tensor, laid
    out as a contiguous (p//2 + 1, m, n) stack of slices.  The mirrored
    half is redundant by conjugate symmetry, so batched slice-wise
    linear algebra only ever needs this stack.
    """
    return np.ascontiguousarray(np.fft.rfft(t, axis=2).transpose(2, 0, 1))


def _tensor_from_head(head, p):
    """Real tensor whose spectrum head is the given (h, m, n) stack.

    Inverse of :func:`_spectrum_head`; the mirrored slices are implied,
    so this never materializes them.
    """
    return np.fft.irfft(head.transpose(1, 2, 0), n=p, axis=2)


def tprod(a, b):
    """T-product of two tensors.

    Computed facewise in the spectral domain: slice i of the transform
    of the result is the matrix product of slice i of the transforms of
    the operands.  Equals ``fold(bcirc(a) @ unfold(b))``.

    Parameters
    ----------
    a : (m, s, p) real array
    b : (s, n, p) real array

    Returns
    -------
    (m, n, p) real array
    """
    a = _as_tensor3(a, "a")
    b = _as_tensor3(b, "b")
    if a.shape[1] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise ShapeMismatch(f"cannot t-multiply shapes {a.shape} and {b.shape}")
    return _tensor_from_head(_spectrum_head(a) @ _spectrum_head(b), a.shape[2])


def ttranspose(a):
    """Tensor transpose: slice 1 transposed, slices 2..p transposed and
    reversed, so that ``bcirc(ttranspose(a)) == bcirc(a).T`` exactly."""
    a = _as_tensor3(a)
    at = a.transpose(1, 0, 2)
    return np.ascontiguousarray(
        np.concatenate((at[:, :, :1], at[:, :, :0:-1]), axis=2)
    )


def identity_tensor(n, p):
    """Identity for the t-product: first slice I_n, the rest zero."""
    out = np.zeros((n, n, p))
    out[:, :, 0] = np.eye(n)
    return out


def gaussian_random_tensor(m, n, p, seed):
    """Gaussian test tensor: slice 1 i.i.d. standard normal, rest zero.

    Because only the first slice is nonzero, every spectral slice of the
    result equals that same real matrix.  The draw is a pure function of
    ``seed``; identical seed and shape give a bit-identical tensor.
    """
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    out = np.zeros((m, n, p))
    out[:, :, 0] = np.random.default_rng(seed).standard_normal((m, n))
    return out


def frobenius_norm(a):
    """Root sum of squares of all entries."""
    a = _as_tensor3(a)
    return float(np.linalg.norm(a.ravel()))


def inner_product(a, b):
    """Euclidean inner product of two same-shaped tensors."""
    a = _as_tensor3(a, "a")
    b = _as_tensor3(b, "b")
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes {a.shape} and {b.shape} differ")
    return float(np.dot(a.ravel(), b.ravel()))


def inf_norm(a):
    """Largest entry magnitude."""
    a = _as_tensor3(a)
    return float(np.abs(a).max())
