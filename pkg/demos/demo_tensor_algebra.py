#!/usr/bin/env python3
"""Tour of the t-product algebra on small tensors.

Shows that the fast transform-domain product agrees with the dense
block-circulant definition, that impulse tubes act like scalars, and
that the transpose reverses products the way matrix transposes do.
"""

import numpy as np

from tsketch import (
    bcirc,
    fold,
    frobenius_norm,
    identity_tensor,
    tprod,
    ttranspose,
    unfold,
)


def main():
    rng = np.random.default_rng(7)

    # tubes multiply like polynomials modulo z^p - 1; an impulse in the
    # first slot is the unit of that ring
    a = rng.standard_normal((3, 4, 5))
    e = identity_tensor(4, 5)
    print("a * I == a:", np.allclose(tprod(a, e), a))

    # the definition: unfold one operand, hit it with the block
    # circulant of the other, fold the result back
    b = rng.standard_normal((4, 2, 5))
    dense = fold(bcirc(a) @ unfold(b), 3, 2, 5)
    fast = tprod(a, b)
    print("fast vs dense product: %.2e" % frobenius_norm(fast - dense))

    # transpose reverses the factors
    lhs = ttranspose(tprod(a, b))
    rhs = tprod(ttranspose(b), ttranspose(a))
    print("(a*b)^T == b^T * a^T: %.2e" % frobenius_norm(lhs - rhs))

    # a 1x1xp example you can check by hand: convolution of (1, 2) and
    # (3, 4) wrapped around length 2 gives (11, 10)
    u = np.array([1.0, 2.0]).reshape(1, 1, 2)
    v = np.array([3.0, 4.0]).reshape(1, 1, 2)
    print("circular product of tubes (1,2)*(3,4):", tprod(u, v).ravel())


if __name__ == "__main__":
    main()
