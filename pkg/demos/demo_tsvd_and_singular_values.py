#!/usr/bin/env python3
"""Why tensor singular values are aggregated across the spectrum.

A tensor whose frontal slices are all -I looks rank deficient if you
only read the spatial diagonal (every entry is -1), but its two
t-singular values are both sqrt(3): the energy lives in one spectral
slice.  The demo also shows the truncation error landing exactly on
the tail energy, which is what makes the truncated factorization the
best approximation at every rank.
"""

import numpy as np

from tsketch import (
    decay_tsvd,
    frobenius_norm,
    t_singular_values,
    tail_energy,
    tprod,
    truncate_tsvd,
    ttranspose,
    tubal_rank,
)


def main():
    neg = np.zeros((2, 2, 3))
    for k in range(3):
        neg[:, :, k] = -np.eye(2)
    print("signed f-diagonal example")
    print("  t-singular values:", t_singular_values(neg))
    print("  tubal rank:", tubal_rank(neg))

    rng = np.random.default_rng(21)
    a = rng.standard_normal((6, 5, 4))
    f = decay_tsvd(a)
    recon = tprod(tprod(f.u, f.s), ttranspose(f.v))
    print("random 6x5x4")
    print("  reconstruction error: %.2e" % frobenius_norm(recon - a))

    sv = t_singular_values(a)
    print("  sum of squared values vs squared norm: %.6f vs %.6f"
          % (np.sum(sv**2), frobenius_norm(a) ** 2))

    print("  rank  truncation err^2   tail energy")
    for k in range(1, 6):
        err2 = frobenius_norm(a - truncate_tsvd(a, k)) ** 2
        print("  %4d  %16.10f  %12.10f" % (k, err2, tail_energy(a, k + 1)))


if __name__ == "__main__":
    main()
