import numpy as np
import pytest

from tsketch import (
    FormatError,
    InvalidParams,
    SketchParams,
    TriangularBreakdown,
    build_sketch,
    frobenius_norm,
    gaussian_random_tensor,
    identity_tensor,
    load_sketch,
    recover_basic,
    recover_stable,
    save_sketch,
    theoretical_bound,
    tpinv,
    tprod,
    tqr,
    ttranspose,
)
from oracles import bcirc_tprod


def low_rank(m, n, p, r, seed):
    rng = np.random.default_rng(seed)
    return tprod(rng.standard_normal((m, r, p)), rng.standard_normal((r, n, p)))


def test_sketch_shapes():
    rng = np.random.default_rng(61)
    a = rng.standard_normal((4, 5, 3))
    st = build_sketch(a, SketchParams(k=2, l=3, seed=0))
    assert st.y.shape == (4, 2, 3)
    assert st.w.shape == (3, 5, 3)
    assert st.b.shape == (5, 2, 3)
    assert st.c.shape == (3, 4, 3)
    assert st.shape == (4, 5, 3)


def test_sketch_of_zero_tensor():
    st = build_sketch(np.zeros((4, 5, 3)), SketchParams(k=2, l=3, seed=0))
    assert not st.y.any()
    assert not st.w.any()


def test_sketch_matches_bcirc_oracle():
    rng = np.random.default_rng(62)
    a = rng.standard_normal((4, 5, 3))
    st = build_sketch(a, SketchParams(k=2, l=4, seed=17))
    y = bcirc_tprod(a, st.b)
    w = bcirc_tprod(st.c, a)
    assert np.linalg.norm(st.y - y) <= 1e-10 * (1 + np.linalg.norm(y))
    assert np.linalg.norm(st.w - w) <= 1e-10 * (1 + np.linalg.norm(w))


def test_sketch_test_tensors_structure_and_independence():
    a = np.zeros((4, 5, 3))
    a[0, 0, 0] = 1.0
    st = build_sketch(a, SketchParams(k=2, l=3, seed=5))
    assert not st.b[:, :, 1:].any()
    assert not st.c[:, :, 1:].any()
    # b comes straight from the seed, c from the split seed
    assert np.array_equal(st.b, gaussian_random_tensor(5, 2, 3, seed=5))
    assert st.c.any()
    assert not np.array_equal(st.c, gaussian_random_tensor(3, 4, 3, seed=5))


def test_sketch_determinism():
    rng = np.random.default_rng(63)
    a = rng.standard_normal((4, 5, 3))
    s1 = build_sketch(a, SketchParams(k=2, l=3, seed=11))
    s2 = build_sketch(a, SketchParams(k=2, l=3, seed=11))
    assert np.array_equal(s1.y, s2.y)
    assert np.array_equal(s1.w, s2.w)
    assert np.array_equal(s1.b, s2.b)
    assert np.array_equal(s1.c, s2.c)


def test_sketch_param_validation():
    a = np.zeros((4, 5, 3))
    a[0, 0, 0] = 1.0
    with pytest.raises(InvalidParams):
        SketchParams(k=10, l=5, seed=0)
    with pytest.raises(InvalidParams):
        SketchParams(k=0, l=5, seed=0)
    with pytest.raises(InvalidParams):
        build_sketch(a, SketchParams(k=5, l=6, seed=0))


def test_sketch_state_does_not_keep_the_input():
    a = np.zeros((4, 5, 3))
    a[0, 0, 0] = 1.0
    st = build_sketch(a, SketchParams(k=2, l=3, seed=0))
    held = {id(v) for v in vars(st).values() if isinstance(v, np.ndarray)}
    assert id(a) not in held


def test_orthonormalized_tests():
    rng = np.random.default_rng(64)
    a = rng.standard_normal((6, 7, 3))
    st = build_sketch(a, SketchParams(k=3, l=5, seed=2), orthonormalize=True)
    b0 = st.b[:, :, 0]
    assert np.allclose(b0.T @ b0, np.eye(3), atol=1e-12)
    c0 = st.c[:, :, 0]  # 5x6 is wide, so rows are orthonormalized
    assert np.allclose(c0 @ c0.T, np.eye(5), atol=1e-12)
    assert np.allclose(st.y, tprod(a, st.b), atol=1e-10)


@pytest.mark.parametrize("recover", [recover_basic, recover_stable])
def test_exact_recovery_of_low_rank(recover):
    for seed in range(20):
        a = low_rank(12, 10, 3, r=3, seed=seed)
        st = build_sketch(a, SketchParams(k=5, l=11, seed=1000 + seed))
        ahat = recover(st)
        rel = frobenius_norm(a - ahat) / frobenius_norm(a)
        assert rel <= 1e-6


@pytest.mark.parametrize("recover", [recover_basic, recover_stable])
def test_recover_zero(recover):
    st = build_sketch(np.zeros((4, 5, 3)), SketchParams(k=2, l=3, seed=0))
    assert not recover(st).any()


def test_recoveries_agree():
    rng = np.random.default_rng(65)
    a = rng.standard_normal((20, 20, 4))
    st = build_sketch(a, SketchParams(k=5, l=12, seed=9))
    x1 = recover_basic(st)
    x2 = recover_stable(st)
    assert np.linalg.norm(x1 - x2) <= 1e-8 * np.linalg.norm(x1)


def test_projection_split_identity():
    rng = np.random.default_rng(66)
    a = rng.standard_normal((20, 20, 4))
    st = build_sketch(a, SketchParams(k=5, l=12, seed=21))
    ahat = recover_basic(st)
    q = tqr(st.y).q
    x = tprod(ttranspose(q), ahat)
    qta = tprod(ttranspose(q), a)
    lhs = frobenius_norm(a - ahat) ** 2
    rhs = frobenius_norm(a - tprod(q, qta)) ** 2 + frobenius_norm(x - qta) ** 2
    assert abs(lhs - rhs) <= 1e-8 * rhs


def test_recovered_rank_is_at_most_k():
    from tsketch import tubal_rank

    rng = np.random.default_rng(67)
    a = rng.standard_normal((10, 9, 3))
    st = build_sketch(a, SketchParams(k=4, l=9, seed=3))
    assert tubal_rank(recover_basic(st)) <= 4


def test_degenerate_k_equals_min_dim():
    rng = np.random.default_rng(68)
    a = rng.standard_normal((6, 8, 3))
    st = build_sketch(a, SketchParams(k=6, l=13, seed=4))
    # the range sketch spans everything, so recovery reproduces a
    assert frobenius_norm(recover_stable(st) - a) <= 1e-8 * frobenius_norm(a)


def test_stable_breakdown_on_degenerate_sketch():
    a = np.zeros((4, 4, 2))
    a[0, 0, 0] = 1.0
    st = build_sketch(a, SketchParams(k=2, l=5, seed=7))
    # zero out the co-range test tensor: c*q then has rank 0
    broken = type(st)(
        b=st.b, c=np.zeros_like(st.c), y=st.y, w=st.w,
        params=st.params, shape=st.shape,
    )
    with pytest.raises(TriangularBreakdown):
        recover_stable(broken)


def test_unbiasedness_of_least_squares_stage():
    # mean over co-range draws of x - q^T * a vanishes entrywise
    rng = np.random.default_rng(69)
    m, n, p, k, l = 12, 9, 3, 3, 7
    a = rng.standard_normal((m, n, p))
    q = tqr(tprod(a, gaussian_random_tensor(n, k, p, seed=1))).q
    qta = tprod(ttranspose(q), a)
    draws = 300
    acc = np.zeros_like(qta)
    acc2 = np.zeros_like(qta)
    for t in range(draws):
        c = gaussian_random_tensor(l, m, p, seed=50_000 + t)
        x = tprod(tpinv(tprod(c, q)), tprod(c, a))
        d = x - qta
        acc += d
        acc2 += d * d
    mean = acc / draws
    sd = np.sqrt(np.maximum(acc2 / draws - mean**2, 0.0))
    assert np.all(np.abs(mean) <= 4.0 * sd / np.sqrt(draws) + 1e-12)


def test_gaussian_product_isometry():
    # E |c * g * kk * b|_F^2 = |c|^2 |b|^2 for impulse-structured c, b
    # and kk the identity tensor
    m2, p = 4, 2
    c = gaussian_random_tensor(3, 4, p, seed=301)
    b = gaussian_random_tensor(4, 3, p, seed=302)
    kk = identity_tensor(m2, p)
    target = frobenius_norm(c) ** 2 * frobenius_norm(b) ** 2
    draws = 1500
    vals = np.empty(draws)
    for t in range(draws):
        g = gaussian_random_tensor(4, m2, p, seed=90_000 + t)
        vals[t] = frobenius_norm(tprod(tprod(c, tprod(g, kk)), b)) ** 2
    se = vals.std(ddof=1) / np.sqrt(draws)
    assert abs(vals.mean() - target) <= 3.0 * se


def test_bound_head_factor():
    rep = theoretical_bound(10, 22, np.ones(50))
    # value at rho = 0 is (1 + f(10, 22)) * tau_1^2 with f(10, 22) = 10/11
    assert abs(rep.values[0] - (21.0 / 11.0) * 50.0) <= 1e-12


def test_bound_zero_tail_rank_one():
    sigma = np.zeros(10)
    sigma[0] = 1.0
    rep = theoretical_bound(5, 12, sigma)
    assert rep.bound_product == 0.0
    assert rep.rho_star == 1


def test_bound_flat_spectrum_scan():
    sigma = np.ones(50)
    k, l = 10, 22
    rep = theoretical_bound(k, l, sigma)
    # independent exhaustive scan
    def f(s, t):
        return s / (t - s - 1)

    best_rho, best_val = None, np.inf
    for rho in range(k - 1):
        tail = np.sum(sigma[rho:] ** 2)
        val = (1 + f(k, l)) * (1 + f(rho, k)) * tail
        assert abs(val - rep.values[rho]) <= 1e-12 * (1 + val)
        if val < best_val:
            best_rho, best_val = rho, val
    assert rep.rho_star == best_rho
    assert abs(rep.bound_product - best_val) <= 1e-12
    # once the table starts growing it never falls again
    diffs = np.diff(rep.values)
    rising = np.nonzero(diffs > 0)[0]
    if rising.size:
        assert np.all(diffs[rising[0]:] >= 0)


def test_bound_paper_rhs_at_minimizer():
    sigma = np.linspace(2.0, 0.1, 30)
    k, l = 6, 15
    rep = theoretical_bound(k, l, sigma)
    rho = rep.rho_star
    tail = np.sum(sigma[rho:] ** 2)
    want = (k / (l - k - 1)) * (k / (k - rho - 1)) * tail
    assert abs(rep.bound_paper_rhs - want) <= 1e-12 * (1 + want)


def test_bound_param_validation():
    with pytest.raises(InvalidParams):
        theoretical_bound(5, 6, np.ones(10))
    with pytest.raises(InvalidParams):
        theoretical_bound(1, 10, np.ones(10))
    with pytest.raises(InvalidParams):
        theoretical_bound(8, 20, np.ones(3))


def test_sketch_container_round_trip(tmp_path):
    rng = np.random.default_rng(70)
    a = rng.standard_normal((6, 7, 4))
    st = build_sketch(a, SketchParams(k=3, l=7, seed=123))
    path = tmp_path / "s.tsk"
    save_sketch(path, st)
    back = load_sketch(path)
    assert back.params == st.params
    for field in ("b", "c", "y", "w"):
        assert np.array_equal(getattr(back, field), getattr(st, field))
    assert np.array_equal(recover_stable(back), recover_stable(st))


def test_sketch_container_rejects_corruption(tmp_path):
    rng = np.random.default_rng(71)
    a = rng.standard_normal((6, 7, 4))
    st = build_sketch(a, SketchParams(k=3, l=7, seed=123))
    path = tmp_path / "s.tsk"
    save_sketch(path, st)
    raw = bytearray(path.read_bytes())

    bad = tmp_path / "bad.tsk"
    bad.write_bytes(b"XXXX" + bytes(raw[4:]))
    with pytest.raises(FormatError):
        load_sketch(bad)

    bad.write_bytes(bytes(raw[:-5]))
    with pytest.raises(FormatError):
        load_sketch(bad)

    bad.write_bytes(bytes(raw) + b"\x00")
    with pytest.raises(FormatError):
        load_sketch(bad)

    # claim k=4 while the blocks were built with k=3
    tampered = bytearray(raw)
    tampered[4:12] = (4).to_bytes(8, "little")
    bad.write_bytes(bytes(tampered))
    with pytest.raises(FormatError):
        load_sketch(bad)
