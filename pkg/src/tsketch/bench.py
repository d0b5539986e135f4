"""Synthetic spectra, approximation metrics, and the sweep runner.

The generators build f-diagonal test tensors whose per-slice diagonals
decay polynomially or exponentially past a leading block of ones, the
standard stress profiles for low-rank approximation.  ``run_experiment``
sweeps sketch size k for a set of methods, collecting relative error,
PSNR, wall time, and the a-priori error bound into CSV-ready rows.
Every trial's randomness derives from (seed, method, k, trial), so runs
are reproducible cell by cell regardless of execution order.
"""

import csv
import math
import re
import time
from dataclasses import dataclass

import numpy as np

from .core import (
    frobenius_norm,
    gaussian_random_tensor,
    inf_norm,
    tprod,
    ttranspose,
)
from .errors import FormatError, InvalidParams, ShapeMismatch, TensorError, ZeroReference
from .factor import t_singular_values, tqr, truncate_tsvd
from .io import read_t3b
from .sketch import SketchParams, build_sketch, recover_basic, recover_stable, theoretical_bound

__all__ = [
    "SpectrumSpec",
    "ExperimentSpec",
    "MetricsRow",
    "gen_poly_decay",
    "gen_exp_decay",
    "relative_error",
    "psnr",
    "two_pass_baseline",
    "run_experiment",
    "write_metrics_csv",
    "parse_experiment_spec",
    "load_experiment_spec",
]

CSV_HEADER = (
    "method,k,l,trial,relative_error,psnr_db,wall_time_s,bound_product,status"
)

METHODS = ("alg2", "alg3", "baseline2pass", "truncsvd")
_SKETCH_METHODS = ("alg2", "alg3")
_METHOD_ID = {name: i + 1 for i, name in enumerate(METHODS)}


@dataclass(frozen=True)
class SpectrumSpec:
    """Parameters of a synthetic f-diagonal test tensor.

    Slice j carries min(r, j) leading ones on its diagonal; the
    remaining entries decay polynomially (entry i is
    ``(i - min(r, j) + 1) ** -decay`` for 1-based i) or exponentially
    (``10 ** -((i - min(r, j)) * decay)``).
    """

    kind: str
    n: int
    p_slices: int
    r: int
    decay: float

    def __post_init__(self):
        if self.kind not in ("poly", "exp"):
            raise InvalidParams(f"unknown spectrum kind {self.kind!r}")
        if self.n < 1 or self.p_slices < 1:
            raise InvalidParams("dimensions must be positive")
        if not 1 <= self.r <= self.n:
            raise InvalidParams(f"need 1 <= r <= n, got r={self.r}, n={self.n}")
        if not self.decay > 0:
            raise InvalidParams(f"decay must be positive, got {self.decay}")


def _slice_diag(spec, j):
    # j is the 1-based slice index
    lead = min(spec.r, j)
    d = np.ones(spec.n)
    i = np.arange(lead, spec.n)
    if spec.kind == "poly":
        d[lead:] = (i - lead + 2.0) ** (-spec.decay)
    else:
        d[lead:] = 10.0 ** (-(i - lead + 1) * spec.decay)
    return d


def _gen_spectrum(spec):
    out = np.zeros((spec.n, spec.n, spec.p_slices))
    idx = np.arange(spec.n)
    for j in range(1, spec.p_slices + 1):
        out[idx, idx, j - 1] = _slice_diag(spec, j)
    return out


def gen_poly_decay(spec):
    """F-diagonal tensor with polynomially decaying slice diagonals."""
    if spec.kind != "poly":
        raise InvalidParams(f"expected a poly spectrum, got {spec.kind!r}")
    return _gen_spectrum(spec)


def gen_exp_decay(spec):
    """F-diagonal tensor with exponentially decaying slice diagonals."""
    if spec.kind != "exp":
        raise InvalidParams(f"expected an exp spectrum, got {spec.kind!r}")
    return _gen_spectrum(spec)


def relative_error(a, ahat):
    """Squared Frobenius error ratio ``|a - ahat|_F^2 / |a|_F^2``."""
    a = np.asarray(a, dtype=np.float64)
    ahat = np.asarray(ahat, dtype=np.float64)
    if a.shape != ahat.shape:
        raise ShapeMismatch(f"shapes {a.shape} and {ahat.shape} differ")
    ref = frobenius_norm(a) ** 2
    if ref == 0.0:
        raise ZeroReference("relative error against the zero tensor")
    return frobenius_norm(a - ahat) ** 2 / ref


def psnr(a, ahat):
    """Peak signal-to-noise ratio in dB.

    ``10 * log10(m * n * p * max|a|^2 / |a - ahat|_F^2)``; returns
    ``math.inf`` when the two tensors are identical.
    """
    a = np.asarray(a, dtype=np.float64)
    ahat = np.asarray(ahat, dtype=np.float64)
    if a.shape != ahat.shape:
        raise ShapeMismatch(f"shapes {a.shape} and {ahat.shape} differ")
    err = frobenius_norm(a - ahat) ** 2
    if err == 0.0:
        return math.inf
    m, n, p = a.shape
    return 10.0 * math.log10(m * n * p * inf_norm(a) ** 2 / err)


def two_pass_baseline(a, k, seed):
    """Rank-k approximation using the range sketch plus a second pass.

    Draws the same Gaussian test tensor as the sketching methods, takes
    q from the thin t-QR of ``a * b``, then projects:
    ``q * (q^T * a)``.  Needs the original tensor twice, so it serves as
    the reference point single-pass methods are compared against.
    """
    m, n, p = np.asarray(a).shape
    if not 1 <= k <= min(m, n):
        raise InvalidParams(f"need 1 <= k <= min(m, n), got k={k}")
    b = gaussian_random_tensor(n, k, p, seed)
    q = tqr(tprod(a, b)).q
    return tprod(q, tprod(ttranspose(q), a))


def _parse_l_rule(text):
    """Parse an l-rule string: 'Ak+B', 'k+B', 'Ak', 'k', or a constant."""
    t = text.strip().replace(" ", "")
    if re.fullmatch(r"\d+", t):
        value = int(t)
        return lambda k: value
    m = re.fullmatch(r"(?:(\d+))?k(?:\+(\d+))?", t)
    if m is None:
        raise FormatError(f"cannot parse l rule {text!r}")
    coef = int(m.group(1) or 1)
    off = int(m.group(2) or 0)
    return lambda k: coef * k + off


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative sweep configuration.

    ``source`` is either a SpectrumSpec or a path to a T3B file.  l for
    the sketch methods follows ``l_rule`` (default ``2k+1``).  When
    ``bound`` is set, every swept (k, l) pair must satisfy l > k + 1 so
    the bound column is well defined.
    """

    source: object
    ks: tuple
    l_rule: str = "2k+1"
    trials: int = 1
    methods: tuple = METHODS
    seed: int = 0
    bound: bool = True

    def __post_init__(self):
        if not self.ks or any(int(k) < 1 for k in self.ks):
            raise InvalidParams("k grid must be nonempty positive integers")
        if self.trials < 1:
            raise InvalidParams("trials must be at least 1")
        unknown = set(self.methods) - set(METHODS)
        if not self.methods or unknown:
            raise InvalidParams(f"unknown methods {sorted(unknown)}")
        rule = _parse_l_rule(self.l_rule)
        if self.bound and any(m in _SKETCH_METHODS for m in self.methods):
            for k in self.ks:
                if rule(k) <= k + 1:
                    raise InvalidParams(
                        f"bound column needs l > k + 1, got k={k}, l={rule(k)}"
                    )


@dataclass(frozen=True)
class MetricsRow:
    method: str
    k: int
    l: object
    trial: int
    relative_error: object
    psnr_db: object
    wall_time_s: object
    bound_product: object
    status: str


def _trial_seed(seed, method, k, trial):
    ss = np.random.SeedSequence((seed, _METHOD_ID[method], k, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def _materialize(source):
    if isinstance(source, SpectrumSpec):
        return _gen_spectrum(source)
    return read_t3b(source)


def run_experiment(spec):
    """Run the sweep and return one MetricsRow per (method, k, trial).

    A cell that raises is recorded with ``status=error:<Name>`` and
    empty metric fields instead of aborting the sweep.  Wall time wraps
    the algorithm body only, never I/O or metric evaluation.
    """
    a = _materialize(spec.source)
    rule = _parse_l_rule(spec.l_rule)
    sigma = None
    if spec.bound and any(m in _SKETCH_METHODS for m in spec.methods):
        sigma = t_singular_values(a)
    bound_cache = {}

    def bound_for(k, l):
        if sigma is None or k < 2 or l <= k + 1 or k - 1 > sigma.size:
            return None
        if k not in bound_cache:
            bound_cache[k] = theoretical_bound(k, l, sigma).bound_product
        return bound_cache[k]

    rows = []
    for method in spec.methods:
        for k in spec.ks:
            k = int(k)
            l = rule(k) if method in _SKETCH_METHODS else None
            for trial in range(spec.trials):
                sd = _trial_seed(spec.seed, method, k, trial)
                try:
                    t0 = time.perf_counter()
                    if method == "truncsvd":
                        ahat = truncate_tsvd(a, k)
                    elif method == "baseline2pass":
                        ahat = two_pass_baseline(a, k, sd)
                    else:
                        state = build_sketch(a, SketchParams(k=k, l=l, seed=sd))
                        recover = recover_basic if method == "alg2" else recover_stable
                        ahat = recover(state)
                    wall = time.perf_counter() - t0
                except TensorError as e:
                    rows.append(MetricsRow(
                        method=method, k=k, l=l, trial=trial,
                        relative_error=None, psnr_db=None, wall_time_s=None,
                        bound_product=None,
                        status=f"error:{type(e).__name__}",
                    ))
                    continue
                rows.append(MetricsRow(
                    method=method, k=k, l=l, trial=trial,
                    relative_error=relative_error(a, ahat),
                    psnr_db=psnr(a, ahat),
                    wall_time_s=wall,
                    bound_product=bound_for(k, l) if method in _SKETCH_METHODS else None,
                    status="ok",
                ))
    return rows


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_metrics_csv(path, rows):
    """Write rows under the fixed header, LF line endings, floats at full
    round-trip precision."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for r in rows:
            writer.writerow([
                r.method, r.k, _cell(r.l), r.trial,
                _cell(r.relative_error), _cell(r.psnr_db),
                _cell(r.wall_time_s), _cell(r.bound_product), r.status,
            ])


_SPEC_KEYS = {
    "kind", "n", "p", "r", "decay", "in",
    "k", "l", "trials", "methods", "seed", "bound",
}


def parse_experiment_spec(text):
    """Parse the key=value sweep format ('#' starts a comment).

    Either ``in=<path>`` or the generator keys ``kind/n/p`` (with
    optional ``r`` and ``decay``) select the tensor; ``k`` is the
    required comma-separated sketch grid.
    """
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _SPEC_KEYS:
            raise FormatError(f"line {lineno}: unknown key {key!r}")
        if key in kv:
            raise FormatError(f"line {lineno}: duplicate key {key!r}")
        kv[key] = value

    def as_int(key, value):
        try:
            return int(value)
        except ValueError:
            raise FormatError(f"key {key!r}: expected an integer, got {value!r}")

    if "k" not in kv:
        raise FormatError("missing required key 'k'")
    ks = tuple(as_int("k", s) for s in kv["k"].split(","))

    if "in" in kv:
        if not set(kv).isdisjoint({"kind", "n", "p", "r", "decay"}):
            raise FormatError("'in' excludes the generator keys")
        source = kv["in"]
    else:
        for key in ("kind", "n", "p"):
            if key not in kv:
                raise FormatError(f"missing required key {key!r}")
        try:
            decay = float(kv.get("decay", "1"))
        except ValueError:
            raise FormatError(f"key 'decay': expected a number, got {kv['decay']!r}")
        source = SpectrumSpec(
            kind=kv["kind"],
            n=as_int("n", kv["n"]),
            p_slices=as_int("p", kv["p"]),
            r=as_int("r", kv.get("r", "10")),
            decay=decay,
        )

    bound_text = kv.get("bound", "1").lower()
    if bound_text in ("1", "true", "on"):
        bound = True
    elif bound_text in ("0", "false", "off"):
        bound = False
    else:
        raise FormatError(f"key 'bound': expected a flag, got {kv['bound']!r}")

    return ExperimentSpec(
        source=source,
        ks=ks,
        l_rule=kv.get("l", "2k+1"),
        trials=as_int("trials", kv.get("trials", "1")),
        methods=tuple(s.strip() for s in kv["methods"].split(","))
        if "methods" in kv else METHODS,
        seed=as_int("seed", kv.get("seed", "0")),
        bound=bound,
    )


def load_experiment_spec(path):
    """Read and parse a sweep spec file."""
    with open(path, "r", encoding="utf-8") as f:
        return parse_experiment_spec(f.read())
