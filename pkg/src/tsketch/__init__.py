"""T-product tensor algebra, T-SVD, and single-pass randomized sketching."""

from .bench import (
    ExperimentSpec,
    MetricsRow,
    SpectrumSpec,
    gen_exp_decay,
    gen_poly_decay,
    load_experiment_spec,
    parse_experiment_spec,
    psnr,
    relative_error,
    run_experiment,
    two_pass_baseline,
    write_metrics_csv,
)
from .core import (
    bcirc,
    dft_mode3,
    fold,
    frobenius_norm,
    gaussian_random_tensor,
    identity_tensor,
    idft_mode3,
    inf_norm,
    inner_product,
    tprod,
    ttranspose,
    unfold,
)
from .errors import (
    FormatError,
    ImaginaryResidual,
    IndexOutOfRange,
    InvalidParams,
    ShapeMismatch,
    SvdNoConvergence,
    TensorError,
    TriangularBreakdown,
    ZeroReference,
)
from .factor import (
    DecayTSVD,
    TQRFactors,
    decay_tsvd,
    t_singular_values,
    tail_energy,
    tpinv,
    tqr,
    truncate_tsvd,
    tubal_rank,
)
from .io import read_t3b, write_t3b
from .sketch import (
    BoundReport,
    SketchParams,
    SketchState,
    build_sketch,
    load_sketch,
    recover_basic,
    recover_stable,
    save_sketch,
    theoretical_bound,
)

__version__ = "0.1.0"
