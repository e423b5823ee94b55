"""tensorder: latent dimension estimation for tensor-valued samples.

Estimates the per-mode latent signal dimensions of i.i.d. tensor samples by
two routes: scree-plot augmentation (synthetic noise rows appended to each
mode flattening) and a bootstrap ladle (eigenvector-span variability under
resampling).  Ships the supporting tensor algebra, spectral machinery,
seeded random streams and a synthetic-data generator with analytic ground
truth.
"""

from .tensors import (
    DenseTensor,
    TofFormatError,
    UnfoldedMatrix,
    frobenius_norm,
    mode_multiply,
    multilinear,
    read_tof1,
    refold,
    stacked_unfold,
    unfold,
    write_tof1,
)
from .spectral import (
    ModeSpectrum,
    PooledEigenSet,
    TensorSample,
    center,
    eig_sym_desc,
    mode_scatter,
    mode_spectra,
    mode_spectrum,
    noise_variance,
    pooled_scaled_eigenvalues,
)
from .statkit import (
    BetaLaw,
    RngStream,
    beta_cdf,
    derive_seed,
    gaussian_matrix,
    haar_orthogonal,
    ks_test,
    student_t_tensor,
)
from .augment import (
    AugmentConfig,
    augmented_part_norms,
    augmented_scatter,
    eigvec_norm_curve,
    estimate_orders,
    objective_and_argmin,
    scree_curve,
    thresholded_eigengaps,
)
from .ladle import (
    LadleConfig,
    bootstrap_resample,
    eigvec_variation_curve,
    estimate_orders_ladle,
    ladle_objective,
    search_bound,
)
from .simgen import (
    GroundTruth,
    SimModelSpec,
    gaussian_sample,
    generate,
    ground_truth,
    noise_snr_table,
    snr_from_eigs,
    study_spec,
)
from .report import AugmentCurves, LadleCurves, OrderReport
from .cli import read_sample, run_study, write_sample

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig",
    "AugmentCurves",
    "BetaLaw",
    "DenseTensor",
    "GroundTruth",
    "LadleConfig",
    "LadleCurves",
    "ModeSpectrum",
    "OrderReport",
    "PooledEigenSet",
    "RngStream",
    "SimModelSpec",
    "TensorSample",
    "TofFormatError",
    "UnfoldedMatrix",
    "augmented_part_norms",
    "augmented_scatter",
    "beta_cdf",
    "bootstrap_resample",
    "center",
    "derive_seed",
    "eig_sym_desc",
    "eigvec_norm_curve",
    "eigvec_variation_curve",
    "estimate_orders",
    "estimate_orders_ladle",
    "frobenius_norm",
    "gaussian_matrix",
    "gaussian_sample",
    "generate",
    "ground_truth",
    "haar_orthogonal",
    "ks_test",
    "ladle_objective",
    "mode_multiply",
    "mode_scatter",
    "mode_spectra",
    "mode_spectrum",
    "multilinear",
    "noise_snr_table",
    "noise_variance",
    "objective_and_argmin",
    "pooled_scaled_eigenvalues",
    "read_sample",
    "read_tof1",
    "refold",
    "run_study",
    "scree_curve",
    "search_bound",
    "snr_from_eigs",
    "stacked_unfold",
    "student_t_tensor",
    "study_spec",
    "thresholded_eigengaps",
    "unfold",
    "write_sample",
    "write_tof1",
]
