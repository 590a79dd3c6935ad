"""CountGauss: CountSketch composed with a small Gaussian matrix, plus the
experiments built on it (separable NMF anchor selection, SVM margin
preservation, moment and distribution checks)."""
from .linalg import (CapacityError, ConvergenceError, gaussian_matrix, gemm, orthonormal_basis,
                     spectral_norm, spmm)
from .rng import STREAM, SeededRng, mix64
from .sketch import (CountGaussTransform, CountSketchMap, SrhtSpec, countgauss_apply,
                     countgauss_new, countsketch_apply, countsketch_from_hash, countsketch_new,
                     srht_new, srht_rows)

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "ConvergenceError", "gaussian_matrix", "gemm", "orthonormal_basis",
    "spectral_norm", "spmm", "STREAM", "SeededRng", "mix64", "CountGaussTransform",
    "CountSketchMap", "SrhtSpec", "countgauss_apply", "countgauss_new", "countsketch_apply",
    "countsketch_from_hash", "countsketch_new", "srht_new", "srht_rows",
]
