"""High-precision GEMM emulation on exact signed INT8 matrix products.

Real and complex matrix multiplication in single or double precision is
emulated by scaling operands to integers, multiplying them modulo a set of
pairwise-coprime 8-bit moduli on an exact INT8 kernel, and reconstructing
the product through the Chinese remainder theorem.  An analytic
performance model predicts throughput on INT8 matrix engines.
"""

from .bench import GenSpec, gen_matrix, run_accuracy_sweep, sweep_csv
from .crt import (ModulusSet, ResidueStack, crt_accumulate, crt_reduce,
                  residue_decompose, select_moduli, symmetric_mod_int,
                  symmetric_mod_wide)
from .emulate import (ComplexMatrix, EmuConfig, crt_integer_gemm,
                      emulate_gemm_complex, emulate_gemm_real, gemm,
                      inverse_scale)
from .errors import ConfigError, DimensionError, DomainError
from .kernel import complex_gemm_mod, gemm_i8_i32
from .matfile import read_matrix, write_matrix
from .oracle import (DDMatrix, exact_gemm_bigint, max_relative_error,
                     reference_gemm_dd)
from .perfmodel import (PerfParams, heatmap_csv, heatmap_grid, predict_time,
                        predicted_tflops)
from .scaling import (ScaledIntMatrices, ScalingConstants, ScalingVectors,
                      accurate_scaling, fast_scaling, log2_upper, quantize)

__version__ = "0.1.0"

__all__ = [
    "ComplexMatrix", "ConfigError", "DDMatrix", "DimensionError",
    "DomainError", "EmuConfig", "GenSpec", "ModulusSet", "PerfParams",
    "ResidueStack", "ScaledIntMatrices", "ScalingConstants",
    "ScalingVectors", "accurate_scaling", "complex_gemm_mod",
    "crt_accumulate", "crt_integer_gemm", "crt_reduce",
    "emulate_gemm_complex", "emulate_gemm_real", "exact_gemm_bigint",
    "fast_scaling", "gemm", "gemm_i8_i32", "gen_matrix", "heatmap_csv",
    "heatmap_grid", "inverse_scale", "log2_upper", "max_relative_error",
    "predict_time", "predicted_tflops", "quantize", "read_matrix",
    "reference_gemm_dd", "residue_decompose", "run_accuracy_sweep",
    "select_moduli", "sweep_csv", "symmetric_mod_int", "symmetric_mod_wide",
    "write_matrix",
]
