"""Top-level GEMM emulation: scale, quantize, modular INT8 products, CRT.

The pipeline for C = A @ B:

  1. pick the modulus set (count from the config),
  2. compute power-of-two scaling vectors (fast or accurate mode),
  3. truncate the scaled operands to integer matrices,
  4. decompose into signed 8-bit residues per modulus,
  5. run exact INT8 products per modulus (blocked over output columns),
     reduce to residues, and reconstruct the integer product by CRT,
  6. apply the inverse scaling and round once to the output precision.

Every arithmetic step except the scaling-vector logs is a fixed sequence
of exact integer operations, so results are bitwise reproducible across
runs, thread counts, and block widths.
"""

from dataclasses import dataclass

import numpy as np

from .crt import (ModulusSet, ResidueStack, crt_accumulate, crt_reduce,
                  residue_decompose, select_moduli, symmetric_mod_int)
from .errors import ConfigError, DimensionError, DomainError
from .kernel import (DEFAULT_N_BLOCK, MAX_K_COMPLEX, MAX_K_REAL, STRATEGIES,
                     complex_gemm_mod, gemm_i8_i32)
from .scaling import (ScalingConstants, ScalingVectors, accurate_scaling,
                      fast_scaling, quantize)

PRECISIONS = ("single", "double")
DOMAINS = ("real", "complex")
MODES = ("fast", "accurate")

# Default modulus counts: centers of the ranges that reach native-GEMM
# accuracy for each precision/mode.
_DEFAULT_MODULI = {
    ("complex", "single", "fast"): 8,
    ("complex", "single", "accurate"): 7,
    ("complex", "double", "fast"): 14,
    ("complex", "double", "accurate"): 15,
    ("real", "single", "fast"): 8,
    ("real", "single", "accurate"): 7,
    ("real", "double", "fast"): 15,
    ("real", "double", "accurate"): 15,
}


@dataclass
class EmuConfig:
    """Emulation parameters; ``num_moduli=None`` picks the default for the
    precision/domain/mode combination."""

    precision: str = "double"
    domain: str = "real"
    mode: str = "fast"
    num_moduli: int | None = None
    n_block: int = DEFAULT_N_BLOCK
    strategy: str = "karatsuba"

    def __post_init__(self):
        if self.precision not in PRECISIONS:
            raise ConfigError(f"precision must be one of {PRECISIONS}")
        if self.domain not in DOMAINS:
            raise ConfigError(f"domain must be one of {DOMAINS}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"strategy must be one of {STRATEGIES}")
        if self.n_block < 1:
            raise ConfigError("n_block must be >= 1")
        if self.num_moduli is not None and not 1 <= self.num_moduli <= 20:
            raise ConfigError("num_moduli must be in 1..20")

    @property
    def resolved_moduli(self) -> int:
        if self.num_moduli is not None:
            return self.num_moduli
        return _DEFAULT_MODULI[(self.domain, self.precision, self.mode)]


@dataclass
class ComplexMatrix:
    """Explicit real/imaginary pair; convertible to a complex ndarray."""

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        if self.re.shape != self.im.shape:
            raise DimensionError("real/imaginary shapes differ")

    def to_complex(self) -> np.ndarray:
        return self.re + 1j * self.im


def _scaling(a, b, ms, cfg, diagnostics):
    sc = ScalingConstants.from_product(ms.product)
    if cfg.mode == "fast":
        return fast_scaling(a, b, ms, sc, diagnostics)
    return accurate_scaling(a, b, ms, sc, diagnostics)


def _residue_product_stack(a_stack: ResidueStack, b_stack: ResidueStack,
                           ms: ModulusSet, n_block: int) -> ResidueStack:
    """Per-modulus INT8 products of two residue stacks, reduced back to
    residues, blocked over output columns."""
    m = a_stack.entries.shape[1]
    n = b_stack.entries.shape[2]
    out = np.empty((len(ms), m, n), dtype=np.int8)
    for idx, p in enumerate(ms.moduli):
        a_l = a_stack.entries[idx]
        b_l = b_stack.entries[idx]
        for j0 in range(0, n, n_block):
            j1 = min(j0 + n_block, n)
            d = gemm_i8_i32(a_l, b_l[:, j0:j1]).astype(np.int64)
            out[idx, :, j0:j1] = symmetric_mod_int(d, p)
    return ResidueStack(out, ms)


def crt_integer_gemm(a_int, b_int, ms: ModulusSet, precision: str = "double",
                     n_block: int = DEFAULT_N_BLOCK) -> np.ndarray:
    """Integer matrix product via residues and CRT reconstruction.

    Exact whenever 2 * sum_h |a_ih||b_hj| < P for all (i, j).  Inputs are
    integer-valued matrices; the result is an integer-valued float64
    matrix.
    """
    a_stack = residue_decompose(a_int, ms)
    b_stack = residue_decompose(b_int, ms)
    e_stack = _residue_product_stack(a_stack, b_stack, ms, n_block)
    acc = crt_accumulate(e_stack, ms, precision)
    return crt_reduce(acc, ms)


def inverse_scale(c_prime: np.ndarray, sv: ScalingVectors,
                  out_dtype=np.float64) -> np.ndarray:
    """Undo the diagonal scaling: C = 2^(-mu_i - nu_j) * C'.

    The exponent arithmetic is exact; the only rounding is the final cast
    to the output precision.
    """
    exps = (-sv.mu_exp[:, None] - sv.nu_exp[None, :]).astype(np.int32)
    scaled = np.ldexp(np.asarray(c_prime, dtype=np.float64), exps)
    return scaled.astype(out_dtype)


def _check_real_input(mat, name):
    arr = np.asarray(mat)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D")
    if np.iscomplexobj(arr):
        raise DomainError(f"{name} must be real for real-domain emulation")
    arr = arr.astype(np.float64, copy=False)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


def _check_complex_input(mat, name):
    arr = np.asarray(mat)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D")
    arr = arr.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


def emulate_gemm_real(a, b, cfg: EmuConfig | None = None,
                      diagnostics: dict | None = None) -> np.ndarray:
    """Emulated real matrix product A @ B."""
    cfg = cfg or EmuConfig()
    if cfg.domain != "real":
        raise ConfigError("config domain must be 'real'")
    a64 = _check_real_input(a, "A")
    b64 = _check_real_input(b, "B")
    if a64.shape[1] != b64.shape[0]:
        raise DimensionError(f"inner dimensions differ: {a64.shape} x {b64.shape}")
    k = a64.shape[1]
    k_cap = MAX_K_REAL if cfg.mode == "fast" else MAX_K_COMPLEX
    if k > k_cap:
        raise DimensionError(f"inner dimension {k} exceeds {k_cap}")

    ms = select_moduli(cfg.resolved_moduli)
    sv = _scaling(a64, b64, ms, cfg, diagnostics)
    a_int = quantize(a64, sv.mu_exp, axis=0)
    b_int = quantize(b64, sv.nu_exp, axis=1)
    c_prime = crt_integer_gemm(a_int, b_int, ms, cfg.precision, cfg.n_block)
    out_dtype = np.float64 if cfg.precision == "double" else np.float32
    return inverse_scale(c_prime, sv, out_dtype)


def emulate_gemm_complex(a, b, cfg: EmuConfig | None = None,
                         diagnostics: dict | None = None) -> np.ndarray:
    """Emulated complex matrix product A @ B.

    Real and imaginary parts of C are reconstructed independently by CRT
    from the residue pairs of the per-modulus complex products.
    """
    cfg = cfg or EmuConfig(domain="complex")
    if cfg.domain != "complex":
        raise ConfigError("config domain must be 'complex'")
    a_c = _check_complex_input(a, "A")
    b_c = _check_complex_input(b, "B")
    if a_c.shape[1] != b_c.shape[0]:
        raise DimensionError(f"inner dimensions differ: {a_c.shape} x {b_c.shape}")
    k = a_c.shape[1]
    if k > MAX_K_COMPLEX:
        raise DimensionError(f"inner dimension {k} exceeds {MAX_K_COMPLEX}")

    ms = select_moduli(cfg.resolved_moduli)
    sv = _scaling(a_c, b_c, ms, cfg, diagnostics)
    ar = quantize(np.ascontiguousarray(a_c.real), sv.mu_exp, axis=0)
    ai = quantize(np.ascontiguousarray(a_c.imag), sv.mu_exp, axis=0)
    br = quantize(np.ascontiguousarray(b_c.real), sv.nu_exp, axis=1)
    bi = quantize(np.ascontiguousarray(b_c.imag), sv.nu_exp, axis=1)

    ar_stack = residue_decompose(ar, ms)
    ai_stack = residue_decompose(ai, ms)
    br_stack = residue_decompose(br, ms)
    bi_stack = residue_decompose(bi, ms)

    m, n = ar.shape[0], br.shape[1]
    e_re = np.empty((len(ms), m, n), dtype=np.int8)
    e_im = np.empty((len(ms), m, n), dtype=np.int8)
    for idx, p in enumerate(ms.moduli):
        er, ei = complex_gemm_mod(ar_stack.entries[idx], ai_stack.entries[idx],
                                  br_stack.entries[idx], bi_stack.entries[idx],
                                  p, strategy=cfg.strategy, n_block=cfg.n_block)
        e_re[idx] = er
        e_im[idx] = ei

    path = cfg.precision
    c_re = crt_reduce(crt_accumulate(ResidueStack(e_re, ms), ms, path), ms)
    c_im = crt_reduce(crt_accumulate(ResidueStack(e_im, ms), ms, path), ms)
    out_dtype = np.float64 if cfg.precision == "double" else np.float32
    re = inverse_scale(c_re, sv, out_dtype)
    im = inverse_scale(c_im, sv, out_dtype)
    ctype = np.complex128 if cfg.precision == "double" else np.complex64
    return (re + 1j * im).astype(ctype)


def _colmajor_view(buf, ld, rows, cols, name):
    arr = np.asarray(buf)
    if arr.ndim == 1:
        if arr.size < ld * cols:
            raise DimensionError(f"{name} buffer too small for ld={ld}")
        return arr[:ld * cols].reshape((ld, cols), order="F")[:rows, :]
    if arr.ndim == 2:
        if arr.shape[0] < rows or arr.shape[1] < cols:
            raise DimensionError(f"{name} array smaller than {rows}x{cols}")
        return arr[:rows, :cols]
    raise DimensionError(f"{name} must be 1-D storage or a 2-D array")


def gemm(domain: str, precision: str, m: int, n: int, k: int,
         a, lda: int, b, ldb: int, c, ldc: int,
         cfg: EmuConfig | None = None) -> np.ndarray:
    """GEMM-style entry point on column-major buffers with leading dims.

    ``a``, ``b`` and ``c`` may be flat column-major buffers (leading
    dimension lda/ldb/ldc) or 2-D arrays.  The product is written into
    ``c`` and the updated buffer is returned.  Only the no-transpose case
    is supported; pass pre-transposed operands if needed.
    """
    if cfg is None:
        cfg = EmuConfig(precision=precision, domain=domain)
    if cfg.precision != precision or cfg.domain != domain:
        raise ConfigError("cfg disagrees with the requested domain/precision")
    av = _colmajor_view(a, lda, m, k, "A")
    bv = _colmajor_view(b, ldb, k, n, "B")
    cv = _colmajor_view(c, ldc, m, n, "C")
    if domain == "real":
        result = emulate_gemm_real(av, bv, cfg)
    else:
        result = emulate_gemm_complex(av, bv, cfg)
    cv[...] = result
    return c
