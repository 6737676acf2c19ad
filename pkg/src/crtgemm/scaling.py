"""Power-of-two scaling vectors and truncation to integer matrices.

Scaling picks per-row exponents for the left operand and per-column
exponents for the right operand so that the quantized integer product is
guaranteed to satisfy the CRT uniqueness condition
2 * sum_h |a'_ih| |b'_hj| < P for every output element.

Fast mode bounds each row/column product through the Cauchy-Schwarz
inequality on row/column 2-norms.  Accurate mode runs an auxiliary 7-bit
integer matrix multiplication to bound every element of |A'||B'| directly,
which admits larger exponents (more retained bits) for the same P.

All floating-point steps that feed an exponent are biased downward, so
rounding can only shrink the scaling and never break the uniqueness bound.
"""

import math
from dataclasses import dataclass

import numpy as np

from .crt import ModulusSet
from .errors import ConfigError, DimensionError, DomainError
from .kernel import MAX_K_COMPLEX, gemm_i8_i32

# Exponents are clamped to the double exponent range; clamping shrinks the
# scaling and is therefore always safe.  Zero rows/columns receive the
# upper clamp and quantize to zero.
EXP_CLAMP = 1023

# Quantized magnitudes stay below 2^84 for any supported modulus set.
MAX_QUANTIZED = 2.0**90

# Coefficients of the degree-16 Chebyshev interpolant of log2(1 + t) on
# [0, 1]; worst |poly - log2| including float64 Horner rounding is below
# 2^-45 on the interval.
_LOG2_COEFFS = (
    2.2775402178481487e-14, 1.4426950408757782, -0.7213475191685141,
    0.4808982977587932, -0.3606727542079527, 0.28852642308593507,
    -0.2403442897663445, 0.2054837442266186, -0.17769294959119178,
    0.15174988229827802, -0.1229870201590372, 0.0895501501300455,
    -0.05496910933753177, 0.026522983843890614, -0.009240638947705725,
    0.0020404147534928345, -0.00021265579458876327,
)


def _f32_round_down(y):
    """Largest float32 value not exceeding the float64 input."""
    y = np.asarray(y, dtype=np.float64)
    r = y.astype(np.float32)
    high = r.astype(np.float64) > y
    return np.where(high, np.nextafter(r, np.float32(-np.inf)), r)


def _f32_round_up(y):
    y = np.asarray(y, dtype=np.float64)
    r = y.astype(np.float32)
    low = r.astype(np.float64) < y
    return np.where(low, np.nextafter(r, np.float32(np.inf)), r)


def log2_upper(x):
    """Deterministic float32 upper bound on log2(x).

    Evaluated as exponent extraction plus a fixed polynomial on the
    mantissa, nudged upward before the final directed rounding, so the
    result never falls below log2(x) and exceeds it by at most
    2^-20 + |log2 x| * 2^-22.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0.0)):
        raise DomainError("log2_upper requires positive finite input")
    frac, ex = np.frexp(arr)
    t = 2.0 * frac - 1.0          # mantissa in [1, 2) minus 1
    acc = np.full_like(t, _LOG2_COEFFS[-1])
    for c in reversed(_LOG2_COEFFS[:-1]):
        acc = acc * t + c
    y = (ex - 1) + acc + 2.0**-21
    r = _f32_round_up(y)
    if np.isscalar(x) or arr.ndim == 0:
        return np.float32(r)
    return r.astype(np.float32)


@dataclass(frozen=True)
class ScalingConstants:
    """Precomputed scaling thresholds for one modulus product.

    p_fast/p_accu are float32 values of log2(P-1)/2 - 1.5 and
    log2(P-1)/2 - 0.5 with a downward bias (never above the exact value);
    delta is float32 0.5/(1 - 4u) rounded down, with u the float32 unit
    roundoff.
    """

    p_fast: np.float32
    p_accu: np.float32
    delta: np.float32
    u: float = 2.0**-24

    @classmethod
    def from_product(cls, product: int) -> "ScalingConstants":
        t = int(product) - 1
        if t < 1:
            raise ConfigError("modulus product must exceed 1")
        if t & (t - 1) == 0:
            # log2(P - 1) is the exact integer below; no bias needed.
            half_log = 0.5 * (t.bit_length() - 1)
            p_fast = np.float32(half_log - 1.5)
            p_accu = np.float32(half_log - 0.5)
        else:
            half_log = 0.5 * math.log2(t)
            p_fast = np.float32(_f32_round_down(half_log - 1.5 - 2.0**-43))
            p_accu = np.float32(_f32_round_down(half_log - 0.5 - 2.0**-43))
        delta = np.float32(_f32_round_down(0.5 / (1.0 - 4.0 * 2.0**-24)))
        return cls(p_fast, p_accu, delta)


@dataclass
class ScalingVectors:
    """Power-of-two scaling exponents: mu = 2^mu_exp per row of A and
    nu = 2^nu_exp per column of B.  Accurate mode also records the 6-bit
    normalization exponents used for the bound product."""

    mu_exp: np.ndarray
    nu_exp: np.ndarray
    bar_mu_exp: np.ndarray | None = None
    bar_nu_exp: np.ndarray | None = None


@dataclass
class ScaledIntMatrices:
    """Quantized operands a' = trunc(a * 2^mu_exp) plus their exponents."""

    a_int: np.ndarray
    b_int: np.ndarray
    scaling: ScalingVectors


def _parts(mat):
    """Real component list: one array for real input, re/im for complex."""
    mat = np.asarray(mat)
    if np.iscomplexobj(mat):
        return [np.ascontiguousarray(mat.real, dtype=np.float64),
                np.ascontiguousarray(mat.imag, dtype=np.float64)]
    return [np.asarray(mat, dtype=np.float64)]


def _validate_finite(mat):
    if not np.all(np.isfinite(mat)):
        raise DomainError("matrix entries must be finite")


def _absmax(parts, axis):
    out = np.abs(parts[0]).max(axis=axis)
    for part in parts[1:]:
        out = np.maximum(out, np.abs(part).max(axis=axis))
    return out


def _floor_log2(values):
    # Exact unit-in-first-place exponent; values must be positive.
    return (np.frexp(values)[1] - 1).astype(np.int64)


def _clamped(exp, diagnostics, key):
    clipped = np.clip(exp, -EXP_CLAMP, EXP_CLAMP)
    if diagnostics is not None:
        hits = int(np.count_nonzero(clipped != exp))
        if hits:
            diagnostics[key] = diagnostics.get(key, 0) + hits
    return clipped


def _fast_exponents(parts, axis, sc, diagnostics, key):
    """Exponents floor(P'_fast - max(1, delta*log2_upper(norm^2))) - ilogb(max).

    The squared 2-norm is accumulated on the max-normalized row/column so
    the log argument is always >= 1 and cannot overflow; the normalization
    exponent is folded back into the result exactly.
    """
    absmax = _absmax(parts, axis)
    zero = absmax == 0.0
    safe_max = np.where(zero, 1.0, absmax)
    fl = _floor_log2(safe_max)
    sumsq = np.zeros_like(safe_max)
    for part in parts:
        scaled = np.ldexp(part, -(fl[:, None] if axis == 1 else fl[None, :]))
        sumsq += np.sum(scaled * scaled, axis=axis)
    sumsq = np.where(zero, 1.0, sumsq)
    log_bound = log2_upper(sumsq).astype(np.float64)
    inner = np.maximum(1.0, float(sc.delta) * log_bound)
    head = _f32_round_down(float(sc.p_fast) - inner)
    exp = np.floor(head).astype(np.int64) - fl
    exp = np.where(zero, EXP_CLAMP, exp)
    return _clamped(exp, diagnostics, key), zero


def fast_scaling(a, b, ms: ModulusSet, sc: ScalingConstants,
                 diagnostics: dict | None = None) -> ScalingVectors:
    """Cauchy-Schwarz scaling vectors (fast mode), real or complex.

    For complex operands the row statistics run over both real and
    imaginary components, which makes the exponents of the expanded
    block-form rows i and i+m identical by construction.
    """
    a_parts, b_parts = _parts(a), _parts(b)
    for part in (*a_parts, *b_parts):
        _validate_finite(part)
    if a_parts[0].shape[1] != b_parts[0].shape[0]:
        raise DimensionError("inner dimensions differ")
    mu_exp, _ = _fast_exponents(a_parts, 1, sc, diagnostics, "clamped_mu")
    nu_exp, _ = _fast_exponents(b_parts, 0, sc, diagnostics, "clamped_nu")
    return ScalingVectors(mu_exp, nu_exp)


def _bound_matrices(parts, axis):
    """6-bit normalization exponents and ceil-rounded 7-bit bound matrices."""
    absmax = _absmax(parts, axis)
    zero = absmax == 0.0
    safe_max = np.where(zero, 1.0, absmax)
    bar = 5 - _floor_log2(safe_max)
    bar = np.where(zero, np.int64(0), bar)
    shaped = bar[:, None] if axis == 1 else bar[None, :]
    bars = [np.ceil(np.ldexp(np.abs(part), shaped)).astype(np.int8)
            for part in parts]
    return bar, bars, zero


def accurate_scaling(a, b, ms: ModulusSet, sc: ScalingConstants,
                     diagnostics: dict | None = None) -> ScalingVectors:
    """Scaling vectors from the auxiliary 7-bit bound product (accurate mode).

    Operands are first normalized so row/column maxima fit in 6 bits, then
    rounded up to nonnegative 7-bit integers; the exact INT8 product of the
    bound matrices dominates |A'||B'| elementwise and yields the admissible
    exponents.
    """
    a_parts, b_parts = _parts(a), _parts(b)
    for part in (*a_parts, *b_parts):
        _validate_finite(part)
    k = a_parts[0].shape[1]
    if k != b_parts[0].shape[0]:
        raise DimensionError("inner dimensions differ")
    if k > MAX_K_COMPLEX:
        raise DimensionError(f"inner dimension {k} exceeds {MAX_K_COMPLEX} "
                             "for the bound product")
    bar_mu, a_bars, a_zero = _bound_matrices(a_parts, 1)
    bar_nu, b_bars, b_zero = _bound_matrices(b_parts, 0)
    if len(a_parts) == 2:
        cross = (gemm_i8_i32(a_bars[1], b_bars[0]).astype(np.int64)
                 + gemm_i8_i32(a_bars[0], b_bars[1]))
        diff = gemm_i8_i32((a_bars[0].astype(np.int64)
                            - a_bars[1]).astype(np.int8),
                           (b_bars[0].astype(np.int64)
                            - b_bars[1]).astype(np.int8))
        direct = cross + diff
        bound = np.maximum(direct, cross)
    else:
        bound = gemm_i8_i32(a_bars[0], b_bars[0]).astype(np.int64)

    def exponents(row_axis, bar, zero, key):
        m = bound.max(axis=row_axis).astype(np.float64)
        dead = (m <= 0.0) | zero
        m = np.where(dead, 1.0, m)
        log_bound = log2_upper(m).astype(np.float64)
        head = _f32_round_down(float(sc.p_accu) - float(sc.delta) * log_bound)
        g = np.floor(head).astype(np.int64)
        exp = bar + g
        exp = np.where(dead, EXP_CLAMP, exp)
        return _clamped(exp, diagnostics, key)

    mu_exp = exponents(1, bar_mu, a_zero, "clamped_mu")
    nu_exp = exponents(0, bar_nu, b_zero, "clamped_nu")
    return ScalingVectors(mu_exp, nu_exp, bar_mu_exp=bar_mu, bar_nu_exp=bar_nu)


def quantize(mat: np.ndarray, exps: np.ndarray, axis: int = 0) -> np.ndarray:
    """Truncation toward zero of mat * 2^exp, exact power-of-two scaling.

    ``axis=0`` applies exps per row (left operand), ``axis=1`` per column
    (right operand).
    """
    mat = np.asarray(mat, dtype=np.float64)
    exps = np.asarray(exps, dtype=np.int64)
    if axis not in (0, 1):
        raise ConfigError("axis must be 0 (rows) or 1 (columns)")
    if exps.shape[0] != mat.shape[axis]:
        raise DimensionError("exponent vector does not match matrix")
    shaped = exps[:, None] if axis == 0 else exps[None, :]
    scaled = np.ldexp(mat, shaped)
    if scaled.size and np.abs(scaled).max() >= MAX_QUANTIZED:
        raise DomainError("scaled magnitudes exceed the quantization budget")
    return np.trunc(scaled)
