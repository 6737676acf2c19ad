"""Exact and high-precision reference products for verification.

``exact_gemm_bigint`` is pure integer arithmetic (int64 when the worst-case
dot fits, arbitrary-precision Python ints otherwise).  The double-double
reference accumulates each dot product with error-free transformations in
a fixed ascending order; it is compiled with numba but keeps strict IEEE
semantics, so results are bitwise reproducible and independent of the
thread count (rows are distributed, each dot stays sequential).
"""

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .errors import DimensionError

_SPLITTER = 134217729.0  # 2^27 + 1


@dataclass(frozen=True)
class DDMatrix:
    """Unevaluated sum hi + lo per element; ~106-bit effective precision."""

    hi: np.ndarray
    lo: np.ndarray

    def to_array(self) -> np.ndarray:
        return self.hi + self.lo


def exact_gemm_bigint(a, b) -> np.ndarray:
    """Exact integer matrix product as an object array of Python ints."""
    a_arr = np.asarray(a)
    b_arr = np.asarray(b)
    if a_arr.ndim != 2 or b_arr.ndim != 2 or a_arr.shape[1] != b_arr.shape[0]:
        raise DimensionError(f"bad shapes {a_arr.shape} x {b_arr.shape}")

    def as_int_objects(m):
        out = np.empty(m.shape, dtype=object)
        flat = out.reshape(-1)
        for idx, v in enumerate(np.asarray(m).reshape(-1)):
            flat[idx] = int(v)
        return out

    ao = as_int_objects(a_arr)
    bo = as_int_objects(b_arr)
    k = a_arr.shape[1]
    if a_arr.size and b_arr.size:
        amax = max(abs(int(ao.reshape(-1).max())), abs(int(ao.reshape(-1).min())))
        bmax = max(abs(int(bo.reshape(-1).max())), abs(int(bo.reshape(-1).min())))
    else:
        amax = bmax = 0
    if k * amax * bmax < 2**62:
        c = a_arr.astype(np.int64) @ b_arr.astype(np.int64)
        return as_int_objects(c)
    return ao @ bo


@njit(cache=True, parallel=True)
def _dd_gemm_kernel(a, b):  # pragma: no cover - exercised through wrapper
    m, k = a.shape
    n = b.shape[1]
    hi = np.zeros((m, n))
    lo = np.zeros((m, n))
    for i in prange(m):
        for j in range(n):
            shi = 0.0
            slo = 0.0
            for h in range(k):
                x = a[i, h]
                y = b[h, j]
                # two_prod via Dekker splitting
                p = x * y
                cx = _SPLITTER * x
                xhi = cx - (cx - x)
                xlo = x - xhi
                cy = _SPLITTER * y
                yhi = cy - (cy - y)
                ylo = y - yhi
                e = ((xhi * yhi - p) + xhi * ylo + xlo * yhi) + xlo * ylo
                # accurate double-double accumulation
                s1 = shi + p
                bb = s1 - shi
                s2 = (shi - (s1 - bb)) + (p - bb)
                t1 = slo + e
                bb = t1 - slo
                t2 = (slo - (t1 - bb)) + (e - bb)
                s2 = s2 + t1
                z = s1 + s2
                s2 = s2 - (z - s1)
                s1 = z
                s2 = s2 + t2
                z = s1 + s2
                slo = s2 - (z - s1)
                shi = z
            hi[i, j] = shi
            lo[i, j] = slo
    return hi, lo


def _dd_gemm(a, b):
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    return _dd_gemm_kernel(a, b)


def reference_gemm_dd(a, b) -> DDMatrix:
    """Double-double reference product, real or complex operands.

    Complex products are evaluated through the stacked real forms
    C_R = [A_R, -A_I] [B_R; B_I] and C_I = [A_R, A_I] [B_I; B_R], keeping a
    single fixed accumulation order of the 2k terms per element.
    """
    a_arr = np.asarray(a)
    b_arr = np.asarray(b)
    if a_arr.ndim != 2 or b_arr.ndim != 2 or a_arr.shape[1] != b_arr.shape[0]:
        raise DimensionError(f"bad shapes {a_arr.shape} x {b_arr.shape}")
    if np.iscomplexobj(a_arr) or np.iscomplexobj(b_arr):
        a_c = a_arr.astype(np.complex128, copy=False)
        b_c = b_arr.astype(np.complex128, copy=False)
        ar, ai = a_c.real, a_c.imag
        br, bi = b_c.real, b_c.imag
        re_hi, re_lo = _dd_gemm(np.hstack([ar, -ai]), np.vstack([br, bi]))
        im_hi, im_lo = _dd_gemm(np.hstack([ar, ai]), np.vstack([bi, br]))
        return DDMatrix(re_hi + 1j * im_hi, re_lo + 1j * im_lo)
    hi, lo = _dd_gemm(a_arr, b_arr)
    return DDMatrix(hi, lo)


def max_relative_error(approx, reference, return_zero_count: bool = False):
    """Largest componentwise relative error against a reference product.

    For complex data the real and imaginary parts are compared separately
    and the maximum over both is returned.  Components whose reference
    value is zero are excluded from the maximum and reported through
    ``return_zero_count``.
    """
    approx = np.asarray(approx)
    if isinstance(reference, DDMatrix):
        ref_hi, ref_lo = reference.hi, reference.lo
    else:
        ref_hi = np.asarray(reference)
        ref_lo = np.zeros_like(ref_hi)
    if approx.shape != ref_hi.shape:
        raise DimensionError("shape mismatch between approximation and reference")

    def component_error(x, hi, lo):
        err = np.abs((x.astype(np.float64) - hi) - lo)
        ref = np.abs(hi + lo)
        zero = ref == 0.0
        rel = np.where(zero, 0.0, err / np.where(zero, 1.0, ref))
        return rel, int(np.count_nonzero(zero))

    if np.iscomplexobj(ref_hi) or np.iscomplexobj(approx):
        rel_r, z_r = component_error(np.asarray(approx).real,
                                     np.asarray(ref_hi).real,
                                     np.asarray(ref_lo).real)
        rel_i, z_i = component_error(np.asarray(approx).imag,
                                     np.asarray(ref_hi).imag,
                                     np.asarray(ref_lo).imag)
        worst = float(max(rel_r.max(initial=0.0), rel_i.max(initial=0.0)))
        zeros = z_r + z_i
    else:
        rel, zeros = component_error(approx, ref_hi, ref_lo)
        worst = float(rel.max(initial=0.0))
    if return_zero_count:
        return worst, zeros
    return worst
