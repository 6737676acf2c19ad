"""Exact signed INT8 matrix multiplication and modular complex products.

The INT8 kernel is evaluated through float64 BLAS: with k <= 2^17 every
partial sum is an integer below 2^53, so the floating-point product is
exact and bitwise independent of tiling or thread count.
"""

import numpy as np

from .crt import symmetric_mod_int
from .errors import DimensionError

MAX_K_REAL = 2**17
MAX_K_COMPLEX = 2**16
DEFAULT_N_BLOCK = 8192

STRATEGIES = ("karatsuba", "expand-rows", "expand-cols")


def gemm_i8_i32(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product of two signed 8-bit matrices with 32-bit accumulation."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError("operands must be 2-D")
    if a.dtype != np.int8 or b.dtype != np.int8:
        raise DimensionError("operands must be int8")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"inner dimensions differ: {a.shape} x {b.shape}")
    if a.shape[1] > MAX_K_REAL:
        raise DimensionError(f"inner dimension {a.shape[1]} exceeds {MAX_K_REAL}")
    c = a.astype(np.float64) @ b.astype(np.float64)
    if c.size and np.abs(c).max() > np.iinfo(np.int32).max:
        raise ArithmeticError("dot product exceeds the 32-bit accumulator")
    return c.astype(np.int32)


def _check_residues(name, mat, p):
    lo = -(p // 2) if p % 2 == 0 else -((p - 1) // 2)
    hi = (p - 1) // 2
    if mat.size and (mat.min() < lo or mat.max() > hi):
        raise DimensionError(f"{name} entries outside residue range of p={p}")


def _karatsuba_block(ar, ai, br, bi, sa, sb, p):
    d = gemm_i8_i32(ar, br).astype(np.int64)
    e = gemm_i8_i32(ai, bi).astype(np.int64)
    f = gemm_i8_i32(sa, sb).astype(np.int64)
    er = symmetric_mod_int(d - e, p)
    ei = symmetric_mod_int(f - d - e, p)
    return er, ei


def _expand_rows_block(ar, ai, br, bi, neg_ai, p):
    a_hat = np.block([[ar, neg_ai], [ai, ar]])
    b_hat = np.concatenate([br, bi], axis=0)
    c = gemm_i8_i32(a_hat, b_hat).astype(np.int64)
    m = ar.shape[0]
    return symmetric_mod_int(c[:m], p), symmetric_mod_int(c[m:], p)


def _expand_cols_block(ar, ai, br, bi, neg_bi, p):
    a_hat = np.concatenate([ai, ar], axis=1)
    b_hat = np.block([[br, neg_bi], [bi, br]])
    c = gemm_i8_i32(a_hat, b_hat).astype(np.int64)
    n = br.shape[1]
    return symmetric_mod_int(c[:, n:], p), symmetric_mod_int(c[:, :n], p)


def complex_gemm_mod(ar, ai, br, bi, p: int, strategy: str = "karatsuba",
                     n_block: int = DEFAULT_N_BLOCK):
    """Modular complex matrix product on residue operands.

    Returns the residue pair (er, ei) with er == ar*br - ai*bi and
    ei == ar*bi + ai*br (mod p), reduced to the symmetric signed range.
    ``strategy`` selects between the two expanded-matrix formulations
    (one real GEMM on a doubled operand) and the Karatsuba form (three
    real GEMMs, no enlarged matrices).  All three return identical
    residues.  The output columns are processed in blocks of ``n_block``;
    the result is bitwise independent of the block width.
    """
    ar, ai, br, bi = (np.asarray(m, dtype=np.int8) for m in (ar, ai, br, bi))
    if strategy not in STRATEGIES:
        raise DimensionError(f"unknown strategy {strategy!r}")
    if n_block < 1:
        raise DimensionError("n_block must be >= 1")
    if ar.shape != ai.shape or br.shape != bi.shape:
        raise DimensionError("real/imaginary parts must share shapes")
    if ar.shape[1] != br.shape[0]:
        raise DimensionError(f"inner dimensions differ: {ar.shape} x {br.shape}")
    k = ar.shape[1]
    if k > MAX_K_COMPLEX:
        raise DimensionError(f"inner dimension {k} exceeds {MAX_K_COMPLEX} "
                             "for complex modular products")
    for name, mat in (("ar", ar), ("ai", ai), ("br", br), ("bi", bi)):
        _check_residues(name, mat, p)

    m, n = ar.shape[0], br.shape[1]
    er = np.empty((m, n), dtype=np.int8)
    ei = np.empty((m, n), dtype=np.int8)
    if strategy == "karatsuba":
        sa = symmetric_mod_int(ar.astype(np.int64) + ai, p).astype(np.int8)
        sb = symmetric_mod_int(br.astype(np.int64) + bi, p).astype(np.int8)
    elif strategy == "expand-rows":
        neg_ai = symmetric_mod_int(-ai.astype(np.int64), p).astype(np.int8)
    else:
        neg_bi = symmetric_mod_int(-bi.astype(np.int64), p).astype(np.int8)

    for j0 in range(0, n, n_block):
        j1 = min(j0 + n_block, n)
        brb, bib = br[:, j0:j1], bi[:, j0:j1]
        if strategy == "karatsuba":
            r, i = _karatsuba_block(ar, ai, brb, bib, sa, sb[:, j0:j1], p)
        elif strategy == "expand-rows":
            r, i = _expand_rows_block(ar, ai, brb, bib, neg_ai, p)
        else:
            r, i = _expand_cols_block(ar, ai, brb, bib, neg_bi[:, j0:j1], p)
        er[:, j0:j1] = r
        ei[:, j0:j1] = i
    return er, ei
