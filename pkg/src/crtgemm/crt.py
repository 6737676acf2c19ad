"""Moduli selection, symmetric residues, and CRT reconstruction.

An integer x with 2|x| < P = prod(p_l) is uniquely determined by its
symmetric residues modulo the pairwise-coprime moduli p_l <= 256.  The
reconstruction weight for modulus p_l is v_l = (P/p_l) * q_l, where q_l is
the modular inverse of P/p_l.  Each weight is stored as an unevaluated
double pair (coeff_hi, coeff_lo): the high parts are truncated to a shared
power-of-two grid coarse enough that any weighted sum of signed 8-bit
residues over all moduli accumulates in float64 without rounding.
"""

import math
from dataclasses import dataclass

import numpy as np

from .ddarith import dd_add, dd_mul_d, quick_two_sum, two_prod, two_sum
from .errors import ConfigError, DomainError

MAX_MODULI = 20

# Signed 8-bit residues contribute at most 7 significand bits, so the high
# coefficient parts may carry 53 - 7 - ceil(log2 N) bits.
_RESIDUE_BITS = 7
_DOUBLE_BITS = 53


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


@dataclass(frozen=True)
class ModulusSet:
    """Pairwise-coprime moduli with precomputed CRT reconstruction data.

    Attributes:
        moduli: moduli sorted descending, each in [2, 256].
        product: exact big-integer product P.
        log2_product: log2(P) as a float.
        inverses: q_l with (P/p_l) * q_l == 1 (mod p_l).
        coeff_hi: float64 high parts of (P/p_l)*q_l, exact on a shared grid.
        coeff_lo: float64 nearest-double remainders.
    """

    moduli: tuple
    product: int
    log2_product: float
    inverses: tuple
    coeff_hi: np.ndarray
    coeff_lo: np.ndarray

    @classmethod
    def from_moduli(cls, moduli) -> "ModulusSet":
        moduli = tuple(sorted((int(p) for p in moduli), reverse=True))
        n = len(moduli)
        if not 1 <= n <= MAX_MODULI:
            raise ConfigError(f"need 1..{MAX_MODULI} moduli, got {n}")
        for p in moduli:
            if not 2 <= p <= 256:
                raise ConfigError(f"modulus {p} outside [2, 256]")
        if len(set(moduli)) != n:
            raise ConfigError("moduli must be distinct")
        for i in range(n):
            for j in range(i + 1, n):
                if math.gcd(moduli[i], moduli[j]) != 1:
                    raise ConfigError(
                        f"moduli {moduli[i]} and {moduli[j]} share a factor"
                    )
        product = math.prod(moduli)
        inverses = []
        coeff_hi = np.empty(n)
        coeff_lo = np.empty(n)
        # Shared truncation grid: every coeff_hi becomes a multiple of
        # 2^shift, so partial sums of coeff_hi * residue stay on that grid
        # and span at most 53 bits.
        shift = max(0, product.bit_length() + _RESIDUE_BITS + _ceil_log2(n)
                    - _DOUBLE_BITS)
        for idx, p in enumerate(moduli):
            cofactor = product // p
            q = pow(cofactor, -1, p)
            inverses.append(q)
            weight = cofactor * q
            hi = (weight >> shift) << shift
            coeff_hi[idx] = float(hi)
            coeff_lo[idx] = float(weight - hi)
            assert int(coeff_hi[idx]) == hi
        return cls(moduli, product, math.log2(product), tuple(inverses),
                   coeff_hi, coeff_lo)

    def __len__(self) -> int:
        return len(self.moduli)


def select_moduli(num_moduli: int) -> ModulusSet:
    """Greedy descending coprime scan from 256.

    Takes 256, then repeatedly the largest candidate below the previous
    choice that is coprime to everything chosen so far.  Deterministic for
    a given count.
    """
    if not isinstance(num_moduli, int) or not 1 <= num_moduli <= MAX_MODULI:
        raise ConfigError(f"num_moduli must be in 1..{MAX_MODULI}, "
                          f"got {num_moduli!r}")
    chosen = [256]
    candidate = 255
    while len(chosen) < num_moduli:
        if all(math.gcd(candidate, p) == 1 for p in chosen):
            chosen.append(candidate)
        candidate -= 1
    return ModulusSet.from_moduli(chosen)


# Largest magnitude accepted by the vectorized residue paths.  Quantized
# matrices stay below 2^84 for any modulus set up to 20 moduli.
MAX_ABS_INT = 2.0**90


def _sym_mod_i64(x, p):
    # Exact for |x| < 2^61 (2x + p must fit int64).
    return x - p * ((2 * x + p) // (2 * p))


def _sym_mod_f64(x, p):
    """Exact symmetric residue of integer-valued float64 entries < 2^90.

    Splits x = h*2^31 + l with 0 <= l < 2^31 (both parts exact power-of-two
    manipulations), then folds h through 2^31 mod p in int64 arithmetic.
    """
    h = np.floor(x * 2.0**-31)
    l = x - h * 2.0**31
    hi = h.astype(np.int64) % p
    fold = (hi * ((1 << 31) % p) + l.astype(np.int64)) % p
    return _sym_mod_i64(fold, p)


def symmetric_mod_int(x, p: int):
    """Symmetric remainder x - p*round(x/p) with half-quotients rounded up.

    The result is congruent to x (mod p) and lies in [-p/2, p/2 - 1] for
    even p and [-(p-1)/2, (p-1)/2] for odd p, so it always fits a signed
    8-bit integer for p <= 256.  Accepts Python ints, integer ndarrays of
    magnitude < 2^61, or integer-valued float ndarrays of magnitude < 2^90.
    """
    if p < 2:
        raise DomainError(f"modulus must be >= 2, got {p}")
    if isinstance(x, np.ndarray):
        if np.issubdtype(x.dtype, np.floating):
            return _sym_mod_f64(np.asarray(x, dtype=np.float64), p)
        return _sym_mod_i64(x.astype(np.int64, copy=False), p)
    x = int(x)
    return x - p * ((2 * x + p) // (2 * p))


def symmetric_mod_wide(s, product: int, use_dd: bool = True):
    """Symmetric remainder of an accumulator with respect to big P.

    ``s`` is either a plain float64 value/array or an (hi, lo) pair holding
    an unevaluated two-term sum.  The quotient is rounded to the nearest
    integer with half-quotients rounded down, which places the result in
    (-P/2, P/2].  With ``use_dd`` the subtraction s - P*z runs in
    double-double arithmetic; otherwise everything stays in plain float64.
    """
    p_hi = float(product)
    p_lo = float(product - int(p_hi))
    if isinstance(s, tuple):
        s_hi, s_lo = np.asarray(s[0], dtype=np.float64), np.asarray(
            s[1], dtype=np.float64)
    else:
        s_hi = np.asarray(s, dtype=np.float64)
        s_lo = np.zeros_like(s_hi)
    q = (s_hi + s_lo) / p_hi
    z = np.ceil(q - 0.5)
    if use_dd:
        hi, lo = two_sum(s_hi, s_lo)
        pz_hi, pz_lo = two_prod(p_hi, z)
        pz_lo = pz_lo + p_lo * z
        pz_hi, pz_lo = quick_two_sum(pz_hi, pz_lo)
        r_hi, r_lo = dd_add(hi, lo, -pz_hi, -pz_lo)
        out = r_hi + r_lo
    else:
        out = (s_hi - z * p_hi) - z * p_lo
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ResidueStack:
    """Per-modulus signed 8-bit residue matrices of one integer matrix."""

    entries: np.ndarray  # int8, shape (N, rows, cols)
    modulus_set: ModulusSet

    def __post_init__(self):
        if self.entries.shape[0] != len(self.modulus_set):
            raise ConfigError("stack depth does not match modulus count")


def residue_decompose(matrix: np.ndarray, ms: ModulusSet) -> ResidueStack:
    """Map an integer-valued matrix to its symmetric residues per modulus."""
    m = np.asarray(matrix)
    if np.issubdtype(m.dtype, np.floating):
        m = m.astype(np.float64, copy=False)
        if not np.all(np.isfinite(m)):
            raise DomainError("matrix entries must be finite")
        if np.any(np.abs(m) >= MAX_ABS_INT):
            raise DomainError("matrix entries must be below 2^90")
        if not np.array_equal(np.trunc(m), m):
            raise DomainError("matrix entries must be integer-valued")
        source = m
    else:
        source = m.astype(np.int64)
        if source.size and max(source.max(), -source.min()) >= 2**61:
            raise DomainError("integer entries must be below 2^61")
    stack = np.empty((len(ms),) + source.shape, dtype=np.int8)
    for idx, p in enumerate(ms.moduli):
        stack[idx] = symmetric_mod_int(source, p)
    return ResidueStack(stack, ms)


def crt_accumulate(stack: ResidueStack, ms: ModulusSet,
                   precision: str = "double"):
    """Weighted sum S = sum_l (P/p_l) q_l E_l over the residue stack.

    The double path returns the pair (S1, S2) of high/low partial sums; S1
    is accumulated exactly thanks to the shared coefficient grid.  The
    single path collapses the pair into one plain-double sum.  Terms are
    added in ascending stack index for every element.
    """
    if stack.modulus_set.moduli != ms.moduli:
        raise ConfigError("residue stack was built for a different modulus set")
    if precision not in ("double", "single"):
        raise ConfigError(f"unknown precision path {precision!r}")
    shape = stack.entries.shape[1:]
    s1 = np.zeros(shape)
    s2 = np.zeros(shape)
    for idx in range(len(ms)):
        e = stack.entries[idx].astype(np.float64)
        s1 += ms.coeff_hi[idx] * e
        s2 += ms.coeff_lo[idx] * e
    if precision == "single":
        return s1 + s2
    return s1, s2


def crt_reduce(accumulator, ms: ModulusSet) -> np.ndarray:
    """Final reduction mod P of the CRT accumulator.

    Under the uniqueness condition 2*sum_h |a'_ih||b'_hj| < P the result
    equals the exact integer product elementwise.  A violated condition is
    not detectable here and silently yields a value offset by a multiple
    of P.
    """
    if isinstance(accumulator, tuple):
        return np.asarray(symmetric_mod_wide(accumulator, ms.product,
                                             use_dd=True))
    return np.asarray(symmetric_mod_wide(accumulator, ms.product,
                                         use_dd=False))
