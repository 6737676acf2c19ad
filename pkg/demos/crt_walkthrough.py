#!/usr/bin/env python3
"""Walk through one emulated integer product step by step.

Multiplies a small integer matrix pair exactly using nothing but signed
8-bit products, showing the intermediate residue matrices and the CRT
reconstruction.
"""

import numpy as np

from crtgemm import (crt_accumulate, crt_reduce, exact_gemm_bigint,
                     gemm_i8_i32, residue_decompose, select_moduli)
from crtgemm.crt import ResidueStack, symmetric_mod_int

rng = np.random.default_rng(0)
m, k, n = 4, 6, 3
a = rng.integers(-1000, 1000, (m, k)).astype(np.float64)
b = rng.integers(-1000, 1000, (k, n)).astype(np.float64)

print("A =\n", a.astype(int))
print("B =\n", b.astype(int))

# Entries up to 1000 and k = 6 give dot products below 6e6, so the product
# of four moduli (P ~ 4.1e9) already guarantees a unique reconstruction:
# 2 * sum |a||b| <= 2 * 6 * 1e6 < P.
ms = select_moduli(4)
print("\nmoduli:", ms.moduli)
print("P =", ms.product, f"(log2 P = {ms.log2_product:.2f})")
print("inverses:", ms.inverses)

# Symmetric residues fit signed 8-bit storage.
a_stack = residue_decompose(a, ms)
b_stack = residue_decompose(b, ms)
print("\nresidues of A modulo", ms.moduli[0], ":\n", a_stack.entries[0])

# One exact INT8 product per modulus, reduced back to residues.
e_entries = np.empty((len(ms), m, n), dtype=np.int8)
for idx, p in enumerate(ms.moduli):
    d = gemm_i8_i32(a_stack.entries[idx], b_stack.entries[idx])
    e_entries[idx] = symmetric_mod_int(d.astype(np.int64), p)
    print(f"\nINT8 product residues mod {p}:\n", e_entries[idx])

# Weighted accumulation and final reduction modulo P.
acc = crt_accumulate(ResidueStack(e_entries, ms), ms, "double")
c = crt_reduce(acc, ms)

print("\nreconstructed C =\n", c.astype(int))
exact = exact_gemm_bigint(a, b)
print("exact product   =\n", exact)
print("\nbitwise exact:", np.array_equal(c.astype(int), exact.astype(int)))
