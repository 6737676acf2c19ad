#!/usr/bin/env python3
"""Accuracy of emulated complex GEMM as moduli are added.

Reproduces the qualitative staircase of the accuracy study at desk scale:
more moduli buy a larger reconstruction range P, hence more retained bits
per entry, until the reduction precision becomes the floor.  Errors are
measured against a double-double reference and printed next to the native
GEMM error of the same precision.
"""

import numpy as np

from crtgemm import (EmuConfig, GenSpec, emulate_gemm_complex, gen_matrix,
                     max_relative_error, reference_gemm_dd)

m = n = 128
k = 1024
seeds = (0, 1, 2)

for precision, phi, counts in (
        ("single", 0.0, (5, 6, 7, 8, 9)),
        ("double", 0.5, (12, 13, 14, 15, 16, 17))):
    cases = []
    native = []
    for seed in seeds:
        a = gen_matrix(GenSpec(m, k, phi, 10 + seed, precision, "complex"))
        b = gen_matrix(GenSpec(k, n, phi, 90 + seed, precision, "complex"))
        ref = reference_gemm_dd(a, b)
        cases.append((a, b, ref))
        plain = a @ b if precision == "double" else \
            a.astype(np.complex64) @ b.astype(np.complex64)
        native.append(max_relative_error(plain, ref))

    label = "CGEMM" if precision == "single" else "ZGEMM"
    print(f"complex {precision} precision, phi={phi}, {m}x{n}x{k}")
    print(f"  native {label} error: {float(np.median(native)):.3e}")
    for mode in ("fast", "accurate"):
        for count in counts:
            cfg = EmuConfig(precision=precision, domain="complex",
                            mode=mode, num_moduli=count)
            errs = [max_relative_error(emulate_gemm_complex(a, b, cfg), ref)
                    for a, b, ref in cases]
            print(f"  {mode}-{count}: {float(np.median(errs)):.3e}")
    print()
