#!/usr/bin/env python3
"""Performance-model heatmaps for double-precision complex emulation.

Evaluates the analytic model over a bandwidth/throughput grid at
m = n = k = 16384 with the correction term equal to the modulus count,
writes the accurate-mode grid to heatmap.csv, and prints the compute-bound
ceilings.  With 1500 INT8 TOPS and 2-4 TB/s the accurate mode lands at
roughly 120 TFLOPS.
"""

import numpy as np

from crtgemm import PerfParams, heatmap_csv, heatmap_grid, predicted_tflops

size = 16384
count = 13

template = PerfParams(bandwidth=1e12, int8_ops=1e15, m=size, n=size, k=size,
                      num_moduli=count, mode="accurate", precision="double",
                      correction=float(count))

rows = heatmap_grid((1.0e12, 5.0e12), (2.5e14, 2.0e15), (17, 15), template)
with open("heatmap.csv", "w") as fh:
    fh.write(heatmap_csv(rows))
print(f"wrote heatmap.csv with {len(rows)} cells "
      f"(accurate-{count}, {size}^3, c={count})")

grid = np.array([r[2] for r in rows]).reshape(17, 15)
bs = np.array(sorted({r[0] for r in rows}))
ps = np.array(sorted({r[1] for r in rows}))
print("\ncorner throughputs (TFLOPS):")
print(f"  b={bs[0]:.1e}, p={ps[0]:.1e}: {grid[0, 0]:7.1f}")
print(f"  b={bs[-1]:.1e}, p={ps[0]:.1e}: {grid[-1, 0]:7.1f}")
print(f"  b={bs[0]:.1e}, p={ps[-1]:.1e}: {grid[0, -1]:7.1f}")
print(f"  b={bs[-1]:.1e}, p={ps[-1]:.1e}: {grid[-1, -1]:7.1f}")

for bandwidth in (2.0e12, 4.0e12):
    from dataclasses import replace
    pp = replace(template, bandwidth=bandwidth, int8_ops=1.5e15)
    print(f"\n1500 TOPS engine at {bandwidth / 1e12:.0f} TB/s: "
          f"{predicted_tflops(pp):6.1f} TFLOPS")

for mode, denom in (("fast", 6 * count), ("accurate", 6 * (count + 1))):
    ceiling = 8.0 * 1.5e15 / denom * 1e-12
    print(f"compute-bound ceiling, {mode} mode: {ceiling:6.1f} TFLOPS")
