"""Analytic execution-time and throughput model.

Execution time is memory traffic over sustained bandwidth plus arithmetic
work over INT8 engine throughput, with a correction term c that accounts
for arithmetic overhead in memory-bound stages.  Complex GEMM counts as
8*m*n*k floating-point operations for throughput conversion.
"""

import io
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class PerfParams:
    """Inputs of the analytic model.

    Attributes:
        bandwidth: peak sustained memory bandwidth in bytes/second.
        int8_ops: peak INT8 matrix-engine throughput in operations/second.
        m, n, k: problem dimensions.
        num_moduli: modulus count N.
        mode: "fast" or "accurate".
        precision: "single" or "double".
        correction: overhead term c; defaults to num_moduli when None.
    """

    bandwidth: float
    int8_ops: float
    m: int
    n: int
    k: int
    num_moduli: int
    mode: str = "accurate"
    precision: str = "double"
    correction: float | None = None

    def __post_init__(self):
        if self.bandwidth <= 0 or self.int8_ops <= 0:
            raise ConfigError("bandwidth and int8_ops must be positive")
        if min(self.m, self.n, self.k) <= 0:
            raise ConfigError("dimensions must be positive")
        if self.num_moduli < 1:
            raise ConfigError("num_moduli must be >= 1")
        if self.mode not in ("fast", "accurate"):
            raise ConfigError("mode must be 'fast' or 'accurate'")
        if self.precision not in ("single", "double"):
            raise ConfigError("precision must be 'single' or 'double'")
        if self.correction is not None and self.correction < 0:
            raise ConfigError("correction must be >= 0")

    @property
    def c(self) -> float:
        return float(self.num_moduli if self.correction is None
                     else self.correction)


def predict_time(pp: PerfParams) -> float:
    """Predicted execution time in seconds."""
    m, n, k, big_n, c = pp.m, pp.n, pp.k, pp.num_moduli, pp.c
    if pp.mode == "fast":
        if pp.precision == "double":
            mem = ((3 * big_n + 32 + c) * k + 4) * (m + n) \
                + (16 * big_n + 16 + 2 * c) * m * n
        else:
            mem = ((3 * big_n + 16 + c) * k + 4) * (m + n) \
                + (16 * big_n + 8 + 2 * c) * m * n
        ops = 6 * big_n * m * n * k
    else:
        if pp.precision == "double":
            mem = ((3 * big_n + 35 + c) * k + 8) * (m + n) \
                + (16 * big_n + 40 + 2 * c) * m * n
        else:
            mem = ((3 * big_n + 19 + c) * k + 8) * (m + n) \
                + (16 * big_n + 32 + 2 * c) * m * n
        ops = 6 * (big_n + 1) * m * n * k
    return mem / pp.bandwidth + ops / pp.int8_ops


def predicted_tflops(pp: PerfParams) -> float:
    """Predicted throughput, 8*m*n*k / time * 1e-12."""
    return 8.0 * pp.m * pp.n * pp.k / predict_time(pp) * 1e-12


def heatmap_grid(b_range, p_range, steps, template: PerfParams):
    """Dense (bandwidth, int8_ops, tflops) grid, row-major over bandwidth.

    ``b_range`` and ``p_range`` are (low, high) pairs sampled with
    ``steps`` points each (a single int applies to both axes).
    """
    if isinstance(steps, int):
        b_steps = p_steps = steps
    else:
        b_steps, p_steps = steps
    if b_steps < 1 or p_steps < 1:
        raise ConfigError("steps must be >= 1")
    b_lo, b_hi = b_range
    p_lo, p_hi = p_range
    if b_lo <= 0 or p_lo <= 0 or b_hi < b_lo or p_hi < p_lo:
        raise ConfigError("ranges must be positive and ordered")
    bs = np.linspace(b_lo, b_hi, b_steps)
    ps = np.linspace(p_lo, p_hi, p_steps)
    rows = []
    for b in bs:
        for p in ps:
            pp = replace(template, bandwidth=float(b), int8_ops=float(p))
            rows.append((float(b), float(p), predicted_tflops(pp)))
    return rows


def heatmap_csv(rows) -> str:
    """Serialize heatmap rows with the ``b,p,tflops`` schema."""
    buf = io.StringIO()
    buf.write("b,p,tflops\n")
    for b, p, tf in rows:
        buf.write(f"{b!r},{p!r},{tf!r}\n")
    return buf.getvalue()
