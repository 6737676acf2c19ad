"""Test-matrix generation and accuracy sweeps.

Matrix entries follow (rand - 0.5) * exp(randn * phi), where rand is
uniform on (0, 1] and randn is standard normal; phi widens the dynamic
range without moving the bulk of the distribution.  Randomness comes from
a counter-based Philox stream with fixed documented mappings:

  uniform(0,1]  = ((raw >> 11) + 1) * 2^-53
  normal        = ndtri(((raw >> 11) + 0.5) * 2^-53)   (inverse CDF)

so a (seed, shape, phi) triple always reproduces the same matrix, on any
platform.  Raw words are consumed in column-major element order, all
uniforms first, then all normals (real part before imaginary part).
"""

import io
from dataclasses import dataclass

import numpy as np
from numpy.random import Philox
from scipy.special import ndtri

from .emulate import EmuConfig, emulate_gemm_complex, emulate_gemm_real
from .errors import ConfigError
from .oracle import max_relative_error, reference_gemm_dd


@dataclass(frozen=True)
class GenSpec:
    """Shape, dynamic-range parameter, and stream seed for one matrix."""

    rows: int
    cols: int
    phi: float = 0.0
    seed: int = 0
    precision: str = "double"
    domain: str = "real"

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ConfigError("matrix dimensions must be positive")
        if self.phi < 0:
            raise ConfigError("phi must be >= 0")
        if self.precision not in ("single", "double"):
            raise ConfigError("precision must be 'single' or 'double'")
        if self.domain not in ("real", "complex"):
            raise ConfigError("domain must be 'real' or 'complex'")


def _component(raw_u, raw_n, phi, shape):
    u = ((raw_u >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * 2.0**-53
    z = ndtri(((raw_n >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53)
    vals = (u - 0.5) * np.exp(z * phi)
    return vals.reshape(shape, order="F")


def gen_matrix(gs: GenSpec) -> np.ndarray:
    """Deterministic random matrix for the given spec."""
    count = gs.rows * gs.cols
    blocks = 4 if gs.domain == "complex" else 2
    raw = Philox(gs.seed).random_raw(blocks * count)
    shape = (gs.rows, gs.cols)
    re = _component(raw[:count], raw[count:2 * count], gs.phi, shape)
    if gs.domain == "complex":
        im = _component(raw[2 * count:3 * count], raw[3 * count:], gs.phi,
                        shape)
        out = re + 1j * im
        return out.astype(np.complex64 if gs.precision == "single"
                          else np.complex128)
    return re.astype(np.float32 if gs.precision == "single" else np.float64)


def run_accuracy_sweep(dims, moduli_counts, phis, mode="accurate",
                       precision="double", domain="complex",
                       seeds=(0,)) -> list:
    """Max-relative-error rows over a (N, phi, seed) grid.

    Returns tuples (num_moduli, phi, seed, max_rel_error) ordered by
    (num_moduli, phi, seed).  The double-double reference for each
    (phi, seed) pair is computed once and shared across modulus counts.
    """
    m, n, k = dims
    references = {}
    inputs = {}
    for phi in phis:
        for seed in seeds:
            a = gen_matrix(GenSpec(m, k, phi, seed, precision, domain))
            b = gen_matrix(GenSpec(k, n, phi, seed + 1, precision, domain))
            inputs[(phi, seed)] = (a, b)
            references[(phi, seed)] = reference_gemm_dd(a, b)
    rows = []
    for count in moduli_counts:
        cfg = EmuConfig(precision=precision, domain=domain, mode=mode,
                        num_moduli=count)
        for phi in phis:
            for seed in seeds:
                a, b = inputs[(phi, seed)]
                if domain == "complex":
                    approx = emulate_gemm_complex(a, b, cfg)
                else:
                    approx = emulate_gemm_real(a, b, cfg)
                err = max_relative_error(approx, references[(phi, seed)])
                rows.append((count, float(phi), int(seed), err))
    return rows


def sweep_csv(rows) -> str:
    """Serialize sweep rows with the ``N,phi,seed,max_rel_error`` schema."""
    buf = io.StringIO()
    buf.write("N,phi,seed,max_rel_error\n")
    for count, phi, seed, err in rows:
        buf.write(f"{count},{phi!r},{seed},{err!r}\n")
    return buf.getvalue()
