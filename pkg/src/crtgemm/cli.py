"""Command-line interface: matrix generation, emulation, accuracy sweeps,
and performance-model evaluation."""

import argparse
import sys

import numpy as np

from .bench import GenSpec, gen_matrix, run_accuracy_sweep, sweep_csv
from .emulate import EmuConfig, emulate_gemm_complex, emulate_gemm_real
from .matfile import read_matrix, write_matrix
from .perfmodel import PerfParams, heatmap_csv, heatmap_grid, predict_time, \
    predicted_tflops


def _add_emu_flags(sub):
    sub.add_argument("--mode", choices=["fast", "accurate"], default="fast")
    sub.add_argument("-N", "--num-moduli", type=int, default=None)
    sub.add_argument("--block", type=int, default=8192,
                     help="output-column block width")
    sub.add_argument("--strategy", default="karatsuba",
                     choices=["karatsuba", "expand-rows", "expand-cols"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crtgemm",
        description="GEMM emulation on exact INT8 products with CRT "
                    "reconstruction, plus its analytic performance model.")
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="generate a matrix file")
    gen.add_argument("-m", type=int, required=True, help="rows")
    gen.add_argument("-n", type=int, required=True, help="columns")
    gen.add_argument("--phi", type=float, default=0.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--precision", choices=["single", "double"],
                     default="double")
    gen.add_argument("--domain", choices=["real", "complex"], default="real")
    gen.add_argument("--out", required=True)

    emu = subs.add_parser("emulate", help="multiply two matrix files")
    emu.add_argument("a")
    emu.add_argument("b")
    emu.add_argument("--out", required=True)
    _add_emu_flags(emu)

    acc = subs.add_parser("accuracy", help="accuracy sweep over (N, phi, seed)")
    acc.add_argument("-m", type=int, default=256)
    acc.add_argument("-n", type=int, default=256)
    acc.add_argument("-k", type=int, default=4096)
    acc.add_argument("-N", "--num-moduli", default=None,
                     help="comma-separated modulus counts")
    acc.add_argument("--phi", default="0.5", help="comma-separated phi values")
    acc.add_argument("--seeds", default="0", help="comma-separated seeds")
    acc.add_argument("--mode", choices=["fast", "accurate"], default="fast")
    acc.add_argument("--precision", choices=["single", "double"],
                     default="double")
    acc.add_argument("--domain", choices=["real", "complex"],
                     default="complex")
    acc.add_argument("--out", default=None, help="CSV path (default stdout)")

    perf = subs.add_parser("perfmodel", help="single performance prediction")
    _add_perf_dims(perf)
    perf.add_argument("-b", type=float, default=4.0e12,
                      help="memory bandwidth in B/s")
    perf.add_argument("-p", type=float, default=1.5e15,
                      help="INT8 throughput in ops/s")
    perf.add_argument("--out", default=None)

    heat = subs.add_parser("heatmap", help="performance-model grid as CSV")
    _add_perf_dims(heat)
    heat.add_argument("--b-min", type=float, default=1.0e12)
    heat.add_argument("--b-max", type=float, default=5.0e12)
    heat.add_argument("--b-steps", type=int, default=17)
    heat.add_argument("--p-min", type=float, default=2.5e14)
    heat.add_argument("--p-max", type=float, default=2.0e15)
    heat.add_argument("--p-steps", type=int, default=15)
    heat.add_argument("--out", default=None)
    return parser


def _add_perf_dims(sub):
    sub.add_argument("-m", type=int, default=16384)
    sub.add_argument("-n", type=int, default=16384)
    sub.add_argument("-k", type=int, default=16384)
    sub.add_argument("-N", "--num-moduli", type=int, default=13)
    sub.add_argument("-c", "--correction", type=float, default=None)
    sub.add_argument("--mode", choices=["fast", "accurate"],
                     default="accurate")
    sub.add_argument("--precision", choices=["single", "double"],
                     default="double")


def _emit(text, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _run_gen(args) -> int:
    spec = GenSpec(args.m, args.n, args.phi, args.seed, args.precision,
                   args.domain)
    write_matrix(args.out, gen_matrix(spec))
    return 0


def _run_emulate(args) -> int:
    a = read_matrix(args.a)
    b = read_matrix(args.b)
    domain = "complex" if np.iscomplexobj(a) or np.iscomplexobj(b) else "real"
    single = a.dtype in (np.float32, np.complex64) \
        and b.dtype in (np.float32, np.complex64)
    cfg = EmuConfig(precision="single" if single else "double",
                    domain=domain, mode=args.mode,
                    num_moduli=args.num_moduli, n_block=args.block,
                    strategy=args.strategy)
    if domain == "complex":
        c = emulate_gemm_complex(a.astype(np.complex128),
                                 b.astype(np.complex128), cfg)
    else:
        c = emulate_gemm_real(a.astype(np.float64), b.astype(np.float64), cfg)
    write_matrix(args.out, c)
    return 0


def _parse_list(text, cast):
    return [cast(tok) for tok in str(text).split(",") if tok != ""]


def _run_accuracy(args) -> int:
    if args.num_moduli is None:
        counts = [EmuConfig(precision=args.precision, domain=args.domain,
                            mode=args.mode).resolved_moduli]
    else:
        counts = _parse_list(args.num_moduli, int)
    phis = _parse_list(args.phi, float)
    seeds = _parse_list(args.seeds, int)
    rows = run_accuracy_sweep((args.m, args.n, args.k), counts, phis,
                              args.mode, args.precision, args.domain, seeds)
    _emit(sweep_csv(rows), args.out)
    return 0


def _params(args, bandwidth, int8_ops) -> PerfParams:
    return PerfParams(bandwidth=bandwidth, int8_ops=int8_ops, m=args.m,
                      n=args.n, k=args.k, num_moduli=args.num_moduli,
                      mode=args.mode, precision=args.precision,
                      correction=args.correction)


def _run_perfmodel(args) -> int:
    pp = _params(args, args.b, args.p)
    text = "seconds,tflops\n" \
        f"{predict_time(pp)!r},{predicted_tflops(pp)!r}\n"
    _emit(text, args.out)
    return 0


def _run_heatmap(args) -> int:
    template = _params(args, args.b_min, args.p_min)
    rows = heatmap_grid((args.b_min, args.b_max), (args.p_min, args.p_max),
                        (args.b_steps, args.p_steps), template)
    _emit(heatmap_csv(rows), args.out)
    return 0


_RUNNERS = {
    "gen": _run_gen,
    "emulate": _run_emulate,
    "accuracy": _run_accuracy,
    "perfmodel": _run_perfmodel,
    "heatmap": _run_heatmap,
}


def cli_dispatch(argv) -> int:
    """Run one CLI invocation; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _RUNNERS[args.command](args)
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"crtgemm: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
