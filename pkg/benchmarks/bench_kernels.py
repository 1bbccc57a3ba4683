"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py --size 1000000 --repeat 5
    python benchmarks/bench_kernels.py --end-to-end table1

Kernel timings exclude JIT compilation (one warm-up call per kernel).  The
end-to-end mode runs the CLI twice in subprocesses, once with
RENYIROBUST_DISABLE_NUMBA=1, and reports wall time for each.
"""

import argparse
import math
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from renyirobust import kernels


def kernel_inputs(size, rng):
    d = 2.5 - 1.0 / 3.0
    lr = rng.normal(0.0, 0.7, size)
    return {
        "mt_gamma_candidates": (rng.normal(size=size), rng.uniform(size=size), d, 1.0 / math.sqrt(9.0 * d)),
        "central_moments": (rng.gamma(0.5, size=size),),
        "selfnorm_renyi": (lr, 2.0),
        "selfnorm_kl": (lr,),
        "beta_log_kernel": (rng.uniform(1e-9, 1 - 1e-9, size), -0.5, 2.0, 0.3),
        "log_mix2": (rng.normal(size=size), rng.normal(size=size), math.log(0.3), math.log(0.7)),
    }


def best_of(fn, args, repeat):
    fn(*args)
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def bench_kernels(size, repeat, seed):
    if not kernels.NUMBA_KERNELS:
        sys.exit("numba is not installed; nothing to compare")
    inputs = kernel_inputs(size, np.random.default_rng(seed))
    print(f"{'kernel':<22}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, args in inputs.items():
        t_np = best_of(kernels.NUMPY_KERNELS[name], args, repeat)
        t_nb = best_of(kernels.NUMBA_KERNELS[name], args, repeat)
        print(f"{name:<22}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.2f}")


def bench_end_to_end(table, draws):
    cmd = [sys.executable, "-m", "renyirobust.cli.main", "reproduce", table, "--draws", str(draws), "--out", os.devnull]
    print(f"{'backend':<10}{'wall s':>10}")
    for label, flag in (("numba", None), ("numpy", "1")):
        env = dict(os.environ)
        env.pop("RENYIROBUST_DISABLE_NUMBA", None)
        if flag:
            env["RENYIROBUST_DISABLE_NUMBA"] = flag
        start = time.perf_counter()
        subprocess.run(cmd, env=env, check=True)
        print(f"{label:<10}{time.perf_counter() - start:>10.2f}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=1_000_000, help="array length per kernel call")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--end-to-end", metavar="TABLE", help="also time a full reproduce run, e.g. table1")
    parser.add_argument("--draws", type=int, default=10**6, help="Monte Carlo draws for --end-to-end")
    args = parser.parse_args(argv)
    bench_kernels(args.size, args.repeat, args.seed)
    if args.end_to_end:
        print()
        bench_end_to_end(args.end_to_end, args.draws)


if __name__ == "__main__":
    main()
