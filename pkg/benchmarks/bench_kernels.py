#!/usr/bin/env python3
"""Compare the compiled float kernels against the pure-Python fallbacks.

Times the two halves of the forward map -- the lattice search and the
batch amplitude evaluation -- on seeded random models of growing depth,
and the end-to-end forward map through both paths.  Run as

    python benchmarks/bench_kernels.py [--layers N ...]
"""

import argparse
import random
import time

from layerwave import forward, validate_model
from layerwave import kernels
from layerwave.amplitude import eval_batch
from layerwave.lattice import _py_enumerate


def timed(fn, *args):
    start = time.perf_counter()
    result = fn(*args)
    return result, time.perf_counter() - start


def random_model(layers, seed):
    rng = random.Random(seed)
    tau = tuple(rng.uniform(0.8, 2.0) for _ in range(layers + 1))
    refl = tuple(rng.uniform(0.05, 0.8) * rng.choice((-1, 1))
                 for _ in range(layers + 1))
    return validate_model(tau, refl)


def bench(layers, seed=5):
    model = random_model(layers, seed)
    tau = list(model.tau)
    bound = sum(tau)

    (ks, _), t_py_enum = timed(_py_enumerate, model.tau, bound, 0, 10 ** 7)
    _, t_py_amp = timed(eval_batch, model.refl, ks)

    row = {
        "layers": layers,
        "points": len(ks),
        "py_enum": t_py_enum,
        "py_amp": t_py_amp,
    }
    if kernels.compiled_available():
        (cks, cts), t_c_enum = timed(kernels.enumerate_lattice, tau, bound,
                                     0, 10 ** 7)
        assert cks == ks, "kernel enumeration mismatch"
        camps, t_c_amp = timed(kernels.eval_amplitudes, list(model.refl), cks)
        row.update(c_enum=t_c_enum, c_amp=t_c_amp)

    _, t_forward = timed(forward, model)
    row["forward"] = t_forward
    return row


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--layers", type=int, nargs="*",
                        default=[8, 12, 14, 16])
    args = parser.parse_args()

    have = kernels.compiled_available()
    print(f"compiled kernels available: {have}")
    header = f"{'layers':>6} {'points':>9} {'enum py':>9} {'amp py':>9}"
    if have:
        header += f" {'enum c':>9} {'amp c':>9} {'speedup':>8}"
    header += f" {'forward':>9}"
    print(header)
    for layers in args.layers:
        row = bench(layers)
        line = (f"{row['layers']:>6} {row['points']:>9} "
                f"{row['py_enum']:>8.3f}s {row['py_amp']:>8.3f}s")
        if have:
            speedup = (row["py_enum"] + row["py_amp"]) / \
                (row["c_enum"] + row["c_amp"])
            line += (f" {row['c_enum']:>8.3f}s {row['c_amp']:>8.3f}s "
                     f"{speedup:>7.1f}x")
        line += f" {row['forward']:>8.3f}s"
        print(line)


if __name__ == "__main__":
    main()
