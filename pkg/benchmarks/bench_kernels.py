"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--height 190 --width 217 --dmax 15]
"""

import argparse
import timeit

import numpy as np

from genstereo import kernels
from genstereo.evolution import GaConfig, evolve
from genstereo.fitness import FitnessContext
from genstereo.fuzzy import possibility_table
from genstereo.genome import random_init, rng_stream
from genstereo.synthetic import block_disparity, random_dot_stereogram


def best_of(fn, number, repeat=5):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--height", type=int, default=190)
    ap.add_argument("--width", type=int, default=217)
    ap.add_argument("--dmax", type=int, default=15)
    ap.add_argument("--radius", type=int, default=1)
    args = ap.parse_args()

    disp = block_disparity(args.height, args.width, args.height // 3, args.dmax // 2)
    pair = random_dot_stereogram(disp, np.random.default_rng(0)).pair
    table = possibility_table()
    ctx = FitnessContext.from_pair(pair, args.dmax, args.radius)
    chrom = random_init(args.height, args.width, args.dmax, rng_stream(1))
    cfg = GaConfig(d_max=args.dmax, population_size=50, max_generations=10, stagnation_window=1000)

    print(f"{args.width}x{args.height}, d_max={args.dmax}, radius={args.radius}")
    print(f"{'backend':8} {'volume ms':>10} {'fitness us':>11} {'match s':>8}")
    for name in kernels.available_backends():
        k = kernels.backend(name)
        vol_t = best_of(lambda: k.build_volume(pair.reference.pixels, pair.target.pixels, table, args.dmax), 5)
        fit_t = best_of(lambda: k.fitness(ctx.volume.values, ctx.ref_grad, ctx.tgt_grad, chrom, args.radius), 200)
        kernels.set_default_backend(name)
        run_t = best_of(lambda: evolve(pair, cfg, ctx=ctx), 1, repeat=3)
        print(f"{name:8} {vol_t * 1e3:10.2f} {fit_t * 1e6:11.1f} {run_t:8.3f}")


if __name__ == "__main__":
    main()
