"""Time each kernel under the pure-Python and compiled backends.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import random
import timeit

import numpy as np

from profsite import kernels
from profsite.corpus import random_gset, standard_towers
from profsite.groups import level_kernel, symmetric_group
from profsite.gsets import coset_gset, trivial_gset


def workloads():
    t = standard_towers()["s3xc2_d2"]
    s4 = symmetric_group(4)
    mul = kernels.as_table(s4.mul)
    mask = np.zeros(s4.order, dtype=np.uint8)
    mask[[1, 7]] = 1
    rng = random.Random(0)
    X = random_gset(t, rng, 12, min_size=10)
    ax = kernels.as_table(X.table_at(t.depth))
    src = kernels.as_table(coset_gset(level_kernel(t, 1)).table_at(2))
    dst = kernels.as_table(trivial_gset(t, 3).table_at(2))
    ident = kernels.as_table(np.arange(X.size))
    return {
        "associativity S4": lambda k: k.associativity_violation(mul),
        "subgroup closure S4": lambda k: k.subgroup_closure(mul, mask),
        "orbit labels": lambda k: k.orbit_labels(ax),
        "equivariance check": lambda k: k.equivariance_violation(ax, ax, ident),
        "brute-force maps": lambda k: k.brute_force_equivariant(src, dst),
        "homomorphism check": lambda k: k.homomorphism_violation(
            kernels.as_table(t.level(2).mul), kernels.as_table(t.level(1).mul), kernels.as_table(t.projection(2, 1))
        ),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = [n for n in ("python", "cython") if n in kernels.BACKENDS]
    if len(names) < 2:
        print("compiled extension not built; timing the Python backend only")
    print(f"{'kernel':<22}" + "".join(f"{n:>14}" for n in names) + ("       speedup" if len(names) == 2 else ""))
    for label, fn in workloads().items():
        times = []
        for n in names:
            mod = kernels.BACKENDS[n]
            number = 3
            best = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
            times.append(best)
        row = f"{label:<22}" + "".join(f"{1e3 * x:>12.3f}ms" for x in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>13.1f}x"
        print(row)


if __name__ == "__main__":
    main()
