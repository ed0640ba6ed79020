"""Compare the compiled and pure-Python search kernels.

    python3 benchmarks/bench_kernels.py [-repeat 3] [-seed 0]

Each workload runs on both backends; results must agree before timings count.
"""

from __future__ import annotations

import argparse
import random
import sys
import timeit
from fractions import Fraction

from hallspace import kernels
from hallspace.covergame import is_robust
from hallspace.graphs import is_expander, random_left_regular
from hallspace.matchings import counterexample, counterexample_graph, find_cover_matching, two_path_cover

EPS = Fraction(1, 24)


def _expander(rng: random.Random):
    # 60 right vertices keep the masks inside the compiled kernel's 64-bit limit
    while True:
        g = random_left_regular(20, 60, 3, rng, max_right_degree=4)
        if is_expander(g, 6, 2 - EPS / 2):
            return g


def workloads(seed: int):
    g = _expander(random.Random(seed))
    cg = counterexample_graph(Fraction(3, 8))
    hg = counterexample(Fraction(5, 12))
    return {
        "expansion |L|=20 s=6": lambda b: is_expander(g, 6, 2 - EPS / 2, backend=b).certified,
        "cover matching |L|=20": lambda b: bool(find_cover_matching(g, range(20), backend=b)),
        "robustness, 16-edge counterexample": lambda b: is_robust(cg, [], [], EPS, cg.left_count, backend=b).counterexample,
        "2-path covers of all 10-edge subsets": lambda b: sum(
            two_path_cover(hg, [e for e in range(10) if m >> e & 1], backend=b) is None for m in range(1, 1 << 10)
        ),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-repeat", type=int, default=3)
    ap.add_argument("-seed", type=int, default=0)
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the python backend is available", file=sys.stderr)
    print(f"{'workload':40s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in workloads(args.seed).items():
        answers = {b: fn(b) for b in backends}
        if len(set(answers.values())) != 1:
            print(f"{name}: backends disagree {answers}", file=sys.stderr)
            return 1
        times = {b: min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)) for b in backends}
        row = f"{name:40s}" + "".join(f"{times[b]:11.4f}s" for b in backends)
        if len(backends) > 1:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
