"""Time the compiled kernels against the pure-Python versions.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from fellquant import _pykernels
from fellquant.convalg import FellBundleSpec, LineTwist, build_algebra
from fellquant.finlat import FiniteSupLattice
from fellquant.groupoid import cyclic_group, group_groupoid, pair_groupoid, symmetric_group

try:
    from fellquant import _ckernels
except ImportError:
    _ckernels = None


def cases():
    G = pair_groupoid(6)
    n = G.arrow_count
    rng = np.random.default_rng(0)
    u, v = int(rng.integers(1 << n)), int(rng.integers(1 << n))
    yield "set_product pair6", lambda k: k.set_product(u, v, G.compose)

    S4 = np.asarray(symmetric_group(4)[0], dtype=np.int64)
    yield "assoc_violation S4", lambda k: k.assoc_violation(S4)

    b = FellBundleSpec(group_groupoid(cyclic_group(12)),
                       LineTwist(np.exp(2j * np.pi * np.outer(np.arange(12), np.arange(12)) / 12)))
    build_algebra(b)
    s, t = b.random_section(rng), b.random_section(rng)
    yield "line_convolve Z12", lambda k: k.line_convolve(s, t, b._left, b._right, b._target,
                                                         b._coef, b.arrow_count)

    L = FiniteSupLattice.powerset(4)
    ident = np.arange(len(L), dtype=np.int64)
    yield "subset_join_violation P(4)", lambda k: k.subset_join_violation(
        L.join_table, L.bottom, ident, L.join_table, L.bottom)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    print(f"{'kernel':<28} {'python us':>10} {'cython us':>10} {'speedup':>8}")
    for name, call in cases():
        py = min(timeit.repeat(lambda: call(_pykernels), number=args.repeat, repeat=3)) / args.repeat
        if _ckernels is None:
            print(f"{name:<28} {py * 1e6:10.1f} {'n/a':>10} {'':>8}")
            continue
        cy = min(timeit.repeat(lambda: call(_ckernels), number=args.repeat, repeat=3)) / args.repeat
        print(f"{name:<28} {py * 1e6:10.1f} {cy * 1e6:10.1f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
