"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel is timed on a fixed workload with both backends; outputs are
compared before timing so a speedup never hides a wrong answer.
"""
import argparse
import sys
import timeit

from mubnet import _pykernels
from mubnet.classical import affine_plane, remove_classes

try:
    from mubnet import _kernels
except ImportError:
    _kernels = None


def workloads():
    net4 = remove_classes(affine_plane(4), [0, 1])
    net5 = remove_classes(affine_plane(5), [0, 2])
    c4 = [list(c) for c in net4.classes]
    c5 = [list(c) for c in net5.classes]
    gens = [[1, 0, 0, 1], [0, 1, 4, 0]]
    return [
        ("transversals q=4 minus 2", lambda k: k.transversals(net4.n_points, c4)),
        ("transversals q=5 minus 2", lambda k: k.transversals(net5.n_points, c5)),
        ("divisor_gaps 1e5", lambda k: k.divisor_gaps(100_000)),
        ("subgroup_closure Z_5^4", lambda k: k.subgroup_closure([5, 5, 5, 5], gens)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1
    print(f"{'kernel':<28}{'python (ms)':>14}{'compiled (ms)':>16}{'speedup':>10}")
    for name, fn in workloads():
        a, b = fn(_pykernels), fn(_kernels)
        if sorted(map(tuple, a)) != sorted(map(tuple, b)) if name.startswith("subgroup") else list(a) != list(b):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        tp = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        tc = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<28}{tp:>14.2f}{tc:>16.2f}{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
