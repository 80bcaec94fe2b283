"""Compare the compiled and pure-Python WRatio kernels.

    python benchmarks/bench_fuzz.py [--pairs 20000] [--repeat 3]
"""
import argparse
import random
import string
import timeit

from geodis.fuzz import _pyfuzz

try:
    from geodis.fuzz import _cfuzz
except ImportError:
    _cfuzz = None


def make_pairs(n, seed=0, lo=3, hi=40):
    rng = random.Random(seed)
    alphabet = string.ascii_lowercase + "    "
    return [("".join(rng.choice(alphabet) for _ in range(rng.randint(lo, hi))),
             "".join(rng.choice(alphabet) for _ in range(rng.randint(lo, hi))))
            for _ in range(n)]


def bench(mod, pairs, repeat):
    w = mod.wratio
    best = min(timeit.repeat(lambda: [w(a, b) for a, b in pairs], number=1, repeat=repeat))
    return best, len(pairs) / best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    pairs = make_pairs(args.pairs)
    py_t, py_rate = bench(_pyfuzz, pairs, args.repeat)
    print(f"python  {py_t:8.3f}s  {py_rate:12,.0f} pairs/s")
    if _cfuzz is None:
        print("cython  not built (pip install -e . compiles it)")
        return
    assert all(_cfuzz.wratio(a, b) == _pyfuzz.wratio(a, b) for a, b in pairs[:2000])
    c_t, c_rate = bench(_cfuzz, pairs, args.repeat)
    print(f"cython  {c_t:8.3f}s  {c_rate:12,.0f} pairs/s")
    print(f"speedup {py_t / c_t:8.1f}x")


if __name__ == "__main__":
    main()
