"""Print the moving-marker trace for an enumeration that misses some values.

    python3 scripts/marker_trace.py --prefix 0 1 --skip 2 7 --steps 30
"""

import argparse

from ematroids.codes import MovingMarker, Shift, Stream, pair, unpair


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--prefix", type=int, nargs="*", default=[])
    ap.add_argument("--skip", type=int, nargs="+", default=[2])
    ap.add_argument("--offset", type=int, default=0)
    ap.add_argument("--steps", type=int, default=30)
    a = ap.parse_args()

    f = Stream(a.prefix, Shift(a.offset, frozenset(a.skip)))
    mm = MovingMarker(f)
    print(" k  f(k)  marker      g(k)")
    for k in range(a.steps):
        m = mm.marker(k)
        g = mm.g(k)
        print(f"{k:2}  {f(k):4}  {str(m):10}  {g} = pair{unpair(g)}")
    y = f.omitted().first(1)[0]
    final = mm.settle(y)
    print(f"\nleast omitted value {y}; the target misses only {pair(*final)} = pair{final}")


if __name__ == "__main__":
    main()
