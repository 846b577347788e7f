"""Dimensions of the rational gadget spaces over seeded instances.

For the unique-omission gadget the dimension is always 2; for the n-fold
gadget it is n + 1 + (largest omitted cardinality), so between n and 2n.
"""

import argparse
import random
from collections import Counter
from dataclasses import dataclass

from ematroids.vecspace import GadgetNSpace, build_gadget_space_2, sample_bases, truncated_rank
from ematroids.weihrauch import generate


@dataclass
class GadgetConfig:
    seeds: int = 20
    ns: tuple = (2, 3, 4)
    size: int = 6


def two_dim(cfg: GadgetConfig) -> Counter:
    ranks = Counter()
    for seed in range(cfg.seeds):
        src = generate("cnu", seed, cfg.size)
        a = src.cert.first(1)[0]
        space = build_gadget_space_2(src.data["f"])
        bound = 2 * max(space.key_slot(k) for k in range(2 * a + 12)) + 2
        ranks[truncated_rank(space, bound)] += 1
    return ranks


def n_fold(cfg: GadgetConfig) -> list[tuple]:
    rows = []
    for n in cfg.ns:
        for seed in range(cfg.seeds):
            src = generate("ccardmax", seed, cfg.size, n)
            om = src.cert.omitted
            space = GadgetNSpace(src.data["f"], n, om)
            b = sample_bases(space, random.Random(seed), 1)[0]
            rows.append((n, seed, max(len(x) for x in om), space.dimension, len(b)))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--size", type=int, default=6)
    a = ap.parse_args()
    cfg = GadgetConfig(seeds=a.seeds, size=a.size)
    print("unique-omission gadget, truncated rank histogram:", dict(two_dim(cfg)))
    print()
    print("n  seed  top  dim  |B|  n<=dim<=2n")
    for n, seed, top, dim, size in n_fold(cfg):
        print(f"{n}  {seed:4}  {top:3}  {dim:3}  {size:3}  {n <= dim <= 2 * n}")


if __name__ == "__main__":
    main()
