"""Run every registered reduction through the verifier and tabulate.

    python3 scripts/verify_suite.py --trials 100 --out reports.jsonl
"""

import argparse
import json
import time
from dataclasses import dataclass
from typing import Optional

from ematroids.weihrauch import REDUCTIONS, monotonicity, negative_controls, verify_reduction


@dataclass
class SuiteConfig:
    trials: int = 100
    seed: int = 0
    budget: Optional[int] = None
    monotone_pairs: int = 50
    out: Optional[str] = None


def run(cfg: SuiteConfig) -> bool:
    rows, records = [], []
    for r in REDUCTIONS.values():
        t0 = time.time()
        rep = verify_reduction(r, trials=cfg.trials, budget=cfg.budget, seed=cfg.seed)
        mono = monotonicity(r, pairs=cfg.monotone_pairs, seed=cfg.seed)
        rows.append((r.name, r.strength, f"{rep.passes}/{rep.trials}", rep.max_queries,
                     f"{len(mono['violations'])}/{mono['compared']}", f"{time.time() - t0:.1f}s"))
        records.append({**rep.to_json(), "monotonicity": mono})
    controls = [(r.name, len(verify_reduction(r, trials=cfg.trials, seed=cfg.seed).failures))
                for r in negative_controls()]

    head = ("reduction", "strength", "passes", "max queries", "mono bad/compared", "time")
    widths = [max(len(str(x)) for x in col) for col in zip(head, *rows)]
    for row in [head, *rows]:
        print("  ".join(str(x).ljust(w) for x, w in zip(row, widths)))
    print()
    for name, fails in controls:
        print(f"negative control {name}: {fails} failures (want >= 1)")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True, default=repr) + "\n")
    good = all(rec["passes"] == rec["trials"] and not rec["monotonicity"]["violations"] for rec in records)
    return good and all(f > 0 for _, f in controls)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=int, default=None)
    ap.add_argument("--monotone-pairs", type=int, default=50)
    ap.add_argument("--out", default=None)
    a = ap.parse_args()
    ok = run(SuiteConfig(a.trials, a.seed, a.budget, a.monotone_pairs, a.out))
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
