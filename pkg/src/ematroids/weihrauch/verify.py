"""Seeded verification of reductions.

Every trial draws a certified source instance, pushes it through ``phi``,
checks the target against its certificate, and back-translates up to 32
target solutions.  The source streams are wrapped in a shared
:class:`~ematroids.codes.Probe`, so every source query made by the
reduction (building and validating the target, ``psi``) is charged to one
budget.  Target solutions are drawn by the oracle from an unmetered twin
of the target, so oracle work is never charged.
Strong ``psi`` only ever sees the target solution.
"""

from __future__ import annotations

import dataclasses
import random
import traceback
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..codes import Budget, BudgetExhausted, Probe, unpair
from ..matroid import EMatroid
from .generators import generate, split_rng
from .problems import PROBLEMS, ChoiceFunction, Instance
from .reductions import REDUCTIONS, STRONG, Reduction, _embn_cn_psi

SOLUTION_CAP = 32
STREAM_KEYS = ("f", "p")


@dataclass
class Report:
    name: str
    trials: int = 0
    passes: int = 0
    failures: list[dict] = field(default_factory=list)
    max_queries: int = 0

    @property
    def ok(self) -> bool:
        return self.trials > 0 and self.passes == self.trials

    @property
    def exhausted(self) -> int:
        return sum(1 for f in self.failures if f.get("error") == "BudgetExhausted")

    def to_json(self) -> dict:
        return {
            "reduction": self.name,
            "trials": self.trials,
            "passes": self.passes,
            "failures": self.failures,
            "max_queries": self.max_queries,
        }


def default_budget(src: Instance) -> int:
    return 4 * src.stabilization_bound ** 2


def default_generator(r: Reduction, size: int = 6) -> Callable[[int], Instance]:
    """Seeded source instances for ``r``; ``n`` alternates 2, 3 where needed."""
    kind = r.source

    def gen(seed: int) -> Instance:
        n = None
        if kind in ("gacn", "embn", "csubmax", "ccardmax"):
            n = 2 + seed % 2
        elif kind in ("gaclt", "emblt"):
            n = 3
        return generate(kind, seed, size, n)
    return gen


# -- wrapping source streams --------------------------------------------------------------------

def with_streams(src: Instance, wrap: Callable[[Callable[[int], int]], Callable[[int], int]]) -> Instance:
    """A copy of ``src`` whose input streams are replaced by ``wrap(stream)``."""
    data = dict(src.data)
    for key in STREAM_KEYS:
        if key in data:
            data[key] = wrap(data[key])
    if isinstance(data.get("m"), EMatroid):
        data["m"] = dataclasses.replace(data["m"], e=wrap(data["m"].e))
    return Instance(src.kind, data, src.cert, src.stabilization_bound, dict(src.params), src.seed)


def has_streams(src: Instance) -> bool:
    return any(k in src.data for k in STREAM_KEYS) or isinstance(src.data.get("m"), EMatroid)


def _budget_solution(sol, limit: int):
    if isinstance(sol, ChoiceFunction):
        return ChoiceFunction(sol.pick, limit)
    return sol


def _describe(x) -> Any:
    if isinstance(x, (int, str, bool)) or x is None:
        return x
    if isinstance(x, (frozenset, set)) or type(x).__name__ == "FiniteSet":
        return sorted(x)
    if isinstance(x, (list, tuple)):
        return [_describe(y) for y in x]
    return repr(x)[:200]


# -- one trial ------------------------------------------------------------------------------------

def run_trial(r: Reduction, src: Instance, limit: int, rng: random.Random) -> dict:
    """Returns a transcript; ``transcript["passed"]`` is the verdict."""
    budget = Budget(limit)
    probes: list[Probe] = []

    def wrap(stream):
        p = Probe(stream, budget)
        probes.append(p)
        return p

    P, Q = PROBLEMS[r.source], PROBLEMS[r.target]
    log: dict = {"seed": src.seed, "budget": limit, "candidates": []}
    try:
        live = with_streams(src, wrap)
        tgt = r.apply(live)
        if not Q.validate(tgt, tgt.stabilization_bound):
            log.update(passed=False, error="InvalidTarget")
            return log
        # target solutions come from the oracle, which reads an unmetered twin of the target
        sols = Q.sample_solutions(r.apply(src), rng, SOLUTION_CAP)
        if not sols:
            log.update(passed=False, error="NoTargetSolutions")
            return log
        for sol in sols:
            sol = _budget_solution(sol, limit)
            back = r.back(sol) if r.strength == STRONG else r.back(sol, live)
            good = P.is_solution(src, back)
            log["candidates"].append({"target": _describe(sol), "source": _describe(back), "ok": good})
            if not good:
                log.update(passed=False, error="BadBackTranslation")
                return log
        log["passed"] = True
    except BudgetExhausted as e:
        log.update(passed=False, error="BudgetExhausted", detail=str(e))
    except Exception as e:  # any crash is a failed trial, never an aborted run
        log.update(passed=False, error=type(e).__name__, detail=str(e),
                   trace=traceback.format_exc(limit=4).splitlines()[-3:])
    finally:
        log["queries"] = budget.used
        log["query_log"] = sorted(i for p in probes for i in p.seen)[:64]
    return log


def verify_reduction(r: Reduction, gen: Optional[Callable[[int], Instance]] = None, trials: int = 100,
                     budget: Optional[int] = None, seed: int = 0) -> Report:
    """Trial ``i`` uses source seed ``seed + i``; reports merge in seed order."""
    gen = gen or default_generator(r)
    report = Report(r.name)
    for i in range(trials):
        s = seed + i
        rng = split_rng(s, "verify", r.name)
        try:
            src = gen(s)
        except Exception as e:
            report.trials += 1
            report.failures.append({"seed": s, "passed": False, "error": type(e).__name__, "detail": str(e)})
            continue
        limit = budget if budget is not None else default_budget(src)
        log = run_trial(r, src, limit, rng)
        report.trials += 1
        report.max_queries = max(report.max_queries, log["queries"])
        if log["passed"]:
            report.passes += 1
        else:
            report.failures.append(log)
    return report


def verify_all(trials: int = 100, budget: Optional[int] = None, seed: int = 0) -> list[Report]:
    return [verify_reduction(r, trials=trials, budget=budget, seed=seed) for r in REDUCTIONS.values()]


# -- negative controls ----------------------------------------------------------------------------

def corrupted(r: Reduction, psi: Callable, tag: str = "corrupt") -> Reduction:
    return dataclasses.replace(r, name=f"{r.name}:{tag}", psi=psi)


def negative_controls() -> list[Reduction]:
    """Three reductions with a deliberately broken backward map."""
    def cn_cnu_off_by_one(m: int) -> int:
        return unpair(m)[0] + 1

    def lpo_cn_unshifted(m: int) -> int:
        return m

    def embn_cn_drop(m: int):
        b = sorted(_embn_cn_psi(m))
        return frozenset(b[1:])

    return [
        corrupted(REDUCTIONS["cn-cnu"], cn_cnu_off_by_one, "off-by-one"),
        corrupted(REDUCTIONS["lpo-cn"], lpo_cn_unshifted, "unshifted"),
        corrupted(REDUCTIONS["embn-cn"], embn_cn_drop, "drop-element"),
    ]


# -- monotonicity of phi ---------------------------------------------------------------------------

class PrefixExceeded(Exception):
    pass


class PrefixOnly:
    """The first ``p`` values of a stream; anything later is unknown."""

    def __init__(self, values: list[int]):
        self.values = values

    def __call__(self, n: int) -> int:
        if n >= len(self.values):
            raise PrefixExceeded(n)
        return self.values[n]


def _alternative(kind: str, rng: random.Random) -> Callable[[int], int]:
    memo: dict[int, int] = {}

    def alt(n: int) -> int:
        if n not in memo:
            if kind == "lpo":
                memo[n] = rng.randrange(2)
            elif kind.startswith("emb") or kind in ("csubmax", "ccardmax"):
                memo[n] = rng.randrange(1, 64)
            else:
                memo[n] = rng.randrange(16)
        return memo[n]
    return alt


def _spliced(prefix: list[int], rest: Callable[[int], int]) -> Callable[[int], int]:
    return lambda n: prefix[n] if n < len(prefix) else rest(n)


def _output_prefix(r: Reduction, src: Instance, stream_for, length: int) -> list:
    data, params = r.forward(with_streams(src, stream_for).data, src.params)
    out = r.output(data)
    vals = []
    for t in range(length):
        try:
            vals.append(out(t))
        except PrefixExceeded:
            break
    return vals


def check_monotone(r: Reduction, src: Instance, p: int, rng: random.Random,
                   length: int = 48) -> tuple[Optional[dict], int]:
    """Compare the output prefix computable from the first ``p`` source
    values against the full source and against a random extension.

    Returns ``(violation or None, number of output positions compared)``.
    """
    if r.output is None or not has_streams(src):
        return None, 0
    prefixes: list[list[int]] = []

    def record(stream):
        prefixes.append([stream(i) for i in range(p)])
        return stream

    with_streams(src, record)
    it = iter(prefixes)
    short = _output_prefix(r, src, lambda s: PrefixOnly(next(it)), length)
    full = _output_prefix(r, src, lambda s: s, len(short))
    it = iter(prefixes)
    alt = _output_prefix(r, src, lambda s: _spliced(next(it), _alternative(src.kind, rng)), len(short))
    if full == short and alt == short:
        return None, len(short)
    return {"prefix": p, "short": _describe(short), "full": _describe(full), "alt": _describe(alt)}, len(short)


def monotonicity(r: Reduction, pairs: int = 50, seed: int = 0) -> dict:
    """Violations over ``pairs`` random (instance, prefix length) choices."""
    gen = default_generator(r)
    bad, compared = [], 0
    for i in range(pairs):
        rng = split_rng(seed + i, "monotone", r.name)
        src = gen(seed + i)
        v, k = check_monotone(r, src, rng.randrange(1, 40), rng)
        compared += k
        if v is not None:
            v["seed"] = seed + i
            bad.append(v)
    return {"reduction": r.name, "pairs": pairs, "compared": compared, "violations": bad}
