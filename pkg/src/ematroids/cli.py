"""Command line front end.

Records are JSON, one per line, with sorted keys, so identical command
lines give byte-identical output.

    ematroids gen embn --n 3 --seed 2 --size 6 --out inst.jsonl
    ematroids solve inst.jsonl
    ematroids reduce embn-cn inst.jsonl
    ematroids verify all --trials 100
    ematroids axioms inst.jsonl --prefix 8 --size-bound 4

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget
exhaustion outside ``verify``.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Optional

from .codes import Budget, BudgetExhausted, FiniteSet, InvalidInstance, Probe
from .matroid import EMatroid, check_ematroid_axioms
from .weihrauch.generators import FORMAT_VERSION, GENERATORS, NEEDS_N, certificate_json, from_record, generate, to_record
from .weihrauch.problems import PROBLEMS, Instance
from .weihrauch.reductions import REDUCTIONS, get_reduction, InvalidComposition
from .weihrauch.verify import default_budget, verify_reduction, with_streams

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
OUTPUT_PREFIX = 24


class UsageError(Exception):
    pass


def jsonable(x: Any) -> Any:
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, (frozenset, set, FiniteSet)):
        return sorted(x)
    if isinstance(x, (list, tuple)):
        return [jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    return repr(x)


def dumps(rec: dict) -> str:
    return json.dumps(jsonable(rec), sort_keys=True, separators=(",", ":"))


def emit(lines: list[str], out: Optional[str]) -> None:
    text = "".join(line + "\n" for line in lines)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def read_instance(path: str) -> Instance:
    try:
        with open(path) as fh:
            line = next((ln for ln in fh if ln.strip()), None)
    except OSError as e:
        raise UsageError(str(e)) from e
    if line is None:
        raise UsageError(f"{path}: no record")
    try:
        return from_record(json.loads(line))
    except (ValueError, KeyError) as e:
        raise UsageError(f"{path}: {e}") from e


def budgeted(inst: Instance, limit: Optional[int]) -> Instance:
    if limit is None:
        return inst
    budget = Budget(limit)
    return with_streams(inst, lambda s: Probe(s, budget))


# -- commands --------------------------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.kind not in GENERATORS:
        raise UsageError(f"unknown problem {args.kind!r}; choose from {sorted(GENERATORS)}")
    if args.kind in NEEDS_N and args.n is None:
        raise UsageError(f"{args.kind} needs --n")
    try:
        inst = generate(args.kind, args.seed, args.size, args.n)
    except InvalidInstance as e:
        raise UsageError(str(e)) from e
    emit([dumps(to_record(inst))], args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    live = budgeted(inst, args.budget)
    bound = args.limit or inst.stabilization_bound
    sols = PROBLEMS[inst.kind].brute_force_solutions(live, bound)
    rec = {"format_version": FORMAT_VERSION, "kind": inst.kind, "bound": bound, "solutions": sols}
    emit([dumps(rec)], args.out)
    return EXIT_OK


def _transcript(data: dict, length: int) -> dict:
    out: dict = {}
    if "marker" in data:
        mm = data["marker"]
        out["markers"] = [list(mm.marker(k)) for k in range(length)]
    if "markers" in data:
        out["markers"] = [[list(mm.marker(k)) for k in range(length)] for mm in data["markers"]]
    if "walk" in data:
        out["walk"] = [sorted(data["walk"].at(t)) for t in range(length)]
    space = data.get("space")
    if space is not None:
        out["dimension"] = space.dimension
        out["standard_basis"] = [space.element_of(v) for v in space.standard_basis()]
    return out


def cmd_reduce(args) -> int:
    try:
        r = get_reduction(args.name)
    except (KeyError, InvalidComposition) as e:
        raise UsageError(f"unknown reduction {args.name!r}") from e
    inst = read_instance(args.instance)
    if inst.kind != r.source:
        raise UsageError(f"{r.name} reduces {r.source}, not {inst.kind}")
    tgt = r.apply(budgeted(inst, args.budget))
    target: dict = {"kind": tgt.kind, "params": dict(sorted(tgt.params.items())),
                    "certificate": certificate_json(tgt)}
    if r.output is not None:
        out = r.output(tgt.data)
        target["prefix"] = [out(t) for t in range(OUTPUT_PREFIX)]
    rec = {"format_version": FORMAT_VERSION, "reduction": r.name, "strength": r.strength,
           "source": to_record(inst), "target": target,
           "transcript": _transcript(tgt.data, OUTPUT_PREFIX)}
    emit([dumps(rec)], args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.name == "all":
        rs = list(REDUCTIONS.values())
    else:
        try:
            rs = [get_reduction(args.name)]
        except (KeyError, InvalidComposition) as e:
            raise UsageError(f"unknown reduction {args.name!r}") from e
    lines, failed = [], False
    for r in rs:
        rep = verify_reduction(r, trials=args.trials, budget=args.budget, seed=args.seed)
        failed |= not rep.ok
        lines.append(dumps(rep.to_json()))
        print(f"{'PASS' if rep.ok else 'FAIL'} {r.name}: {rep.passes}/{rep.trials}"
              f" (max queries {rep.max_queries})", file=sys.stderr)
    emit(lines, args.out)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_axioms(args) -> int:
    inst = read_instance(args.instance)
    if inst.kind.startswith("emb"):
        m = inst.data["m"]
    elif inst.kind.startswith("gac"):
        m = REDUCTIONS["gac-emb"].apply(inst).data["m"]
    elif inst.kind == "vsb":
        m = REDUCTIONS["vsb-emb"].apply(inst).data["m"]
    else:
        raise UsageError(f"{inst.kind} instances carry no e-matroid")
    if args.budget is not None:
        budget = Budget(args.budget)
        m = EMatroid(Probe(m.e, budget), m.element, m.is_ground, m.dependent, m.name)
    enum_bound = args.enum_bound or default_budget(inst)
    rep = check_ematroid_axioms(m, args.prefix, args.size_bound, enum_bound)
    rec = {"kind": inst.kind, "ok": rep.ok, "enum_bound": enum_bound,
           "violations": [list(v) for v in rep.violations],
           "unconfirmed": len(rep.unconfirmed)}
    emit([dumps(rec)], args.out)
    return EXIT_OK if rep.ok else EXIT_FAIL


# -- parser ------------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ematroids", description="e-matroid reductions and their verification")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, seed=True):
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget", type=int, default=None, help="query budget on source streams")
        sp.add_argument("--out", default=None, help="write records here instead of stdout")

    g = sub.add_parser("gen", help="generate a certified instance record")
    g.add_argument("kind")
    g.add_argument("--size", type=int, default=6)
    g.add_argument("--n", type=int, default=None)
    common(g)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="brute-force solutions of a record")
    s.add_argument("instance")
    s.add_argument("--limit", type=int, default=None, help="search bound (default: stabilization bound)")
    common(s, seed=False)
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("reduce", help="push a record through a reduction")
    r.add_argument("name")
    r.add_argument("instance")
    common(r, seed=False)
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="seeded verification of one reduction or all")
    v.add_argument("name")
    v.add_argument("--trials", type=int, default=100)
    common(v)
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("axioms", help="bounded e-matroid axiom check of a record")
    a.add_argument("instance")
    a.add_argument("--prefix", type=int, default=8)
    a.add_argument("--size-bound", type=int, default=4)
    a.add_argument("--enum-bound", type=int, default=None)
    common(a, seed=False)
    a.set_defaults(func=cmd_axioms)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExhausted as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
