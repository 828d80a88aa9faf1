"""Command-line front end.

Reads a JSON job from a file or stdin, runs one decision procedure and
prints a report.  Exit codes: 0 Pronormal / true, 1 NotPronormal / false,
2 NotApplicable or any error.

Job schema::

    {"ambient": {"factors": [{"p": 3, "n": 3}]} | {"builtin": "alt5"},
     "subgroup": [element, ...], "K": [element, ...]}

Permutations are image lists (0-indexed, products read left to right),
wreath elements are {"v": [...], "s": [...]}, elements of a product are
arrays of components, matrices are {"p", "d", "entries"} row-major.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any

from .criteria import Decision, Reason, Verdict, theorem1_predicate, special_form, thm2_decide
from .errors import GroupError, IncompatiblePayloads, ElementNotInAmbient, NotTransitive, ParseError
from .group import DEFAULT_BUDGET, Group, Subgroup, generate, has_odd_index, overgroups_of, sylow_p
from .named import builtin
from .oracle import prn_definition, prop3_reduce
from .perm import contains_transposition, is_primitive
from .wreath import GenericWreath, WreathGroup, WreathProduct, build_product

COMMANDS = ("decide", "oracle", "reduce", "enumerate", "classify", "crosscheck", "example1")


# --------------------------------------------------------------------------
# parsing


def load_job(path: str | None) -> dict:
    try:
        text = sys.stdin.read() if path in (None, "-") else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    try:
        job = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(job, dict):
        raise ParseError("job must be a JSON object")
    return job


def _pairs(items, keys: tuple[str, str]) -> list[tuple[int, int]]:
    out = []
    try:
        for f in items:
            if isinstance(f, dict):
                out.append((int(f[keys[0]]), int(f[keys[1]])))
            else:
                a, b = f
                out.append((int(a), int(b)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad factor list: {exc}") from None
    return out


def build_ambient(job: dict) -> Group:
    amb = job.get("ambient")
    if not isinstance(amb, dict):
        raise ParseError("missing 'ambient' object")
    if "factors" in amb:
        try:
            return build_product(_pairs(amb["factors"], ("p", "n")))
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    if "builtin" in amb:
        try:
            return builtin(str(amb["builtin"]))
        except (KeyError, ValueError):
            raise ParseError(f"unknown builtin group {amb['builtin']!r}") from None
    raise ParseError("ambient needs 'factors' or 'builtin'")


def parse_element(G: Group, item) -> int:
    if isinstance(G, WreathGroup) and G.k == 1 and isinstance(item, dict):
        item = [item]
    try:
        return G.index(G.domain.from_json(item))
    except (IncompatiblePayloads, ElementNotInAmbient, ValueError, TypeError, KeyError) as exc:
        raise ParseError(f"element {item!r} does not parse in {G!r}: {exc}") from None


def parse_subgroup(G: Group, items, field: str) -> Subgroup:
    if items is None:
        raise ParseError(f"missing '{field}'")
    if not isinstance(items, list):
        raise ParseError(f"'{field}' must be a list of elements")
    return generate(G, [parse_element(G, x) for x in items])


# --------------------------------------------------------------------------
# report helpers


def element_json(G: Group, idx: int):
    return G.domain.to_json(G.element(int(idx)))


def subgroup_json(H: Subgroup) -> dict:
    return {"order": H.order, "generators": [element_json(H.ambient, g) for g in H.gens]}


def decision_json(d: Decision, G: Group | None = None) -> dict:
    out: dict[str, Any] = {"verdict": d.verdict.value, "reasons": [r.to_json() for r in d.reasons]}
    if isinstance(d.witness, Subgroup):
        out["witness"] = subgroup_json(d.witness)
    elif d.witness is not None and G is not None:
        out["witness"] = element_json(G, d.witness)
    return out


def _top_diagnostics(G, H: Subgroup) -> list[dict]:
    if isinstance(G, WreathProduct):
        views = [(G, H)]
    else:
        views = [(G.components[i], G.project(i, H)) for i in range(G.k)]
    out = []
    for i, (Gi, Hi) in enumerate(views):
        top = Gi.bar(Hi)
        gens = top.generators
        entry: dict[str, Any] = {"factor": i, "top_order": top.order}
        if Gi.n > 1 and gens:
            try:
                entry["primitive"] = is_primitive(gens)
            except NotTransitive:
                entry["primitive"] = False
            entry["contains_transposition"] = contains_transposition(gens)
        out.append(entry)
    return out


# --------------------------------------------------------------------------
# commands


def _decide(job, G, budget) -> tuple[dict, int]:
    H = parse_subgroup(G, job.get("subgroup"), "subgroup")
    K = parse_subgroup(G, job["K"], "K") if "K" in job else G.whole
    if isinstance(G, (WreathGroup, WreathProduct)):
        d = thm2_decide(G, K, H)
        return {**decision_json(d, G), "diagnostics": _top_diagnostics(G, H)}, d.exit_code
    if isinstance(G, GenericWreath) and G.name == "Sp2(3) wr Sym3":
        from .matgrp import example1_pipeline

        if "K" in job:
            raise ParseError("the Sp2(3) wr Sym3 pipeline decides pronormality in the whole group only")
        d = example1_pipeline(H)
        return decision_json(d, G), d.exit_code
    d = Decision(Verdict.NOT_APPLICABLE, [Reason("no-fast-criterion", None, f"no criterion applies to {G!r}; use 'oracle'")])
    return decision_json(d), d.exit_code


def _oracle(job, G, budget) -> tuple[dict, int]:
    H = parse_subgroup(G, job.get("subgroup"), "subgroup")
    K = parse_subgroup(G, job["K"], "K") if "K" in job else G.whole
    d = prn_definition(H, K, budget)
    return decision_json(d, G), d.exit_code


def _crosscheck(job, G, budget) -> tuple[dict, int]:
    fast, _ = _decide(job, G, budget)
    slow, _ = _oracle(job, G, budget)
    if fast["verdict"] == Verdict.NOT_APPLICABLE.value:
        return {"decide": fast, "oracle": slow, "agree": None}, 2
    agree = fast["verdict"] == slow["verdict"]
    return {"decide": fast, "oracle": slow, "agree": agree}, 0 if agree else 1


def _reduce(job, G, budget) -> tuple[dict, int]:
    H = parse_subgroup(G, job.get("subgroup"), "subgroup")
    p = int(job.get("p", 2))
    if "A" in job:
        A = parse_subgroup(G, job["A"], "A")
    elif isinstance(G, (WreathGroup, WreathProduct)):
        A = G.V
    elif isinstance(G, GenericWreath):
        A = G.K
    else:
        raise ParseError("'A' is required for this ambient")
    R = prop3_reduce(G, A, H, p, budget)
    d = prn_definition(R.H_star, R.K_star, budget)
    report = {
        "orders": {"T": R.T.order, "Y": R.Y.order, "Z": R.Z.order,
                   "H_star": R.H_star.order, "K_star": R.K_star.order, "ambient": G.order},
        "strict": R.strict,
        "assumptions": [r.to_json() for r in R.reasons],
        "reduced": decision_json(d, G),
        "verdict": d.verdict.value,
    }
    return report, d.exit_code


def _enumerate(job, G, budget) -> tuple[dict, int]:
    if "subgroup" in job:
        S = parse_subgroup(G, job["subgroup"], "subgroup")
    else:
        S = sylow_p(G, 2)
    overs = overgroups_of(S, G, budget)
    rows = []
    for H in overs:
        row = {"order": H.order, "index": G.order // H.order, "odd_index": has_odd_index(G, H),
               "generators": [element_json(G, g) for g in H.gens]}
        if isinstance(G, (WreathGroup, WreathProduct)):
            row["top_orders"] = [t["top_order"] for t in _top_diagnostics(G, H)]
        rows.append(row)
    return {"base_order": S.order, "count": len(overs), "subgroups": rows}, 0


def _classify(job, G, budget) -> tuple[dict, int]:
    factors = _pairs(job.get("factors", []), ("n", "q"))
    if not factors:
        raise ParseError("'factors' must list (n, q) pairs")
    ok = theorem1_predicate(factors)
    detail = [{"n": n, "q": q, "q_mod_8": q % 8, "special_form": special_form(n)} for n, q in factors]
    return {"predicate": ok, "factors": detail}, 0 if ok else 1


def _example1(job, G, budget) -> tuple[dict, int]:
    from .matgrp import example1_pipeline, o2_epimorphism, sp2_3_wr_sym3

    M = sp2_3_wr_sym3()
    epi = o2_epimorphism(M)
    if "subgroup" in job:
        H = parse_subgroup(M, job["subgroup"], "subgroup")
        d = example1_pipeline(H, epi, allow_reducible=bool(job.get("allow_reducible", False)))
        return decision_json(d, M), d.exit_code
    S = sylow_p(M, 2)
    rows, agree = [], True
    for H in overgroups_of(S, M, budget):
        if len(set(M.bar_index(H.indices).tolist())) != M.nfact:
            continue
        d = example1_pipeline(H, epi)
        o = prn_definition(H, M, budget)
        agree &= d.verdict == o.verdict
        rows.append({"order": H.order, "pipeline": d.verdict.value, "oracle": o.verdict.value})
    return {"corpus": rows, "agree": agree}, 0 if agree else 1


HANDLERS = {
    "decide": _decide,
    "oracle": _oracle,
    "reduce": _reduce,
    "enumerate": _enumerate,
    "classify": _classify,
    "crosscheck": _crosscheck,
    "example1": _example1,
}


def dispatch(command: str, job: dict, budget: int = DEFAULT_BUDGET) -> tuple[dict, int]:
    if command not in HANDLERS:
        raise ParseError(f"unknown command {command!r}")
    G = None if command in ("classify", "example1") else build_ambient(job)
    report, code = HANDLERS[command](job, G, budget)
    return {"command": command, "input": job, **report}, code


def _human(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    if "error" in report:
        lines.append(f"error: {report['error']}: {report['message']}")
    for key in ("verdict", "predicate", "agree", "count"):
        if key in report:
            lines.append(f"{key}: {report[key]}")
    for r in report.get("reasons", []):
        where = "" if r["factor"] is None else f" (factor {r['factor']})"
        lines.append(f"  [{r['criterion']}]{where} {r['detail']}")
    if "witness" in report:
        lines.append(f"witness: {json.dumps(report['witness'])}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pronorm", description="Pronormality of odd-index subgroups in wreath products.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("input", nargs="?", help="job JSON file (default: stdin)")
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="largest group order to enumerate")
    ap.add_argument("--json", metavar="PATH", help="write the JSON report to PATH ('-' for stdout)")
    ap.add_argument("--quiet", action="store_true", help="suppress the human-readable summary")
    ap.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-identical output)")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        job = load_job(args.input)
        report, code = dispatch(args.command, job, args.budget)
    except (GroupError, ValueError) as exc:
        report = {"command": args.command, "error": type(exc).__name__, "message": str(exc)}
        code = 2
    if args.timings:
        report["timings"] = {"total_seconds": round(time.perf_counter() - start, 6)}
    text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)
    if args.json == "-":
        print(text)
    elif args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if not args.quiet and args.json != "-":
        print(_human(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
