"""Command-line driver.

Every subcommand reads one problem description (a JSON file, command-line
flags, or both; flags win) and writes a JSON report.  Rationals travel as
``"p/q"`` strings so that exact paths never see a float.

Problem schema::

    {"type": "A2",
     "family": "trig" | "exp" | {"XXX": {"h": "1/1"}},
     "Lambda": [["1/1", "0/1"], ...],
     "z": ["1/1", ...],
     "tuple": [["-5/8", "1/1"], ...],        # optional, coefficients low to high
     "lambda": ["1/3", "2/7"] | "kappa": [...], # optional starting weight
     "l": [1, 0]}                              # optional, for solve

A population dump written by ``populate`` carries the problem under
``"problem"`` plus ``"nodes"`` and ``"edges"``; ``verify`` and
``kernel-check`` accept it in place of a problem.

Exit codes: 0 when every check passes, 1 on a failed check, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import bethe, fundop, gaudin_sl2, population
from .errors import BethePopError, InvalidProblem, InvalidType, PopulationOverflow, UnsupportedType
from .exactmath import Q, poly_from_json, poly_to_json, rational_str
from .reproduce import Family, Problem, reproduce, trivial_tuple, verify_critical_point
from .rootdata import fold_target, fold_tuple, fold_weight, parse_type

SUBCOMMANDS = ("populate", "verify", "solve", "kernel-check", "gaudin-check", "dwg-check", "fold-check")


class InputError(Exception):
    """Malformed or inconsistent input; maps to exit code 2."""


# ---------------------------------------------------------------------------
# JSON <-> library objects


def _rationals(values, what: str) -> tuple[Fraction, ...]:
    if not isinstance(values, (list, tuple)):
        raise InputError(f"{what} must be a list of rationals")
    try:
        return tuple(Q(v) for v in values)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{what}: {exc}") from None


def _rational_list_arg(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _weight_json(weight) -> list[str]:
    return [rational_str(Fraction(v)) for v in weight]


def _family_from_json(value) -> tuple[Family, Fraction | None]:
    if isinstance(value, str):
        try:
            return Family(value.lower()), None
        except ValueError:
            raise InputError(f"unknown family {value!r}") from None
    if isinstance(value, dict) and len(value) == 1:
        (name, body), = value.items()
        if name.lower() == "xxx" and isinstance(body, dict) and "h" in body:
            return Family.XXX, _rationals([body["h"]], "h")[0]
    raise InputError(f"cannot read family {value!r}")


def _family_json(problem: Problem):
    if problem.family is Family.XXX:
        return {"XXX": {"h": rational_str(problem.h)}}
    return problem.family.value


def problem_json(problem: Problem) -> dict:
    return {
        "type": problem.rs.name,
        "family": _family_json(problem),
        "Lambda": [_weight_json(lam) for lam in problem.lambdas],
        "z": _weight_json(problem.zs),
    }


def _merge_flags(data: dict, args) -> dict:
    data = dict(data)
    if getattr(args, "type", None):
        data["type"] = args.type
    if getattr(args, "family", None):
        fam = args.family.lower()
        if fam == "xxx":
            h = args.h if args.h is not None else _xxx_h(data)
            data["family"] = {"XXX": {"h": h}}
        else:
            data["family"] = fam
    elif getattr(args, "h", None) is not None:
        data["family"] = {"XXX": {"h": args.h}}
    if getattr(args, "Lambda", None):
        data["Lambda"] = [_rational_list_arg(text) for text in args.Lambda]
    if getattr(args, "z", None):
        data["z"] = _rational_list_arg(args.z)
    if getattr(args, "weight", None):
        data.pop("lambda", None)
        data.pop("kappa", None)
        data["weight"] = _rational_list_arg(args.weight)
    if getattr(args, "l", None):
        data["l"] = [int(v) for v in _rational_list_arg(args.l)]
    return data


def _xxx_h(data: dict) -> str:
    fam = data.get("family")
    if isinstance(fam, dict):
        for body in fam.values():
            if isinstance(body, dict) and "h" in body:
                return body["h"]
    return "1/1"


def parse_problem(data: dict) -> Problem:
    for key in ("type", "Lambda", "z"):
        if key not in data:
            raise InputError(f"missing key {key!r}")
    family, h = _family_from_json(data.get("family", "trig"))
    try:
        rs = parse_type(str(data["type"]))
        lambdas = [_rationals(lam, "Lambda") for lam in data["Lambda"]]
        return Problem(rs, tuple(lambdas), _rationals(data["z"], "z"), family, h)
    except (InvalidProblem, InvalidType) as exc:
        raise InputError(str(exc)) from None


def parse_weight(data: dict, problem: Problem, required: bool = True):
    for key in ("weight", "lambda", "kappa"):
        if key in data:
            weight = _rationals(data[key], key)
            if len(weight) != problem.rs.rank:
                raise InputError(f"{key} needs {problem.rs.rank} coordinates")
            if problem.family is Family.XXX and any(k == 0 for k in weight):
                raise InputError("kappa coordinates must be nonzero")
            return weight
    if required:
        raise InputError("no starting weight given (lambda, kappa or --weight)")
    return None


def parse_tuple(data: dict, problem: Problem):
    if "tuple" not in data:
        return trivial_tuple(problem)
    ys = data["tuple"]
    if not isinstance(ys, list) or len(ys) != problem.rs.rank:
        raise InputError(f"tuple needs {problem.rs.rank} polynomials")
    try:
        return tuple(poly_from_json(y) for y in ys)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"tuple: {exc}") from None


def population_json(pop: population.Population) -> dict:
    nodes = sorted(pop.nodes.values(), key=lambda n: (len(n.word), n.word))
    edges = sorted(pop.edges.items(), key=lambda item: (pop.nodes[item[0][0]].word, item[0][1]))
    return {
        "problem": problem_json(pop.problem),
        "base": _weight_json(pop.base.weight),
        "nodes": [
            {"weight": _weight_json(n.weight), "word": list(n.word), "tuple": [poly_to_json(y) for y in n.tuple]}
            for n in nodes
        ],
        "edges": [{"from": _weight_json(src), "direction": i, "to": _weight_json(dst)} for (src, i), dst in edges],
        "failures": [{"weight": _weight_json(w), "direction": i, "message": msg} for w, i, msg in pop.failures],
    }


def population_from_json(data: dict) -> population.Population:
    problem = parse_problem(data["problem"])
    base_key = _rationals(data["base"], "base")
    nodes = {}
    for entry in data["nodes"]:
        key = _rationals(entry["weight"], "weight")
        ys = tuple(poly_from_json(y) for y in entry["tuple"])
        nodes[key] = population.PopNode(ys, key, tuple(int(i) for i in entry["word"]))
    if base_key not in nodes:
        raise InputError("base weight is not among the nodes")
    edges = {}
    for entry in data.get("edges", []):
        edges[(_rationals(entry["from"], "from"), int(entry["direction"]))] = _rationals(entry["to"], "to")
    pop = population.Population(problem, nodes[base_key], nodes, edges)
    pop.failures = [(_rationals(f["weight"], "weight"), int(f["direction"]), f["message"]) for f in data.get("failures", [])]
    return pop


def _complex_json(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _config_json(config: bethe.BetheConfig) -> list:
    return [[_complex_json(t) for t in color] for color in config.colors]


def _plain(obj):
    """Make library reports JSON-ready (Fractions as strings, tuples as lists)."""
    if isinstance(obj, dict):
        return {str(_plain(k)) if not isinstance(k, str) else k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return _complex_json(obj)
    if isinstance(obj, bethe.BetheConfig):
        return _config_json(obj)
    return obj


# ---------------------------------------------------------------------------
# subcommands; each returns (report, ok)


def _generate(problem: Problem, ys, weight, args) -> population.Population:
    try:
        return population.generate(problem, ys, weight, max_nodes=args.max_nodes)
    except UnsupportedType as exc:
        raise InputError(str(exc)) from None


def _population_checks(pop: population.Population) -> dict:
    rs = pop.problem.rs
    labels = population.weyl_label(pop)
    checks = {
        "closed": pop.closed,
        "size_equals_weyl_order": rs.is_finite and len(pop.nodes) == rs.weyl_order,
        "bijective": labels["bijective"],
        "relations": population.check_relations(pop)["ok"],
        "edge_involution": population.check_edge_involution(pop),
        "weight_consistency": population.check_weight_consistency(pop),
        "degree_law": population.check_degree_law(pop)["ok"],
        "lambda_infinity": population.check_lambda_infinity(pop),
        "off_diagonal": not pop.off_diagonal_failures,
    }
    return checks


def cmd_populate(data: dict, args) -> tuple[dict, bool]:
    problem = parse_problem(data)
    weight = parse_weight(data, problem)
    ys = parse_tuple(data, problem)
    try:
        pop = _generate(problem, ys, weight, args)
    except PopulationOverflow as exc:
        return {"error": f"overflow: {exc}"}, False
    report = population_json(pop)
    checks = _population_checks(pop)
    report["checks"] = checks
    report["summary"] = population.summary(pop)
    return report, all(checks.values())


def _verify_population(pop: population.Population) -> tuple[dict, bool]:
    problem = pop.problem
    node_rows = []
    for node in sorted(pop.nodes.values(), key=lambda n: (len(n.word), n.word)):
        try:
            ok = verify_critical_point(problem, node.tuple, node.weight)
        except BethePopError:
            ok = False
        node_rows.append({"weight": _weight_json(node.weight), "word": list(node.word), "critical": ok})
    edge_rows = []
    for (src, i), dst in sorted(pop.edges.items(), key=lambda item: (pop.nodes[item[0][0]].word, item[0][1])):
        node = pop.nodes[src]
        try:
            ok = reproduce(problem, node.tuple, node.weight, i) == pop.nodes[dst].tuple
            ok = ok and problem.reflect(i, node.weight) == dst
        except (BethePopError, KeyError):
            ok = False
        edge_rows.append({"from": _weight_json(src), "direction": i, "ok": ok})
    ok = all(r["critical"] for r in node_rows) and all(r["ok"] for r in edge_rows)
    return {"nodes": node_rows, "edges": edge_rows, "ok": ok}, ok


def cmd_verify(data: dict, args) -> tuple[dict, bool]:
    if "nodes" in data:
        return _verify_population(population_from_json(data))
    problem = parse_problem(data)
    weight = parse_weight(data, problem)
    if "tuple" not in data:
        raise InputError("verify needs a tuple or a population dump")
    ys = parse_tuple(data, problem)
    ok = verify_critical_point(problem, ys, weight)
    return {"problem": problem_json(problem), "weight": _weight_json(weight), "critical": ok}, ok


def cmd_solve(data: dict, args) -> tuple[dict, bool]:
    problem = parse_problem(data)
    weight = parse_weight(data, problem)
    if "l" not in data:
        raise InputError("solve needs the color counts l")
    l = tuple(int(v) for v in data["l"])
    if len(l) != problem.rs.rank or any(v < 0 for v in l):
        raise InputError(f"l needs {problem.rs.rank} nonnegative entries")
    sols = bethe.solve_newton(problem, weight, l, attempts=args.attempts, tol=args.tol, seed=args.seed)
    report = {
        "problem": problem_json(problem),
        "weight": _weight_json(weight),
        "l": list(l),
        "solutions": [_config_json(s) for s in sols],
        "max_residual": max((float(np.max(np.abs(bethe.residual(s, problem, weight)), initial=0.0)) for s in sols), default=0.0),
    }
    ok = True
    if problem.rs.rank == 1:
        bound = bethe.weight_multiplicity_sl2([int(lam[0]) for lam in problem.lambdas], l[0])
        report["count_check"] = {"solutions": len(sols), "multiplicity": bound, "equal": len(sols) == bound, "within_bound": len(sols) <= bound}
        ok = len(sols) == bound
    return report, ok


def _kernel_reports(pop: population.Population) -> dict:
    family = pop.problem.family
    if family is Family.TRIG:
        kb = fundop.kernel_basis(pop)
        return {
            "reconstruction": fundop.verify_reconstruction(kb, pop),
            "shape": fundop.kernel_shape_check(kb, pop),
            "full_wronskian": fundop.full_wronskian_check(kb, pop),
            "same_middle": fundop.same_middle_check(pop),
        }
    if family is Family.EXP:
        return fundop.exp_kernel_checks(pop)
    return fundop.xxx_frame_check(pop)


def cmd_kernel_check(data: dict, args) -> tuple[dict, bool]:
    if "nodes" in data:
        pop = population_from_json(data)
    else:
        problem = parse_problem(data)
        pop = _generate(problem, parse_tuple(data, problem), parse_weight(data, problem), args)
    if pop.problem.rs.family != "A":
        raise InputError(f"kernel checks need type A, not {pop.problem.rs.name}")
    try:
        reports = _kernel_reports(pop)
    except BethePopError as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}, False
    ok = all(r["ok"] for r in reports.values())
    return {"problem": problem_json(pop.problem), "checks": reports, "ok": ok}, ok


def _sl2_trig(problem: Problem) -> None:
    if problem.rs.rank != 1 or problem.family is not Family.TRIG:
        raise InputError("Gaudin checks need an sl2 problem in the trig family")


def cmd_gaudin_check(data: dict, args) -> tuple[dict, bool]:
    problem = parse_problem(data)
    _sl2_trig(problem)
    weight = parse_weight(data, problem)
    ls = [int(v) for v in data.get("l", [])] or list(range(1, sum(int(lam[0]) for lam in problem.lambdas) + 1))
    lam = float(weight[0])
    comm = gaudin_sl2.commutator_norms(gaudin_sl2.build_gaudin(problem, lam + 1))
    rows = []
    for l in ls:
        for cfg in bethe.solve_newton(problem, weight, (l,), attempts=args.attempts, tol=args.tol, seed=args.seed):
            res = gaudin_sl2.verify_bethe_eigen(problem, lam, cfg)
            rows.append({"l": l, "t": _config_json(cfg)[0], "max_residual": res["max_residual"]})
    worst = max((r["max_residual"] for r in rows), default=0.0)
    ok = bool(rows) and worst <= 1e-8 and comm <= 1e-12
    return {"problem": problem_json(problem), "weight": _weight_json(weight), "commutator": comm, "vectors": rows, "max_residual": worst, "ok": ok}, ok


def cmd_dwg_check(data: dict, args) -> tuple[dict, bool]:
    problem = parse_problem(data)
    _sl2_trig(problem)
    V = gaudin_sl2.tensor_of(problem)
    ls = [int(v) for v in data.get("l", [])] or [1]
    report = {"problem": problem_json(problem), "lam": args.lam, "rows": []}
    ok = True
    for lam in args.lam:
        weight_ok = gaudin_sl2.weight_map_ok(V, gaudin_sl2.dwg_shifted(V, lam))
        comm = gaudin_sl2.dwg_commutation_check(problem, lam)
        square = gaudin_sl2.square_scalar_check(V, lam)
        row = {"lam": lam, "weight_map": weight_ok, "commutation": comm["max_relative_residual"], "square_scalar": square["ok"], "conjecture": []}
        for l in ls:
            conj = gaudin_sl2.conjecture_check(problem, lam, l, attempts=args.attempts, tol=args.tol, seed=args.seed)
            row["conjecture"].append({"l": l, "solutions": conj["solutions"], "max_sine": conj["max_sine"]})
            ok = ok and conj["solutions"] > 0 and conj["max_sine"] <= 1e-6
        ok = ok and weight_ok and comm["ok"] and square["ok"]
        report["rows"].append(row)
    limit = gaudin_sl2.limit_check(V, args.limit_lam)
    report["limit"] = limit
    ok = ok and limit["max_sine"] <= 1e-3
    report["ok"] = ok
    return report, ok


def cmd_fold_check(data: dict, args) -> tuple[dict, bool]:
    problem = parse_problem(data)
    rs = problem.rs
    if rs.family not in ("B", "G"):
        raise InputError(f"no folding for {rs.name}")
    weight = parse_weight(data, problem)
    ys = parse_tuple(data, problem)
    source = _generate(problem, ys, weight, args)
    target_problem = population.fold_problem(problem)
    target = _generate(target_problem, fold_tuple(rs, ys), fold_weight(rs, weight), args)
    report = population.fold_check(source, target)
    report["target_type"] = fold_target(rs).name
    return report, report["ok"]


COMMANDS = {
    "populate": cmd_populate,
    "verify": cmd_verify,
    "solve": cmd_solve,
    "kernel-check": cmd_kernel_check,
    "gaudin-check": cmd_gaudin_check,
    "dwg-check": cmd_dwg_check,
    "fold-check": cmd_fold_check,
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bethepop", description="Bethe ansatz populations and their checks")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("problem", nargs="?", help="problem JSON or population dump")
        p.add_argument("--type", help="root system, e.g. A2")
        p.add_argument("--family", choices=["trig", "exp", "xxx"])
        p.add_argument("--h", help="difference step for the xxx family")
        p.add_argument("--Lambda", action="append", help="one highest weight, comma separated; repeat per point")
        p.add_argument("--z", help="points, comma separated")
        p.add_argument("--weight", help="starting weight (lambda or kappa), comma separated")
        p.add_argument("--l", help="color counts, comma separated")
        p.add_argument("--max-nodes", type=int, default=None)
        p.add_argument("--attempts", type=int, default=200)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--lam", type=int, action="append", help="integral lambda for dwg-check (default 10, 20)")
        p.add_argument("--limit-lam", type=int, default=10_000)
        p.add_argument("-o", "--output", help="write the report here instead of stdout")
    return parser


def _load(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise InputError("top-level JSON must be an object")
    return data


def dumps(report: dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if args.lam is None:
        args.lam = [10, 20]
    try:
        data = _merge_flags(_load(args.problem), args)
        report, ok = COMMANDS[args.command](data, args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, TypeError, ValueError) as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    report = dict(report)
    report["command"] = args.command
    report["pass"] = bool(ok)
    text = dumps(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())
