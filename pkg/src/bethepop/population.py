"""Closure of a tuple under all simple reproductions.

Nodes are keyed by their weight.  On a strongly non-integral orbit the
map from Weyl group elements to weights is injective, so a repeated key
means the same group element was reached by two different words; the
tuples stored there are then compared (path independence).
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    AmbiguousSolution,
    Infertile,
    PathDependence,
    PopulationOverflow,
    UnsupportedType,
)
from .exactmath import Poly
from .reproduce import Family, Problem, expected_degree, is_off_diagonal, reproduce, verify_identity, solve_descendant
from .rootdata import (
    RootSystem,
    apply_word,
    fold_reflection,
    fold_weight,
    is_strongly_nonintegral,
    lambda_infinity,
    orbit,
    weyl_word,
)


@dataclass
class PopNode:
    tuple: tuple[Poly, ...]
    weight: tuple[Fraction, ...]
    word: tuple[int, ...]

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(y.degree for y in self.tuple)


@dataclass
class Population:
    problem: Problem
    base: PopNode
    nodes: dict = field(default_factory=dict)
    edges: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    off_diagonal_failures: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, weight) -> PopNode:
        return self.nodes[tuple(weight)]

    def step(self, weight, i: int) -> tuple:
        """Weight key of the direction-``i`` neighbour."""
        return self.edges[(tuple(weight), i)]

    def walk(self, weight, directions: Sequence[int]) -> tuple:
        key = tuple(weight)
        for i in directions:
            key = self.edges[(key, i)]
        return key

    @property
    def closed(self) -> bool:
        return not self.failures


def default_max_nodes(rs: RootSystem) -> int:
    env = os.environ.get("BETHE_MAX_NODES")
    if env:
        return int(env)
    return 4 * rs.weyl_order if rs.is_finite else 10_000


def check_generic_weight(problem: Problem, weight) -> bool:
    """Orbit hypothesis needed for dedup by weight and unique solves."""
    rs = problem.rs
    if problem.family is Family.TRIG:
        return is_strongly_nonintegral(rs, weight, "shifted")
    if problem.family is Family.EXP:
        return is_strongly_nonintegral(rs, weight, "plain")
    points = orbit(rs, weight, "mult")
    if len(points) != rs.weyl_order:
        return False
    return all(k != 1 for pt in points for k in pt)


def generate(problem: Problem, start: Sequence[Poly], weight, max_nodes: int | None = None, check_weight: bool = True) -> Population:
    """Breadth-first closure; raises on overflow or path dependence.

    Reproduction failures do not raise; they are collected in
    ``Population.failures`` as ``(weight, direction, message)``.
    """
    rs = problem.rs
    weight = tuple(Fraction(v) for v in weight)
    if check_weight and rs.is_finite and not check_generic_weight(problem, weight):
        raise UnsupportedType("starting weight is not strongly non-integral for this family")
    limit = max_nodes if max_nodes is not None else default_max_nodes(rs)
    base = PopNode(tuple(start), weight, ())
    pop = Population(problem, base, {weight: base})
    queue = deque([weight])
    while queue:
        key = queue.popleft()
        node = pop.nodes[key]
        for i in range(rs.rank):
            if (key, i) in pop.edges:
                continue
            try:
                ys = reproduce(problem, node.tuple, node.weight, i)
            except (Infertile, AmbiguousSolution) as exc:
                pop.failures.append((key, i, f"{type(exc).__name__}: {exc}"))
                continue
            new_weight = problem.reflect(i, node.weight)
            if new_weight in pop.nodes:
                other = pop.nodes[new_weight]
                if other.tuple != ys:
                    raise PathDependence(f"tuples differ at weight {new_weight}")
            else:
                if len(pop.nodes) >= limit:
                    raise PopulationOverflow(f"more than {limit} nodes")
                pop.nodes[new_weight] = PopNode(ys, new_weight, node.word + (i,))
                queue.append(new_weight)
                if not is_off_diagonal(problem, ys):
                    pop.off_diagonal_failures.append(new_weight)
            pop.edges[(key, i)] = new_weight
            pop.edges.setdefault((new_weight, i), key)
    return pop


# ---------------------------------------------------------------------------
# checks on a closed population


def check_relations(pop: Population) -> dict:
    """Braid-type relations ``(s_i s_j)^{m_ij} = 1`` node-wise, by exact tuple equality."""
    rs = pop.problem.rs
    report = {"checked": 0, "violations": []}
    for key in pop.nodes:
        for i in range(rs.rank):
            for j in range(i, rs.rank):
                m = rs.braid_order(i, j)
                if i == j:
                    words = [(i, i), ()]
                else:
                    words = [tuple(i if k % 2 == 0 else j for k in range(m)), tuple(j if k % 2 == 0 else i for k in range(m))]
                try:
                    ends = [pop.walk(key, w) for w in words]
                except KeyError:
                    report["violations"].append({"weight": key, "pair": (i, j), "reason": "missing edge"})
                    continue
                report["checked"] += 1
                if ends[0] != ends[1] or pop.nodes[ends[0]].tuple != pop.nodes[ends[1]].tuple:
                    report["violations"].append({"weight": key, "pair": (i, j), "reason": "relation fails"})
    report["ok"] = not report["violations"]
    return report


def weyl_label(pop: Population) -> dict:
    """Map every node to its Weyl element (canonical key) and decide bijectivity."""
    rs = pop.problem.rs
    labels = {}
    for key, node in pop.nodes.items():
        labels[key] = weyl_word(rs, node.word)
    distinct_elements = {w.key for w in labels.values()}
    bijective = rs.is_finite and len(pop.nodes) == rs.weyl_order and len(distinct_elements) == len(pop.nodes)
    return {"labels": labels, "bijective": bijective, "size": len(pop.nodes)}


def check_edge_involution(pop: Population) -> bool:
    return all(pop.edges.get((dst, i)) == src for (src, i), dst in pop.edges.items())


def check_weight_consistency(pop: Population) -> bool:
    """Each node's weight equals its word applied to the base weight, recomputed."""
    action = pop.problem.action
    return all(apply_word(pop.problem.rs, node.word, pop.base.weight, action) == key for key, node in pop.nodes.items())


def check_degree_law(pop: Population) -> dict:
    bad = []
    count = 0
    for (src, i), dst in pop.edges.items():
        count += 1
        want = expected_degree(pop.problem, pop.nodes[src].tuple, i)
        if pop.nodes[dst].tuple[i].degree != want:
            bad.append((src, i))
    return {"edges": count, "violations": bad, "ok": not bad}


def check_lambda_infinity(pop: Population) -> bool:
    """Degrees of each node match the Weyl-transported weight at infinity.

    The transport is the plain action of the node's word.  The difference
    family counts ``(Lambda_s, alpha_i)`` zeros in its T-polynomials, so its
    bookkeeping uses the form-weighted highest weights.
    """
    problem = pop.problem
    rs = problem.rs
    lambdas = problem.lambdas
    if problem.family is Family.XXX:
        lambdas = [tuple(rs.pairing(lam, i) for i in range(rs.rank)) for lam in lambdas]
    base_inf = lambda_infinity(rs, lambdas, pop.base.degrees)
    for node in pop.nodes.values():
        want = apply_word(rs, node.word, base_inf, "plain")
        if lambda_infinity(rs, lambdas, node.degrees) != want:
            return False
    return True


def check_identities(pop: Population) -> bool:
    """Re-solve every edge and re-verify the defining Wronskian identity."""
    for (src, i), dst in pop.edges.items():
        node = pop.nodes[src]
        yt = solve_descendant(pop.problem, node.tuple, node.weight, i)
        if not verify_identity(pop.problem, node.tuple, node.weight, i, yt):
            return False
        if pop.nodes[dst].tuple[i] != yt.monic():
            return False
    return True


def fold_check(source: Population, target: Population) -> dict:
    """Every folded source node occurs (tuple and weight) in the target population."""
    rs = source.problem.rs
    missing = []
    for key, node in source.nodes.items():
        wkey = fold_weight(rs, key)
        tnode = target.nodes.get(wkey)
        if tnode is None or tnode.tuple != fold_weight(rs, node.tuple):
            missing.append(key)
    # fold also intertwines the edges with products of commuting target reflections
    edge_bad = []
    for (src, i), dst in source.edges.items():
        try:
            img = target.walk(fold_weight(rs, src), fold_reflection(rs, i))
        except KeyError:
            edge_bad.append((src, i))
            continue
        if img != fold_weight(rs, dst):
            edge_bad.append((src, i))
    return {
        "source_nodes": len(source.nodes),
        "target_nodes": len(target.nodes),
        "missing": missing,
        "edge_mismatches": edge_bad,
        "ok": not missing and not edge_bad,
    }


def fold_problem(problem: Problem) -> Problem:
    rs = problem.rs
    from .rootdata import fold_target

    return Problem(
        fold_target(rs),
        tuple(fold_weight(rs, lam) for lam in problem.lambdas),
        problem.zs,
        problem.family,
        problem.h,
    )


def summary(pop: Population) -> dict:
    return {
        "nodes": len(pop.nodes),
        "failures": len(pop.failures),
        "off_diagonal_failures": len(pop.off_diagonal_failures),
        "edges": len(pop.edges),
    }

