from fractions import Fraction as F

import pytest

from bethepop.errors import PopulationOverflow, UnsupportedType
from bethepop.exactmath import Poly
from bethepop.population import (
    check_degree_law,
    check_edge_involution,
    check_identities,
    check_lambda_infinity,
    check_relations,
    check_weight_consistency,
    default_max_nodes,
    fold_check,
    fold_problem,
    generate,
    summary,
    weyl_label,
)
from bethepop.reproduce import Family, trivial_tuple
from bethepop.rootdata import fold_tuple, fold_weight

from conftest import first_fundamental, generic_weight, problem

X = Poly.x()
ONE = Poly.const(1)


def _pop(type_name, family=Family.TRIG, h=None, weight=None, lambdas=None):
    prob = first_fundamental(type_name, family, h) if lambdas is None else problem(type_name, lambdas, [1], family, h)
    rank = prob.rs.rank
    if weight is None:
        weight = tuple(F(k + 2) for k in range(rank)) if family is Family.XXX else generic_weight(rank)
    return generate(prob, trivial_tuple(prob), weight)


def test_sl2_without_points_has_two_nodes():
    prob = problem("A1", [], [])
    pop = generate(prob, (ONE,), (F(5, 3),))
    assert set(pop.nodes) == {(F(5, 3),), (F(-11, 3),)}
    assert all(node.tuple == (ONE,) for node in pop.nodes.values())
    assert check_relations(pop)["ok"] and weyl_label(pop)["bijective"]


def test_seed_population(seed_problem):
    pop = generate(seed_problem, (X - F(5, 8),), (F(5, 3),))
    assert len(pop) == 2
    assert pop.node((F(-11, 3),)).tuple == (ONE,)
    assert check_edge_involution(pop)


@pytest.mark.parametrize("name,size", [("A2", 6), ("B2", 8), ("A3", 24), ("G2", 12)])
def test_population_size_and_checks(name, size):
    pop = _pop(name)
    assert len(pop) == size and pop.closed and not pop.off_diagonal_failures
    assert len({node.weight for node in pop.nodes.values()}) == size
    assert check_relations(pop)["ok"]
    assert weyl_label(pop)["bijective"]
    assert check_edge_involution(pop)
    assert check_weight_consistency(pop)
    assert check_degree_law(pop)["ok"]
    assert check_lambda_infinity(pop)
    assert check_identities(pop)


def test_a2_with_dominant_lambda_11():
    pop = _pop("A2", lambdas=[(1, 1)])
    assert len(pop) == 6 and check_relations(pop)["ok"]


def test_a2_first_step_closed_form():
    # y = 1, T = x - 1: (m+1) yt + x yt' = T gives yt = x - (m+2)/(m+1)
    pop = _pop("A2")
    m = generic_weight(2)[0]
    key = pop.step(pop.base.weight, 0)
    assert pop.node(key).tuple == (X - (m + 2) / (m + 1), ONE)


@pytest.mark.parametrize("name", ["A2", "B2"])
@pytest.mark.parametrize("family,h", [(Family.EXP, None), (Family.XXX, F(1))])
def test_other_families(name, family, h):
    pop = _pop(name, family, h)
    assert len(pop) == pop.problem.rs.weyl_order and pop.closed
    assert check_relations(pop)["ok"]
    assert check_degree_law(pop)["ok"]
    assert check_lambda_infinity(pop)
    assert check_identities(pop)


def test_overflow_and_budget(monkeypatch):
    prob = first_fundamental("A2")
    with pytest.raises(PopulationOverflow):
        generate(prob, trivial_tuple(prob), generic_weight(2), max_nodes=4)
    monkeypatch.setenv("BETHE_MAX_NODES", "3")
    assert default_max_nodes(prob.rs) == 3
    with pytest.raises(PopulationOverflow):
        generate(prob, trivial_tuple(prob), generic_weight(2))


def test_integral_weight_rejected():
    prob = first_fundamental("A2")
    with pytest.raises(UnsupportedType):
        generate(prob, trivial_tuple(prob), (F(1), F(1, 3)))


def test_summary_counts():
    s = summary(_pop("B2"))
    assert s == {"nodes": 8, "failures": 0, "off_diagonal_failures": 0, "edges": 16}


@pytest.mark.parametrize("name,target_size", [("B2", 24), ("G2", 48), ("B3", 720)])
def test_fold_embeddings(name, target_size):
    source = _pop(name)
    prob = source.problem
    target_problem = fold_problem(prob)
    target = generate(target_problem, fold_tuple(prob.rs, source.base.tuple), fold_weight(prob.rs, source.base.weight))
    report = fold_check(source, target)
    assert report["ok"], report
    assert report["target_nodes"] == target_size


def test_fold_trivial_b2_without_points():
    prob = problem("B2", [], [])
    lam = generic_weight(2)
    source = generate(prob, trivial_tuple(prob), lam)
    target = generate(fold_problem(prob), (ONE,) * 3, fold_weight(prob.rs, lam))
    assert fold_check(source, target)["ok"]


def test_fold_detects_corruption():
    source = _pop("B2")
    prob = source.problem
    target = generate(fold_problem(prob), fold_tuple(prob.rs, source.base.tuple), fold_weight(prob.rs, source.base.weight))
    src = next(k for k in source.nodes if k != source.base.weight)
    node = target.nodes[fold_weight(prob.rs, src)]
    node.tuple = (node.tuple[0] * (X - 99),) + node.tuple[1:]
    assert not fold_check(source, target)["ok"]
