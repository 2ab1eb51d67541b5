from fractions import Fraction as F

import pytest

from bethepop.errors import UnsupportedType
from bethepop.exactmath import Poly, QPoly, proportional_q
from bethepop.fundop import (
    KernelBasis,
    alpha_coordinates,
    exp_kernel_checks,
    full_wronskian_check,
    kernel_basis,
    kernel_shape_check,
    same_middle_check,
    verify_reconstruction,
    xxx_frame_check,
)
from bethepop.population import generate
from bethepop.reproduce import Family, build_T, trivial_tuple
from bethepop.rootdata import parse_type, reflect_shifted

from conftest import first_fundamental, generic_weight, problem

X = Poly.x()
ONE = Poly.const(1)
LAM = F(5, 3)


def _trivial_pop(name, family=Family.TRIG, h=None, lambdas=None):
    prob = first_fundamental(name, family, h) if lambdas is None else problem(name, lambdas, [1], family, h)
    rank = prob.rs.rank
    weight = tuple(F(k + 2) for k in range(rank)) if family is Family.XXX else generic_weight(rank)
    return generate(prob, trivial_tuple(prob), weight)


def _rebased(pop):
    """Same population regenerated from the node whose tuple has the largest degree."""
    node = max(pop.nodes.values(), key=lambda n: (sum(n.degrees), min(n.degrees), n.word))
    return generate(pop.problem, node.tuple, node.weight)


@pytest.fixture
def seed_pop(seed_problem):
    return generate(seed_problem, (X - F(5, 8),), (LAM,))


def test_alpha_coordinates():
    a1, a2 = parse_type("A1"), parse_type("A2")
    lam = (F(1, 3), F(2, 7))
    assert alpha_coordinates(a2, lam, lam) == (0, 0)
    assert alpha_coordinates(a1, (LAM,), (-LAM - 2,)) == (LAM + 1,)
    for i in range(2):
        coords = alpha_coordinates(a2, lam, reflect_shifted(a2, i, lam))
        assert coords[i] == lam[i] + 1 and coords[1 - i] == 0


def test_sl2_kernel_basis(seed_pop):
    kb = kernel_basis(seed_pop)
    assert kb.us[0] == QPoly.of(X - F(5, 8))
    assert kb.us[1] == QPoly.of(ONE, LAM + 1)
    assert kb.exponents == [0, LAM + 1]
    assert verify_reconstruction(kb, seed_pop)["ok"]
    shape = kernel_shape_check(kb, seed_pop)
    assert shape["ok"]
    # deg y + deg yt = sum Lambda_s
    assert kb.us[0].part.degree + kb.us[1].part.degree == 1
    full = full_wronskian_check(kb, seed_pop)
    assert full["ok"] and full["exponent"] == LAM


def test_full_wronskian_without_points():
    pop = generate(problem("A1", [], []), (ONE,), (LAM,))
    kb = kernel_basis(pop)
    assert full_wronskian_check(kb, pop)["exponent"] == LAM
    assert full_wronskian_check(kb, pop)["ok"]


@pytest.mark.parametrize("name", ["A2", "A3"])
def test_trig_kernel_checks(name):
    pop = _trivial_pop(name)
    kb = kernel_basis(pop)
    assert kb.us[0] == QPoly.of(ONE)
    for check in (verify_reconstruction, kernel_shape_check, full_wronskian_check):
        assert check(kb, pop)["ok"]
    assert same_middle_check(pop)["ok"]


def test_a2_full_wronskian_powers():
    pop = _trivial_pop("A2")
    kb = kernel_basis(pop)
    m = pop.base.weight
    target = QPoly.of(build_T(pop.problem, 0), m[0]) ** 2 * QPoly.of(build_T(pop.problem, 1), m[1])
    from bethepop.exactmath import qwronskian

    assert proportional_q(qwronskian(kb.us), target)


def test_trig_checks_from_nontrivial_base():
    pop = _rebased(_trivial_pop("A3", lambdas=[(1, 1, 0)]))
    assert any(y.degree > 0 for y in pop.base.tuple)
    kb = kernel_basis(pop)
    assert verify_reconstruction(kb, pop)["ok"]
    assert kernel_shape_check(kb, pop)["ok"]
    assert full_wronskian_check(kb, pop)["ok"]
    assert same_middle_check(pop)["ok"]


def test_corrupted_basis_is_reported():
    pop = _trivial_pop("A2")
    kb = kernel_basis(pop)
    bad = KernelBasis(kb.family, [kb.us[0], kb.us[1] * (X - 11), kb.us[2]])
    report = verify_reconstruction(bad, pop)
    assert not report["ok"] and report["mismatches"]


def test_same_middle_detects_corruption():
    pop = _trivial_pop("A2")
    key = pop.step(pop.base.weight, 0)
    node = pop.nodes[key]
    node.tuple = (node.tuple[0] * (X - 13),) + node.tuple[1:]
    assert not same_middle_check(pop)["ok"]


def test_exp_kernel_checks():
    for pop in (_trivial_pop("A2", Family.EXP), _rebased(_trivial_pop("A2", Family.EXP, lambdas=[(1, 1)]))):
        report = exp_kernel_checks(pop)
        assert report["reconstruction"]["ok"] and report["shape"]["ok"]


def test_xxx_frame_checks_and_argument_shift():
    pop = _trivial_pop("A2", Family.XXX, F(1))
    report = xxx_frame_check(pop)
    assert report["reconstruction"]["ok"] and report["shape"]["ok"]
    rebased = _rebased(_trivial_pop("A2", Family.XXX, F(1), lambdas=[(1, 1)]))
    report = xxx_frame_check(rebased)
    assert report["reconstruction"]["ok"] and report["shape"]["ok"]
    # y_2 is recovered only at the argument shifted by h/2
    assert report["reconstruction"]["shift_needed"] == [2]


def test_kernel_needs_type_a():
    with pytest.raises(UnsupportedType):
        kernel_basis(_trivial_pop("B2"))
    with pytest.raises(UnsupportedType):
        exp_kernel_checks(_trivial_pop("A2"))
