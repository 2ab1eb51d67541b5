import cmath
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bethepop.bethe import (
    BetheConfig,
    count_check,
    master_log_value,
    rationalize,
    reproduction_weight,
    residual,
    residual_exp,
    residual_trig,
    residual_xxx,
    roots_to_tuple,
    solve_newton,
    weight_multiplicity_sl2,
)
from bethepop.errors import RationalizationRejected, SingularConfiguration
from bethepop.exactmath import Poly
from bethepop.population import generate
from bethepop.reproduce import Family, trivial_tuple

from conftest import first_fundamental, generic_weight, problem

X = Poly.x()
LAM = (F(5, 3),)
cfg = BetheConfig.of


def _sorted_roots(configs):
    return sorted((sorted(c.colors[0], key=lambda z: (z.real, z.imag)) for c in configs), key=lambda r: (r[0].real, r[0].imag))


def test_residual_trig_examples(seed_problem):
    assert abs(residual_trig(cfg([[5 / 8]]), seed_problem, LAM)[0]) <= 1e-12
    assert residual_trig(cfg([[]]), seed_problem, LAM).size == 0
    with pytest.raises(SingularConfiguration):
        residual_trig(cfg([[1.0]]), seed_problem, LAM)
    with pytest.raises(SingularConfiguration):
        residual_trig(cfg([[0.0]]), seed_problem, LAM)


def test_residual_exp_examples():
    p = problem("A1", [(2,)], [0], Family.EXP)
    m = F(3, 7)
    # -(lam, a) - (Lambda, a)/(t - z) = 0 gives t = z - (Lambda, a)/(lam, a)
    t = 0 - 2 / float(m)
    assert abs(residual_exp(cfg([[t]]), p, (m,))[0]) <= 1e-12
    assert residual_exp(cfg([[]]), p, (m,)).size == 0
    with pytest.raises(SingularConfiguration):
        residual_exp(cfg([[0.5, 0.5]]), problem("A1", [(2,)], [1], Family.EXP), (m,))


def test_residual_xxx_examples():
    p = problem("A1", [(1,)], [0], Family.XXX, 1)
    for kappa in (F(3), F(1, 2), F(-2, 5)):
        t = (kappa + 1) / (2 * (kappa - 1))
        assert abs(residual_xxx(cfg([[float(t)]]), p, (kappa,))[0]) <= 1e-12
    assert residual_xxx(cfg([[]]), p, (F(3),)).size == 0
    # kappa chosen as the product at a sampled t
    t = 0.37 + 0.2j
    kappa = (t + 0.5) / (t - 0.5)
    assert abs(residual_xxx(cfg([[t]]), p, (kappa,))[0]) <= 1e-12


def test_master_log_value_examples(seed_problem):
    assert master_log_value(cfg([[]]), seed_problem, LAM) == 0
    t = 0.3 + 0.4j
    direct = -float(LAM[0]) * cmath.log(t) - cmath.log(t - 1)
    assert abs(master_log_value(cfg([[t]]), seed_problem, LAM) - direct) <= 1e-12
    p = problem("A1", [(2,), (1,)], [1, 2])
    a, b = 0.3 + 0.1j, -0.7 + 0.5j
    va = master_log_value(cfg([[a, b]]), p, LAM)
    vb = master_log_value(cfg([[b, a]]), p, LAM)
    assert abs(cmath.exp(va) - cmath.exp(vb)) <= 1e-9 * abs(cmath.exp(va))


coords = st.complex_numbers(min_magnitude=0.2, max_magnitude=3.0, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(coords, min_size=1, max_size=2), st.lists(coords, min_size=0, max_size=2), st.sampled_from([Family.TRIG, Family.EXP]))
def test_residual_is_gradient_of_master_function(c1, c2, family):
    prob = problem("A2", [(1, 0), (0, 2)], [1, 2], family)
    config = cfg([c1, c2])
    flat = config.flat()
    for a in flat:
        for b in flat + [0j, 1 + 0j, 2 + 0j]:
            if a is not b and abs(a - b) < 0.05:
                return
    weight = generic_weight(2)
    res = residual(config, prob, weight)
    eps = 1e-6
    for p, (i, j) in enumerate(config.index()):
        plus = [list(c) for c in config.colors]
        minus = [list(c) for c in config.colors]
        plus[i][j] += eps
        minus[i][j] -= eps
        fd = (master_log_value(cfg(plus), prob, weight) - master_log_value(cfg(minus), prob, weight)) / (2 * eps)
        assert abs(fd - res[p]) <= 1e-6 * max(1.0, abs(res[p]))


def test_weight_multiplicity_examples():
    assert weight_multiplicity_sl2([1, 1], 1) == 2
    assert weight_multiplicity_sl2([2, 2], 2) == 3
    assert weight_multiplicity_sl2([1, 2, 3], 0) == 1
    assert weight_multiplicity_sl2([1, 1], 3) == 0


def test_solve_newton_examples(seed_problem):
    assert solve_newton(seed_problem, LAM, (0,)) == [BetheConfig(((),))]
    sols = solve_newton(seed_problem, LAM, (1,))
    assert len(sols) == 1 and abs(sols[0].colors[0][0] - 5 / 8) <= 1e-10


def test_solve_newton_matches_quadratic_oracle():
    # -lam/t - 1/(t-1) - 1/(t-2) = 0 clears to (lam+2) t^2 - 3(lam+1) t + 2 lam = 0
    lam = 3 / 7
    prob = problem("A1", [(1,), (1,)], [1, 2])
    a, b, c = lam + 2, -3 * (lam + 1), 2 * lam
    disc = cmath.sqrt(b * b - 4 * a * c)
    oracle = sorted([(-b + disc) / (2 * a), (-b - disc) / (2 * a)], key=lambda z: z.real)
    sols = solve_newton(prob, (F(3, 7),), (1,))
    got = sorted((s.colors[0][0] for s in sols), key=lambda z: z.real)
    assert len(got) == 2
    assert all(abs(x - y) <= 1e-9 for x, y in zip(got, oracle))


def test_solve_newton_is_deterministic():
    prob = problem("A1", [(1,), (1,)], [1, 2])
    first = solve_newton(prob, (F(3, 7),), (1,), attempts=30, seed=5)
    again = solve_newton(prob, (F(3, 7),), (1,), attempts=30, seed=5)
    assert first == again


def test_solutions_invariant_under_point_permutation():
    a = problem("A1", [(2,), (1,)], [1, 3])
    b = problem("A1", [(1,), (2,)], [3, 1])
    ra = _sorted_roots(solve_newton(a, (F(3, 7),), (2,), attempts=100))
    rb = _sorted_roots(solve_newton(b, (F(3, 7),), (2,), attempts=100))
    assert len(ra) == len(rb) == 2
    for x, y in zip(ra, rb):
        assert np.allclose(x, y, atol=1e-8)


def test_count_check_examples():
    trig = problem("A1", [(1,), (1,)], [1, 2])
    report = count_check(trig, (F(3, 7),), 1)
    assert report["solutions"] == report["multiplicity"] == 2 and report["equal"]
    exp = problem("A1", [(2,), (2,)], [F(1, 7), F(2, 7)], Family.EXP)
    report = count_check(exp, (F(3, 7),), 2)
    assert report["solutions"] == report["multiplicity"] == 3
    over = count_check(trig, (F(3, 7),), 3)
    assert over["solutions"] == over["multiplicity"] == 0 and over["within_bound"]


def test_roots_to_tuple_and_rationalize(seed_problem):
    floats = roots_to_tuple(cfg([[5 / 8]]))
    assert rationalize(floats, seed_problem, LAM) == (X - F(5, 8),)
    assert [list(c) for c in roots_to_tuple(cfg([[], []]))] == [[1.0], [1.0]]
    with pytest.raises(RationalizationRejected):
        rationalize(roots_to_tuple(cfg([[5 / 8 + 1e-5]])), seed_problem, LAM)
    with pytest.raises(RationalizationRejected):
        rationalize(roots_to_tuple(cfg([[0.5]])), seed_problem, LAM)


def test_rationalize_difference_family():
    p = problem("A1", [(1,)], [0], Family.XXX, 1)
    ys = rationalize(roots_to_tuple(cfg([[1.0]])), p, (F(3),))
    assert ys == (X - 1,)
    assert reproduction_weight(p, (F(3),)) == (F(1, 3),)


@pytest.mark.parametrize("name,family,h,weight", [
    ("A2", Family.TRIG, None, generic_weight(2)),
    ("B2", Family.EXP, None, generic_weight(2)),
    ("A2", Family.XXX, F(1), (F(2), F(3))),
])
def test_residual_vanishes_on_population_roots(name, family, h, weight):
    mpmath = pytest.importorskip("mpmath")
    prob = first_fundamental(name, family, h)
    pop = generate(prob, trivial_tuple(prob), weight)
    checked = 0
    for node in pop.nodes.values():
        colors = []
        for y in node.tuple:
            if y.degree < 1:
                colors.append([])
                continue
            roots = mpmath.polyroots([mpmath.mpf(c.numerator) / c.denominator for c in reversed(y.coeffs)], maxsteps=200, extraprec=200)
            colors.append([complex(r) for r in roots])
        config = cfg(colors)
        if not config.flat():
            continue
        bae_weight = reproduction_weight(prob, node.weight)
        assert np.max(np.abs(residual(config, prob, bae_weight))) <= 1e-9
        checked += 1
    assert checked > 0
