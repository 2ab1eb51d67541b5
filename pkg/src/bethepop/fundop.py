"""Kernel bases of the fundamental operator for type A populations.

The operator ``D(y, lam)`` is never built.  Its kernel is represented by
the basis ``u_1..u_{N+1}`` read off the staircase nodes of a closed
population, and every statement about ``D`` is checked as an exact
Wronskian identity on that basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import MissingNode, NonDivisible, UnsupportedType
from .exactmath import (
    ExpPoly,
    Poly,
    QPoly,
    discrete_wronskian,
    divided_wronskian,
    exp_wronskian,
    proportional,
    proportional_q,
    qwronskian,
    shift,
)
from .population import Population
from .reproduce import Family, build_T, build_T_h, direction_constant
from .rootdata import RootSystem, lambda_infinity, weight_difference_in_roots


@dataclass
class KernelBasis:
    """Kernel functions ``u_i``; ``us[i]`` is a QPoly (trig) or ExpPoly (exp).

    For the difference family ``us[i]`` is the polynomial part and
    ``multipliers[i]`` stands for ``e^{r_i h}``.
    """

    family: Family
    us: list
    multipliers: list = field(default_factory=list)

    @property
    def exponents(self) -> list[Fraction]:
        if self.family is Family.TRIG:
            return [u.exponent for u in self.us]
        if self.family is Family.EXP:
            return [u.rate for u in self.us]
        return list(self.multipliers)


def alpha_coordinates(rs: RootSystem, base, node) -> tuple[Fraction, ...]:
    """The ``a_i`` with ``base - node = sum a_i alpha_i``."""
    return weight_difference_in_roots(rs, base, node)


def _require_type_a(pop: Population, family: Family) -> None:
    rs = pop.problem.rs
    if rs.family != "A":
        raise UnsupportedType(f"kernel theory is implemented for type A only, not {rs.name}")
    if pop.problem.family is not family:
        raise UnsupportedType(f"expected a {family.value} population")


def staircase(pop: Population, i: int) -> tuple:
    """Weight key of the node reached from the base in directions ``i-1, ..., 1``.

    ``i`` counts from 1 as in ``u_i``; directions are 1-based in the name
    and 0-based in the walk.
    """
    try:
        return pop.walk(pop.base.weight, range(i - 2, -1, -1))
    except KeyError as exc:
        raise MissingNode(f"staircase node for u_{i} is missing") from exc


def _path_multipliers(pop: Population, word: Sequence[int]) -> list[Fraction]:
    """Multiplicative alpha coordinates accumulated along ``word``."""
    problem = pop.problem
    mults = [Fraction(1)] * problem.rs.rank
    w = pop.base.weight
    for i in word:
        mults[i] *= direction_constant(problem, w, i)
        w = problem.reflect(i, w)
    return mults


def kernel_basis(pop: Population) -> KernelBasis:
    """``u_i`` = first polynomial of the staircase node, times its x-power / exponential."""
    problem = pop.problem
    rs = problem.rs
    if rs.family != "A":
        raise UnsupportedType(f"kernel theory is implemented for type A only, not {rs.name}")
    n = rs.rank
    us, mults = [], []
    for i in range(1, n + 2):
        key = staircase(pop, i)
        node = pop.nodes[key]
        p = node.tuple[0]
        if problem.family is Family.XXX:
            us.append(p)
            mults.append(_path_multipliers(pop, node.word)[0])
            continue
        a1 = alpha_coordinates(rs, pop.base.weight, key)[0]
        if problem.family is Family.TRIG:
            us.append(QPoly.of(p, a1))
        else:
            us.append(ExpPoly(a1, p))
    return KernelBasis(problem.family, us, mults)


def _pairings(pop: Population) -> list[Fraction]:
    rs = pop.problem.rs
    return [rs.pairing(pop.base.weight, j) for j in range(rs.rank)]


def _divided_exp(us: Sequence[ExpPoly], pairings, ts) -> ExpPoly:
    i = len(us)
    w = exp_wronskian(us)
    rate = w.rate - sum(((i - 1 - j) * pairings[j] for j in range(i - 1)), Fraction(0))
    part = w.part
    for j in range(i - 1):
        part = part.exact_div(ts[j] ** (i - 1 - j))
    return ExpPoly(rate, part)


def xxx_divisor(pop: Population, i: int) -> Poly:
    """``prod_{j<i} prod_{s=1}^{i-j} T_j^{(h)}(x + (s + j/2 - 3/2) h)`` with 1-based j."""
    problem = pop.problem
    h = problem.h
    out = Poly.const(1)
    for j in range(1, i):
        t = build_T_h(problem, j - 1)
        for s in range(1, i - j + 1):
            out = out * shift(t, (s + Fraction(j, 2) - Fraction(3, 2)) * h)
    return out


def divided(kb: KernelBasis, pop: Population, i: int):
    """Divided Wronskian of ``u_1..u_i`` in the family's form; raises NonDivisible."""
    problem = pop.problem
    us = kb.us[:i]
    if kb.family is Family.TRIG:
        ts = [build_T(problem, j) for j in range(problem.rs.rank)]
        return divided_wronskian(us, _pairings(pop), ts)
    if kb.family is Family.EXP:
        ts = [build_T(problem, j) for j in range(problem.rs.rank)]
        return _divided_exp(us, _pairings(pop), ts)
    w = discrete_wronskian(us, problem.h, kb.multipliers[:i])
    return w.exact_div(xxx_divisor(pop, i))


def _matches(kb: KernelBasis, value, target: Poly) -> bool:
    if kb.family is Family.TRIG:
        return proportional_q(value, QPoly.of(target))
    if kb.family is Family.EXP:
        return value.rate == 0 and proportional(value.part, target)
    return proportional(value, target)


def xxx_argument_shift(pop: Population, i: int) -> Fraction:
    """Shift ``(i-1) h / 2`` at which the difference family recovers ``y_i``.

    The divided discrete Wronskian equals ``y_i(x + (i-1)h/2)``, matching
    the staircase of the frame ``T_i^{(h)}(x + (i-1)h/2)``.
    """
    return Fraction(i - 1, 2) * pop.problem.h


def verify_reconstruction(kb: KernelBasis, pop: Population) -> dict:
    """``y_i ~ W^dagger(u_1..u_i)`` for i=1..N and a nonzero constant for i=N+1.

    For the difference family the comparison uses ``y_i`` at the shifted
    argument of :func:`xxx_argument_shift`; indices where the unshifted
    ``y_i`` would fail are listed under ``shift_needed``.
    """
    n = pop.problem.rs.rank
    ys = list(pop.base.tuple) + [Poly.const(1)]
    mismatches, shifted = [], []
    for i in range(1, n + 2):
        try:
            value = divided(kb, pop, i)
        except NonDivisible:
            mismatches.append({"i": i, "reason": "not divisible"})
            continue
        target = ys[i - 1]
        if kb.family is Family.XXX:
            moved = shift(target, xxx_argument_shift(pop, i))
            if moved != target and not _matches(kb, value, target):
                shifted.append(i)
            target = moved
        if not _matches(kb, value, target):
            mismatches.append({"i": i, "reason": "not proportional"})
    return {"checked": n + 1, "mismatches": mismatches, "shift_needed": shifted, "ok": not mismatches}


def kernel_shape_check(kb: KernelBasis, pop: Population) -> dict:
    """Exponents ``(lam+rho, a_1+..+a_{i-1})``, part degrees and ``p_i(0) != 0``.

    The exponential family has rates ``(lam, a_1+..+a_{i-1})`` instead and
    the difference family has multipliers ``kappa_1 ... kappa_{i-1}``.
    """
    problem = pop.problem
    rs = problem.rs
    lam = pop.base.weight
    degrees = pop.base.degrees
    inf = lambda_infinity(rs, problem.lambdas, degrees)
    shift_rho = 1 if kb.family is Family.TRIG else 0
    bad = []
    for i, u in enumerate(kb.us, start=1):
        if kb.family is Family.XXX:
            want_exp = Fraction(1)
            for j in range(i - 1):
                want_exp *= lam[j]
        else:
            want_exp = sum((rs.pairing(lam, j) + shift_rho * rs.d[j] for j in range(i - 1)), Fraction(0))
        want_deg = degrees[0] + sum((rs.pairing(inf, j) for j in range(i - 1)), Fraction(0))
        if kb.family is Family.XXX:
            part, exp_ok = u, kb.multipliers[i - 1] == want_exp
        elif kb.family is Family.TRIG:
            part, exp_ok = u.part, u.exponent == want_exp
        else:
            part, exp_ok = u.part, u.rate == want_exp
        if not exp_ok:
            bad.append({"i": i, "reason": "exponent"})
        if part.degree != want_deg:
            bad.append({"i": i, "reason": "degree", "got": part.degree, "want": int(want_deg)})
        if kb.family is Family.TRIG and part(Fraction(0)) == 0:
            bad.append({"i": i, "reason": "p(0) = 0"})
    return {"checked": len(kb.us), "mismatches": bad, "ok": not bad}


def full_wronskian_check(kb: KernelBasis, pop: Population) -> dict:
    """``W(u_1..u_{N+1}) ~ prod_s (x^{(lam, a_s)} T_s)^{N+1-s}`` (trig)."""
    if kb.family is not Family.TRIG:
        raise UnsupportedType("full Wronskian product formula is checked for the trig family")
    problem = pop.problem
    n = problem.rs.rank
    pairings = _pairings(pop)
    target = QPoly.of(Poly.const(1))
    for s in range(n):
        target = target * QPoly.of(build_T(problem, s), pairings[s]) ** (n - s)
    w = qwronskian(kb.us)
    ok = proportional_q(w, target)
    return {"exponent": w.exponent, "expected_exponent": target.exponent, "ok": ok}


def same_middle_check(pop: Population) -> dict:
    """Edge-wise identity ``g (f F'' - f'' F) = g' (f F' - f' F)``.

    Here ``f``, ``F`` are the i-th entries of the two endpoints times their
    x-powers and ``g = x^{<lam, a_i^v>} T_i prod_j fbar_j^{-a_ij}``; the
    identity says ``W(f, F) / g`` is constant, i.e. the two middle factors
    of the operator agree across the edge.
    """
    problem = pop.problem
    if problem.family is not Family.TRIG:
        raise UnsupportedType("same-middle check applies to the trig family")
    rs = problem.rs
    lam = pop.base.weight
    coords = {key: alpha_coordinates(rs, lam, key) for key in pop.nodes}

    def bar(key, j):
        return QPoly.of(pop.nodes[key].tuple[j], coords[key][j])

    bad = []
    count = 0
    for (src, i), dst in pop.edges.items():
        f, big = bar(src, i), bar(dst, i)
        g = QPoly.of(build_T(problem, i), lam[i])
        for j in range(rs.rank):
            if j != i and rs.cartan[i][j]:
                g = g * bar(src, j) ** (-rs.cartan[i][j])
        f1, f2 = f.deriv(), f.deriv().deriv()
        b1, b2 = big.deriv(), big.deriv().deriv()
        lhs = g * (f * b2 - f2 * big)
        rhs = g.deriv() * (f * b1 - f1 * big)
        count += 1
        if lhs != rhs or (f * b1 - f1 * big).is_zero():
            bad.append((src, i))
    return {"edges": count, "violations": bad, "ok": not bad}


def exp_kernel_checks(pop: Population) -> dict:
    _require_type_a(pop, Family.EXP)
    kb = kernel_basis(pop)
    return {"reconstruction": verify_reconstruction(kb, pop), "shape": kernel_shape_check(kb, pop)}


def xxx_frame_check(pop: Population) -> dict:
    """Divisibility of the discrete Wronskians by the frame products, and ``y_i`` recovered."""
    _require_type_a(pop, Family.XXX)
    kb = kernel_basis(pop)
    return {"reconstruction": verify_reconstruction(kb, pop), "shape": kernel_shape_check(kb, pop)}
