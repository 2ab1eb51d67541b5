"""Simple reproduction procedures as exact linear solves.

Three families share one solver.  For a tuple ``y`` and a direction ``i``
the unknown descendant ``yt`` satisfies ``L(yt) = g`` with ``g`` from
:func:`rhs_g` and ``L`` linear:

* trig:  ``c*y*yt + x*(y*yt' - y'*yt)``,  ``c = m_i + 1``
* exp:   ``c*y*yt + (y*yt' - y'*yt)``,    ``c = m_i``
* xxx:   ``k*y(x)*yt(x+h) - y(x+h)*yt(x)``, ``k = kappa_i``

These are the Wronskian identities with the x-power / exponential factor
and the sign cleared; tuples are compared up to scalars.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .errors import AmbiguousSolution, Infertile, InvalidProblem
from .exactmath import (
    ONE,
    X,
    Poly,
    QPoly,
    coprime,
    is_squarefree,
    monicize,
    qwronskian,
    discrete_wronskian,
    shift,
    solve_linear,
)
from .rootdata import RootSystem, reflect_mult, reflect_plain, reflect_shifted


class Family(str, Enum):
    TRIG = "trig"
    EXP = "exp"
    XXX = "xxx"


@dataclass(frozen=True)
class Problem:
    """Fixed data ``(rs, Lambda_1..n, z_1..n)`` of one Bethe system."""

    rs: RootSystem
    lambdas: tuple[tuple[Fraction, ...], ...]
    zs: tuple[Fraction, ...]
    family: Family = Family.TRIG
    h: Fraction | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        lambdas = tuple(tuple(Fraction(c) for c in lam) for lam in self.lambdas)
        zs = tuple(Fraction(z) for z in self.zs)
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "zs", zs)
        object.__setattr__(self, "family", Family(self.family))
        if len(lambdas) != len(zs):
            raise InvalidProblem("Lambda and z lists differ in length")
        for lam in lambdas:
            if len(lam) != self.rs.rank:
                raise InvalidProblem("weight has wrong number of coordinates")
            if any(c.denominator != 1 or c < 0 for c in lam):
                raise InvalidProblem("Lambda_s must be dominant integral")
        if len(set(zs)) != len(zs):
            raise InvalidProblem("points z must be pairwise distinct")
        if self.family is Family.TRIG and any(z == 0 for z in zs):
            raise InvalidProblem("trigonometric family needs z_s != 0")
        if self.family is Family.XXX:
            if self.h is None or Fraction(self.h) == 0:
                raise InvalidProblem("difference family needs a nonzero step h")
            h = Fraction(self.h)
            object.__setattr__(self, "h", h)
            for a in range(len(zs)):
                for b in range(a + 1, len(zs)):
                    if ((zs[a] - zs[b]) / h).denominator == 1:
                        raise InvalidProblem("z_a - z_b must not lie in h*Z")

    @property
    def n(self) -> int:
        return len(self.zs)

    def reflect(self, i: int, weight):
        """Weight transport for one reproduction step in this family."""
        if self.family is Family.TRIG:
            return reflect_shifted(self.rs, i, weight)
        if self.family is Family.EXP:
            return reflect_plain(self.rs, i, weight)
        return reflect_mult(self.rs, i, weight)

    @property
    def action(self) -> str:
        return {Family.TRIG: "shifted", Family.EXP: "plain", Family.XXX: "mult"}[self.family]


def build_T(problem: Problem, i: int) -> Poly:
    """``prod_s (x - z_s)^{<Lambda_s, alpha_i^vee>}``."""
    key = ("T", i)
    if key not in problem._cache:
        out = ONE
        for lam, z in zip(problem.lambdas, problem.zs):
            out = out * Poly((-z, 1)) ** int(lam[i])
        problem._cache[key] = out
    return problem._cache[key]


def build_T_h(problem: Problem, i: int) -> Poly:
    """``prod_s prod_{j=1}^{k_s} (x - z_s - k_s h/2 + j h)`` with ``k_s = (Lambda_s, alpha_i)``."""
    key = ("Th", i)
    if key not in problem._cache:
        h = Fraction(problem.h)
        out = ONE
        for lam, z in zip(problem.lambdas, problem.zs):
            k = int(problem.rs.pairing(lam, i))
            for j in range(1, k + 1):
                out = out * Poly((-z - k * h / 2 + j * h, 1))
        problem._cache[key] = out
    return problem._cache[key]


def rhs_g(problem: Problem, ys: Sequence[Poly], i: int) -> Poly:
    a = problem.rs.cartan
    if problem.family is Family.XXX:
        out = build_T_h(problem, i)
        half = Fraction(problem.h) / 2
        for m, y in enumerate(ys):
            if m != i and a[i][m]:
                out = out * shift(y, half) ** (-a[i][m])
        return out
    out = build_T(problem, i)
    for j, y in enumerate(ys):
        if j != i and a[i][j]:
            out = out * y ** (-a[i][j])
    return out


def _operator_column(family: Family, y: Poly, k: int, c: Fraction, h: Fraction | None) -> Poly:
    """Image of the monomial ``x^k`` under the family's linear operator."""
    mon = Poly.monomial(k)
    if family is Family.TRIG:
        return y * mon.scale(c) + X * (y * mon.deriv() - y.deriv() * mon)
    if family is Family.EXP:
        return y * mon.scale(c) + y * mon.deriv() - y.deriv() * mon
    return (y * shift(mon, h)).scale(c) - shift(y, h) * mon


def apply_operator(family: Family, y: Poly, yt: Poly, c: Fraction, h: Fraction | None = None) -> Poly:
    if family is Family.TRIG:
        return y * yt.scale(c) + X * (y * yt.deriv() - y.deriv() * yt)
    if family is Family.EXP:
        return y * yt.scale(c) + y * yt.deriv() - y.deriv() * yt
    return (y * shift(yt, h)).scale(c) - shift(y, h) * yt


def direction_constant(problem: Problem, weight, i: int) -> Fraction:
    w = Fraction(weight[i])
    if problem.family is Family.TRIG:
        return w + 1
    return w


def solve_descendant(problem: Problem, ys: Sequence[Poly], weight, i: int) -> Poly:
    """Raw (non-monic) solution ``yt`` of ``L(yt) = g`` in direction ``i``."""
    family = problem.family
    c = direction_constant(problem, weight, i)
    if family is Family.EXP and c == 0:
        raise Infertile(f"direction {i}: exponential constant vanishes")
    if family is Family.XXX and c == 1:
        raise Infertile(f"direction {i}: multiplicative weight equals 1")
    y = ys[i]
    g = rhs_g(problem, ys, i)
    q = g.degree - y.degree
    if q < 0:
        raise Infertile(f"direction {i}: target degree {q} < 0")
    cols = [_operator_column(family, y, k, c, problem.h) for k in range(q + 1)]
    nrows = max(g.degree, max(col.degree for col in cols)) + 1
    matrix = [[col[r] for col in cols] for r in range(nrows)]
    sol, nullity = solve_linear(matrix, [g[r] for r in range(nrows)])
    if sol is None:
        raise Infertile(f"direction {i}: no polynomial solution of degree <= {q}")
    if nullity:
        raise AmbiguousSolution(f"direction {i}: solution space has dimension {nullity}", nullity)
    yt = Poly(sol)
    if apply_operator(family, y, yt, c, problem.h) != g:
        raise AssertionError("reproduction identity failed after solve")
    return yt


def reproduce(problem: Problem, ys: Sequence[Poly], weight, i: int) -> tuple[Poly, ...]:
    """Descendant tuple in direction ``i`` (slot ``i`` replaced by the monic solution)."""
    yt = monicize(solve_descendant(problem, ys, weight, i))
    out = list(ys)
    out[i] = yt
    return tuple(out)


def reproduce_trig(problem, ys, lam, i):
    _expect(problem, Family.TRIG)
    return reproduce(problem, ys, lam, i)


def reproduce_exp(problem, ys, lam, i):
    _expect(problem, Family.EXP)
    return reproduce(problem, ys, lam, i)


def reproduce_xxx(problem, ys, kappa, i):
    _expect(problem, Family.XXX)
    return reproduce(problem, ys, kappa, i)


def _expect(problem: Problem, family: Family) -> None:
    if problem.family is not family:
        raise InvalidProblem(f"expected a {family.value} problem, got {problem.family.value}")


def verify_identity(problem: Problem, ys: Sequence[Poly], weight, i: int, yt: Poly) -> bool:
    """Re-check the defining Wronskian identity in its function form, up to scalar.

    trig: ``W(y_i, x^{m_i+1} yt) ~ x^{m_i} g``; exp: ``W(y_i, e^{m_i x} yt) ~ e^{m_i x} g``;
    xxx: ``W_h(y_i, e^{.. x} yt) ~ e^{.. x} g`` with the exponential stripped.
    """
    g = rhs_g(problem, ys, i)
    y = ys[i]
    if problem.family is Family.TRIG:
        m = Fraction(weight[i])
        w = qwronskian([QPoly.of(y), QPoly.of(yt, m + 1)])
        return not w.is_zero() and w.exponent == QPoly.of(g, m).exponent and monicize(w.part) == monicize(QPoly.of(g, m).part)
    if problem.family is Family.EXP:
        c = Fraction(weight[i])
        from .exactmath import ExpPoly, exp_wronskian

        w = exp_wronskian([ExpPoly(Fraction(0), y), ExpPoly(c, yt)])
        return w.rate == c and not w.part.is_zero() and monicize(w.part) == monicize(g)
    w = discrete_wronskian([y, yt], problem.h, [1, weight[i]])
    return not w.is_zero() and monicize(w) == monicize(g)


# ---------------------------------------------------------------------------
# off-diagonality and the critical-point criterion


def is_off_diagonal(problem: Problem, ys: Sequence[Poly]) -> bool:
    rs = problem.rs
    fam = problem.family
    for i, y in enumerate(ys):
        if y.is_zero() or not is_squarefree(y):
            return False
        if fam is Family.XXX:
            half = Fraction(problem.h) / 2
            for m, ym in enumerate(ys):
                if m != i and rs.cartan[i][m] and not coprime(y, shift(ym, half)):
                    return False
            if not coprime(y, build_T_h(problem, i)):
                return False
            if not coprime(y, shift(y, problem.h)):
                return False
            continue
        if fam is Family.TRIG and y(Fraction(0)) == 0:
            return False
        for j, yj in enumerate(ys):
            if j != i and rs.cartan[i][j] and not coprime(y, yj):
                return False
        if not coprime(y, build_T(problem, i)):
            return False
    return True


class Verdict(str, Enum):
    TRUE = "true"
    FALSE = "false"
    INDETERMINATE = "indeterminate"


def fertility(problem: Problem, ys: Sequence[Poly], weight) -> Verdict:
    ambiguous = False
    for i in range(problem.rs.rank):
        try:
            solve_descendant(problem, ys, weight, i)
        except Infertile:
            return Verdict.FALSE
        except AmbiguousSolution:
            ambiguous = True
    return Verdict.INDETERMINATE if ambiguous else Verdict.TRUE


def is_fertile(problem: Problem, ys: Sequence[Poly], weight) -> bool:
    return fertility(problem, ys, weight) is Verdict.TRUE


def critical_point_verdict(problem: Problem, ys: Sequence[Poly], weight, degrees: Sequence[int] | None = None) -> Verdict:
    if degrees is not None and [y.degree for y in ys] != list(degrees):
        return Verdict.FALSE
    if not is_off_diagonal(problem, ys):
        return Verdict.FALSE
    return fertility(problem, ys, weight)


def verify_critical_point(problem: Problem, ys: Sequence[Poly], weight, degrees: Sequence[int] | None = None) -> bool:
    """Exact membership test: degrees match, off-diagonal, fertile in every direction."""
    return critical_point_verdict(problem, ys, weight, degrees) is Verdict.TRUE


def expected_degree(problem: Problem, ys: Sequence[Poly], i: int) -> int:
    """Degree law for the direction-``i`` descendant."""
    a = problem.rs.cartan
    if problem.family is Family.XXX:
        t_deg = build_T_h(problem, i).degree
    else:
        t_deg = build_T(problem, i).degree
    return t_deg + sum(-a[i][j] * ys[j].degree for j in range(len(ys)) if j != i) - ys[i].degree


def trivial_tuple(problem: Problem) -> tuple[Poly, ...]:
    return (ONE,) * problem.rs.rank
