"""Exact univariate polynomial algebra over the rationals.

Polynomials are dense coefficient tuples of :class:`fractions.Fraction`,
lowest degree first.  The zero polynomial has no coefficients and degree
``-inf`` (represented as ``-1`` by :attr:`Poly.degree`, see below).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import comb
from typing import Iterable, Sequence, Union

from .errors import NonDivisible, Undefined, ZeroStep

Rational = Fraction
Number = Union[int, Fraction]


def Q(value) -> Fraction:
    """Parse an exact rational from an int, Fraction or a ``"p/q"`` string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip().replace("−", "-"))
    raise TypeError(f"not an exact rational: {value!r}")


def rational_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _strip(coeffs: Iterable[Number]) -> tuple[Fraction, ...]:
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


class Poly:
    """Dense polynomial with rational coefficients, low to high."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()):
        self.coeffs = _strip(coeffs)

    @classmethod
    def const(cls, c: Number) -> "Poly":
        return cls((c,))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def monomial(cls, k: int, c: Number = 1) -> "Poly":
        return cls((0,) * k + (c,))

    @classmethod
    def from_roots(cls, roots: Iterable[Number]) -> "Poly":
        p = cls.const(1)
        for t in roots:
            p = p * cls((-Fraction(t), 1))
        return p

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports -1 (stand-in for -inf)."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mon = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            terms.append(f"{c}{'*' + mon if mon else ''}")
        return "Poly(" + " + ".join(terms) + ")"

    def __add__(self, other) -> "Poly":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Poly":
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result, base = Poly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: Number) -> "Poly":
        return Poly(Fraction(c) * a for a in self.coeffs)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lead
        if len(rem) - 1 < dq:
            return Poly(), self
        quot = [Fraction(0)] * (len(rem) - dq)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] / lead
            quot[k - dq] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k - dq + j] -= c * b
        return Poly(quot), Poly(rem[:dq])

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise NonDivisible(f"{self!r} is not divisible by {other!r}")
        return q

    def deriv(self) -> "Poly":
        return Poly(k * c for k, c in enumerate(self.coeffs) if k)

    def __call__(self, x0):
        acc = 0 * x0 if not isinstance(x0, (int, Fraction)) else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x0 + c
        return acc

    def shift(self, s: Number) -> "Poly":
        """Return ``p(x + s)``."""
        return shift(self, Fraction(s))

    def monic(self) -> "Poly":
        return monicize(self)


def _as_poly(p) -> Poly:
    if isinstance(p, Poly):
        return p
    if isinstance(p, (int, Fraction)):
        return Poly.const(p)
    raise TypeError(f"cannot coerce {p!r} to Poly")


ONE = Poly.const(1)
X = Poly.x()


def wronskian2(f: Poly, g: Poly) -> Poly:
    """``f' g - f g'``."""
    return f.deriv() * g - f * g.deriv()


def shift(p: Poly, s: Fraction) -> Poly:
    """Taylor shift ``p(x + s)`` computed with binomial expansion."""
    s = Fraction(s)
    if s == 0 or p.degree < 1:
        return p
    n = len(p.coeffs)
    out = [Fraction(0)] * n
    for k, c in enumerate(p.coeffs):
        if c == 0:
            continue
        spow = Fraction(1)
        for j in range(k, -1, -1):
            # contributes c * C(k, j) * x^j * s^(k-j)
            out[j] += c * comb(k, j) * spow
            spow *= s
    return Poly(out)


def gcd(p: Poly, q: Poly) -> Poly:
    """Monic greatest common divisor; ``gcd(0, 0)`` is undefined."""
    if p.is_zero() and q.is_zero():
        raise Undefined("gcd(0, 0)")
    a, b = p, q
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return monicize(a)


def is_squarefree(p: Poly) -> bool:
    if p.degree < 1:
        return not p.is_zero()
    return gcd(p, p.deriv()).degree == 0


def coprime(p: Poly, q: Poly) -> bool:
    return gcd(p, q).degree == 0


def eval_poly(p: Poly, x0: Fraction) -> Fraction:
    return p(Fraction(x0))


def monicize(p: Poly) -> Poly:
    if p.is_zero():
        return p
    lead = p.lead
    return p if lead == 1 else Poly(c / lead for c in p.coeffs)


def pow_product(factors: Iterable[tuple[Poly, int]]) -> Poly:
    """``prod f**e`` over ``(f, e)`` pairs with nonnegative exponents."""
    out = ONE
    for f, e in factors:
        if e:
            out = out * f**e
    return out


def proportional(p: Poly, q: Poly) -> bool:
    """True when ``p = c q`` for a nonzero rational ``c``."""
    if p.is_zero() or q.is_zero():
        return p.is_zero() and q.is_zero()
    return monicize(p) == monicize(q)


def det(matrix: Sequence[Sequence]) -> object:
    """Determinant over the rationals by Gaussian elimination.

    Polynomial entries fall back to the Leibniz expansion (no division).
    """
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    first = matrix[0][0]
    if isinstance(first, Poly):
        return _leibniz_det(matrix)
    a = [[Fraction(v) for v in row] for row in matrix]
    sign = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
        sign *= a[col][col]
    return sign


def _perm_sign(perm: Sequence[int]) -> int:
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _leibniz_det(matrix: Sequence[Sequence[Poly]]) -> Poly:
    n = len(matrix)
    total = Poly()
    for perm in permutations(range(n)):
        term = Poly.const(_perm_sign(perm))
        for i, j in enumerate(perm):
            term = term * matrix[i][j]
            if term.is_zero():
                break
        total = total + term
    return total


# ---------------------------------------------------------------------------
# quasi-polynomials x^a p(x)


@dataclass(frozen=True)
class QPoly:
    """The function ``x**exponent * part(x)``.

    Normalized so that ``part(0) != 0`` unless ``part`` is zero; the zero
    function has exponent 0.
    """

    exponent: Fraction
    part: Poly

    def __post_init__(self):
        exp, part = Fraction(self.exponent), self.part
        if part.is_zero():
            exp = Fraction(0)
        else:
            k = 0
            while part.coeffs[k] == 0:
                k += 1
            if k:
                part = Poly(part.coeffs[k:])
                exp += k
        object.__setattr__(self, "exponent", exp)
        object.__setattr__(self, "part", part)

    @classmethod
    def of(cls, part: Poly, exponent: Number = 0) -> "QPoly":
        return cls(Fraction(exponent), part)

    def is_zero(self) -> bool:
        return self.part.is_zero()

    def deriv(self) -> "QPoly":
        a, p = self.exponent, self.part
        return QPoly(a - 1, p.scale(a) + X * p.deriv())

    def __mul__(self, other) -> "QPoly":
        if isinstance(other, QPoly):
            return QPoly(self.exponent + other.exponent, self.part * other.part)
        return QPoly(self.exponent, self.part * _as_poly(other))

    __rmul__ = __mul__

    def __neg__(self) -> "QPoly":
        return QPoly(self.exponent, -self.part)

    def __add__(self, other: "QPoly") -> "QPoly":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        diff = self.exponent - other.exponent
        if diff.denominator != 1:
            raise ValueError("cannot add quasi-polynomials with non-integral exponent gap")
        k = int(diff)
        if k >= 0:
            return QPoly(other.exponent, self.part * Poly.monomial(k) + other.part)
        return QPoly(self.exponent, self.part + other.part * Poly.monomial(-k))

    def __sub__(self, other: "QPoly") -> "QPoly":
        return self + (-other)

    def __pow__(self, n: int) -> "QPoly":
        return QPoly(self.exponent * n, self.part**n)

    def exact_div(self, other: "QPoly") -> "QPoly":
        return QPoly(self.exponent - other.exponent, self.part.exact_div(other.part))

    def scale(self, c: Number) -> "QPoly":
        return QPoly(self.exponent, self.part.scale(c))

    def monic(self) -> "QPoly":
        return QPoly(self.exponent, monicize(self.part))


def proportional_q(a: QPoly, b: QPoly) -> bool:
    if a.is_zero() or b.is_zero():
        return a.is_zero() and b.is_zero()
    return a.exponent == b.exponent and proportional(a.part, b.part)


def qwronskian(fs: Sequence[QPoly]) -> QPoly:
    """``det(u_k^(j-1))`` for quasi-polynomials sharing exponents mod 1 per row.

    Each row k is ``x^{a_k - j + 1} * P_kj``; pulling ``x^{a_k}`` out of the
    row and ``x^{-(j-1)}`` out of column j leaves a polynomial determinant.
    """
    if not fs:
        raise ValueError("empty Wronskian")
    n = len(fs)
    rows = []
    for f in fs:
        row, d = [], f
        for j in range(n):
            # d has exponent f.exponent - j after normalization unless the
            # part gained x-factors; re-expand to the fixed column exponent
            row.append(_part_at(d, f.exponent - j))
            d = d.deriv()
        rows.append(row)
    total_exp = sum((f.exponent for f in fs), Fraction(0)) - Fraction(n * (n - 1), 2)
    return QPoly(total_exp, det(rows))


def _part_at(q: QPoly, exponent: Fraction) -> Poly:
    """Polynomial ``p`` with ``q = x^exponent * p`` (exponent gap must be a nonneg int)."""
    if q.is_zero():
        return Poly()
    gap = q.exponent - exponent
    if gap.denominator != 1 or gap < 0:
        raise ValueError("quasi-polynomial exponent below the requested base")
    return q.part * Poly.monomial(int(gap))


def divided_wronskian(us: Sequence[QPoly], weight_pairings: Sequence[Fraction], ts: Sequence[Poly]) -> QPoly:
    """``W(u_1..u_i)`` divided by ``prod_j (x^{(lam, a_j)} T_j)^{i-j}``.

    ``weight_pairings[j]`` is ``(lambda, alpha_{j+1})`` (form-weighted).
    Raises :class:`NonDivisible` if the polynomial division is not exact.
    """
    i = len(us)
    w = qwronskian(us)
    for j in range(i - 1):
        power = i - 1 - j
        divisor = QPoly(Fraction(weight_pairings[j]), ts[j]) ** power
        w = w.exact_div(divisor)
    return w


# ---------------------------------------------------------------------------
# exponential polynomials e^{a x} p(x)


@dataclass(frozen=True)
class ExpPoly:
    rate: Fraction
    part: Poly

    def deriv(self) -> "ExpPoly":
        return ExpPoly(self.rate, self.part.scale(self.rate) + self.part.deriv())

    def is_zero(self) -> bool:
        return self.part.is_zero()


def exp_wronskian(fs: Sequence[ExpPoly]) -> ExpPoly:
    """Wronskian of exponential polynomials; the rates add up."""
    n = len(fs)
    rows = []
    for f in fs:
        row, d = [], f
        for _ in range(n):
            row.append(d.part)
            d = d.deriv()
        rows.append(row)
    return ExpPoly(sum((f.rate for f in fs), Fraction(0)), det(rows))


def discrete_wronskian(fs: Sequence[Poly], h: Number, multipliers: Sequence[Number] | None = None) -> Poly:
    """``det(m_i^{j-1} f_i(x + (j-1) h))``.

    ``multipliers[i]`` stands for ``e^{a_i h}`` when row i is the
    exponential polynomial ``e^{a_i x} f_i``; the common ``e^{a_i x}``
    factors are left to the caller.
    """
    h = Fraction(h)
    if h == 0:
        raise ZeroStep("discrete Wronskian step must be nonzero")
    n = len(fs)
    mults = [Fraction(1)] * n if multipliers is None else [Fraction(m) for m in multipliers]
    rows = []
    for f, m in zip(fs, mults):
        rows.append([shift(f, j * h).scale(m**j) for j in range(n)])
    return det(rows)


# ---------------------------------------------------------------------------
# exact linear algebra used by the reproduction solvers


def solve_linear(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Exact Gauss-Jordan solve of ``M v = rhs``.

    Returns ``(solution, nullity)``; ``solution`` is ``None`` when the
    system is inconsistent.  With positive nullity a particular solution
    (free variables set to zero) is returned.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((k for k in range(r, rows) if a[k][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for k in range(rows):
            if k != r and a[k][c] != 0:
                f = a[k][c]
                a[k] = [vk - f * vr for vk, vr in zip(a[k], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for k in range(r, rows):
        if a[k][cols] != 0:
            return None, cols - len(pivots)
    sol = [Fraction(0)] * cols
    for k, c in enumerate(pivots):
        sol[c] = a[k][cols]
    return sol, cols - len(pivots)


def poly_from_json(data: Sequence) -> Poly:
    return Poly(Q(c) for c in data)


def poly_to_json(p: Poly) -> list[str]:
    return [rational_str(c) for c in p.coeffs]
