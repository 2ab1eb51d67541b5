"""Cartan data, weights in coroot coordinates, Weyl actions and foldings.

A weight is stored by its pairings ``m_i = <lambda, alpha_i^vee>`` as a
tuple of Fractions.  Multiplicative weights (for the difference family)
are tuples of nonzero Fractions standing for ``exp(m_i h)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InvalidType, UnsupportedType

WeightVec = tuple[Fraction, ...]
MultWeight = tuple[Fraction, ...]

WEYL_ORDERS = {
    "A": lambda r: _factorial(r + 1),
    "B": lambda r: 2**r * _factorial(r),
    "C": lambda r: 2**r * _factorial(r),
    "D": lambda r: 2 ** (r - 1) * _factorial(r),
    "E": lambda r: {6: 51840, 7: 2903040, 8: 696729600}[r],
    "F": lambda r: 1152,
    "G": lambda r: 12,
}


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def _simple_root_products(family: str, r: int) -> list[list[int]]:
    """Gram matrix ``(alpha_i, alpha_j)`` in Bourbaki order, short roots of length^2 2."""
    g = [[0] * r for _ in range(r)]

    def link(i, j, val):
        g[i][j] = g[j][i] = val

    if family in "ADE":
        for i in range(r):
            g[i][i] = 2
        if family == "A":
            for i in range(r - 1):
                link(i, i + 1, -1)
        elif family == "D":
            for i in range(r - 2):
                link(i, i + 1, -1)
            link(r - 3, r - 1, -1)
        else:
            # E_r: chain 1-3-4-5-...-r with node 2 attached to node 4
            for a, b in [(0, 2), (2, 3), (1, 3)] + [(k, k + 1) for k in range(3, r - 1)]:
                link(a, b, -1)
    elif family == "B":
        for i in range(r - 1):
            g[i][i] = 4
        g[r - 1][r - 1] = 2
        for i in range(r - 1):
            link(i, i + 1, -2)
    elif family == "C":
        for i in range(r - 1):
            g[i][i] = 2
        g[r - 1][r - 1] = 4
        for i in range(r - 2):
            link(i, i + 1, -1)
        link(r - 2, r - 1, -2)
    elif family == "F":
        g[0][0] = g[1][1] = 4
        g[2][2] = g[3][3] = 2
        link(0, 1, -2)
        link(1, 2, -2)
        link(2, 3, -1)
    elif family == "G":
        g[0][0], g[1][1] = 2, 6
        link(0, 1, -3)
    return g


_VALID = {
    "A": lambda r: r >= 1,
    "B": lambda r: r >= 2,
    "C": lambda r: r >= 2,
    "D": lambda r: r >= 4,
    "E": lambda r: r in (6, 7, 8),
    "F": lambda r: r == 4,
    "G": lambda r: r == 2,
}


@dataclass(frozen=True)
class RootSystem:
    """Symmetrizable Cartan matrix with minimal symmetrizer.

    ``cartan[i][j] = a_ij`` with ``d_i a_ij = (alpha_i, alpha_j)``, hence
    ``<alpha_j, alpha_i^vee> = a_ij``.
    """

    family: str
    rank: int
    cartan: tuple[tuple[int, ...], ...]
    d: tuple[int, ...]
    name: str = field(default="")

    def __post_init__(self):
        a, d, r = self.cartan, self.d, self.rank
        if len(a) != r or any(len(row) != r for row in a) or len(d) != r:
            raise InvalidType("Cartan matrix shape does not match rank")
        for i in range(r):
            if a[i][i] != 2:
                raise InvalidType("diagonal entries must equal 2")
            if d[i] <= 0:
                raise InvalidType("symmetrizer entries must be positive")
            for j in range(r):
                if i == j:
                    continue
                if a[i][j] > 0 or (a[i][j] == 0) != (a[j][i] == 0):
                    raise InvalidType("invalid off-diagonal Cartan entries")
                if d[i] * a[i][j] != d[j] * a[j][i]:
                    raise InvalidType("D*A is not symmetric")
        if not self.name:
            object.__setattr__(self, "name", f"{self.family}{r}")

    def form(self, i: int, j: int) -> int:
        """``(alpha_i, alpha_j) = d_i a_ij``."""
        return self.d[i] * self.cartan[i][j]

    def pairing(self, weight: Sequence[Fraction], i: int) -> Fraction:
        """``(lambda, alpha_i) = d_i <lambda, alpha_i^vee>``."""
        return self.d[i] * Fraction(weight[i])

    @property
    def is_finite(self) -> bool:
        return self.family in WEYL_ORDERS

    @property
    def weyl_order(self) -> int:
        if not self.is_finite:
            raise UnsupportedType(f"{self.name} is not of finite type")
        return WEYL_ORDERS[self.family](self.rank)

    def braid_order(self, i: int, j: int) -> int:
        """Order of ``s_i s_j``."""
        if i == j:
            return 1
        prod = self.cartan[i][j] * self.cartan[j][i]
        return {0: 2, 1: 3, 2: 4, 3: 6}[prod]

    @cached_property
    def reference_weight(self) -> WeightVec:
        # inside the fundamental chamber, hence regular for the plain action
        return tuple(Fraction(1, 2 * i + 3) for i in range(1, self.rank + 1))


def make_root_system(family: str, rank: int) -> RootSystem:
    family = family.upper()
    if family not in _VALID or not _VALID[family](rank):
        raise InvalidType(f"no simple type {family}{rank}")
    g = _simple_root_products(family, rank)
    d = tuple(g[i][i] // 2 for i in range(rank))
    cartan = tuple(tuple(2 * g[i][j] // g[i][i] for j in range(rank)) for i in range(rank))
    return RootSystem(family, rank, cartan, d)


def from_cartan(cartan: Sequence[Sequence[int]], d: Sequence[int], name: str = "KM") -> RootSystem:
    """A (possibly non-finite) symmetrizable Kac-Moody Cartan matrix."""
    r = len(cartan)
    return RootSystem("KM", r, tuple(tuple(int(v) for v in row) for row in cartan), tuple(d), name)


def parse_type(text: str) -> RootSystem:
    text = text.strip()
    if len(text) < 2 or not text[1:].isdigit():
        raise InvalidType(f"cannot parse root system {text!r}")
    return make_root_system(text[0], int(text[1:]))


def weight(*coords) -> WeightVec:
    return tuple(Fraction(c) for c in coords)


def rho(rs: RootSystem) -> WeightVec:
    return (Fraction(1),) * rs.rank


# Weyl actions. <alpha_i, alpha_j^vee> = a_ji, so s_i(lambda) has
# coordinates m_j - m_i a_ji.


def reflect_plain(rs: RootSystem, i: int, lam: Sequence[Fraction]) -> WeightVec:
    mi = Fraction(lam[i])
    return tuple(Fraction(m) - mi * rs.cartan[j][i] for j, m in enumerate(lam))


def reflect_shifted(rs: RootSystem, i: int, lam: Sequence[Fraction]) -> WeightVec:
    shift = Fraction(lam[i]) + 1
    return tuple(Fraction(m) - shift * rs.cartan[j][i] for j, m in enumerate(lam))


def reflect_mult(rs: RootSystem, i: int, kappa: Sequence[Fraction]) -> MultWeight:
    ki = Fraction(kappa[i])
    return tuple(Fraction(k) * ki ** (-rs.cartan[j][i]) for j, k in enumerate(kappa))


ACTIONS = {"shifted": reflect_shifted, "plain": reflect_plain, "mult": reflect_mult}


def apply_word(rs: RootSystem, word: Iterable[int], lam: Sequence[Fraction], action: str = "shifted"):
    """Apply ``s_{w_1}`` first, then ``s_{w_2}``, ... (word in application order)."""
    refl = ACTIONS[action]
    out = tuple(Fraction(v) for v in lam)
    for i in word:
        out = refl(rs, i, out)
    return out


def orbit(rs: RootSystem, lam: Sequence[Fraction], action: str = "shifted", limit: int | None = None):
    """Breadth-first orbit ``{image: shortest word}`` of ``lam``."""
    if not rs.is_finite:
        raise UnsupportedType(f"orbit enumeration needs a finite type, got {rs.name}")
    refl = ACTIONS[action]
    start = tuple(Fraction(v) for v in lam)
    seen = {start: ()}
    queue = deque([start])
    cap = limit if limit is not None else rs.weyl_order
    while queue:
        cur = queue.popleft()
        for i in range(rs.rank):
            nxt = refl(rs, i, cur)
            if nxt not in seen:
                seen[nxt] = seen[cur] + (i,)
                if len(seen) > cap:
                    raise UnsupportedType("orbit larger than the Weyl group bound")
                queue.append(nxt)
    return seen


def is_strongly_nonintegral(rs: RootSystem, lam: Sequence[Fraction], action: str = "shifted") -> bool:
    """No pairing ``<w.lam, alpha_i^vee>`` is an integer along the whole orbit.

    ``action="plain"`` applies the same test to the unshifted orbit (used by
    the exponential family).
    """
    for img in orbit(rs, lam, action):
        if any(Fraction(m).denominator == 1 for m in img):
            return False
    return True


def lambda_infinity(rs: RootSystem, lambdas: Sequence[Sequence[Fraction]], degrees: Sequence[int]) -> WeightVec:
    """Coordinates of ``sum Lambda_s - sum l_i alpha_i``."""
    out = []
    for j in range(rs.rank):
        total = sum((Fraction(lam[j]) for lam in lambdas), Fraction(0))
        total -= sum(degrees[i] * rs.cartan[j][i] for i in range(rs.rank))
        out.append(total)
    return tuple(out)


def weight_difference_in_roots(rs: RootSystem, base: Sequence[Fraction], other: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Solve ``base - other = sum a_i alpha_i`` for the ``a_i``.

    In coroot coordinates this reads ``m(base) - m(other) = A^T a``.
    """
    from .exactmath import solve_linear

    r = rs.rank
    mat = [[Fraction(rs.cartan[j][i]) for i in range(r)] for j in range(r)]
    rhs = [Fraction(b) - Fraction(o) for b, o in zip(base, other)]
    sol, nullity = solve_linear(mat, rhs)
    if sol is None or nullity:
        raise UnsupportedType("Cartan matrix is singular; root coordinates undefined")
    return tuple(sol)


@dataclass(frozen=True)
class WeylWord:
    word: tuple[int, ...]
    key: WeightVec


def weyl_word(rs: RootSystem, word: Sequence[int]) -> WeylWord:
    """Word with its canonical key: the plain image of the reference weight."""
    return WeylWord(tuple(word), apply_word(rs, word, rs.reference_weight, "plain"))


def check_reference_keys(rs: RootSystem) -> None:
    """Assert that the reference weight has a free orbit (distinct keys)."""
    size = len(orbit(rs, rs.reference_weight, "plain"))
    if size != rs.weyl_order:
        raise AssertionError(f"reference weight orbit has {size} points, expected {rs.weyl_order}")


# ---------------------------------------------------------------------------
# foldings B_N -> A_{2N-1} and G_2 -> C_3


def fold_target(rs: RootSystem) -> RootSystem:
    if rs.family == "B":
        return make_root_system("A", 2 * rs.rank - 1)
    if rs.family == "G":
        return make_root_system("C", 3)
    raise UnsupportedType(f"no folding defined for {rs.name}")


def fold_index_map(rs: RootSystem) -> list[int]:
    """Source node of every target node."""
    if rs.family == "B":
        n = rs.rank
        return list(range(n - 1)) + [n - 1] + list(range(n - 2, -1, -1))
    if rs.family == "G":
        # the long root (node 2 here) sits on the C3 end nodes
        return [1, 0, 1]
    raise UnsupportedType(f"no folding defined for {rs.name}")


def fold_weight(rs: RootSystem, lam: Sequence) -> tuple:
    """Mirror coordinates (additive or multiplicative) onto the target diagram."""
    return tuple(lam[k] for k in fold_index_map(rs))


def fold_tuple(rs: RootSystem, ys: Sequence) -> tuple:
    return tuple(ys[k] for k in fold_index_map(rs))


def fold_reflection(rs: RootSystem, i: int) -> list[int]:
    """Target reflections (commuting) realizing the source reflection ``s_i``."""
    return [k for k, src in enumerate(fold_index_map(rs)) if src == i]
