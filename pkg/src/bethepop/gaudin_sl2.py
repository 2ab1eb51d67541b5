"""sl2 tensor products, trigonometric Gaudin operators and the dynamical Weyl group.

Conventions: ``(alpha, alpha) = 2`` and ``h = alpha^vee``, so
``Omega^0 = h(x)h / 4`` and a weight ``lam`` acts on a factor as
``(lam / 2) h``.  Basis vectors of ``L_Lambda`` are ``F^m v`` with
``0 <= m <= Lambda``:

    f F^m v = F^{m+1} v,   e F^m v = m (Lambda - m + 1) F^{m-1} v,   h F^m v = (Lambda - 2m) F^m v.

Dynamical Weyl group matrices are exact (``Fraction``); Gaudin operators
and Bethe vectors are complex floats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bethe import BetheConfig, solve_newton
from .errors import DescendantNotOffDiagonal, NonGeneric, SingularConfiguration, ZeroVector
from .reproduce import Family, Problem

Vector = dict  # basis index -> Fraction


@dataclass(frozen=True)
class Sl2Tensor:
    """``L_{Lambda_1} (x) ... (x) L_{Lambda_n}`` with the monomial basis ``F^m v``."""

    lambdas: tuple[int, ...]

    def __post_init__(self):
        lams = tuple(int(v) for v in self.lambdas)
        if any(v < 0 for v in lams):
            raise ValueError("highest weights must be nonnegative")
        object.__setattr__(self, "lambdas", lams)

    @property
    def basis(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(v + 1) for v in self.lambdas)))

    @property
    def dim(self) -> int:
        return math.prod(v + 1 for v in self.lambdas)

    def index(self, m: Sequence[int]) -> int:
        out = 0
        for mi, lam in zip(m, self.lambdas):
            out = out * (lam + 1) + mi
        return out

    def weight(self, m: Sequence[int]) -> int:
        return sum(lam - 2 * mi for lam, mi in zip(self.lambdas, m))

    def weights(self) -> list[int]:
        return sorted({self.weight(m) for m in self.basis}, reverse=True)

    def block(self, nu: int) -> list[int]:
        """Basis indices spanning ``V[nu]`` in basis order."""
        return [k for k, m in enumerate(self.basis) if self.weight(m) == nu]

    # single-factor matrices
    def factor(self, s: int) -> dict[str, np.ndarray]:
        lam = self.lambdas[s]
        e = np.zeros((lam + 1, lam + 1))
        f = np.zeros((lam + 1, lam + 1))
        h = np.diag([float(lam - 2 * m) for m in range(lam + 1)])
        for m in range(lam + 1):
            if m + 1 <= lam:
                f[m + 1, m] = 1.0
            if m >= 1:
                e[m - 1, m] = m * (lam - m + 1)
        return {"e": e, "f": f, "h": h}

    def local(self, name: str, s: int) -> np.ndarray:
        """Generator ``name`` acting on factor ``s`` of the full tensor product."""
        mats = [np.eye(v + 1) for v in self.lambdas]
        mats[s] = self.factor(s)[name]
        out = np.ones((1, 1))
        for m in mats:
            out = np.kron(out, m)
        return out

    def total(self, name: str) -> np.ndarray:
        return sum(self.local(name, s) for s in range(len(self.lambdas)))

    # exact actions on sparse vectors
    def apply_e(self, vec: Vector) -> Vector:
        out: Vector = {}
        basis = self.basis
        for k, c in vec.items():
            m = basis[k]
            for s, lam in enumerate(self.lambdas):
                if m[s] >= 1:
                    mm = list(m)
                    mm[s] -= 1
                    key = self.index(mm)
                    out[key] = out.get(key, Fraction(0)) + c * m[s] * (lam - m[s] + 1)
        return {k: v for k, v in out.items() if v}

    def apply_f(self, vec: Vector) -> Vector:
        out: Vector = {}
        basis = self.basis
        for k, c in vec.items():
            m = basis[k]
            for s, lam in enumerate(self.lambdas):
                if m[s] < lam:
                    mm = list(m)
                    mm[s] += 1
                    key = self.index(mm)
                    out[key] = out.get(key, Fraction(0)) + c
        return {k: v for k, v in out.items() if v}


def _add(a: Vector, b: Vector, scale=Fraction(1)) -> Vector:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + scale * v
    return {k: v for k, v in out.items() if v}


def check_sl2_relations(V: Sl2Tensor) -> bool:
    """``[e,f]=h``, ``[h,e]=2e``, ``[h,f]=-2f`` on every factor."""
    for s in range(len(V.lambdas)):
        g = V.factor(s)
        e, f, h = g["e"], g["f"], g["h"]
        if not (np.array_equal(e @ f - f @ e, h) and np.array_equal(h @ e - e @ h, 2 * e) and np.array_equal(h @ f - f @ h, -2 * f)):
            return False
    return True


# ---------------------------------------------------------------------------
# trigonometric Gaudin operators


def _pair(V: Sl2Tensor, a: str, i: int, b: str, j: int) -> np.ndarray:
    return V.local(a, i) @ V.local(b, j)


def r_matrix(V: Sl2Tensor, i: int, j: int, z: complex) -> np.ndarray:
    """``r^{(i,j)}(z) = (Omega^+ z + Omega^-) / (z - 1)``."""
    omega0 = _pair(V, "h", i, "h", j) / 4
    plus = omega0 + _pair(V, "e", i, "f", j)
    minus = omega0 + _pair(V, "f", i, "e", j)
    return (plus * z + minus) / (z - 1)


@dataclass
class GaudinOperators:
    V: Sl2Tensor
    param: complex
    full: list[np.ndarray]
    nu: int | None = None

    @property
    def blocks(self) -> list[np.ndarray]:
        if self.nu is None:
            return self.full
        idx = self.V.block(self.nu)
        return [H[np.ix_(idx, idx)] for H in self.full]


def build_gaudin(problem: Problem, param: complex, nu: int | None = None) -> GaudinOperators:
    """``H_i(param) = (param/2) h^{(i)} + sum_{j != i} r^{(i,j)}(z_i / z_j)``."""
    V = tensor_of(problem)
    zs = [complex(z) for z in problem.zs]
    if any(z == 0 for z in zs):
        raise ValueError("Gaudin operators need nonzero z")
    n = len(zs)
    hs = []
    for i in range(n):
        H = (param / 2) * V.local("h", i).astype(complex)
        for j in range(n):
            if j != i:
                H = H + r_matrix(V, i, j, zs[i] / zs[j])
        hs.append(H)
    return GaudinOperators(V, param, hs, nu)


def tensor_of(problem: Problem) -> Sl2Tensor:
    if problem.rs.rank != 1:
        raise ValueError("the Gaudin module is restricted to sl2")
    return Sl2Tensor(tuple(int(lam[0]) for lam in problem.lambdas))


def commutator_norms(ops: GaudinOperators) -> float:
    """Largest ``||[H_i,H_j]|| / (||H_i|| ||H_j||)``."""
    worst = 0.0
    hs = ops.full
    for a in range(len(hs)):
        for b in range(a + 1, len(hs)):
            c = hs[a] @ hs[b] - hs[b] @ hs[a]
            scale = np.linalg.norm(hs[a]) * np.linalg.norm(hs[b])
            worst = max(worst, float(np.linalg.norm(c) / scale) if scale else float(np.linalg.norm(c)))
    return worst


def off_block_max(ops: GaudinOperators) -> float:
    """Largest entry of any ``H_i`` connecting different weights (exactly 0 expected)."""
    w = np.array([ops.V.weight(m) for m in ops.V.basis])
    mask = w[:, None] != w[None, :]
    return max((float(np.max(np.abs(H[mask]))) if mask.any() else 0.0) for H in ops.full)


# ---------------------------------------------------------------------------
# weight function and Bethe vectors


def weight_function(problem: Problem, ts: Sequence[complex]) -> np.ndarray:
    """``omega(t)`` on the block ``V[sum Lambda - 2l]`` in block basis order."""
    V = tensor_of(problem)
    zs = [complex(z) for z in problem.zs]
    ts = [complex(t) for t in ts]
    for t in ts:
        for z in zs:
            if abs(t - z) < 1e-12:
                raise SingularConfiguration(f"coordinate {t} equals some z_s")
    l = len(ts)
    nu = sum(V.lambdas) - 2 * l
    idx = V.block(nu)
    basis = V.basis
    out = np.zeros(len(idx), dtype=complex)
    perms = list(itertools.permutations(range(l)))
    for pos, k in enumerate(idx):
        m = basis[k]
        owner = [s for s, ms in enumerate(m) for _ in range(ms)]
        total = 0j
        for perm in perms:
            term = 1 + 0j
            for slot, s in enumerate(owner):
                term /= ts[perm[slot]] - zs[s]
            total += term
        out[pos] = total / math.prod(math.factorial(ms) for ms in m)
    return out


def rayleigh(H: np.ndarray, w: np.ndarray) -> complex:
    return complex(np.vdot(w, H @ w) / np.vdot(w, w))


def verify_bethe_eigen(problem: Problem, lam, config: BetheConfig | Sequence[complex]) -> dict:
    """Eigen-residuals of ``omega(t)`` for ``H_i(lam + 1 + Lambda_inf/2)``."""
    ts = config.colors[0] if isinstance(config, BetheConfig) else tuple(config)
    V = tensor_of(problem)
    lam = complex(lam[0] if isinstance(lam, (tuple, list)) else lam)
    nu = sum(V.lambdas) - 2 * len(ts)
    w = weight_function(problem, ts)
    norm = np.linalg.norm(w)
    if norm < 1e-300 or not np.isfinite(norm):
        raise ZeroVector("Bethe vector vanishes")
    ops = build_gaudin(problem, lam + 1 + nu / 2, nu)
    residuals, eigenvalues = [], []
    for H in ops.blocks:
        mu = rayleigh(H, w)
        residuals.append(float(np.linalg.norm(H @ w - mu * w) / norm))
        eigenvalues.append(mu)
    return {"residuals": residuals, "eigenvalues": eigenvalues, "max_residual": max(residuals, default=0.0)}


# ---------------------------------------------------------------------------
# dynamical Weyl group


def _falling(x: Fraction, j: int) -> Fraction:
    out = Fraction(1)
    for i in range(j):
        out *= x - i
    return out


def intertwiner_terms(V: Sl2Tensor, lam, vec: Vector, nu: int) -> list[Vector]:
    """``u_0..u_J`` of ``Phi(v_lam) = sum_j F^j v_{lam-nu} (x) u_j`` from ``e Phi(v_lam) = 0``."""
    mu = Fraction(lam) - nu
    terms = [dict(vec)]
    j = 1
    while True:
        ev = V.apply_e(terms[-1])
        if not ev:
            break
        denom = j * (mu - j + 1)
        if denom == 0:
            raise NonGeneric(f"intertwiner recursion divides by zero at j={j}, mu={mu}")
        terms.append({k: -c / denom for k, c in ev.items()})
        j += 1
    return terms


def _f_power(V: Sl2Tensor, vec: Vector, k: int) -> Vector:
    for _ in range(k):
        if not vec:
            break
        vec = V.apply_f(vec)
    return vec


def dwg_column(V: Sl2Tensor, lam: int, k: int, check_lower: bool = True) -> Vector:
    """``A_w(lam) F^m v`` by applying ``F^{lam+1}/(lam+1)!`` to the intertwiner.

    ``Delta(F)^{lam+1} = sum_p C(lam+1, p) F^p (x) F^{lam+1-p}``; the term with
    ``F^{mu+1} v_mu`` in the first factor (``mu = lam - nu``) is read off.
    Terms with fewer than ``mu+1`` lowerings would have higher weight than the
    singular vector; they are verified to cancel when ``check_lower``.
    """
    lam = int(lam)
    m = V.basis[k]
    nu = V.weight(m)
    mu = lam - nu
    if mu < 0:
        raise NonGeneric(f"lam - nu = {mu} is not dominant")
    terms = intertwiner_terms(V, lam, {k: Fraction(1)}, nu)
    top = lam + 1
    by_power: dict[int, Vector] = {}
    for j, u in enumerate(terms):
        # F^k vanishes on V once k exceeds sum Lambda_s
        for p in range(max(0, top - sum(V.lambdas)), top + 1):
            second = top - p
            img = _f_power(V, u, second)
            if not img:
                continue
            key = j + p
            if key > mu + 1:
                continue
            if key < mu + 1 and not check_lower:
                continue
            by_power[key] = _add(by_power.get(key, {}), img, Fraction(math.comb(top, p)))
    if check_lower:
        for key, vec in by_power.items():
            if key < mu + 1 and vec:
                raise AssertionError(f"higher-weight term F^{key} v_mu does not cancel")
    # v^lam_{w.lam} = F^{lam+1} v_lam / (lam+1)!  and  v^mu_{w.mu} = F^{mu+1} v_mu / (mu+1)!
    scale = Fraction(math.factorial(mu + 1), math.factorial(top))
    return {key: c * scale for key, c in by_power.get(mu + 1, {}).items()}


def dwg_column_rational(V: Sl2Tensor, lam, k: int) -> Vector:
    """Same column via the closed form, valid for any ``lam`` off the poles.

    ``A_w(lam) v = sum_j (lam-nu+1)/(lam-nu-j+1) * F^{nu+j} u'_j / (nu+j)!`` where
    ``u'_j = (-1)^j e^j v / j!``; this is the rational continuation in ``lam``.
    """
    lam = Fraction(lam)
    m = V.basis[k]
    nu = V.weight(m)
    out: Vector = {}
    vec: Vector = {k: Fraction(1)}
    j = 0
    while vec:
        if nu + j >= 0:
            denom = lam - nu - j + 1
            if denom == 0:
                raise NonGeneric(f"pole of the dynamical Weyl operator at lam={lam}")
            coeff = (lam - nu + 1) / denom * Fraction((-1) ** j, math.factorial(j) * math.factorial(nu + j))
            out = _add(out, _f_power(V, vec, nu + j), coeff)
        vec = V.apply_e(vec)
        j += 1
    return out


def dwg_operator(V: Sl2Tensor, lam, literal: bool = True) -> list[list[Fraction]]:
    """Exact matrix of ``A_w(lam)`` on ``V`` (columns indexed by basis vectors).

    The literal construction requires ``lam`` dominant integral with
    ``lam >= sum Lambda_s``; otherwise use ``literal=False``.
    """
    if literal:
        if Fraction(lam).denominator != 1 or lam < sum(V.lambdas):
            raise NonGeneric(f"lam={lam} fails the surrogate lam >= sum Lambda_s")
    dim = V.dim
    mat = [[Fraction(0)] * dim for _ in range(dim)]
    for k in range(dim):
        col = dwg_column(V, lam, k) if literal else dwg_column_rational(V, lam, k)
        for row, c in col.items():
            mat[row][k] = c
    return mat


def dwg_shifted(V: Sl2Tensor, lam, literal: bool = True) -> list[list[Fraction]]:
    """``calA_w(lam) v = A_w(lam + nu) v`` for ``v`` in ``V[nu]``."""
    dim = V.dim
    mat = [[Fraction(0)] * dim for _ in range(dim)]
    for k, m in enumerate(V.basis):
        shifted = Fraction(lam) + V.weight(m)
        if literal:
            if shifted.denominator != 1 or shifted < sum(V.lambdas):
                raise NonGeneric(f"lam + nu = {shifted} fails the surrogate")
            col = dwg_column(V, int(shifted), k)
        else:
            col = dwg_column_rational(V, shifted, k)
        for row, c in col.items():
            mat[row][k] = c
    return mat


def to_float(mat: Sequence[Sequence[Fraction]]) -> np.ndarray:
    """Float copy, rescaled per column by the largest entry to avoid overflow."""
    out = np.zeros((len(mat), len(mat[0]) if mat else 0))
    for k in range(out.shape[1]):
        col = [mat[r][k] for r in range(out.shape[0])]
        big = max((abs(c) for c in col), default=Fraction(0))
        if big:
            out[:, k] = [float(c / big) for c in col]
    return out


def to_float_exact_scale(mat: Sequence[Sequence[Fraction]]) -> np.ndarray:
    return np.array([[float(c) for c in row] for row in mat])


def weight_map_ok(V: Sl2Tensor, mat) -> bool:
    """Exact check that every column from ``V[nu]`` lies in ``V[-nu]``."""
    basis = V.basis
    for k, m in enumerate(basis):
        nu = V.weight(m)
        for r in range(V.dim):
            if mat[r][k] != 0 and V.weight(basis[r]) != -nu:
                return False
    return True


def sine_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Sine of the angle between ``a`` and the line through ``b``."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 1.0
    a, b = a / na, b / nb
    return float(np.linalg.norm(a - np.vdot(b, a) * b))


def dwg_commutation_check(problem: Problem, lam: int) -> dict:
    """``calA_w(lam) H_i(lam+1+nu/2) v = H_i(-(lam+1+nu/2)) calA_w(lam) v`` per block."""
    V = tensor_of(problem)
    A = to_float_exact_scale(dwg_shifted(V, lam))
    worst = 0.0
    for nu in V.weights():
        src, dst = V.block(nu), V.block(-nu)
        p = lam + 1 + nu / 2
        h_src = build_gaudin(problem, p).full
        h_dst = build_gaudin(problem, -p).full
        blockA = A[np.ix_(dst, src)]
        for Hs, Hd in zip(h_src, h_dst):
            lhs = blockA @ Hs[np.ix_(src, src)]
            rhs = Hd[np.ix_(dst, dst)] @ blockA
            scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1e-300)
            worst = max(worst, float(np.linalg.norm(lhs - rhs) / scale))
    return {"max_relative_residual": worst, "ok": worst <= 1e-10}


def limit_check(V: Sl2Tensor, lam: int) -> dict:
    """Per-column sine angle between ``calA_w(lam) F^m v`` and ``F^{Lambda-m} v``."""
    A = dwg_shifted(V, lam)
    basis = V.basis
    worst = 0.0
    for k, m in enumerate(basis):
        col = [A[r][k] for r in range(V.dim)]
        big = max(abs(c) for c in col)
        vec = np.array([float(c / big) for c in col])
        target = np.zeros(V.dim)
        target[V.index([lam_s - ms for lam_s, ms in zip(V.lambdas, m)])] = 1.0
        worst = max(worst, sine_angle(vec, target))
    return {"lam": lam, "max_sine": worst}


def square_scalar_check(V: Sl2Tensor, lam) -> dict:
    """``calA_w(w.lam) calA_w(lam)`` restricted to each ``V[nu]`` is a scalar.

    ``w.lam = -lam - 2`` is not dominant, so the rational continuation is used
    for the outer factor.
    """
    inner = dwg_shifted(V, lam, literal=False)
    outer = dwg_shifted(V, -Fraction(lam) - 2, literal=False)
    dim = V.dim
    prod = [[sum((outer[r][q] * inner[q][c] for q in range(dim)), Fraction(0)) for c in range(dim)] for r in range(dim)]
    scalars = {}
    ok = True
    for nu in V.weights():
        idx = V.block(nu)
        diag = {prod[i][i] for i in idx}
        off = any(prod[a][b] for a in range(dim) for b in idx if a != b)
        ok = ok and len(diag) == 1 and not off
        scalars[nu] = next(iter(diag))
    return {"scalars": scalars, "ok": ok}


# ---------------------------------------------------------------------------
# reproduction in floats and the Weyl-action pipeline


def reproduce_float(problem: Problem, lam: float, roots: Sequence[complex], pivot_tol: float = 1e-10) -> np.ndarray:
    """Coefficients (low to high) of ``yt`` with ``c y yt + x (y yt' - y' yt) = T``, ``c = lam+1``."""
    if problem.family is not Family.TRIG:
        raise ValueError("float reproduction implemented for the trig family")
    y = np.poly(np.array(roots, dtype=complex))[::-1] if len(roots) else np.array([1.0 + 0j])
    T = np.array([1.0 + 0j])
    for lam_s, z in zip(problem.lambdas, problem.zs):
        for _ in range(int(lam_s[0])):
            T = np.convolve(T, np.array([-complex(z), 1.0]))
    l = len(y) - 1
    q = len(T) - 1 - l
    if q < 0:
        raise DescendantNotOffDiagonal("descendant degree is negative")
    c = lam + 1
    cols = []
    for k in range(q + 1):
        mon = np.zeros(k + 1, dtype=complex)
        mon[k] = 1
        col = c * np.convolve(y, mon)
        dmon = np.array([j * mon[j] for j in range(1, k + 1)], dtype=complex) if k else np.zeros(1, dtype=complex)
        dy = np.array([j * y[j] for j in range(1, l + 1)], dtype=complex) if l else np.zeros(1, dtype=complex)
        wr = _padd(np.convolve(y, dmon), -np.convolve(dy, mon))
        col = _padd(col, np.concatenate([[0], wr]))
        cols.append(col)
    n = max(len(T), max(len(col) for col in cols))
    M = np.zeros((n, q + 1), dtype=complex)
    for k, col in enumerate(cols):
        M[: len(col), k] = col
    rhs = np.zeros(n, dtype=complex)
    rhs[: len(T)] = T
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= pivot_tol * sv[0]:
        raise DescendantNotOffDiagonal("reproduction system is numerically singular")
    sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return sol / sol[-1]


def _padd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=complex)
    out[: len(a)] += a
    out[: len(b)] += b
    return out


def descendant_roots(problem: Problem, lam: float, roots: Sequence[complex]) -> np.ndarray:
    coeffs = reproduce_float(problem, lam, roots)
    new = np.roots(coeffs[::-1]) if len(coeffs) > 1 else np.array([], dtype=complex)
    zs = [complex(z) for z in problem.zs]
    for a in range(len(new)):
        if abs(new[a]) < 1e-8 or any(abs(new[a] - z) < 1e-8 for z in zs):
            raise DescendantNotOffDiagonal("descendant root on a singular hyperplane")
        for b in range(a):
            if abs(new[a] - new[b]) < 1e-8:
                raise DescendantNotOffDiagonal("descendant has a repeated root")
    return new


def weyl_image_angle(problem: Problem, lam: int, ts: Sequence[complex], ts_w: Sequence[complex], shifted=None) -> float:
    """Sine angle between ``calA_w(lam) omega(t)`` and ``omega(t_w)``."""
    V = tensor_of(problem)
    nu = sum(V.lambdas) - 2 * len(ts)
    if shifted is None:
        shifted = dwg_shifted(V, lam)
    src, dst = V.block(nu), V.block(-nu)
    A = to_float_exact_scale(shifted)[np.ix_(dst, src)]
    image = A @ weight_function(problem, ts)
    return sine_angle(image, weight_function(problem, ts_w))


def conjecture_check(problem: Problem, lam: int, l: int, attempts: int = 200, tol: float = 1e-10, seed: int = 0) -> dict:
    """Bethe vector at ``t`` mapped by ``calA_w(lam)`` versus the Bethe vector of the descendant."""
    V = tensor_of(problem)
    shifted = dwg_shifted(V, lam)
    sols = solve_newton(problem, (Fraction(lam),), (l,), attempts=attempts, tol=tol, seed=seed)
    rows = []
    for cfg in sols:
        ts = list(cfg.colors[0])
        try:
            ts_w = descendant_roots(problem, float(lam), ts)
        except DescendantNotOffDiagonal as exc:
            rows.append({"t": ts, "error": str(exc)})
            continue
        rows.append({"t": ts, "t_w": list(ts_w), "sine": weyl_image_angle(problem, lam, ts, ts_w, shifted)})
    sines = [r["sine"] for r in rows if "sine" in r]
    return {"solutions": len(sols), "rows": rows, "max_sine": max(sines, default=0.0)}
