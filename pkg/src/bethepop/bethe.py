"""Bethe equations in floating point: residuals, Newton solver, solution counts.

A configuration groups the coordinates ``t_j^(i)`` by color ``i``.  The
residual vector is ordered color by color.  For the trig and exp
families the weight parameter is the additive ``lam`` in coroot
coordinates; for the difference family it is the multiplicative ``kappa``
appearing on the left of the Bethe equation.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import RationalizationRejected, SingularConfiguration
from .exactmath import Poly
from .reproduce import Family, Problem, verify_critical_point

GUARD = 1e-8


@dataclass(frozen=True)
class BetheConfig:
    """Coordinates ``t_j^(i)``; ``colors[i]`` holds the ``l_i`` values of color ``i``."""

    colors: tuple[tuple[complex, ...], ...]

    @classmethod
    def of(cls, colors) -> "BetheConfig":
        return cls(tuple(tuple(complex(t) for t in c) for c in colors))

    @property
    def l(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.colors)

    def flat(self) -> list[complex]:
        return [t for c in self.colors for t in c]

    def index(self) -> list[tuple[int, int]]:
        return [(i, j) for i, c in enumerate(self.colors) for j in range(len(c))]


def _unflatten(values, l: Sequence[int]) -> BetheConfig:
    out, pos = [], 0
    for n in l:
        out.append(tuple(complex(v) for v in values[pos : pos + n]))
        pos += n
    return BetheConfig(tuple(out))


def _data(problem: Problem) -> "_Data":
    cached = problem._cache.get("float_data")
    if cached is None:
        cached = problem._cache["float_data"] = _Data(problem)
    return cached


class _Data:
    """Float view of a problem: pairings ``(Lambda_s, a_i)``, the form and ``z``."""

    def __init__(self, problem: Problem):
        rs = problem.rs
        r = rs.rank
        self.family = problem.family
        self.r = r
        self.zs = [complex(z) for z in problem.zs]
        self.lam_pair = [[float(rs.pairing(lam, i)) for lam in problem.lambdas] for i in range(r)]
        self.form = [[float(rs.form(i, j)) for j in range(r)] for i in range(r)]
        self.cartan = rs.cartan
        self.d = rs.d
        self.h = float(problem.h) if problem.h is not None else None
        self.rs = rs

    def weight_pair(self, weight, i: int) -> float:
        return self.d[i] * float(weight[i])


def _check_guard(t: complex, others: Sequence[complex], what: str) -> None:
    for o in others:
        if abs(t - o) < GUARD:
            raise SingularConfiguration(f"coordinate {t} on a singular hyperplane ({what})")


def _guard_config(data: _Data, config: BetheConfig) -> None:
    for i, color in enumerate(config.colors):
        for j, t in enumerate(color):
            if data.family is Family.TRIG:
                _check_guard(t, [0j], "t = 0")
            if data.family is Family.XXX:
                h = data.h
                for s, z in enumerate(data.zs):
                    c = data.lam_pair[i][s] * h / 2
                    _check_guard(t, [z + c], "pole at z_s")
                for m, other in enumerate(config.colors):
                    if m != i and data.cartan[i][m]:
                        _check_guard(t, [u + h / 2 for u in other], "pole of a coupling factor")
                _check_guard(t, [u - h for k, u in enumerate(color) if k != j], "pole of a self factor")
                _check_guard(t, [u for k, u in enumerate(color) if k != j], "coincident coordinates")
                continue
            _check_guard(t, data.zs, "t = z_s")
            for m, other in enumerate(config.colors):
                if m == i:
                    _check_guard(t, [u for k, u in enumerate(other) if k != j], "coincident coordinates")
                elif data.form[i][m]:
                    _check_guard(t, other, "t^(i) = t^(m)")


def _additive_residual(data: _Data, config: BetheConfig, weight, exponential: bool) -> np.ndarray:
    out = []
    for i, color in enumerate(config.colors):
        lp = data.weight_pair(weight, i)
        for j, t in enumerate(color):
            val = -lp if exponential else -lp / t
            for s, z in enumerate(data.zs):
                val -= data.lam_pair[i][s] / (t - z)
            for m, other in enumerate(config.colors):
                b = data.form[m][i]
                if not b:
                    continue
                for k, u in enumerate(other):
                    if m == i and k == j:
                        continue
                    val += b / (t - u)
            out.append(val)
    return np.array(out, dtype=complex)


def _additive_jacobian(data: _Data, config: BetheConfig, weight, exponential: bool) -> np.ndarray:
    idx = config.index()
    flat = config.flat()
    n = len(flat)
    jac = np.zeros((n, n), dtype=complex)
    for p, (i, _) in enumerate(idx):
        t = flat[p]
        diag = 0j if exponential else data.weight_pair(weight, i) / t**2
        for s, z in enumerate(data.zs):
            diag += data.lam_pair[i][s] / (t - z) ** 2
        for q, (m, _) in enumerate(idx):
            if q == p or not data.form[m][i]:
                continue
            term = data.form[m][i] / (t - flat[q]) ** 2
            diag -= term
            jac[p, q] = term
        jac[p, p] = diag
    return jac


def _xxx_factors(data: _Data, config: BetheConfig, i: int, j: int):
    """Pairs ``(numerator_offset, denominator_offset, exponent, partner)`` of the product."""
    h = data.h
    t = config.colors[i][j]
    terms = []
    for s, z in enumerate(data.zs):
        c = data.lam_pair[i][s] * h / 2
        if c:
            terms.append((t - z + c, t - z - c, 1, None))
    for m, other in enumerate(config.colors):
        if m == i or not data.cartan[i][m]:
            continue
        for k, u in enumerate(other):
            terms.append((t - u + h / 2, t - u - h / 2, -data.cartan[i][m], (m, k)))
    for k, u in enumerate(config.colors[i]):
        if k != j:
            terms.append((t - u - h, t - u + h, 1, (i, k)))
    return terms


def _xxx_product(terms) -> complex:
    out = 1 + 0j
    for num, den, e, _ in terms:
        out *= (num / den) ** e
    return out


def residual_trig(config: BetheConfig, problem: Problem, lam) -> np.ndarray:
    data = _data(problem)
    _guard_config(data, config)
    return _additive_residual(data, config, lam, exponential=False)


def residual_exp(config: BetheConfig, problem: Problem, lam) -> np.ndarray:
    data = _data(problem)
    _guard_config(data, config)
    return _additive_residual(data, config, lam, exponential=True)


def residual_xxx(config: BetheConfig, problem: Problem, kappa) -> np.ndarray:
    """``kappa_i - product`` per coordinate (additive form, no spurious zeros at poles)."""
    data = _data(problem)
    _guard_config(data, config)
    out = []
    for i, color in enumerate(config.colors):
        for j in range(len(color)):
            out.append(complex(kappa[i]) - _xxx_product(_xxx_factors(data, config, i, j)))
    return np.array(out, dtype=complex)


def _xxx_jacobian(data: _Data, config: BetheConfig) -> np.ndarray:
    idx = config.index()
    pos = {key: p for p, key in enumerate(idx)}
    n = len(idx)
    jac = np.zeros((n, n), dtype=complex)
    for p, (i, j) in enumerate(idx):
        terms = _xxx_factors(data, config, i, j)
        prod = _xxx_product(terms)
        for num, den, e, partner in terms:
            dlog = e * (1 / num - 1 / den)
            jac[p, p] -= prod * dlog
            if partner is not None:
                jac[p, pos[partner]] += prod * dlog
    return jac


def residual(config: BetheConfig, problem: Problem, weight) -> np.ndarray:
    if problem.family is Family.TRIG:
        return residual_trig(config, problem, weight)
    if problem.family is Family.EXP:
        return residual_exp(config, problem, weight)
    return residual_xxx(config, problem, weight)


def jacobian(config: BetheConfig, problem: Problem, weight) -> np.ndarray:
    data = _data(problem)
    if problem.family is Family.XXX:
        return _xxx_jacobian(data, config)
    return _additive_jacobian(data, config, weight, exponential=problem.family is Family.EXP)


def master_log_value(config: BetheConfig, problem: Problem, lam) -> complex:
    """Principal-branch ``log Phi`` summed term by term (trig or exp master function)."""
    data = _data(problem)
    _guard_config(data, config)
    exponential = problem.family is Family.EXP
    total = 0j
    colors = config.colors
    for i, color in enumerate(colors):
        lp = data.weight_pair(lam, i)
        for t in color:
            total += -lp * t if exponential else -lp * cmath.log(t)
            for s, z in enumerate(data.zs):
                total -= data.lam_pair[i][s] * cmath.log(t - z)
        for j in range(len(color)):
            for s in range(j + 1, len(color)):
                total += data.form[i][i] * cmath.log(color[j] - color[s])
        for m in range(i + 1, len(colors)):
            if data.form[i][m]:
                for t in color:
                    for u in colors[m]:
                        total += data.form[i][m] * cmath.log(t - u)
    return total


# ---------------------------------------------------------------------------
# multistart Newton


def _start_radius(data: _Data, weight) -> float:
    """Disk radius ``2 (1 + max |z_s|)`` for the starting points.

    Exponential-family solutions drift a distance of order
    ``sum_s (Lambda_s, a_i) / |(lambda, a_i)|`` away from the points, so that
    scale is added to the radius there.
    """
    radius = 1 + max((abs(z) for z in data.zs), default=0.0)
    if data.family is Family.EXP:
        spread = 0.0
        for i in range(data.r):
            lp = abs(data.weight_pair(weight, i))
            if lp:
                spread = max(spread, sum(data.lam_pair[i]) / lp)
        radius += spread
    return 2 * radius


def _sample_start(rng: np.random.Generator, data: _Data, l: Sequence[int], radius: float) -> BetheConfig:
    while True:
        n = sum(l)
        rad = radius * np.sqrt(rng.random(n))
        ang = 2 * np.pi * rng.random(n)
        config = _unflatten(rad * np.exp(1j * ang), l)
        try:
            _guard_config(data, config)
        except SingularConfiguration:
            continue
        return config


def _pole_factors(data: _Data, config: BetheConfig, p: int, idx) -> list[tuple[complex, int | None, int]]:
    """Factors ``(value, partner, power)`` whose product clears the poles of row ``p``."""
    i, j = idx[p]
    t = config.colors[i][j]
    out = []
    if data.family is Family.XXX:
        for num, den, e, partner in _xxx_factors(data, config, i, j):
            q = None if partner is None else idx.index(partner)
            if e > 0:
                out.append((den, q, e))
            else:
                out.append((num, q, -e))
        return out
    if data.family is Family.TRIG:
        out.append((t, None, 1))
    for s, z in enumerate(data.zs):
        if data.lam_pair[i][s]:
            out.append((t - z, None, 1))
    for q, (m, k) in enumerate(idx):
        if q != p and data.form[m][i]:
            out.append((t - config.colors[m][k], q, 1))
    return out


def cleared_system(problem: Problem, weight, config: BetheConfig):
    """Residual times its pole factors, row by row, with the analytic Jacobian.

    Off the singular hyperplanes this has the same zeros as the residual;
    Newton converges on it from a much larger share of starting points.
    """
    data = _data(problem)
    res = residual(config, problem, weight)
    jac = jacobian(config, problem, weight)
    idx = config.index()
    out = np.empty_like(res)
    cjac = np.empty_like(jac)
    for p in range(len(idx)):
        factors = _pole_factors(data, config, p, idx)
        d = 1 + 0j
        grad = np.zeros(len(idx), dtype=complex)
        for value, partner, e in factors:
            d *= value**e
        for value, partner, e in factors:
            grad[p] += d * e / value
            if partner is not None:
                grad[partner] -= d * e / value
        out[p] = res[p] * d
        cjac[p] = jac[p] * d + res[p] * grad
    return out, cjac


def _solve_step(jac: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(jac, rhs)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(jac, rhs, rcond=None)[0]


def _converged(problem: Problem, weight, config: BetheConfig, tol: float) -> bool:
    """Residual within ``tol`` and a further Newton step negligible (rules out escape to infinity)."""
    res = residual(config, problem, weight)
    if np.max(np.abs(res)) > tol:
        return False
    step = _solve_step(jacobian(config, problem, weight), -res)
    size = max(abs(t) for t in config.flat())
    return bool(np.max(np.abs(step)) <= 1e-6 * (1 + size))


def _newton(problem: Problem, weight, start: BetheConfig, tol: float, max_iter: int = 200):
    """Damped Newton on the cleared system; the step is halved while the merit increases."""
    config = start
    try:
        val, jac = cleared_system(problem, weight, config)
    except SingularConfiguration:
        return None
    for _ in range(max_iter):
        try:
            if _converged(problem, weight, config, tol):
                return config
        except SingularConfiguration:
            return None
        merit = np.linalg.norm(val)
        step = _solve_step(jac, -val)
        flat = np.array(config.flat())
        scale = 1.0
        for _ in range(40):
            trial = _unflatten(flat + scale * step, config.l)
            try:
                trial_val, trial_jac = cleared_system(problem, weight, trial)
            except SingularConfiguration:
                scale /= 2
                continue
            if np.all(np.isfinite(trial_val)) and np.linalg.norm(trial_val) < merit:
                break
            scale /= 2
        else:
            return None
        config, val, jac = trial, trial_val, trial_jac
    return None


def _same_orbit(a: BetheConfig, b: BetheConfig, tol: float) -> bool:
    """Coordinates agree per color up to permutation (greedy nearest matching)."""
    for ca, cb in zip(a.colors, b.colors):
        left = list(cb)
        for t in ca:
            k = min(range(len(left)), key=lambda q: abs(left[q] - t))
            if abs(left[k] - t) > tol:
                return False
            left.pop(k)
    return True


def canonical(config: BetheConfig) -> BetheConfig:
    """Sort each color by (real, imag) for stable output."""
    return BetheConfig(tuple(tuple(sorted(c, key=lambda t: (round(t.real, 9), round(t.imag, 9)))) for c in config.colors))


def solve_newton(problem: Problem, weight, l: Sequence[int], attempts: int = 200, tol: float = 1e-10, seed: int = 0, dedup: float = 1e-6) -> list[BetheConfig]:
    """Distinct orbit representatives of converged multistart Newton runs."""
    l = tuple(int(v) for v in l)
    if sum(l) == 0:
        return [BetheConfig(tuple(() for _ in l))]
    data = _data(problem)
    rng = np.random.default_rng(seed)
    radius = _start_radius(data, weight)
    found: list[BetheConfig] = []
    for _ in range(attempts):
        start = _sample_start(rng, data, l, radius)
        sol = _newton(problem, weight, start, tol)
        if sol is None:
            continue
        if any(_same_orbit(sol, other, dedup) for other in found):
            continue
        found.append(canonical(sol))
    return found


def weight_multiplicity_sl2(lambdas: Sequence[int], l: int) -> int:
    """Number of ``(m_1..m_n)`` with ``0 <= m_s <= Lambda_s`` and ``sum m_s = l``."""
    if l < 0:
        return 0
    counts = [1] + [0] * l
    for cap in lambdas:
        new = [0] * (l + 1)
        for total, c in enumerate(counts):
            if not c:
                continue
            for m in range(min(int(cap), l - total) + 1):
                new[total + m] += c
        counts = new
    return counts[l]


def count_check(problem: Problem, weight, l: int, attempts: int = 200, tol: float = 1e-10, seed: int = 0) -> dict:
    """Compare the number of sl2 solution orbits with the weight multiplicity."""
    if problem.rs.rank != 1:
        raise ValueError("count_check is defined for sl2")
    lambdas = [int(lam[0]) for lam in problem.lambdas]
    bound = weight_multiplicity_sl2(lambdas, l)
    sols = solve_newton(problem, weight, (l,), attempts=attempts, tol=tol, seed=seed) if l <= sum(lambdas) else []
    conds = []
    for s in sols:
        jac = jacobian(s, problem, weight)
        conds.append(float(np.linalg.cond(jac)) if jac.size else 1.0)
    return {
        "solutions": len(sols),
        "multiplicity": bound,
        "equal": len(sols) == bound,
        "within_bound": len(sols) <= bound,
        "condition_numbers": conds,
        "configs": sols,
    }


# ---------------------------------------------------------------------------
# polynomials from roots


def roots_to_tuple(config: BetheConfig) -> tuple[np.ndarray, ...]:
    """Monic polynomials ``prod (x - t)`` per color, coefficients low to high."""
    out = []
    for color in config.colors:
        coeffs = np.poly(np.array(color, dtype=complex)) if color else np.array([1.0 + 0j])
        out.append(np.asarray(coeffs, dtype=complex)[::-1])
    return tuple(out)


def reproduction_weight(problem: Problem, weight) -> tuple[Fraction, ...]:
    """Weight at which the exact reproduction treats a solution of these equations.

    The difference-family reproduction ``kappa y(x) yt(x+h) - y(x+h) yt(x)``
    is critical for the Bethe equations with the inverted multipliers.
    """
    weight = tuple(Fraction(w) for w in weight)
    if problem.family is Family.XXX:
        return tuple(1 / k for k in weight)
    return weight


def rationalize(float_tuple, problem: Problem, weight, max_denominator: int = 10_000, snap_tol: float = 1e-9) -> tuple[Poly, ...]:
    """Snap coefficients to nearby rationals; accepted only if exactly critical."""
    out = []
    for coeffs in float_tuple:
        snapped = []
        for c in np.atleast_1d(coeffs):
            c = complex(c)
            q = Fraction(c.real).limit_denominator(max_denominator)
            if abs(c.imag) > snap_tol or abs(float(q) - c.real) > snap_tol:
                raise RationalizationRejected(f"coefficient {c} is not near a rational with denominator <= {max_denominator}")
            snapped.append(q)
        out.append(Poly(snapped))
    ys = tuple(out)
    if not verify_critical_point(problem, ys, reproduction_weight(problem, weight)):
        raise RationalizationRejected("snapped tuple is not an exact critical point")
    return ys
