"""Zero-temperature one-step replica-symmetry-breaking functional.

The two-atom Crisanti-Sommers functional is evaluated at finite inverse
temperature, its ground-state limit ``f1`` is computed three ways (scalar
root, one-dimensional and two-dimensional minimisation), and ``f1`` is tied
to the minima complexity through a Legendre-Fenchel transform.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .complexity import E_k, theta0_closed
from .errors import DomainError, InconsistentClassification
from .mixture import Mixture, MixtureClass, eval_nu, profile

EQUAL_TOL = 1e-6


# ---------------------------------------------------------------------------
# Finite temperature


def F1_two_atom(m: float, q: float, beta: float, mix: Mixture) -> float:
    """Two-atom functional at inverse temperature ``beta`` (twice the free energy).

    Returns ``inf`` at ``q == 1``.

    Raises:
        DomainError: ``m`` outside ``(0, 1]``, ``q`` outside ``[0, 1]`` or ``beta <= 0``.
    """
    if not (0.0 < m <= 1.0) or not (0.0 <= q <= 1.0) or beta <= 0.0:
        raise DomainError(f"need 0 < m <= 1, 0 <= q <= 1, beta > 0; got {m}, {q}, {beta}")
    if q == 1.0:
        return math.inf
    one_q = 1.0 - q
    return (
        beta * beta * (1.0 - (1.0 - m) * eval_nu(mix, q))
        + math.log(one_q)
        - math.log(one_q / (one_q + m * q)) / m
    )


@dataclass(frozen=True)
class TwoAtomState:
    m: float
    q: float
    beta: float
    value: float

    @property
    def free_energy(self) -> float:
        """``value / (2 beta)``; tends to ``f1`` as ``beta`` grows."""
        return 0.5 * self.value / self.beta


def minimize_two_atom(beta: float, mix: Mixture) -> TwoAtomState:
    """Minimise :func:`F1_two_atom` over the unit square.

    The minimiser sits at ``m ~ b/beta`` and ``1 - q ~ a/beta``, so the search
    runs in the logs of the rescaled variables ``a = (1-q) beta`` and
    ``b = m beta`` and is seeded from the zero-temperature optimum.
    """
    if beta <= 0.0:
        raise DomainError("beta must be positive")
    a0, b0 = zero_temp_optimum(mix).a, zero_temp_optimum(mix).b

    def obj(z: np.ndarray) -> float:
        a, b = math.exp(z[0]), math.exp(z[1])
        m = min(b / beta, 1.0)
        q = 1.0 - min(a / beta, 1.0)
        return F1_two_atom(m, q, beta, mix)

    best = None
    starts = [(a0, b0), (0.5 * a0, 2.0 * b0), (2.0 * a0, 0.5 * b0)]
    for a, b in starts:
        z0 = np.log([min(a, 0.999 * beta), min(b, beta)])
        res = optimize.minimize(
            obj,
            z0,
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000},
        )
        if best is None or res.fun < best.fun:
            best = res
    a, b = math.exp(best.x[0]), math.exp(best.x[1])
    m = min(b / beta, 1.0)
    q = 1.0 - min(a / beta, 1.0)
    # The replica-symmetric corner q = 0 is always admissible.
    rs = beta * beta
    if rs < best.fun:
        return TwoAtomState(m=1.0, q=0.0, beta=beta, value=rs)
    return TwoAtomState(m=m, q=q, beta=beta, value=float(best.fun))


# ---------------------------------------------------------------------------
# Zero temperature


def zero_temp_objective(a: float, b: float, nu_prime: float) -> float:
    """``(b + nu' a + log((a+b)/a) / b) / 2``."""
    return 0.5 * (b + nu_prime * a + math.log1p(b / a) / b)


def a_of_b(b: float, nu_prime: float) -> float:
    """Inner minimiser over ``a``: positive root of ``a (a + b) = 1/nu'``."""
    # rationalised to avoid cancellation for large b
    return 2.0 / nu_prime / (b + math.sqrt(b * b + 4.0 / nu_prime))


def f1_of_b(b: float, mix: Mixture | float) -> float:
    """Zero-temperature objective minimised over ``a`` at fixed ``b``."""
    n1 = mix if isinstance(mix, (int, float)) else mix.nu_prime
    if b <= 0.0:
        raise DomainError("b must be positive")
    return zero_temp_objective(a_of_b(b, n1), b, n1)


def _a_equation(a: float, n1: float) -> float:
    # (a log a - a + 1)/(a - 1)^2 - 1/nu', with a series near a = 1.
    d = a - 1.0
    if abs(d) < 1e-3:
        ratio = 0.5 - d / 6.0 + d * d / 12.0 - d**3 / 20.0 + d**4 / 30.0
    else:
        ratio = (a * math.log(a) - a + 1.0) / (d * d)
    return ratio - 1.0 / n1


def f1_value(nu_prime: float) -> float:
    """Closed-form ``f1`` as a function of ``nu'`` (``nu' >= 2``)."""
    n1 = float(nu_prime)
    if n1 < 2.0:
        raise DomainError("nu' must be at least 2")
    if n1 == 2.0:
        return math.sqrt(2.0)
    hi = 2.0
    while _a_equation(hi, n1) > 0.0:
        hi *= 2.0
    a = optimize.bisect(lambda x: _a_equation(x, n1), 1.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    y = math.sqrt(a / n1)
    return y + (n1 - 1.0) / (y * n1)


def f1(mix: Mixture) -> float:
    """Ground-state bound from the two-atom functional; depends on ``nu'`` only."""
    return f1_value(mix.nu_prime)


@dataclass(frozen=True)
class ZeroTempState:
    a: float
    b: float
    value: float


def zero_temp_optimum(mix: Mixture | float) -> ZeroTempState:
    """Minimise :func:`f1_of_b` over ``b > 0`` (one-dimensional reduction)."""
    n1 = mix if isinstance(mix, (int, float)) else mix.nu_prime
    if n1 == 2.0:
        # the optimum escapes to b -> 0, a -> 1/sqrt(2)
        return ZeroTempState(a=1.0 / math.sqrt(2.0), b=0.0, value=math.sqrt(2.0))
    # b* collapses to 0 as nu' -> 2, so scan a wide log range first.
    grid = np.linspace(-30.0, 8.0, 381)
    vals = [f1_of_b(math.exp(lb), n1) for lb in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = optimize.minimize_scalar(
        lambda lb: f1_of_b(math.exp(lb), n1),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    b = math.exp(res.x)
    return ZeroTempState(a=a_of_b(b, n1), b=b, value=float(res.fun))


def f1_grid_search(mix: Mixture | float, box: float = 10.0, n: int = 200) -> ZeroTempState:
    """Two-dimensional oracle: coarse grid on ``(0, box]^2`` then local polish."""
    n1 = mix if isinstance(mix, (int, float)) else mix.nu_prime
    g = np.linspace(box / n, box, n)
    A, B = np.meshgrid(g, g, indexing="ij")
    vals = 0.5 * (B + n1 * A + np.log1p(B / A) / B)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)

    def obj(z: np.ndarray) -> float:
        return zero_temp_objective(math.exp(z[0]), math.exp(z[1]), n1)

    res = optimize.minimize(
        obj,
        np.log([g[i], g[j]]),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20000},
    )
    return ZeroTempState(a=math.exp(res.x[0]), b=math.exp(res.x[1]), value=float(res.fun))


# ---------------------------------------------------------------------------
# Legendre duality with the minima complexity


def c_nu(mix: Mixture | float) -> float:
    n1 = mix if isinstance(mix, (int, float)) else mix.nu_prime
    return (n1 - 2.0) / math.sqrt(n1 * (n1 - 1.0))


def g1(x: float, mix: Mixture) -> float:
    """``x f1(x)`` above ``c_nu``, frozen at its value at ``c_nu`` below.

    Convex; its conjugate is ``v -> -theta_0(-v)``.
    """
    c = c_nu(mix)
    if x > c:
        return x * f1_of_b(x, mix)
    if c <= 0.0:
        # nu' = 2: the flat part degenerates to the limit b -> 0
        return 0.0
    return c * f1_of_b(c, mix)


def duality_value(u: float, mix: Mixture) -> tuple[float, float]:
    """``min_{b >= c_nu} (u b + b f1(b))`` and its minimiser."""
    c = c_nu(mix)
    lo = max(c, 1e-12)

    def h(b: float) -> float:
        return u * b + b * f1_of_b(b, mix)

    hi = max(4.0, 4.0 * lo)
    while h(2.0 * hi) < h(hi):
        hi *= 2.0
    res = optimize.minimize_scalar(h, bounds=(lo, 2.0 * hi), method="bounded", options={"xatol": 1e-13})
    b, v = float(res.x), float(res.fun)
    if h(lo) < v:
        b, v = lo, h(lo)
    return v, b


def b_star_plus(u: float, mix: Mixture) -> float:
    n1 = mix.nu_prime
    return (-u * (n1 - 2.0) + math.sqrt(n1) * math.sqrt(4.0 - 4.0 * n1 + u * u * n1)) / (2.0 * (n1 - 1.0))


def psi(v: float, mix: Mixture) -> float:
    """Conjugate of :func:`g1` by direct one-dimensional maximisation."""
    val, _ = duality_value(-v, mix)
    return -val


@dataclass(frozen=True)
class DualityReport:
    max_residual: float
    worst_u: float
    points: int

    def as_dict(self) -> dict:
        return {"max_residual": self.max_residual, "worst_u": self.worst_u, "points": self.points}


def duality_check(mix: Mixture, us) -> DualityReport:
    """Compare ``theta_0(u)`` with the transform of ``f1`` on energies below ``-E_inf``."""
    e_inf = profile(mix).e_inf
    worst, worst_u, count = 0.0, math.nan, 0
    for u in us:
        u = float(u)
        if u >= -e_inf:
            continue
        r = abs(theta0_closed(u, mix) - duality_value(u, mix)[0])
        count += 1
        if r >= worst:
            worst, worst_u = r, u
    return DualityReport(max_residual=worst, worst_u=worst_u, points=count)


# ---------------------------------------------------------------------------
# f1 versus the lowest critical energy


class Verdict(str, enum.Enum):
    EQUAL = "Equal"
    LESS = "Less"
    GREATER = "Greater"


@dataclass(frozen=True)
class F1Report:
    nu_prime: float
    nu_double: float
    mixture_class: MixtureClass
    f1: float
    E0: float
    gap: float
    verdict: Verdict

    def as_dict(self) -> dict:
        return {
            "nu_prime": self.nu_prime,
            "nu_double": self.nu_double,
            "class": self.mixture_class.value,
            "f1": self.f1,
            "E0": self.E0,
            "gap": self.gap,
            "verdict": self.verdict.value,
        }


def compare_f1_E0(mix: Mixture, tol: float = EQUAL_TOL, check: bool = True) -> F1Report:
    """Contrast ``f1`` with ``E_0``; they coincide unless the mixture is full.

    Raises:
        InconsistentClassification: when ``check`` is set and the verdict
            disagrees with the class.
    """
    prof = profile(mix)
    f = f1(mix)
    e0 = E_k(0, mix)
    gap = e0 - f
    if abs(gap) < tol:
        verdict = Verdict.EQUAL
    elif f < e0:
        verdict = Verdict.LESS
    else:
        verdict = Verdict.GREATER
    expected = Verdict.LESS if prof.mixture_class is MixtureClass.FULL_MIXTURE else Verdict.EQUAL
    if check and verdict is not expected:
        raise InconsistentClassification(
            f"class {prof.mixture_class.value} but f1={f!r}, E0={e0!r} ({verdict.value})"
        )
    return F1Report(
        nu_prime=prof.nu_prime,
        nu_double=prof.nu_double,
        mixture_class=prof.mixture_class,
        f1=f,
        E0=e0,
        gap=gap,
        verdict=verdict,
    )


__all__ = [
    "F1_two_atom",
    "TwoAtomState",
    "minimize_two_atom",
    "f1_of_b",
    "a_of_b",
    "f1",
    "f1_value",
    "ZeroTempState",
    "zero_temp_optimum",
    "f1_grid_search",
    "c_nu",
    "g1",
    "psi",
    "duality_value",
    "duality_check",
    "b_star_plus",
    "compare_f1_E0",
    "F1Report",
    "Verdict",
]
