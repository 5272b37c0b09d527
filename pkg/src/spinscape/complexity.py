"""Annealed complexity of critical points for mixed spherical models.

Energies ``u`` are per-site values of the Hamiltonian.  Exponents are the
limits of ``(1/N) log E[#critical points]`` at energy density ``u``: with a
fixed index ``k``, with index proportional to ``N`` (``gamma``), or summed
over all indices.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import optimize

from .errors import BracketFailure, DomainError, PureMixture
from .mixture import Mixture, e_inf_of, e_inf_prime_of, e_inf_pm_of, profile, MixtureClass

SQRT2 = math.sqrt(2.0)
ROOT_TOL = 1e-10

IndexSpec = Union[int, float, str]


def I1(x: float) -> float:
    """``int_{sqrt 2}^{x} sqrt(z^2 - 2) dz`` in closed form.

    Raises:
        DomainError: if ``x < sqrt(2)`` by more than rounding noise.
    """
    if x < SQRT2:
        if x < SQRT2 * (1.0 - 1e-14):
            raise DomainError(f"I1 needs x >= sqrt(2), got {x}")
        return 0.0
    # With x = sqrt(2) cosh(t) the integral is sinh(2t)/2 - t; this avoids
    # the cancellation in the log form near the lower limit.
    t = math.acosh(x / SQRT2)
    return 0.5 * math.sinh(2.0 * t) - t


def _check_mixed(m: Mixture) -> None:
    if m.is_pure:
        raise PureMixture("operation needs a mixture with more than one term")


def _F(n1: float, n2: float, a2: float, lam, y):
    return 0.5 * (
        -(n2 + n1) / a2 * y * y
        + 2.0 * math.sqrt(2.0 * n2) * n1 / a2 * lam * y
        - (n2 - n1 + n1 * n1) / a2 * lam * lam
    )


def F_exponent(lam: float, y: float, m: Mixture) -> float:
    """Quadratic exponent of the joint energy / shifted-eigenvalue density."""
    _check_mixed(m)
    return float(_F(m.nu_prime, m.nu_double, m.alpha2, lam, y))


def x_of_lambda(lam: float, m: Mixture) -> float:
    """Energy maximising ``F(lam, .)``."""
    n1, n2 = m.nu_prime, m.nu_double
    return n1 * math.sqrt(2.0 * n2) * lam / (n2 + n1)


@dataclass(frozen=True)
class LambdaStar:
    value: float
    bracket: tuple[float, float]
    residual: float


def _offset_equation(c: float, bc: float, kk: float, t: float) -> float:
    # The defining equation in t = -lam - sqrt(2) >= 0; no cancellation near t = 0.
    return c + bc * t + kk * math.sqrt(t * (t + 2.0 * SQRT2))


def lambda_star(k: int, u: float, m: Mixture) -> LambdaStar:
    """Optimal shifted eigenvalue below the bottom threshold.

    Solves ``A - B lam + (k+1) sqrt(lam^2 - 2) = 0`` on ``(lam_c, -sqrt 2]``.
    The equation is rewritten in the offset ``t = -lam - sqrt 2``, where it is
    strictly increasing, and the root of the squared quadratic is kept if it
    satisfies the unsquared form.  Falls back to bisection otherwise.
    """
    _check_mixed(m)
    if k < 0:
        raise DomainError("index must be non-negative")
    n1, n2, a2 = m.nu_prime, m.nu_double, m.alpha2
    e_inf = e_inf_of(n1, n2)
    if u >= -e_inf:
        raise DomainError(f"lambda_star needs u < -E_inf = {-e_inf}")
    bc = (n2 - n1 + n1 * n1) / a2
    kk = float(k + 1)
    c = SQRT2 * (n1 * math.sqrt(n2) * u + (n2 - n1 + n1 * n1)) / a2
    lam_c = n1 * math.sqrt(2.0 * n2) * u / a2 / bc
    t_max = -lam_c - SQRT2
    scale = max(1.0, abs(bc * lam_c))

    def resid(t: float) -> float:
        return _offset_equation(c, bc, kk, t)

    # (c + bc t)^2 = kk^2 t (t + 2 sqrt 2)
    qa = bc * bc - kk * kk
    qb = 2.0 * c * bc - 2.0 * SQRT2 * kk * kk
    qc = c * c
    candidates = []
    if abs(qa) > 1e-14 * max(bc * bc, 1.0):
        disc = qb * qb - 4.0 * qa * qc
        if disc >= 0.0:
            q = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
            candidates = [q / qa, qc / q if q != 0.0 else math.nan]
    elif qb != 0.0:
        candidates = [-qc / qb]
    best = None
    for t in candidates:
        if math.isfinite(t) and 0.0 <= t <= t_max and abs(resid(t)) <= 1e-13 * scale:
            if best is None or abs(resid(t)) < abs(resid(best)):
                best = t
    if best is None:
        if not (resid(0.0) < 0.0 < resid(t_max)):
            raise BracketFailure(f"no sign change on [{lam_c}, {-SQRT2}] for k={k}, u={u}")
        best = optimize.brentq(resid, 0.0, t_max, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    return LambdaStar(value=float(-SQRT2 - best), bracket=(lam_c, -SQRT2), residual=abs(resid(best)))


def _theta_pure(k: int, u: float, n1: float, n2: float) -> float:
    # Limit of the mixed formula as the degree variance goes to zero.
    e = e_inf_prime_of(n1, n2)
    if u <= -e * (1.0 - 1e-14):
        arg = -u * math.sqrt(n1 / (2.0 * (n1 - 1.0)))
        return (
            0.5 * math.log(n1 - 1.0)
            - u * u * (n1 - 2.0) / (4.0 * (n1 - 1.0))
            - (k + 1) * I1(max(arg, SQRT2))
        )
    return -math.inf


def theta_k(k: int, u: float, m: Mixture) -> float:
    """Complexity of index-``k`` critical points at energy ``u``."""
    if k < 0:
        raise DomainError("index must be non-negative")
    n1, n2 = m.nu_prime, m.nu_double
    if m.is_pure:
        return _theta_pure(k, u, n1, n2)
    a2 = m.alpha2
    base = 0.5 * math.log(n2 / n1)
    if u >= -e_inf_of(n1, n2):
        return base + float(_F(n1, n2, a2, -SQRT2, u))
    lam = lambda_star(k, u, m).value
    return base + float(_F(n1, n2, a2, lam, u)) - (k + 1) * I1(-lam)


def theta0_closed(u: float, m: Mixture) -> float:
    """Two-branch closed form of the minima complexity.

    Below the bottom threshold it depends on ``nu'`` alone.
    """
    n1, n2 = m.nu_prime, m.nu_double
    if m.is_pure:
        return _theta_pure(0, u, n1, n2)
    if u <= -e_inf_of(n1, n2):
        arg = -u * n1 / math.sqrt(2.0 * n1 * (n1 - 1.0))
        return (
            0.5 * math.log(n1 - 1.0)
            - u * u * (n1 - 2.0) / (4.0 * (n1 - 1.0))
            - I1(max(arg, SQRT2))
        )
    return 0.5 * math.log(n2 / n1) + float(_F(n1, n2, m.alpha2, -SQRT2, u))


@dataclass(frozen=True)
class SemicircleQuantile:
    gamma: float
    s: float


def semicircle_cdf(s):
    """CDF of the density ``sqrt(2 - x^2)/pi`` on ``[-sqrt 2, sqrt 2]``."""
    s = np.clip(np.asarray(s, dtype=float), -SQRT2, SQRT2)
    out = (s * np.sqrt(np.maximum(2.0 - s * s, 0.0)) / 2.0 + np.arcsin(s / SQRT2) + np.pi / 2.0) / np.pi
    return float(out) if out.ndim == 0 else out


def s_gamma(gamma: float) -> SemicircleQuantile:
    """Semicircle quantile: ``P(X <= s) = gamma``."""
    if not 0.0 < gamma < 1.0:
        raise DomainError("gamma must lie in (0, 1)")
    if gamma == 0.5:
        return SemicircleQuantile(gamma, 0.0)
    s = optimize.bisect(lambda x: semicircle_cdf(x) - gamma, -SQRT2, SQRT2, xtol=1e-14)
    return SemicircleQuantile(gamma, float(s))


def gamma_of_s(s: float) -> float:
    return semicircle_cdf(s)


def theta_gamma(gamma: float, u: float, m: Mixture) -> float:
    """Complexity of critical points whose index is a fraction ``gamma`` of ``N``."""
    _check_mixed(m)
    s = s_gamma(gamma).s
    return 0.5 * math.log(m.nu_double / m.nu_prime) + F_exponent(s, u, m)


def theta_total(u: float, m: Mixture) -> float:
    """Total complexity at energy ``u`` (minima / fractional index / maxima).

    Inside ``(-E'_inf, E'_inf)`` the dominant index fraction is the one whose
    semicircle quantile equals ``sqrt(2) u / E'_inf``.
    """
    n1, n2 = m.nu_prime, m.nu_double
    ep = e_inf_prime_of(n1, n2)
    if u <= -ep:
        return theta_k(0, u, m)
    if u >= ep:
        return theta_k(0, -u, m)
    _check_mixed(m)
    s = SQRT2 * u / ep
    return 0.5 * math.log(n2 / n1) + float(_F(n1, n2, m.alpha2, s, u))


def theta_gamma_sup(u: float, m: Mixture) -> tuple[float, float]:
    """Supremum over ``gamma`` of :func:`theta_gamma` and its quantile location.

    The quadratic in ``s`` peaks at ``s = sqrt(2) u / E_inf``; if that falls
    outside the semicircle support the supremum sits at the nearer edge.
    Returns ``(value, s_at_max)``.
    """
    _check_mixed(m)
    n1, n2, a2 = m.nu_prime, m.nu_double, m.alpha2
    s = SQRT2 * u / e_inf_of(n1, n2)
    s = min(max(s, -SQRT2), SQRT2)
    return 0.5 * math.log(n2 / n1) + float(_F(n1, n2, a2, s, u)), s


def theta_total_closed_mid(u: float, m: Mixture) -> float:
    """``1/2 (log(nu''/nu') - (nu''-nu') u^2 / (nu'^2 - nu' + nu''))``."""
    n1, n2 = m.nu_prime, m.nu_double
    return 0.5 * (math.log(n2 / n1) - (n2 - n1) * u * u / (n1 * n1 - n1 + n2))


def E_k(k: int, m: Mixture, tol: float = ROOT_TOL) -> float:
    """Energy of the lowest index-``k`` critical points (smallest zero of ``theta_k``)."""
    prof = profile(m)
    if prof.mixture_class is not MixtureClass.PURE_LIKE:
        return prof.e_inf_plus
    lo = prof.e_inf
    hi = max(2.0 * lo, lo + 1.0)
    while theta_k(k, -hi, m) >= 0.0:
        hi *= 2.0
        if hi > 1e6:
            raise BracketFailure("theta_k does not become negative")
    if theta_k(k, -lo, m) <= 0.0:
        return lo
    return float(optimize.bisect(lambda e: theta_k(k, -e, m), lo, hi, xtol=tol))


def variational_objective(k: int, x: float, lam: float, m: Mixture) -> float:
    """Large-deviation objective for minima of index ``k``, before maximisation."""
    n1, n2, a2 = m.nu_prime, m.nu_double, m.alpha2
    val = (
        -x * x
        + lam * lam
        - (n1 * x - math.sqrt(2.0 * n2) * lam) ** 2 / a2
        - 2.0 * (k + 1) * I1(-lam)
    )
    return 0.5 * (math.log(n2 / n1) + val)


def variational_oracle(k: int, u: float, m: Mixture, grid: int = 201) -> float:
    """Brute-force maximisation over ``x <= u, lam <= -sqrt 2``.

    A coarse grid locates the basin; bounded quasi-Newton polishes it.  The
    result is the supremum over energies up to ``u``, which coincides with
    ``theta_k(u)`` while ``theta_k`` is still increasing.
    """
    _check_mixed(m)
    n1, n2 = m.nu_prime, m.nu_double
    span = max(4.0, 3.0 * abs(u), 3.0 * e_inf_of(n1, n2))
    xs = u - np.linspace(0.0, span, grid)
    ls = -SQRT2 - np.linspace(0.0, span, grid)
    X, L = np.meshgrid(xs, ls, indexing="ij")
    a2 = m.alpha2
    t = np.arccosh(-L / SQRT2)
    i1 = 0.5 * np.sinh(2.0 * t) - t
    vals = 0.5 * (
        math.log(n2 / n1)
        + (-X * X + L * L - (n1 * X - math.sqrt(2.0 * n2) * L) ** 2 / a2 - 2.0 * (k + 1) * i1)
    )
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    best = float(vals[i, j])
    start = np.array([xs[i], ls[j]])

    def neg(z: np.ndarray) -> float:
        return -variational_objective(k, float(z[0]), float(z[1]), m)

    res = optimize.minimize(
        neg,
        start,
        method="L-BFGS-B",
        bounds=[(None, u), (None, -SQRT2)],
        options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 500},
    )
    best = max(best, -float(res.fun))
    # Corners where one constraint is active get a 1-D polish each.
    r1 = optimize.minimize_scalar(
        lambda lam: -variational_objective(k, u, lam, m),
        bounds=(-SQRT2 - span, -SQRT2),
        method="bounded",
        options={"xatol": 1e-12},
    )
    r2 = optimize.minimize_scalar(
        lambda x: -variational_objective(k, x, -SQRT2, m),
        bounds=(u - span, u),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return max(best, -float(r1.fun), -float(r2.fun))


@dataclass(frozen=True)
class VanishingExponents:
    above_top_zero: float
    below_bottom_zero: float


def vanishing_exponent(k: int, eps: float, m: Mixture) -> VanishingExponents:
    """Decay exponents just outside the two zeros of ``theta_k``."""
    if eps <= 0.0:
        raise DomainError("eps must be positive")
    prof = profile(m)
    upper = theta_k(k, -prof.e_inf_minus + eps, m)
    lower = theta_k(k, -E_k(k, m) - eps, m)
    return VanishingExponents(above_top_zero=upper, below_bottom_zero=lower)


# ---------------------------------------------------------------------------
# Curves


REGIME_BELOW = "below_Einf"
REGIME_MID = "mid"
REGIME_ABOVE = "above_Einfprime"


def regime_of(u: float, m: Mixture) -> str:
    n1, n2 = m.nu_prime, m.nu_double
    if u < -(e_inf_of(n1, n2) if not m.is_pure else e_inf_prime_of(n1, n2)):
        return REGIME_BELOW
    if u <= -e_inf_prime_of(n1, n2):
        return REGIME_MID
    return REGIME_ABOVE


@dataclass
class ComplexityCurve:
    index: IndexSpec
    points: list[tuple[float, float]] = field(default_factory=list)
    regimes: list[str] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u", "theta", "regime"])
        for (u, th), r in zip(self.points, self.regimes):
            w.writerow([repr(float(u)), repr(float(th)), r])
        return buf.getvalue()


def parse_index(spec: IndexSpec) -> IndexSpec:
    """Normalise an index spec: int ``k``, float ``gamma`` in (0,1), or ``"total"``."""
    if isinstance(spec, str):
        if spec.lower() == "total":
            return "total"
        if "." in spec:
            return parse_index(float(spec))
        return parse_index(int(spec))
    if isinstance(spec, (bool, np.bool_)):
        raise DomainError("bad index spec")
    if isinstance(spec, (int, np.integer)):
        if spec < 0:
            raise DomainError("index must be non-negative")
        return int(spec)
    g = float(spec)
    if not 0.0 < g < 1.0:
        raise DomainError("fractional index must lie in (0, 1)")
    return g


def theta_for(index: IndexSpec, u: float, m: Mixture) -> float:
    index = parse_index(index)
    if index == "total":
        return theta_total(u, m)
    if isinstance(index, int):
        return theta_k(index, u, m)
    return theta_gamma(index, u, m)


def complexity_curve(index: IndexSpec, us: Sequence[float] | Iterable[float], m: Mixture) -> ComplexityCurve:
    index = parse_index(index)
    curve = ComplexityCurve(index=index)
    for u in us:
        u = float(u)
        curve.points.append((u, theta_for(index, u, m)))
        curve.regimes.append(regime_of(u, m))
    return curve


__all__ = [
    "I1",
    "F_exponent",
    "LambdaStar",
    "lambda_star",
    "theta_k",
    "theta0_closed",
    "SemicircleQuantile",
    "semicircle_cdf",
    "s_gamma",
    "theta_gamma",
    "theta_gamma_sup",
    "theta_total",
    "theta_total_closed_mid",
    "E_k",
    "variational_objective",
    "variational_oracle",
    "vanishing_exponent",
    "ComplexityCurve",
    "complexity_curve",
    "e_inf_pm_of",
]
