"""Mixtures of spherical p-spin models and the scalars derived from them.

A mixture is the covariance generator ``nu(t) = sum_p w_p t**p`` with
``w_p`` the squared coupling of the p-spin component.  Everything the
landscape formulas need is a function of ``nu'(1)`` and ``nu''(1)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DomainError,
    DuplicateDegree,
    MixtureError,
    MixtureParseError,
    NoCriticalWeight,
    NonPositiveWeight,
    NotNormalized,
)

NORMALIZATION_TOL = 1e-9
CLASS_TOL = 1e-12


class MixtureClass(str, enum.Enum):
    PURE_LIKE = "PureLike"
    CRITICAL = "Critical"
    FULL_MIXTURE = "FullMixture"


@dataclass(frozen=True)
class Mixture:
    """Finite-support mixture; ``terms`` holds ``(degree, weight)`` sorted by degree."""

    terms: tuple[tuple[int, float], ...]

    @property
    def degrees(self) -> np.ndarray:
        return np.array([p for p, _ in self.terms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.terms], dtype=float)

    @property
    def nu_prime(self) -> float:
        return float(sum(w * p for p, w in self.terms))

    @property
    def nu_double(self) -> float:
        return float(sum(w * p * (p - 1) for p, w in self.terms))

    @property
    def alpha2(self) -> float:
        # Variance of the degree under the weights.  Computed from centred
        # moments so that single-term mixtures give exactly zero.
        mean = self.nu_prime
        return float(sum(w * (p - mean) ** 2 for p, w in self.terms))

    @property
    def is_pure(self) -> bool:
        return len(self.terms) == 1

    def __str__(self) -> str:
        return format_mixture(self)


def make_mixture(terms: Iterable[tuple[int, float]], normalize: bool = False) -> Mixture:
    """Validate ``(degree, weight)`` pairs and build a :class:`Mixture`.

    Args:
        terms: pairs ``(p, w)`` with integer ``p >= 2`` and ``w > 0``.
        normalize: rescale weights to sum to one instead of rejecting.

    Raises:
        DuplicateDegree: a degree appears twice.
        NonPositiveWeight: some weight is not strictly positive.
        NotNormalized: weights do not sum to one and ``normalize`` is off.
    """
    pairs = list(terms)
    if not pairs:
        raise MixtureError("mixture needs at least one term")
    seen: set[int] = set()
    clean = []
    for p, w in pairs:
        if isinstance(p, float) and not p.is_integer():
            raise MixtureError(f"degree must be an integer, got {p}")
        p = int(p)
        if p < 2:
            raise MixtureError(f"degree must be >= 2, got {p}")
        if p in seen:
            raise DuplicateDegree(f"degree {p} appears more than once")
        seen.add(p)
        w = float(w)
        if not math.isfinite(w) or w <= 0.0:
            raise NonPositiveWeight(f"weight for degree {p} must be > 0, got {w}")
        clean.append((p, w))
    total = math.fsum(w for _, w in clean)
    if normalize:
        clean = [(p, w / total) for p, w in clean]
    elif abs(total - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"weights sum to {total!r}, expected 1")
    clean.sort()
    return Mixture(tuple(clean))


def parse_mixture(text: str, normalize: bool = False) -> Mixture:
    """Parse ``"2:0.9,10:0.1"`` into a mixture.

    Any failure, syntactic or semantic, surfaces as :class:`MixtureParseError`
    chained to the underlying cause.
    """
    terms = []
    try:
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                raise ValueError("empty term")
            p_txt, sep, w_txt = chunk.partition(":")
            if not sep:
                raise ValueError(f"term {chunk!r} is not of the form p:weight")
            terms.append((int(p_txt), float(w_txt)))
        return make_mixture(terms, normalize=normalize)
    except (ValueError, MixtureError) as exc:
        raise MixtureParseError(f"bad mixture {text!r}: {exc}") from exc


def format_mixture(m: Mixture) -> str:
    return ",".join(f"{p}:{w!r}" for p, w in m.terms)


def eval_nu(m: Mixture, t):
    """Evaluate ``nu(t)``; accepts scalars or arrays."""
    t_arr = np.asarray(t, dtype=float)
    out = np.zeros_like(t_arr)
    for p, w in m.terms:
        out = out + w * t_arr**p
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Thresholds.  All are functions of (nu', nu'') only; the two-argument forms
# are public so that callers can sweep nu'' at fixed nu'.


def _alpha2(n1: float, n2: float) -> float:
    return n2 + n1 - n1 * n1


def e_inf_prime_of(n1: float, n2: float) -> float:
    return 2.0 * n1 * math.sqrt(n2) / (n1 + n2)


def e_inf_of(n1: float, n2: float) -> float:
    return (n2 - n1 + n1 * n1) / (n1 * math.sqrt(n2))


def e_inf_pm_of(n1: float, n2: float) -> tuple[float, float]:
    """Zeros of the quadratic branch of the minimum complexity, as energies.

    Returns ``(E_minus, E_plus)`` with ``E_minus <= E_plus``.
    """
    a2 = max(_alpha2(n1, n2), 0.0)
    disc = 4.0 * n2 * n1 * n1 - (n2 + n1) * (
        2.0 * (n2 - n1 + n1 * n1) - a2 * math.log(n2 / n1)
    )
    root = math.sqrt(max(disc, 0.0))
    centre = 2.0 * n1 * math.sqrt(n2)
    return (centre - root) / (n1 + n2), (centre + root) / (n1 + n2)


def sigma_of(n1: float, n2: float) -> float:
    return 0.5 * math.log(n2 / n1) - (n2 - n1) / (n2 + n1)


def g_of(n1: float, n2: float) -> float:
    """Classification function; positive for pure-like mixtures."""
    return math.log(n2 / n1) - (n2 - n1) * (n2 - n1 + n1 * n1) / (n2 * n1 * n1)


def classify_g(g: float, tol: float = CLASS_TOL) -> MixtureClass:
    if g > tol:
        return MixtureClass.PURE_LIKE
    if g < -tol:
        return MixtureClass.FULL_MIXTURE
    return MixtureClass.CRITICAL


@dataclass(frozen=True)
class MixtureProfile:
    nu_prime: float
    nu_double: float
    alpha2: float
    e_inf: float
    e_inf_prime: float
    e_inf_minus: float
    e_inf_plus: float
    sigma: float
    g_value: float
    mixture_class: MixtureClass

    def as_dict(self) -> dict:
        return {
            "nu_prime": self.nu_prime,
            "nu_double": self.nu_double,
            "alpha2": self.alpha2,
            "e_inf": self.e_inf,
            "e_inf_prime": self.e_inf_prime,
            "e_inf_minus": self.e_inf_minus,
            "e_inf_plus": self.e_inf_plus,
            "sigma": self.sigma,
            "G": self.g_value,
            "class": self.mixture_class.value,
        }


def profile(m: Mixture) -> MixtureProfile:
    n1, n2 = m.nu_prime, m.nu_double
    a2 = m.alpha2
    if m.is_pure:
        # Every threshold collapses to the same value; use the shared form so
        # that the equalities hold bit for bit.
        e = e_inf_prime_of(n1, n2)
        e_minus = e_plus = e_inf = e
    else:
        e = e_inf_prime_of(n1, n2)
        e_inf = e_inf_of(n1, n2)
        e_minus, e_plus = e_inf_pm_of(n1, n2)
    g = g_of(n1, n2)
    return MixtureProfile(
        nu_prime=n1,
        nu_double=n2,
        alpha2=a2,
        e_inf=e_inf,
        e_inf_prime=e,
        e_inf_minus=e_minus,
        e_inf_plus=e_plus,
        sigma=sigma_of(n1, n2),
        g_value=g,
        mixture_class=classify_g(g),
    )


def sigma_total(m: Mixture) -> float:
    return sigma_of(m.nu_prime, m.nu_double)


def two_spin_family(mu: float, p: int) -> Mixture:
    """The mixture ``mu t^2 + (1 - mu) t^p``."""
    if mu <= 0.0:
        return make_mixture([(p, 1.0)])
    if mu >= 1.0:
        return make_mixture([(2, 1.0)])
    return make_mixture([(2, mu), (p, 1.0 - mu)], normalize=True)


def _family_g(mu: float, p: int) -> float:
    # nu' and nu'' are affine in mu, so skip building a Mixture.
    n1 = 2.0 * mu + p * (1.0 - mu)
    n2 = 2.0 * mu + p * (p - 1.0) * (1.0 - mu)
    return g_of(n1, n2)


def mu_critical(p: int, tol: float = 1e-10, scan: int = 2000) -> float:
    """Weight of the quadratic term where ``mu t^2 + (1-mu) t^p`` turns critical.

    The family is pure-like for small ``mu`` and becomes a full mixture past
    the returned value.  Found by a sign-change scan followed by bisection.

    Raises:
        NoCriticalWeight: for ``p == 3`` the family is pure-like for all weights.
        DomainError: for ``p < 3``.
    """
    if p < 3:
        raise DomainError("p must be at least 3")
    if p == 3:
        raise NoCriticalWeight("mu t^2 + (1-mu) t^3 is pure-like for every mu")
    grid = np.linspace(0.0, 1.0, scan + 1)[1:-1]
    vals = np.array([_family_g(mu, p) for mu in grid])
    flips = np.nonzero((vals[:-1] > 0) & (vals[1:] <= 0))[0]
    if flips.size == 0:
        raise NoCriticalWeight(f"no sign change found for p={p}")
    lo, hi = float(grid[flips[0]]), float(grid[flips[0] + 1])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _family_g(mid, p) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def random_mixture(rng: np.random.Generator, max_degree: int = 12, max_terms: int = 4) -> Mixture:
    """Draw a genuine (at least two-term) mixture; used by sweeps and tests."""
    k = int(rng.integers(2, max_terms + 1))
    degrees = rng.choice(np.arange(2, max_degree + 1), size=k, replace=False)
    weights = rng.uniform(0.05, 1.0, size=k)
    return make_mixture(zip(degrees.tolist(), weights.tolist()), normalize=True)


def as_mixture(obj: Mixture | str | Sequence[tuple[int, float]]) -> Mixture:
    if isinstance(obj, Mixture):
        return obj
    if isinstance(obj, str):
        return parse_mixture(obj)
    return make_mixture(obj)
