"""Hermite functions and the mean Euler characteristic of sublevel sets.

The sublevel set is ``A_u = {sigma : H(sigma) <= N u}`` on the sphere of
radius ``sqrt(N)``.  Its mean Euler characteristic is an explicit double
integral against the Hermite function of degree ``N - 1``; it is
exponentially large and changes sign ``O(N)`` times inside the window
``(-E'_inf, E'_inf)``.  Magnitudes are carried as :class:`SignedLog`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from ._parallel import chunk_rng, chunk_sizes, run_chunks
from .complexity import I1, theta_total
from .errors import DomainError, EdgeRegion, EdgeWindow, PureMixture
from .goe import goe_matrix
from .mixture import Mixture, e_inf_prime_of

SQRT2 = math.sqrt(2.0)
EDGE_DELTA = 0.1
WINDOW_MARGIN = 0.05
TRUNCATION = 40.0
WIDTH = 60.0
STEPS_PER_PERIOD = 10
NODES = 16
_RESCALE = 1e100


# ---------------------------------------------------------------------------
# Signed log arithmetic


@dataclass(frozen=True)
class SignedLog:
    """``sign * exp(log_abs)``; ``sign == 0`` encodes zero with ``log_abs = -inf``."""

    sign: int
    log_abs: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise DomainError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.sign == 0 and self.log_abs != -math.inf:
            object.__setattr__(self, "log_abs", -math.inf)
        if self.sign != 0 and self.log_abs == -math.inf:
            object.__setattr__(self, "sign", 0)

    @classmethod
    def from_float(cls, x: float) -> "SignedLog":
        if x == 0.0:
            return cls(0, -math.inf)
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def zero(cls) -> "SignedLog":
        return cls(0, -math.inf)

    def to_float(self) -> float:
        return self.sign * math.exp(self.log_abs) if self.sign else 0.0

    def __neg__(self) -> "SignedLog":
        return SignedLog(-self.sign, self.log_abs)

    def __mul__(self, other: "SignedLog | float") -> "SignedLog":
        other = _as_signed_log(other)
        if self.sign == 0 or other.sign == 0:
            return SignedLog.zero()
        return SignedLog(self.sign * other.sign, self.log_abs + other.log_abs)

    __rmul__ = __mul__

    def __truediv__(self, other: "SignedLog | float") -> "SignedLog":
        other = _as_signed_log(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLog")
        return self * SignedLog(other.sign, -other.log_abs)

    def __add__(self, other: "SignedLog | float") -> "SignedLog":
        other = _as_signed_log(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.log_abs >= other.log_abs else (other, self)
        ratio = math.exp(lo.log_abs - hi.log_abs)
        if hi.sign == lo.sign:
            return SignedLog(hi.sign, hi.log_abs + math.log1p(ratio))
        if ratio == 1.0:
            return SignedLog.zero()
        return SignedLog(hi.sign, hi.log_abs + math.log1p(-ratio))

    __radd__ = __add__

    def __sub__(self, other: "SignedLog | float") -> "SignedLog":
        return self + (-_as_signed_log(other))

    def __rsub__(self, other: "SignedLog | float") -> "SignedLog":
        return _as_signed_log(other) - self

    def as_dict(self) -> dict:
        return {"sign": self.sign, "log_abs": self.log_abs}


def _as_signed_log(x) -> SignedLog:
    return x if isinstance(x, SignedLog) else SignedLog.from_float(float(x))


# ---------------------------------------------------------------------------
# Hermite polynomials and functions


def hermite_h(j: int, x: float) -> SignedLog:
    """Physicists' Hermite polynomial ``h_j(x)`` by the three-term recurrence."""
    if j < 0:
        raise DomainError("degree must be non-negative")
    x = float(x)
    prev, cur, scale = 1.0, 2.0 * x, 0.0
    if j == 0:
        return SignedLog.from_float(1.0)
    for i in range(1, j):
        prev, cur = cur, 2.0 * x * cur - 2.0 * i * prev
        if abs(cur) > _RESCALE:
            s = abs(cur)
            prev, cur, scale = prev / s, cur / s, scale + math.log(s)
    out = SignedLog.from_float(cur)
    return SignedLog(out.sign, out.log_abs + scale) if out.sign else out


def _phi_log(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``phi_n(x) = v * exp(ls)`` elementwise, with ``v`` kept below ``1e100``."""
    x = np.asarray(x, dtype=float)
    pm = np.full_like(x, math.pi**-0.25)
    ls = -0.5 * x * x
    if n == 0:
        return pm, ls
    pc = SQRT2 * x * pm
    for j in range(1, n):
        pm, pc = pc, x * math.sqrt(2.0 / (j + 1)) * pc - math.sqrt(j / (j + 1)) * pm
        big = np.abs(pc) > _RESCALE
        if np.any(big):
            s = np.where(big, np.abs(pc), 1.0)
            pc, pm, ls = pc / s, pm / s, ls + np.log(s)
    return pc, ls


def phi_signed_log(n: int, x) -> tuple[np.ndarray, np.ndarray]:
    """Sign and log-magnitude of ``phi_n(x)``; the log is ``-inf`` at zeros."""
    v, ls = _phi_log(n, x)
    with np.errstate(divide="ignore"):
        return np.sign(v), ls + np.log(np.abs(v))


@dataclass(frozen=True)
class HermiteEval:
    """``phi_j(x) = phi * exp(log_scale)``; ``log_scale`` is zero unless the value underflows."""

    j: int
    x: float
    phi: float
    log_scale: float

    @property
    def value(self) -> float:
        return self.phi * math.exp(self.log_scale)

    def as_signed_log(self) -> SignedLog:
        return SignedLog.from_float(self.phi) * SignedLog(1, self.log_scale)


def hermite_phi(j: int, x: float) -> HermiteEval:
    """Normalised Hermite function ``(2^j j! sqrt(pi))^(-1/2) h_j(x) exp(-x^2/2)``."""
    if j < 0:
        raise DomainError("degree must be non-negative")
    v, ls = _phi_log(j, np.array([float(x)]))
    v, ls = float(v[0]), float(ls[0])
    if v == 0.0:
        return HermiteEval(j, float(x), 0.0, 0.0)
    total = ls + math.log(abs(v))
    if total > -700.0:
        return HermiteEval(j, float(x), math.copysign(math.exp(total), v), 0.0)
    return HermiteEval(j, float(x), math.copysign(1.0, v), total)


# ---------------------------------------------------------------------------
# Determinant identity


@dataclass(frozen=True)
class DetCheck:
    mean: float
    stderr: float
    exact: float
    z: float


def det_identity_check(n: int, x: float, samples: int, seed: int) -> DetCheck:
    """Monte Carlo ``E det(M - x I)`` against ``2^-n n^(-n/2) (-1)^n h_n(sqrt(n) x)``."""
    if not 1 <= n <= 12:
        raise DomainError("det_identity_check supports 1 <= n <= 12")
    if samples < 2:
        raise DomainError("need at least two samples")

    def work(i: int, size: int) -> np.ndarray:
        m = goe_matrix(n, chunk_rng(seed, i), batch=size)
        return np.linalg.det(m - x * np.eye(n))

    dets = np.concatenate(run_chunks(work, chunk_sizes(samples, 65536)))
    exact = (-1) ** n * 2.0**-n * n ** (-n / 2) * hermite_h(n, math.sqrt(n) * x).to_float()
    mean = float(np.mean(dets))
    se = float(np.std(dets, ddof=1) / math.sqrt(dets.size))
    return DetCheck(mean, se, exact, (mean - exact) / se if se > 0 else 0.0)


# ---------------------------------------------------------------------------
# Exact mean Euler characteristic


@dataclass(frozen=True)
class _EulerConstants:
    """Scalars of the one-dimensional representation of the Euler integral."""

    n: int
    s2: float
    A: float
    lam: float
    g: float
    m0: float
    log_const: float


def _log_k(n: int, n1: float, n2: float) -> float:
    d = n1 + n2
    return float(
        0.5 * (n - 1) * math.log(n2 / n1)
        - (n - 1) * math.log(2.0)
        + math.log(n)
        - 0.5 * math.log(math.pi)
        - gammaln(n / 2)
        + 0.5 * ((n - 1) * math.log(2.0) + gammaln(n) + 0.5 * math.log(math.pi))
        + 0.5 * math.log(2.0 * n2)
        - math.log(d)
        + 0.5 * math.log(2.0 * math.pi * d / n)
    )


def _euler_constants(n: int, u: float, mix: Mixture) -> _EulerConstants:
    if n < 2:
        raise DomainError("the Euler characteristic needs n >= 2")
    n1, n2, a2 = mix.nu_prime, mix.nu_double, mix.alpha2
    if mix.is_pure or a2 <= 0.0:
        raise PureMixture("the Euler integral needs a genuine mixture")
    d = n1 + n2
    c = (n2 - n1) / (2.0 * d)
    s2 = a2 * d / (2.0 * n1 * n1 * n2)
    A = 0.5 + c + 0.5 / s2
    lam = 1.0 / (2.0 * s2 * math.sqrt(A * (A - 1.0)))
    g = 0.5 * lam * lam - 0.5 / s2 + 1.0 / (4.0 * A * s2 * s2)
    m0 = -math.sqrt(n) * d * u / (n1 * math.sqrt(2.0 * n2))
    log_pre = (
        -0.5 * math.log(s2)
        - 0.5 * math.log(2.0 * math.pi * n)
        + 0.5 * math.log(math.pi / A)
        + 0.5 * (n - 1) * math.log(1.0 - 1.0 / A)
    )
    return _EulerConstants(n, s2, A, lam, g, m0, log_pre + _log_k(n, n1, n2))


def _panels(lo: float, hi: float, step: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    k = max(int(math.ceil((hi - lo) / step)), 1)
    edges = np.linspace(lo, hi, k + 1)
    xg, wg = leggauss(nodes)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * xg).ravel()
    w = (half[:, None] * wg).ravel()
    return t, w


def _signed_quadrature(w: np.ndarray, sign: np.ndarray, logs: np.ndarray) -> SignedLog:
    top = float(np.max(logs))
    if top == -math.inf:
        return SignedLog.zero()
    s = float(np.sum(w * sign * np.exp(logs - top)))
    return SignedLog.from_float(s) * SignedLog(1, top)


def euler_exact(
    n: int,
    u: float,
    mix: Mixture,
    width: float = WIDTH,
    steps_per_period: int = STEPS_PER_PERIOD,
    nodes: int = NODES,
) -> SignedLog:
    """Mean Euler characteristic of ``{H <= n u}`` by one-dimensional quadrature.

    The inner Gaussian integral is done in closed form after a linear change
    of variables; what remains is a Hermite function against a Gaussian on a
    half line.  The Gaussian is truncated where its log falls ``width`` below
    the peak, and panels resolve the Hermite oscillation ``steps_per_period``
    times.

    Raises:
        PureMixture: for single-term mixtures.
        DomainError: for ``n < 2``.
    """
    k = _euler_constants(n, float(u), mix)
    half_width = math.sqrt(width / -k.g)
    lo, hi = max(k.m0, -half_width), half_width
    if lo >= hi:
        return SignedLog.zero()
    step = math.pi / (steps_per_period * k.lam * math.sqrt(2.0 * n))
    t, w = _panels(lo, hi, step, nodes)
    sign, logs = phi_signed_log(n - 1, -k.lam * t)
    s = _signed_quadrature(w, sign, logs + k.g * t * t)
    parity = SignedLog(1 if (n - 1) % 2 == 0 else -1, k.log_const)
    return s * parity


# ---------------------------------------------------------------------------
# Plancherel-Rotach asymptotics


class Region(str, enum.Enum):
    EXP_LEFT = "ExpLeft"
    OSCILLATORY = "Oscillatory"
    EXP_RIGHT = "ExpRight"


def _h_factor(x: float) -> float:
    ax = abs(x)
    r = abs((ax + SQRT2) / (ax - SQRT2)) ** 0.25
    return r - 1.0 / r


def _bulk_angle(x: float, n: int) -> float:
    return math.acos(math.sqrt(n) * x / math.sqrt(2.0 * n - 1.0))


def _bulk_phase(omega: float, n: int) -> float:
    return (0.5 * n - 0.25) * (math.sin(2.0 * omega) - 2.0 * omega) + 0.75 * math.pi


def _bulk_amplitude(omega: float, n: int) -> float:
    return 2.0**0.25 / math.sqrt(math.pi) * n**-0.25 / math.sqrt(math.sin(omega))


def region_of(x: float, delta: float = EDGE_DELTA) -> Region:
    if abs(abs(x) - SQRT2) < delta:
        raise EdgeRegion(f"x={x} is within {delta} of the spectral edge")
    if x < -SQRT2:
        return Region.EXP_LEFT
    if x > SQRT2:
        return Region.EXP_RIGHT
    return Region.OSCILLATORY


def pr_asymptotic(region: Region | str, x: float, n: int, delta: float = EDGE_DELTA) -> float:
    """Large-``n`` approximation of ``phi_{n-1}(sqrt(n) x)`` in one region.

    The oscillatory form uses the angle ``sqrt(n) x = sqrt(2n - 1) cos(omega)``,
    which absorbs the ``O(1/n)`` phase drift.

    Raises:
        EdgeRegion: within ``delta`` of ``+-sqrt(2)``.
        DomainError: if ``x`` is not in ``region``.
    """
    region = Region(region)
    actual = region_of(x, delta)
    if actual is not region:
        raise DomainError(f"x={x} lies in {actual.value}, not {region.value}")
    if region is Region.OSCILLATORY:
        om = _bulk_angle(x, n)
        return _bulk_amplitude(om, n) * math.sin(_bulk_phase(om, n))
    mag = math.exp(-n * I1(abs(x))) / math.sqrt(4.0 * math.pi * math.sqrt(2.0 * n)) * _h_factor(x)
    if region is Region.EXP_LEFT and (n - 1) % 2:
        return -mag
    return mag


def pr_asymptotic_log(x: float, n: int, delta: float = EDGE_DELTA) -> SignedLog:
    """Same as :func:`pr_asymptotic` in signed-log form, for any non-edge ``x``."""
    region = region_of(x, delta)
    if region is Region.OSCILLATORY:
        return SignedLog.from_float(pr_asymptotic(region, x, n, delta))
    log_mag = -n * I1(abs(x)) - 0.5 * math.log(4.0 * math.pi * math.sqrt(2.0 * n)) + math.log(_h_factor(x))
    sign = -1 if region is Region.EXP_LEFT and (n - 1) % 2 else 1
    return SignedLog(sign, log_mag)


# ---------------------------------------------------------------------------
# Oscillatory integral


class Mode(str, enum.Enum):
    DIRECT = "Direct"
    ASYMPTOTIC = "Asymptotic"


def _envelope(x: np.ndarray, a: float, b: float) -> np.ndarray:
    ax = np.abs(x)
    inner = np.sqrt(np.maximum(ax * ax - 2.0, 0.0))
    edge = 0.5 * (ax * inner + math.log(2.0) - 2.0 * np.log(np.maximum(ax + inner, SQRT2)))
    return a * x * x + b * x + np.where(ax > SQRT2, edge, 0.0)


def _direct_oscillatory(M: float, a: float, b: float, n: int) -> SignedLog:
    grid = np.linspace(M, max(M, 0.0) + 12.0, 24001)
    env = _envelope(grid, a, b)
    i_min = int(np.argmin(env))
    past = np.nonzero(env[i_min:] > env[i_min] + TRUNCATION / n)[0]
    hi = float(grid[i_min + past[0]]) if past.size else float(grid[-1])
    if hi <= M:
        return SignedLog.zero()
    step = math.pi / (STEPS_PER_PERIOD * math.sqrt(2.0 * n))
    t, w = _panels(M, hi, step, NODES)
    sign, logs = phi_signed_log(n - 1, math.sqrt(n) * t)
    return _signed_quadrature(w, sign, logs - n * (a * t * t + b * t))


def oscillatory_amplitude(M: float, a: float, b: float, n: int) -> float:
    """Envelope of the bulk endpoint term; the scale for relative errors."""
    om = _bulk_angle(M, n)
    kappa = complex(-n * (2.0 * a * M + b), math.sqrt(n * (2.0 * n - 1.0)) * math.sin(om))
    return _bulk_amplitude(om, n) * math.exp(-n * (a * M * M + b * M)) / abs(kappa)


def _bulk_endpoint(M: float, a: float, b: float, n: int) -> SignedLog:
    om = _bulk_angle(M, n)
    kappa = complex(-n * (2.0 * a * M + b), math.sqrt(n * (2.0 * n - 1.0)) * math.sin(om))
    phase = complex(math.cos(_bulk_phase(om, n)), math.sin(_bulk_phase(om, n)))
    im = (phase * (-1.0 / kappa)).imag
    return SignedLog.from_float(im) * SignedLog(1, math.log(_bulk_amplitude(om, n)) - n * (a * M * M + b * M))


def _bulk_endpoint_stated(M: float, a: float, b: float, n: int) -> SignedLog:
    # The closed form as printed, kept so tests can show where it departs.
    om = math.acos(M / SQRT2)
    z = 2.0 * om
    dm = complex(-a * math.sin(z) - b / (2.0 * SQRT2) * math.sin(om), -0.5 * (math.cos(z) - 1.0))
    alpha = math.atan((1.0 - a * math.cos(z)) / (2.0 * a * math.sin(z) + b * math.sin(om) / SQRT2))
    amp = 2.0**0.25 / math.sqrt(math.pi) * n**-1.25 / (2.0 * abs(dm) * math.sqrt(math.sin(om)))
    val = math.sin((0.5 * n - 0.25) * (math.sin(z) - z) + 0.75 * math.pi + alpha)
    return SignedLog.from_float(val) * SignedLog(1, math.log(amp) - n * (a * M * M + b * M))


def _exterior_laplace(M: float, a: float, b: float, n: int) -> SignedLog:
    """Leading Laplace term outside the bulk (both sides)."""
    norm = -0.5 * math.log(4.0 * math.pi * math.sqrt(2.0 * n))
    if M > SQRT2:
        slope = 2.0 * a * M + b + math.sqrt(M * M - 2.0)
        log_v = -n * (a * M * M + b * M + I1(M)) + norm + math.log(_h_factor(M)) - math.log(n * slope)
        return SignedLog(1, log_v)
    # Left exterior: minimise a x^2 + b x + I1(-x) over [M, -sqrt(2)].
    grid = np.linspace(M, -SQRT2 - EDGE_DELTA, 4001)
    env = _envelope(grid, a, b)
    i = int(np.argmin(env))
    if i == grid.size - 1:
        raise EdgeRegion("the left-exterior minimum sits at the spectral edge")
    sign = -1 if (n - 1) % 2 else 1
    if i == 0:
        x = M
        slope = 2.0 * a * x + b - math.sqrt(x * x - 2.0)
        if slope <= 0.0:
            raise DomainError("minimum at the lower end requires an increasing exponent there")
        log_v = -n * float(env[0]) + norm + math.log(_h_factor(x)) - math.log(n * slope)
        return SignedLog(sign, log_v)
    res = minimize_scalar(
        lambda x: float(_envelope(np.array([x]), a, b)[0]),
        bounds=(float(grid[i - 1]), float(grid[i + 1])),
        method="bounded",
        options={"xatol": 1e-12},
    )
    x = float(res.x)
    curv = 2.0 * a + abs(x) / math.sqrt(x * x - 2.0)
    log_v = -n * float(res.fun) + norm + math.log(_h_factor(x)) + 0.5 * math.log(2.0 * math.pi / (n * curv))
    return SignedLog(sign, log_v)


def oscillatory_integral(
    M: float, a: float, b: float, n: int, mode: Mode | str = Mode.DIRECT, stated: bool = False
) -> SignedLog:
    """``int_M^inf phi_{n-1}(sqrt(n) x) exp(-n (a x^2 + b x)) dx``.

    ``Direct`` is panel Gauss-Legendre quadrature.  ``Asymptotic`` is the
    leading endpoint (bulk) or Laplace (exterior) term.  ``stated=True``
    selects the published bulk closed form instead of the corrected one.

    Raises:
        DomainError: if ``a <= 1/2`` or ``b < 0``.
        EdgeRegion: asymptotic mode within 0.1 of ``+-sqrt(2)``.
    """
    if not a > 0.5 or b < 0.0:
        raise DomainError("need a > 1/2 and b >= 0")
    mode = Mode(mode)
    if mode is Mode.DIRECT:
        return _direct_oscillatory(float(M), a, b, n)
    region = region_of(M)
    if region is Region.OSCILLATORY:
        return (_bulk_endpoint_stated if stated else _bulk_endpoint)(float(M), a, b, n)
    return _exterior_laplace(float(M), a, b, n)


# ---------------------------------------------------------------------------
# Asymptotic mean Euler characteristic


@dataclass(frozen=True)
class OscillationDescriptor:
    omega: float
    tau: float
    rho: float
    amp: float
    alpha_phase: float
    c_prefactor: SignedLog

    def as_dict(self) -> dict:
        return {
            "omega": self.omega,
            "tau": self.tau,
            "rho": self.rho,
            "amp": self.amp,
            "alpha_phase": self.alpha_phase,
        }


@dataclass(frozen=True)
class EulerAsymptotic:
    """``part`` is 1 (rate only), 2 (oscillating window) or 3 (reflected from ``-u``)."""

    value: SignedLog
    part: int
    rate: float
    descriptor: Optional[OscillationDescriptor] = None


def window_angle(u: float, mix: Mixture) -> float:
    """``omega`` in ``u = -E'_inf cos(omega)``."""
    ep = e_inf_prime_of(mix.nu_prime, mix.nu_double)
    return math.acos(max(-1.0, min(1.0, -u / ep)))


def _window(n: int, u: float, mix: Mixture) -> tuple[SignedLog, OscillationDescriptor]:
    k = _euler_constants(n, u, mix)
    y0 = -k.lam * k.m0
    om = math.acos(y0 / math.sqrt(2.0 * n - 1.0))
    so = math.sin(om)
    tau = 0.5 * (math.sin(2.0 * om) - 2.0 * om)
    amp_bulk = 2.0**0.25 / math.sqrt(math.pi) * n**-0.25 / math.sqrt(so)
    log_gauss = 0.5 * y0 * y0 - k.m0 * k.m0 / (2.0 * k.s2) + (k.m0 / k.s2) ** 2 / (4.0 * k.A)
    slope = k.m0 * (k.lam**2 - 1.0 / k.s2 + 1.0 / (2.0 * k.A * k.s2 * k.s2))
    kappa = complex(slope, -k.lam * math.sqrt(2.0 * n - 1.0) * so)
    alpha = math.atan2((-1.0 / kappa).imag, (-1.0 / kappa).real)
    rho = -0.5 * tau + 0.75 * math.pi + alpha
    amp = amp_bulk / abs(kappa)
    c_pref = SignedLog(1 if (n - 1) % 2 == 0 else -1, k.log_const + log_gauss)
    osc = math.sin(n * tau + rho)
    value = c_pref * SignedLog(1, math.log(amp)) * SignedLog.from_float(osc)
    return value, OscillationDescriptor(om, tau, rho, amp, alpha, c_pref)


def euler_asymptotic(n: int, u: float, mix: Mixture, margin: float = WINDOW_MARGIN) -> EulerAsymptotic:
    """Large-``n`` form of the mean Euler characteristic.

    Below ``-E'_inf`` only the exponential rate is resolved, so the value is
    ``exp(n * rate)`` with unit prefactor.  Inside the window the full
    oscillating leading term is returned.  Positive ``u`` is reflected.

    Raises:
        EdgeWindow: if the window angle is within ``margin`` of 0 or pi.
        PureMixture: for single-term mixtures.
    """
    if u > 0.0:
        inner = euler_asymptotic(n, -u, mix, margin)
        value = inner.value if n % 2 == 0 else SignedLog.from_float(2.0) - inner.value
        return EulerAsymptotic(value, 3, inner.rate, inner.descriptor)
    if mix.is_pure:
        raise PureMixture("the Euler asymptotics need a genuine mixture")
    rate = theta_total(u, mix)
    ep = e_inf_prime_of(mix.nu_prime, mix.nu_double)
    if u <= -ep:
        if abs(u + ep) < ep * (1.0 - math.cos(margin)):
            raise EdgeWindow(f"u={u} is at the lower window edge")
        return EulerAsymptotic(SignedLog(1, n * rate), 1, rate)
    om = window_angle(u, mix)
    if om < margin or om > math.pi - margin:
        raise EdgeWindow(f"window angle {om:.4f} is within {margin} of 0 or pi")
    value, desc = _window(n, u, mix)
    return EulerAsymptotic(value, 2, rate, desc)


# ---------------------------------------------------------------------------
# Sweeps


EULER_CSV_HEADER = "u,sign,log_abs,mode"


@dataclass
class EulerCurve:
    n: int
    rows: list[tuple[float, int, float, str]]

    def to_csv(self) -> str:
        lines = [EULER_CSV_HEADER]
        lines += [f"{u:.17g},{s},{la:.17g},{mode}" for u, s, la, mode in self.rows]
        return "\n".join(lines) + "\n"


def euler_curve(n: int, us: Iterable[float], mix: Mixture, mode: str = "exact") -> EulerCurve:
    if mode not in ("exact", "asymptotic"):
        raise DomainError("mode must be 'exact' or 'asymptotic'")
    rows = []
    for u in us:
        u = float(u)
        v = euler_exact(n, u, mix) if mode == "exact" else euler_asymptotic(n, u, mix).value
        rows.append((u, v.sign, v.log_abs, mode))
    return EulerCurve(n, rows)


def sign_changes(values: Iterable[SignedLog]) -> int:
    signs = [v.sign for v in values if v.sign != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)
