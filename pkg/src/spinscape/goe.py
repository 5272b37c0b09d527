"""GOE sampling and Monte Carlo evaluation of mean critical-point counts.

The mean number of index-``k`` critical points with energy density in a band
equals a GOE expectation involving the ``k``-th smallest eigenvalue.  For each
draw the energy integral is Gaussian and is done in closed form; draws are
combined in log space.  A brute-force counter on the circle (``n = 2``)
provides an independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.special import comb, log_ndtr, logsumexp

from ._parallel import chunk_rng, chunk_sizes, run_chunks
from .errors import DomainError, PureMixture, UnsupportedDimension
from .mixture import Mixture

CHUNK = 4096

Index = Union[int, str]


# ---------------------------------------------------------------------------
# Sampling


def goe_matrix(n: int, rng: np.random.Generator, batch: int | None = None) -> np.ndarray:
    """Symmetric matrix with ``E M_ij^2 = (1 + delta_ij) / (2n)``."""
    shape = (n, n) if batch is None else (batch, n, n)
    g = rng.standard_normal(shape)
    return (g + np.swapaxes(g, -1, -2)) / (2.0 * math.sqrt(n))


@dataclass(frozen=True)
class SpectralSample:
    n: int
    eigenvalues: np.ndarray
    seed: int


def sample_goe(n: int, seed: int) -> SpectralSample:
    """Sorted eigenvalues of one GOE draw; deterministic in ``seed``."""
    if n < 1:
        raise DomainError("n must be positive")
    rng = np.random.default_rng(seed)
    ev = np.linalg.eigvalsh(goe_matrix(n, rng))
    return SpectralSample(n=n, eigenvalues=ev, seed=seed)


def goe_eigenvalues(n: int, samples: int, seed: int) -> np.ndarray:
    """``samples x n`` array of sorted eigenvalues from independent chunks."""
    per_chunk = max(1, min(CHUNK, (1 << 22) // (n * n)))

    def work(i: int, size: int) -> np.ndarray:
        return np.linalg.eigvalsh(goe_matrix(n, chunk_rng(seed, i), batch=size))

    parts = run_chunks(work, chunk_sizes(samples, per_chunk))
    return np.concatenate(parts, axis=0)


def ks_semicircle(eigenvalues: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance between an empirical spectrum and the semicircle."""
    from .complexity import semicircle_cdf

    x = np.sort(np.ravel(eigenvalues))
    n = x.size
    cdf = semicircle_cdf(x)
    hi = np.arange(1, n + 1) / n - cdf
    lo = cdf - np.arange(0, n) / n
    return float(max(hi.max(), lo.max()))


# ---------------------------------------------------------------------------
# Estimates


@dataclass
class RiceEstimate:
    """Monte Carlo mean of a non-negative quantity, stored as a log."""

    n: int
    k: Index
    band: tuple[float, float]
    mean_log: float
    sign: int
    stderr_rel: float
    samples: int
    seed: int
    extra: dict = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return 0.0 if self.sign == 0 else math.exp(self.mean_log)

    @property
    def stderr(self) -> float:
        return self.mean * self.stderr_rel

    def as_dict(self) -> dict:
        lo, hi = self.band
        return {
            "n": self.n,
            "k": self.k,
            "band": [_json_float(lo), _json_float(hi)],
            "mean_log": _json_float(self.mean_log),
            "sign": self.sign,
            "stderr_rel": _json_float(self.stderr_rel),
            "samples": self.samples,
            "seed": self.seed,
        }


def _json_float(x: float):
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def _log_mean(logs: np.ndarray) -> tuple[float, float]:
    """Log of the sample mean and the relative standard error."""
    n = logs.size
    m = np.max(logs)
    if not np.isfinite(m):
        return -math.inf, 0.0
    w = np.exp(logs - m)
    s1 = math.fsum(w)
    s2 = math.fsum(w * w)
    mean_log = m + math.log(s1) - math.log(n)
    if n < 2:
        return float(mean_log), math.inf
    rel = math.sqrt(max(n * s2 / (s1 * s1) - 1.0, 0.0) / (n - 1))
    return float(mean_log), rel


def _estimate_from_logs(logs, n, k, band, samples, seed, **extra) -> RiceEstimate:
    mean_log, rel = _log_mean(np.asarray(logs, dtype=float))
    sign = 0 if mean_log == -math.inf else 1
    return RiceEstimate(n, k, tuple(band), mean_log, sign, rel, samples, seed, dict(extra))


def _estimate_from_values(values, n, k, band, samples, seed) -> RiceEstimate:
    v = np.asarray(values, dtype=float)
    mean = float(np.mean(v))
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else math.inf
    if mean <= 0.0:
        return RiceEstimate(n, k, tuple(band), -math.inf, 0, math.inf if se > 0 else 0.0, samples, seed, {"stderr": se})
    return RiceEstimate(n, k, tuple(band), math.log(mean), 1, se / mean, samples, seed, {"stderr": se})


# ---------------------------------------------------------------------------
# Kac-Rice identity


def _log_ndtr_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``log(Phi(b) - Phi(a))`` for ``a <= b``, without cancellation in the tails."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty(np.broadcast(a, b).shape)
    a, b = np.broadcast_arrays(a, b)
    right = a > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        la, lb = log_ndtr(-a[right]), log_ndtr(-b[right])
        out[right] = la + np.log1p(-np.exp(lb - la))
        la, lb = log_ndtr(a[~right]), log_ndtr(b[~right])
        out[~right] = lb + np.log1p(-np.exp(la - lb))
    out[a >= b] = -np.inf
    return out


def log_prefactor(n: int, mix: Mixture, stated: bool = False) -> float:
    """Log of the constant in front of the identity.

    The default is the value obtained by carrying the sphere volume, the
    gradient density and the GOE rescaling through exactly.  ``stated=True``
    returns the published constant, which is larger by ``sqrt(2 nu'')/nu'``
    for every ``n``; the two-site oracle rejects it.
    """
    n1, n2, a2 = mix.nu_prime, mix.nu_double, mix.alpha2
    log_c = math.log(2.0) + 0.5 * math.log(n * n1 / (math.pi * a2)) + 0.5 * n * math.log(n2 / n1)
    if stated:
        log_c += 0.5 * math.log(2.0 * n2) - math.log(n1)
    return log_c


def identity_log_terms(
    lam: np.ndarray, n: int, band: tuple[float, float], mix: Mixture, stated: bool = False
) -> np.ndarray:
    """Per-eigenvalue log contribution, including the prefactor.

    ``lam`` may have any shape; the energy integral over ``band`` is the
    Gaussian integral of the exponent in closed form.
    """
    if mix.is_pure:
        raise PureMixture("the identity needs a genuine mixture")
    n1, n2, a2 = mix.nu_prime, mix.nu_double, mix.alpha2
    lo, hi = band
    A = (n2 + n1) / a2
    lam = np.asarray(lam, dtype=float)
    y0 = math.sqrt(2.0 * n2) * n1 * lam / (n2 + n1)
    q0 = lam * lam * (1.0 - 2.0 * n2 / a2) + A * y0 * y0
    s = math.sqrt(n * A)
    band_log = _log_ndtr_diff(s * (lo - y0), s * (hi - y0))
    return log_prefactor(n, mix, stated) + 0.5 * n * q0 + 0.5 * math.log(2.0 * math.pi / (n * A)) + band_log


@dataclass
class IdentityResult:
    per_index: list[RiceEstimate]
    total: RiceEstimate
    partition_residual: float


def crt_identity_all(
    n: int, band: tuple[float, float], mix: Mixture, samples: int, seed: int, stated: bool = False
) -> IdentityResult:
    """Estimates for every index ``0..n-1`` and their sum, from the same draws.

    ``partition_residual`` is the relative mismatch between the sum of the
    per-index means and the total; it is pure rounding.
    """
    if n < 1 or samples < 1:
        raise DomainError("need n >= 1 and samples >= 1")
    lo, hi = float(band[0]), float(band[1])
    if not lo < hi:
        raise DomainError("band must satisfy lo < hi")
    ev = goe_eigenvalues(n, samples, seed)
    logs = identity_log_terms(ev, n, (lo, hi), mix, stated)
    per = [_estimate_from_logs(logs[:, k], n, k, (lo, hi), samples, seed) for k in range(n)]
    total_logs = logsumexp(logs, axis=1)
    total = _estimate_from_logs(total_logs, n, "total", (lo, hi), samples, seed)
    finite = [e.mean_log for e in per if e.sign]
    summed = logsumexp(finite) if finite else -math.inf
    resid = 0.0 if total.sign == 0 else abs(math.expm1(summed - total.mean_log))
    return IdentityResult(per_index=per, total=total, partition_residual=resid)


def crt_mean_identity(
    n: int, k: Index, band: tuple[float, float], mix: Mixture, samples: int, seed: int, stated: bool = False
) -> RiceEstimate:
    """Mean number of index-``k`` critical points with energy density in ``band``.

    ``k`` may be ``"total"`` for all indices together.
    """
    if k != "total" and not (isinstance(k, (int, np.integer)) and 0 <= k < n):
        raise DomainError(f"index must be in [0, {n - 1}] or 'total'")
    res = crt_identity_all(n, band, mix, samples, seed, stated)
    return res.total if k == "total" else res.per_index[int(k)]


# ---------------------------------------------------------------------------
# Direct counting on the circle


_GRID = 4096
_MAX_DEGREE = 12
_CHUNK = 2048


def _monomials(theta: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """``cos^j sin^(p-j)`` and its derivative for ``j = 0..p``; shape ``(p+1,) + theta.shape``."""
    c, s = np.cos(theta), np.sin(theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        cpow = np.cumprod(np.broadcast_to(c, (p + 2,) + c.shape), axis=0) / c
        spow = np.cumprod(np.broadcast_to(s, (p + 2,) + s.shape), axis=0) / s
    # cumprod/x breaks at x == 0; rebuild those columns directly
    for arr, base in ((cpow, c), (spow, s)):
        bad = base == 0.0
        if np.any(bad):
            arr[:, bad] = 0.0
            arr[0, bad] = 1.0
    j = np.arange(p + 1)
    val = cpow[j] * spow[p - j]
    jj = j.reshape((-1,) + (1,) * theta.ndim)
    # d/dθ cos^j sin^(p-j) = -j cos^(j-1) sin^(p-j+1) + (p-j) cos^(j+1) sin^(p-j-1)
    der = -jj * cpow[np.maximum(j - 1, 0)] * spow[p - j + 1] + (p - jj) * cpow[j + 1] * spow[np.maximum(p - j - 1, 0)]
    return val, der


class _CircleField:
    """Random Hamiltonian restricted to the circle of radius sqrt(2).

    For two sites the p-spin term reduces to ``sqrt(2) sum_j c_j cos^j sin^(p-j)``
    with independent ``c_j ~ N(0, binom(p, j))``; this has the same law as
    contracting a full Gaussian tensor.
    """

    def __init__(self, mix: Mixture, rng: np.random.Generator, size: int):
        self.parts = []
        for p, w in mix.terms:
            sd = np.sqrt(comb(p, np.arange(p + 1)))
            coef = rng.standard_normal((size, p + 1)) * sd * math.sqrt(2.0 * w)
            self.parts.append((p, coef))

    def on_grid(self, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        h = dh = 0.0
        for p, coef in self.parts:
            v, d = _monomials(theta, p)
            h = h + coef @ v
            dh = dh + coef @ d
        return h, dh

    def at(self, rows: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        h = np.zeros(theta.shape)
        dh = np.zeros(theta.shape)
        for p, coef in self.parts:
            v, d = _monomials(theta, p)
            c = coef[rows].T
            h += np.sum(c * v, axis=0)
            dh += np.sum(c * d, axis=0)
        return h, dh


def _critical_points(field: _CircleField, size: int, grid: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rows, energies and kinds (+1 minimum, -1 maximum) of all critical points."""
    theta = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
    _, dh = field.on_grid(theta)
    nxt = np.roll(dh, -1, axis=1)
    change = (np.sign(dh) != np.sign(nxt)) & (dh != 0.0) | (dh == 0.0)
    rows, cols = np.nonzero(change)
    lo = theta[cols]
    hi = lo + 2.0 * np.pi / grid
    f_lo = dh[rows, cols]
    kind = np.where(nxt[rows, cols] > f_lo, 1, -1)
    a, b = lo.copy(), hi.copy()
    fa = f_lo.copy()
    while np.max(b - a, initial=0.0) > 1e-10:
        mid = 0.5 * (a + b)
        _, fm = field.at(rows, mid)
        left = np.sign(fm) == np.sign(fa)
        a = np.where(left, mid, a)
        fa = np.where(left, fm, fa)
        b = np.where(left, b, mid)
    root = 0.5 * (a + b)
    h, _ = field.at(rows, root)
    return rows, h, kind


@dataclass
class DirectCount:
    minima: RiceEstimate
    maxima: RiceEstimate
    total: RiceEstimate
    euler_mean: float
    euler_stderr: float
    grid_mismatches: int
    parity_violations: int


def _direct_counts(
    mix: Mixture, levels: Sequence[float], samples: int, seed: int, check_grid: bool
) -> tuple[list[tuple[np.ndarray, np.ndarray]], int, int]:
    """Per-sample counts of minima and maxima below each level, from one set of fields."""
    if max(p for p, _ in mix.terms) > _MAX_DEGREE:
        raise DomainError(f"direct counting supports degrees up to {_MAX_DEGREE}")
    thresholds = [2.0 * float(u) for u in levels]

    def work(i: int, size: int):
        field = _CircleField(mix, chunk_rng(seed, i), size)
        rows, h, kind = _critical_points(field, size, _GRID)
        out = []
        for t in thresholds:
            below = h <= t
            out.append((
                np.bincount(rows[(kind > 0) & below], minlength=size),
                np.bincount(rows[(kind < 0) & below], minlength=size),
            ))
        all_min = np.bincount(rows[kind > 0], minlength=size)
        all_max = np.bincount(rows[kind < 0], minlength=size)
        parity = int(np.sum(all_min != all_max))
        mism = 0
        if check_grid:
            r2, _, _ = _critical_points(field, size, 2 * _GRID)
            mism = int(np.sum(np.bincount(r2, minlength=size) != np.bincount(rows, minlength=size)))
        return out, parity, mism

    parts = run_chunks(work, chunk_sizes(samples, _CHUNK))
    counts = [
        (np.concatenate([p[0][j][0] for p in parts]), np.concatenate([p[0][j][1] for p in parts]))
        for j in range(len(thresholds))
    ]
    return counts, sum(p[1] for p in parts), sum(p[2] for p in parts)


def _direct_result(mins, maxs, level, samples, seed, parity, mism) -> DirectCount:
    band = (-math.inf, float(level))
    euler = mins - maxs
    return DirectCount(
        minima=_estimate_from_values(mins, 2, 0, band, samples, seed),
        maxima=_estimate_from_values(maxs, 2, 1, band, samples, seed),
        total=_estimate_from_values(mins + maxs, 2, "total", band, samples, seed),
        euler_mean=float(np.mean(euler)),
        euler_stderr=float(np.std(euler, ddof=1) / math.sqrt(euler.size)) if euler.size > 1 else math.inf,
        grid_mismatches=mism,
        parity_violations=parity,
    )


def direct_count(
    n: int, mix: Mixture, level: float, samples: int, seed: int, check_grid: bool = False
) -> DirectCount:
    """Count minima and maxima with ``H <= n * level`` on sampled circle fields.

    Raises:
        UnsupportedDimension: for ``n != 2``.
    """
    if n != 2:
        raise UnsupportedDimension("direct counting is implemented for n = 2 only")
    counts, parity, mism = _direct_counts(mix, [level], samples, seed, check_grid)
    return _direct_result(*counts[0], level, samples, seed, parity, mism)


def z_score(a: RiceEstimate, b: RiceEstimate) -> float:
    se = math.hypot(a.stderr, b.stderr)
    diff = a.mean - b.mean
    if se == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return diff / se


@dataclass
class ValidationRow:
    level: float
    kind: str
    identity: RiceEstimate
    direct: RiceEstimate
    z: float


def validate_identity_n2(
    mix: Mixture, levels: Sequence[float], samples: int, seed: int, stated: bool = False
) -> list[ValidationRow]:
    """Identity versus direct counting at ``n = 2`` for minima and all critical points.

    The identity uses seed ``seed`` and the direct count ``seed + 1``; the
    direct fields are shared across levels.
    """
    counts, parity, mism = _direct_counts(mix, levels, samples, seed + 1, False)
    ev = goe_eigenvalues(2, samples, seed)
    rows = []
    for u, (mins, maxs) in zip(levels, counts):
        band = (-math.inf, float(u))
        logs = identity_log_terms(ev, 2, band, mix, stated)
        k0 = _estimate_from_logs(logs[:, 0], 2, 0, band, samples, seed)
        tot = _estimate_from_logs(logsumexp(logs, axis=1), 2, "total", band, samples, seed)
        direct = _direct_result(mins, maxs, u, samples, seed + 1, parity, mism)
        for kind, a, b in (("k0", k0, direct.minima), ("total", tot, direct.total)):
            rows.append(ValidationRow(float(u), kind, a, b, z_score(a, b)))
    return rows
