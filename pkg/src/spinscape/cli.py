"""Command-line front-end.

Every command writes CSV or JSON to stdout or ``--out``.  Exit status is 0 on
success, 1 when a computation raises a library error and 2 on usage errors,
including malformed mixtures.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .complexity import E_k, complexity_curve, parse_index, theta0_closed
from .errors import EdgeWindow, MixtureParseError, SpinscapeError
from .euler import euler_asymptotic, euler_exact
from .goe import validate_identity_n2
from .mixture import Mixture, format_mixture, parse_mixture, profile
from .parisi import compare_f1_E0, duality_check, duality_value

COMMANDS = ("profile", "complexity", "ek", "parisi", "duality", "goe-validate", "euler")
DEFAULT_VALIDATION_MIXTURE = "2:0.5,3:0.3,4:0.2"
DEFAULT_VALIDATION_LEVELS = (-1.0, -0.5, 0.0)


class UsageError(Exception):
    """Invalid command line; maps to exit status 2."""


@dataclass
class RunConfig:
    command: str
    mixture: Optional[Mixture]
    u_range: Optional[tuple[float, float, int]]
    index: object
    n: Optional[int]
    samples: int
    seed: int
    output: Optional[str]
    fmt: str
    mode: str

    def grid(self) -> np.ndarray:
        lo, hi, steps = self.u_range
        return np.linspace(lo, hi, steps)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spinscape", description="Landscape quantities of mixed spherical spin glasses.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--mixture", help="comma-separated p:weight pairs, e.g. 2:0.9,10:0.1")
    p.add_argument("--k", help="index: integer k or 'total'")
    p.add_argument("--gamma", type=float, help="fractional index in (0, 1)")
    p.add_argument("--u", nargs=3, metavar=("LO", "HI", "STEPS"), help="energy grid")
    p.add_argument("--n", type=int, help="dimension")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", dest="fmt", choices=("csv", "json"))
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--mode", choices=("exact", "asymptotic"), default="exact", help="euler only")
    return p


def _u_range(values: Optional[Sequence[str]]) -> Optional[tuple[float, float, int]]:
    if values is None:
        return None
    try:
        lo, hi, steps = float(values[0]), float(values[1]), int(values[2])
    except ValueError as exc:
        raise UsageError(f"--u expects LO HI STEPS: {exc}") from exc
    if steps < 2:
        raise UsageError("--u needs STEPS >= 2")
    if not lo < hi:
        raise UsageError("--u needs LO < HI")
    return lo, hi, steps


_DEFAULT_FORMAT = {
    "profile": "json",
    "complexity": "csv",
    "ek": "json",
    "parisi": "json",
    "duality": "json",
    "goe-validate": "json",
    "euler": "csv",
}
_NEEDS_GRID = ("complexity", "duality", "euler")


def parse_args(argv: Sequence[str]) -> RunConfig:
    """Validate ``argv`` into a :class:`RunConfig`.

    Raises:
        UsageError: bad flags or values.
        MixtureParseError: malformed ``--mixture``.
    """
    ns = _build_parser().parse_args(list(argv))
    if ns.k is not None and ns.gamma is not None:
        raise UsageError("--k and --gamma are mutually exclusive")
    if ns.samples < 1:
        raise UsageError("--samples must be >= 1")
    text = ns.mixture
    if text is None and ns.command == "goe-validate":
        text = DEFAULT_VALIDATION_MIXTURE
    if text is None:
        raise UsageError(f"{ns.command} requires --mixture")
    mix = parse_mixture(text)
    u_range = _u_range(ns.u)
    if u_range is None and ns.command in _NEEDS_GRID:
        raise UsageError(f"{ns.command} requires --u LO HI STEPS")
    if ns.gamma is not None:
        index = ns.gamma
    elif ns.k is not None:
        index = ns.k
    else:
        index = 0
    try:
        index = parse_index(index)
    except (SpinscapeError, ValueError) as exc:
        raise UsageError(f"bad index: {exc}") from exc
    n = ns.n
    if ns.command == "euler" and n is None:
        raise UsageError("euler requires --n")
    if ns.command == "goe-validate":
        n = 2 if n is None else n
    if n is not None and n < 1:
        raise UsageError("--n must be >= 1")
    return RunConfig(
        command=ns.command,
        mixture=mix,
        u_range=u_range,
        index=index,
        n=n,
        samples=ns.samples,
        seed=ns.seed,
        output=ns.out,
        fmt=ns.fmt or _DEFAULT_FORMAT[ns.command],
        mode=ns.mode,
    )


# ---------------------------------------------------------------------------
# Serialisation


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _flat(d: dict) -> str:
    return _csv(["key", "value"], [(k, v) for k, v in _clean(d).items()])


# ---------------------------------------------------------------------------
# Commands


def _profile(cfg: RunConfig) -> str:
    d = {"mixture": format_mixture(cfg.mixture), **profile(cfg.mixture).as_dict()}
    return _json(d) if cfg.fmt == "json" else _flat(d)


def _complexity(cfg: RunConfig) -> str:
    curve = complexity_curve(cfg.index, cfg.grid(), cfg.mixture)
    if cfg.fmt == "csv":
        return curve.to_csv()
    rows = [{"u": u, "theta": t, "regime": r} for (u, t), r in zip(curve.points, curve.regimes)]
    return _json({"mixture": format_mixture(cfg.mixture), "index": cfg.index, "curve": rows})


def _ek(cfg: RunConfig) -> str:
    if not isinstance(cfg.index, int):
        raise UsageError("ek needs an integer --k")
    prof = profile(cfg.mixture)
    d = {
        "mixture": format_mixture(cfg.mixture),
        "k": cfg.index,
        "E_k": E_k(cfg.index, cfg.mixture),
        "e_inf": prof.e_inf,
        "e_inf_minus": prof.e_inf_minus,
        "e_inf_plus": prof.e_inf_plus,
        "class": prof.mixture_class.value,
    }
    return _json(d) if cfg.fmt == "json" else _flat(d)


def _parisi(cfg: RunConfig) -> str:
    d = compare_f1_E0(cfg.mixture).as_dict()
    return _json(d) if cfg.fmt == "json" else _flat(d)


def _duality(cfg: RunConfig) -> str:
    us = cfg.grid()
    report = duality_check(cfg.mixture, us)
    if cfg.fmt == "json":
        return _json({"mixture": format_mixture(cfg.mixture), **report.as_dict()})
    e_inf = profile(cfg.mixture).e_inf
    rows = []
    for u in us:
        u = float(u)
        if u >= -e_inf:
            continue
        th = theta0_closed(u, cfg.mixture)
        dual, b = duality_value(u, cfg.mixture)
        rows.append((u, th, dual, b, abs(th - dual)))
    return _csv(["u", "theta0", "dual", "b", "residual"], rows)


def _goe_validate(cfg: RunConfig) -> str:
    if cfg.n != 2:
        raise UsageError("goe-validate supports --n 2 only")
    levels = cfg.grid() if cfg.u_range else DEFAULT_VALIDATION_LEVELS
    rows = validate_identity_n2(cfg.mixture, [float(u) for u in levels], cfg.samples, cfg.seed)
    if cfg.fmt == "csv":
        return _csv(
            ["u", "kind", "identity_mean", "identity_stderr", "direct_mean", "direct_stderr", "z"],
            [(r.level, r.kind, r.identity.mean, r.identity.stderr, r.direct.mean, r.direct.stderr, r.z) for r in rows],
        )
    out = [
        {
            "u": r.level,
            "kind": r.kind,
            "identity": r.identity.as_dict(),
            "direct": r.direct.as_dict(),
            "z": r.z,
        }
        for r in rows
    ]
    worst = max(abs(r.z) for r in rows)
    return _json({"mixture": format_mixture(cfg.mixture), "n": 2, "rows": out, "max_abs_z": worst})


def _euler(cfg: RunConfig) -> str:
    rows, descriptors = [], []
    for u in cfg.grid():
        u = float(u)
        if cfg.mode == "exact":
            v = euler_exact(cfg.n, u, cfg.mixture)
        else:
            try:
                res = euler_asymptotic(cfg.n, u, cfg.mixture)
            except EdgeWindow:
                continue
            v = res.value
            if res.descriptor is not None:
                descriptors.append({"u": u, **res.descriptor.as_dict()})
        rows.append((u, v.sign, float(v.log_abs), cfg.mode))
    if cfg.fmt == "csv":
        return _csv(["u", "sign", "log_abs", "mode"], rows)
    return _json(
        {
            "mixture": format_mixture(cfg.mixture),
            "n": cfg.n,
            "rows": [{"u": u, "sign": s, "log_abs": la, "mode": m} for u, s, la, m in rows],
            "descriptors": descriptors,
        }
    )


_HANDLERS = {
    "profile": _profile,
    "complexity": _complexity,
    "ek": _ek,
    "parisi": _parisi,
    "duality": _duality,
    "goe-validate": _goe_validate,
    "euler": _euler,
}


def run(cfg: RunConfig) -> int:
    try:
        text = _HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SpinscapeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except MixtureParseError as exc:
        print(f"MixtureParseError: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
