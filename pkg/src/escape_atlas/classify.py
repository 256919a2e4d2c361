"""Finite-horizon membership tests for the escaping set and the fast escaping sets.

Orbits are iterated in floats until ``ln|f^n(z)|`` passes the handoff threshold,
then continued on log magnitudes with the growth law, but only while the orbit sits
on a maximum-modulus direction.  Otherwise the orbit is truncated and the verdicts
describe the evaluated prefix (``truncated`` is set).  Non-escape is never claimed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import CMP_TOL, SNAP
from .efun import MAX_DIRECTIONS, EntireFunction, growth_direction, growth_law, log_eval
from .errors import ArgumentOutOfEvaluableRange
from .mmod import iterate_M
from .numerics import NEG_INF, LogMag, XComplex

HANDOFF = 300.0
LOCK_TOL = 1e-3


@dataclass(frozen=True)
class Fast:
    kind: str  # yes_at_R | yes_with_offset | no_with_first_failure | undecided
    n: int | None = None

    def __str__(self):
        return self.kind if self.n is None else f"{self.kind}({self.n})"


@dataclass(frozen=True, eq=False)
class Classification:
    point: XComplex
    log_R: LogMag
    horizon: int
    orbit_logs: tuple
    m_logs: tuple
    margins: tuple
    escaping: str
    fast: Fast
    truncated: bool


def wrap_angle(t: float) -> float:
    t = math.fmod(t, 2.0 * math.pi)
    if t > math.pi:
        t -= 2.0 * math.pi
    elif t <= -math.pi:
        t += 2.0 * math.pi
    return t


def passes(o: LogMag, m: LogMag) -> bool:
    """``o >= m`` up to relative 1e-9 at the level where both sides are floats."""
    if m.is_float and o.is_float:
        if m.v == math.inf:
            return False
        if m.v == -math.inf:
            return True
        return o.v - m.v >= -CMP_TOL * max(1.0, abs(m.v))
    k, d = o.margin(m)
    scale = abs(m.v) if m.level == k else 1.0
    return d >= -CMP_TOL * max(1.0, scale)


def margin_value(o: LogMag, m: LogMag) -> float:
    return o.margin(m)[1]


def log_phase(f: EntireFunction, lr: LogMag, theta: float, steps: int):
    """Continue an orbit from ``(ln|z|, arg z)`` for up to ``steps`` steps.

    Returns ``(logs, escaping, truncated)`` where ``logs`` holds the new values only.
    """
    logs = []
    esc = False
    for _ in range(steps):
        if f.kind == "fatou" and math.cos(theta) > 0:
            esc = True  # real part far beyond 1
        if f.kind == "fatou" and abs(wrap_angle(theta)) <= LOCK_TOL:
            # f(z) = z + 1 + e^{-z} with Re z huge: |f(z)| = |z| + 1 to first order
            step = math.log1p(math.exp(-lr.v)) if lr.is_float else 0.0
            lr = lr + step
            logs.append(lr)
            continue
        dirs = MAX_DIRECTIONS[f.kind]
        locked = any(abs(wrap_angle(theta - d)) <= LOCK_TOL for d in dirs)
        if not (locked and f.has_growth_law):
            return logs, esc, True
        esc = True
        lr = growth_law(f, lr)
        theta = growth_direction(f, theta)
        logs.append(lr)
    return logs, esc, False


def _cert(f, z: complex) -> bool:
    if f.kind in ("exp", "coshsq"):
        return z.imag == 0.0
    if f.kind == "fatou":
        return z.real >= 1.0
    return False


def orbit(f: EntireFunction, z, horizon: int, handoff: float = HANDOFF):
    """``(logs, escaping, truncated)`` for ``ln|f^n(z)|``, ``n = 0..horizon`` or a prefix."""
    if isinstance(z, XComplex):
        try:
            zc = z.to_complex()
        except Exception:
            lr = z.logmag()
            theta = math.atan2(z.mantissa.imag, z.mantissa.real)
            logs, esc, trunc = log_phase(f, lr, theta, horizon)
            return [lr] + logs, esc, trunc
    else:
        zc = complex(z)
    logs = [LogMag.of(math.log(abs(zc))) if zc != 0 else NEG_INF]
    esc = _cert(f, zc)
    with np.errstate(all="ignore"):
        for n in range(horizon):
            L = complex(log_eval(f, np.array([zc]))[0])
            if math.isnan(L.real) or math.isnan(L.imag) or L.real == math.inf:
                return logs, esc, True
            logs.append(LogMag.of(L.real))
            if L.real > handoff:
                more, e2, trunc = log_phase(f, logs[-1], wrap_angle(L.imag), horizon - n - 1)
                return logs + more, esc or e2, trunc
            zc = complex(np.exp(L)) if L.real > -math.inf else 0j
            if abs(zc.imag) <= SNAP * abs(zc.real):
                zc = complex(zc.real, 0.0)
            esc = esc or _cert(f, zc)
    return logs, esc, False


def fast_verdict(logs, mlogs, horizon: int) -> tuple[Fast, tuple]:
    m = len(logs)
    margins = tuple(margin_value(logs[n], mlogs[n]) for n in range(m))
    first = next((n for n in range(m) if not passes(logs[n], mlogs[n])), None)
    if first is None:
        if m <= 1:
            return Fast("undecided"), margins
        return Fast("yes_at_R"), margins
    for ell in range(1, horizon // 2 + 1):
        if m - ell < 1:
            break
        if all(passes(logs[n + ell], mlogs[n]) for n in range(m - ell)):
            return Fast("yes_with_offset", ell), margins
    return Fast("no_with_first_failure", first), margins


def classify_point(
    f: EntireFunction,
    z,
    R: float | None = None,
    horizon: int = 20,
    *,
    log_R=None,
    m_logs=None,
) -> Classification:
    """Classify ``z``; pass ``log_R`` for levels beyond float range, or precomputed ``m_logs``."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if m_logs is None:
        m_logs = iterate_M(f, R, horizon, log_R=log_R).logs
    lr = LogMag.of(log_R) if log_R is not None else LogMag.of(math.log(R))
    logs, esc, trunc = orbit(f, z, horizon)
    fast, margins = fast_verdict(logs, m_logs, horizon)
    point = z if isinstance(z, XComplex) else XComplex.from_complex(complex(z))
    return Classification(
        point, lr, horizon, tuple(logs), tuple(m_logs), margins,
        "yes" if esc else "undecided", fast, trunc or len(logs) < horizon + 1,
    )


def native_step(f: EntireFunction, z: complex) -> complex:
    """``f(z)`` computed the way the classifier steps orbits."""
    L = complex(log_eval(f, np.array([complex(z)]))[0])
    if L.real > 700:
        raise ArgumentOutOfEvaluableRange("image beyond float range")
    return complex(np.exp(L))
