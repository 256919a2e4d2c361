"""Maximum modulus ``M(r)``, its iterates and inverse, and the critical radius ``R(f)``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .efun import EntireFunction, growth_law, log_eval
from .errors import BelowCriticalRadius, InvalidRadius, NotBracketed
from .numerics import LogMag

GRID = 512
THETA_TOL = 1e-12
# circle searches run up to this log-radius; beyond it the growth law takes over
SEARCH_LOG_RADIUS = 300.0
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MaxModResult:
    r: float
    log_M: LogMag
    theta_star: float
    refinement_width: float


@dataclass(frozen=True)
class MOrbit:
    base: float
    logs: tuple  # LogMag values ln M^n(R), n = 0..horizon

    def __len__(self):
        return len(self.logs)


def _circle_log(f, r, theta):
    return log_eval(f, r * np.exp(1j * np.asarray(theta, dtype=float))).real


def max_modulus(f: EntireFunction, r: float, grid: int = GRID) -> MaxModResult:
    """Coarse grid over the circle, then golden-section refinement around the best sample."""
    r = float(r)
    if not r > 0 or not math.isfinite(r):
        raise InvalidRadius(f"radius must be positive and finite, got {r}")
    thetas = 2.0 * math.pi * np.arange(grid) / grid
    vals = _circle_log(f, r, thetas)
    k = int(np.argmax(vals))  # first maximiser, i.e. smallest theta
    best_t, best_v = thetas[k], float(vals[k])
    step = 2.0 * math.pi / grid
    a, b = best_t - step, best_t + step
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = _circle_log(f, r, [c, d])
    while b - a > THETA_TOL:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = float(_circle_log(f, r, [c])[0])
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = float(_circle_log(f, r, [d])[0])
        for t, v in ((c, fc), (d, fd)):
            if v > best_v:
                best_t, best_v = t, float(v)
    return MaxModResult(r, LogMag.of(best_v), best_t % (2.0 * math.pi), b - a)


def log_M(f: EntireFunction, log_r) -> LogMag:
    """``ln M(r)`` given ``ln r``; circle search while feasible, growth law beyond."""
    log_r = LogMag.of(log_r)
    if log_r.is_float and log_r.v <= SEARCH_LOG_RADIUS:
        return max_modulus(f, math.exp(log_r.v)).log_M
    return growth_law(f, log_r)


@lru_cache(maxsize=64)
def critical_radius(f: EntireFunction) -> float:
    """Least ``R`` with ``M(r) > r`` for ``r >= R`` over the scan range ``[1e-6, 1e3]``."""
    rs = np.logspace(-6, 3, 181)
    h = np.array([float(max_modulus(f, r).log_M) - math.log(r) for r in rs])
    if np.all(h > 0):
        return 0.0
    if h[-1] <= 0:
        return math.inf
    i = int(np.nonzero(h <= 0)[0][-1])
    lo, hi = math.log(rs[i]), math.log(rs[i + 1])
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if float(max_modulus(f, math.exp(mid)).log_M) - mid > 0:
            hi = mid
        else:
            lo = mid
    return math.exp(hi)


def iterate_M(f: EntireFunction, R, horizon: int, log_R=None) -> MOrbit:
    """``ln M^n(R)`` for ``n = 0..horizon``; pass ``log_R`` to start from a LogMag radius."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    lr = LogMag.of(log_R) if log_R is not None else LogMag.of(math.log(R))
    crit = critical_radius(f)
    if crit > 0 and (crit == math.inf or lr <= LogMag.of(math.log(crit))):
        raise BelowCriticalRadius(f"R=exp({lr.to_json()}) is not above R(f)={crit}")
    logs = [lr]
    for _ in range(horizon):
        logs.append(log_M(f, logs[-1]))
    return MOrbit(float(lr.exp()), tuple(logs))


def inverse_M(f: EntireFunction, target_log, tol: float = 1e-10) -> float:
    """Radius ``r`` with ``ln M(r) = target_log``, by bisection on ``r``."""
    t = float(target_log)
    lm0 = float(log_eval(f, np.array([0j]))[0].real)
    if t < lm0 - tol:
        raise NotBracketed(f"target {t} below ln M(0) = {lm0}")
    if t <= lm0 + tol:
        return 0.0
    lo, hi = 0.0, 1.0
    while float(log_M(f, math.log(hi))) < t:
        lo, hi = hi, hi * 2.0
        if hi > 1e300:
            raise NotBracketed(f"target {t} beyond bracket")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        v = float(log_M(f, math.log(mid))) - t
        if abs(v) <= tol:
            return mid
        if v < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def inverse_M_log(f: EntireFunction, target_log) -> LogMag:
    """``ln M^{-1}(e^target)`` for targets of any size."""
    t = LogMag.of(target_log)
    if t.is_float and t.v < 1e15:
        return LogMag.of(math.log(inverse_M(f, t.v)))
    lt = t.log()
    k = f.kind
    if k == "coshsq":
        return lt - math.log(2.0)
    return lt


def check_logconvexity(f: EntireFunction, r: float, c: float) -> dict:
    if r < 1 or c <= 1:
        raise ValueError("need r >= 1 and c > 1")
    lhs = log_M(f, c * math.log(r))
    rhs = log_M(f, math.log(r)) * c
    k, d = lhs.margin(rhs)
    return {"holds": d >= -1e-9, "lhs": lhs, "rhs": rhs}
