"""Scaffolds of Wiman-Valiron frames and itinerary pullbacks to fast-escaping points.

Level ``n`` of a scaffold has radius ``r_n``, a frame at ``r'_n = s_n r_n`` centred on
``z_n = z(r'_n)`` and quads ``Q_{n,j}`` for ``j = -2..2``; the next radius is
``r_{n+1} = M(r'_n)``.  Points are carried level by level in the local coordinate
``delta_n = f^n(z) - z_n`` because ``f^n(z)`` itself leaves floating point after one step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .efun import EntireFunction, clog1p, log_deriv_growth
from .errors import (
    ArgumentOutOfEvaluableRange,
    BranchLost,
    IndexCapExceeded,
    InverseFailed,
    NoAdmissibleRadius,
    OutsideDisc,
    PreconditionError,
    PullbackFailed,
    ScaffoldFailed,
)
from .numerics import LN2, NEG_INF, FineReal, LogMag, XComplex
from .wv import TWO_PI, Quad, WVFrame, build_frame, contraction_factor, g_local, inverse_g, quadrilateral

QUAD_J = (-2, -1, 0, 1, 2)
RECT_DIAM = math.hypot(2 * LN2, TWO_PI)
DILATION = 1e-6
TRANSITION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Level:
    log_r: LogMag
    frame: WVFrame
    quads: tuple
    c: float

    def quad(self, j: int) -> Quad:
        return self.quads[QUAD_J.index(j)]


@dataclass(frozen=True, eq=False)
class Bound:
    """A radius ``M^{-n}(x)`` with its value and the log-ratio injected at each level.

    Past the second level the differences between bounds sit below any float or
    level-index resolution.  ``M^{-1}`` is increasing and each level's contribution
    dominates everything deeper, so bounds are ordered by their keys read from the
    shallowest level.
    """

    value: FineReal
    key: tuple

    def _cmp(self, other) -> int:
        if isinstance(other, Bound):
            n = max(len(self.key), len(other.key))
            a = self.key + (0.0,) * (n - len(self.key))
            b = other.key + (0.0,) * (n - len(other.key))
            return (a > b) - (a < b)
        return (self.value > other) - (self.value < other)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        return float(self.value)

    def to_json(self):
        return self.value.to_json()


@dataclass(frozen=True, eq=False)
class Scaffold:
    f: EntireFunction
    r0: float
    depth: int
    levels: tuple
    lower: tuple  # Bound M^{-n}(r_n), n = 0..depth
    upper: tuple  # Bound M^{-n}(2 r_n), n = 1..depth

    @property
    def R_bounds(self):
        return self.lower[-1], self.upper[-1]

    def log_r_next(self, n: int) -> LogMag:
        return self.levels[n].frame.log_M


@dataclass(frozen=True)
class Itinerary:
    symbols: tuple

    def __post_init__(self):
        s = tuple(int(x) for x in self.symbols)
        if not s:
            raise ValueError("itinerary must be nonempty")
        if any(x not in (-1, 1) for x in s):
            raise ValueError("itinerary symbols must be -1 or +1")
        object.__setattr__(self, "symbols", s)

    @staticmethod
    def parse(text: str) -> "Itinerary":
        return Itinerary(tuple(1 if ch == "+" else -1 if ch == "-" else 0 for ch in text.strip()))

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return "".join("+" if s > 0 else "-" for s in self.symbols)


@dataclass(frozen=True, eq=False)
class EremenkoPoint:
    itinerary: Itinerary
    deltas: tuple  # delta_n per level
    ws: tuple  # chart value g_n(delta_n) targeted by the pullback
    log_enclosure_diameter: LogMag
    orbit_check: tuple
    frame0: WVFrame

    @property
    def depth(self) -> int:
        return len(self.itinerary)

    @property
    def center_native(self) -> complex:
        return self.frame0.z_native + self.deltas[0]

    @property
    def enclosure_center(self) -> XComplex:
        return XComplex.from_complex(self.center_native)

    @property
    def enclosure_diameter(self) -> float:
        return float(self.log_enclosure_diameter.exp())


# -- scaffold -----------------------------------------------------------------------

def build_scaffold(
    f: EntireFunction,
    r0: float,
    depth: int,
    K: float = 20 * math.pi,
    samples: int = 100,
    seed: int = 0,
    min_radius: float = 30.0,
) -> Scaffold:
    if depth < 1:
        raise ValueError("depth must be at least 1")
    levels = []
    lr = LogMag.of(math.log(r0))
    for n in range(depth):
        try:
            fr = build_frame(f, log_r=lr, K=K, samples=samples, seed=seed, min_radius=min_radius)
            quads = tuple(quadrilateral(fr, j) for j in QUAD_J)
            c = contraction_factor(fr)
        except (NoAdmissibleRadius, PreconditionError, InverseFailed, BranchLost, OutsideDisc,
                IndexCapExceeded, ArgumentOutOfEvaluableRange) as exc:
            raise ScaffoldFailed(n, exc) from exc
        levels.append(Level(lr, fr, quads, c))
        lr = fr.log_M
    lower, upper = _r_bounds(f, float(r0), levels)
    return Scaffold(f, float(r0), depth, tuple(levels), tuple(lower), tuple(upper))


def _pull_ratio(f, rho: LogMag, points) -> LogMag:
    """Push a log-ratio ``rho`` (as ``ln rho``) through inverse steps of ``M``.

    ``ln(M^{-1}(X e^rho) / M^{-1}(X)) = log1p(rho / Lambda)`` to first order, with
    ``Lambda = d ln M / d ln r`` at ``M^{-1}(X)``; exact for exp.
    """
    for ln_y in points:
        lam = log_deriv_growth(f, ln_y)
        if rho.is_float and lam.is_float and rho.v > -30.0:
            rho_v = math.exp(rho.v)
            rho = LogMag.of(math.log(math.log1p(rho_v / lam.v)))
        else:
            rho = rho - lam.log()
    return rho


def _grow(a: FineReal, log_a: LogMag, ln_rho: LogMag) -> FineReal:
    """``a * e^rho`` as ``a + a expm1(rho)``."""
    if ln_rho.is_float and ln_rho.v > -30.0:
        inc = math.log(math.expm1(math.exp(ln_rho.v)))
    else:
        inc = ln_rho
    return a.plus_term(1, log_a + inc)


def _r_bounds(f, r0: float, levels):
    d = len(levels)
    rp = [lv.frame.log_r_prime for lv in levels]
    scales = [lv.frame.scale for lv in levels]
    keys = [math.log(x) for x in scales]
    lower = [FineReal.of(r0), FineReal.of(r0).plus_term(1, LogMag.of(math.log(r0 * (scales[0] - 1.0))))]
    log_lower = [LogMag.of(math.log(r0)), rp[0]]
    for n in range(2, d + 1):
        # a_n = M^{-(n-1)}(s_{n-1} r_{n-1}); a_{n-1} = M^{-(n-1)}(r_{n-1})
        rho = _pull_ratio(f, LogMag.of(math.log(math.log(scales[n - 1]))), [rp[n - 1 - i] for i in range(1, n)])
        lower.append(_grow(lower[-1], log_lower[-1], rho))
        log_lower.append(LogMag.of(math.log(float(lower[-1]))))
    upper = []
    for n in range(1, d + 1):
        # M^{-n}(2 r_n) = a_n * exp(rho), rho pulled back from ln 2 at r_n
        rho = _pull_ratio(f, LogMag.of(math.log(LN2)), [rp[n - i] for i in range(1, n + 1)])
        upper.append(Bound(_grow(lower[n], log_lower[n], rho), tuple(keys[:n]) + (LN2,)))
    lower = [Bound(v, tuple(keys[:n])) for n, v in enumerate(lower)]
    return lower, upper


# -- pullback -------------------------------------------------------------------------

def _transfer(scaffold: Scaffold, n: int, delta_next: complex, j: int) -> complex:
    """Chart value at level ``n`` of the point ``z_{n+1} + delta_next``, in branch ``j``."""
    lv, nx = scaffold.levels[n], scaffold.levels[n + 1]
    fr, fn = lv.frame, nx.frame
    ln_s = math.log(fn.scale)
    u = clog1p(delta_next * complex(math.cos(fn.theta), -math.sin(fn.theta)) * fn.inv_r_prime())
    w = ln_s + 1j * (fn.theta - fr.arg_f) + complex(u)
    k = round((TWO_PI * j - w.imag) / TWO_PI)
    w += 1j * TWO_PI * k
    if w.imag <= TWO_PI * j - math.pi:
        w += 1j * TWO_PI
    return w


def _in_rect(w: complex, j: int) -> bool:
    tol = DILATION * RECT_DIAM
    return abs(w.real) <= LN2 + tol and abs(w.imag - TWO_PI * j) <= math.pi + tol


def pullback(scaffold: Scaffold, itinerary: Itinerary) -> EremenkoPoint:
    L = len(itinerary)
    if L > scaffold.depth:
        raise ValueError(f"itinerary length {L} exceeds scaffold depth {scaffold.depth}")
    js = itinerary.symbols
    ws = [0j] * L
    deltas = [0j] * L
    ws[L - 1] = complex(0.0, TWO_PI * js[L - 1])
    for n in range(L - 1, -1, -1):
        try:
            if n < L - 1:
                ws[n] = _transfer(scaffold, n, deltas[n + 1], js[n])
            deltas[n] = complex(inverse_g(scaffold.levels[n].frame, ws[n])[0])
        except (InverseFailed, BranchLost, OutsideDisc) as exc:
            raise PullbackFailed(n, exc) from exc
    return _make_point(scaffold, itinerary, tuple(deltas), tuple(ws))


def _make_point(scaffold, itinerary, deltas, ws):
    L = len(itinerary)
    log_diam = LogMag.of(math.log(scaffold.levels[L - 1].quad(itinerary.symbols[L - 1]).diameter))
    for k in range(L - 1):
        fr = scaffold.levels[k].frame
        # |(f^{-1})'| <= r' / (c N M(r')) on the quads
        log_diam = log_diam - fr.log_M + (-math.log(fr.n_over_r) - math.log(scaffold.levels[k].c))
    checks = orbit_checks(scaffold, itinerary, deltas)
    return EremenkoPoint(itinerary, deltas, ws, log_diam, checks, scaffold.levels[0].frame)


def orbit_checks(scaffold: Scaffold, itinerary: Itinerary, deltas) -> tuple:
    """Per level: ``g_n(delta_n)`` lies in the dilated ``R_{j_n}`` and maps onto ``delta_{n+1}``."""
    out = []
    L = len(itinerary)
    for n in range(L):
        fr = scaffold.levels[n].frame
        j = itinerary.symbols[n]
        try:
            w = complex(g_local(fr, deltas[n])[0])
        except (OutsideDisc, BranchLost):
            out.append(False)
            continue
        ok = _in_rect(w, j)
        if n < L - 1:
            ok = ok and abs(w - _transfer(scaffold, n, deltas[n + 1], j)) <= TRANSITION_TOL
        out.append(bool(ok))
    return tuple(out)


def perturbed(scaffold: Scaffold, point: EremenkoPoint, offset: complex = 0.5) -> EremenkoPoint:
    """The same point with its centre moved by ``offset``; later levels are left as they were."""
    deltas = (point.deltas[0] + offset,) + point.deltas[1:]
    return _make_point(scaffold, point.itinerary, deltas, point.ws)


# -- fast escape ----------------------------------------------------------------------

def _excess(scaffold: Scaffold) -> list:
    """``ln(M^n(R_lower) / r'_n)`` for ``n < depth``."""
    f = scaffold.f
    d = scaffold.depth
    eps = [0.0] * d
    for n in range(d - 2, -1, -1):
        rho = math.log(scaffold.levels[n + 1].frame.scale) + eps[n + 1]
        lam = log_deriv_growth(f, scaffold.levels[n].frame.log_r_prime)
        eps[n] = math.log1p(rho / float(lam)) if lam.is_float else 0.0
    return eps


def verify_fast_escape(f: EntireFunction, point: EremenkoPoint, scaffold: Scaffold, horizon: int) -> dict:
    """Compare ``ln|f^n(center)|`` with ``ln M^n(R_lower)`` for ``n = 0..horizon``."""
    if horizon > scaffold.depth:
        raise ValueError("horizon exceeds scaffold depth")
    eps = _excess(scaffold)
    d = scaffold.depth
    L = point.depth
    levels = []
    for n in range(horizon + 1):
        if n < L:
            fr = scaffold.levels[n].frame
            rot = complex(math.cos(fr.theta), -math.sin(fr.theta))
            mu = float(clog1p(point.deltas[n] * rot * fr.inv_r_prime()).real)
            margin = mu - eps[n]
        elif n == L:
            fr = scaffold.levels[n - 1].frame
            mu = float(g_local(fr, point.deltas[n - 1])[0].real)
            # compare against r_L when L = depth, otherwise against M^L(R_lower) = r'_L e^{eps}
            margin = mu if n == d else mu - math.log(scaffold.levels[n].frame.scale) - eps[n]
        else:
            levels.append({"n": n, "margin": None, "pass": False})
            continue
        levels.append({"n": n, "margin": margin, "pass": bool(margin >= -1e-9)})
    return {
        "levels": levels,
        "orbit_check": list(point.orbit_check),
        "all_pass": all(lv["pass"] for lv in levels) and all(point.orbit_check),
    }


def quad_vertex_moduli_ok(scaffold: Scaffold, n: int) -> bool:
    """Every quad vertex at level ``n`` has modulus in ``(r_n, 2 r_n)`` (log scale)."""
    lv = scaffold.levels[n]
    fr = lv.frame
    rot = complex(math.cos(fr.theta), -math.sin(fr.theta))
    # ln|z| - ln r_n = ln s + Re log1p(delta e^{-i theta} / r')
    lo, hi = 0.0, LN2
    for q in lv.quads:
        u = np.real(clog1p(np.asarray(q.corner_deltas) * rot * fr.inv_r_prime())) + math.log(fr.scale)
        if not (np.all(u > lo) and np.all(u < hi)):
            return False
    return True


__all__ = [
    "Itinerary",
    "EremenkoPoint",
    "Scaffold",
    "Bound",
    "Level",
    "build_scaffold",
    "pullback",
    "verify_fast_escape",
    "perturbed",
    "orbit_checks",
    "quad_vertex_moduli_ok",
    "NEG_INF",
]
