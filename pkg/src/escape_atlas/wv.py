"""Wiman-Valiron frames: central index, local logarithm chart and quadrilaterals.

A frame at radius ``r'`` is described in local coordinates ``delta = z - z(r')``.
Near the maximum-modulus point the chart ``g(delta) = log f(z(r') + delta) - log f(z(r'))``
is close to the linear map ``delta -> N * delta / z(r')``.  For radii beyond float
range (only for kinds with closed-form maximum directions) the chart is exact and
linear, ``g(delta) = kappa * delta``, and the frame runs in "asymptotic" mode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import qmc

from .efun import ASYMPTOTIC_KINDS, EntireFunction, coeff_abs_exact, coeff_logmag_array, log_deriv, log_eval
from .errors import (
    ArgumentOutOfEvaluableRange,
    BranchLost,
    IndexCapExceeded,
    InverseFailed,
    NoAdmissibleRadius,
    OutsideDisc,
    PreconditionError,
)
from .mmod import SEARCH_LOG_RADIUS, max_modulus
from .numerics import LN2, LogMag, XComplex

TWO_PI = 2.0 * math.pi
K_MIN = 20.0 * math.pi
EPS1_BOUND = 1.0 / 100.0
KN_BOUND = 1.0 / 8.0
INDEX_CAP = 10**6
EXACT_TIE_LIMIT = 5000
# above this radius the closed-form kinds switch to asymptotic frames
ASYMPTOTIC_RADIUS = 2e5
NEWTON_TOL = 1e-10
C_FLOOR = 0.1

_KAPPA = {"exp": 1.0, "coshsq": 2.0, "fatou": -1.0}
_THETA = {"exp": 0.0, "coshsq": 0.0, "fatou": math.pi}


def central_index(f: EntireFunction, r: float, cap: int = INDEX_CAP) -> int:
    """Largest ``n`` maximising ``|a_n| r^n``."""
    if not r > 0:
        raise ValueError("radius must be positive")
    lr = math.log(r)
    if f.kind == "series":
        n = np.arange(len(f.coeffs))
        return _argmax_last(coeff_logmag_array(f, n) + n * lr, n, f, r)
    hi = 128
    while True:
        n = np.arange(hi)
        terms = coeff_logmag_array(f, n) + n * lr
        best = _argmax_last(terms, n, f, r)
        fin = np.isfinite(terms)
        after = terms[(n > best) & fin]
        if len(after) >= 51 and np.all(np.diff(after[-51:]) < 0):
            return best
        if hi >= cap:
            raise IndexCapExceeded(f"no finite maximal term below n={cap}")
        hi = min(hi * 4, cap)


def _argmax_last(terms, n, f, r):
    top = np.max(terms)
    near = n[terms >= top - 1e-12 * max(1.0, abs(top))]
    if len(near) == 1 or near[-1] > EXACT_TIE_LIMIT:
        return int(near[-1])
    # log-space rounding cannot tell a tie from a near tie; settle it exactly
    q = Fraction(r)
    exact = [coeff_abs_exact(f, int(k)) * q ** int(k) for k in near]
    top = max(exact)
    return int(max(k for k, t in zip(near, exact) if t == top))


def asymptotic_central_index(f: EntireFunction, log_r: LogMag):
    """``(N or None, N/r)`` from closed forms for exp, fatou, coshsq."""
    if not log_r.is_float or log_r.v > 700:
        return None, (2.0 if f.kind == "coshsq" else 1.0)
    r = math.exp(log_r.v)
    if f.kind == "coshsq":
        m = math.floor((1.0 + math.sqrt(1.0 + 16.0 * r * r)) / 2.0)
        m -= m % 2
        return (int(m) if m < 2**62 else None), m / r
    n = math.floor(r)
    return (int(n) if n < 2**62 else None), n / r


@dataclass(frozen=True, eq=False)
class WVFrame:
    f: EntireFunction
    log_r_prime: LogMag
    theta: float
    N: int | None
    n_over_r: float
    K: float
    alpha: float
    eps1_max: float
    log_M: LogMag
    mode: str
    scale: float = 1.0
    z_native: complex | None = None
    L0: complex = 0j
    arg_f: float = 0.0
    samples: int = 100
    seed: int = 0

    @property
    def disc_radius(self) -> float:
        return self.K / self.n_over_r

    @property
    def log_N(self) -> LogMag:
        if self.N is not None:
            return LogMag.of(math.log(self.N))
        return self.log_r_prime + math.log(self.n_over_r)

    @property
    def r_prime(self) -> float:
        return float(self.log_r_prime.exp())

    @property
    def z_r(self) -> XComplex:
        if self.z_native is not None:
            return XComplex.from_complex(self.z_native)
        return XComplex.from_log(complex(float(self.log_r_prime), self.theta))

    @property
    def slope(self) -> complex:
        """``N / z(r')``."""
        return self.n_over_r * complex(math.cos(self.theta), -math.sin(self.theta))

    @property
    def k_over_n(self) -> float:
        return float((LogMag.of(math.log(self.K)) - self.log_N).exp())

    @property
    def admissible(self) -> bool:
        return self.eps1_max <= EPS1_BOUND and self.k_over_n < KN_BOUND

    @property
    def kappa(self) -> float:
        return _KAPPA[self.f.kind]

    def inv_r_prime(self) -> float:
        return float((-self.log_r_prime).exp())

    def absolute(self, delta):
        if self.z_native is None:
            raise ArgumentOutOfEvaluableRange("asymptotic frame has no native base point")
        return self.z_native + np.asarray(delta, dtype=complex)


# -- the chart g ------------------------------------------------------------------

def _unwrap_to(G, w):
    return G + 1j * TWO_PI * np.round((np.imag(w) - np.imag(G)) / TWO_PI)


def g_local(frame: WVFrame, delta, steps: int = 32, check_disc: bool = True):
    """Branch of ``log(f(z)/f(z(r')))`` continuous along the segment from ``z(r')``."""
    delta = np.atleast_1d(np.asarray(delta, dtype=complex))
    if check_disc and np.any(np.abs(delta) > frame.disc_radius * (1 + 1e-12)):
        raise OutsideDisc("point outside the Wiman-Valiron disc")
    if frame.mode == "asymptotic":
        return frame.kappa * delta
    out = np.empty_like(delta)
    todo = np.arange(len(delta))
    n = steps
    while len(todo):
        t = np.linspace(0.0, 1.0, n + 1)[:, None]
        L = log_eval(frame.f, frame.z_native + t * delta[todo][None, :])
        d = np.diff(L, axis=0)
        d = d - 1j * TWO_PI * np.round(d.imag / TWO_PI)
        ok = np.all(np.abs(d.imag) <= math.pi / 2, axis=0) & np.all(np.isfinite(L), axis=0)
        tracked = d.sum(axis=0)
        direct = L[-1] - frame.L0
        out[todo[ok]] = _unwrap_to(direct[ok], tracked[ok])
        todo = todo[~ok]
        n *= 2
        if len(todo) and n > 1024 * steps:
            raise BranchLost("branch tracking needed more than 2**10 subdivisions")
    return out


def g_map(frame: WVFrame, z) -> complex:
    """Chart value at an absolute point ``z`` (native frames)."""
    if isinstance(z, XComplex):
        z = z.to_complex()
    if frame.z_native is None:
        raise ArgumentOutOfEvaluableRange("use g_local for asymptotic frames")
    return complex(g_local(frame, complex(z) - frame.z_native)[0])


def eps1_residual(frame: WVFrame, delta) -> np.ndarray:
    delta = np.atleast_1d(np.asarray(delta, dtype=complex))
    return np.abs(g_local(frame, delta) - frame.slope * delta)


def inverse_g(frame: WVFrame, w, verify: bool = True):
    """Newton solution of ``g(delta) = w`` seeded by the linear model."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if frame.mode == "asymptotic":
        return w / frame.kappa
    delta = w / frame.slope
    z0 = frame.z_native
    for _ in range(60):
        z = z0 + delta
        G = _unwrap_to(log_eval(frame.f, z) - frame.L0, w)
        res = G - w
        if np.all(np.abs(res) <= NEWTON_TOL):
            break
        step = res / log_deriv(frame.f, z)
        if not np.all(np.isfinite(step)):
            raise InverseFailed("Newton step not finite")
        delta = delta - step
    else:
        raise InverseFailed(f"Newton did not reach {NEWTON_TOL}")
    if verify:
        back = g_local(frame, delta)
        if np.max(np.abs(back - w)) > 1e-9:
            raise InverseFailed("Newton converged on another branch")
    return delta


# -- frames ---------------------------------------------------------------------------

def _disc_samples(n, seed):
    u = qmc.Halton(d=2, scramble=True, seed=seed).random(n)
    return np.sqrt(u[:, 0]) * (1 - 1e-9) * np.exp(1j * TWO_PI * u[:, 1])


def frame_at(
    f: EntireFunction,
    log_r_prime,
    K: float = K_MIN,
    alpha: float = 0.75,
    samples: int = 100,
    seed: int = 0,
    scale: float = 1.0,
) -> WVFrame:
    """Frame at a given radius, admissible or not."""
    lrp = LogMag.of(log_r_prime)
    asym = f.kind in ASYMPTOTIC_KINDS and (not lrp.is_float or lrp.v > math.log(ASYMPTOTIC_RADIUS))
    if asym:
        N, nr = asymptotic_central_index(f, lrp)
        frame = WVFrame(
            f, lrp, _THETA[f.kind], N, nr, K, alpha, 0.0,
            _asymptotic_log_M(f, lrp), "asymptotic", scale, samples=samples, seed=seed,
        )
    else:
        if not lrp.is_float or lrp.v > SEARCH_LOG_RADIUS:
            raise ArgumentOutOfEvaluableRange(f"no asymptotic frames for {f}")
        rp = math.exp(lrp.v)
        mm = max_modulus(f, rp)
        theta = float(mm.theta_star)
        z = rp * complex(math.cos(theta), math.sin(theta))
        L0 = complex(log_eval(f, np.array([z]))[0])
        N = central_index(f, rp)
        if N == 0:
            raise IndexCapExceeded("central index is zero; radius too small for a frame")
        frame = WVFrame(
            f, lrp, theta, N, N / rp, K, alpha, 0.0, mm.log_M, "native", scale,
            z_native=z, L0=L0, arg_f=L0.imag, samples=samples, seed=seed,
        )
    pts = _disc_samples(samples, seed) * frame.disc_radius
    eps = float(np.max(eps1_residual(frame, pts)))
    return _replace(frame, eps1_max=eps)


def _replace(frame, **kw):
    d = {k: getattr(frame, k) for k in frame.__dataclass_fields__}
    d.update(kw)
    return WVFrame(**d)


def _asymptotic_log_M(f, lrp):
    from .efun import growth_law

    return growth_law(f, lrp)


def build_frame(
    f: EntireFunction,
    r: float | None = None,
    K: float = K_MIN,
    alpha: float = 0.75,
    *,
    log_r=None,
    candidates: int = 32,
    samples: int = 100,
    seed: int = 0,
    min_radius: float = 30.0,
) -> WVFrame:
    """First admissible frame with ``r'`` in ``[5r/4, 7r/4]`` (ascending scan)."""
    if K < K_MIN:
        raise PreconditionError(f"aperture K={K} below 20*pi")
    lr = LogMag.of(log_r) if log_r is not None else LogMag.of(math.log(r))
    if lr < LogMag.of(math.log(min_radius)):
        raise PreconditionError(f"radius below min_scaffold_radius={min_radius}")
    reasons = []
    for s in np.linspace(1.25, 1.75, candidates):
        s = float(s)
        try:
            fr = frame_at(f, lr + math.log(s), K, alpha, samples, seed, scale=s)
        except (IndexCapExceeded, BranchLost, OutsideDisc) as exc:
            reasons.append(str(exc))
            continue
        if fr.admissible:
            return fr
        reasons.append(f"s={s:.4f}: eps1={fr.eps1_max:.3g} K/N={fr.k_over_n:.3g}")
    raise NoAdmissibleRadius("no admissible radius among candidates; " + "; ".join(reasons[:3]))


# -- quadrilaterals -------------------------------------------------------------------

def rectangle_boundary(j: int, samples: int = 64):
    """Counter-clockwise boundary of ``R_j``; returns (points, inner-edge mask)."""
    lo, hi = TWO_PI * j - math.pi, TWO_PI * j + math.pi
    t = np.arange(samples) / samples
    bottom = -LN2 + 2 * LN2 * t + 1j * lo
    right = LN2 + 1j * (lo + (hi - lo) * t)
    top = LN2 - 2 * LN2 * t + 1j * hi
    left = -LN2 + 1j * (hi - (hi - lo) * t)
    pts = np.concatenate([bottom, right, top, left])
    inner = np.zeros(len(pts), dtype=bool)
    inner[3 * samples:] = True
    inner[0] = True
    return pts, inner


def rectangle_corners(j: int):
    lo, hi = TWO_PI * j - math.pi, TWO_PI * j + math.pi
    return np.array([complex(-LN2, lo), complex(LN2, lo), complex(LN2, hi), complex(-LN2, hi)])


@dataclass(frozen=True, eq=False)
class Quad:
    frame: WVFrame
    j: int
    corner_deltas: np.ndarray
    boundary_deltas: np.ndarray
    boundary_w: np.ndarray
    inner_mask: np.ndarray
    center_delta: complex = field(default=0j)

    @property
    def corners(self):
        if self.frame.z_native is not None:
            return [XComplex.from_complex(self.frame.z_native + d) for d in self.corner_deltas]
        zr = self.frame.z_r
        return [zr + XComplex.from_complex(d) for d in self.corner_deltas]

    @property
    def boundary_polyline(self) -> np.ndarray:
        return self.frame.absolute(self.boundary_deltas)

    @property
    def inner_edge_deltas(self):
        return self.boundary_deltas[self.inner_mask]

    @property
    def diameter(self) -> float:
        b = self.boundary_deltas
        return float(np.max(np.abs(b[:, None] - b[None, :])))


def quadrilateral(frame: WVFrame, j: int, samples: int = 64) -> Quad:
    if not frame.admissible:
        raise PreconditionError("quadrilaterals need an admissible frame")
    if abs(j) > frame.K / (10 * math.pi):
        raise ValueError(f"j={j} outside |j| <= K/(10 pi)")
    pts, inner = rectangle_boundary(j, samples)
    corners = rectangle_corners(j)
    sol = inverse_g(frame, np.concatenate([corners, pts, [TWO_PI * j * 1j]]))
    return Quad(frame, j, sol[:4], sol[4:-1], pts, inner, complex(sol[-1]))


def inner_edge_check(frame: WVFrame, quad: Quad) -> bool:
    """Every inner-edge point lies strictly inside the circle ``|z| = |z(r')|``."""
    d = quad.inner_edge_deltas * complex(math.cos(frame.theta), -math.sin(frame.theta))
    # |z_r + delta|^2 - r'^2 = 2 r' Re(delta e^{-i theta}) + |delta|^2
    val = d.real + 0.5 * np.abs(d) ** 2 * frame.inv_r_prime()
    return bool(np.all(val < 0))


def contraction_factor(frame: WVFrame) -> float:
    """Sampled ``min |f'|`` over the quads divided by ``N M(r') / r'``."""
    if not frame.admissible:
        raise PreconditionError("contraction factor needs an admissible frame")
    jmax = int(frame.K // (10 * math.pi))
    re = np.linspace(-LN2, LN2, 9)
    im = np.linspace(-TWO_PI * jmax - math.pi, TWO_PI * jmax + math.pi, 20 * (2 * jmax + 1) + 1)
    w = (re[:, None] + 1j * im[None, :]).ravel()
    delta = inverse_g(frame, w)
    if frame.mode == "asymptotic":
        ld = np.full(len(w), abs(frame.kappa))
    else:
        ld = np.abs(log_deriv(frame.f, frame.z_native + delta))
    # |f'| = M e^{Re w} |f'/f|;  divide by N M / r'
    return float(np.min(np.exp(w.real) * ld / frame.n_over_r))
