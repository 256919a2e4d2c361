"""Catalog of transcendental entire functions.

Every kind knows three things: a log-space evaluator ``log f(z)`` that stays finite
far past float overflow, its logarithmic derivative ``f'/f``, and the magnitudes of
its Taylor coefficients.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ArgumentOutOfEvaluableRange, DescriptorSyntaxError, RangeExceeded, UnknownKind
from .numerics import LN2, NEG_INF, LogMag, XComplex

KINDS = ("exp", "fatou", "coshsq", "sin", "polyexp", "series")
KIND_CODE = {k: i for i, k in enumerate(KINDS)}

# directions of maximum modulus for large |z|, used by the log-space continuation
MAX_DIRECTIONS = {
    "exp": (0.0,),
    "fatou": (math.pi, 0.0),
    "coshsq": (0.0, math.pi),
    "sin": (math.pi / 2, -math.pi / 2),
    "polyexp": (0.0,),
    "series": (),
}

# kinds whose maximum-modulus point, central index and chart are known in closed form
ASYMPTOTIC_KINDS = ("exp", "coshsq", "fatou")


@dataclass(frozen=True)
class EntireFunction:
    kind: str
    coeffs: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnknownKind(self.kind)
        if self.kind in ("polyexp", "series"):
            c = tuple(float(x) for x in self.coeffs)
            while len(c) > 1 and c[-1] == 0.0:
                c = c[:-1]
            if not c or all(x == 0.0 for x in c):
                raise UnknownKind(f"{self.kind} needs a nonzero coefficient")
            object.__setattr__(self, "coeffs", c)
        elif self.coeffs:
            raise UnknownKind(f"{self.kind} takes no coefficients")

    @property
    def code(self):
        return KIND_CODE[self.kind]

    @property
    def descriptor(self):
        if self.coeffs:
            return self.kind + ":" + ",".join(repr(c) for c in self.coeffs)
        return self.kind

    @property
    def has_growth_law(self):
        return self.kind != "series" and not (self.kind == "polyexp" and self.coeffs[-1] < 0)

    def __str__(self):
        return self.descriptor


_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"


def parse_spec(text: str) -> EntireFunction:
    """Parse ``exp | fatou | coshsq | sin | polyexp:c0,c1,... | series:c0,c1,...``."""
    s = text.strip()
    m = re.match(r"[A-Za-z]+", s)
    if not m:
        raise DescriptorSyntaxError("expected a function kind", text, 0)
    kind = m.group(0).lower()
    if kind not in KINDS:
        raise UnknownKind(f"unknown function kind {kind!r}")
    rest = s[m.end():]
    if kind in ("polyexp", "series"):
        if not rest.startswith(":"):
            raise DescriptorSyntaxError("expected ':' followed by coefficients", text, m.end())
        coeffs = []
        pos = m.end() + 1
        for part in rest[1:].split(","):
            if not re.fullmatch(_NUM, part.strip()):
                raise DescriptorSyntaxError(f"bad coefficient {part!r}", text, pos)
            coeffs.append(float(part))
            pos += len(part) + 1
        return EntireFunction(kind, tuple(coeffs))
    if rest:
        raise DescriptorSyntaxError("unexpected trailing text", text, m.end())
    return EntireFunction(kind)


# -- vectorised log-space evaluation ---------------------------------------------------------

def clog1p(u):
    """``log(1+u)`` for complex ``u`` keeping the real part accurate when ``|u|`` is tiny."""
    u = np.asarray(u, dtype=complex)
    re_part = 0.5 * np.log1p(2.0 * u.real + (u.real * u.real + u.imag * u.imag))
    return re_part + 1j * np.arctan2(u.imag, 1.0 + u.real)


def _horner(c, z):
    acc = np.zeros_like(z)
    for a in reversed(c):
        acc = acc * z + a
    return acc


def _horner_d(c, z):
    acc = np.zeros_like(z)
    for k in range(len(c) - 1, 0, -1):
        acc = acc * z + k * c[k]
    return acc


def log_eval(f: EntireFunction, z):
    """Some branch of ``log f(z)``, elementwise; ``-inf`` real part at zeros."""
    z = np.asarray(z, dtype=complex)
    k = f.kind
    with np.errstate(all="ignore"):
        if k == "exp":
            out = z.copy()
        elif k == "fatou":
            out = np.empty_like(z)
            pos = z.real >= -20.0
            zp = z[pos]
            out[pos] = np.log(zp + 1.0 + np.exp(-zp))
            zn = z[~pos]
            out[~pos] = -zn + clog1p((zn + 1.0) * np.exp(zn))
        elif k == "coshsq":
            w = np.where(z.real < 0, -z, z)
            out = 2.0 * (w + np.log(1.0 + np.exp(-2.0 * w)) - LN2)
        elif k == "sin":
            w = np.where(z.imag < 0, -z, z)
            out = -1j * w + np.log(np.expm1(2j * w) / 2j)
            out = np.where(z.imag < 0, out + 1j * math.pi, out)
        elif k == "polyexp":
            out = np.log(_horner(f.coeffs, z)) + z
        else:
            out = np.log(_horner(f.coeffs, z))
    return out


def log_deriv(f: EntireFunction, z):
    """``f'(z)/f(z)`` elementwise, without forming ``f``."""
    z = np.asarray(z, dtype=complex)
    k = f.kind
    with np.errstate(all="ignore"):
        if k == "exp":
            return np.ones_like(z)
        if k == "fatou":
            ez = np.exp(np.where(z.real < 0, z, -z))
            a = (1.0 - ez) / (z + 1.0 + ez)
            b = (ez - 1.0) / ((z + 1.0) * ez + 1.0)
            return np.where(z.real < 0, b, a)
        if k == "coshsq":
            return 2.0 * np.tanh(z)
        if k == "sin":
            return 1.0 / np.tan(z)
        if k == "polyexp":
            return _horner_d(f.coeffs, z) / _horner(f.coeffs, z) + 1.0
        return _horner_d(f.coeffs, z) / _horner(f.coeffs, z)


def _native(z) -> complex:
    if isinstance(z, XComplex):
        try:
            return z.to_complex()
        except RangeExceeded as exc:
            raise ArgumentOutOfEvaluableRange("argument beyond native range") from exc
    return complex(z)


def _checked_log(f, z):
    L = complex(log_eval(f, np.array([z]))[0])
    if not (math.isfinite(L.imag) and (math.isfinite(L.real) or L.real == -math.inf)):
        raise ArgumentOutOfEvaluableRange(f"{f} cannot be evaluated at {z!r}")
    return L


def eval(f: EntireFunction, z) -> XComplex:  # noqa: A001 - mirrors the math name
    z = _native(z)
    L = _checked_log(f, z)
    try:
        return XComplex.from_log(L)
    except RangeExceeded as exc:
        raise ArgumentOutOfEvaluableRange(str(exc)) from exc


def eval_derivative(f: EntireFunction, z) -> XComplex:
    z = _native(z)
    L = _checked_log(f, z)
    d = complex(log_deriv(f, np.array([z]))[0])
    if d == 0:
        return XComplex.zero()
    if L.real == -math.inf:
        # zero of f: fall back to direct formulas
        return XComplex.from_complex(_direct_derivative(f, z))
    try:
        return XComplex.from_log(L + np.log(d))
    except RangeExceeded as exc:
        raise ArgumentOutOfEvaluableRange(str(exc)) from exc


def _direct_derivative(f, z):
    k = f.kind
    if k == "exp":
        return np.exp(z)
    if k == "fatou":
        return 1 - np.exp(-z)
    if k == "coshsq":
        return np.sinh(2 * z)
    if k == "sin":
        return np.cos(z)
    zz = np.array([z])
    if k == "polyexp":
        return complex(((_horner_d(f.coeffs, zz) + _horner(f.coeffs, zz)) * np.exp(zz))[0])
    return complex(_horner_d(f.coeffs, zz)[0])


# -- Taylor coefficients --------------------------------------------------------------

def coeff_logmag(f: EntireFunction, n: int) -> LogMag:
    """``ln|a_n|``; ``NEG_INF`` where the coefficient vanishes."""
    v = float(coeff_logmag_array(f, np.array([n]))[0])
    return NEG_INF if v == -math.inf else LogMag.of(v)


def coeff_logmag_array(f: EntireFunction, n) -> np.ndarray:
    from scipy.special import gammaln

    n = np.asarray(n, dtype=np.int64)
    if np.any(n < 0):
        raise ValueError("coefficient index must be nonnegative")
    nf = n.astype(float)
    k = f.kind
    out = np.full(n.shape, -np.inf)
    if k == "exp":
        out = -gammaln(nf + 1.0)
    elif k == "fatou":
        out = -gammaln(nf + 1.0)
        out = np.where(n == 0, math.log(2.0), out)
        out = np.where(n == 1, -np.inf, out)
    elif k == "coshsq":
        even = n % 2 == 0
        out = np.where(even, (nf - 1.0) * LN2 - gammaln(nf + 1.0), -np.inf)
        out = np.where(n == 0, 0.0, out)
    elif k == "sin":
        out = np.where(n % 2 == 1, -gammaln(nf + 1.0), -np.inf)
    elif k == "polyexp":
        # a_n = (1/n!) * sum_i c_i n(n-1)...(n-i+1)
        acc = np.zeros(n.shape)
        fall = np.ones(n.shape)
        for i, c in enumerate(f.coeffs):
            if i > 0:
                fall = fall * np.maximum(nf - (i - 1), 0.0)
            acc = acc + c * fall
        with np.errstate(divide="ignore"):
            out = np.log(np.abs(acc)) - gammaln(nf + 1.0)
    else:
        c = np.abs(np.array(f.coeffs))
        inside = n < len(c)
        with np.errstate(divide="ignore"):
            vals = np.log(c[np.minimum(n, len(c) - 1)])
        out = np.where(inside, vals, -np.inf)
    return np.asarray(out, dtype=float)


def coeff_abs_exact(f: EntireFunction, n: int) -> Fraction:
    """``|a_n|`` as an exact rational (float coefficients are taken at face value)."""
    k = f.kind
    if k == "exp":
        return Fraction(1, math.factorial(n))
    if k == "fatou":
        return Fraction(2) if n == 0 else Fraction(0) if n == 1 else Fraction(1, math.factorial(n))
    if k == "coshsq":
        if n == 0:
            return Fraction(1)
        return Fraction(2 ** (n - 1), math.factorial(n)) if n % 2 == 0 else Fraction(0)
    if k == "sin":
        return Fraction(1, math.factorial(n)) if n % 2 else Fraction(0)
    if k == "polyexp":
        acc, fall = Fraction(0), 1
        for i, c in enumerate(f.coeffs):
            if i > 0:
                fall *= max(n - (i - 1), 0)
            acc += Fraction(c) * fall
        return abs(acc) / math.factorial(n)
    return abs(Fraction(f.coeffs[n])) if n < len(f.coeffs) else Fraction(0)


# -- growth along the maximum-modulus ray ------------------------------------------------

def growth_law(f: EntireFunction, log_r) -> LogMag:
    """``ln M(r)`` from ``ln r`` via the closed form on the maximum-modulus ray."""
    log_r = LogMag.of(log_r)
    r = log_r.exp()
    k = f.kind
    if k == "series":
        # |a_d| r^d (1 + O(1/r)), exact in floats once ln r is large
        if log_r.is_float and log_r.v < 300.0:
            raise ArgumentOutOfEvaluableRange("series growth law needs ln r >= 300")
        c = [a for a in f.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        return log_r * float(len(c) - 1) + math.log(abs(c[-1]))
    if not f.has_growth_law:
        raise ArgumentOutOfEvaluableRange(f"no growth law for {f}")
    if r.is_float:
        x = r.v
        if k == "exp":
            return LogMag.of(x)
        if k == "fatou":
            return LogMag.of(x + math.log1p((1.0 - x) * math.exp(-x)))
        if k == "coshsq":
            return LogMag.of(2.0 * (x + math.log1p(math.exp(-2.0 * x)) - LN2))
        if k == "sin":
            return LogMag.of(x - LN2 + math.log1p(-math.exp(-2.0 * x)))
        return LogMag.of(x) + _log_poly_abs(f.coeffs, log_r)
    if k in ("exp", "fatou"):
        return r
    if k == "coshsq":
        return r * 2.0
    if k == "sin":
        return r
    return r + _log_poly_abs(f.coeffs, log_r)


def _log_poly_abs(c, log_r: LogMag) -> LogMag:
    if log_r.is_float and log_r.v < 600.0 / max(1, len(c)):
        x = math.exp(log_r.v)
        return LogMag.of(math.log(abs(sum(a * x**i for i, a in enumerate(c)))))
    d = len(c) - 1
    return log_r * float(d) + math.log(abs(c[-1]))


def growth_direction(f: EntireFunction, theta: float):
    """Argument of ``f(z)`` for huge ``z`` on the ray ``theta`` (a max-modulus ray).

    Beyond float resolution the true argument is unknowable, so the orbit is assumed to
    stay on the maximum-modulus orbit; for fatou that is the negative axis again.
    """
    k = f.kind
    if k == "fatou":
        return math.pi
    if k == "sin":
        return math.copysign(math.pi / 2, math.sin(theta))
    return 0.0


def log_deriv_growth(f: EntireFunction, log_r) -> LogMag:
    """``d ln M / d ln r`` from the growth law."""
    log_r = LogMag.of(log_r)
    r = log_r.exp()
    k = f.kind
    if r.is_float:
        x = r.v
        if k in ("exp",):
            return LogMag.of(x)
        if k == "fatou":
            return LogMag.of(x * (1.0 - math.exp(-x)) / (1.0 - (x - 1.0) * math.exp(-x)))
        if k == "coshsq":
            return LogMag.of(2.0 * x * math.tanh(x))
        if k == "sin":
            return LogMag.of(x / math.tanh(x))
        if k == "polyexp":
            z = np.array([x + 0j])
            return LogMag.of(x * (1.0 + float((_horner_d(f.coeffs, z) / _horner(f.coeffs, z))[0].real)))
        raise ArgumentOutOfEvaluableRange(f"no growth law for {f}")
    if k == "coshsq":
        return r * 2.0
    return r
