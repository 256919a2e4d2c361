"""Extended-range scalars.

Two carriers live here:

* ``XComplex``: a complex mantissa with ``1 <= |m| < 2`` and an integer power-of-two
  exponent.  Enough for values a few orders of exponentials past ``1e308``.
* ``LogMag``: a real number stored in level-index form, ``sign * exp^level(v)``.
  It holds ``ln|x|`` for magnitudes far beyond anything ``XComplex`` can reach,
  e.g. the logarithm of ``exp(exp(exp(1250)))``.  Ordering, addition and
  multiplication are exact up to rounding of the top-level float.

``FineReal`` is an ordered sum of a few ordinary floats and a tail of terms too
small to be represented as floats (their logs are ``LogMag``), used where two
radii differ by far less than one ulp but their order still matters.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import total_ordering

from .errors import InvalidValue, RangeExceeded

LN2 = math.log(2.0)

# Values with |x| <= exp(LIFT) stay plain floats; beyond that they move up a level.
LIFT = 700.0
_E_LIFT = math.exp(LIFT)

EXPONENT_LIMIT = 2**62


@total_ordering
@dataclass(frozen=True, eq=False)
class LogMag:
    """Real number ``sign * exp^level(v)``; canonical form keeps ``level`` minimal.

    Used for logarithms of magnitudes (hence the name) but the arithmetic is that of
    an extended real.  ``LogMag.NEG_INF`` is the log of zero.
    """

    level: int
    v: float
    sign: int = 1

    def __post_init__(self):
        if math.isnan(self.v):
            raise InvalidValue("LogMag from NaN")

    # -- construction -------------------------------------------------------------
    @staticmethod
    def of(x) -> "LogMag":
        if isinstance(x, LogMag):
            return x
        return _norm(0, float(x), 1)

    @property
    def is_float(self) -> bool:
        return self.level == 0

    def __float__(self):
        if self.level == 0:
            return self.v
        return math.inf * self.sign

    def _key(self):
        if self.level == 0:
            return (0, self.v)
        return (self.sign * self.level, self.sign * self.v)

    def __eq__(self, other):
        if not isinstance(other, LogMag):
            try:
                other = LogMag.of(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other):
        return self._key() < LogMag.of(other)._key()

    def __repr__(self):
        if self.level == 0:
            return f"LogMag({self.v!r})"
        s = "-" if self.sign < 0 else ""
        return f"LogMag({s}exp^{self.level}({self.v!r}))"

    # -- arithmetic -----------------------------------------------------------
    def __neg__(self):
        if self.level == 0:
            return LogMag(0, -self.v)
        return LogMag(self.level, self.v, -self.sign)

    def abs(self):
        return self if (self.level > 0 and self.sign > 0) or (self.level == 0 and self.v >= 0) else -self

    def is_negative(self):
        return self.sign < 0 if self.level else self.v < 0

    def exp(self) -> "LogMag":
        if self.level == 0:
            if self.v <= LIFT:
                return LogMag(0, math.exp(self.v))
            return LogMag(1, self.v)
        if self.sign < 0:
            return LogMag(0, 0.0)
        return LogMag(self.level + 1, self.v)

    def log(self) -> "LogMag":
        if self.level == 0:
            if self.v < 0:
                raise InvalidValue("log of a negative LogMag")
            return LogMag(0, math.log(self.v) if self.v > 0 else -math.inf)
        if self.sign < 0:
            raise InvalidValue("log of a negative LogMag")
        return _norm(self.level - 1, self.v, 1)

    def __add__(self, other):
        other = LogMag.of(other)
        a, b = self, other
        if a.level == 0 and b.level == 0:
            s = a.v + b.v
            if math.isinf(s) and not (math.isinf(a.v) or math.isinf(b.v)):
                return _big_add(a, b)
            return _norm(0, s, 1)
        if a.level == 0 and math.isinf(a.v):
            return a
        if b.level == 0 and math.isinf(b.v):
            return b
        return _big_add(a, b)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-LogMag.of(other))

    def __rsub__(self, other):
        return LogMag.of(other) - self

    def __mul__(self, other):
        other = LogMag.of(other)
        if self.level == 0 and other.level == 0:
            p = self.v * other.v
            if not math.isinf(p) or math.isinf(self.v) or math.isinf(other.v):
                return _norm(0, p, 1)
        if self.is_zero() or other.is_zero():
            return LogMag(0, 0.0)
        sign = -1 if self.is_negative() != other.is_negative() else 1
        mag = (self.abs().log() + other.abs().log()).exp()
        return -mag if sign < 0 else mag

    __rmul__ = __mul__

    def is_zero(self):
        return self.level == 0 and self.v == 0.0

    def margin(self, other) -> tuple[int, float]:
        """Signed difference after taking logs until both sides are plain floats.

        Returns ``(k, d)`` with ``d = log^k(self) - log^k(other)`` when the two
        sides agree in sign and level; otherwise ``d`` is ``+-inf``.
        """
        other = LogMag.of(other)
        if self.level == 0 and other.level == 0:
            return 0, self.v - other.v
        if self == other:
            return max(self.level, other.level), 0.0
        if self._key() < other._key():
            lo, hi, s = self, other, -1.0
        else:
            lo, hi, s = other, self, 1.0
        if lo.level == hi.level and lo.sign == hi.sign:
            return hi.level, s * hi.sign * abs(hi.v - lo.v)
        return max(self.level, other.level), s * math.inf

    def to_json(self) -> str:
        if self.level == 0:
            return _g17(self.v)
        s = "-" if self.sign < 0 else ""
        return f"{s}exp^{self.level}({_g17(self.v)})"


def _g17(x: float) -> str:
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return format(x, ".17g")


def _norm(level: int, v: float, sign: int) -> LogMag:
    if level == 0:
        if math.isinf(v) or abs(v) <= _E_LIFT:
            return LogMag(0, v)
        return LogMag(1, math.log(abs(v)), 1 if v > 0 else -1)
    while level > 0 and v <= LIFT:
        v = math.exp(v)
        level -= 1
    if level == 0:
        return LogMag(0, sign * v)
    return LogMag(level, v, sign)


def _big_add(a: LogMag, b: LogMag) -> LogMag:
    if a.abs() < b.abs():
        a, b = b, a
    if b.is_zero():
        return a
    la, lb = a.abs().log(), b.abs().log()
    d = float(lb - la)
    if d < -745.0:
        return a
    ratio = math.exp(d)
    same = a.is_negative() == b.is_negative()
    if not same and ratio >= 1.0:
        return LogMag(0, 0.0)
    step = math.log1p(ratio if same else -ratio)
    res = (la + step).exp()
    return -res if a.is_negative() else res


NEG_INF = LogMag(0, -math.inf)
LogMag.NEG_INF = NEG_INF


@dataclass(frozen=True)
class XComplex:
    """Complex value ``mantissa * 2**exponent`` with ``1 <= |mantissa| < 2`` (or zero)."""

    mantissa: complex
    exponent: int

    @staticmethod
    def zero():
        return XComplex(0j, 0)

    @staticmethod
    def from_complex(z) -> "XComplex":
        return xc_normalize(complex(z), 0)

    @staticmethod
    def from_log(L: complex) -> "XComplex":
        """Value ``exp(L)``; only the real part of ``L`` needs to be moderate."""
        re, im = L.real, L.imag
        if re == -math.inf:
            return XComplex.zero()
        if not (math.isfinite(re) and math.isfinite(im)):
            raise InvalidValue(f"non-finite log value {L!r}")
        e = math.floor(re / LN2)
        if abs(e) > EXPONENT_LIMIT:
            raise RangeExceeded("exponent outside the integer scale range")
        return xc_normalize(cmath.exp(complex(re - e * LN2, im)), int(e))

    def is_zero(self):
        return self.mantissa == 0

    def to_complex(self) -> complex:
        if self.is_zero():
            return 0j
        try:
            re = math.ldexp(self.mantissa.real, self.exponent)
            im = math.ldexp(self.mantissa.imag, self.exponent)
        except OverflowError as exc:
            raise RangeExceeded("value exceeds native complex range") from exc
        return complex(re, im)

    def logmag(self) -> LogMag:
        return logmag_of(self)

    def log(self) -> complex:
        """Principal-argument logarithm with the real part computed in log scale."""
        if self.is_zero():
            return complex(-math.inf, 0.0)
        return complex(math.log(abs(self.mantissa)) + self.exponent * LN2, cmath.phase(self.mantissa))

    def __mul__(self, other):
        return xc_arith(self, _as_xc(other), "mul")

    def __add__(self, other):
        return xc_arith(self, _as_xc(other), "add")

    __rmul__ = __mul__
    __radd__ = __add__

    def __neg__(self):
        return XComplex(-self.mantissa, self.exponent)

    def __sub__(self, other):
        return self + (-_as_xc(other))

    def __abs__(self):
        return float(self.logmag().exp())


def _as_xc(x) -> XComplex:
    return x if isinstance(x, XComplex) else XComplex.from_complex(x)


def xc_normalize(m: complex, exponent: int) -> XComplex:
    m = complex(m)
    if not (math.isfinite(m.real) and math.isfinite(m.imag)):
        raise InvalidValue(f"non-finite mantissa {m!r}")
    if m == 0:
        return XComplex(0j, 0)
    _, e = math.frexp(abs(m))
    shift = e - 1
    m = complex(math.ldexp(m.real, -shift), math.ldexp(m.imag, -shift))
    exponent = int(exponent) + shift
    # hypot rounding can leave |m| a hair outside [1, 2)
    a = abs(m)
    if a >= 2.0:
        m, exponent = m / 2, exponent + 1
    elif a < 1.0:
        m, exponent = m * 2, exponent - 1
    if abs(exponent) > EXPONENT_LIMIT:
        raise RangeExceeded("exponent outside the integer scale range")
    return XComplex(m, exponent)


def xc_arith(a: XComplex, b: XComplex, op: str) -> XComplex:
    if op == "mul":
        if a.is_zero() or b.is_zero():
            return XComplex.zero()
        return xc_normalize(a.mantissa * b.mantissa, a.exponent + b.exponent)
    if op == "add":
        if a.is_zero():
            return b
        if b.is_zero():
            return a
        if a.exponent < b.exponent:
            a, b = b, a
        d = a.exponent - b.exponent
        if d > 1100:
            return a
        mb = complex(math.ldexp(b.mantissa.real, -d), math.ldexp(b.mantissa.imag, -d))
        return xc_normalize(a.mantissa + mb, a.exponent)
    raise ValueError(f"unknown op {op!r}")


def logmag_of(x: XComplex) -> LogMag:
    if x.is_zero():
        return NEG_INF
    return LogMag.of(math.log(abs(x.mantissa)) + x.exponent * LN2)


@dataclass(frozen=True)
class FineReal:
    """Exact-order sum ``fsum(floats) + sum(sign * exp(log_abs))`` over tiny tail terms."""

    floats: tuple = ()
    tail: tuple = field(default=())  # ((sign, LogMag log|term|), ...)

    @staticmethod
    def of(x: float) -> "FineReal":
        return FineReal((float(x),), ())

    def plus_term(self, sign: int, log_abs: LogMag) -> "FineReal":
        log_abs = LogMag.of(log_abs)
        if log_abs == NEG_INF or sign == 0:
            return self
        if log_abs.is_float and log_abs.v > -700.0:
            return FineReal(self.floats + (sign * math.exp(log_abs.v),), self.tail)
        return FineReal(self.floats, self.tail + ((int(math.copysign(1, sign)), log_abs),))

    def __float__(self):
        return math.fsum(self.floats)

    def __neg__(self):
        return FineReal(tuple(-x for x in self.floats), tuple((-s, l) for s, l in self.tail))

    def _cmp(self, other) -> int:
        if not isinstance(other, FineReal):
            other = FineReal.of(other)
        head = math.fsum(self.floats + tuple(-x for x in other.floats))
        if head != 0.0:
            return 1 if head > 0 else -1
        terms = {}
        for s, l in self.tail:
            terms[l] = terms.get(l, 0) + s
        for s, l in other.tail:
            terms[l] = terms.get(l, 0) - s
        for l in sorted(terms, reverse=True):
            if terms[l] != 0:
                return 1 if terms[l] > 0 else -1
        return 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (FineReal, int, float)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        return hash(float(self))

    def to_json(self):
        return {
            "approx": _g17(float(self)),
            "tail": [[s, l.to_json()] for s, l in self.tail],
        }
