import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from escape_atlas.errors import InvalidValue, RangeExceeded
from escape_atlas.numerics import (
    NEG_INF,
    FineReal,
    LogMag,
    XComplex,
    logmag_of,
    xc_arith,
    xc_normalize,
)

finite = st.floats(min_value=-1e100, max_value=1e100, allow_nan=False)
nonzero_c = st.complex_numbers(min_magnitude=1e-100, max_magnitude=1e100, allow_nan=False, allow_infinity=False)


# -- XComplex ------------------------------------------------------------------------

def test_normalize_zero():
    x = xc_normalize(0j, 57)
    assert x.mantissa == 0 and x.exponent == 0


def test_normalize_power_of_two():
    x = xc_normalize(8 + 0j, 0)
    assert x.mantissa == 1 and x.exponent == 3


def test_normalize_three_four():
    x = xc_normalize(3 + 4j, 10)
    assert abs(abs(x.mantissa) - 1.25) < 1e-15
    assert x.exponent == 12


def test_normalize_rejects_nan():
    with pytest.raises(InvalidValue):
        xc_normalize(complex(math.nan, 0), 0)


def test_mul_by_zero():
    a = XComplex.from_complex(3 - 2j)
    assert xc_arith(a, XComplex.zero(), "mul").is_zero()


def test_mul_adds_exponents():
    a = xc_normalize(1 + 0j, 100)
    p = xc_arith(a, a, "mul")
    assert p.mantissa == 1 and p.exponent == 200


def test_add_absorbs_negligible():
    a = xc_normalize(1.5 + 0j, 1000)
    s = xc_arith(a, xc_normalize(1 + 0j, 0), "add")
    assert s.exponent == 1000
    assert abs(s.mantissa - 1.5) <= 2.3e-16


def test_exponent_overflow():
    a = xc_normalize(1 + 0j, 2**61 + 5)
    with pytest.raises(RangeExceeded):
        xc_arith(a, a, "mul")


def test_logmag_examples():
    assert logmag_of(XComplex.zero()) == NEG_INF
    assert abs(float(logmag_of(xc_normalize(1 + 0j, 10))) - 10 * math.log(2)) < 1e-14
    assert abs(float(logmag_of(xc_normalize(1.25 * (3 + 4j) / 5, 2))) - math.log(5)) < 1e-14


def test_from_log_huge():
    x = XComplex.from_log(complex(1e5, 0.5))
    assert abs(float(x.logmag()) - 1e5) < 1e-9
    assert abs(math.atan2(x.mantissa.imag, x.mantissa.real) - 0.5) < 1e-12
    with pytest.raises(RangeExceeded):
        x.to_complex()


@given(nonzero_c)
def test_roundtrip_native(z):
    # a shared exponent cannot hold a component 2^-1022 times smaller than the other exactly
    small = min(abs(z.real), abs(z.imag))
    assume(small == 0 or small >= abs(z) * 2.0**-960)
    assert XComplex.from_complex(z).to_complex() == z


@given(nonzero_c, nonzero_c)
def test_logmag_of_product(a, b):
    xa, xb = XComplex.from_complex(a), XComplex.from_complex(b)
    lhs = float(logmag_of(xa * xb))
    assert abs(lhs - float(logmag_of(xa)) - float(logmag_of(xb))) <= 1e-12 * max(1.0, abs(lhs))


@given(nonzero_c, nonzero_c)
def test_logmag_ordering(a, b):
    la, lb = logmag_of(XComplex.from_complex(a)), logmag_of(XComplex.from_complex(b))
    if abs(a) < abs(b):
        assert la <= lb
    elif abs(a) > abs(b):
        assert la >= lb


@given(nonzero_c, nonzero_c)
def test_add_matches_native(a, b):
    s = (XComplex.from_complex(a) + XComplex.from_complex(b)).to_complex()
    assert abs(s - (a + b)) <= 1e-15 * (abs(a) + abs(b))


# -- LogMag ----------------------------------------------------------------------------

def test_tower_roundtrip():
    x = LogMag.of(1e5)
    assert x.exp().log() == x
    t = x.exp().exp()
    assert t.level == 2 and t.log().log() == x


def test_tower_ordering():
    a = LogMag.of(800.0).exp()
    b = LogMag.of(801.0).exp()
    assert LogMag.of(1e300) < a < b
    assert -b < -a < LogMag.of(-1e300)


def test_tower_add_absorbs():
    t = LogMag.of(1e4).exp()
    assert t + 5.0 == t
    assert (t - t).is_zero()


def test_margin_levels():
    a = LogMag.of(1000.0).exp()
    b = LogMag.of(1000.5).exp()
    assert b.margin(a) == (1, 0.5)
    k, d = LogMag.of(3.0).margin(LogMag.of(5.0))
    assert (k, d) == (0, -2.0)
    assert a.margin(LogMag.of(1.0))[1] == math.inf


def test_json_seventeen_digits():
    assert LogMag.of(0.1).to_json() == "0.10000000000000001"
    assert LogMag.of(1e4).exp().to_json() == "exp^1(10000)"


@given(finite, finite)
def test_float_ordering(a, b):
    assert (LogMag.of(a) < LogMag.of(b)) == (a < b)


@given(st.floats(min_value=-700, max_value=700), st.floats(min_value=-700, max_value=700))
def test_sum_matches_float(a, b):
    assert abs(float(LogMag.of(a) + LogMag.of(b)) - (a + b)) <= 1e-12 * max(1, abs(a) + abs(b))


@settings(max_examples=50)
@given(st.floats(min_value=701, max_value=1e8), st.floats(min_value=701, max_value=1e8))
def test_exp_monotone(a, b):
    ea, eb = LogMag.of(a).exp(), LogMag.of(b).exp()
    assert (ea < eb) == (a < b)


@settings(max_examples=50)
@given(st.floats(min_value=701, max_value=1e6), st.floats(min_value=1.0, max_value=1e3))
def test_product_is_sum_of_logs(a, b):
    # ln(x y) = ln x + ln y with x = e^a, y = e^b as towers
    x, y = LogMag.of(a).exp(), LogMag.of(b).exp()
    assert abs(float((x * y).log()) - (a + b)) <= 1e-12 * (a + b)


def test_nan_rejected():
    with pytest.raises(InvalidValue):
        LogMag.of(math.nan)


# -- FineReal ---------------------------------------------------------------------------

def test_finereal_tail_order():
    a = FineReal.of(1250.0)
    b = a.plus_term(1, LogMag.of(-1500.0))
    c = b.plus_term(1, LogMag.of(-1400.0))
    assert a < b < c
    assert float(a) == float(c)
    assert c.plus_term(-1, LogMag.of(-1400.0)) == b


def test_finereal_float_terms():
    a = FineReal.of(1.0).plus_term(1, LogMag.of(math.log(1e-20)))
    assert a > 1.0 and a < 1.0 + 1e-15
