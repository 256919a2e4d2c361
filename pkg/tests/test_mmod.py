import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from escape_atlas.efun import eval as f_eval
from escape_atlas.efun import log_eval, parse_spec
from escape_atlas.errors import BelowCriticalRadius, InvalidRadius, NotBracketed
from escape_atlas.mmod import (
    check_logconvexity,
    critical_radius,
    inverse_M,
    iterate_M,
    log_M,
    max_modulus,
)
from escape_atlas.numerics import LogMag

KINDS = ["exp", "fatou", "coshsq", "sin", "polyexp:1,0,1"]


def grid_oracle(f, r, n=100_000):
    th = 2 * np.pi * np.arange(n) / n
    return float(np.max(log_eval(f, r * np.exp(1j * th)).real))


def test_exp_r5(exp):
    res = max_modulus(exp, 5.0)
    assert abs(float(res.log_M) - 5.0) < 1e-12
    assert min(res.theta_star, 2 * math.pi - res.theta_star) < 1e-9
    assert res.refinement_width <= 1e-12


def test_coshsq_r3(coshsq):
    res = max_modulus(coshsq, 3.0)
    closed = 2 * math.log(math.cosh(3.0))
    assert abs(float(res.log_M) - closed) < 1e-9
    assert abs(float(res.log_M) - grid_oracle(coshsq, 3.0)) < 1e-8
    # two symmetric maxima; the smaller angle wins
    assert min(res.theta_star, 2 * math.pi - res.theta_star) < 1e-9


def test_fatou_r4(fatou):
    res = max_modulus(fatou, 4.0)
    assert abs(float(res.log_M) - math.log(math.exp(4) - 3)) < 1e-9
    assert abs(res.theta_star - math.pi) < 1e-6


@pytest.mark.parametrize("desc", KINDS)
def test_maximality_witness(desc):
    f = parse_spec(desc)
    for r in (0.5, 3.0, 12.0):
        res = max_modulus(f, r)
        probes = r * np.exp(2j * np.pi * np.arange(64) / 64)
        for z in probes:
            assert float(f_eval(f, z).logmag()) <= float(res.log_M) + 1e-12 * max(1, abs(float(res.log_M)))
        at = float(f_eval(f, r * np.exp(1j * res.theta_star)).logmag())
        assert abs(at - float(res.log_M)) <= 1e-9 * max(1, abs(at))
        assert abs(float(res.log_M) - grid_oracle(f, r, 20_000)) <= 1e-6 * max(1, abs(at))


def test_invalid_radius(exp):
    for r in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(InvalidRadius):
            max_modulus(exp, r)


def test_iterate_exp(exp):
    logs = [float(x) for x in iterate_M(exp, 1.0, 3).logs]
    assert logs[:3] == pytest.approx([0.0, 1.0, math.e], abs=1e-12)
    assert logs[3] == pytest.approx(math.exp(math.e), rel=1e-12)


def test_iterate_coshsq(coshsq):
    logs = iterate_M(coshsq, 2.0, 2).logs
    l1 = 2 * math.log(math.cosh(2.0))
    assert float(logs[1]) == pytest.approx(l1, rel=1e-12)
    assert float(logs[2]) == pytest.approx(2 * math.log(math.cosh(math.exp(l1))), rel=1e-9)


def test_iterate_towers(exp):
    logs = iterate_M(exp, 10.0, 6).logs
    assert all(b > a for a, b in zip(logs, logs[1:]))
    assert logs[-1].level >= 2


@pytest.mark.parametrize("desc", KINDS)
def test_iterate_horizon_one(desc):
    logs = iterate_M(parse_spec(desc), 3.0, 1).logs
    assert len(logs) == 2 and logs[1] > logs[0]


def test_critical_radius_catalog(catalog):
    for f in catalog:
        assert critical_radius(f) == 0.0


def test_critical_radius_scan_oracle():
    # M(r) = r/2 + r^2 exceeds r exactly for r > 1/2
    f = parse_spec("series:0,0.5,1")
    assert critical_radius(f) == pytest.approx(0.5, rel=1e-9)
    with pytest.raises(BelowCriticalRadius):
        iterate_M(f, 0.4, 3)
    iterate_M(f, 0.6, 3)


def test_inverse_examples(exp, coshsq):
    assert inverse_M(exp, 2.0) == pytest.approx(2.0, abs=1e-9)
    assert inverse_M(coshsq, 2 * math.log(math.cosh(3.0))) == pytest.approx(3.0, abs=1e-9)
    assert inverse_M(exp, 0.0) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(NotBracketed):
        inverse_M(exp, -1.0)


@pytest.mark.parametrize("desc", KINDS)
@pytest.mark.parametrize("r", [2.0, 7.0, 31.0])
def test_inverse_roundtrip(desc, r):
    f = parse_spec(desc)
    assert inverse_M(f, log_M(f, math.log(r))) == pytest.approx(r, rel=1e-8)


def test_logconvexity_examples(exp, coshsq, fatou):
    chk = check_logconvexity(exp, 10.0, 2.0)
    assert chk["holds"]
    assert float(chk["lhs"]) == pytest.approx(100.0, rel=1e-12)
    assert float(chk["rhs"]) == pytest.approx(20.0, rel=1e-12)
    assert check_logconvexity(coshsq, 10.0, 1.5)["holds"]
    assert check_logconvexity(fatou, 20.0, 2.0)["holds"]


@settings(max_examples=50, deadline=None)
@given(st.floats(1.0, 100.0), st.floats(1.0, 100.0), st.sampled_from(KINDS))
def test_monotone(r1, r2, desc):
    if r1 == r2:
        return
    r1, r2 = min(r1, r2), max(r1, r2)
    f = parse_spec(desc)
    assert log_M(f, math.log(r1)) < log_M(f, math.log(r2))


@settings(max_examples=20, deadline=None)
@given(st.floats(-2.0, 4.0), st.floats(0.05, 1.0), st.sampled_from(KINDS))
def test_three_circles_convexity(t, h, desc):
    f = parse_spec(desc)
    a, m, b = (float(log_M(f, LogMag.of(x))) for x in (t - h, t, t + h))
    assert m <= 0.5 * (a + b) + 1e-9 * max(1.0, abs(m))
