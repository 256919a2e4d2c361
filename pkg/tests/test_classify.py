import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from escape_atlas.classify import classify_point, native_step, passes
from escape_atlas.efun import parse_spec
from escape_atlas.eremenko import Itinerary, build_scaffold, pullback
from escape_atlas.errors import BelowCriticalRadius
from escape_atlas.mmod import iterate_M
from escape_atlas.numerics import XComplex

coords = st.floats(-6.0, 6.0, allow_nan=False)


def test_exp_real_axis_is_the_max_orbit(exp):
    c = classify_point(exp, 10.0, 10.0, 50)
    assert c.fast.kind == "yes_at_R"
    assert c.escaping == "yes"
    assert all(abs(m) <= 1e-9 for m in c.margins)


def test_fatou_slow_orbit(fatou):
    c = classify_point(fatou, 5.0, 1.0, 20)
    assert c.escaping == "yes"
    assert c.fast.kind == "no_with_first_failure" and c.fast.n <= 3
    # direct float iteration as the oracle for the orbit itself
    z = 5.0
    for n in range(1, 21):
        z = z + 1 + math.exp(-z)
        assert float(c.orbit_logs[n]) == pytest.approx(math.log(z), rel=1e-12)


def test_exp_i_pi(exp):
    c = classify_point(exp, 1j * math.pi, 1.0, 20)
    assert c.escaping == "yes"
    assert c.fast.kind == "yes_with_offset" and c.fast.n <= 3


def test_below_critical_radius():
    with pytest.raises(BelowCriticalRadius):
        classify_point(parse_spec("series:0,0.5,1"), 1.0, 0.3, 5)


def test_horizon_must_be_positive(exp):
    with pytest.raises(ValueError):
        classify_point(exp, 1.0, 2.0, 0)


def test_log_R_beyond_floats(exp):
    c = classify_point(exp, 1e3 + 0j, log_R=math.log(1e3), horizon=5)
    d = classify_point(exp, 1e3 + 0j, 1e3, 5)
    assert c.fast == d.fast
    # R = e^1000 and z = e^1200 on the positive axis: neither is a float
    z = XComplex.from_log(complex(1200.0, 0.0))
    big = classify_point(exp, z, log_R=1000.0, horizon=4)
    assert big.fast.kind == "yes_at_R" and big.escaping == "yes"
    small = classify_point(exp, XComplex.from_log(complex(900.0, 0.0)), log_R=1000.0, horizon=4)
    assert small.fast.kind != "yes_at_R"


def test_sin_imaginary_axis_is_a_max_orbit():
    c = classify_point(parse_spec("sin"), 400j, 2.0, 5)
    assert c.escaping == "yes" and not c.truncated


def test_unlocked_orbit_truncates():
    f = parse_spec("sin")
    # off the imaginary axis the direction is lost after the handoff
    c = classify_point(f, 3 + 400j, 2.0, 5)
    assert c.truncated
    assert c.escaping == "undecided"


@settings(max_examples=60, deadline=None)
@given(coords, coords, st.sampled_from(["exp", "fatou", "coshsq"]))
def test_yes_at_R_means_all_comparisons_pass(x, y, kind):
    f = parse_spec(kind)
    c = classify_point(f, complex(x, y), 2.0, 12)
    if c.fast.kind == "yes_at_R":
        assert all(passes(o, m) for o, m in zip(c.orbit_logs, c.m_logs))
    if c.fast.kind == "no_with_first_failure":
        n = c.fast.n
        assert not passes(c.orbit_logs[n], c.m_logs[n])
        assert all(passes(c.orbit_logs[k], c.m_logs[k]) for k in range(n))


@settings(max_examples=60, deadline=None)
@given(coords, coords, st.sampled_from(["exp", "fatou", "coshsq"]))
def test_escaping_orbits_grow(x, y, kind):
    c = classify_point(parse_spec(kind), complex(x, y), 2.0, 20)
    if c.escaping == "yes" and not c.truncated:
        # fatou far right moves by ~1 per step, below the resolution of ln|z|
        tail = c.orbit_logs[-3:]
        assert all(a <= b for a, b in zip(tail, tail[1:]))


@settings(max_examples=60, deadline=None)
@given(coords, coords, st.sampled_from(["exp", "fatou", "coshsq"]))
def test_shift_consistency(x, y, kind):
    f = parse_spec(kind)
    z = complex(x, y)
    R, h = 2.0, 10
    c = classify_point(f, z, R, h)
    try:
        fz = native_step(f, z)
    except Exception:
        assume(False)
    assume(fz.imag != 0 or z.imag == 0)  # the classifier snaps near-real images
    shifted = classify_point(f, fz, horizon=h - 1, m_logs=c.m_logs[1:], log_R=c.m_logs[1])
    if c.fast.kind == "yes_at_R":
        assert shifted.fast.kind == "yes_at_R"
    if shifted.fast.kind == "yes_at_R" and passes(c.orbit_logs[0], c.m_logs[0]):
        assert c.fast.kind == "yes_at_R"


@settings(max_examples=40, deadline=None)
@given(coords, coords, st.floats(1.1, 20.0), st.floats(1.1, 20.0), st.sampled_from(["exp", "fatou", "coshsq"]))
def test_monotone_in_R(x, y, r1, r2, kind):
    f = parse_spec(kind)
    lo, hi = sorted((r1, r2))
    z = complex(x, y)
    if classify_point(f, z, hi, 8).fast.kind == "yes_at_R":
        assert classify_point(f, z, lo, 8).fast.kind == "yes_at_R"


@pytest.mark.parametrize("kind,r0", [("exp", 1000.0), ("coshsq", 5000.0), ("fatou", 1000.0)])
def test_eremenko_points_classify_fast(kind, r0):
    f = parse_spec(kind)
    sc = build_scaffold(f, r0, 3)
    lo = sc.R_bounds[0]
    mlogs = iterate_M(f, None, 3, log_R=math.log(float(lo))).logs
    for text in ("".join(p) for p in itertools.product("+-", repeat=3)):
        p = pullback(sc, Itinerary.parse(text))
        c = classify_point(f, p.center_native, horizon=3, m_logs=mlogs, log_R=mlogs[0])
        assert c.fast.kind == "yes_at_R", (text, c.margins)
        assert c.escaping == "yes"


def test_m_logs_reused(exp):
    m = iterate_M(exp, 3.0, 6).logs
    a = classify_point(exp, 3.0 + 0j, 3.0, 6)
    b = classify_point(exp, 3.0 + 0j, horizon=6, m_logs=m, log_R=m[0])
    assert a.fast == b.fast and np.allclose(a.margins, b.margins)
