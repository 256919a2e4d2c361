"""Hot loops: the native phase of pixel orbits and two-pass component labeling.

Each kernel has a numba version (via ``maybe_njit``) and, for orbits, a vectorized
numpy twin used when ``ESCAPE_ATLAS_JIT=0``.  Both follow the same per-pixel rules:

* ``logs[0] = ln|z|``; each step computes ``L = log f(z)`` and ``logs[n+1] = Re L``;
* a comparison passes when ``logs[n] - mlog[n] >= -1e-9 max(1, |mlog[n]|)``;
* ``Re L > handoff`` stops the native phase with state ``(Re L, Im L mod 2 pi)``;
* an escape certificate is a real point for exp/coshsq or ``Re z >= 1`` for fatou.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from ._jit import maybe_njit, prange
from .efun import log_eval

CMP_TOL = 1e-9
# imaginary parts this small relative to the real part are rounding noise off the real axis
SNAP = 4.0 * 2.220446049250313e-16
_LN2 = math.log(2.0)

# status codes
RUNNING, DONE, HANDOFF, LOST = 0, 1, 2, 3


@maybe_njit
def _horner(c, z):
    acc = 0j
    for k in range(len(c) - 1, -1, -1):
        acc = acc * z + c[k]
    return acc


@maybe_njit
def _clog1p(u):
    re = 0.5 * math.log1p(2.0 * u.real + (u.real * u.real + u.imag * u.imag))
    return complex(re, math.atan2(u.imag, 1.0 + u.real))


@maybe_njit
def _logf(code, c, z):
    if code == 0:
        return z
    if code == 1:
        if z.real >= -20.0:
            return cmath.log(z + 1.0 + cmath.exp(-z))
        return -z + _clog1p((z + 1.0) * cmath.exp(z))
    if code == 2:
        w = -z if z.real < 0 else z
        return 2.0 * (w + cmath.log(1.0 + cmath.exp(-2.0 * w)) - _LN2)
    if code == 3:
        w = -z if z.imag < 0 else z
        out = -1j * w + cmath.log((cmath.exp(2j * w) - 1.0) / 2j)
        if z.imag < 0:
            out = out + 1j * math.pi
        return out
    if code == 4:
        return cmath.log(_horner(c, z)) + z
    return cmath.log(_horner(c, z))


@maybe_njit
def _cert(code, z):
    if code == 0 or code == 2:
        return z.imag == 0.0
    if code == 1:
        return z.real >= 1.0
    return False


@maybe_njit
def _passes(o, m):
    if m == math.inf:
        return False
    if m == -math.inf:
        return True
    return o - m >= -CMP_TOL * max(1.0, abs(m))


@maybe_njit
def _wrap(t):
    t = np.fmod(t, 2.0 * math.pi)
    if t > math.pi:
        t -= 2.0 * math.pi
    elif t <= -math.pi:
        t += 2.0 * math.pi
    return t


@maybe_njit(parallel=False)
def _orbit_one(code, c, z, horizon, handoff, mlog, stop_fail, stop_cert, out_i, out_f, k):
    n_eval = 1
    first_fail = -1
    cert = _cert(code, z)
    status = DONE
    lr = 0.0
    th = 0.0
    o = math.log(abs(z)) if z != 0 else -math.inf
    if not _passes(o, mlog[0]):
        first_fail = 0
    for n in range(horizon):
        if (stop_fail and first_fail >= 0) or (stop_cert and cert):
            break
        L = _logf(code, c, z)
        if math.isnan(L.real) or math.isnan(L.imag) or L.real == math.inf:
            status = LOST
            break
        n_eval += 1
        if first_fail < 0 and not _passes(L.real, mlog[n + 1]):
            first_fail = n + 1
        if L.real > handoff:
            status = HANDOFF
            lr = L.real
            th = _wrap(L.imag)
            break
        z = cmath.exp(L) if L.real > -math.inf else 0j
        if abs(z.imag) <= SNAP * abs(z.real):
            z = complex(z.real, 0.0)
        if _cert(code, z):
            cert = True
    out_i[k, 0] = n_eval
    out_i[k, 1] = first_fail
    out_i[k, 2] = 1 if cert else 0
    out_i[k, 3] = status
    out_f[k, 0] = lr
    out_f[k, 1] = th


@maybe_njit(parallel=True)
def _orbits_jit(code, c, zs, horizon, handoff, mlog, stop_fail, stop_cert, out_i, out_f):
    for k in prange(zs.shape[0]):
        _orbit_one(code, c, zs[k], horizon, handoff, mlog, stop_fail, stop_cert, out_i, out_f, k)


def _orbits_numpy(f, zs, horizon, handoff, mlog, stop_fail, stop_cert):
    P = len(zs)
    out_i = np.zeros((P, 4), dtype=np.int64)
    out_f = np.zeros((P, 2))
    code = f.code
    z = zs.copy()
    with np.errstate(all="ignore"):
        o = np.where(z != 0, np.log(np.abs(z)), -np.inf)
    first = np.where(_passes_np(o, mlog[0]), -1, 0)
    cert = _cert_np(code, z)
    n_eval = np.ones(P, dtype=np.int64)
    status = np.full(P, DONE, dtype=np.int64)
    active = np.ones(P, dtype=bool)
    lr = np.zeros(P)
    th = np.zeros(P)
    for n in range(horizon):
        if stop_fail:
            active &= first < 0
        if stop_cert:
            active &= ~cert
        idx = np.nonzero(active)[0]
        if not len(idx):
            break
        L = log_eval(f, z[idx])
        lost = np.isnan(L.real) | np.isnan(L.imag) | (L.real == np.inf)
        status[idx[lost]] = LOST
        active[idx[lost]] = False
        keep = ~lost
        idx, L = idx[keep], L[keep]
        n_eval[idx] += 1
        newfail = (first[idx] < 0) & ~_passes_np(L.real, mlog[n + 1])
        first[idx[newfail]] = n + 1
        ho = L.real > handoff
        status[idx[ho]] = HANDOFF
        lr[idx[ho]] = L.real[ho]
        th[idx[ho]] = _wrap_np(L.imag[ho])
        active[idx[ho]] = False
        idx, L = idx[~ho], L[~ho]
        with np.errstate(all="ignore"):
            zn = np.where(L.real > -np.inf, np.exp(L), 0j)
        zn = np.where(np.abs(zn.imag) <= SNAP * np.abs(zn.real), zn.real + 0j, zn)
        z[idx] = zn
        cert[idx] |= _cert_np(code, zn)
    out_i[:, 0] = n_eval
    out_i[:, 1] = first
    out_i[:, 2] = cert
    out_i[:, 3] = status
    out_f[:, 0] = lr
    out_f[:, 1] = th
    return out_i, out_f


def _passes_np(o, m):
    if m == math.inf:
        return np.zeros(np.shape(o), dtype=bool)
    if m == -math.inf:
        return np.ones(np.shape(o), dtype=bool)
    return o - m >= -CMP_TOL * max(1.0, abs(m))


def _cert_np(code, z):
    if code in (0, 2):
        return z.imag == 0.0
    if code == 1:
        return z.real >= 1.0
    return np.zeros(len(z), dtype=bool)


def _wrap_np(t):
    t = np.fmod(t, 2.0 * math.pi)
    t = np.where(t > math.pi, t - 2.0 * math.pi, t)
    return np.where(t <= -math.pi, t + 2.0 * math.pi, t)


def native_orbits(f, zs, horizon, mlog, handoff=300.0, stop_fail=False, stop_cert=False, use_jit=None):
    """Run the native phase for every start point; returns ``(out_i, out_f)``.

    ``out_i`` columns: evaluated log count, first failing index (-1 none), certificate,
    status; ``out_f`` columns: handoff ``Re L`` and wrapped ``Im L``.
    """
    from ._jit import JIT_ENABLED

    zs = np.ascontiguousarray(np.asarray(zs, dtype=np.complex128).ravel())
    mlog = np.ascontiguousarray(np.asarray(mlog, dtype=np.float64))
    jit = JIT_ENABLED if use_jit is None else (use_jit and JIT_ENABLED)
    if not jit:
        return _orbits_numpy(f, zs, horizon, handoff, mlog, stop_fail, stop_cert)
    c = np.ascontiguousarray(np.asarray(f.coeffs if f.coeffs else (0.0,), dtype=np.complex128))
    out_i = np.zeros((len(zs), 4), dtype=np.int64)
    out_f = np.zeros((len(zs), 2))
    _orbits_jit(f.code, c, zs, horizon, handoff, mlog, stop_fail, stop_cert, out_i, out_f)
    return out_i, out_f


# -- labeling ----------------------------------------------------------------------

@maybe_njit
def _find(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


@maybe_njit
def _union(parent, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra < rb:
        parent[rb] = ra
    elif rb < ra:
        parent[ra] = rb


@maybe_njit
def label_mask(mask, eight):
    """Two-pass union-find labeling; labels numbered 1.. in raster order, 0 outside."""
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int64)
    parent = np.zeros(h * w // 2 + 2, dtype=np.int64)
    nxt = 1
    for i in range(h):
        for j in range(w):
            if not mask[i, j]:
                continue
            best = 0
            for di, dj in ((-1, -1), (-1, 0), (-1, 1), (0, -1)):
                if not eight and di != 0 and dj != 0:
                    continue
                ii, jj = i + di, j + dj
                if ii < 0 or jj < 0 or jj >= w:
                    continue
                lb = labels[ii, jj]
                if lb == 0:
                    continue
                if best == 0:
                    best = lb
                else:
                    _union(parent, best, lb)
            if best == 0:
                if nxt >= len(parent):
                    grown = np.zeros(2 * len(parent), dtype=np.int64)
                    grown[: len(parent)] = parent
                    parent = grown
                parent[nxt] = nxt
                best = nxt
                nxt += 1
            labels[i, j] = best
    # compact roots to 1..count in order of first appearance
    remap = np.zeros(nxt, dtype=np.int64)
    count = 0
    for i in range(h):
        for j in range(w):
            lb = labels[i, j]
            if lb == 0:
                continue
            r = _find(parent, lb)
            if remap[r] == 0:
                count += 1
                remap[r] = count
            labels[i, j] = remap[r]
    return labels, count
