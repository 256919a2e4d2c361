"""Membership rasters over a window, component labeling and loop evidence."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _jit
from ._kernels import HANDOFF as ST_HANDOFF
from ._kernels import LOST as ST_LOST
from ._kernels import label_mask, native_orbits
from .classify import HANDOFF, LOCK_TOL, log_phase, passes, wrap_angle
from .efun import MAX_DIRECTIONS, EntireFunction
from .errors import EmptyIntersection, InvalidValue, PixelBudgetExceeded
from .mmod import iterate_M
from .numerics import LogMag

MEMBER, UNDECIDED, NONMEMBER = 255, 128, 0
MAX_PIXELS = 4_000_000


@dataclass(frozen=True)
class Window:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    width: int
    height: int
    max_pixels: int = MAX_PIXELS

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise InvalidValue("window bounds must satisfy min < max")
        if self.width < 1 or self.height < 1:
            raise InvalidValue("window needs at least one pixel")
        if self.width * self.height > self.max_pixels:
            raise PixelBudgetExceeded(f"{self.width}x{self.height} exceeds {self.max_pixels} pixels")

    @property
    def dx(self):
        return (self.re_max - self.re_min) / self.width

    @property
    def dy(self):
        return (self.im_max - self.im_min) / self.height

    def centers(self) -> np.ndarray:
        """Pixel centres, row 0 at the top."""
        re = self.re_min + (np.arange(self.width) + 0.5) * self.dx
        im = self.im_max - (np.arange(self.height) + 0.5) * self.dy
        return re[None, :] + 1j * im[:, None]


@dataclass(frozen=True, eq=False)
class Raster:
    window: Window
    verdicts: np.ndarray  # (height, width) uint8 in {0, 128, 255}
    params: dict = field(default_factory=dict)

    @staticmethod
    def from_mask(mask, window: Window | None = None, undecided=None) -> "Raster":
        """Fixture helper: member where ``mask`` is true."""
        mask = np.asarray(mask, dtype=bool)
        h, w = mask.shape
        window = window or Window(0.0, float(w), 0.0, float(h), w, h)
        v = np.where(mask, MEMBER, NONMEMBER).astype(np.uint8)
        if undecided is not None:
            v[np.asarray(undecided, dtype=bool)] = UNDECIDED
        return Raster(window, v)


def _mlog_floats(mlogs):
    out = []
    for m in mlogs:
        if m.is_float:
            out.append(m.v)
        else:
            out.append(-math.inf if m.is_negative() else math.inf)
    return np.array(out)


def _locked(f, theta):
    th = np.asarray(theta)
    if f.kind == "fatou":
        near0 = np.abs(th) <= LOCK_TOL
    else:
        near0 = np.zeros(th.shape, dtype=bool)
    lock = np.zeros(th.shape, dtype=bool)
    if f.has_growth_law:
        for d in MAX_DIRECTIONS[f.kind]:
            lock |= np.abs(np.vectorize(wrap_angle, otypes=[float])(th - d)) <= LOCK_TOL if th.size else lock
    return lock | near0


def rasterize(
    f: EntireFunction,
    window: Window,
    kind: str = "A_R",
    R: float | None = None,
    horizon: int = 30,
    *,
    log_R=None,
    threads: int | None = None,
    use_jit: bool | None = None,
) -> Raster:
    """Classify every pixel centre; ``kind`` is ``"I"`` or ``"A_R"``."""
    kind = {"i": "I", "ar": "A_R", "a_r": "A_R"}.get(kind.lower(), kind)
    if kind not in ("I", "A_R"):
        raise InvalidValue(f"unknown membership kind {kind!r}")
    mlogs = iterate_M(f, R, horizon, log_R=log_R).logs
    _jit.set_threads(_jit.resolve_threads(threads))
    zs = window.centers().ravel()
    out_i, out_f = native_orbits(
        f, zs, horizon, _mlog_floats(mlogs), handoff=HANDOFF,
        stop_fail=(kind == "A_R"), stop_cert=(kind == "I"), use_jit=use_jit,
    )
    n_eval, first, cert, status = out_i.T
    lr, th = out_f.T
    steps_left = horizon - (n_eval - 1)
    ho = (status == ST_HANDOFF) & (steps_left > 0)
    lock = np.zeros(len(zs), dtype=bool)
    if ho.any():
        lock[ho] = _locked(f, th[ho])
    if kind == "I":
        esc = cert.astype(bool).copy()
        if ho.any():
            esc_ho = lock[ho].copy()
            if f.kind == "fatou":
                esc_ho |= np.cos(th[ho]) > 0
            esc[ho] |= esc_ho
        v = np.where(esc, MEMBER, UNDECIDED)
    else:
        ok = first < 0
        v = np.where(ok, MEMBER, NONMEMBER)
        v[ok & (n_eval <= 1)] = UNDECIDED
        # locked handoffs continue on log magnitudes, exactly as classify_point does
        for k in np.nonzero(ho & lock & ok)[0]:
            start = int(n_eval[k]) - 1
            more, _, _ = log_phase(f, LogMag.of(float(lr[k])), float(th[k]), int(steps_left[k]))
            if not all(passes(o, mlogs[start + 1 + i]) for i, o in enumerate(more)):
                v[k] = NONMEMBER
    params = {"kind": kind, "R": R, "log_R": None if log_R is None else LogMag.of(log_R).to_json(),
              "horizon": horizon, "function": f.descriptor}
    return Raster(window, v.reshape(window.height, window.width).astype(np.uint8), params)


# -- components -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ComponentMap:
    window: Window
    labels: np.ndarray
    component_count: int
    touches_edge: tuple
    bboxes: tuple  # (row_min, col_min, row_max, col_max) per label 1..count
    target: str
    connectivity: int


def _mask(raster: Raster, target: str):
    if target == "member":
        return raster.verdicts == MEMBER
    if target == "complement":
        return raster.verdicts != MEMBER
    raise InvalidValue(f"unknown target {target!r}")


def label_components(raster: Raster, target: str = "member", connectivity: int | None = None) -> ComponentMap:
    if connectivity is None:
        connectivity = 4 if target == "member" else 8
    if connectivity not in (4, 8):
        raise InvalidValue("connectivity must be 4 or 8")
    mask = np.ascontiguousarray(_mask(raster, target))
    labels, count = label_mask(mask, connectivity == 8)
    h, w = labels.shape
    rows, cols = np.indices((h, w))
    lab = labels.ravel()
    sel = lab > 0
    lab, r, c = lab[sel], rows.ravel()[sel], cols.ravel()[sel]
    big = np.iinfo(np.int64).max
    rmin = np.full(count + 1, big)
    cmin = np.full(count + 1, big)
    rmax = np.full(count + 1, -1)
    cmax = np.full(count + 1, -1)
    np.minimum.at(rmin, lab, r)
    np.minimum.at(cmin, lab, c)
    np.maximum.at(rmax, lab, r)
    np.maximum.at(cmax, lab, c)
    edge = (rmin == 0) | (cmin == 0) | (rmax == h - 1) | (cmax == w - 1)
    boxes = tuple((int(rmin[i]), int(cmin[i]), int(rmax[i]), int(cmax[i])) for i in range(1, count + 1))
    return ComponentMap(raster.window, labels, int(count), tuple(bool(x) for x in edge[1:]), boxes,
                        target, connectivity)


def spider_evidence(raster: Raster) -> dict:
    """Complement components (8-connected) that do not reach the window edge."""
    cm = label_components(raster, "complement", 8)
    wit = [b for b, e in zip(cm.bboxes, cm.touches_edge) if not e]
    return {"loops_found": len(wit), "witnesses": wit}


def circle_crossing_count(cmap: ComponentMap, center: complex, radius: float) -> int:
    """Distinct member labels within half a pixel diagonal of the circle."""
    win = cmap.window
    z = win.centers()
    band = 0.5 * math.hypot(win.dx, win.dy)
    near = np.abs(np.abs(z - center) - radius) <= band
    if not near.any():
        raise EmptyIntersection("circle does not meet the window")
    labs = cmap.labels[near]
    return int(len(np.unique(labs[labs > 0])))
