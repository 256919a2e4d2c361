"""escape-atlas command line: mmod, wv, eremenko, classify, raster.

Exit codes: 0 ok, 2 bad arguments or descriptor, 3 computation failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from ._jit import resolve_threads, set_threads
from .classify import classify_point
from .efun import parse_spec
from .eremenko import Itinerary, build_scaffold, pullback, verify_fast_escape
from .errors import DescriptorSyntaxError, EscapeAtlasError, UnknownKind
from .mmod import check_logconvexity, critical_radius, max_modulus
from .numerics import LogMag, _g17
from .topology import Window, circle_crossing_count, label_components, rasterize, spider_evidence
from .wv import build_frame, quadrilateral

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} numbers, got {text!r}")
    return vals


def _cx(z: complex) -> list[str]:
    return [_g17(z.real), _g17(z.imag)]


def _dump(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _report(args, body: dict) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "threads", "out", "components")}
    return {"schema_version": SCHEMA_VERSION, "config": cfg, **body}


# -- commands -----------------------------------------------------------------------

def cmd_mmod(args):
    f = parse_spec(args.f)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity", "r", "c", "ln_M", "theta_star", "value"])
    for r in _floats(args.r) if args.r else []:
        res = max_modulus(f, r)
        w.writerow(["max_modulus", _g17(r), "", res.log_M.to_json(), _g17(res.theta_star), ""])
    if args.critical_radius:
        w.writerow(["critical_radius", "", "", "", "", _g17(critical_radius(f))])
    for r, c in _pairs(args.logconvexity):
        chk = check_logconvexity(f, r, c)
        w.writerow(["logconvexity", _g17(r), _g17(c), "", "", str(chk["holds"]).lower()])
    _write_text(buf.getvalue(), args.out)


def _pairs(text):
    if not text:
        return []
    out = []
    for item in text.split(";"):
        out.append(tuple(_floats(item, 2)))
    return out


def _write_text(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _frame_json(fr):
    return {
        "r_prime": fr.log_r_prime.exp().to_json(),
        "ln_r_prime": fr.log_r_prime.to_json(),
        "theta": _g17(fr.theta),
        "N": fr.N,
        "ln_N": fr.log_N.to_json(),
        "eps1_max": _g17(fr.eps1_max),
        "K_over_N": _g17(fr.k_over_n),
        "ln_M": fr.log_M.to_json(),
        "mode": fr.mode,
        "scale": _g17(fr.scale),
        "admissible": fr.admissible,
    }


def cmd_wv(args):
    f = parse_spec(args.f)
    fr = build_frame(f, args.r, args.K, samples=args.samples, seed=args.seed)
    quads = []
    for j in range(-2, 3):
        q = quadrilateral(fr, j)
        quads.append({"j": j, "corner_offsets": [_cx(d) for d in q.corner_deltas],
                      "corners": [_cx(fr.z_native + d) for d in q.corner_deltas] if fr.z_native is not None else None})
    _dump(_report(args, {"frame": _frame_json(fr), "quads": quads}), args.out)


def cmd_eremenko(args):
    f = parse_spec(args.f)
    sc = build_scaffold(f, args.r0, args.depth, args.K, samples=args.samples, seed=args.seed)
    levels = []
    for n, lv in enumerate(sc.levels):
        d = _frame_json(lv.frame)
        d.update({"n": n, "ln_r": lv.log_r.to_json(), "contraction_factor": _g17(lv.c)})
        levels.append(d)
    lo, hi = sc.R_bounds
    points = []
    for text in args.itineraries.split(","):
        it = Itinerary.parse(text)
        p = pullback(sc, it)
        rep = verify_fast_escape(f, p, sc, min(args.depth, len(it)))
        points.append({
            "itinerary": str(it),
            "center": _cx(p.center_native),
            "ln_enclosure_diameter": p.log_enclosure_diameter.to_json(),
            "orbit_check": list(p.orbit_check),
            "margins": [None if lv["margin"] is None else _g17(lv["margin"]) for lv in rep["levels"]],
            "fast_escape_verified": rep["all_pass"],
        })
    body = {"scaffold": {"r0": _g17(sc.r0), "depth": sc.depth, "levels": levels,
                         "R_bounds": {"lower": lo.to_json(), "upper": hi.to_json()}},
            "points": points}
    _dump(_report(args, body), args.out)


def cmd_classify(args):
    f = parse_spec(args.f)
    recs = []
    for item in args.z.split(";"):
        re_, im_ = _floats(item, 2)
        c = classify_point(f, complex(re_, im_), args.R, args.horizon,
                           log_R=None if args.log_R is None else LogMag.of(args.log_R))
        recs.append({
            "z": _cx(complex(re_, im_)),
            "escaping": c.escaping,
            "fast": c.fast.kind,
            "fast_index": c.fast.n,
            "truncated": c.truncated,
            "orbit_logs": [x.to_json() for x in c.orbit_logs],
            "margins": [_g17(m) for m in c.margins],
        })
    _dump(_report(args, {"points": recs}), args.out)


def pgm_bytes(verdicts: np.ndarray) -> bytes:
    h, w = verdicts.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(verdicts, dtype=np.uint8).tobytes()


def cmd_raster(args):
    f = parse_spec(args.f)
    win = _floats(args.window, 4)
    try:
        w, h = (int(x) for x in args.px.lower().split("x"))
    except ValueError as exc:
        raise UsageError(f"--px expects WxH, got {args.px!r}") from exc
    window = Window(win[0], win[1], win[2], win[3], w, h)
    r = rasterize(f, window, args.kind, args.R, args.horizon, threads=args.threads)
    if args.out == "-":
        sys.stdout.buffer.write(pgm_bytes(r.verdicts))
    else:
        with open(args.out, "wb") as fh:
            fh.write(pgm_bytes(r.verdicts))
    if args.components:
        cm = label_components(r, "member", 4)
        sp = spider_evidence(r)
        body = {
            "member_components": cm.component_count,
            "components_touching_edge": int(sum(cm.touches_edge)),
            "loops_found": sp["loops_found"],
            "loop_witnesses": [list(b) for b in sp["witnesses"]],
            "counts": {k: int(np.sum(r.verdicts == v)) for k, v in (("member", 255), ("undecided", 128), ("non_member", 0))},
        }
        if args.circle:
            cx, cy, rad = _floats(args.circle, 3)
            body["circle_crossings"] = circle_crossing_count(cm, complex(cx, cy), rad)
        _dump(_report(args, body), args.components)


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="escape-atlas", description=__doc__.splitlines()[0],
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out="-"):
        sp.add_argument("--f", required=True, help="function descriptor, e.g. exp, fatou, polyexp:1,0,1")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker cap (falls back to ESCAPE_ATLAS_THREADS)")
        sp.add_argument("--seed", type=int, default=0, help="seed for quasi-random sampling")
        sp.add_argument("--out", default=out, help="output file ('-' is stdout)")
        return sp

    fmt = argparse.ArgumentDefaultsHelpFormatter
    sp = common(sub.add_parser("mmod", help="maximum modulus table (CSV)", formatter_class=fmt))
    sp.add_argument("--r", default=None, help="comma-separated radii")
    sp.add_argument("--critical-radius", action="store_true", help="append R(f)")
    sp.add_argument("--logconvexity", default=None, help="'r,c;r,c' pairs to check M(r^c) >= M(r)^c")
    sp.set_defaults(func=cmd_mmod)

    sp = common(sub.add_parser("wv", help="Wiman-Valiron frame and quads (JSON)", formatter_class=fmt))
    sp.add_argument("--r", type=float, required=True, help="target radius; r' is searched in [5r/4, 7r/4]")
    sp.add_argument("--K", type=float, default=20 * math.pi, help="aperture, at least 20 pi")
    sp.add_argument("--samples", type=int, default=100, help="residual sample points")
    sp.set_defaults(func=cmd_wv)

    sp = common(sub.add_parser("eremenko", help="scaffold and itinerary points (JSON)", formatter_class=fmt))
    sp.add_argument("--r0", type=float, required=True, help="starting radius")
    sp.add_argument("--depth", type=int, default=3, help="scaffold levels")
    sp.add_argument("--itineraries", default="+++", help="comma-separated strings over {+,-}")
    sp.add_argument("--K", type=float, default=20 * math.pi, help="aperture, at least 20 pi")
    sp.add_argument("--samples", type=int, default=100, help="residual sample points per frame")
    sp.set_defaults(func=cmd_eremenko)

    sp = common(sub.add_parser("classify", help="classify points (JSON)", formatter_class=fmt))
    sp.add_argument("--z", required=True, help="'re,im' or 're,im;re,im;...'")
    sp.add_argument("--R", type=float, default=None, help="level radius")
    sp.add_argument("--log-R", type=float, default=None, help="level given as ln R")
    sp.add_argument("--horizon", type=int, default=20, help="orbit steps")
    sp.set_defaults(func=cmd_classify)

    sp = common(sub.add_parser("raster", help="membership raster (PGM) and components (JSON)", formatter_class=fmt),
                out="atlas.pgm")
    sp.add_argument("--kind", default="ar", choices=["ar", "i", "A_R", "I"], help="fast escaping (ar) or escaping (i)")
    sp.add_argument("--R", type=float, required=True, help="level radius")
    sp.add_argument("--horizon", type=int, default=30, help="orbit steps")
    sp.add_argument("--window", required=True, help="re_min,re_max,im_min,im_max")
    sp.add_argument("--px", default="400x400", help="WxH")
    sp.add_argument("--components", default=None, help="component report path (JSON)")
    sp.add_argument("--circle", default=None, help="cx,cy,radius for a crossing count")
    sp.set_defaults(func=cmd_raster)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad flags
    if args.command == "classify" and args.R is None and args.log_R is None:
        parser.error("classify needs --R or --log-R")
    set_threads(resolve_threads(args.threads))
    try:
        args.func(args)
    except (UsageError, DescriptorSyntaxError, UnknownKind) as exc:
        print(f"escape-atlas: error: {exc}", file=sys.stderr)
        return 2
    except (EscapeAtlasError, ValueError, ArithmeticError) as exc:
        print(f"escape-atlas: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
