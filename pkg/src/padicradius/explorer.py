"""Controlling-graph exploration along nested disks.

The root segment runs through Gauss points t_{0, p^-t}.  Each user-supplied
center c opens a child segment inside the residue disk D(c, |c|^-), explored
on the system recentred at c.  A leaf records a disk on which the radius is
constant: the first Gauss point (from the inside out) where R >= rho.
"""

from __future__ import annotations

import io
import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .field import INF, PrimeConfig
from .laurent import RecentreDisk
from .diffsys import pullback
from .profile import (
    Line, PLFit, Sample, decompose_side, fit_concave_pl, sample_profile,
)
from .radius import Cap, GaussPoint, RadiusOptions, radius_at


@dataclass
class SegmentNode:
    center: object
    t_interval: tuple
    fit: PLFit | None
    decompositions: list = field(default_factory=list)
    children: list = field(default_factory=list)
    samples: list = field(default_factory=list, compare=False)
    system: object = field(default=None, compare=False, repr=False)


@dataclass
class Leaf:
    center: object
    t: Fraction
    v_R: Fraction
    node: object = field(default=None, compare=False, repr=False)


@dataclass
class ControllingGraph:
    config: PrimeConfig
    root: SegmentNode
    leaves: list = field(default_factory=list)

    def segments(self):
        out = []
        stack = [(self.root, None)]
        while stack:
            node, parent = stack.pop(0)
            out.append((node, parent))
            stack.extend((c, node) for c in node.children)
        return out


@dataclass(frozen=True)
class ExploreOptions:
    N: int = 400
    window: int = 50
    count: int = 9
    tol: Fraction = Fraction(1, 50)
    cap: Cap = Cap.UNCAPPED
    h_max: int = 6
    child_span: Fraction | None = None
    s_max: int = 12

    def radius_options(self):
        return RadiusOptions(N=self.N, window=self.window, cap=self.cap)


def model_rescale(v_old, t_div):
    """Normalized valuation after shrinking the model disk by t_div."""
    v_old, t_div = Fraction(v_old), Fraction(t_div)
    if v_old < 0 or t_div < 0:
        raise ValueError("model_rescale expects v_old >= 0 and t_div >= 0")
    return max(Fraction(0), v_old - t_div)


def _decompose(fit, config, mu, h_max):
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for ln in fit.lines:
            # normalized side: v - t
            out.append(decompose_side(ln.slope - 1, ln.intercept, config, mu, h_max))
    return out


def _segment(sys, center, tA, tB, opts):
    samples = sample_profile(sys, tA, tB, opts.count, opts.radius_options())
    fit = fit_concave_pl(samples, sys.mu, opts.s_max, opts.tol)
    decs = _decompose(fit, sys.config, sys.mu, opts.h_max)
    return SegmentNode(center, (Fraction(tA), Fraction(tB)), fit, decs, [], samples, sys)


def _leaf(node):
    """Outermost sample of the innermost run with v_R <= t, if that run exists."""
    leaf = None
    for s in reversed(node.samples):
        if s.enc.v_est > s.t:
            break
        leaf = Leaf(node.center, s.t, s.enc.v_est, node)
    return leaf


def explore(sys, tA, tB, centers=(), depth=1, opts=None):
    """Fit the root segment [tA, tB] and recurse into the residue disks of ``centers``."""
    opts = opts or ExploreOptions()
    cfg = sys.config
    tA, tB = Fraction(tA), Fraction(tB)
    root = _segment(sys, cfg.zero(), tA, tB, opts)
    graph = ControllingGraph(cfg, root)
    span = opts.child_span if opts.child_span is not None else tB - tA
    centers = [cfg(c) for c in centers]
    for c in centers:
        if not c.is_zero() and not tA <= c.val() <= tB:
            raise ValueError(f"center {c} outside the explored segment")
    _recurse(graph, root, sys, centers, depth, span, opts)
    return graph


def _recurse(graph, node, sys, centers, depth, span, opts):
    leaf = _leaf(node)
    if leaf is not None:
        graph.leaves.append(leaf)
    if depth <= 0:
        return
    base = node.center
    for c in centers:
        rel = c - base
        if rel.is_zero():
            continue
        vc = rel.val()
        lo, hi = node.t_interval
        if not lo <= vc <= hi:
            continue
        child_sys = pullback(sys, RecentreDisk(rel))
        # open residue disk D(c, |c - base|^-): start just inside it
        t0 = vc + span / (4 * (opts.count - 1))
        child = _segment(child_sys, c, t0, t0 + span, opts)
        node.children.append(child)
        rest = [d for d in centers if d != c]
        _recurse(graph, child, child_sys, rest, depth - 1, span, opts)


def rescaling_consistency(graph, offsets=(Fraction(1, 4), Fraction(1, 2)), opts=None):
    """Compare model_rescale of each leaf with direct values deeper inside it.

    Returns a list of (leaf, t', predicted, direct, allowed) violations.
    """
    opts = opts or ExploreOptions()
    bad = []
    for leaf in graph.leaves:
        sys = leaf.node.system
        leaf_norm = max(Fraction(0), leaf.v_R - leaf.t)
        for off in offsets:
            tp = leaf.t + Fraction(off)
            enc = radius_at(sys, GaussPoint(tp), opts.radius_options())
            direct = max(Fraction(0), enc.v_est - tp)
            predicted = model_rescale(leaf_norm, tp - leaf.t)
            allowed = enc.width + opts.tol
            if abs(direct - predicted) > allowed:
                bad.append((leaf, tp, predicted, direct, allowed))
    return bad


# --- serialization -----------------------------------------------------------


def _q(x):
    if x == INF:
        return "inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _unq(s):
    return INF if s == "inf" else Fraction(s)


def _center(c):
    return [_q(a) for a in c.coeffs]


def serialize(graph, format="structured"):
    """JSON text (structured) or a dict of CSV texts keyed by segment id (plot-data)."""
    segs = graph.segments()
    ids = {id(n): k for k, (n, _) in enumerate(segs)}
    if format == "plot-data":
        out = {}
        for n, _ in segs:
            buf = io.StringIO()
            buf.write("t,v_est,v_cert\n")
            for s in n.samples:
                buf.write(f"{_q(s.t)},{_q(s.enc.v_est)},{_q(s.enc.v_cert)}\n")
            out[ids[id(n)]] = buf.getvalue()
        return out
    if format != "structured":
        raise ValueError(f"unknown format {format!r}")
    cfg = graph.config
    doc = {
        "field": {"p": cfg.p, "e": cfg.e, "u": _q(cfg.u)},
        "segments": [],
        "leaves": [],
    }
    for n, parent in segs:
        fit = n.fit
        doc["segments"].append({
            "id": ids[id(n)],
            "parent": None if parent is None else ids[id(parent)],
            "center": _center(n.center),
            "tA": _q(n.t_interval[0]),
            "tB": _q(n.t_interval[1]),
            "breakpoints": [_q(b) for b in fit.breakpoints],
            "slopes": [_q(s) for s in fit.slopes],
            "values": [_q(v) for v in fit.values],
            "mu": fit.mu,
            "decompositions": [[[_q(d.h), d.j, d.s, _q(d.v_b)] for d in side]
                               for side in n.decompositions],
        })
    for lf in graph.leaves:
        doc["leaves"].append({"center": _center(lf.center), "t": _q(lf.t), "vR": _q(lf.v_R)})
    return json.dumps(doc, indent=2, sort_keys=True)


def parse(text):
    """Inverse of ``serialize(graph, "structured")`` (samples are not stored)."""
    from .profile import SideDecomposition

    doc = json.loads(text)
    f = doc["field"]
    cfg = PrimeConfig(f["p"], f["e"], Fraction(f["u"]))
    nodes = {}
    root = None
    for sd in doc["segments"]:
        bps = [Fraction(b) for b in sd["breakpoints"]]
        slopes = [Fraction(s) for s in sd["slopes"]]
        vals = [Fraction(v) for v in sd["values"]]
        lines = [Line(s, vals[k + 1] - s * bps[k + 1]) for k, s in enumerate(slopes)]
        fit = PLFit(bps, vals, slopes, lines, sd["mu"])
        decs = [[SideDecomposition(_unq(h) if h == "inf" else int(h), j, s, Fraction(vb))
                 for h, j, s, vb in side] for side in sd["decompositions"]]
        node = SegmentNode(cfg([Fraction(a) for a in sd["center"]]),
                           (Fraction(sd["tA"]), Fraction(sd["tB"])), fit, decs)
        nodes[sd["id"]] = node
        if sd["parent"] is None:
            root = node
        else:
            nodes[sd["parent"]].children.append(node)
    leaves = [Leaf(cfg([Fraction(a) for a in lf["center"]]), Fraction(lf["t"]), Fraction(lf["vR"]))
              for lf in doc["leaves"]]
    return ControllingGraph(cfg, root, leaves)


def samples_to_csv(samples):
    buf = io.StringIO()
    buf.write("t,v_est,v_cert\n")
    for s in samples:
        buf.write(f"{_q(s.t)},{_q(s.enc.v_est)},{_q(s.enc.v_cert)}\n")
    return buf.getvalue()


__all__ = [
    "ControllingGraph", "ExploreOptions", "Leaf", "SegmentNode", "Sample", "explore",
    "model_rescale", "parse", "rescaling_consistency", "samples_to_csv", "serialize",
]
