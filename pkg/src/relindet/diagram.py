"""Space-time diagrams as plain SVG 1.1.

Time runs up the page and space to the right, with equal scale on both axes,
so light rays at ``c = 1`` are drawn at 45 degrees. Every coordinate is
printed with a fixed number of decimals, which makes the output byte-stable
for a fixed scenario and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable
from xml.sax.saxutils import escape

from .determinacy import Determinations, minimal_determining_sets
from .engine import Report
from .logic import parse_proposition
from .scenario import Scenario
from .spacetime import REST, Frame, SpacetimePoint, Worldline

MAX_PLOT = 720.0
MAX_SCALE = 160.0
MARGIN = 48.0
PALETTE = ("#4c78a8", "#f58518", "#54a24b", "#b279a2", "#e45756", "#72b7b2")
VALUE_COLORS = {"True": "#2e7d32", "False": "#c62828", "Indeterminate": "#ef6c00"}


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _label(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return f"{v:g}" if isinstance(v, float) else str(v)


@dataclass(frozen=True)
class Window:
    t_lo: float
    t_hi: float
    x_lo: float
    x_hi: float

    @property
    def scale(self) -> float:
        return min(MAX_SCALE, MAX_PLOT / max(self.t_hi - self.t_lo, self.x_hi - self.x_lo))

    @property
    def width(self) -> float:
        return (self.x_hi - self.x_lo) * self.scale + 2 * MARGIN

    @property
    def height(self) -> float:
        return (self.t_hi - self.t_lo) * self.scale + 2 * MARGIN

    def px(self, t: float, x: float) -> tuple[str, str]:
        return (_f(MARGIN + (float(x) - self.x_lo) * self.scale),
                _f(MARGIN + (self.t_hi - float(t)) * self.scale))


def _through(s: Scenario, entry: dict) -> tuple[float, float]:
    """Rest-frame coordinates of a simultaneity line's anchor point."""
    value = entry.get("through", [0, 0])
    if isinstance(value, dict):
        t, x = Fraction(str(value["t"])), Fraction(str(value["x"]))
        label = value.get("frame", REST)
        if label != REST:
            p = s.frame(label).to_rest(t, x, s.c)
            return float(p.t), float(p.x)
        return float(t), float(x)
    return float(Fraction(str(value[0]))), float(Fraction(str(value[1])))


def _points_of(s: Scenario, r: Report) -> list[SpacetimePoint]:
    pts: list = [SpacetimePoint(0, 0)]
    pts += [e.location for e in r.realization.determinations.events]
    pts += [m.location for m in r.realization.measurements]
    pts += [o.worldline.anchor for o in s.observers]
    for entry in s.diagram.get("simultaneity", []):
        pts.append(SpacetimePoint(*_through(s, entry)))
    for q in s.queries:
        at = q.params.get("at")
        if isinstance(at, SpacetimePoint):
            pts.append(at)
    return pts


def _window(s: Scenario, r: Report) -> Window:
    pts = _points_of(s, r)
    t_lo = math.floor(min(float(p.t) for p in pts)) - 1
    t_hi = math.ceil(max(float(p.t) for p in pts)) + 1
    x_lo = math.floor(min(float(p.x) for p in pts)) - 1
    x_hi = math.ceil(max(float(p.x) for p in pts)) + 1
    given = s.diagram.get("window") or {}
    if "t" in given:
        t_lo, t_hi = (float(Fraction(str(v))) for v in given["t"])
    if "x" in given:
        x_lo, x_hi = (float(Fraction(str(v))) for v in given["x"])
    return Window(float(t_lo), float(t_hi), float(x_lo), float(x_hi))


def _line(w: Window, p: tuple[float, float], q: tuple[float, float], **attrs) -> str:
    (x1, y1), (x2, y2) = w.px(*p), w.px(*q)
    extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"{extra}/>'


def _text(w: Window, t: float, x: float, body: str, dx: float = 4, dy: float = -4, **attrs) -> str:
    px, py = w.px(t, x)
    extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return (f'<text x="{_f(float(px) + dx)}" y="{_f(float(py) + dy)}"{extra}>'
            f"{escape(body)}</text>")


def _axes(w: Window) -> list[str]:
    out = ['<g id="axes" stroke="#888" stroke-width="1" font-size="11" fill="#444">']
    t0 = min(max(0.0, w.t_lo), w.t_hi)
    x0 = min(max(0.0, w.x_lo), w.x_hi)
    out.append(_line(w, (t0, w.x_lo), (t0, w.x_hi)))
    out.append(_line(w, (w.t_lo, x0), (w.t_hi, x0)))
    for k in range(math.ceil(w.x_lo), math.floor(w.x_hi) + 1):
        out.append(_text(w, t0, k, str(k), dx=-3, dy=14, stroke="none"))
    for k in range(math.ceil(w.t_lo), math.floor(w.t_hi) + 1):
        if k != 0:
            out.append(_text(w, k, x0, str(k), dx=-16, dy=4, stroke="none"))
    out.append(_text(w, t0, w.x_hi, "x (light-min)", dx=-80, dy=28, stroke="none"))
    out.append(_text(w, w.t_hi, x0, "t (min after 1:00 pm)", dx=-50, dy=-12, stroke="none"))
    out.append("</g>")
    return out


def _region_path(w: Window, apexes: Iterable[SpacetimePoint], c: float) -> str:
    """Outline of ``t >= max_i (t_i + |x - x_i| / c)`` inside the window."""
    apexes = [(float(p.t), float(p.x)) for p in apexes]
    c = float(c)

    def floor_at(x: float) -> float:
        return max(t + abs(x - xi) / c for t, xi in apexes)

    xs = {w.x_lo, w.x_hi}
    for t, xi in apexes:
        xs.add(xi)
    # crossings of one apex's rising branch with another's falling branch
    for t1, x1 in apexes:
        for t2, x2 in apexes:
            x = (c * (t2 - t1) + x1 + x2) / 2
            xs.add(x)
    xs = sorted(x for x in xs if w.x_lo <= x <= w.x_hi)
    top = w.t_hi + 1.0  # clipped by the plot area
    pts = [w.px(min(floor_at(x), top), x) for x in xs]
    pts += [w.px(top, w.x_hi), w.px(top, w.x_lo)]
    return "M " + " L ".join(f"{a} {b}" for a, b in pts) + " Z"


def _regions(s: Scenario, r: Report, w: Window) -> list[str]:
    d: Determinations = r.realization.determinations
    seen: list[str] = []
    for q in s.queries:
        if q.kind in ("truth", "frontier"):
            text = q.params.get("text") or str(q.params["proposition"])
            if text not in seen:
                seen.append(text)
    out = ['<g id="determinate-regions" stroke-width="1">']
    for i, text in enumerate(seen):
        color = PALETTE[i % len(PALETTE)]
        try:
            sets = minimal_determining_sets(d, parse_proposition(text))
        except ValueError:
            continue
        for events in sets:
            if not events:
                continue
            names = ", ".join(e.variable for e in events)
            out.append(
                f'<path d="{_region_path(w, (e.location for e in events), s.c)}" fill="{color}" '
                f'fill-opacity="0.18" stroke="{color}" stroke-opacity="0.6">'
                f"<title>{escape(text)} determinate (cones of {escape(names)})</title></path>"
            )
    out.append("</g>")
    return out


def _simultaneity(s: Scenario, w: Window) -> list[str]:
    entries = list(s.diagram.get("simultaneity", []))
    if not entries:
        entries = [{"frame": f.label, "through": [0, 0]} for f in s.frames if f.velocity != 0]
    out = ['<g id="simultaneity" stroke-width="1.2" stroke-dasharray="6 3" font-size="11">']
    for i, entry in enumerate(entries):
        label = entry.get("frame", REST)
        f = s.frame(label) if label != REST else Frame(0, REST)
        t0, x0 = _through(s, entry)
        slope = float(f.velocity) / float(s.c) ** 2
        color = "#d62728" if f.velocity else "#1f77b4"
        a = (t0 + slope * (w.x_lo - x0), w.x_lo)
        b = (t0 + slope * (w.x_hi - x0), w.x_hi)
        out.append(_line(w, a, b, stroke=color))
        # label where the line leaves the window on the right or at the top
        x_end = w.x_hi
        if slope and not w.t_lo <= b[0] <= w.t_hi:
            t_edge = w.t_hi if slope > 0 else w.t_lo
            x_end = x0 + (t_edge - t0) / slope
        t_end = t0 + slope * (x_end - x0)
        out.append(_text(w, t_end, x_end, f"{f.label} simultaneity", dx=-120,
                         dy=14 if slope > 0 else -4, fill=color))
    out.append("</g>")
    return out


def _cones(s: Scenario, r: Report, w: Window) -> list[str]:
    apexes = [(e.location, e.variable) for e in r.realization.determinations.events]
    known = {v for _, v in apexes}
    apexes += [(m.location, m.variable or f"q{m.qubit}") for m in r.realization.measurements
               if m.variable not in known]
    out = ['<g id="light-cones" stroke="#999" stroke-width="1">']
    c = float(s.c)
    for p, _ in apexes:
        t, x = float(p.t), float(p.x)
        rise = w.t_hi + 1.0 - t
        for sign in (-1, 1):
            out.append(_line(w, (t, x), (t + rise, x + sign * c * rise)))
    out.append("</g>")
    return out


def _worldline_segment(w: Window, wl: Worldline) -> tuple[tuple[float, float], tuple[float, float]]:
    lo, hi = w.t_lo - 1.0, w.t_hi + 1.0
    a, b = wl.at(lo), wl.at(hi)
    return (float(a.t), float(a.x)), (float(b.t), float(b.x))


def _worldlines(s: Scenario, w: Window) -> list[str]:
    out = ['<g id="worldlines" stroke-width="1.6" font-size="12">']
    step = 18.0 / w.scale
    for i, o in enumerate(s.observers):
        a, b = _worldline_segment(w, o.worldline)
        out.append(_line(w, a, b, stroke="#222"))
        # stagger labels so observers sharing a region stay legible
        t = w.t_hi - step * (1 + i % 4)
        if float(o.worldline.velocity):
            x_top = float(o.worldline.at(t).x)
            if x_top > w.x_hi - 4 * step:
                t = float(o.worldline.anchor.t) + (w.x_hi - 4 * step - float(o.worldline.anchor.x)) / float(o.worldline.velocity)
        p = o.worldline.at(t)
        out.append(_text(w, float(p.t), float(p.x), o.label, fill="#222"))
    for trng in s.trngs:
        a, b = _worldline_segment(w, trng.process.worldline)
        out.append(_line(w, a, b, stroke="#666", stroke_dasharray="2 3"))
    out.append("</g>")
    return out


def _markers(s: Scenario, r: Report, w: Window) -> list[str]:
    out = ['<g id="events" font-size="12">']
    for e in r.realization.determinations.events:
        cx, cy = w.px(e.location.t, e.location.x)
        out.append(f'<circle cx="{cx}" cy="{cy}" r="4" fill="#000"/>')
        out.append(_text(w, e.location.t, e.location.x, f"{e.variable}={e.value}", dx=6, dy=14))
    known = {e.variable for e in r.realization.determinations.events}
    for m in r.realization.measurements:
        if m.variable in known:
            continue
        cx, cy = w.px(m.location.t, m.location.x)
        out.append(f'<rect x="{_f(float(cx) - 4)}" y="{_f(float(cy) - 4)}" width="8" height="8" fill="#000"/>')
        out.append(_text(w, m.location.t, m.location.x, f"q{m.qubit}:{m.outcome}", dx=6, dy=14))
    for entry in r.entries():
        res = entry.get("result") or {}
        if entry["kind"] == "truth" and res:
            t, x = (float(Fraction(str(v))) for v in entry["inputs"]["at"])
            cx, cy = w.px(t, x)
            color = VALUE_COLORS[res["value"]]
            out.append(f'<circle cx="{cx}" cy="{cy}" r="3" fill="none" stroke="{color}" stroke-width="1.5">'
                       f'<title>{escape(entry["inputs"]["proposition"])}: {res["value"]}</title></circle>')
        elif entry["kind"] == "frontier" and res.get("point"):
            t, x = (float(Fraction(str(v))) for v in res["point"])
            cx, cy = (float(v) for v in w.px(t, x))
            out.append(f'<path d="M {_f(cx)} {_f(cy - 5)} L {_f(cx + 5)} {_f(cy)} L {_f(cx)} {_f(cy + 5)} '
                       f'L {_f(cx - 5)} {_f(cy)} Z" fill="#6a1b9a">'
                       f'<title>frontier of {escape(entry["inputs"]["proposition"])} at t = '
                       f'{_label(Fraction(str(res["t"])))}</title></path>')
    out.append("</g>")
    return out


def _is_empty(s: Scenario, r: Report) -> bool:
    return not (s.observers or s.trngs or r.realization.determinations.events
                or r.realization.measurements or s.queries
                or s.diagram.get("simultaneity") or any(f.velocity for f in s.frames))


def render_diagram(s: Scenario, r: Report) -> str:
    """SVG document for scenario ``s`` with the realized events of ``r``."""
    w = _window(s, r)
    header = (f"<!-- relindet space-time diagram; scale: 1 unit = {_f(w.scale)} px on both axes "
              f"(1 light-minute horizontally, 1 minute vertically, c = {_label(s.c)}); "
              f"window t in [{_label(w.t_lo)}, {_label(w.t_hi)}], x in [{_label(w.x_lo)}, {_label(w.x_hi)}]; "
              f"time increases upwards -->")
    x0, y0 = _f(MARGIN), _f(MARGIN)
    pw, ph = _f(w.width - 2 * MARGIN), _f(w.height - 2 * MARGIN)
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        header,
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(w.width)}" '
        f'height="{_f(w.height)}" viewBox="0 0 {_f(w.width)} {_f(w.height)}" font-family="sans-serif">',
        f"<title>{escape(s.name or 'scenario')}</title>",
        f'<defs><clipPath id="plot"><rect x="{x0}" y="{y0}" width="{pw}" height="{ph}"/></clipPath></defs>',
        f'<rect x="0" y="0" width="{_f(w.width)}" height="{_f(w.height)}" fill="#fff"/>',
    ]
    if not _is_empty(s, r):
        out.append('<g clip-path="url(#plot)">')
        out += _regions(s, r, w)
        out += _cones(s, r, w)
        out += _simultaneity(s, w)
        out += _worldlines(s, w)
        out += _markers(s, r, w)
        out.append("</g>")
    out += _axes(w)
    out.append("</svg>")
    return "\n".join(out) + "\n"
