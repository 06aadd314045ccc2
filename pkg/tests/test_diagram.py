from __future__ import annotations

import re
import xml.etree.ElementTree as ET

import pytest

from relindet.diagram import render_diagram
from relindet.engine import run
from relindet.scenario import BUILTINS, load_builtin, parse_scenario

SVG = "{http://www.w3.org/2000/svg}"


def render(s):
    return render_diagram(s, run(s))


def groups(svg: str) -> dict[str, ET.Element]:
    root = ET.fromstring(svg.encode())
    return {g.get("id"): g for g in root.iter(f"{SVG}g") if g.get("id")}


def to_pixel(t, x, t_hi=2, x_lo=-1, scale=160, margin=48):
    return margin + (x - x_lo) * scale, margin + (t_hi - t) * scale


@pytest.mark.parametrize("name", BUILTINS)
def test_builtins_render_valid_svg(name):
    svg = render(load_builtin(name))
    root = ET.fromstring(svg.encode())
    assert root.tag == f"{SVG}svg" and root.get("version") == "1.1"
    assert {"axes", "worldlines", "events", "light-cones"} <= set(groups(svg))


@pytest.mark.parametrize("name", BUILTINS)
def test_output_is_byte_stable(name):
    s = load_builtin(name)
    assert render(s) == render(s)


def test_empty_scenario_has_axes_only():
    svg = render(parse_scenario({"c": 1}))
    assert set(groups(svg)) == {"axes"}


def test_scale_in_header():
    svg = render(load_builtin("fig2"))
    m = re.search(r"<!-- .*scale: 1 unit = ([0-9.]+) px on both axes", svg)
    assert m and float(m.group(1)) == 160
    assert "window t in [-1, 2], x in [-1, 2]" in svg


def test_fig2_region_apex_at_half_minute():
    svg = render(load_builtin("fig2"))
    region = groups(svg)["determinate-regions"]
    paths = [p for p in region.iter(f"{SVG}path") if "a^b=0" in p.findtext(f"{SVG}title", "")]
    assert paths
    coords = list(map(float, re.findall(r"-?\d+\.\d+", paths[0].get("d"))))
    pts = list(zip(coords[::2], coords[1::2]))
    apex = max(pts, key=lambda p: p[1])  # lowest point on screen is earliest in time
    assert apex == to_pixel(0.5, 0.5) == (288, 288)


def test_window_hint_respected():
    s = parse_scenario({"c": 1, "events": [{"variable": "a", "at": [0, 0]}],
                        "diagram": {"window": {"t": [-2, 3], "x": [-4, 4]}}})
    assert "window t in [-2, 3], x in [-4, 4]" in render(s)


def test_simultaneity_lines_drawn_for_requested_frames():
    s = load_builtin("fig1")
    lines = list(groups(render(s))["simultaneity"].iter(f"{SVG}line"))
    assert lines
