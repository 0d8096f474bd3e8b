import math
import xml.etree.ElementTree as ET

import pytest

from idealteich.develop import develop_layout, develop_svg, layout_to_svg
from idealteich.explore import FIGURE_EIGHT_CHART, WHITEHEAD_CHART
from idealteich.metrics import realize
from idealteich.pattern import analyze, builtin
from idealteich.teich import chart_for

SVG = "{http://www.w3.org/2000/svg}"


def dist(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


@pytest.mark.parametrize("name", ["figure_eight", "example3_genus3", "whitehead"])
def test_layout_places_every_triangle(name):
    p = builtin(name)
    rs = realize(p, None, [0.0] * chart_for(p).dim)
    cx = analyze(p)
    for c in cx.cusps:
        lay = develop_layout(rs, c.id)
        assert set(lay.placements) == set(c.corners)
        assert lay.max_side_error < 1e-9
        for (t, v), pts in lay.placements.items():
            for w, pt in pts.items():
                # side opposite corner w lies on face w
                a, b = [pts[u] for u in pts if u != w]
                assert dist(a, b) == pytest.approx(rs.length(cx.side(t, v, w)), rel=1e-9)


def test_figure_eight_complete_has_no_markers():
    rs = realize(builtin("figure_eight"), None, (0.0,))
    lay = develop_layout(rs, 0)
    assert lay.markers == ()
    assert len(lay.placements) == 8


def test_figure_eight_markers_off_center():
    rs = realize(builtin("figure_eight"), None, FIGURE_EIGHT_CHART.to_params(1.2))
    lay = develop_layout(rs, 0)
    assert lay.markers
    thetas = {round(m[2], 9) for m in lay.markers}
    assert thetas <= {round(t, 9) for t in rs.vertex_angles}


def test_whitehead_cusp_sizes_and_markers():
    p = builtin("whitehead")
    rs = realize(p, None, WHITEHEAD_CHART.to_params(1.0, math.sqrt(2)))
    sizes = sorted(len(develop_layout(rs, c).placements) for c in range(2))
    assert sizes == [4, 12]
    assert all(develop_layout(rs, c).markers == () for c in range(2))
    # the parameter origin is not complete: singular vertices get labels
    rs0 = realize(p, None, (0.0, 0.0))
    assert any(develop_layout(rs0, c).markers for c in range(2))


def test_svg_is_valid_and_deterministic():
    rs = realize(builtin("figure_eight"), None, FIGURE_EIGHT_CHART.to_params(1.2))
    a = develop_svg(rs, 0)
    b = develop_svg(realize(builtin("figure_eight"), None, rs.params), 0)
    assert a == b
    root = ET.fromstring(a.encode())
    assert root.tag == SVG + "svg"
    polys = root.iter(SVG + "polygon")
    assert len(list(polys)) == 8
    labels = [t.text for t in root.iter(SVG + "text")]
    assert labels and all(lbl.endswith("π") for lbl in labels)
    assert a == layout_to_svg(develop_layout(rs, 0))


def test_bad_cusp():
    rs = realize(builtin("figure_eight"), None, (0.0,))
    with pytest.raises((ValueError, IndexError)):
        develop_layout(rs, 3)


def test_whitehead_origin_is_equilateral_but_singular():
    rs = realize(builtin("whitehead"), None, (0.0, 0.0))
    assert all(abs(a - math.pi / 3) < 1e-12 for s in rs.tet_shapes for a in s.as_tuple())
    # cusp 1 only meets the two valence-6 edges, which are regular here
    small, big = develop_layout(rs, 1), develop_layout(rs, 0)
    assert len(small.placements) == 4 and small.markers == ()
    assert len(big.placements) == 12
    assert {round(m[2] / math.pi, 9) for m in big.markers} == {round(4 / 3, 9), round(8 / 3, 9)}


def test_example3_markers_off_center():
    rs = realize(builtin("example3_genus3"), None, (0.2,))
    lay = develop_layout(rs, 0)
    assert len(lay.placements) == 16 and lay.markers
