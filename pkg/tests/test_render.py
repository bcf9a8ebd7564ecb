import re
import xml.etree.ElementTree as ET

from nucleation.lattice import effective_boundary
from nucleation.limit import nucleus
from nucleation.norms import parse_norm
from nucleation.render import svg_frame

NS = "{http://www.w3.org/2000/svg}"


def rects(svg):
    return ET.fromstring(svg).findall(f"{NS}rect")


def test_frame_has_one_square_per_cell():
    cells = nucleus(parse_norm("l2"), 0.85).nucleus
    rs = rects(svg_frame(cells))
    assert len(rs) == len(cells)
    got = {(float(r.get("x")) + 0.5, -float(r.get("y")) - 0.5) for r in rs}
    assert got == {(float(x), float(y)) for x, y in cells}


def test_frame_classes():
    cells = nucleus(parse_norm("l2"), 0.85).nucleus
    edge = effective_boundary(cells)
    for r in rects(svg_frame(cells)):
        x, y = int(float(r.get("x")) + 0.5), int(-float(r.get("y")) - 0.5)
        classes = r.get("class").split()
        assert classes[0] == ("even" if (x + y) % 2 == 0 else "odd")
        assert ("edge" in classes) == ((x, y) in edge)


def test_mixed_frame_uses_both_fills():
    svg = svg_frame({(0, 0), (1, 0)})
    assert {r.get("class") for r in rects(svg)} == {"even", "odd"}
    assert re.search(r"\.even\{fill:[^}]+\}", svg) and re.search(r"\.odd\{fill:[^}]+\}", svg)


def test_empty_frame():
    assert rects(svg_frame(set())) == []
