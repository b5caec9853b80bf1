import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

SVG_NS = "{http://www.w3.org/2000/svg}"
DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


def count_group_markers(svg_path, gid: str):
    """Number of drawn elements inside the <g> with the given id.

    matplotlib encodes repeated scatter markers as <use> references to a
    shared <defs> path but inlines a lone marker as a plain <path>, so
    both count; the <defs> subtree itself does not.

    Returns None when no group carries the id at all.
    """
    root = ET.parse(svg_path).getroot()
    for g in root.iter(SVG_NS + "g"):
        if g.get("id") != gid:
            continue
        n = 0
        stack = [g]
        while stack:
            el = stack.pop()
            for child in el:
                tag = child.tag.removeprefix(SVG_NS)
                if tag == "defs":
                    continue
                if tag in ("use", "path"):
                    n += 1
                stack.append(child)
        return n
    return None


def group_ids(svg_path) -> set:
    root = ET.parse(svg_path).getroot()
    return {g.get("id") for g in root.iter(SVG_NS + "g") if g.get("id")}
