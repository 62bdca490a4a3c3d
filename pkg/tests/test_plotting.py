"""
Unit tests for map figures: charts, branch grouping and SVG output
"""

import math
import pytest
import sys
import os
import xml.etree.ElementTree as ET

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.errors import OutOfRangeError, ValidationError
from src.exact import QNum
from src.plotting import (
    PlotSpec, build_figure, chart_range, plot_map, render_svg, to_chart,
)
from src.utils import load_preset


SVG = "{http://www.w3.org/2000/svg}"


def groups(svg_text, cls):
    root = ET.fromstring(svg_text)
    return [el for el in root.iter() if el.get("class") == cls]


@pytest.fixture(scope="module")
def tau():
    return load_preset("tau-minus-one")


class TestPlotSpec:
    """Plot options"""

    def test_defaults(self):
        plot = PlotSpec()
        assert (plot.which, plot.resolution, plot.circular) == ("F", 200, False)

    def test_unknown_map(self):
        with pytest.raises(ValidationError):
            PlotSpec("G")

    def test_resolution(self):
        with pytest.raises(OutOfRangeError):
            PlotSpec("F", resolution=1)


class TestCharts:
    """Rational and angle charts"""

    def test_ranges(self):
        assert chart_range(False) == (0.0, 2.0)
        assert chart_range(True) == pytest.approx((-math.pi / 2, 3 * math.pi / 2))

    def test_linear_chart(self):
        assert list(to_chart([QNum(0), QNum.rational(1, 2)], False)) == [0.0, 0.5]

    def test_angle_chart(self):
        values = to_chart([QNum(0), QNum(1), QNum(2)], True)
        assert values == pytest.approx([-math.pi / 2, math.pi / 2, 3 * math.pi / 2])


class TestFigures:
    """Curves grouped by acting matrix"""

    def test_tau_minus_one_slow_map(self, tau):
        fig = build_figure(tau, PlotSpec("F", resolution=10))
        assert fig.curve_count == 4
        assert sorted(label for label, _ in fig.domain_labels) == ["o", "p", "q", "r", "s", "t"]
        shared = sorted(br.labels for br in fig.branches if len(br.labels) > 1)
        assert shared == [["q", "r"], ["s", "t"]]

    def test_farey_maps(self):
        spec = load_preset("farey")
        assert build_figure(spec, PlotSpec("F", resolution=10)).curve_count == 2
        assert build_figure(spec, PlotSpec("Fdual", resolution=10)).curve_count == 2

    def test_farey_jump_blocks(self):
        fig = build_figure(load_preset("farey"), PlotSpec("Fjump", resolution=5))
        labels = [br.labels[0] for br in fig.branches]
        assert labels[:3] == ["b", "ab", "a^2b"]
        assert fig.curve_count == 12

    def test_segments_sampled(self, tau):
        fig = build_figure(tau, PlotSpec("F", resolution=10, circular=True))
        assert all(br.segments for br in fig.branches)

    def test_attractor_rows(self, tau):
        fig = build_figure(tau, PlotSpec("attractor"))
        assert [b.label for b in fig.bands] == ["H_0", "K_0", "H_1", "K_1"]
        assert fig.curve_count == 0

    def test_missing_attractor(self):
        spec = load_preset("farey").with_candidates(H=None)
        with pytest.raises(ValidationError):
            build_figure(spec, PlotSpec("F"))


class TestSvg:
    """Structure of the written figure"""

    def test_branch_groups(self, tau):
        svg = render_svg(build_figure(tau, PlotSpec("F", resolution=10)))
        assert len(groups(svg, "branch")) == 4
        assert len(groups(svg, "domain-label")) == 6
        root = ET.fromstring(svg)
        assert root.tag == SVG + "svg"
        assert root.find(SVG + "title").text == "tau-minus-one: F"

    def test_attractor_components(self, tau):
        svg = render_svg(build_figure(tau, PlotSpec("attractor")))
        assert [g.get("data-label") for g in groups(svg, "component")] == ["H_0", "K_0", "H_1", "K_1"]

    def test_plot_map_writes_files(self, tau, tmp_path):
        out = tmp_path / "f.svg"
        html = tmp_path / "f.html"
        fig = plot_map(tau, PlotSpec("F", resolution=10), str(out), str(html))
        assert fig.curve_count == 4
        assert out.read_text(encoding="utf-8").startswith("<svg")
        assert html.exists()


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
