"""Rendering semantics over the golden exports.

The goldens are frozen sweep outputs: fig1.csv has exactly one
non-rational cell (kappa1 = -0.01), fig2.csv has six (the extreme-p
columns of its three pairs), fig3.csv has ten, and fig4.csv is fully
populated over five p values and twenty-one eps_P values.
"""

import numpy as np
import pytest

from figrender import FigureSpec, fig3_matrix, group_cells, read_rows, render

from conftest import count_group_markers, group_ids


def out(tmp_path, name="fig.svg"):
    return str(tmp_path / name)


class TestFigureSpec:
    def test_unknown_figure_rejected(self):
        with pytest.raises(ValueError, match="fig1"):
            FigureSpec("fig9", "in.csv", "out.svg")


class TestCellAggregation:
    def test_majority_rule_and_alpha_mean(self, data_dir):
        rows = read_rows(str(data_dir / "fig1.csv"))
        cells = group_cells(rows, lambda r: (r.kappa1,))
        assert len(cells) == 19
        stats = {k[0]: v for k, v in cells.items()}
        assert stats[-0.01].nonrational
        assert stats[-0.01].n == 10
        open_cells = [k for k, s in stats.items() if s.nonrational]
        assert open_cells == [-0.01]
        assert stats[0.5].alpha == pytest.approx(1 / 3, abs=0.02)

    def test_fig3_matrix_masks_nonrational_cells(self, data_dir):
        rows = read_rows(str(data_dir / "fig3.csv"))
        k1s, ps, data = fig3_matrix(rows)
        assert (len(ps), len(k1s)) == data.shape == (9, 19)
        assert int(np.ma.count_masked(data)) == 10
        col = k1s.index(-0.01)
        assert bool(data.mask[:, col].all())


class TestFig1:
    def test_open_circle_for_the_behavioral_cell(self, data_dir, tmp_path):
        path = out(tmp_path)
        n = render(FigureSpec("fig1", str(data_dir / "fig1.csv"), path))
        assert n == 190
        assert count_group_markers(path, "nonrational-open") == 1
        assert count_group_markers(path, "rational-filled") == 18

    def test_single_behavioral_row_single_open_marker(self, tmp_path):
        from figrender import HEADER
        csv_in = tmp_path / "one.csv"
        csv_in.write_text(
            ",".join(HEADER) + "\n"
            + "fig1,-0.01,0.001,0.5,0.001,1e-05,7,0,"
              "behavioral,,1,0.52,,true,false\n")
        path = out(tmp_path)
        assert render(FigureSpec("fig1", str(csv_in), path)) == 1
        assert count_group_markers(path, "nonrational-open") == 1
        assert "rational-filled" not in group_ids(path)


class TestFig2:
    def test_six_open_markers_at_extreme_p(self, data_dir, tmp_path):
        path = out(tmp_path)
        assert render(FigureSpec("fig2", str(data_dir / "fig2.csv"),
                                 path)) == 390
        assert count_group_markers(path, "nonrational-open") == 6


class TestFig3:
    def test_blank_cells_render_white(self, data_dir, tmp_path):
        path = out(tmp_path)
        assert render(FigureSpec("fig3", str(data_dir / "fig3.csv"),
                                 path)) == 1710
        text = open(path).read()
        i = text.find('id="alpha-cells"')
        assert i >= 0
        mesh = text[i:text.find("</g>", i)]
        assert mesh.count("fill: #ffffff") == 10
        assert mesh.count("<path") == 171


class TestFig4:
    def test_one_curve_per_p(self, data_dir, tmp_path):
        path = out(tmp_path)
        assert render(FigureSpec("fig4", str(data_dir / "fig4.csv"),
                                 path)) == 1050
        curves = {g for g in group_ids(path)
                  if g.startswith("welfare-curve-")}
        assert len(curves) == 5


class TestDeterminism:
    @pytest.mark.parametrize("figure", ["fig1", "fig2", "fig3", "fig4"])
    def test_rerender_is_byte_identical(self, data_dir, tmp_path, figure):
        csv_in = str(data_dir / f"{figure}.csv")
        a = out(tmp_path, "a.svg")
        b = out(tmp_path, "b.svg")
        render(FigureSpec(figure, csv_in, a))
        render(FigureSpec(figure, csv_in, b))
        with open(a, "rb") as fa, open(b, "rb") as fb:
            assert fa.read() == fb.read()


class TestEmptyInput:
    def test_axes_only_figure_written(self, data_dir, tmp_path):
        from figrender import HEADER
        csv_in = tmp_path / "empty.csv"
        csv_in.write_text(",".join(HEADER) + "\n")
        path = out(tmp_path)
        assert render(FigureSpec("fig1", str(csv_in), path)) == 0
        assert open(path).read().startswith("<?xml")
