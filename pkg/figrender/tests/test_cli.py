from figrender import HEADER
from figrender.cli import main


class TestRender:
    def test_happy_path(self, data_dir, tmp_path, capsys):
        path = str(tmp_path / "fig1.svg")
        rc = main(["render", "--figure", "fig1",
                   "--in", str(data_dir / "fig1.csv"), "--out", path])
        assert rc == 0
        assert "190 rows" in capsys.readouterr().out

    def test_empty_csv_warns_and_exits_one(self, tmp_path, capsys):
        csv_in = tmp_path / "empty.csv"
        csv_in.write_text(",".join(HEADER) + "\n")
        path = str(tmp_path / "fig.svg")
        rc = main(["render", "--figure", "fig2",
                   "--in", str(csv_in), "--out", path])
        assert rc == 1
        assert "no data rows" in capsys.readouterr().err
        assert (tmp_path / "fig.svg").exists()

    def test_schema_mismatch_names_column(self, tmp_path, capsys):
        csv_in = tmp_path / "bad.csv"
        csv_in.write_text(",".join(HEADER).replace("eps_P", "epsP") + "\n")
        rc = main(["render", "--figure", "fig1",
                   "--in", str(csv_in), "--out", str(tmp_path / "f.svg")])
        assert rc == 2
        err = capsys.readouterr().err
        assert "schema mismatch" in err and "eps_P" in err

    def test_missing_input_is_config_error(self, tmp_path):
        rc = main(["render", "--figure", "fig1",
                   "--in", str(tmp_path / "nope.csv"),
                   "--out", str(tmp_path / "f.svg")])
        assert rc == 2

    def test_unknown_figure_is_usage_error(self, tmp_path, capsys):
        rc = main(["render", "--figure", "fig9",
                   "--in", "x.csv", "--out", "y.svg"])
        assert rc == 2
        capsys.readouterr()
