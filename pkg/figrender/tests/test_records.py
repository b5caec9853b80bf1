import math

import pytest

from figrender import HEADER, SchemaError, read_rows

GOOD_HEADER = ",".join(HEADER)


def write(tmp_path, text, name="in.csv"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestHeader:
    def test_golden_files_parse(self, data_dir):
        for name, n in [("fig1.csv", 190), ("fig2.csv", 390),
                        ("fig3.csv", 1710), ("fig4.csv", 1050)]:
            rows = read_rows(str(data_dir / name))
            assert len(rows) == n

    def test_swapped_column_names_first_offender(self, tmp_path):
        bad = GOOD_HEADER.replace("kappa1,kappa2", "kappa2,kappa1")
        with pytest.raises(SchemaError, match="expected 'kappa1'") as ei:
            read_rows(write(tmp_path, bad + "\n"))
        assert ei.value.column == "kappa1"

    def test_missing_trailing_column(self, tmp_path):
        bad = GOOD_HEADER.rsplit(",", 1)[0]
        with pytest.raises(SchemaError, match="oscillating"):
            read_rows(write(tmp_path, bad + "\n"))

    def test_extra_column_named(self, tmp_path):
        with pytest.raises(SchemaError, match="extra column 'notes'"):
            read_rows(write(tmp_path, GOOD_HEADER + ",notes\n"))

    def test_no_header_at_all(self, tmp_path):
        with pytest.raises(SchemaError, match="no header"):
            read_rows(write(tmp_path, ""))


class TestValues:
    def test_empty_mean_alpha_is_nan(self, tmp_path):
        line = ("fig1,-0.01,0.001,0.5,0.001,1e-05,42,0,"
                "behavioral,,1,0.52,,true,false")
        rows = read_rows(write(tmp_path, GOOD_HEADER + "\n" + line + "\n"))
        assert len(rows) == 1
        assert math.isnan(rows[0].mean_alpha)
        assert math.isnan(rows[0].welfare_norm)
        assert rows[0].converged is True
        assert rows[0].oscillating is False
        assert rows[0].final_kind == "behavioral"

    def test_bad_bool_rejected(self, tmp_path):
        line = ("fig1,-0.01,0.001,0.5,0.001,1e-05,42,0,"
                "behavioral,,1,0.52,,yes,false")
        with pytest.raises(SchemaError, match="converged"):
            read_rows(write(tmp_path, GOOD_HEADER + "\n" + line + "\n"))

    def test_short_row_rejected(self, tmp_path):
        with pytest.raises(SchemaError, match="expected 15 fields"):
            read_rows(write(tmp_path, GOOD_HEADER + "\nfig1,0.5\n"))

    def test_garbage_number_rejected(self, tmp_path):
        line = ("fig1,zero,0.001,0.5,0.001,1e-05,42,0,"
                "rational,0.1,0,0.5,0.5,true,false")
        with pytest.raises(SchemaError, match="line 2"):
            read_rows(write(tmp_path, GOOD_HEADER + "\n" + line + "\n"))
