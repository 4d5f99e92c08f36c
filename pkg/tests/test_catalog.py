"""CSV loading, transforms, and windowing."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idss.catalog import (
    TimeSeriesTable,
    VariableDef,
    apply_transforms,
    invert_transforms,
    load_table,
    slice_window,
    write_table,
)
from idss.errors import (
    DomainError,
    DuplicateYear,
    NonConsecutiveYears,
    ParseError,
    RangeError,
    TransformError,
)

CATALOG = [
    VariableDef("Health", transform="log"),
    VariableDef("GDP"),
    VariableDef("CFood"),
]


def write_csv(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadTable:
    def test_full_window(self, tmp_path):
        rows = "\n".join(f"{2008 + i},{100 + i},{50 + i}" for i in range(11))
        path = write_csv(tmp_path / "d.csv", "year,GDP,CFood\n" + rows + "\n")
        table = load_table(path, CATALOG)
        assert table.n_years == 11
        assert table.years == list(range(2008, 2019))
        assert table.absent == ("Health",)
        np.testing.assert_allclose(table.columns["GDP"], 100 + np.arange(11))

    def test_single_row(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", "year,GDP\n2008,1.5\n")
        table = load_table(path, CATALOG)
        assert table.n_years == 1

    def test_year_gap_rejected(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", "year,GDP\n2008,1\n2010,2\n")
        with pytest.raises(NonConsecutiveYears):
            load_table(path, CATALOG)

    def test_duplicate_year_rejected(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", "year,GDP\n2008,1\n2008,2\n")
        with pytest.raises(DuplicateYear):
            load_table(path, CATALOG)

    def test_non_numeric_cell_rejected(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", "year,GDP\n2008,abc\n")
        with pytest.raises(ParseError) as err:
            load_table(path, CATALOG)
        assert err.value.row == 2
        assert err.value.column == "GDP"

    def test_unknown_column_warned_and_dropped(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", "year,GDP,Mystery\n2008,1,9\n")
        table = load_table(path, CATALOG)
        assert "Mystery" not in table.columns
        assert any("Mystery" in w for w in table.warnings)

    def test_missing_cells_become_nan(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", "year,GDP\n2008,1\n2009,\n2010,3\n")
        table = load_table(path, CATALOG)
        assert np.isnan(table.columns["GDP"][1])
        assert table.mask("GDP").tolist() == [True, False, True]

    def test_rows_sorted_by_year(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", "year,GDP\n2009,2\n2008,1\n")
        table = load_table(path, CATALOG)
        assert table.years == [2008, 2009]
        assert table.columns["GDP"].tolist() == [1.0, 2.0]

    def test_missing_year_header(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", "GDP\n1\n")
        with pytest.raises(ParseError):
            load_table(path, CATALOG)


class TestRoundTrip:
    def test_write_then_load_is_bit_exact(self, tmp_path):
        rng = np.random.default_rng(1)
        values = np.round(rng.normal(100.0, 30.0, 9), 6)
        values[3] = np.nan
        table = TimeSeriesTable(
            years=list(range(2010, 2019)),
            columns={"GDP": values.copy(), "CFood": np.arange(9, dtype=float)},
        )
        path = tmp_path / "out.csv"
        write_table(table, path)
        back = load_table(path, CATALOG)
        got, want = back.columns["GDP"], values
        assert np.array_equal(np.isnan(got), np.isnan(want))
        assert np.array_equal(got[~np.isnan(got)], want[~np.isnan(want)])

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(
            st.floats(
                min_value=1e-3, max_value=1e6, allow_nan=False, allow_infinity=False
            ),
            min_size=1,
            max_size=8,
        )
    )
    def test_round_trip_random_values(self, tmp_path_factory, values):
        # 12 significant digits survive exactly for values already at that precision
        values = [float(format(v, ".12g")) for v in values]
        table = TimeSeriesTable(
            years=list(range(2000, 2000 + len(values))),
            columns={"GDP": np.array(values)},
        )
        path = tmp_path_factory.mktemp("rt") / "t.csv"
        write_table(table, path)
        back = load_table(path, CATALOG)
        assert back.columns["GDP"].tolist() == values


class TestTransforms:
    def test_log_applied_to_flagged_columns(self):
        table = TimeSeriesTable(
            years=[2008], columns={"Health": np.array([391.0]), "GDP": np.array([5.0])}
        )
        out = apply_transforms(table, CATALOG)
        assert out.columns["Health"][0] == pytest.approx(5.968707559985366, abs=1e-12)
        assert out.columns["GDP"][0] == 5.0
        assert out.transformed == frozenset({"Health"})

    def test_log_of_one_is_zero(self):
        table = TimeSeriesTable(years=[2008], columns={"Health": np.array([1.0])})
        out = apply_transforms(table, CATALOG)
        assert out.columns["Health"][0] == 0.0

    def test_zero_rejected(self):
        table = TimeSeriesTable(
            years=[2008, 2009], columns={"Health": np.array([1.0, 0.0])}
        )
        with pytest.raises(DomainError) as err:
            apply_transforms(table, CATALOG)
        assert err.value.variable == "Health"
        assert err.value.year == 2009

    def test_reapplication_refused(self):
        table = TimeSeriesTable(years=[2008], columns={"Health": np.array([2.0])})
        once = apply_transforms(table, CATALOG)
        with pytest.raises(TransformError):
            apply_transforms(once, CATALOG)

    def test_inverse_recovers_original(self):
        rng = np.random.default_rng(2)
        values = rng.uniform(0.5, 900.0, 12)
        table = TimeSeriesTable(
            years=list(range(2000, 2012)), columns={"Health": values.copy()}
        )
        back = invert_transforms(apply_transforms(table, CATALOG), CATALOG)
        np.testing.assert_allclose(back.columns["Health"], values, rtol=1e-12)
        assert back.transformed == frozenset()

    def test_missing_values_pass_through(self):
        table = TimeSeriesTable(
            years=[2008, 2009], columns={"Health": np.array([2.0, np.nan])}
        )
        out = apply_transforms(table, CATALOG)
        assert math.isnan(out.columns["Health"][1])


class TestSliceWindow:
    def make(self):
        return TimeSeriesTable(
            years=list(range(2008, 2019)),
            columns={"GDP": np.arange(11, dtype=float)},
        )

    def test_full_window_identity(self):
        table = self.make()
        out = slice_window(table, 2008, 2018)
        assert out.years == table.years
        np.testing.assert_array_equal(out.columns["GDP"], table.columns["GDP"])

    def test_inner_window(self):
        out = slice_window(self.make(), 2010, 2012)
        assert out.years == [2010, 2011, 2012]
        assert out.columns["GDP"].tolist() == [2.0, 3.0, 4.0]

    def test_out_of_range(self):
        with pytest.raises(RangeError):
            slice_window(self.make(), 2007, 2010)
        with pytest.raises(RangeError):
            slice_window(self.make(), 2010, 2022)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=2008, max_value=2018), st.integers(min_value=2008, max_value=2018))
    def test_length_is_span(self, a, b):
        if a > b:
            a, b = b, a
        out = slice_window(self.make(), a, b)
        assert out.n_years == b - a + 1
