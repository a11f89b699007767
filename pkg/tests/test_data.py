import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from breakmetrics.data import (
    Dataset,
    TimeSeries,
    break_dummies,
    describe,
    interaction,
    load_dataset,
    transform,
)
from breakmetrics.errors import (
    AlignmentMismatch,
    BreakOutOfRange,
    DuplicateColumn,
    EmptyFile,
    GapInYears,
    NonNumericCell,
    SeriesTooShort,
)


def make_series(values, name="x", start_year=1980):
    return TimeSeries(name=name, start_year=start_year, values=np.asarray(values, dtype=float))


class TestLoadDataset:
    def test_minimal_two_row_file(self):
        d = load_dataset("year,A,B\n1980,1.0,2.0\n1981,3.0,4.0\n")
        assert d.n_obs == 2
        assert d.names == ["A", "B"]
        assert d.start_year == 1980
        np.testing.assert_allclose(d["B"].values, [2.0, 4.0])

    def test_gap_in_years(self):
        with pytest.raises(GapInYears):
            load_dataset("year,A\n1980,1\n1982,2\n")

    def test_descending_years_rejected(self):
        with pytest.raises(GapInYears):
            load_dataset("year,A\n1981,1\n1980,2\n")

    def test_duplicate_column(self):
        with pytest.raises(DuplicateColumn):
            load_dataset("year,A,A\n1980,1,2\n")

    def test_non_numeric_cell(self):
        with pytest.raises(NonNumericCell):
            load_dataset("year,A\n1980,abc\n")

    def test_empty_file(self):
        with pytest.raises(EmptyFile):
            load_dataset("")
        with pytest.raises(EmptyFile):
            load_dataset("year,A\n")

    def test_crlf_accepted(self):
        d = load_dataset("year,A\r\n1980,1\r\n1981,2\r\n")
        assert d.n_obs == 2

    def test_bytes_accepted(self):
        d = load_dataset(b"year,A\n1980,1\n1981,2\n")
        assert d.n_obs == 2


class TestTransform:
    def test_diff_of_constant_is_zero(self):
        s = make_series([5.0] * 6)
        np.testing.assert_allclose(transform(s, "diff").values, np.zeros(5))

    def test_diff_arithmetic(self):
        s = make_series([1.0, 3.0, 6.0, 10.0])
        d = transform(s, "diff")
        np.testing.assert_allclose(d.values, [2.0, 3.0, 4.0])
        assert d.start_year == 1981

    def test_lead_then_lag_roundtrip(self):
        s = make_series([1.0, 2.0, 3.0, 4.0, 5.0])
        led = transform(s, "lead", 1)
        back = transform(led, "lag", 1)
        # overlap window recovers the original interior values
        np.testing.assert_allclose(back.values, s.values[1:-1])
        assert back.start_year == s.start_year + 1

    def test_diff_then_cumsum_reconstructs(self):
        rng = np.random.default_rng(4)
        s = make_series(rng.normal(size=20))
        d = transform(s, "diff")
        rebuilt = np.concatenate([[s.values[0]], s.values[0] + np.cumsum(d.values)])
        np.testing.assert_allclose(rebuilt, s.values, atol=1e-12)

    def test_trend(self):
        s = make_series([7.0, 7.0, 7.0])
        np.testing.assert_allclose(transform(s, "trend").values, [1.0, 2.0, 3.0])

    def test_too_short(self):
        with pytest.raises(SeriesTooShort):
            transform(make_series([1.0]), "diff")
        with pytest.raises(SeriesTooShort):
            transform(make_series([1.0, 2.0]), "lag", 2)


class TestBreakDummies:
    def test_model_a_example(self):
        bd = break_dummies(10, 4, "A")
        np.testing.assert_allclose(bd.du, [0, 0, 0, 0, 1, 1, 1, 1, 1, 1])
        assert bd.dt is None

    def test_model_c_example(self):
        bd = break_dummies(10, 4, "C")
        np.testing.assert_allclose(bd.dt, [0, 0, 0, 0, 1, 2, 3, 4, 5, 6])
        np.testing.assert_allclose(bd.du, [0, 0, 0, 0, 1, 1, 1, 1, 1, 1])

    def test_model_b_has_only_dt(self):
        bd = break_dummies(6, 2, "B")
        assert bd.du is None
        np.testing.assert_allclose(bd.dt, [0, 0, 1, 2, 3, 4])

    def test_boundary_rejected(self):
        with pytest.raises(BreakOutOfRange):
            break_dummies(10, 10, "A")
        with pytest.raises(BreakOutOfRange):
            break_dummies(10, 0, "A")

    def test_invariants_exhaustive_small_t(self):
        for T in range(2, 51):
            for tb in range(1, T):
                bd = break_dummies(T, tb, "C")
                assert bd.du.sum() == T - tb
                t = np.arange(1, T + 1)
                np.testing.assert_allclose(bd.du, (t > tb).astype(float))
                np.testing.assert_allclose(bd.dt, np.maximum(t - tb, 0))


class TestInteraction:
    def test_table_means_product(self):
        a = make_series([19.88], name="REN")
        b = make_series([62.1], name="IMP")
        term = interaction(a, b)
        assert term.name == "TERM"
        assert term.values[0] == pytest.approx(1234.548, abs=1e-9)

    def test_zero_factor(self):
        a = make_series([0.0, 0.0, 0.0])
        b = make_series([1.0, 2.0, 3.0])
        np.testing.assert_allclose(interaction(a, b).values, np.zeros(3))

    def test_square(self):
        a = make_series([2.0, 3.0])
        np.testing.assert_allclose(interaction(a, a).values, [4.0, 9.0])

    def test_alignment_mismatch(self):
        with pytest.raises(AlignmentMismatch):
            interaction(make_series([1.0, 2.0]), make_series([1.0, 2.0], start_year=1985))

    @given(st.integers(min_value=0, max_value=5_000))
    @settings(max_examples=25, deadline=None)
    def test_commutative_and_distributive(self, seed):
        rng = np.random.default_rng(seed)
        a = make_series(rng.normal(size=8), "a")
        b = make_series(rng.normal(size=8), "b")
        c = make_series(rng.normal(size=8), "c")
        np.testing.assert_allclose(interaction(a, b).values, interaction(b, a).values)
        bc_sum = make_series(b.values + c.values, "bc")
        np.testing.assert_allclose(
            interaction(a, bc_sum).values,
            interaction(a, b).values + interaction(a, c).values,
            atol=1e-12,
        )


class TestDescribe:
    def test_constant_column(self):
        d = Dataset({"K": make_series([3.0, 3.0, 3.0, 3.0], "K")})
        row = describe(d)[0]
        assert row["sd"] == 0.0
        assert row["min"] == row["max"] == row["mean"] == 3.0

    def test_sd_uses_t_minus_one(self):
        d = Dataset({"x": make_series([1.0, 2.0, 3.0], "x")})
        assert describe(d)[0]["sd"] == pytest.approx(1.0)


class TestDataset:
    def test_column_order_preserved(self):
        d = load_dataset("year,Z,A,M\n1980,1,2,3\n1981,4,5,6\n")
        assert d.names == ["Z", "A", "M"]
        np.testing.assert_allclose(d.matrix(), [[1, 2, 3], [4, 5, 6]])

    def test_with_column_alignment_checks(self):
        d = load_dataset("year,A\n1980,1\n1981,2\n")
        with pytest.raises(DuplicateColumn):
            d.with_column(make_series([9.0, 9.0], name="A"))
        with pytest.raises(AlignmentMismatch):
            d.with_column(make_series([9.0, 9.0, 9.0], name="B"))
        d2 = d.with_column(make_series([9.0, 10.0], name="B"))
        assert d2.names == ["A", "B"]
