import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gsscm.errors import DataError
from gsscm.io import fmt, matrix_to_csv, parse_csv, read_csv_matrix, records_to_csv


def test_header_detection():
    X, header = parse_csv("a,b\n1,2\n3,4\n")
    assert header == ["a", "b"]
    np.testing.assert_array_equal(X, [[1, 2], [3, 4]])
    X, header = parse_csv("1,2\n3,4\n")
    assert header is None and X.shape == (2, 2)


def test_non_numeric_cell_reports_position():
    with pytest.raises(DataError, match=r"row 3, column 2"):
        parse_csv("a,b\n1,2\n3,x\n")


def test_ragged_and_empty():
    with pytest.raises(DataError, match="row 2"):
        parse_csv("1,2\n3\n")
    with pytest.raises(DataError):
        parse_csv("")
    with pytest.raises(DataError):
        parse_csv("a,b\n")
    with pytest.raises(DataError):
        parse_csv("1,nan\n")


def test_missing_file(tmp_path):
    with pytest.raises(DataError, match="not found"):
        read_csv_matrix(tmp_path / "nope.csv")


def test_fmt():
    assert fmt(0.1) == "0.1"
    assert fmt(np.float64(1 / 3)) == repr(1 / 3)
    assert fmt(np.int64(3)) == "3"
    assert fmt(True) == "true"
    assert fmt(float("nan")) == "nan"


def test_records_to_csv():
    text = records_to_csv([{"a": 1, "b": 0.5}, {"a": 2, "b": 1e-300}], ["a", "b"])
    assert text == "a,b\n1,0.5\n2,1e-300\n"


@given(arrays(float, st.tuples(st.integers(1, 6), st.integers(1, 4)), elements=st.floats(allow_nan=False, allow_infinity=False)))
def test_round_trip_bit_identical(M):
    back, _ = parse_csv(matrix_to_csv(M))
    assert np.array_equal(back.view(np.uint64), M.view(np.uint64))


def test_round_trip_with_header():
    M = np.random.default_rng(0).standard_normal((4, 3))
    back, header = parse_csv(matrix_to_csv(M, ["x", "y", "z"]))
    assert header == ["x", "y", "z"]
    assert np.array_equal(back, M)
