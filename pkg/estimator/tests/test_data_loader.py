import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from data_loader import CsvFormatError, Dataset, as_matrix, ingest_csv, load_oracle_mean, save_csv

finite_doubles = st.floats(allow_nan=False, allow_infinity=False, width=64)


def test_dataset_promotes_vector_to_column():
    ds = Dataset([1.0, 2.0, 3.0])
    assert ds.values.shape == (3, 1)
    assert (ds.n, ds.d) == (3, 1)
    assert not ds.values.flags.writeable


@pytest.mark.parametrize("values", [[[np.nan, 1.0]], [[np.inf]], np.zeros((0, 2))])
def test_dataset_rejects_bad_values(values):
    with pytest.raises(ValueError):
        Dataset(values)


def test_dataset_rejects_label_length_mismatch():
    with pytest.raises(ValueError):
        Dataset(np.zeros((3, 2)), labels=[True, False])


def test_as_matrix_passes_dataset_through():
    ds = Dataset(np.eye(2))
    assert as_matrix(ds) is ds.values


def test_round_trip_with_labels(tmp_path):
    path = tmp_path / "data.csv"
    values = np.array([[0.1, -2.5], [1e-300, 3.0], [7.0, 1.0 / 3.0]])
    labels = np.array([True, False, True])
    save_csv(path, values, labels)

    ds = ingest_csv(path)
    np.testing.assert_array_equal(ds.values, values)
    np.testing.assert_array_equal(ds.labels, labels)
    assert path.read_text().splitlines()[0] == "x0,x1,is_inlier"


def test_missing_label_column_gives_no_labels(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("x0,x1\n1,2\n3,4\n")
    ds = ingest_csv(path)
    assert ds.labels is None
    np.testing.assert_array_equal(ds.values, [[1.0, 2.0], [3.0, 4.0]])


@given(st.lists(st.tuples(finite_doubles, finite_doubles), min_size=1, max_size=20))
def test_seventeen_digit_round_trip_is_exact(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("rt") / "data.csv"
    values = np.array(rows, dtype=np.float64)
    save_csv(path, values)
    np.testing.assert_array_equal(ingest_csv(path).values, values)


def test_long_row_reports_line(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("x0,x1\n1,2\n3,4,5\n")
    with pytest.raises(CsvFormatError) as info:
        ingest_csv(path)
    assert info.value.line == 3


def test_short_row_reports_line(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("x0,x1\n1,2\n3,4\n5\n")
    with pytest.raises(CsvFormatError) as info:
        ingest_csv(path)
    assert info.value.line == 4


def test_non_numeric_cell_reports_line(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("x0,x1\n1,2\n3,abc\n")
    with pytest.raises(CsvFormatError) as info:
        ingest_csv(path)
    assert info.value.line == 3
    assert "abc" in str(info.value)


def test_bad_label_reports_line(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("x0,is_inlier\n1,1\n2,maybe\n")
    with pytest.raises(CsvFormatError) as info:
        ingest_csv(path)
    assert info.value.line == 3


def test_load_oracle_mean(tmp_path):
    path = tmp_path / "oracle.csv"
    save_csv(path, np.array([[0.5, -0.25]]))
    np.testing.assert_array_equal(load_oracle_mean(path), [0.5, -0.25])

    save_csv(path, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        load_oracle_mean(path)
