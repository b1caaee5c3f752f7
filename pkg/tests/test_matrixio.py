import numpy as np
import pytest

from localrank import FormatError, read_matrix, write_matrix


class TestCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "m.csv"
        X = np.array([[1.5, -2.0], [3.25e-8, 4.0], [1 / 3, 7.0]])
        write_matrix(path, X)
        assert np.array_equal(read_matrix(path), X)

    def test_optional_header_row(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b\n1,2\n3,4\n")
        assert read_matrix(path).tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_non_numeric_cell_located(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3,oops\n")
        with pytest.raises(FormatError, match="row 2, column 2"):
            read_matrix(path)

    def test_nan_cell_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3,nan\n")
        with pytest.raises(FormatError, match="row 2, column 2"):
            read_matrix(path)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(FormatError, match="row 2"):
            read_matrix(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("\n")
        with pytest.raises(FormatError, match="no numeric rows"):
            read_matrix(path)


class TestBinary:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "m.bin"
        rng = np.random.default_rng(0)
        X = rng.standard_normal((7, 3))
        write_matrix(path, X)
        assert np.array_equal(read_matrix(path), X)
        # header: two little-endian uint32
        raw = path.read_bytes()
        assert len(raw) == 8 + 7 * 3 * 8
        assert int.from_bytes(raw[:4], "little") == 7
        assert int.from_bytes(raw[4:8], "little") == 3

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "m.bin"
        write_matrix(path, np.ones((4, 2)))
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(FormatError, match="expected"):
            read_matrix(path)

    def test_format_override(self, tmp_path):
        path = tmp_path / "weird.csv"
        write_matrix(path, np.ones((2, 2)), fmt="binary")
        assert read_matrix(path, fmt="binary").tolist() == [[1, 1], [1, 1]]
