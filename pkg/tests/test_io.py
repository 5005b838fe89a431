import numpy as np
import pytest
import scipy.sparse as sp

from gavesolve.io import read_csv_matrix, read_matrix, read_vector, write_matrix, write_vector


def test_matrix_roundtrip_is_exact(tmp_path):
    rng = np.random.default_rng(0)
    a = rng.normal(size=(7, 5)) * np.logspace(-12, 12, 5)
    path = tmp_path / "a.txt"
    write_matrix(path, a)
    assert np.array_equal(read_matrix(path), a)


def test_comments_are_skipped(tmp_path):
    path = tmp_path / "a.txt"
    write_matrix(path, np.eye(2), comments=("made by a test", "second line"))
    text = path.read_text()
    assert text.startswith("# made by a test")
    assert np.array_equal(read_matrix(path), np.eye(2))


def test_vector_roundtrip(tmp_path):
    v = np.array([1.5, -2.25, 1e-300])
    path = tmp_path / "v.txt"
    write_vector(path, v)
    assert np.array_equal(read_vector(path), v)


def test_sparse_written_dense(tmp_path):
    a = sp.csr_matrix(np.diag([1.0, 2.0, 3.0]))
    path = tmp_path / "m.txt"
    write_matrix(path, a)
    assert np.array_equal(read_matrix(path), np.diag([1.0, 2.0, 3.0]))


def test_entry_count_mismatch(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2 2\n1 2 3\n")
    with pytest.raises(ValueError, match="expected 4 entries"):
        read_matrix(path)


def test_read_vector_rejects_matrix(tmp_path):
    path = tmp_path / "a.txt"
    write_matrix(path, np.eye(2))
    with pytest.raises(ValueError, match="expected a vector"):
        read_vector(path)


def test_csv_reader(tmp_path):
    path = tmp_path / "a.csv"
    path.write_text("# a comment\n1.0,2.0\n-3.5,4.25\n")
    assert np.array_equal(read_csv_matrix(path), [[1.0, 2.0], [-3.5, 4.25]])
