"""Round-trip and diagnostics tests for the plain-text file formats."""

import os

import numpy as np
import pytest

from spdalign.errors import ValidationError
from spdalign.fileio import (
    atomic_write,
    load_dataset,
    load_matrix,
    load_trace,
    load_transform,
    parse_manifest,
    save_manifest,
    save_matrix,
    save_trace,
    save_transform,
)
from spdalign.optimizer import StopReason, TrainResult


def awkward_matrix():
    return np.array(
        [
            [np.pi, 1.0 / 3.0, -1e-17],
            [1e17, -0.0, 2.0**-52],
            [123456789.123456789, -np.e, 1e300],
        ]
    )


class TestAtomicWrite:
    def test_writes_exact_content(self, tmp_path):
        target = tmp_path / "out.txt"
        atomic_write(str(target), "hello\nworld\n")
        assert target.read_text() == "hello\nworld\n"

    def test_replaces_existing_and_leaves_no_temp(self, tmp_path):
        target = tmp_path / "out.txt"
        target.write_text("old")
        atomic_write(str(target), "new")
        assert target.read_text() == "new"
        assert os.listdir(tmp_path) == ["out.txt"]


class TestMatrixFormat:
    def test_round_trip_is_exact(self, tmp_path):
        X = awkward_matrix()
        path = str(tmp_path / "m.txt")
        save_matrix(path, X)
        assert np.array_equal(load_matrix(path), X)

    def test_header_and_layout(self, tmp_path):
        path = str(tmp_path / "m.txt")
        save_matrix(path, np.eye(2))
        lines = (tmp_path / "m.txt").read_text().splitlines()
        assert lines[0] == "2"
        assert lines[1].split() == ["1", "0"]
        assert len(lines) == 3

    def test_skips_comments_and_blanks(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("# a comment\n\n2\n1 0\n\n# another\n0 1\n")
        assert np.array_equal(load_matrix(str(path)), np.eye(2))

    def test_rejects_non_square_save(self, tmp_path):
        with pytest.raises(ValidationError):
            save_matrix(str(tmp_path / "m.txt"), np.ones((2, 3)))

    @pytest.mark.parametrize(
        "content, fragment",
        [
            ("", "empty"),
            ("x\n1\n", "not an integer"),
            ("0\n", ">= 1"),
            ("2 2\n1 0\n0 1\n", "header"),
            ("2\n1 0\n", "expected 2 data rows"),
            ("2\n1 0\n0 1\n5 5\n", "more than 2"),
            ("2\n1 0 0\n0 1\n", "m.txt:2"),
            ("2\n1 zebra\n0 1\n", "non-numeric"),
            ("2\n1 inf\n0 1\n", "non-finite"),
        ],
    )
    def test_malformed_file_diagnostics(self, tmp_path, content, fragment):
        path = tmp_path / "m.txt"
        path.write_text(content)
        with pytest.raises(ValidationError, match=fragment):
            load_matrix(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError, match="cannot read"):
            load_matrix(str(tmp_path / "absent.txt"))


class TestTransformFormat:
    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        W = rng.standard_normal((5, 2))
        path = str(tmp_path / "w.txt")
        save_transform(path, W)
        assert np.array_equal(load_transform(path), W)

    def test_header_holds_both_dims(self, tmp_path):
        path = tmp_path / "w.txt"
        save_transform(str(path), np.ones((4, 3)))
        assert path.read_text().splitlines()[0] == "4 3"

    def test_rejects_one_dimensional(self, tmp_path):
        with pytest.raises(ValidationError):
            save_transform(str(tmp_path / "w.txt"), np.ones(4))

    def test_rejects_single_int_header(self, tmp_path):
        path = tmp_path / "w.txt"
        path.write_text("3\n1 1 1\n")
        with pytest.raises(ValidationError, match="2 integer"):
            load_transform(str(path))


class TestTraceFormat:
    def make_result(self):
        return TrainResult(
            W_final=np.eye(3, 2),
            J_trace=np.array([0.1, 0.25, 1.0 / 3.0]),
            grad_norm_trace=np.array([1.0, 0.5, 1e-7]),
            step_trace=np.array([0.0, 0.125, 0.0625]),
            iterations_used=2,
            stop_reason=StopReason.GRAD_TOL,
        )

    def test_round_trip(self, tmp_path):
        path = str(tmp_path / "trace.txt")
        result = self.make_result()
        save_trace(path, result)
        table = load_trace(path)
        assert table.shape == (3, 4)
        assert np.array_equal(table[:, 0], [0, 1, 2])
        assert np.array_equal(table[:, 1], result.J_trace)
        assert np.array_equal(table[:, 2], result.grad_norm_trace)
        assert np.array_equal(table[:, 3], result.step_trace)

    def test_header_comment_present(self, tmp_path):
        path = tmp_path / "trace.txt"
        save_trace(str(path), self.make_result())
        assert path.read_text().splitlines()[0] == "# iter J grad_norm step"

    def test_rejects_empty(self, tmp_path):
        path = tmp_path / "trace.txt"
        path.write_text("# iter J grad_norm step\n")
        with pytest.raises(ValidationError, match="no data rows"):
            load_trace(str(path))


class TestManifest:
    def test_round_trip(self, tmp_path):
        path = str(tmp_path / "manifest.txt")
        entries = [("s0", "walk", "a/s0.txt"), ("s1", "run", "a/s1.txt")]
        save_manifest(path, entries)
        assert parse_manifest(path) == entries

    def test_path_may_hold_spaces(self, tmp_path):
        path = tmp_path / "manifest.txt"
        path.write_text("s0 walk my data/s0.txt\ns1 run b.txt\n")
        entries = parse_manifest(str(path))
        assert entries[0] == ("s0", "walk", "my data/s0.txt")

    def test_rejects_duplicate_ids(self, tmp_path):
        path = tmp_path / "manifest.txt"
        path.write_text("s0 a x.txt\ns0 b y.txt\n")
        with pytest.raises(ValidationError, match="duplicate"):
            parse_manifest(str(path))

    def test_rejects_short_rows(self, tmp_path):
        path = tmp_path / "manifest.txt"
        path.write_text("s0 walk\n")
        with pytest.raises(ValidationError, match="manifest.txt:1"):
            parse_manifest(str(path))

    def test_rejects_empty(self, tmp_path):
        path = tmp_path / "manifest.txt"
        path.write_text("# only comments\n")
        with pytest.raises(ValidationError, match="no entries"):
            parse_manifest(str(path))


class TestLoadDataset:
    def write_corpus(self, tmp_path):
        sub = tmp_path / "mats"
        sub.mkdir()
        matrices = {
            "s0": 2.0 * np.eye(2),
            "s1": np.array([[2.0, 1.0], [1.0, 2.0]]),
            "s2": np.eye(2),
            "s3": np.diag([3.0, 0.5]),
        }
        for name, X in matrices.items():
            save_matrix(str(sub / f"{name}.txt"), X)
        manifest = tmp_path / "manifest.txt"
        save_manifest(
            str(manifest),
            [
                ("s0", "walk", "mats/s0.txt"),
                ("s1", "run", "mats/s1.txt"),
                ("s2", "walk", "mats/s2.txt"),
                ("s3", "run", "mats/s3.txt"),
            ],
        )
        return str(manifest), matrices

    def test_loads_samples_and_maps_labels(self, tmp_path):
        manifest, matrices = self.write_corpus(tmp_path)
        data, ids, label_names = load_dataset(manifest)
        assert ids == ["s0", "s1", "s2", "s3"]
        assert label_names == ["run", "walk"]  # sorted label strings
        assert data.labels.tolist() == [1, 0, 1, 0]
        for i, name in enumerate(ids):
            assert np.array_equal(data.samples[i], matrices[name])

    def test_rejects_shape_mismatch(self, tmp_path):
        manifest, _ = self.write_corpus(tmp_path)
        save_matrix(str(tmp_path / "mats" / "s2.txt"), np.eye(3))
        with pytest.raises(ValidationError, match="shape"):
            load_dataset(manifest)

    def test_rejects_missing_sample_file(self, tmp_path):
        manifest, _ = self.write_corpus(tmp_path)
        os.unlink(str(tmp_path / "mats" / "s3.txt"))
        with pytest.raises(ValidationError, match="cannot read"):
            load_dataset(manifest)
