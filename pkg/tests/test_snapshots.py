import pytest

from semac.snapshots import SnapshotError, load_snapshot, save_snapshot


class TestSnapshots:
    def test_roundtrip(self, tmp_path):
        p = tmp_path / "x.snap"
        save_snapshot(p, "mpc", {"a": 1})
        assert load_snapshot(p, "mpc") == {"a": 1}

    def test_kind_mismatch(self, tmp_path):
        p = tmp_path / "x.snap"
        save_snapshot(p, "mpc", 1)
        with pytest.raises(SnapshotError, match="kind"):
            load_snapshot(p, "atom-model")

    def test_garbage_rejected(self, tmp_path):
        p = tmp_path / "x.snap"
        p.write_bytes(b"not a pickle")
        with pytest.raises(SnapshotError):
            load_snapshot(p, "mpc")

    def test_foreign_pickle_rejected(self, tmp_path):
        import pickle

        p = tmp_path / "x.snap"
        p.write_bytes(pickle.dumps({"something": "else"}))
        with pytest.raises(SnapshotError, match="not a snapshot"):
            load_snapshot(p, "mpc")

    def test_missing_file(self, tmp_path):
        with pytest.raises(SnapshotError):
            load_snapshot(tmp_path / "absent.snap", "mpc")
