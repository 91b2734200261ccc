import sqlite3

import pytest

from modules import db_utils
from modules.trainer import TrainConfig


def test_run_lifecycle(tmp_path):
    db = tmp_path / "runs.db"
    config = TrainConfig(corpus="data/c", out_dir="runs/x", steps=10)
    run_id = db_utils.start_run(db, config, n_params=1234)
    db_utils.record_checkpoint(db, run_id, 5, tmp_path / "step_000005.stck", 0.5)
    db_utils.record_checkpoint(db, run_id, 10, tmp_path / "step_000010.stck", None)

    (run,) = db_utils.list_runs(db)
    assert run["status"] == "running" and run["n_params"] == 1234 and run["finished_at"] is None
    db_utils.finish_run(db, run_id, 10, tmp_path / "step_000010.stck", 0.25)
    (run,) = db_utils.list_runs(db)
    assert run["status"] == "finished" and run["final_loss"] == 0.25 and run["final_step"] == 10

    checkpoints = db_utils.list_checkpoints(run_id, db)
    assert [c["step"] for c in checkpoints] == [5, 10]
    assert checkpoints[1]["total_loss"] is None


def test_default_path_comes_from_environment(tmp_path):
    db_utils.init_db()
    assert (tmp_path / "runs.db").is_file()
    assert db_utils.list_runs() == []


def test_newer_schema_is_refused(tmp_path):
    db = tmp_path / "future.db"
    with sqlite3.connect(db) as conn:
        conn.execute("CREATE TABLE db_version (version INTEGER PRIMARY KEY)")
        conn.execute("INSERT INTO db_version VALUES (?)", (db_utils.CURRENT_DB_VERSION + 1,))
    with pytest.raises(sqlite3.DatabaseError):
        db_utils.init_db(db)
