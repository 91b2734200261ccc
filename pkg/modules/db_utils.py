"""Run registry: training runs and their checkpoints in SQLite"""
import datetime
import json
import logging
import os
import sqlite3
import uuid
from contextlib import contextmanager

from modules import settings

logger = logging.getLogger(__name__)

# Schema version
CURRENT_DB_VERSION = 1

# Paths already initialized in this process
_INITIALIZED = set()


def get_db_connection(db_path=None):
    """Get a database connection with proper settings"""
    db_path = str(db_path or settings.db_path())
    os.makedirs(os.path.dirname(os.path.abspath(db_path)), exist_ok=True)
    conn = sqlite3.connect(db_path, timeout=20)  # Add timeout for busy waiting
    conn.execute("PRAGMA journal_mode=WAL")  # Use Write-Ahead Logging
    conn.execute("PRAGMA busy_timeout=10000")  # Wait up to 10 seconds if db is locked
    conn.row_factory = sqlite3.Row
    return conn


@contextmanager
def get_db(db_path=None):
    """Context manager for database connections"""
    conn = get_db_connection(db_path)
    try:
        yield conn
    finally:
        conn.close()


def init_db(db_path=None):
    """Create the registry tables if needed"""
    key = os.path.abspath(str(db_path or settings.db_path()))
    if key in _INITIALIZED:
        return

    try:
        with get_db(key) as conn:
            c = conn.cursor()
            c.execute('''
                CREATE TABLE IF NOT EXISTS db_version (
                    version INTEGER PRIMARY KEY
                )
            ''')
            c.execute("SELECT version FROM db_version")
            result = c.fetchone()
            if not result:
                c.execute("INSERT INTO db_version (version) VALUES (?)", (CURRENT_DB_VERSION,))
            elif result[0] > CURRENT_DB_VERSION:
                raise sqlite3.DatabaseError(
                    f"registry {key} has schema version {result[0]}, this code knows {CURRENT_DB_VERSION}"
                )

            c.execute('''
                CREATE TABLE IF NOT EXISTS training_runs (
                    id TEXT PRIMARY KEY,
                    corpus TEXT NOT NULL,
                    out_dir TEXT NOT NULL,
                    seed INTEGER NOT NULL,
                    steps INTEGER NOT NULL,
                    n_params INTEGER NOT NULL,
                    config TEXT NOT NULL,
                    status TEXT NOT NULL,
                    final_step INTEGER,
                    final_loss REAL,
                    final_checkpoint TEXT,
                    started_at TEXT NOT NULL,
                    finished_at TEXT
                )
            ''')
            c.execute('''
                CREATE TABLE IF NOT EXISTS run_checkpoints (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id TEXT NOT NULL,
                    step INTEGER NOT NULL,
                    path TEXT NOT NULL,
                    total_loss REAL,
                    created_at TEXT NOT NULL,
                    FOREIGN KEY (run_id) REFERENCES training_runs(id)
                )
            ''')
            conn.commit()
            _INITIALIZED.add(key)
            logger.debug("Run registry ready at %s", key)
    except sqlite3.Error as e:
        logger.error("Error initializing run registry %s: %s", key, e)
        raise


def start_run(db_path, config, n_params):
    """Register a new training run and return its id"""
    init_db(db_path)
    run_id = str(uuid.uuid4())
    now = datetime.datetime.now().isoformat()
    with get_db(db_path) as conn:
        conn.execute(
            """INSERT INTO training_runs
               (id, corpus, out_dir, seed, steps, n_params, config, status, started_at)
               VALUES (?, ?, ?, ?, ?, ?, ?, 'running', ?)""",
            (
                run_id,
                str(config.corpus),
                str(config.out_dir),
                int(config.seed),
                int(config.steps),
                int(n_params),
                json.dumps(config.to_dict(), sort_keys=True),
                now,
            ),
        )
        conn.commit()
    return run_id


def record_checkpoint(db_path, run_id, step, path, total_loss):
    with get_db(db_path) as conn:
        conn.execute(
            "INSERT INTO run_checkpoints (run_id, step, path, total_loss, created_at) VALUES (?, ?, ?, ?, ?)",
            (run_id, int(step), str(path), None if total_loss is None else float(total_loss), datetime.datetime.now().isoformat()),
        )
        conn.commit()


def finish_run(db_path, run_id, final_step, checkpoint, final_loss, status="finished"):
    with get_db(db_path) as conn:
        conn.execute(
            """UPDATE training_runs
               SET status = ?, final_step = ?, final_loss = ?, final_checkpoint = ?, finished_at = ?
               WHERE id = ?""",
            (
                status,
                int(final_step),
                None if final_loss is None else float(final_loss),
                str(checkpoint),
                datetime.datetime.now().isoformat(),
                run_id,
            ),
        )
        conn.commit()


def list_runs(db_path=None):
    """All runs, newest first, as dicts"""
    init_db(db_path)
    with get_db(db_path) as conn:
        rows = conn.execute("SELECT * FROM training_runs ORDER BY started_at DESC").fetchall()
        return [dict(row) for row in rows]


def list_checkpoints(run_id, db_path=None):
    init_db(db_path)
    with get_db(db_path) as conn:
        rows = conn.execute(
            "SELECT step, path, total_loss, created_at FROM run_checkpoints WHERE run_id = ? ORDER BY step",
            (run_id,),
        ).fetchall()
        return [dict(row) for row in rows]
