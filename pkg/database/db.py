import json
import sqlite3
from contextlib import contextmanager
from typing import Optional

import numpy as np

import config
from agent import ACTION_COUNT
from environment import OBSERVATION_WIDTH
from errors import ResultsIOError
from network import NetworkParams


class ResultsDatabase:
    def __init__(self, db_path: str = config.DATABASE_PATH):
        self.db_path = str(db_path)
        self.init_db()

    @contextmanager
    def get_connection(self):
        try:
            conn = sqlite3.connect(self.db_path)
        except sqlite3.Error as e:
            raise ResultsIOError(self.db_path, f"cannot open database: {e}") from e
        conn.row_factory = sqlite3.Row
        try:
            yield conn
        except sqlite3.Error as e:
            raise ResultsIOError(self.db_path, f"database error: {e}") from e
        finally:
            conn.close()

    def init_db(self):
        """Initialize database tables"""
        with self.get_connection() as conn:
            cursor = conn.cursor()

            # One row per finished run
            cursor.execute("""
                CREATE TABLE IF NOT EXISTS runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    label TEXT,
                    seed INTEGER,
                    mode TEXT,
                    force REAL,
                    episodes INTEGER,
                    step_cap INTEGER,
                    diverged INTEGER DEFAULT 0,
                    wall_time REAL,
                    mean_steps REAL,
                    variance REAL,
                    cap_hits INTEGER,
                    config_json TEXT,
                    actor_weights BLOB,
                    critic_weights BLOB,
                    created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
                )
            """)

            # Steps survived per episode
            cursor.execute("""
                CREATE TABLE IF NOT EXISTS episodes (
                    run_id INTEGER,
                    episode INTEGER,
                    steps INTEGER,
                    PRIMARY KEY (run_id, episode),
                    FOREIGN KEY (run_id) REFERENCES runs(id)
                )
            """)

            conn.commit()

    # Run operations
    def save_record(self, record) -> int:
        """Store a RunRecord with its episodes and final weights, return the run id"""
        run_config = record.config
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute("""
                INSERT INTO runs (label, seed, mode, force, episodes, step_cap, diverged,
                                  wall_time, mean_steps, variance, cap_hits, config_json,
                                  actor_weights, critic_weights)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            """, (
                run_config.label,
                run_config.seed,
                run_config.rehearsal.mode.value,
                run_config.physics.force_magnitude,
                run_config.episodes,
                run_config.step_cap,
                1 if record.diverged else 0,
                record.wall_time,
                record.mean_steps,
                record.variance,
                record.cap_hits,
                json.dumps(run_config.to_dict(), sort_keys=True),
                _to_blob(record.final_actor),
                _to_blob(record.final_critic),
            ))
            run_id = cursor.lastrowid
            cursor.executemany(
                "INSERT INTO episodes (run_id, episode, steps) VALUES (?, ?, ?)",
                [(run_id, i + 1, int(s)) for i, s in enumerate(record.steps_per_episode)],
            )
            conn.commit()
            return run_id

    def get_run(self, run_id: int) -> Optional[dict]:
        """Get run summary by ID (weights excluded)"""
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute("""
                SELECT id, label, seed, mode, force, episodes, step_cap, diverged, wall_time,
                       mean_steps, variance, cap_hits, config_json, created_at
                FROM runs WHERE id = ?
            """, (run_id,))
            row = cursor.fetchone()
            return dict(row) if row else None

    def list_runs(self, label: Optional[str] = None) -> list:
        """All run summaries, optionally for one label"""
        with self.get_connection() as conn:
            cursor = conn.cursor()
            query = "SELECT id, label, seed, mode, force, mean_steps, variance, diverged FROM runs"
            if label is None:
                cursor.execute(query + " ORDER BY id")
            else:
                cursor.execute(query + " WHERE label = ? ORDER BY id", (label,))
            return [dict(row) for row in cursor.fetchall()]

    def get_episode_steps(self, run_id: int) -> np.ndarray:
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute("SELECT steps FROM episodes WHERE run_id = ? ORDER BY episode", (run_id,))
            return np.array([row["steps"] for row in cursor.fetchall()], dtype=np.int64)

    def load_network(self, run_id: int, role: str) -> Optional[NetworkParams]:
        """Final actor or critic of a stored run"""
        if role not in ("actor", "critic"):
            raise ValueError(f"role must be 'actor' or 'critic', got {role!r}")
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute(f"SELECT {role}_weights, config_json FROM runs WHERE id = ?", (run_id,))
            row = cursor.fetchone()
        if row is None or row[0] is None:
            return None
        hidden_width = json.loads(row[1])["run"]["hidden_width"]
        flat = np.frombuffer(row[0], dtype="<f8")
        sizes = (OBSERVATION_WIDTH, hidden_width, ACTION_COUNT)
        return NetworkParams.from_flat(sizes, flat)


def _to_blob(flat) -> Optional[bytes]:
    if flat is None:
        return None
    return np.asarray(flat, dtype="<f8").tobytes()
