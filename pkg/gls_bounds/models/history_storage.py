"""Code that handles the storage of verification history using sqlite3."""

from __future__ import annotations

import logging
import sqlite3
from datetime import datetime
from pathlib import Path

from gls_bounds.data_models import HistoryEntry, VerificationReport
from gls_bounds.models.constants import InequalityId, Verdict

logger = logging.getLogger(__name__)

INEQUALITIES_BY_LABEL = {inequality.label: inequality for inequality in InequalityId}


class ReportHistory:
    """Stores verification reports of past runs in a sqlite3 database."""

    def __init__(self, database_path: Path) -> None:
        """Initializes the history by opening, or first creating, the database.

        Args:
            database_path: Location of the database file.
        """
        self.database_path = database_path
        self.database = self.get_database_connection()

    def get_database_connection(self) -> sqlite3.Connection:
        """Returns the database connection, runs the create function if the database doesn't already exist.

        Returns:
            The database connection.
        """
        if self.database_path.exists():
            return sqlite3.connect(self.database_path)

        self.create_database()
        return sqlite3.connect(self.database_path)

    def create_database(self) -> None:
        """Creates the database and configures it."""
        self.database_path.parent.mkdir(parents=True, exist_ok=True)

        # Will implicitly create the database file
        database = sqlite3.connect(self.database_path)

        cursor = database.cursor()
        cursor.execute(
            """CREATE TABLE verification_history (
            id INTEGER PRIMARY KEY,
            timestamp INTEGER,
            inequality TEXT,
            instance TEXT,
            lhs REAL,
            rhs REAL,
            sigma REAL,
            verdict TEXT,
            seed TEXT,
            sample_count INTEGER,
            note TEXT
        )"""
        )

        database.commit()
        database.close()
        logger.info("Created verification history at %s", self.database_path)

    def store_reports(self, reports: list[VerificationReport]) -> int:
        """Stores the reports of one run under the current Unix timestamp.

        Args:
            reports: The reports to store.

        Returns:
            The timestamp of the run.
        """
        timestamp = int(datetime.now().timestamp())
        self.database.executemany(
            """INSERT INTO verification_history
            (timestamp, inequality, instance, lhs, rhs, sigma, verdict, seed, sample_count, note)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)""",
            [
                (
                    timestamp,
                    report.inequality.label,
                    report.instance,
                    report.lhs,
                    report.rhs,
                    report.sigma,
                    report.verdict.value,
                    # Seeds use all 64 bits, more than sqlite's signed INTEGER holds.
                    str(report.seed),
                    report.count,
                    report.note,
                )
                for report in reports
            ],
        )
        self.database.commit()
        return timestamp

    def retrieve_all_reports(self) -> list[HistoryEntry]:
        """Retrieves all stored reports, newest run first.

        Returns:
            The stored entries.
        """
        cursor = self.database.cursor()
        cursor.execute("SELECT * FROM verification_history ORDER BY timestamp DESC, id ASC")
        return [
            HistoryEntry(
                timestamp=row[1],
                report=VerificationReport(
                    inequality=INEQUALITIES_BY_LABEL[row[2]],
                    instance=row[3],
                    lhs=row[4],
                    rhs=row[5],
                    sigma=row[6],
                    verdict=Verdict(row[7]),
                    seed=int(row[8]),
                    count=row[9],
                    note=row[10],
                ),
            )
            for row in cursor.fetchall()
        ]

    def delete_run(self, timestamp: int) -> None:
        """Deletes every report stored under a run timestamp.

        Args:
            timestamp: The run to delete.
        """
        self.database.execute(
            "DELETE FROM verification_history WHERE timestamp = ?", (timestamp,)
        )
        self.database.commit()

    def close(self) -> None:
        """Closes the database connection."""
        self.database.close()
