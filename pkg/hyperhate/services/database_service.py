"""
Service for managing the SQLite database that stores experiment results.
"""

import logging
import os
import sqlite3
from typing import Any, Dict, List, Sequence, Tuple

from hyperhate.database.schema import SCHEMA_SQL, SCHEMA_VERSION
from hyperhate.errors import IncompatibleCheckpointError

logger = logging.getLogger(__name__)

RESULTS_DB = "results.db"


class DatabaseService:
    """
    Service for managing the SQLite result database.
    Handles database initialization, connections, and schema management.
    """

    def __init__(self, db_path: str):
        """
        Initialize the database service.

        Args:
            db_path: Path to the SQLite database file, normally ``<out>/results.db``.
        """
        self.db_path = db_path
        self._ensure_directory_exists()
        self._init_database()

    def _ensure_directory_exists(self) -> None:
        directory = os.path.dirname(self.db_path)
        if directory:
            os.makedirs(directory, exist_ok=True)

    def _init_database(self) -> None:
        """Create the schema if needed and refuse databases from a newer schema."""
        conn = self.get_connection()
        try:
            cursor = conn.cursor()
            cursor.executescript(SCHEMA_SQL)
            cursor.execute("SELECT MAX(version) FROM schema_info")
            found = cursor.fetchone()[0]
            if found is None:
                cursor.execute("INSERT INTO schema_info (version) VALUES (?)", (SCHEMA_VERSION,))
            elif found > SCHEMA_VERSION:
                raise IncompatibleCheckpointError(
                    f"{self.db_path} has schema version {found}, this library reads up to {SCHEMA_VERSION}")
            conn.commit()
            logger.info(f"Result database ready at {self.db_path}")
        except sqlite3.Error as e:
            logger.error(f"Error initializing database: {e}")
            raise
        finally:
            conn.close()

    def get_connection(self) -> sqlite3.Connection:
        """
        Get a connection to the SQLite database.

        Returns:
            sqlite3.Connection with foreign keys enabled and Row results.
        """
        try:
            conn = sqlite3.connect(self.db_path)
            conn.execute("PRAGMA foreign_keys = ON")
            conn.row_factory = sqlite3.Row
            return conn
        except sqlite3.Error as e:
            logger.error(f"Error connecting to database: {e}")
            raise

    def execute_query(self, query: str, params: Sequence[Any] = ()) -> List[Dict[str, Any]]:
        """
        Execute a single statement on its own connection.

        Args:
            query: SQL query to execute.
            params: Parameters for the query.

        Returns:
            Rows as dictionaries for SELECT statements, otherwise an empty list.
        """
        conn = self.get_connection()
        try:
            cursor = conn.execute(query, params)
            if query.lstrip().upper().startswith("SELECT"):
                return [dict(row) for row in cursor.fetchall()]
            conn.commit()
            return []
        except sqlite3.Error as e:
            conn.rollback()
            logger.error(f"Error executing query: {e}")
            raise
        finally:
            conn.close()

    def execute_transaction(self, head: Tuple[str, Sequence[Any]],
                            rows: List[Tuple[str, Sequence[Any]]]) -> int:
        """
        Insert a parent row and its children atomically.

        Each child statement takes the parent id as its first parameter.

        Args:
            head: (query, params) inserting the parent row.
            rows: (query, params) tuples for the dependent rows.

        Returns:
            The id of the parent row.
        """
        conn = self.get_connection()
        try:
            cursor = conn.cursor()
            cursor.execute(*head)
            parent_id = cursor.lastrowid
            for query, params in rows:
                cursor.execute(query, (parent_id, *params))
            conn.commit()
            return parent_id
        except sqlite3.Error as e:
            conn.rollback()
            logger.error(f"Error executing transaction: {e}")
            raise
        finally:
            conn.close()

    def get_schema_version(self) -> int:
        rows = self.execute_query("SELECT MAX(version) AS version FROM schema_info")
        return rows[0]["version"] if rows and rows[0]["version"] is not None else 0
