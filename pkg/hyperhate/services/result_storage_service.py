"""
Service for storing and retrieving experiment results from the SQLite database.
"""

import json
import logging
from typing import Any, Dict, List, Optional, Sequence

from hyperhate.models.report import RESULT_FIELDS, ExperimentRow, ExperimentSpec
from hyperhate.services.database_service import DatabaseService

logger = logging.getLogger(__name__)

_INSERT_ROW = (
    f"INSERT INTO results (experiment_id, {', '.join(RESULT_FIELDS)}) "
    f"VALUES (?, {', '.join('?' for _ in RESULT_FIELDS)})"
)


class ResultStorageService:
    """
    Service for storing and retrieving experiment rows.

    Rows of one experiment are written in a single transaction so a failed
    run never leaves a partial grid behind.
    """

    def __init__(self, database_service: DatabaseService):
        """
        Initialize the result storage service.

        Args:
            database_service: DatabaseService bound to the run's result database.
        """
        self.db = database_service

    def save_experiment(self, spec: ExperimentSpec, rows: Sequence[ExperimentRow]) -> int:
        """
        Save an experiment and all of its rows.

        Args:
            spec: The experiment specification.
            rows: Grid cell results.

        Returns:
            The ID of the saved experiment.
        """
        head = ("INSERT INTO experiments (source, target, spec) VALUES (?, ?, ?)",
                (spec.source, spec.target, json.dumps(spec.to_dict(), sort_keys=True)))
        statements = [(_INSERT_ROW, tuple(row.to_dict()[name] for name in RESULT_FIELDS))
                      for row in sorted(rows, key=lambda r: r.sort_key)]
        experiment_id = self.db.execute_transaction(head, statements)
        logger.info(f"Stored experiment {experiment_id} ({spec.source}->{spec.target}) "
                    f"with {len(statements)} rows")
        return experiment_id

    def get_rows(self, experiment_id: int) -> List[ExperimentRow]:
        """
        Get the rows of one experiment, ordered by model, pair, n and seed.
        """
        query = f"""
            SELECT {', '.join(RESULT_FIELDS)}
            FROM results
            WHERE experiment_id = ?
            ORDER BY model, source, target, n, seed
        """
        return [ExperimentRow.from_dict(r) for r in self.db.execute_query(query, (experiment_id,))]

    def get_spec(self, experiment_id: int) -> Optional[ExperimentSpec]:
        result = self.db.execute_query("SELECT spec FROM experiments WHERE id = ?", (experiment_id,))
        if not result:
            return None
        data = json.loads(result[0]["spec"])
        return ExperimentSpec(
            source=data["source"],
            target=data["target"],
            grid=tuple(data.get("grid", (0,))),
            model_kinds=tuple(data.get("model_kinds", ())),
            seeds=tuple(data.get("seeds", (0,))),
        )

    def list_experiments(self, source: Optional[str] = None,
                         target: Optional[str] = None) -> List[Dict[str, Any]]:
        """
        List experiments with optional filtering by dataset pair.
        """
        query_parts = ["SELECT id, source, target, created_at FROM experiments"]
        where_clauses, params = [], []
        if source:
            where_clauses.append("source = ?")
            params.append(source)
        if target:
            where_clauses.append("target = ?")
            params.append(target)
        if where_clauses:
            query_parts.append("WHERE " + " AND ".join(where_clauses))
        query_parts.append("ORDER BY id")
        return self.db.execute_query(" ".join(query_parts), tuple(params))

    def delete_experiment(self, experiment_id: int) -> bool:
        """
        Delete an experiment and its rows.

        Returns:
            True if successful, False otherwise.
        """
        try:
            self.db.execute_query("DELETE FROM experiments WHERE id = ?", (experiment_id,))
            return True
        except Exception as e:
            logger.error(f"Error deleting experiment {experiment_id}: {e}")
            return False
