"""
Parameter accounting records.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass(frozen=True)
class ParamCount:
    """Learnable element count of one named layer, with the published figure if any."""
    name: str
    count: int
    published: Optional[int] = None
    generated: bool = False

    def to_dict(self) -> Dict[str, Any]:
        result = {"name": self.name, "count": self.count, "generated": self.generated}
        if self.published is not None:
            result["published"] = self.published
        return result


@dataclass
class ParamReport:
    """
    Per-layer parameter counts of a model.

    Rows flagged ``generated`` describe conv weights produced by an
    auxiliary network; they are reported for shape but excluded from the
    learnable total.
    """
    model: str
    rows: List[ParamCount] = field(default_factory=list)
    published_total: Optional[int] = None

    @property
    def total(self) -> int:
        return sum(row.count for row in self.rows if not row.generated)

    def count(self, name: str) -> int:
        for row in self.rows:
            if row.name == name:
                return row.count
        raise KeyError(name)

    def extend(self, rows: List[ParamCount]) -> None:
        self.rows.extend(rows)

    @property
    def deviation(self) -> Optional[float]:
        """Relative deviation of our total from the published total."""
        if not self.published_total:
            return None
        return (self.total - self.published_total) / self.published_total

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "rows": [row.to_dict() for row in self.rows],
            "total": self.total,
            "published_total": self.published_total,
        }
