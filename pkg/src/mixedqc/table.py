from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class SweepTable:
    """Rows keyed by a swept parameter, kept sorted and unique in that parameter."""

    parameter: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.columns or self.columns[0] != self.parameter:
            raise ValueError("first column must be the swept parameter")
        self.rows = sorted((tuple(r) for r in self.rows), key=lambda r: r[0])
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row {r} does not match columns {self.columns}")
        keys = [r[0] for r in self.rows]
        if len(set(keys)) != len(keys):
            raise ValueError(f"duplicate values of {self.parameter!r}")

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def as_dicts(self) -> list[dict[str, Any]]:
        return [dict(zip(self.columns, r)) for r in self.rows]
