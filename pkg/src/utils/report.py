"""
Report Document Module

Structured command output: input echo, results, tool version and seed.
Reports serialize to JSON and back without loss, and carry optional
curve rows that can be written as plot-ready CSV.
"""

import json
import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional

import pandas as pd

from src import __version__

logger = logging.getLogger(__name__)


@dataclass
class ReportDocument:
    """Output of one CLI command."""
    command: str
    inputs: Dict[str, Any]
    result: Dict[str, Any]
    status: str = "success"
    version: str = __version__
    seed: Optional[int] = None
    warnings: List[str] = field(default_factory=list)
    curve_columns: List[str] = field(default_factory=list)
    curve: List[List[float]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ReportDocument":
        known = {key: data[key] for key in cls.__dataclass_fields__ if key in data}
        return cls(**known)

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: str) -> "ReportDocument":
        with open(path, 'r') as f:
            return cls.from_json(f.read())

    def curve_frame(self) -> pd.DataFrame:
        """Curve rows as a DataFrame, one column per name in curve_columns."""
        return pd.DataFrame(self.curve, columns=self.curve_columns)

    def write_curve(self, path: str) -> None:
        """Write the curve rows as CSV."""
        if not self.curve_columns:
            raise ValueError(f"'{self.command}' report carries no curve data")
        self.curve_frame().to_csv(path, index=False, float_format="%.17g")
        logger.info(f"Curve data written to {path}")

    def save(self, path: str, indent: Optional[int] = 2) -> None:
        with open(path, 'w') as f:
            f.write(self.to_json(indent))
        logger.info(f"Report written to {path}")
