"""
Benchmark Data File Module

Parses comma-separated (p, throughput) rows into throughput samples.
"""

import io
import logging
import math
from typing import List, Union
from pathlib import Path

import pandas as pd

from src.tools.errors import DataFileError
from src.tools.fitting import ThroughputSample

logger = logging.getLogger(__name__)

HEADER = ("p", "throughput")


class DataFileParser:
    """Parser for benchmark CSV files with an optional "p,throughput" header."""

    @staticmethod
    def parse_text(text: str) -> List[ThroughputSample]:
        """
        Parse CSV text into samples.

        Blank lines are ignored. Repeated p values are averaged with a notice.

        Raises:
            DataFileError: with the offending line number
        """
        try:
            frame = pd.read_csv(
                io.StringIO(text), header=None, dtype=str,
                skip_blank_lines=False, skipinitialspace=True,
            )
        except pd.errors.EmptyDataError:
            raise DataFileError("file contains no data")
        except pd.errors.ParserError as e:
            raise DataFileError(f"malformed row: {e}")

        if frame.shape[1] != 2:
            raise DataFileError(f"expected 2 columns (p, throughput), found {frame.shape[1]}", line=1)

        # row i of the frame is line i + 1 of the file
        frame.index = frame.index + 1
        frame = frame.dropna(how="all")
        if frame.empty:
            raise DataFileError("file contains no data")

        first_line = frame.index[0]
        first = tuple(str(value).strip().lower() for value in frame.loc[first_line])
        if first == HEADER:
            frame = frame.drop(index=first_line)

        by_p = {}
        for line, (raw_p, raw_x) in frame.iterrows():
            p = pd.to_numeric(raw_p, errors="coerce")
            x = pd.to_numeric(raw_x, errors="coerce")
            if pd.isna(p) or pd.isna(x) or not math.isfinite(p) or not math.isfinite(x):
                raise DataFileError(f"non-numeric row ({raw_p!r}, {raw_x!r})", line=line)
            if p != int(p) or p < 1:
                raise DataFileError(f"p must be an integer >= 1, got {raw_p}", line=line)
            if x <= 0:
                raise DataFileError(f"throughput must be positive, got {raw_x}", line=line)
            by_p.setdefault(int(p), []).append(float(x))

        if not by_p:
            raise DataFileError("file contains a header but no samples")

        samples = []
        for p in sorted(by_p):
            values = by_p[p]
            if len(values) > 1:
                logger.warning(f"Averaging {len(values)} rows for p={p}")
            samples.append(ThroughputSample(p=p, x=sum(values) / len(values)))
        return samples

    @staticmethod
    def parse_file(path: Union[str, Path]) -> List[ThroughputSample]:
        """
        Parse a CSV file into samples.

        Raises:
            FileNotFoundError: If the file doesn't exist
            DataFileError: If a row cannot be parsed
        """
        with open(path, 'r') as f:
            return DataFileParser.parse_text(f.read())
