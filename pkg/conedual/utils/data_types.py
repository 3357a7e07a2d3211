"""
Data Types Module.

This module provides the serialization helpers for run reports.

Classes:
    - Timestamp: A UTC wall-clock instant in the format YYYY-MM-DDTHH:MM:SSZ.
    - ReportEncoder: JSON encoder for numpy values, timestamps and report objects.

Functions:
    - dumps_report: Deterministic JSON text of a report.
    - format_float: Shortest round-tripping text of a float for CSV tables.

Usage:
    from conedual.utils.data_types import dumps_report
    text = dumps_report({"gap": numpy.float64(0.0)})
"""

import json
from datetime import datetime, timezone
from typing import Any, Optional

import numpy as np


class Timestamp:
    """
    Timestamp Class.

    This class represents a UTC instant in the format YYYY-MM-DDTHH:MM:SSZ.

    Attributes:
        - moment (datetime): The instant, timezone-aware.

    Usage:
        stamp = Timestamp.now()
        print(stamp)  # Output: 2024-01-01T12:00:00Z
    """

    FORMAT = "%Y-%m-%dT%H:%M:%SZ"

    def __init__(self, stamp: Optional[str] = None):
        """
        Creates a Timestamp, parsing stamp when given.

        :param stamp: Instant in the format YYYY-MM-DDTHH:MM:SSZ or None for now.
        """
        self.moment = self._validate(stamp) if stamp else datetime.now(timezone.utc)

    @classmethod
    def now(cls) -> "Timestamp":
        return cls()

    @classmethod
    def _validate(cls, stamp: str) -> datetime:
        try:
            return datetime.strptime(stamp, cls.FORMAT).replace(tzinfo=timezone.utc)
        except ValueError as exc:
            raise ValueError(
                f"Timestamp must be in format YYYY-MM-DDTHH:MM:SSZ, got: {stamp}"
            ) from exc

    def __str__(self) -> str:
        return self.moment.strftime(self.FORMAT)

    def to_json(self) -> str:
        return str(self)


class ReportEncoder(json.JSONEncoder):
    """
    Report Encoder Class.

    This class is a custom JSON encoder for report payloads.

    Methods:
        - default: Encodes numpy scalars and arrays, Timestamp objects and any
          object exposing as_dict().

    Usage:
        json_string = json.dumps(report, cls=ReportEncoder)
    """

    def default(self, o: Any) -> Any:
        if isinstance(o, Timestamp):
            return o.to_json()
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if hasattr(o, "as_dict"):
            return o.as_dict()
        return super().default(o)


def dumps_report(payload: Any) -> str:
    """Returns deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(payload, cls=ReportEncoder, sort_keys=True, indent=2) + "\n"


def format_float(value: Optional[float]) -> str:
    """Returns repr(value) for floats so the CSV carries the same bits as the JSON."""
    if value is None:
        return ""
    return repr(float(value))
