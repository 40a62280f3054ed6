"""Report encoder - encode reports, trajectories and check tables to .json, .csv or .parquet formats."""

import dataclasses
import json
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Union

import numpy as np
import sympy as sp

from .circlefield import CircleField
from .diffpoly import DiffPoly


def encode_field(field: CircleField) -> Dict[str, Any]:
    """JSON record {type, bandlimit, modes} with modes as [re, im] pairs."""
    return {
        "type": "field",
        "bandlimit": field.bandlimit,
        "modes": [[float(c.real), float(c.imag)] for c in field.modes],
    }


def to_plain(value: Any) -> Any:
    """Recursively convert numpy, sympy and toolkit objects to JSON-ready Python values."""
    if value is None or isinstance(value, (bool, str, int, float)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, CircleField):
        return encode_field(value)
    if isinstance(value, (DiffPoly, sp.Basic)):
        return str(value)
    if type(value).__name__ == "DataFrame":
        return to_plain(value.to_dict(orient="records"))
    if hasattr(value, "to_dict"):
        return to_plain(value.to_dict())
    if hasattr(value, "to_frame"):
        return to_plain(value.to_frame())
    if dataclasses.is_dataclass(value):
        return to_plain(dataclasses.asdict(value))
    if isinstance(value, Mapping):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [to_plain(v) for v in value]
    return str(value)


class ReportEncoder:
    """Encode toolkit reports to .json, .csv or .parquet formats."""

    def encode_to_file(
        self,
        report: Any,
        filepath: Union[str, Path],
        file_format: Optional[str] = None,
    ) -> None:
        """Encode a report to a file.

        Args:
            report: Dict, dataclass report, DataFrame or list of row dicts
            filepath: Output file path
            file_format: Output format ('json', 'csv', 'parquet'). If None, inferred from filepath extension.
        """
        if file_format is None:
            ext = Path(filepath).suffix.lower()
            format_map = {".json": "json", ".csv": "csv", ".parquet": "parquet"}
            file_format = format_map.get(ext, "json")

        if file_format == "json":
            self.encode_to_json(report, filepath, pretty=True)
        elif file_format in ("csv", "parquet"):
            self.encode_table(self._rows(report), filepath, file_format)
        else:
            raise ValueError(f"Unsupported format: {file_format}")

    def encode_to_json(
        self,
        report: Any,
        filepath: Union[str, Path],
        pretty: bool = True,
    ) -> None:
        """
        Export a report to JSON format.

        Args:
            report: Anything ``to_plain`` understands
            filepath: Path where JSON file will be saved
            pretty: Whether to pretty-print JSON (default True)
        """
        filepath = Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)

        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(
                to_plain(report),
                f,
                indent=2 if pretty else None,
                ensure_ascii=False,
            )

    def encode_to_string(self, report: Any, pretty: bool = True) -> str:
        """JSON text of a report (used for stdout output)."""
        return json.dumps(to_plain(report), indent=2 if pretty else None, ensure_ascii=False)

    def encode_table(
        self,
        rows: Any,
        filepath: Union[str, Path],
        file_format: str = "csv",
    ) -> None:
        """
        Export tabular data to CSV or Parquet.

        Args:
            rows: DataFrame or iterable of flat dicts
            filepath: Output path
            file_format: 'csv' or 'parquet'
        """
        try:
            import pandas as pd
        except ImportError as exc:
            raise ImportError(
                "pandas is required for table export. Install with: pip install pandas"
            ) from exc

        if file_format == "parquet":
            try:
                import pyarrow  # pylint: disable=unused-import # noqa: F401
            except ImportError as exc:
                raise ImportError(
                    "pyarrow is required for Parquet export. Install with: pip install pyarrow"
                ) from exc

        frame = rows.copy() if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows))
        filepath = Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)

        if file_format == "csv":
            frame.to_csv(filepath, index=False)
        elif file_format == "parquet":
            # object columns (expressions, nested values) are stored as text
            for column in frame.columns:
                if frame[column].dtype == object:
                    frame[column] = frame[column].map(
                        lambda v: v if isinstance(v, str) else json.dumps(to_plain(v))
                    )
            frame.to_parquet(filepath, index=False)
        else:
            raise ValueError(f"Unsupported format: {file_format}")

    def encode_to_csv_string(self, report: Any) -> str:
        """CSV text of a report's rows (used for stdout output)."""
        import pandas as pd

        rows = self._rows(report)
        frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows))
        return frame.to_csv(index=False)

    @staticmethod
    def _rows(report: Any) -> Any:
        if type(report).__name__ == "DataFrame":
            return report
        for attribute in ("summary_rows", "to_frame"):
            method = getattr(report, attribute, None)
            if callable(method):
                return method()
        if isinstance(report, Mapping):
            return [{"key": str(k), "value": json.dumps(to_plain(v))} for k, v in report.items()]
        if isinstance(report, Iterable):
            return [to_plain(row) if not isinstance(row, Mapping) else row for row in report]
        raise ValueError(f"Cannot tabulate a {type(report).__name__}")
