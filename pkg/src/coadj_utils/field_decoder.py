"""Field decoder - decode circle fields, coadjoint elements and KM fields from .json or .csv files."""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, TextIO, Union

import numpy as np

from .circlefield import CircleField, field_from_samples
from .errors import ParseError
from .valgebra import KMField, VirCoadjoint

Decoded = Union[CircleField, VirCoadjoint, KMField]


class FieldDecoder:
    """Decode field records from .json or .csv files."""

    def __init__(self, bandlimit: Optional[int] = None):
        """
        Args:
            bandlimit: Bandlimit used when fitting raw samples; defaults to the
                largest the sample count resolves
        """
        self.bandlimit = bandlimit

    def decode_file(self, filepath: Union[str, Path]) -> Decoded:
        """Decode a field file, dispatching on the extension.

        Args:
            filepath: Path to a .json record or a .csv sample column

        Returns:
            CircleField, VirCoadjoint or KMField depending on the record
        """
        path = Path(filepath)
        ext = path.suffix.lower()
        if ext == ".json":
            with open(path, "r", encoding="utf-8") as f:
                return self.decode_json(f)
        if ext == ".csv":
            return self.decode_samples(path)
        raise ParseError(f"Unsupported field file extension: {ext!r}")

    def decode_json(self, json_input: Union[str, Path, TextIO]) -> Decoded:
        """Decode a JSON record.

        Args:
            json_input: JSON file path, JSON string, or file object
        """
        try:
            if isinstance(json_input, str) and json_input.lstrip()[:1] in ("{", "["):
                record = json.loads(json_input)
            elif isinstance(json_input, (str, Path)):
                with open(json_input, "r", encoding="utf-8") as f:
                    record = json.load(f)
            else:
                record = json.load(json_input)
        except json.JSONDecodeError as exc:
            raise ParseError(f"Invalid JSON field record: {exc}") from exc
        return self.decode_record(record)

    def decode_record(self, record: Any) -> Decoded:
        """Decode an already-parsed record, inferring its type from its keys if needed."""
        if isinstance(record, list):
            return self.decode_samples(record)
        if not isinstance(record, dict):
            raise ParseError(f"Field record must be an object or a list, got {type(record).__name__}")
        kind = record.get("type") or self._infer_type(record)
        if kind == "field":
            return self._decode_field(record)
        if kind == "coadjoint":
            return VirCoadjoint(self._decode_field(record["u"]), float(record.get("charge", 1.0)))
        if kind == "km":
            components = record.get("components")
            if not components:
                raise ParseError("KM record has no components")
            return KMField(
                tuple(self._decode_field(c) for c in components),
                record.get("structure", "so3"),
                float(record.get("charge", 1.0)),
            )
        raise ParseError(f"Unknown field record type: {kind!r}")

    def decode_samples(self, source: Union[str, Path, Iterable[float]]) -> CircleField:
        """Fit a CircleField to equispaced samples on [0, 2π).

        Args:
            source: Path to a CSV with one numeric column (header optional), or
                an iterable of numbers
        """
        if isinstance(source, (str, Path)):
            values = self._read_csv_column(Path(source))
        else:
            values = np.asarray(list(source), dtype=float)
        if values.size < 3:
            raise ParseError(f"need at least 3 samples, got {values.size}")
        bandlimit = self.bandlimit
        if bandlimit is not None:
            bandlimit = min(bandlimit, (values.size - 1) // 2)
        return field_from_samples(values, bandlimit)

    @staticmethod
    def _infer_type(record: Dict[str, Any]) -> str:
        if "components" in record:
            return "km"
        if "u" in record:
            return "coadjoint"
        if "modes" in record or "samples" in record:
            return "field"
        raise ParseError(f"Cannot infer the record type from keys {sorted(record)}")

    def _decode_field(self, record: Any) -> CircleField:
        if isinstance(record, list):
            return self.decode_samples(record)
        if "samples" in record:
            return self.decode_samples(record["samples"])
        modes = record.get("modes")
        if modes is None:
            raise ParseError("field record needs 'modes' or 'samples'")
        coefficients: List[complex] = []
        for mode in modes:
            if isinstance(mode, (list, tuple)):
                if len(mode) != 2:
                    raise ParseError(f"mode must be [re, im], got {mode!r}")
                coefficients.append(complex(float(mode[0]), float(mode[1])))
            else:
                coefficients.append(complex(float(mode)))
        declared = record.get("bandlimit")
        if declared is not None and declared != len(coefficients) - 1:
            raise ParseError(
                f"bandlimit {declared} does not match {len(coefficients)} modes"
            )
        return CircleField(coefficients)

    @staticmethod
    def _read_csv_column(path: Path) -> np.ndarray:
        try:
            import pandas as pd
        except ImportError as exc:
            raise ImportError(
                "pandas is required for CSV input. Install with: pip install pandas"
            ) from exc

        frame = pd.read_csv(path, header=None)
        column = pd.to_numeric(frame.iloc[:, 0], errors="coerce").dropna()
        return column.to_numpy(dtype=float)
