"""
Data Emitter
Writes result rows as CSV (with a commented metadata header) or JSON, byte-stable for a fixed config
"""

import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from app import __version__
from app.models import RunConfig


def _plain(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


class DataEmitter:
    """Service for emitting the rows of one command run"""

    def __init__(self, config: RunConfig, command: str):
        self.config = config
        self.command = command

    def metadata(self, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        data = {"command": self.command, "version": __version__}
        data.update(self.config.echo())
        data.update(extra or {})
        return _plain(data)

    def render(self, rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None,
               extra: Optional[Dict[str, Any]] = None) -> str:
        """
        Render rows in the configured format

        Args:
            rows: One dict per output row
            columns: Column order; defaults to the keys of the first row
            extra: Additional metadata entries (check results, counts)

        Returns:
            str: The complete document
        """
        meta = self.metadata(extra)
        if self.config.format == "json":
            return json.dumps({"metadata": meta, "rows": [_plain(row) for row in rows]}, indent=2, default=str) + "\n"

        buffer = io.StringIO()
        for key in sorted(meta):
            value = meta[key]
            text = json.dumps(value, default=str) if isinstance(value, (dict, list)) else value
            buffer.write(f"# {key}: {text}\n")
        columns = columns or (list(rows[0].keys()) if rows else [])
        writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(_plain(row))
        return buffer.getvalue()

    def emit(self, rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None,
             extra: Optional[Dict[str, Any]] = None) -> str:
        """Render and write to --out (or stdout); returns the rendered text"""
        text = self.render(rows, columns, extra)
        if self.config.out:
            path = Path(self.config.out)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
            print(f"[Emitter] SUCCESS: wrote {len(rows)} rows to {path}", file=sys.stderr)
        else:
            sys.stdout.write(text)
        return text
