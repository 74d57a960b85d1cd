"""Byte-stable CSV/JSON writers."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence


def fmt(x: float) -> str:
    # 9 significant digits, '.' decimal mark regardless of locale
    return f"{float(x):.9g}"


def csv_text(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    path = Path(path)
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(csv_text(header, rows))
    return path


def write_json(path, payload) -> Path:
    path = Path(path)
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(json.dumps(payload, indent=2) + "\n")
    return path
