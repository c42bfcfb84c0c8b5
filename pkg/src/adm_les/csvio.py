"""CSV helpers with round-trippable float formatting."""

from __future__ import annotations

import csv


def format_float(v) -> str:
    """17 significant digits, '.' decimal; integers are written as-is."""
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return f"{float(v):.17g}"


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([format_float(v) for v in row])


def read_csv(path: str):
    """Header and rows of floats."""
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        try:
            header = next(r)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV") from None
        rows = []
        for i, row in enumerate(r, start=2):
            if not row:
                continue
            try:
                rows.append([float(x) for x in row])
            except ValueError:
                raise ValueError(f"{path}:{i}: non-numeric value in {row}") from None
    return header, rows
