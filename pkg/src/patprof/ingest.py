"""Reading string columns from text and delimited files."""

from __future__ import annotations

import csv
import io
import os
from typing import Optional, Union

from .errors import IngestError


def _read_text(path: str) -> str:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except FileNotFoundError:
        raise IngestError(f"input file not found: {path}") from None
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from None
    try:
        text = raw.decode("utf-8", errors="strict")
    except UnicodeDecodeError as exc:
        line = raw[: exc.start].count(b"\n") + 1
        raise IngestError(f"{path}:{line}: invalid UTF-8 at byte {exc.start}") from None
    if text.startswith("﻿"):
        text = text[1:]
    return text


def read_lines(text: str) -> list:
    """One string per line; empty lines are kept as ε, a final newline is not a line."""
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def read_column(text: str, column: Union[str, int], delimiter: str = ",", source: str = "<input>") -> list:
    """Values of one column of a delimited document with a header row.

    ``column`` is a header name, or a 0-based index (given as int or as a
    string of digits that is not itself a header name).
    """
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=delimiter, strict=True)
    try:
        header = next(reader)
    except StopIteration:
        return []
    except csv.Error as exc:
        raise IngestError(f"{source}:{reader.line_num}: {exc}") from None
    if isinstance(column, str) and column in header:
        idx = header.index(column)
    elif isinstance(column, int) or (isinstance(column, str) and column.isdigit()):
        idx = int(column)
        if idx >= len(header):
            raise IngestError(
                f"{source}: column index {idx} out of range; available columns: {_names(header)}")
    else:
        raise IngestError(f"{source}: no column {column!r}; available columns: {_names(header)}")
    out = []
    try:
        for row in reader:
            if not row:
                continue
            if idx >= len(row):
                raise IngestError(f"{source}:{reader.line_num}: row has {len(row)} fields, "
                                  f"column {idx} missing")
            out.append(row[idx])
    except csv.Error as exc:
        raise IngestError(f"{source}:{reader.line_num}: {exc}") from None
    return out


def _names(header: list) -> str:
    return ", ".join(f"{i}:{h!r}" for i, h in enumerate(header))


def ingest(path: str, column: Optional[Union[str, int]] = None, newline_mode: bool = False) -> list:
    """Load the strings to profile, preserving order and duplicates.

    Without a column selector (or with ``newline_mode``) each line is one
    string.  With a selector the file is read as CSV, or TSV when the file
    name ends in ``.tsv``.
    """
    text = _read_text(os.fspath(path))
    if newline_mode or column is None:
        return read_lines(text)
    delimiter = "\t" if os.fspath(path).lower().endswith(".tsv") else ","
    return read_column(text, column, delimiter, os.fspath(path))
