"""Small shared reader for the package's CSV data files.

All carriers are UTF-8 CSV with a fixed header; lines starting with ``#``
and blank lines are ignored. Error messages refer to line numbers in the
original file, comments included.
"""

from __future__ import annotations

import csv
import io
import os
from typing import IO, Iterator, Union

from .errors import CsvFormatError

Source = Union[str, bytes, os.PathLike, IO]


def read_text(source: Source) -> str:
    """Return the text content of a path, text/byte string, or open file."""
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, os.PathLike):
        with open(source, "r", encoding="utf-8") as fh:
            return fh.read()
    if isinstance(source, str):
        # A path if it points at an existing file and looks like one;
        # multi-line content is always treated as literal CSV text.
        if "\n" not in source and os.path.exists(source):
            with open(source, "r", encoding="utf-8") as fh:
                return fh.read()
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def iter_rows(source: Source, header: tuple[str, ...]) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(line_number, fields)`` for each data row after the header.

    Raises CsvFormatError when the header is missing or wrong, or a row has
    the wrong number of fields.
    """
    text = read_text(source)
    expected = list(header)
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in next(csv.reader(io.StringIO(raw)))]
        if not seen_header:
            if fields != expected:
                raise CsvFormatError(
                    f"expected header {','.join(expected)!r}, got {','.join(fields)!r}",
                    line=lineno,
                )
            seen_header = True
            continue
        if len(fields) != len(expected):
            raise CsvFormatError(
                f"expected {len(expected)} fields, got {len(fields)}", line=lineno
            )
        yield lineno, fields
    if not seen_header:
        raise CsvFormatError(f"missing header {','.join(expected)!r}")


def parse_float(value: str, lineno: int, what: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise CsvFormatError(f"{what} is not a number: {value!r}", line=lineno) from None
