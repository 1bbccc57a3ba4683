"""Turn a data source into sufficient statistics."""

from __future__ import annotations

import csv
import math

from ..errors import (
    ConfigError,
    IngestError,
    MissingColumnError,
    NonNumericValueError,
    UnmappedCategoryError,
)
from ..models import BernoulliStats, MultinomialStats, NormalStats
from .config import DataSource

COLUMN_TYPES = ("binary", "categorical", "numeric")


def _read_column(path, column, delimiter=None):
    """Yield ``(line number, raw value)`` for one column of a delimited file."""
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise IngestError(f"cannot open {path}: {exc}") from None
    with fh:
        sample = fh.read(8192)
        fh.seek(0)
        if delimiter is None:
            try:
                delimiter = csv.Sniffer().sniff(sample, delimiters=",\t").delimiter
            except csv.Error:
                first = sample.splitlines()[0] if sample else ""
                delimiter = "\t" if "\t" in first else ","
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise IngestError(f"{path} is empty") from None
        if column not in header:
            raise MissingColumnError(f"column {column!r} not found in header {header}", row=1)
        idx = header.index(column)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if idx >= len(row):
                raise MissingColumnError(f"row has no value for column {column!r}", row=lineno)
            yield lineno, row[idx].strip()


def ingest_binary(path, column, success, failure=None, delimiter=None) -> BernoulliStats:
    if success is None:
        raise ConfigError("binary columns need a 'success' label")
    t = n = 0
    seen_other = None
    for lineno, value in _read_column(path, column, delimiter):
        if value == success:
            t += 1
        elif failure is not None:
            if value != failure:
                raise UnmappedCategoryError(f"value {value!r} is neither {success!r} nor {failure!r}", row=lineno)
        elif seen_other is None:
            seen_other = value
        elif value != seen_other:
            raise UnmappedCategoryError(
                f"third level {value!r} in a binary column (levels {success!r}, {seen_other!r})", row=lineno
            )
        n += 1
    if n == 0:
        raise IngestError(f"column {column!r} has no data rows")
    return BernoulliStats(t, n)


def ingest_categorical(path, column, categories=(), delimiter=None) -> MultinomialStats:
    counts: dict[str, int] = {c: 0 for c in categories}
    for lineno, value in _read_column(path, column, delimiter):
        if value not in counts:
            if categories:
                raise UnmappedCategoryError(f"value {value!r} not in categories {list(categories)}", row=lineno)
            counts[value] = 0
        counts[value] += 1
    order = list(categories) if categories else sorted(counts)
    if len(order) < 2:
        raise IngestError(f"categorical column {column!r} needs at least two levels")
    return MultinomialStats(tuple(counts[c] for c in order))


def ingest_numeric(path, column, delimiter=None) -> NormalStats:
    values = []
    for lineno, value in _read_column(path, column, delimiter):
        try:
            x = float(value)
        except ValueError:
            raise NonNumericValueError(f"non-numeric value {value!r}", row=lineno) from None
        if not math.isfinite(x):
            raise NonNumericValueError(f"non-finite value {value!r}", row=lineno)
        values.append(x)
    if not values:
        raise IngestError(f"column {column!r} has no data rows")
    return NormalStats(math.fsum(values) / len(values), len(values))


def ingest(source: DataSource, model: str = None):
    """Sufficient statistics from inline values or a delimited file."""
    if source.stats is not None:
        return source.stats
    if source.path is None or source.column is None:
        raise ConfigError("a data file needs both 'data' and 'column'")
    kind = source.column_type or {"beta": "binary", "dirichlet": "categorical", "normal": "numeric"}.get(model)
    if kind not in COLUMN_TYPES:
        raise ConfigError(f"column_type must be one of {COLUMN_TYPES}")
    if kind == "binary":
        return ingest_binary(source.path, source.column, source.success, source.failure, source.delimiter)
    if kind == "categorical":
        return ingest_categorical(source.path, source.column, source.categories, source.delimiter)
    return ingest_numeric(source.path, source.column, source.delimiter)
