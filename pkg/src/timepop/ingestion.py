"""Rating-file parsing and split persistence."""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable, Sequence, Union

from timepop.model import Interaction, id_key

FIELDS = ("user", "item", "rating", "timestamp")
FORMATS = ("movielens-dat", "delimited")
TRAIN_SUFFIX = ".train.tsv"
TEST_SUFFIX = ".test.tsv"


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class ParseConfig:
    format: str = "delimited"
    delimiter: str = "\t"
    column_order: tuple[str, ...] = FIELDS
    timestamp_unit: str = "seconds"
    has_header: bool = False

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")
        if sorted(self.column_order) != sorted(FIELDS):
            raise ValueError(f"column_order must name each of {FIELDS} once, got {self.column_order}")
        if self.timestamp_unit not in ("seconds", "milliseconds"):
            raise ValueError(f"unknown timestamp unit {self.timestamp_unit!r}")
        if self.format == "delimited" and len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")

    @classmethod
    def movielens(cls) -> "ParseConfig":
        return cls(format="movielens-dat")


TSV = ParseConfig()


def parse_id(token: str):
    """Canonical decimal integers become ``int``; anything else stays a string."""
    if token.isdigit() and str(int(token)) == token:
        return int(token)
    return token


def _parse_timestamp(token: str, unit: str) -> int:
    try:
        t = int(token)
    except ValueError:
        t = float(token)
        if not math.isfinite(t) or t != int(t):
            raise
        t = int(t)
    return t // 1000 if unit == "milliseconds" else t


def iter_lines(source) -> Iterable[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as f:
            yield from iter_lines(f)
        return
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    for raw in source:
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        yield raw.rstrip("\r\n")


def parse_interactions(source: Union[BinaryIO, bytes, str, os.PathLike],
                       config: ParseConfig = TSV) -> list[Interaction]:
    """Read interactions from a byte stream, raw bytes, or a file path.

    Blank lines are ignored; anything else that does not yield four valid
    fields raises :class:`ParseError` naming the 1-based line number.
    """
    sep = "::" if config.format == "movielens-dat" else config.delimiter
    order = FIELDS if config.format == "movielens-dat" else config.column_order
    pos = [order.index(f) for f in FIELDS]
    out = []
    for lineno, line in enumerate(iter_lines(source), start=1):
        if lineno == 1 and config.has_header:
            continue
        if not line.strip():
            continue
        parts = line.split(sep)
        if len(parts) != 4:
            raise ParseError(f"line {lineno}: expected 4 fields, got {len(parts)}: {line!r}")
        try:
            rating = float(parts[pos[2]])
            ts = _parse_timestamp(parts[pos[3]].strip(), config.timestamp_unit)
        except ValueError:
            raise ParseError(f"line {lineno}: malformed rating or timestamp: {line!r}") from None
        if not math.isfinite(rating) or ts < 0:
            raise ParseError(f"line {lineno}: invalid rating or timestamp: {line!r}")
        out.append(Interaction(parse_id(parts[pos[0]].strip()), parse_id(parts[pos[1]].strip()),
                               rating, ts))
    return out


def _format_rating(r: float) -> str:
    return str(int(r)) if r == int(r) else repr(r)


def _canonical(records: Iterable[Interaction]) -> list[Interaction]:
    return sorted(records, key=lambda x: (id_key(x.user), x.timestamp, id_key(x.item)))


def format_tsv(records: Iterable[Interaction]) -> str:
    return "".join(f"{x.user}\t{x.item}\t{_format_rating(x.rating)}\t{x.timestamp}\n"
                   for x in _canonical(records))


def split_paths(destination) -> tuple[Path, Path]:
    d = os.fspath(destination)
    return Path(d + TRAIN_SUFFIX), Path(d + TEST_SUFFIX)


def write_split(train: Sequence[Interaction], test: Sequence[Interaction], destination) -> tuple[Path, Path]:
    """Write ``<destination>.train.tsv`` and ``<destination>.test.tsv``.

    Records are ordered by user, timestamp, then item.
    """
    if not train or not test:
        raise ValueError("train and test must both be non-empty")
    paths = split_paths(destination)
    for path, records in zip(paths, (train, test)):
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(format_tsv(records), encoding="utf-8")
        except OSError as e:
            raise OSError(f"cannot write {path}: {e.strerror}") from e
    return paths


def read_split(destination) -> tuple[list[Interaction], list[Interaction]]:
    train, test = split_paths(destination)
    return parse_interactions(train), parse_interactions(test)
