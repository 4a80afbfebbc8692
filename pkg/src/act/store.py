"""Append-only persistence and the operator filter query.

Records are length-prefixed, CRC-checked frames of canonical JSON in
rolling segment files. A single writer appends and flushes before
acknowledging; loading replays every segment, tolerates exactly one torn
trailing record (a crash artifact), and refuses silently corrupt data.

The same module owns :class:`FilterQuery` and the event match predicate
used by the event list, the word cloud, and the API.
"""

from __future__ import annotations

import binascii
import json
import logging
import os
import struct
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import TYPE_CHECKING, Iterable

from act.annotate import Category

if TYPE_CHECKING:
    from act.cluster import Event

logger = logging.getLogger(__name__)

SEGMENT_MAX_BYTES = 64 * 1024 * 1024
DEFAULT_LIMIT = 100
MAX_LIMIT = 1000

RECORD_KINDS = ("post", "event_upsert")

_HEADER = struct.Struct(">II")  # payload length, CRC32 of payload


class QueryValidationError(ValueError):
    """A filter query field failed validation; carries the field name."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


@dataclass(frozen=True)
class FilterQuery:
    """The operator's current selection over events."""

    bbox: tuple[float, float, float, float] | None = None
    categories: frozenset[Category] | None = None
    keyword: str | None = None
    since: datetime | None = None
    until: datetime | None = None
    geotagged: bool | None = None
    limit: int = DEFAULT_LIMIT

    def __post_init__(self) -> None:
        if self.bbox is not None:
            min_lon, min_lat, max_lon, max_lat = self.bbox
            if min_lon > max_lon:
                raise QueryValidationError("bbox", "min_lon exceeds max_lon")
            if min_lat > max_lat:
                raise QueryValidationError("bbox", "min_lat exceeds max_lat")
        if self.keyword is not None:
            if not self.keyword:
                raise QueryValidationError("keyword", "must be non-empty when given")
            object.__setattr__(self, "keyword", self.keyword.lower())
        if self.since is not None and self.until is not None and self.since > self.until:
            raise QueryValidationError("since", "since exceeds until")
        if not (1 <= self.limit <= MAX_LIMIT):
            raise QueryValidationError("limit", f"must be in [1, {MAX_LIMIT}]")
        if self.categories is not None:
            object.__setattr__(self, "categories", frozenset(self.categories))


def event_matches(event: "Event", q: FilterQuery) -> bool:
    """Does one event satisfy the selection?

    The bounding box applies only while the geotagged toggle is not
    explicitly false; with ``geotagged=false`` filtering falls back to
    time, keyword and category alone.
    """
    if q.geotagged is not None and q.geotagged != (event.location is not None):
        return False
    if q.bbox is not None and q.geotagged is not False:
        if event.location is None:
            return False
        min_lon, min_lat, max_lon, max_lat = q.bbox
        if not (min_lon <= event.location.lon <= max_lon and min_lat <= event.location.lat <= max_lat):
            return False
    if q.categories is not None and event.category not in q.categories:
        return False
    if q.keyword is not None and q.keyword not in event.term_counts:
        return False
    if q.since is not None and event.last_seen < q.since:
        return False
    if q.until is not None and event.first_seen > q.until:
        return False
    return True


def query_events(q: FilterQuery, events: Iterable["Event"]) -> list["Event"]:
    """Matching events, most recently active first, truncated to the limit."""
    matching = [e for e in events if event_matches(e, q)]
    matching.sort(key=lambda e: (-e.last_seen.timestamp(), e.id))
    return matching[: q.limit]


# --- append-only segment log ----------------------------------------------


class StoreCorruptionError(Exception):
    """A segment failed its checksum or structural checks mid-stream."""


class StoreWriteError(Exception):
    """An append could not be made durable; carries the last durable seq."""

    def __init__(self, message: str, last_durable_seq: int):
        super().__init__(f"{message} (last durable seq {last_durable_seq})")
        self.last_durable_seq = last_durable_seq


@dataclass(frozen=True)
class StoreRecord:
    """One durable record: a post or a whole-event upsert."""

    kind: str
    payload: dict
    seq: int

    def __post_init__(self) -> None:
        if self.kind not in RECORD_KINDS:
            raise ValueError(f"unknown record kind {self.kind!r}")


def canonical_json(obj: object) -> bytes:
    """Stable, compact JSON bytes: sorted keys, no whitespace, UTF-8."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def _segments_dir(root: str | Path) -> Path:
    return Path(root) / "segments"


def _segment_path(root: str | Path, index: int) -> Path:
    return _segments_dir(root) / f"{index:06d}.log"


def _encode(record: StoreRecord) -> bytes:
    payload = canonical_json({"kind": record.kind, "payload": record.payload, "seq": record.seq})
    return _HEADER.pack(len(payload), binascii.crc32(payload) & 0xFFFFFFFF) + payload


@dataclass
class LoadResult:
    records: list[StoreRecord]
    warnings: list[str]
    last_seq: int
    last_segment: int


def _read_segment(
    path: Path,
    is_last_segment: bool,
    repair: bool,
    warnings: list[str],
) -> list[StoreRecord]:
    records: list[StoreRecord] = []
    data = path.read_bytes()
    offset = 0
    while offset < len(data):
        header = data[offset : offset + _HEADER.size]
        if len(header) < _HEADER.size:
            _handle_torn(path, offset, is_last_segment, repair, warnings)
            break
        length, crc = _HEADER.unpack(header)
        payload = data[offset + _HEADER.size : offset + _HEADER.size + length]
        if len(payload) < length:
            _handle_torn(path, offset, is_last_segment, repair, warnings)
            break
        if binascii.crc32(payload) & 0xFFFFFFFF != crc:
            raise StoreCorruptionError(f"checksum mismatch in {path} at byte {offset}")
        try:
            obj = json.loads(payload.decode("utf-8"))
            record = StoreRecord(kind=obj["kind"], payload=obj["payload"], seq=int(obj["seq"]))
        except (ValueError, KeyError, TypeError) as exc:
            raise StoreCorruptionError(f"undecodable record in {path} at byte {offset}: {exc}") from exc
        records.append(record)
        offset += _HEADER.size + length
    return records


def _handle_torn(
    path: Path, offset: int, is_last_segment: bool, repair: bool, warnings: list[str]
) -> None:
    if not is_last_segment:
        raise StoreCorruptionError(f"torn record inside non-final segment {path} at byte {offset}")
    message = f"truncated torn trailing record in {path} at byte {offset}"
    warnings.append(message)
    logger.warning("%s", message)
    if repair:
        with path.open("r+b") as handle:
            handle.truncate(offset)


def load_records(root: str | Path, repair: bool = False) -> LoadResult:
    """Replay all segments in order; returns records plus torn-tail warnings.

    Only the final segment may end in a torn record; checksum mismatches
    and short reads anywhere else raise :class:`StoreCorruptionError`.
    With ``repair`` the torn tail is physically truncated so appends can
    resume.
    """
    seg_dir = _segments_dir(root)
    if not seg_dir.is_dir():
        return LoadResult(records=[], warnings=[], last_seq=0, last_segment=0)
    paths = sorted(seg_dir.glob("*.log"))
    records: list[StoreRecord] = []
    warnings: list[str] = []
    last_seq = 0
    for i, path in enumerate(paths):
        segment_records = _read_segment(path, i == len(paths) - 1, repair, warnings)
        for record in segment_records:
            if record.seq <= last_seq:
                raise StoreCorruptionError(
                    f"non-monotone seq {record.seq} after {last_seq} in {path}"
                )
            last_seq = record.seq
            records.append(record)
    last_segment = int(paths[-1].stem) if paths else 0
    return LoadResult(records=records, warnings=warnings, last_seq=last_seq, last_segment=last_segment)


class LogWriter:
    """Single-writer append log with rolling segments.

    Every append is flushed (and fsynced unless disabled) before its seq
    is returned, so an acknowledged record survives a crash.
    """

    def __init__(
        self,
        root: str | Path,
        segment_max_bytes: int = SEGMENT_MAX_BYTES,
        fsync: bool = True,
    ):
        self.root = Path(root)
        self.segment_max_bytes = segment_max_bytes
        self.fsync = fsync
        _segments_dir(self.root).mkdir(parents=True, exist_ok=True)
        state = load_records(self.root, repair=True)
        self._seq = state.last_seq
        self._segment_index = max(state.last_segment, 1)
        path = _segment_path(self.root, self._segment_index)
        self._handle = path.open("ab")
        self._size = path.stat().st_size

    @property
    def last_seq(self) -> int:
        return self._seq

    def append(self, kind: str, payload: dict) -> int:
        """Durably append one record and return its sequence number."""
        record = StoreRecord(kind=kind, payload=payload, seq=self._seq + 1)
        frame = _encode(record)
        try:
            if self._size > 0 and self._size + len(frame) > self.segment_max_bytes:
                self._roll()
            self._handle.write(frame)
            self._handle.flush()
            if self.fsync:
                os.fsync(self._handle.fileno())
        except (OSError, ValueError) as exc:
            raise StoreWriteError(f"append failed: {exc}", self._seq) from exc
        self._size += len(frame)
        self._seq = record.seq
        return record.seq

    def _roll(self) -> None:
        self._handle.close()
        self._segment_index += 1
        path = _segment_path(self.root, self._segment_index)
        self._handle = path.open("ab")
        self._size = 0

    def close(self) -> None:
        if not self._handle.closed:
            self._handle.flush()
            self._handle.close()

    def __enter__(self) -> "LogWriter":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
