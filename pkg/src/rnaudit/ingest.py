"""Load recommendation dumps from disk and validate them.

Dump format (version 1):

* Nodes file: UTF-8 JSON Lines, one object per line with fields
  ``id`` (string), ``title`` (string), ``genres`` (array of strings).
* Edges file: UTF-8 CSV with header ``src,dst,rank``, LF or CRLF.

Snowball crawls are truncated at their frontier, so edges pointing at
items missing from the nodes file are dropped and counted instead of
failing the load. Self-loops and duplicate (src, dst) pairs are likewise
normalized away with their counts recorded in the validation report.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MalformedLineError, MalformedRowError, NonPositiveRankError
from .graph import ItemRecord, RecEdge, RecommendationNetwork, build_network

#: How many offending line numbers to keep per drop reason.
MAX_OFFENDING_LINES = 10

DROP_REASONS = ("missing_genre", "self_loop", "duplicate_edge", "unknown_endpoint")


@dataclass(frozen=True)
class DatasetManifest:
    """Where a dataset lives on disk, plus a label for reports."""

    nodes_path: str | Path
    edges_path: str | Path
    name: str = "dataset"

    def check(self) -> None:
        for p in (self.nodes_path, self.edges_path):
            if not Path(p).is_file():
                raise FileNotFoundError(f"dataset file not found: {p}")


@dataclass
class ValidationReport:
    """Counts of parsed/accepted/dropped records for one dataset load."""

    name: str = "dataset"
    nodes_parsed: int = 0
    nodes_accepted: int = 0
    node_blank_lines: int = 0
    edges_parsed: int = 0
    edges_accepted: int = 0
    edge_blank_lines: int = 0
    dropped: dict[str, int] = field(
        default_factory=lambda: {reason: 0 for reason in DROP_REASONS}
    )
    offending_lines: dict[str, list[int]] = field(
        default_factory=lambda: {reason: [] for reason in DROP_REASONS}
    )

    def record_drop(self, reason: str, line: int) -> None:
        self.dropped[reason] += 1
        lines = self.offending_lines[reason]
        if len(lines) < MAX_OFFENDING_LINES:
            lines.append(line)

    def total_dropped(self) -> int:
        return sum(self.dropped.values())

    def to_text(self) -> str:
        out = [f"[validation] {self.name}"]
        out.append(
            f"nodes: parsed={self.nodes_parsed} accepted={self.nodes_accepted} "
            f"blank_lines={self.node_blank_lines}"
        )
        out.append(
            f"edges: parsed={self.edges_parsed} accepted={self.edges_accepted} "
            f"blank_lines={self.edge_blank_lines}"
        )
        for reason in DROP_REASONS:
            count = self.dropped[reason]
            lines = self.offending_lines[reason]
            where = ""
            if lines:
                shown = ",".join(str(n) for n in lines)
                suffix = "..." if count > len(lines) else ""
                where = f" (lines {shown}{suffix})"
            out.append(f"dropped_{reason}={count}{where}")
        return "\n".join(out)


def _normalize_genres(raw: list) -> frozenset[str]:
    return frozenset(g.strip().casefold() for g in raw if g.strip())


def parse_nodes(
    path: str | Path, report: ValidationReport | None = None
) -> list[ItemRecord]:
    """Parse a JSONL nodes file into item records, input order preserved.

    Records whose genre list is empty after normalization are dropped
    (counted in `report` when given); genre labels are case-folded and
    whitespace-trimmed so spelling variants of one label unify.

    Raises MalformedLineError for lines that are not valid records.
    """
    if report is None:
        report = ValidationReport()
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                report.node_blank_lines += 1
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLineError(f"invalid JSON ({exc.msg})", line_no) from None
            if not isinstance(obj, dict):
                raise MalformedLineError("record is not an object", line_no)
            item_id = obj.get("id")
            title = obj.get("title")
            genres = obj.get("genres")
            if not isinstance(item_id, str) or not item_id:
                raise MalformedLineError("missing or empty 'id'", line_no)
            if not isinstance(title, str):
                raise MalformedLineError("missing 'title'", line_no)
            if not isinstance(genres, list) or not all(
                isinstance(g, str) for g in genres
            ):
                raise MalformedLineError("'genres' must be an array of strings", line_no)
            report.nodes_parsed += 1
            genre_set = _normalize_genres(genres)
            if not genre_set:
                report.record_drop("missing_genre", line_no)
                continue
            report.nodes_accepted += 1
            records.append(ItemRecord(item_id, title, genre_set))
    return records


def _parse_edge_rows(
    path: str | Path, report: ValidationReport
) -> list[tuple[int, RecEdge]]:
    rows: list[tuple[int, RecEdge]] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = None
        for row in reader:
            if not row or all(not f.strip() for f in row):
                if header is None:
                    raise MalformedRowError("missing 'src,dst,rank' header", 1)
                report.edge_blank_lines += 1
                continue
            if header is None:
                header = [f.strip().casefold() for f in row]
                if header != ["src", "dst", "rank"]:
                    raise MalformedRowError(
                        f"expected header 'src,dst,rank', got {','.join(row)!r}", 1
                    )
                continue
            line_no = reader.line_num
            if len(row) != 3:
                raise MalformedRowError(f"expected 3 fields, got {len(row)}", line_no)
            src, dst, rank_text = (f.strip() for f in row)
            if not src or not dst:
                raise MalformedRowError("empty src or dst", line_no)
            try:
                rank = int(rank_text)
            except ValueError:
                raise MalformedRowError(f"rank {rank_text!r} is not an integer", line_no) from None
            if rank < 1:
                raise NonPositiveRankError(f"rank must be >= 1, got {rank}", line_no)
            report.edges_parsed += 1
            rows.append((line_no, RecEdge(src, dst, rank)))
        if header is None:
            raise MalformedRowError("missing 'src,dst,rank' header", 1)
    return rows


def parse_edges(
    path: str | Path, report: ValidationReport | None = None
) -> list[RecEdge]:
    """Parse a CSV edges file into raw edges (weights unset).

    Raises MalformedRowError / NonPositiveRankError on rows that cannot
    represent a recommendation slot.
    """
    if report is None:
        report = ValidationReport()
    return [edge for _, edge in _parse_edge_rows(path, report)]


def load_dataset(
    manifest: DatasetManifest,
) -> tuple[RecommendationNetwork, ValidationReport]:
    """Parse, filter, and build a network from a dataset manifest.

    Recoverable defects (missing genres, self-loops, duplicate edges,
    frontier-truncated endpoints) are dropped and tallied in the report;
    structurally broken files raise. Loading is pure: the same files
    always produce the same network and report.
    """
    manifest.check()
    report = ValidationReport(name=manifest.name)
    records = parse_nodes(manifest.nodes_path, report)
    known = {rec.id for rec in records}

    kept: dict[tuple[str, str], tuple[int, RecEdge]] = {}
    for line_no, edge in _parse_edge_rows(manifest.edges_path, report):
        if edge.src == edge.dst:
            report.record_drop("self_loop", line_no)
            continue
        if edge.src not in known or edge.dst not in known:
            report.record_drop("unknown_endpoint", line_no)
            continue
        key = (edge.src, edge.dst)
        prior = kept.get(key)
        if prior is None:
            kept[key] = (line_no, edge)
        elif edge.rank < prior[1].rank:
            report.record_drop("duplicate_edge", prior[0])
            kept[key] = (line_no, edge)
        else:
            report.record_drop("duplicate_edge", line_no)
    report.edges_accepted = len(kept)

    network = build_network(records, [edge for _, edge in kept.values()])
    return network, report
