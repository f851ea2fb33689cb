"""Dataset loading: JSONL posts, label CSVs, weekly ground-truth CSVs.

Loading is deterministic (input order preserved, keep-first dedupe) and
privacy-scrubbing happens here, before any other module sees the text.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable

from .core import AnnotatedPost, DisasterTag, Platform, Post, category_from_code
from .errors import (
    MalformedCsv,
    MalformedInput,
    NegativeValue,
    OutOfRange,
    UnknownPostId,
)

# A handle is "@" plus a maximal run of word characters (dot included, so
# email local parts are over-scrubbed on purpose: privacy-safe direction).
HANDLE_RE = re.compile(r"@[A-Za-z0-9_.]+")

SCRUB_REPLACEMENT = "@user"


def scrub_handles(text: str) -> str:
    """Replace every @-handle token with "@user"; all other text is kept.

    Idempotent: "@user" itself matches the handle pattern and maps to
    itself.
    """
    return HANDLE_RE.sub(SCRUB_REPLACEMENT, text)


@dataclass(frozen=True)
class Dataset:
    posts: tuple[Post, ...]
    source_path: str
    disaster_tag: DisasterTag = DisasterTag.OTHER

    def __len__(self) -> int:
        return len(self.posts)

    def by_id(self) -> dict[str, Post]:
        return {p.id: p for p in self.posts}


@dataclass
class LoadReport:
    lines_read: int = 0
    kept: int = 0
    dropped_duplicate: int = 0
    dropped_malformed: int = 0
    malformed: list[tuple[int, str]] = field(default_factory=list)


@dataclass(frozen=True)
class LoadResult:
    dataset: Dataset
    report: LoadReport


def _parse_rfc3339(value: str) -> datetime:
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        raise ValueError(f"timestamp {value!r} has no UTC offset")
    return ts.astimezone(timezone.utc)


def _parse_post_line(line: str) -> Post:
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    for key in ("id", "platform", "text", "created_at"):
        if key not in obj:
            raise ValueError(f"missing required field {key!r}")
    post_id = obj["id"]
    if not isinstance(post_id, str) or not post_id:
        raise ValueError("id must be a nonempty string")
    text = obj["text"]
    if not isinstance(text, str):
        raise ValueError("text must be a string")
    media = obj.get("media_refs") or []
    if not isinstance(media, list) or any(not isinstance(m, str) for m in media):
        raise ValueError("media_refs must be a list of strings")
    location = obj.get("location_metadata")
    if location is not None and not isinstance(location, str):
        raise ValueError("location_metadata must be a string or null")
    return Post(
        id=post_id,
        platform=Platform.parse(str(obj["platform"])),
        text=scrub_handles(text),
        created_at=_parse_rfc3339(str(obj["created_at"])),
        media_refs=tuple(media),
        location_metadata=location,
    )


def load_posts(
    path: str | Path,
    disaster_tag: DisasterTag = DisasterTag.OTHER,
) -> LoadResult:
    """Load a posts.jsonl file.

    Malformed lines are collected per line and skipped; the load aborts
    (MalformedInput) only if more than half of the non-blank lines are
    malformed. Duplicate ids keep the first occurrence.
    """
    path = Path(path)
    report = LoadReport()
    posts: list[Post] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            report.lines_read += 1
            try:
                post = _parse_post_line(line)
            except (ValueError, json.JSONDecodeError) as exc:
                report.dropped_malformed += 1
                report.malformed.append((lineno, str(exc)))
                continue
            if post.id in seen:
                report.dropped_duplicate += 1
                continue
            seen.add(post.id)
            posts.append(post)
            report.kept += 1
    if report.lines_read and report.dropped_malformed * 2 > report.lines_read:
        raise MalformedInput(
            f"{report.dropped_malformed} of {report.lines_read} lines are "
            f"malformed in {path}"
        )
    dataset = Dataset(posts=tuple(posts), source_path=str(path), disaster_tag=disaster_tag)
    return LoadResult(dataset=dataset, report=report)


def write_posts_jsonl(posts: Iterable[Post], path: str | Path) -> None:
    """Write posts one JSON object per line, round-trippable by load_posts."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for post in posts:
            record = {
                "id": post.id,
                "platform": post.platform.value,
                "text": post.text,
                "created_at": post.created_at.isoformat(),
                "media_refs": list(post.media_refs),
                "location_metadata": post.location_metadata,
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


@dataclass(frozen=True)
class GroundTruthSeries:
    """Weekly external signal, gap-free on a strict 7-day grid."""

    entries: tuple[tuple[date, float], ...]

    def __post_init__(self) -> None:
        weeks = [w for w, _ in self.entries]
        for prev, cur in zip(weeks, weeks[1:]):
            if (cur - prev).days != 7:
                raise ValueError("ground-truth weeks must advance in 7-day steps")

    @property
    def weeks(self) -> tuple[date, ...]:
        return tuple(w for w, _ in self.entries)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.entries)


@dataclass(frozen=True)
class GroundTruthReport:
    filled_weeks: tuple[date, ...]


def load_ground_truth(path: str | Path) -> tuple[GroundTruthSeries, GroundTruthReport]:
    """Load a groundtruth.csv (header week_start,value).

    Rows are sorted by week; interior gaps must be whole weeks and are
    zero-filled, with the filled weeks listed in the report.
    """
    path = Path(path)
    rows: list[tuple[date, float]] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["week_start", "value"]:
            raise MalformedCsv(f"{path}: expected header week_start,value")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise MalformedCsv(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                week = date.fromisoformat(row[0].strip())
                value = float(row[1])
            except ValueError as exc:
                raise MalformedCsv(f"{path}:{lineno}: {exc}") from exc
            if value != value or value in (float("inf"), float("-inf")):
                raise MalformedCsv(f"{path}:{lineno}: value must be finite")
            if value < 0:
                raise NegativeValue(f"{path}:{lineno}: value {value} is negative")
            rows.append((week, value))
    if not rows:
        return GroundTruthSeries(entries=()), GroundTruthReport(filled_weeks=())
    rows.sort(key=lambda r: r[0])
    first = rows[0][0]
    by_week: dict[date, float] = {}
    for week, value in rows:
        if (week - first).days % 7 != 0:
            raise MalformedCsv(f"{path}: week {week} is off the 7-day grid of {first}")
        if week in by_week:
            raise MalformedCsv(f"{path}: duplicate week {week}")
        by_week[week] = value
    last = rows[-1][0]
    entries: list[tuple[date, float]] = []
    filled: list[date] = []
    week = first
    while week <= last:
        if week in by_week:
            entries.append((week, by_week[week]))
        else:
            entries.append((week, 0.0))
            filled.append(week)
        week += timedelta(days=7)
    return (
        GroundTruthSeries(entries=tuple(entries)),
        GroundTruthReport(filled_weeks=tuple(filled)),
    )


@dataclass(frozen=True)
class LabelReport:
    unlabeled_ids: tuple[str, ...]


def load_labels(
    path: str | Path, dataset: Dataset
) -> tuple[list[AnnotatedPost], LabelReport]:
    """Join a labels.csv (header post_id,category_code) onto a dataset.

    Output order follows the dataset, so repeated runs are deterministic.
    Posts without a label are reported, never silently dropped.
    """
    path = Path(path)
    by_id = dataset.by_id()
    labels: dict[str, int] = {}
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["post_id", "category_code"]:
            raise MalformedCsv(f"{path}: expected header post_id,category_code")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise MalformedCsv(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            post_id = row[0].strip()
            if post_id not in by_id:
                raise UnknownPostId(f"{path}:{lineno}: unknown post id {post_id!r}")
            if post_id in labels:
                raise MalformedCsv(f"{path}:{lineno}: duplicate label for {post_id!r}")
            try:
                code = int(row[1])
                category_from_code(code)
            except (ValueError, OutOfRange) as exc:
                raise MalformedCsv(f"{path}:{lineno}: {exc}") from exc
            labels[post_id] = code
    annotated = [
        AnnotatedPost(post=post, category=category_from_code(labels[post.id]))
        for post in dataset.posts
        if post.id in labels
    ]
    unlabeled = tuple(p.id for p in dataset.posts if p.id not in labels)
    return annotated, LabelReport(unlabeled_ids=unlabeled)


def write_labels_csv(annotated: Iterable[AnnotatedPost], path: str | Path) -> None:
    """Write relevant posts' labels; the inverse of load_labels."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["post_id", "category_code"])
        for item in annotated:
            if item.relevant:
                writer.writerow([item.post.id, item.category.code])
