"""State-level geolocation and monthly impact aggregation.

Location inference is deliberately transparent: a bundled gazetteer of
state names, postal abbreviations, and large unambiguous cities, matched
longest-first with earliest-position tie-break. Metadata is consulted
before text, and a post whose metadata resolves never falls through to
text matching. Two-letter codes that collide with everyday words ("IN",
"OR", "HI", ...) only count when uppercase and preceded by a
capitalized token plus comma or space, the "Springfield, OR" shape, and
city names that are ordinary nouns in lowercase ("mesa", "buffalo")
only count as written. The bundled city list is curated for precision:
names shared by multiple sizable places, famous non-U.S. namesakes, and
phrase-like names are left out, since a missed city degrades to the
state name while a false hit silently corrupts the map.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .core import AnnotatedPost, Domain, IndexConfig, Post
from .errors import MalformedCsv
from .impact import compute_impact_series
from .windowing import build_count_series, full_range, resolve_config

# Codes that read as ordinary words or titles when uppercased; these
# need the capitalized-token context rule to count as a state.
AMBIGUOUS_ABBREVS = frozenset(
    {
        "AL", "CO", "DE", "HI", "ID", "IN", "LA", "MA", "MD", "ME",
        "MO", "MS", "MT", "NE", "OH", "OK", "OR", "PA",
    }
)

# City names that are ordinary nouns in lowercase; these match only as
# written (capitalized), unlike other place names.
WORD_COLLISION_CITIES = frozenset(
    {
        "Phoenix", "Mesa", "Garland", "Buffalo", "Billings", "Anchorage",
        "Savannah", "Boulder", "Providence", "Davenport",
    }
)

VALID_KINDS = ("state", "abbrev", "city")

STATE_CODES = frozenset(
    {
        "AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "FL", "GA",
        "HI", "ID", "IL", "IN", "IA", "KS", "KY", "LA", "ME", "MD",
        "MA", "MI", "MN", "MS", "MO", "MT", "NE", "NV", "NH", "NJ",
        "NM", "NY", "NC", "ND", "OH", "OK", "OR", "PA", "RI", "SC",
        "SD", "TN", "TX", "UT", "VT", "VA", "WA", "WV", "WI", "WY",
    }
)


class LocationSource(Enum):
    METADATA = "metadata"
    TEXT = "text"
    NONE = "none"


class SourceFilter(Enum):
    METADATA = "metadata"
    TEXT = "text"
    BOTH = "both"


@dataclass(frozen=True)
class GazetteerEntry:
    name: str
    state_code: str
    kind: str


@dataclass(frozen=True)
class _CompiledEntry:
    entry: GazetteerEntry
    pattern: re.Pattern
    group: int


class Gazetteer:
    """Compiled place index; resolution depends only on the entry list."""

    def __init__(self, entries: Sequence[GazetteerEntry]):
        if not entries:
            raise MalformedCsv("gazetteer has no entries")
        self.entries = tuple(entries)
        self._compiled = [self._compile(e) for e in self.entries]

    @staticmethod
    def _compile(entry: GazetteerEntry) -> _CompiledEntry:
        escaped = re.escape(entry.name)
        if entry.kind == "abbrev":
            if entry.name in AMBIGUOUS_ABBREVS:
                pattern = re.compile(
                    r"[A-Z][A-Za-z]*(?:,\s*|\s+)(" + escaped + r")(?![A-Za-z])"
                )
                return _CompiledEntry(entry=entry, pattern=pattern, group=1)
            pattern = re.compile(r"(?<![A-Za-z])(" + escaped + r")(?![A-Za-z])")
            return _CompiledEntry(entry=entry, pattern=pattern, group=1)
        flags = 0 if entry.name in WORD_COLLISION_CITIES else re.IGNORECASE
        pattern = re.compile(
            r"(?<![A-Za-z])(" + escaped + r")(?![A-Za-z])", flags
        )
        return _CompiledEntry(entry=entry, pattern=pattern, group=1)

    def best_match(self, text: str) -> str | None:
        """State code of the longest, earliest gazetteer hit, if any."""
        if not text:
            return None
        candidates: list[tuple[int, int, str, str]] = []
        for compiled in self._compiled:
            match = compiled.pattern.search(text)
            if match is not None:
                candidates.append(
                    (
                        -len(compiled.entry.name),
                        match.start(compiled.group),
                        compiled.entry.state_code,
                        compiled.entry.kind,
                    )
                )
        if not candidates:
            return None
        candidates.sort()
        return candidates[0][2]


def load_gazetteer(path: str | Path | None = None) -> Gazetteer:
    """Load the place index; default is the bundled data file."""
    if path is None:
        ref = resources.files("disimpact").joinpath("data/gazetteer.csv")
        with resources.as_file(ref) as concrete:
            return load_gazetteer(concrete)
    path = Path(path)
    entries: list[GazetteerEntry] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["name", "state_code", "kind"]:
            raise MalformedCsv(f"{path}: expected header name,state_code,kind")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise MalformedCsv(f"{path}:{lineno}: expected 3 fields")
            name, code, kind = (cell.strip() for cell in row)
            if kind not in VALID_KINDS:
                raise MalformedCsv(f"{path}:{lineno}: unknown kind {kind!r}")
            if code not in STATE_CODES:
                raise MalformedCsv(f"{path}:{lineno}: unknown state code {code!r}")
            if not name:
                raise MalformedCsv(f"{path}:{lineno}: empty name")
            entries.append(GazetteerEntry(name=name, state_code=code, kind=kind))
    return Gazetteer(entries)


def resolve_location(
    post: Post, gazetteer: Gazetteer
) -> tuple[str | None, LocationSource]:
    """Metadata-first, then text; (None, NONE) when nothing matches."""
    if post.location_metadata:
        state = gazetteer.best_match(post.location_metadata)
        if state is not None:
            return state, LocationSource.METADATA
    state = gazetteer.best_match(post.text)
    if state is not None:
        return state, LocationSource.TEXT
    return None, LocationSource.NONE


@dataclass(frozen=True)
class LocatedPost:
    annotated: AnnotatedPost
    state: str | None
    source: LocationSource

    def __post_init__(self) -> None:
        if (self.state is None) != (self.source is LocationSource.NONE):
            raise ValueError("state and source must be absent together")


def locate_posts(
    annotated: Iterable[AnnotatedPost], gazetteer: Gazetteer
) -> list[LocatedPost]:
    out = []
    for item in annotated:
        state, source = resolve_location(item.post, gazetteer)
        out.append(LocatedPost(annotated=item, state=state, source=source))
    return out


@dataclass(frozen=True)
class StateMonthIndex:
    state: str
    month: date
    physical: float
    social: float
    post_count: int

    def __post_init__(self) -> None:
        if self.month.day != 1:
            raise ValueError("month must be a first-of-month date")
        if self.post_count < 1:
            raise ValueError("emitted cells need at least one post")
        if self.physical < 0 or self.social < 0:
            raise ValueError("composites must be nonnegative")


@dataclass
class SpatialReport:
    unlocated: int = 0
    filtered_out: int = 0
    irrelevant_skipped: int = 0
    suppressed_cells: list[tuple[str, date, int]] = field(default_factory=list)


def _passes(located: LocatedPost, source_filter: SourceFilter) -> bool:
    if located.source is LocationSource.NONE:
        return False
    if source_filter is SourceFilter.BOTH:
        return True
    return located.source.value == source_filter.value


def aggregate_state_month(
    located: Sequence[LocatedPost],
    config: IndexConfig,
    source_filter: SourceFilter = SourceFilter.BOTH,
    min_posts: int = 1,
) -> tuple[list[StateMonthIndex], SpatialReport]:
    """Monthly mean weekly domain composites per state.

    Each state group runs the full weekly index pipeline over its own
    post range; a month's value is the mean composite of the windows
    whose start date falls inside it, and its post count is the number
    of that state's posts landing in those windows. Cells under
    min_posts are suppressed into the report.
    """
    report = SpatialReport()
    groups: dict[str, list[AnnotatedPost]] = {}
    for item in located:
        if item.source is LocationSource.NONE:
            report.unlocated += 1
            continue
        if not _passes(item, source_filter):
            report.filtered_out += 1
            continue
        if not item.annotated.relevant:
            report.irrelevant_skipped += 1
            continue
        groups.setdefault(item.state, []).append(item.annotated)  # type: ignore[arg-type]
    rows: list[StateMonthIndex] = []
    for state in sorted(groups):
        members = groups[state]
        resolved = resolve_config(config, members)
        start, end = full_range(members, resolved)
        counts, _ = build_count_series(members, resolved, start, end)
        series = compute_impact_series(counts, resolved)
        monthly: dict[date, tuple[list[float], list[float], int]] = {}
        for idx, window in enumerate(series.windows):
            month = window.start.replace(day=1)
            phys, soc, n_posts = monthly.setdefault(month, ([], [], 0))
            phys.append(series.domains[Domain.PHYSICAL][idx])
            soc.append(series.domains[Domain.SOCIAL][idx])
            monthly[month] = (phys, soc, n_posts + counts.windows[idx].total)
        for month in sorted(monthly):
            phys, soc, n_posts = monthly[month]
            if n_posts < max(min_posts, 1):
                report.suppressed_cells.append((state, month, n_posts))
                continue
            rows.append(
                StateMonthIndex(
                    state=state,
                    month=month,
                    physical=sum(phys) / len(phys),
                    social=sum(soc) / len(soc),
                    post_count=n_posts,
                )
            )
    return rows, report


def write_spatial_csv(
    rows: Sequence[StateMonthIndex],
    source_filter: SourceFilter,
    path: str | Path,
) -> None:
    """Write state,month,source,physical,social,post_count rows."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["state", "month", "source", "physical", "social", "post_count"])
        for row in rows:
            writer.writerow(
                [
                    row.state,
                    row.month.strftime("%Y-%m"),
                    source_filter.value,
                    "%.9f" % row.physical,
                    "%.9f" % row.social,
                    row.post_count,
                ]
            )
