"""Bundled reference category distributions for large collected corpora.

Two data files ship with the package, one per disaster type, each
holding the category counts observed on three platforms together with
the percentage printed alongside them in the source distribution
tables. They drive fixture tests and give a realistic single-window
input for the index math without any collection or inference.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .core import (
    CATEGORIES,
    DisasterTag,
    ImpactCategory,
    Platform,
    category_from_short_name,
)
from .errors import MalformedCsv


@dataclass(frozen=True)
class ReferenceRow:
    platform: Platform
    category: ImpactCategory
    count: int
    published_pct: int


def load_reference_distribution(disaster: DisasterTag) -> list[ReferenceRow]:
    """Load the bundled distribution for one disaster type.

    Rows come back in file order: each platform lists all 11 categories.
    """
    if disaster is DisasterTag.OTHER:
        raise ValueError("no reference distribution for the generic disaster tag")
    name = f"data/{disaster.value}_category_counts.csv"
    ref = resources.files("disimpact").joinpath(name)
    with resources.as_file(ref) as concrete:
        return _parse(Path(concrete))


def _parse(path: Path) -> list[ReferenceRow]:
    rows: list[ReferenceRow] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["platform", "category", "count", "published_pct"]
        if header is None or [h.strip() for h in header] != expected:
            raise MalformedCsv(f"{path}: expected header {','.join(expected)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 4:
                raise MalformedCsv(f"{path}:{lineno}: expected 4 fields")
            platform = Platform.parse(row[0])
            if platform is Platform.OTHER:
                raise MalformedCsv(f"{path}:{lineno}: unknown platform {row[0]!r}")
            rows.append(
                ReferenceRow(
                    platform=platform,
                    category=category_from_short_name(row[1]),
                    count=int(row[2]),
                    published_pct=int(row[3]),
                )
            )
    return rows


def counts_by_category(
    rows: list[ReferenceRow], platform: Platform
) -> dict[ImpactCategory, int]:
    """One platform's counts as a complete 11-category mapping."""
    out = {
        row.category: row.count for row in rows if row.platform is platform
    }
    missing = [c.short_name for c in CATEGORIES if c not in out]
    if missing:
        raise MalformedCsv(f"platform {platform.value} lacks {', '.join(missing)}")
    return out
