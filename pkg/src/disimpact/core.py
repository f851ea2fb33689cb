"""Core value types: the impact-category taxonomy and shared records.

Everything here is an immutable value, safe to share between threads.
The eleven-category taxonomy (five physical, five social, plus Other)
and its 1-11 code numbering are fixed; every other module keys off it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import date, datetime, timezone

from .errors import OutOfRange


class Domain(enum.Enum):
    PHYSICAL = "physical"
    SOCIAL = "social"
    NONE = "none"


class Platform(enum.Enum):
    """Source platform of a post. OTHER absorbs anything unrecognized."""

    REDDIT = "reddit"
    TIKTOK = "tiktok"
    YOUTUBE = "youtube"
    OTHER = "other"

    @classmethod
    def parse(cls, value: str) -> "Platform":
        try:
            return cls(value.strip().lower())
        except ValueError:
            return cls.OTHER


class DisasterTag(enum.Enum):
    HURRICANE = "hurricane"
    WILDFIRE = "wildfire"
    OTHER = "other"


@dataclass(frozen=True)
class ImpactCategory:
    """One of the eleven impact categories.

    Codes 1-5 are physical, 6-10 social, 11 is the Other bucket that
    belongs to neither domain.
    """

    code: int
    short_name: str
    title: str
    domain: Domain

    def __str__(self) -> str:
        return self.short_name


CINJ = ImpactCategory(1, "CINJ", "Casualties & Injuries", Domain.PHYSICAL)
EVAC = ImpactCategory(2, "EVAC", "Evacuations & Displacement", Domain.PHYSICAL)
INFR = ImpactCategory(3, "INFR", "Infrastructure & Utility Damage", Domain.PHYSICAL)
ENVD = ImpactCategory(4, "ENVD", "Environmental Damage", Domain.PHYSICAL)
RSRC = ImpactCategory(5, "RSRC", "Resource Shortages", Domain.PHYSICAL)
PUBH = ImpactCategory(6, "PUBH", "Public Health", Domain.SOCIAL)
EMOT = ImpactCategory(7, "EMOT", "Emotional & Psychological Distress", Domain.SOCIAL)
BIAS = ImpactCategory(8, "BIAS", "Bias Narratives", Domain.SOCIAL)
ASST = ImpactCategory(9, "ASST", "Assistance & Recovery", Domain.SOCIAL)
SECO = ImpactCategory(10, "SECO", "Socioeconomic Disruption", Domain.SOCIAL)
OTHER = ImpactCategory(11, "OTHER", "Other / Not Relevant", Domain.NONE)

CATEGORIES: tuple[ImpactCategory, ...] = (
    CINJ, EVAC, INFR, ENVD, RSRC, PUBH, EMOT, BIAS, ASST, SECO, OTHER,
)

PHYSICAL_CATEGORIES: tuple[ImpactCategory, ...] = CATEGORIES[0:5]
SOCIAL_CATEGORIES: tuple[ImpactCategory, ...] = CATEGORIES[5:10]

_BY_CODE = {c.code: c for c in CATEGORIES}
_BY_SHORT_NAME = {c.short_name: c for c in CATEGORIES}


def category_from_code(code: int) -> ImpactCategory:
    """Return the category for an integer code 1-11.

    Raises OutOfRange for anything else (including non-integers).
    """
    if not isinstance(code, int) or isinstance(code, bool):
        raise OutOfRange(f"category code must be an integer, got {code!r}")
    cat = _BY_CODE.get(code)
    if cat is None:
        raise OutOfRange(f"category code must be in 1..11, got {code}")
    return cat


def category_from_short_name(name: str) -> ImpactCategory:
    cat = _BY_SHORT_NAME.get(name.strip().upper())
    if cat is None:
        raise OutOfRange(f"unknown category short name {name!r}")
    return cat


def domain_of(category: ImpactCategory) -> Domain:
    return category.domain


@dataclass(frozen=True)
class Post:
    """One social-media post, platform-agnostic.

    `text` is the pre-joined textual content (title + description);
    `media_refs` carries opaque URIs that are never fetched here.
    """

    id: str
    platform: Platform
    text: str
    created_at: datetime
    media_refs: tuple[str, ...] = ()
    location_metadata: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("post id must be a nonempty string")
        if self.created_at.tzinfo is None:
            raise ValueError("created_at must be timezone-aware (UTC)")

    @property
    def created_date(self) -> date:
        return self.created_at.astimezone(timezone.utc).date()


@dataclass(frozen=True)
class AnnotatedPost:
    """A post plus its single impact-category label and relevance flag.

    Irrelevant posts carry category OTHER by convention; their category
    never feeds counting because the pipeline filters on `relevant`.
    """

    post: Post
    category: ImpactCategory
    relevant: bool = True


@dataclass(frozen=True)
class TimeWindow:
    """One fixed-length window on the analysis grid."""

    index: int
    start: date
    length_days: int = 7

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("window index must be >= 0")
        if self.length_days < 1:
            raise ValueError("window length must be >= 1 day")

    @property
    def end(self) -> date:
        """Exclusive end date."""
        from datetime import timedelta

        return self.start + timedelta(days=self.length_days)


@dataclass(frozen=True)
class IndexConfig:
    """Knobs for the impact-index stage.

    alpha is the additive-smoothing pseudo-count; category_count is the
    number of categories sharing the smoothing mass (11 keeps OTHER in).
    window_anchor = None means "derive the Monday on or before the
    earliest relevant post".
    """

    alpha: float = 0.5
    category_count: int = 11
    window_days: int = 7
    window_anchor: date | None = None

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.category_count < 2:
            raise ValueError("category_count must be >= 2")
        if self.window_days < 1:
            raise ValueError("window_days must be >= 1")
