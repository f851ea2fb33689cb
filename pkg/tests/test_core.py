"""Taxonomy invariants: the 11-category bijection and domain partition."""

from datetime import date, datetime, timezone

import pytest

from disimpact.core import (
    CATEGORIES,
    OTHER,
    PHYSICAL_CATEGORIES,
    SOCIAL_CATEGORIES,
    Domain,
    ImpactCategory,
    IndexConfig,
    Platform,
    Post,
    TimeWindow,
    category_from_code,
    category_from_short_name,
    domain_of,
)
from disimpact.errors import OutOfRange

from conftest import make_post


def test_exactly_eleven_categories():
    assert len(CATEGORIES) == 11
    assert [c.code for c in CATEGORIES] == list(range(1, 12))


def test_code_partition():
    assert [c.domain for c in CATEGORIES[:5]] == [Domain.PHYSICAL] * 5
    assert [c.domain for c in CATEGORIES[5:10]] == [Domain.SOCIAL] * 5
    assert CATEGORIES[10].domain is Domain.NONE
    assert set(PHYSICAL_CATEGORIES) | set(SOCIAL_CATEGORIES) | {OTHER} == set(
        CATEGORIES
    )
    assert not set(PHYSICAL_CATEGORIES) & set(SOCIAL_CATEGORIES)


def test_short_names_fixed():
    assert [c.short_name for c in CATEGORIES] == [
        "CINJ", "EVAC", "INFR", "ENVD", "RSRC",
        "PUBH", "EMOT", "BIAS", "ASST", "SECO", "OTHER",
    ]


def test_category_from_code_examples():
    infr = category_from_code(3)
    assert infr.short_name == "INFR"
    assert infr.domain is Domain.PHYSICAL
    other = category_from_code(11)
    assert other.short_name == "OTHER"
    assert other.domain is Domain.NONE
    with pytest.raises(OutOfRange):
        category_from_code(12)
    with pytest.raises(OutOfRange):
        category_from_code(0)
    with pytest.raises(OutOfRange):
        category_from_code(True)


def test_round_trip_all_codes():
    for cat in CATEGORIES:
        assert category_from_code(cat.code) is cat
        assert category_from_short_name(cat.short_name) is cat
        assert category_from_short_name(cat.short_name.lower()) is cat


def test_domain_of_examples():
    assert domain_of(category_from_short_name("ENVD")) is Domain.PHYSICAL
    assert domain_of(category_from_short_name("ASST")) is Domain.SOCIAL
    assert domain_of(OTHER) is Domain.NONE


def test_platform_parse_open_enum():
    assert Platform.parse("Reddit") is Platform.REDDIT
    assert Platform.parse("TIKTOK") is Platform.TIKTOK
    assert Platform.parse("mastodon") is Platform.OTHER


def test_post_validation():
    with pytest.raises(ValueError):
        Post(id="", platform=Platform.REDDIT, text="x",
             created_at=datetime(2024, 9, 2, tzinfo=timezone.utc))
    with pytest.raises(ValueError):
        Post(id="p", platform=Platform.REDDIT, text="x",
             created_at=datetime(2024, 9, 2))  # naive timestamp

    post = make_post(day=date(2024, 9, 2), hour=23)
    assert post.created_date == date(2024, 9, 2)


def test_time_window_validation():
    window = TimeWindow(index=0, start=date(2024, 9, 2))
    assert window.end == date(2024, 9, 9)
    with pytest.raises(ValueError):
        TimeWindow(index=-1, start=date(2024, 9, 2))
    with pytest.raises(ValueError):
        TimeWindow(index=0, start=date(2024, 9, 2), length_days=0)


def test_index_config_validation():
    config = IndexConfig()
    assert config.alpha == 0.5
    assert config.category_count == 11
    assert config.window_days == 7
    assert config.window_anchor is None
    with pytest.raises(ValueError):
        IndexConfig(alpha=0.0)
    with pytest.raises(ValueError):
        IndexConfig(category_count=1)
    with pytest.raises(ValueError):
        IndexConfig(window_days=0)


def test_categories_immutable():
    with pytest.raises(Exception):
        CATEGORIES[0].code = 99  # type: ignore[misc]
    assert isinstance(CATEGORIES[0], ImpactCategory)
