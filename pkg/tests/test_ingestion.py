"""Post/label/ground-truth loading and the privacy scrub rule."""

import json
from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disimpact.core import Platform
from disimpact.errors import (
    MalformedCsv,
    MalformedInput,
    NegativeValue,
    UnknownPostId,
)
from disimpact.ingestion import (
    load_ground_truth,
    load_labels,
    load_posts,
    scrub_handles,
    write_labels_csv,
    write_posts_jsonl,
)

from conftest import make_annotated, make_post


def _line(post_id="p1", **overrides):
    record = {
        "id": post_id,
        "platform": "reddit",
        "text": "hello world",
        "created_at": "2024-09-02T10:00:00Z",
    }
    record.update(overrides)
    return json.dumps(record)


def write_jsonl(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TestLoadPosts:
    def test_three_valid_lines(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        write_jsonl(path, [_line("a"), _line("b"), _line("c")])
        result = load_posts(path)
        assert len(result.dataset) == 3
        assert [p.id for p in result.dataset.posts] == ["a", "b", "c"]
        assert result.report.kept == 3

    def test_duplicate_ids_keep_first(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        write_jsonl(path, [_line("abc", text="first"), _line("abc", text="second")])
        result = load_posts(path)
        assert len(result.dataset) == 1
        assert result.dataset.posts[0].text == "first"
        assert result.report.dropped_duplicate == 1

    def test_malformed_line_isolated(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        write_jsonl(path, [_line("a"), "{not json"])
        result = load_posts(path)
        assert len(result.dataset) == 1
        assert result.report.dropped_malformed == 1

    def test_majority_malformed_aborts(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        write_jsonl(path, [_line("a"), "{bad", "{worse"])
        with pytest.raises(MalformedInput):
            load_posts(path)

    def test_text_scrubbed_on_load(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        write_jsonl(path, [_line("a", text="thanks @john_doe for help")])
        result = load_posts(path)
        assert result.dataset.posts[0].text == "thanks @user for help"

    def test_z_suffix_and_offset_timestamps(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        write_jsonl(
            path,
            [
                _line("a", created_at="2024-09-02T10:00:00Z"),
                _line("b", created_at="2024-09-02T10:00:00+00:00"),
            ],
        )
        result = load_posts(path)
        a, b = result.dataset.posts
        assert a.created_at == b.created_at

    def test_unknown_platform_becomes_other(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        write_jsonl(path, [_line("a", platform="mastodon")])
        result = load_posts(path)
        assert result.dataset.posts[0].platform is Platform.OTHER

    def test_round_trip_through_writer(self, tmp_path):
        first = tmp_path / "a.jsonl"
        second = tmp_path / "b.jsonl"
        write_jsonl(
            first,
            [
                _line("a", media_refs=["https://img.example/a.jpg"],
                      location_metadata="Tampa, FL"),
                _line("b"),
            ],
        )
        loaded = load_posts(first)
        write_posts_jsonl(loaded.dataset.posts, second)
        again = load_posts(second)
        assert again.dataset.posts == loaded.dataset.posts
        write_posts_jsonl(again.dataset.posts, first)
        assert first.read_bytes() == second.read_bytes()


class TestScrubHandles:
    def test_basic_handle(self):
        assert scrub_handles("thanks @john_doe for help") == "thanks @user for help"

    def test_email_local_part_over_scrubbed(self):
        assert scrub_handles("email me at a@b.com") == "email me at a@user"

    def test_identity(self):
        assert scrub_handles("no handles here") == "no handles here"

    def test_dotted_and_numeric_handles(self):
        assert scrub_handles("@maria.r and @x9_y") == "@user and @user"

    def test_bare_at_untouched(self):
        assert scrub_handles("meet @ noon") == "meet @ noon"

    @given(st.text(max_size=200))
    @settings(max_examples=200, deadline=None)
    def test_idempotent(self, text):
        once = scrub_handles(text)
        assert scrub_handles(once) == once

    @given(st.text(max_size=200))
    @settings(max_examples=200, deadline=None)
    def test_no_residual_handles(self, text):
        import re

        scrubbed = scrub_handles(text)
        assert set(re.findall(r"@[A-Za-z0-9_.]+", scrubbed)) <= {"@user"}


class TestGroundTruth:
    def test_direct_parse(self, tmp_path):
        path = tmp_path / "gt.csv"
        path.write_text("week_start,value\n2024-09-02,5.0\n2024-09-09,7.5\n")
        series, report = load_ground_truth(path)
        assert series.weeks == (date(2024, 9, 2), date(2024, 9, 9))
        assert series.values == (5.0, 7.5)
        assert report.filled_weeks == ()

    def test_gap_zero_filled(self, tmp_path):
        path = tmp_path / "gt.csv"
        path.write_text("week_start,value\n2024-09-02,5.0\n2024-09-16,1.0\n")
        series, report = load_ground_truth(path)
        assert len(series.entries) == 3
        assert series.entries[1] == (date(2024, 9, 9), 0.0)
        assert report.filled_weeks == (date(2024, 9, 9),)

    def test_negative_rejected(self, tmp_path):
        path = tmp_path / "gt.csv"
        path.write_text("week_start,value\n2024-09-02,-1.0\n")
        with pytest.raises(NegativeValue):
            load_ground_truth(path)

    def test_off_grid_rejected(self, tmp_path):
        path = tmp_path / "gt.csv"
        path.write_text("week_start,value\n2024-09-02,1.0\n2024-09-10,2.0\n")
        with pytest.raises(MalformedCsv):
            load_ground_truth(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "gt.csv"
        path.write_text("week,value\n2024-09-02,1.0\n")
        with pytest.raises(MalformedCsv):
            load_ground_truth(path)


class TestLoadLabels:
    def _dataset(self, tmp_path, ids=("p1", "p2")):
        path = tmp_path / "posts.jsonl"
        write_jsonl(path, [_line(i) for i in ids])
        return load_posts(path).dataset

    def test_join(self, tmp_path):
        dataset = self._dataset(tmp_path)
        labels = tmp_path / "labels.csv"
        labels.write_text("post_id,category_code\np1,3\n")
        annotated, report = load_labels(labels, dataset)
        assert len(annotated) == 1
        assert annotated[0].category.short_name == "INFR"
        assert report.unlabeled_ids == ("p2",)

    def test_unknown_post_id(self, tmp_path):
        dataset = self._dataset(tmp_path)
        labels = tmp_path / "labels.csv"
        labels.write_text("post_id,category_code\np9,3\n")
        with pytest.raises(UnknownPostId):
            load_labels(labels, dataset)

    def test_code_eleven_is_other(self, tmp_path):
        dataset = self._dataset(tmp_path)
        labels = tmp_path / "labels.csv"
        labels.write_text("post_id,category_code\np1,11\n")
        annotated, _ = load_labels(labels, dataset)
        assert annotated[0].category.short_name == "OTHER"

    def test_out_of_range_code(self, tmp_path):
        dataset = self._dataset(tmp_path)
        labels = tmp_path / "labels.csv"
        labels.write_text("post_id,category_code\np1,12\n")
        with pytest.raises(MalformedCsv):
            load_labels(labels, dataset)

    def test_writer_round_trip(self, tmp_path):
        dataset = self._dataset(tmp_path, ids=("p1", "p2", "p3"))
        annotated = [
            make_annotated(3, post_id="p1"),
            make_annotated(11, post_id="p2"),
            make_annotated(5, post_id="p3", relevant=False),
        ]
        path = tmp_path / "labels.csv"
        write_labels_csv(annotated, path)
        loaded, report = load_labels(path, dataset)
        # the irrelevant post is not written, so it comes back unlabeled
        assert [a.post.id for a in loaded] == ["p1", "p2"]
        assert report.unlabeled_ids == ("p3",)


def test_load_posts_deterministic(tmp_path):
    path = tmp_path / "posts.jsonl"
    write_jsonl(path, [_line("a"), _line("b")])
    first = load_posts(path)
    second = load_posts(path)
    assert first.dataset.posts == second.dataset.posts
    assert first.report == second.report
