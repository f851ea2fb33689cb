"""Stage-one classification: relevance cleaning and impact labeling.

Backends implement a single text-in, raw-text-out call so the retry,
parsing, and caching logic stays uniform. The bundled mock backend is a
transparent keyword table meant for offline tests and demos; it makes
no claim of fidelity to any hosted model. The remote backend speaks a
minimal JSON-over-HTTP contract (template id plus post payload in,
judgment JSON out) and leaves vendor specifics to adapter code.
"""

from __future__ import annotations

import json
import re
import threading
import time
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Protocol

from .core import (
    OTHER,
    AnnotatedPost,
    DisasterTag,
    ImpactCategory,
    Post,
    category_from_code,
)
from .errors import EmptyInput, MalformedResponse, OutOfRange, TransportError
from .ingestion import Dataset, scrub_handles


class Task(Enum):
    RELEVANCE_HURRICANE = "relevance_hurricane"
    RELEVANCE_WILDFIRE = "relevance_wildfire"
    IMPACT_CATEGORY = "impact_category"


PROMPT_TEMPLATE_IDS = {
    Task.RELEVANCE_HURRICANE: "clean_hurricane",
    Task.RELEVANCE_WILDFIRE: "clean_wildfire",
    Task.IMPACT_CATEGORY: "classify_impact",
}

RELEVANCE_TASKS = (Task.RELEVANCE_HURRICANE, Task.RELEVANCE_WILDFIRE)


def load_prompt(template_id: str) -> str:
    """Read a bundled prompt template by id."""
    ref = resources.files("disimpact").joinpath(f"prompts/{template_id}.txt")
    return ref.read_text(encoding="utf-8")


@dataclass(frozen=True)
class ClassifierRequest:
    post: Post
    task: Task
    prompt_template_id: str

    def __post_init__(self) -> None:
        # No handle may leave the process; parse-time scrubbing makes
        # this a no-op for posts loaded through ingestion.
        if scrub_handles(self.post.text) != self.post.text:
            raise ValueError("request text must be scrubbed first")

    def payload(self) -> str:
        """Serialized request body, also what the privacy audit sees."""
        return json.dumps(
            {
                "template_id": self.prompt_template_id,
                "post": {
                    "id": self.post.id,
                    "text": self.post.text,
                    "media_refs": list(self.post.media_refs),
                },
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class ClassifierResponse:
    judgment: bool | int
    raw: str


@dataclass(frozen=True)
class ClientPolicy:
    max_in_flight: int = 4
    max_retries: int = 2
    backoff_base: float = 0.5
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.max_in_flight < 1:
            raise OutOfRange("max_in_flight must be positive")
        if self.max_retries < 0:
            raise OutOfRange("max_retries must be >= 0")
        if self.backoff_base < 0 or self.timeout <= 0:
            raise OutOfRange("backoff_base must be >= 0 and timeout > 0")


_JSON_BLOCK = re.compile(r"\{.*\}", re.DOTALL)


def _extract_judgment(raw: str):
    block = _JSON_BLOCK.search(raw)
    if block is None:
        raise MalformedResponse(f"no judgment object in response: {raw!r}")
    text = block.group(0)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        # The response contract spells booleans in title case.
        patched = re.sub(r"\bTrue\b", "true", re.sub(r"\bFalse\b", "false", text))
        try:
            data = json.loads(patched)
        except json.JSONDecodeError as exc:
            raise MalformedResponse(f"unparseable response: {raw!r}") from exc
    if not isinstance(data, dict) or "Judgment" not in data:
        raise MalformedResponse(f"response lacks a Judgment field: {raw!r}")
    return data["Judgment"]


def parse_judgment(raw: str, task: Task) -> bool | ImpactCategory:
    """Extract the judgment for a task; rejects, never coerces."""
    value = _extract_judgment(raw)
    if task in RELEVANCE_TASKS:
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.strip().lower() in ("true", "false"):
            return value.strip().lower() == "true"
        raise MalformedResponse(f"relevance judgment must be boolean, got {value!r}")
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedResponse(f"impact judgment must be an integer, got {value!r}")
    try:
        return category_from_code(value)
    except OutOfRange as exc:
        raise MalformedResponse(str(exc)) from exc


class Backend(Protocol):
    def complete(self, request: ClassifierRequest) -> str:
        """Return the raw model output for one request."""
        ...


# Scanned in category order; the first category with a hit wins, and
# posts with no hit fall through to the catch-all category.
MOCK_IMPACT_KEYWORDS: tuple[tuple[int, tuple[str, ...]], ...] = (
    (1, ("died", "dead", "killed", "injured", "missing", "casualt")),
    (2, ("evacuat", "shelter", "displaced")),
    (3, ("power", "outage", "road", "bridge", "grid", "collapsed")),
    (4, ("contaminat", "wetland", "wildlife", "erosion", "farmland")),
    (5, ("need water", "need food", "running low", "supplies")),
    (6, ("disease", "mold", "hospital", "medication", "illness")),
    (7, ("anxiety", "trauma", "grief", "nightmare", "devastated")),
    (8, ("blame", "unequal", "discriminat", "left behind", "ignored")),
    (9, ("volunteer", "donat", "rebuild", "relief", "fema")),
    (10, ("business", "job", "tourism", "rent", "economy", "closed")),
)

MOCK_RELEVANCE_RULES: dict[Task, tuple[tuple[str, ...], tuple[str, ...]]] = {
    # (counter patterns checked first, on-topic patterns)
    Task.RELEVANCE_HURRICANE: (
        ("miami hurricanes", "carolina hurricanes", "like a hurricane", "wwe"),
        ("hurricane", "helene", "milton", "storm surge", "tropical storm", "flood"),
    ),
    Task.RELEVANCE_WILDFIRE: (
        ("like wildfire",),
        ("wildfire", "brush fire", "forest fire", "palisades", "eaton fire"),
    ),
}


class MockBackend:
    """Deterministic keyword classifier with a request audit log."""

    def __init__(self) -> None:
        self.request_log: list[str] = []
        self.calls = 0
        self._lock = threading.Lock()

    def complete(self, request: ClassifierRequest) -> str:
        with self._lock:
            self.calls += 1
            self.request_log.append(request.payload())
        text = request.post.text.lower()
        if request.task in RELEVANCE_TASKS:
            counters, on_topic = MOCK_RELEVANCE_RULES[request.task]
            if any(pattern in text for pattern in counters):
                return '{"Judgment": false}'
            relevant = any(pattern in text for pattern in on_topic)
            return '{"Judgment": true}' if relevant else '{"Judgment": false}'
        for code, keywords in MOCK_IMPACT_KEYWORDS:
            if any(keyword in text for keyword in keywords):
                return '{"Judgment": %d}' % code
        return '{"Judgment": %d}' % OTHER.code


class RemoteBackend:
    """JSON-over-HTTP adapter; auth via DISIMPACT_MLLM_API_KEY."""

    ENV_KEY = "DISIMPACT_MLLM_API_KEY"

    def __init__(
        self,
        endpoint: str,
        api_key: str | None = None,
        timeout: float = 30.0,
    ) -> None:
        if api_key is None:
            import os

            api_key = os.environ.get(self.ENV_KEY)
        if not api_key:
            raise TransportError(f"no API key: set {self.ENV_KEY} or pass api_key")
        self.endpoint = endpoint
        self._api_key = api_key
        self.timeout = timeout

    def complete(self, request: ClassifierRequest) -> str:
        body = request.payload().encode("utf-8")
        http_request = urllib.request.Request(
            self.endpoint,
            data=body,
            headers={
                "Content-Type": "application/json",
                "Authorization": f"Bearer {self._api_key}",
            },
            method="POST",
        )
        try:
            with urllib.request.urlopen(http_request, timeout=self.timeout) as reply:
                return reply.read().decode("utf-8")
        except urllib.error.HTTPError as exc:
            retryable = exc.code == 429 or exc.code >= 500
            error = TransportError(f"HTTP {exc.code} from {self.endpoint}")
            error.retryable = retryable
            raise error from exc
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            error = TransportError(f"transport failure: {exc}")
            error.retryable = True
            raise error from exc


def _call_with_retries(
    backend: Backend,
    request: ClassifierRequest,
    policy: ClientPolicy,
    sleep: Callable[[float], None] = time.sleep,
) -> str:
    attempts = 1 + policy.max_retries
    for attempt in range(attempts):
        try:
            return backend.complete(request)
        except TransportError as exc:
            if not getattr(exc, "retryable", True) or attempt == attempts - 1:
                raise
            sleep(policy.backoff_base * (2**attempt))
    raise AssertionError("unreachable")


def _relevance_task(disaster: DisasterTag) -> Task:
    if disaster is DisasterTag.HURRICANE:
        return Task.RELEVANCE_HURRICANE
    if disaster is DisasterTag.WILDFIRE:
        return Task.RELEVANCE_WILDFIRE
    raise OutOfRange(f"no cleaning prompt for disaster tag {disaster}")


def classify_relevance(
    post: Post,
    disaster: DisasterTag,
    backend: Backend,
    policy: ClientPolicy = ClientPolicy(),
    sleep: Callable[[float], None] = time.sleep,
) -> ClassifierResponse:
    """Judge whether a post is on-topic for the disaster type."""
    if not post.text and not post.media_refs:
        raise EmptyInput(f"post {post.id} has neither text nor media")
    task = _relevance_task(disaster)
    request = ClassifierRequest(
        post=post, task=task, prompt_template_id=PROMPT_TEMPLATE_IDS[task]
    )
    raw = _call_with_retries(backend, request, policy, sleep)
    judgment = parse_judgment(raw, task)
    assert isinstance(judgment, bool)
    return ClassifierResponse(judgment=judgment, raw=raw)


def classify_impact(
    post: Post,
    backend: Backend,
    policy: ClientPolicy = ClientPolicy(),
    sleep: Callable[[float], None] = time.sleep,
) -> ClassifierResponse:
    """Assign the single dominant impact category to a relevant post."""
    if not post.text and not post.media_refs:
        raise EmptyInput(f"post {post.id} has neither text nor media")
    task = Task.IMPACT_CATEGORY
    request = ClassifierRequest(
        post=post, task=task, prompt_template_id=PROMPT_TEMPLATE_IDS[task]
    )
    raw = _call_with_retries(backend, request, policy, sleep)
    judgment = parse_judgment(raw, task)
    assert isinstance(judgment, ImpactCategory)
    return ClassifierResponse(judgment=judgment, raw=raw)


@dataclass(frozen=True)
class AnnotationError:
    post_id: str
    stage: str
    message: str


@dataclass
class AnnotationReport:
    backend_posts: int = 0
    cache_hits: int = 0
    cache_invalid: int = 0
    errors: list[AnnotationError] = field(default_factory=list)


@dataclass(frozen=True)
class _CacheEntry:
    post_id: str
    relevant: bool
    category_code: int | None
    raw: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "post_id": self.post_id,
                "relevant": self.relevant,
                "category_code": self.category_code,
                "raw": self.raw,
            },
            sort_keys=True,
        )


def _read_cache(path: Path, report: AnnotationReport) -> dict[str, _CacheEntry]:
    entries: dict[str, _CacheEntry] = {}
    if not path.exists():
        return entries
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
                entry = _CacheEntry(
                    post_id=data["post_id"],
                    relevant=bool(data["relevant"]),
                    category_code=data["category_code"],
                    raw=str(data.get("raw", "")),
                )
                if entry.category_code is not None:
                    category_from_code(entry.category_code)
            except (KeyError, TypeError, ValueError, OutOfRange):
                # Torn or stale writes from an interrupted run are
                # recoverable: skip the line and re-annotate that post.
                report.cache_invalid += 1
                continue
            entries[entry.post_id] = entry
    return entries


def _is_complete(entry: _CacheEntry) -> bool:
    # A relevant entry without a category records a finished cleaning
    # stage whose impact stage is still pending.
    return not entry.relevant or entry.category_code is not None


def _entry_to_annotation(post: Post, entry: _CacheEntry) -> AnnotatedPost:
    if entry.relevant and entry.category_code is not None:
        return AnnotatedPost(
            post=post, category=category_from_code(entry.category_code), relevant=True
        )
    return AnnotatedPost(post=post, category=OTHER, relevant=False)


def annotate_dataset(
    dataset: Dataset,
    backend: Backend,
    policy: ClientPolicy = ClientPolicy(),
    cache_path: str | Path = "annotation_cache.jsonl",
    sleep: Callable[[float], None] = time.sleep,
) -> tuple[list[AnnotatedPost], AnnotationReport]:
    """Annotate every post, reusing and extending the JSONL cache.

    Posts already in the cache cost zero backend calls. Failures are
    collected per post and the rest of the batch completes; failed
    posts are left out of both the result and the cache so the next
    run retries them. New cache entries are appended in dataset order,
    which keeps reruns byte-reproducible.
    """
    cache_path = Path(cache_path)
    report = AnnotationReport()
    cache = _read_cache(cache_path, report)

    def annotate_one(post: Post) -> tuple[AnnotatedPost, _CacheEntry]:
        prior = cache.get(post.id)
        if prior is not None and prior.relevant and prior.category_code is None:
            # Cleaning stage cached; only the impact stage remains.
            relevant, raw_prefix = True, prior.raw
        else:
            relevance = classify_relevance(
                post, dataset.disaster_tag, backend, policy, sleep
            )
            relevant, raw_prefix = bool(relevance.judgment), relevance.raw
        if not relevant:
            entry = _CacheEntry(
                post_id=post.id,
                relevant=False,
                category_code=None,
                raw=raw_prefix,
            )
            return _entry_to_annotation(post, entry), entry
        impact = classify_impact(post, backend, policy, sleep)
        assert isinstance(impact.judgment, ImpactCategory)
        entry = _CacheEntry(
            post_id=post.id,
            relevant=True,
            category_code=impact.judgment.code,
            raw=raw_prefix + "\n" + impact.raw,
        )
        return _entry_to_annotation(post, entry), entry

    pending = [
        post
        for post in dataset.posts
        if post.id not in cache or not _is_complete(cache[post.id])
    ]
    report.cache_hits = len(dataset.posts) - len(pending)
    report.backend_posts = len(pending)
    outcomes: dict[str, AnnotatedPost | AnnotationError] = {}
    new_entries: dict[str, _CacheEntry] = {}

    def worker(post: Post) -> None:
        try:
            annotation, entry = annotate_one(post)
        except (TransportError, MalformedResponse, EmptyInput) as exc:
            outcomes[post.id] = AnnotationError(
                post_id=post.id, stage=type(exc).__name__, message=str(exc)
            )
            return
        outcomes[post.id] = annotation
        new_entries[post.id] = entry

    if pending:
        with ThreadPoolExecutor(max_workers=policy.max_in_flight) as pool:
            list(pool.map(worker, pending))

    annotations: list[AnnotatedPost] = []
    pending_ids = {post.id for post in pending}
    for post in dataset.posts:
        if post.id not in pending_ids:
            annotations.append(_entry_to_annotation(post, cache[post.id]))
            continue
        outcome = outcomes[post.id]
        if isinstance(outcome, AnnotationError):
            report.errors.append(outcome)
        else:
            annotations.append(outcome)

    if new_entries:
        with cache_path.open("a", encoding="utf-8") as fh:
            for post in dataset.posts:
                if post.id in new_entries:
                    fh.write(new_entries[post.id].to_json() + "\n")
    return annotations, report


@dataclass
class CleanReport:
    total: int = 0
    kept: int = 0
    backend_posts: int = 0
    cache_hits: int = 0
    cache_invalid: int = 0
    errors: list[AnnotationError] = field(default_factory=list)

    def summary(self) -> str:
        """Human summary line, e.g. "9,666/12,301 (79%)"."""
        if self.total == 0:
            return "0/0"
        pct = int(100 * self.kept / self.total + 0.5)
        return f"{self.kept:,}/{self.total:,} ({pct}%)"


def clean_dataset(
    dataset: Dataset,
    backend: Backend,
    policy: ClientPolicy = ClientPolicy(),
    cache_path: str | Path = "annotation_cache.jsonl",
    sleep: Callable[[float], None] = time.sleep,
) -> tuple[list[Post], CleanReport]:
    """Relevance-filter a dataset, caching judgments for later stages.

    Kept posts come back in dataset order. Cached relevance (from any
    earlier stage) is reused without backend calls; newly judged posts
    are cached with the category left open so a later full annotation
    run completes them without repeating the cleaning call.
    """
    cache_path = Path(cache_path)
    report = CleanReport(total=len(dataset.posts))
    cache = _read_cache(cache_path, report)
    pending = [post for post in dataset.posts if post.id not in cache]
    report.cache_hits = report.total - len(pending)
    report.backend_posts = len(pending)
    outcomes: dict[str, bool | AnnotationError] = {}
    new_entries: dict[str, _CacheEntry] = {}

    def worker(post: Post) -> None:
        try:
            response = classify_relevance(
                post, dataset.disaster_tag, backend, policy, sleep
            )
        except (TransportError, MalformedResponse, EmptyInput) as exc:
            outcomes[post.id] = AnnotationError(
                post_id=post.id, stage=type(exc).__name__, message=str(exc)
            )
            return
        judgment = bool(response.judgment)
        outcomes[post.id] = judgment
        new_entries[post.id] = _CacheEntry(
            post_id=post.id,
            relevant=judgment,
            category_code=None,
            raw=response.raw,
        )

    if pending:
        with ThreadPoolExecutor(max_workers=policy.max_in_flight) as pool:
            list(pool.map(worker, pending))

    kept: list[Post] = []
    for post in dataset.posts:
        if post.id in cache:
            if cache[post.id].relevant:
                kept.append(post)
            continue
        outcome = outcomes[post.id]
        if isinstance(outcome, AnnotationError):
            report.errors.append(outcome)
        elif outcome:
            kept.append(post)
    report.kept = len(kept)

    if new_entries:
        with cache_path.open("a", encoding="utf-8") as fh:
            for post in dataset.posts:
                if post.id in new_entries:
                    fh.write(new_entries[post.id].to_json() + "\n")
    return kept, report
