"""Annotation-verification statistics.

    Consistency = (# items on which every annotator agrees) / N
    Fleiss kappa = (Pbar - Pbar_e) / (1 - Pbar_e)
    Cohen kappa  = (P_o - P_e) / (1 - P_e)

All three are label-renaming invariant, so the functions accept any
hashable labels (category values, booleans, strings).

The degenerate case Pbar_e = 1 (every assignment landed in a single
category) leaves the chance correction 0/0; observed agreement is then
necessarily perfect, and kappa is reported as 1 with a degeneracy flag.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Sequence

from .core import category_from_code
from .errors import (
    DegenerateExpected,
    EmptyTable,
    EvenRaterCount,
    LengthMismatch,
    MalformedCsv,
    OutOfRange,
)

Label = Hashable


@dataclass(frozen=True)
class AgreementTable:
    """Complete item x annotator label matrix."""

    items: tuple[str, ...]
    annotator_ids: tuple[str, ...]
    labels: tuple[tuple[Label, ...], ...]

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.items):
            raise ValueError("one label row per item required")
        width = len(self.annotator_ids)
        for row in self.labels:
            if len(row) != width:
                raise ValueError("matrix must be complete: one label per annotator")

    @property
    def n_items(self) -> int:
        return len(self.items)

    @property
    def n_raters(self) -> int:
        return len(self.annotator_ids)


def _require_table(table: AgreementTable) -> None:
    if table.n_items < 1 or table.n_raters < 2:
        raise EmptyTable("need at least 1 item and 2 annotators")


def consistency(table: AgreementTable) -> float:
    """Fraction of items on which all annotators gave the same label."""
    _require_table(table)
    unanimous = sum(1 for row in table.labels if len(set(row)) == 1)
    return unanimous / table.n_items


@dataclass(frozen=True)
class KappaDetail:
    value: float
    observed: float
    expected: float
    degenerate: bool


def _fleiss_detail(table: AgreementTable) -> KappaDetail:
    if table.n_items < 2 or table.n_raters < 2:
        raise EmptyTable("Fleiss kappa needs >= 2 items and >= 2 raters")
    n = table.n_raters
    per_item = []
    pooled: Counter[Label] = Counter()
    for row in table.labels:
        tally = Counter(row)
        pooled.update(tally)
        per_item.append(sum(k * (k - 1) for k in tally.values()) / (n * (n - 1)))
    p_bar = sum(per_item) / len(per_item)
    total = table.n_items * n
    p_e = sum((k / total) ** 2 for k in pooled.values())
    if p_e >= 1.0:
        if p_bar >= 1.0:
            return KappaDetail(value=1.0, observed=p_bar, expected=p_e, degenerate=True)
        raise DegenerateExpected("expected agreement is 1 but observed is not")
    return KappaDetail(
        value=(p_bar - p_e) / (1.0 - p_e),
        observed=p_bar,
        expected=p_e,
        degenerate=False,
    )


def fleiss_kappa(table: AgreementTable) -> float:
    """Multi-rater chance-corrected agreement over a complete table."""
    return _fleiss_detail(table).value


def _cohen_detail(a: Sequence[Label], b: Sequence[Label]) -> KappaDetail:
    if len(a) != len(b):
        raise LengthMismatch(f"label lists differ in length: {len(a)} vs {len(b)}")
    if not a:
        raise EmptyTable("Cohen kappa needs at least one item")
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    count_a = Counter(a)
    count_b = Counter(b)
    p_e = sum(count_a[label] * count_b.get(label, 0) for label in count_a) / (n * n)
    if p_e >= 1.0:
        if p_o >= 1.0:
            return KappaDetail(value=1.0, observed=p_o, expected=p_e, degenerate=True)
        raise DegenerateExpected("expected agreement is 1 but observed is not")
    return KappaDetail(
        value=(p_o - p_e) / (1.0 - p_e), observed=p_o, expected=p_e, degenerate=False
    )


def cohen_kappa(a: Sequence[Label], b: Sequence[Label]) -> float:
    """Two-rater chance-corrected agreement."""
    return _cohen_detail(a, b).value


@dataclass(frozen=True)
class ConsensusItem:
    item: str
    label: Label | None
    resolved: bool


def human_consensus(table: AgreementTable) -> list[ConsensusItem]:
    """Strict-majority label per item; full splits stay unresolved.

    Requires an odd rater count so a strict majority is well defined.
    """
    _require_table(table)
    if table.n_raters % 2 == 0:
        raise EvenRaterCount("majority consensus needs an odd number of raters")
    out: list[ConsensusItem] = []
    for item, row in zip(table.items, table.labels):
        label, count = Counter(row).most_common(1)[0]
        if count * 2 > table.n_raters:
            out.append(ConsensusItem(item=item, label=label, resolved=True))
        else:
            out.append(ConsensusItem(item=item, label=None, resolved=False))
    return out


def load_annotations_csv(path: str | Path) -> AgreementTable:
    """Build a table from annotations.csv (post_id,annotator_id,category_code).

    Items keep first-appearance order; annotator columns are sorted by id.
    The matrix must come out complete.
    """
    path = Path(path)
    cells: dict[tuple[str, str], Label] = {}
    items: list[str] = []
    seen_items: set[str] = set()
    annotators: set[str] = set()
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["post_id", "annotator_id", "category_code"]
        if header is None or [h.strip() for h in header] != expected:
            raise MalformedCsv(f"{path}: expected header {','.join(expected)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise MalformedCsv(f"{path}:{lineno}: expected 3 fields")
            item, annotator = row[0].strip(), row[1].strip()
            try:
                label = category_from_code(int(row[2]))
            except (ValueError, OutOfRange) as exc:
                raise MalformedCsv(f"{path}:{lineno}: {exc}") from exc
            if (item, annotator) in cells:
                raise MalformedCsv(f"{path}:{lineno}: duplicate cell {item}/{annotator}")
            if item not in seen_items:
                seen_items.add(item)
                items.append(item)
            cells[(item, annotator)] = label
            annotators.add(annotator)
    annotator_ids = tuple(sorted(annotators))
    rows = []
    for item in items:
        row_labels = []
        for annotator in annotator_ids:
            if (item, annotator) not in cells:
                raise MalformedCsv(
                    f"{path}: incomplete matrix, {item} missing label from {annotator}"
                )
            row_labels.append(cells[(item, annotator)])
        rows.append(tuple(row_labels))
    return AgreementTable(
        items=tuple(items), annotator_ids=annotator_ids, labels=tuple(rows)
    )


def agreement_report(
    human: AgreementTable, model_labels: dict[str, Label] | None = None
) -> dict:
    """Assemble the verification report.

    Human-vs-model numbers compare the majority consensus with the model
    label over resolved items only; full-split items are excluded and
    counted in n_unresolved.
    """
    fleiss = _fleiss_detail(human)
    report: dict = {
        "consistency": consistency(human),
        "fleiss_kappa": fleiss.value,
        "fleiss_degenerate": fleiss.degenerate,
        "n_items": human.n_items,
    }
    if model_labels is not None:
        consensus = human_consensus(human)
        resolved = [c for c in consensus if c.resolved and c.item in model_labels]
        report["n_unresolved"] = sum(1 for c in consensus if not c.resolved)
        if resolved:
            human_side = [c.label for c in resolved]
            model_side = [model_labels[c.item] for c in resolved]
            matches = sum(1 for h, m in zip(human_side, model_side) if h == m)
            cohen = _cohen_detail(human_side, model_side)
            report["human_mllm_consistency"] = matches / len(resolved)
            report["cohen_kappa"] = cohen.value
            report["cohen_degenerate"] = cohen.degenerate
        else:
            report["human_mllm_consistency"] = None
            report["cohen_kappa"] = None
            report["cohen_degenerate"] = False
    return report
