"""Enhanced labeled attachment scoring.

Null nodes carry no identity of their own, so before comparison every arc
path that runs through null nodes is collapsed into a single item whose
label joins the path labels with ``>``: ``h -l1-> null -l2-> d`` becomes
``(h, d, "l1>l2")``.  Arcs into a null that has no outgoing arcs keep a
``None`` dependent.  Scores are micro-averaged multiset F1 over these
items; a per-sentence macro average is reported for diagnostics.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .conllu import Document, Sentence, extract_graph
from .errors import AlignmentError
from .graph import EnhancedGraph, NodeId

Item = tuple[NodeId, NodeId | None, str]


@dataclass(frozen=True)
class Score:
    correct: int = 0
    predicted: int = 0
    gold: int = 0

    @property
    def precision(self) -> float:
        return self.correct / self.predicted if self.predicted else 0.0

    @property
    def recall(self) -> float:
        return self.correct / self.gold if self.gold else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "Score") -> "Score":
        return Score(
            self.correct + other.correct,
            self.predicted + other.predicted,
            self.gold + other.gold,
        )


def collapse_nulls(g: EnhancedGraph) -> Counter:
    """Multiset of comparison items with null nodes collapsed away.

    Paths explore each null at most once (cycles through nulls do not
    recurse), and chains are composed in full.
    """
    items: Counter = Counter()
    for arc in g.arcs:
        if arc.head.is_null:
            continue
        if not arc.dep.is_null:
            items[(arc.head, arc.dep, arc.label)] += 1
            continue
        stack = [(arc.dep, (arc.label,), frozenset({arc.dep}))]
        while stack:
            null, labels, seen = stack.pop()
            out = g.dependents_of(null)
            if not out:
                items[(arc.head, None, ">".join(labels))] += 1
                continue
            for dep, label in sorted(out):
                if dep.is_null:
                    if dep not in seen:
                        stack.append((dep, labels + (label,), seen | {dep}))
                else:
                    items[(arc.head, dep, ">".join(labels + (label,)))] += 1
    return items


def check_aligned(gold: Document, pred: Document) -> None:
    if len(gold) != len(pred):
        raise AlignmentError(
            f"documents have {len(gold)} vs {len(pred)} sentences"
        )
    for i, (g, p) in enumerate(zip(gold, pred), start=1):
        gw = [t.form for t in g.words]
        pw = [t.form for t in p.words]
        if gw != pw:
            raise AlignmentError(f"sentence {i}: tokenization differs")


def sentence_score(gold: EnhancedGraph, pred: EnhancedGraph) -> Score:
    gold_items = collapse_nulls(gold)
    pred_items = collapse_nulls(pred)
    correct = sum((gold_items & pred_items).values())
    return Score(correct, sum(pred_items.values()), sum(gold_items.values()))


def sentence_items(pair: tuple[Sentence, Sentence]) -> tuple[Counter, Counter]:
    """Collapsed item multisets for one aligned (gold, predicted) pair.

    A plain function over picklable values, so scoring can fan out across
    processes and reduce with ``aggregate``.
    """
    gold_sent, pred_sent = pair
    return (
        collapse_nulls(extract_graph(gold_sent)),
        collapse_nulls(extract_graph(pred_sent)),
    )


def aggregate(item_pairs, per_label: bool = False):
    """Reduce per-sentence item multisets into (micro Score, macro F1, table)."""
    total = Score()
    f1s = []
    by_label: dict[str, Score] = {}
    for gold_items, pred_items in item_pairs:
        overlap = gold_items & pred_items
        score = Score(sum(overlap.values()), sum(pred_items.values()),
                      sum(gold_items.values()))
        total = total + score
        f1s.append(score.f1)
        if per_label:
            labels = {it[2] for it in gold_items} | {it[2] for it in pred_items}
            for label in labels:
                sc = Score(
                    sum(n for it, n in overlap.items() if it[2] == label),
                    sum(n for it, n in pred_items.items() if it[2] == label),
                    sum(n for it, n in gold_items.items() if it[2] == label),
                )
                by_label[label] = by_label.get(label, Score()) + sc
    macro = sum(f1s) / len(f1s) if f1s else 0.0
    table = dict(sorted(by_label.items())) if per_label else None
    return total, macro, table


def elas(gold: Document, pred: Document) -> Score:
    """Micro-averaged enhanced attachment score over aligned documents."""
    check_aligned(gold, pred)
    total, _, _ = aggregate(map(sentence_items, zip(gold, pred)))
    return total


def macro_f1(gold: Document, pred: Document) -> float:
    check_aligned(gold, pred)
    _, macro, _ = aggregate(map(sentence_items, zip(gold, pred)))
    return macro


def per_label_report(gold: Document, pred: Document) -> dict[str, Score]:
    """Scores grouped by collapsed label, sorted by label."""
    check_aligned(gold, pred)
    _, _, table = aggregate(map(sentence_items, zip(gold, pred)), per_label=True)
    return table


def format_report(score: Score, macro: float | None = None,
                  per_label: dict[str, Score] | None = None) -> str:
    """Render the machine-readable report lines (percentages, 2 decimals)."""
    lines = [
        f"ELAS_P={100 * score.precision:.2f}",
        f"ELAS_R={100 * score.recall:.2f}",
        f"ELAS_F1={100 * score.f1:.2f}",
    ]
    if macro is not None:
        lines.append(f"ELAS_MACRO_F1={100 * macro:.2f}")
    if per_label:
        lines.append("")
        lines.append(f"{'label':<24} {'P':>7} {'R':>7} {'F1':>7} {'gold':>6} {'pred':>6}")
        for label, sc in per_label.items():
            lines.append(
                f"{label:<24} {100 * sc.precision:7.2f} {100 * sc.recall:7.2f} "
                f"{100 * sc.f1:7.2f} {sc.gold:6d} {sc.predicted:6d}"
            )
    return "\n".join(lines)
