"""Transition policies and the end-to-end parse pipeline.

A policy picks one of the legal transitions for the current configuration
(or declines, which ends the episode prematurely).  The pipeline runs
initial -> choose/apply -> finish, prunes placeholder nulls that gathered
no arcs, repairs connectivity and returns a graph that always validates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence, runtime_checkable

from .conllu import Document, Sentence, extract_graph, inject_graph, strip_enhancements
from .errors import EdparseError
from .features import FeatureExtractor
from .graph import ROOT, Arc, EnhancedGraph, NodeId
from .model import LinearModel
from .oracle import DEFAULT_BUDGET_MULT, StaticOracle, TraceStep
from .repair import RepairReport, repair
from . import transitions as tr
from .transitions import Configuration, ConstraintParams, Transition


@runtime_checkable
class Policy(Protocol):
    """Chooses among legal transitions; None means "stop here"."""

    edge_labels: Sequence[str]

    def choose(self, c: Configuration,
               legal: list[Transition]) -> Transition | None: ...

    def observe(self, before: Configuration, t: Transition,
                after: Configuration) -> None: ...


class OraclePolicy:
    """Replays the static oracle; needs the sentence's gold graph."""

    def __init__(self, gold: EnhancedGraph,
                 params: ConstraintParams = tr.DEFAULT_PARAMS):
        self.oracle = StaticOracle(gold, params)
        self.edge_labels = sorted({a.label for a in gold.arcs})

    def choose(self, c, legal):
        return self.oracle.choose(c)

    def observe(self, before, t, after):
        self.oracle.observe(before, t, after)


class ModelPolicy:
    """Greedy argmax of a trained linear model."""

    def __init__(self, model: LinearModel, sent: Sentence):
        self.model = model
        self.extractor = FeatureExtractor(sent, model.feature_dim)
        self.edge_labels = model.edge_labels

    def choose(self, c, legal):
        return self.model.choose(self.extractor.features(c), legal)

    def observe(self, before, t, after):
        pass


class AllShiftPolicy:
    """Degenerate baseline: shift everything, then stop.

    Declining once the buffer is empty leaves every word headless, so the
    final graph is produced entirely by repair.
    """

    edge_labels: Sequence[str] = ()

    def choose(self, c, legal):
        if tr.SHIFT in legal:
            return tr.SHIFT
        if tr.FINISH in legal:
            return tr.FINISH
        return None

    def observe(self, before, t, after):
        pass


@dataclass
class ParseResult:
    graph: EnhancedGraph
    report: RepairReport
    steps: list[TraceStep] = field(default_factory=list)


def _prune_isolated_nulls(g: EnhancedGraph) -> EnhancedGraph:
    """Drop placeholder nulls with no incident arcs and renumber the rest
    so per-anchor sub-indices stay consecutive."""
    used = {a.head for a in g.arcs} | {a.dep for a in g.arcs}
    keep = [n for n in g.nodes if not n.is_null or n in used]
    mapping: dict[NodeId, NodeId] = {}
    counters: dict[int, int] = {}
    for n in sorted(k for k in keep if k.is_null):
        sub = counters.get(n.index, 0) + 1
        counters[n.index] = sub
        mapping[n] = NodeId(n.index, sub)
    arcs = [Arc(mapping.get(a.head, a.head), mapping.get(a.dep, a.dep), a.label)
            for a in g.arcs]
    nodes = [mapping.get(n, n) for n in keep]
    return EnhancedGraph(nodes, arcs)


def parse_sentence(sent: Sentence, policy: Policy,
                   params: ConstraintParams = tr.DEFAULT_PARAMS,
                   budget_mult: int = DEFAULT_BUDGET_MULT) -> ParseResult:
    """Parse one tokenized sentence into a valid enhanced graph.

    Total by construction: a transition budget of ``budget_mult * words``,
    dead-end detection, and repair make every outcome a connected graph.
    """
    c = tr.initial(sent.word_count)
    budget = budget_mult * sent.word_count
    steps: list[TraceStep] = []
    premature = False
    while not c.terminal:
        if len(steps) >= budget:
            c = tr.halt(c)
            premature = True
            break
        legal = tr.legal_transitions(c, params, policy.edge_labels)
        if not legal:
            c = tr.forced_finish(c, params, policy.edge_labels)
            premature = True
            break
        t = policy.choose(c, legal)
        if t is None:
            c = tr.halt(c)
            premature = True
            break
        if t not in legal:
            raise EdparseError(f"policy chose illegal transition {t}")
        after = tr.apply(c, t, params)
        policy.observe(c, t, after)
        steps.append(TraceStep(len(steps) + 1, t, tr.arc_added_by(c, t)))
        c = after
    graph = _prune_isolated_nulls(c.graph())
    graph, report = repair(graph)
    report.premature_finish = premature
    return ParseResult(graph, report, steps)


def parse_document(doc: Document, policy_for: "PolicyFactory",
                   params: ConstraintParams = tr.DEFAULT_PARAMS,
                   budget_mult: int = DEFAULT_BUDGET_MULT) -> list[ParseResult]:
    return [parse_sentence(s, policy_for(s), params, budget_mult) for s in doc]


class PolicyFactory(Protocol):
    def __call__(self, sent: Sentence) -> Policy: ...


def model_policy_factory(model: LinearModel) -> PolicyFactory:
    return lambda sent: ModelPolicy(model, sent)


def oracle_policy_factory(gold_doc: Document,
                          params: ConstraintParams = tr.DEFAULT_PARAMS) -> PolicyFactory:
    """Aligns sentences by object identity order within the document."""
    table = {id(s): extract_graph(s) for s in gold_doc}

    def factory(sent: Sentence) -> Policy:
        gold = table.get(id(sent))
        if gold is None:
            gold = extract_graph(sent)
        return OraclePolicy(gold, params)

    return factory


def parsed_sentence(sent: Sentence, result: ParseResult) -> Sentence:
    """The input sentence with DEPS and null rows replaced by the parse."""
    return inject_graph(strip_enhancements(sent), result.graph)


def copy_tree_baseline(sent: Sentence) -> EnhancedGraph:
    """The tree from HEAD/DEPREL copied as an enhanced graph; no nulls."""
    nodes = [ROOT]
    arcs = []
    for t in sent.words:
        nodes.append(t.id)
        if t.head is None:
            raise EdparseError(
                f"word {t.id} has no HEAD; the copy baseline needs a tree"
            )
        arcs.append(Arc(t.head, t.id, t.deprel))
    return EnhancedGraph(nodes, arcs)


@dataclass(frozen=True)
class InventoryStats:
    """Distinct enhanced labels in a treebank, plus derived counts."""

    labels: tuple[str, ...]
    occurrences: dict[str, int]

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    @property
    def n_suffixed(self) -> int:
        return sum(1 for l in self.labels if ":" in l)


def label_inventory(doc: Document) -> InventoryStats:
    counts: dict[str, int] = {}
    for sent in doc:
        for t in sent.tokens:
            for _, label in t.deps:
                counts[label] = counts.get(label, 0) + 1
    return InventoryStats(tuple(sorted(counts)), counts)
