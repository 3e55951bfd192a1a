"""Deterministic static oracle: gold graph in, transition sequence out.

Given a configuration and the gold enhanced graph, the oracle picks the
first applicable rule:

1. empty buffer and only the root on the stack: FINISH;
2. an unconstructed gold arc between the two top stack items: the
   corresponding edge transition (RIGHT-EDGE before LEFT-EDGE when both
   directions are pending, lexicographically smallest label within a
   direction);
3. the stack top has a gold null-node neighbor not created yet: NODE,
   aligning the fresh placeholder with the smallest-id such null;
4. the stack top has all its gold heads and dependents: REDUCE-0; else the
   same test for the second item: REDUCE-1;
5. the top two items are in generation order and the stack top still has a
   pending gold neighbor deeper in the stack: SWAP;
6. otherwise SHIFT.

Null nodes in the gold graph are matched to the placeholders the executor
creates, so the derived graph equals gold up to null-node renaming.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .conllu import Sentence, extract_graph
from .errors import OracleDeadEnd
from .graph import ROOT, Arc, EnhancedGraph, NodeId
from . import transitions as tr
from .transitions import Configuration, ConstraintParams, Kind, Transition

DEFAULT_BUDGET_MULT = 50

_EMPTY: list = []
_EMPTY_SET: frozenset = frozenset()


@dataclass(frozen=True)
class TraceStep:
    """One step of a derivation; ``arc_added`` is set for edge transitions."""

    index: int
    transition: Transition
    arc_added: Arc | None = None

    def encode(self) -> str:
        return f"{self.index}\t{self.transition.encode()}"


class StaticOracle:
    """Per-sentence oracle state: gold bookkeeping plus null alignment."""

    def __init__(self, gold: EnhancedGraph,
                 params: ConstraintParams = tr.DEFAULT_PARAMS):
        self.gold = gold
        self.params = params
        # remaining labels per directed gold pair, lexicographically sorted
        self.pair_labels: dict[tuple[NodeId, NodeId], list[str]] = {}
        # number of unconstructed gold arcs incident to each node
        self.remaining: dict[NodeId, int] = {n: 0 for n in gold.nodes}
        # nodes that still share a pending gold arc with the key node
        self.partners: dict[NodeId, set[NodeId]] = {n: set() for n in gold.nodes}
        # gold null neighbors per node, smallest id first
        self.null_neighbors: dict[NodeId, list[NodeId]] = {}
        for arc in gold.arcs:
            self.pair_labels.setdefault((arc.head, arc.dep), []).append(arc.label)
            self.remaining[arc.head] += 1
            self.remaining[arc.dep] += 1
            self.partners[arc.head].add(arc.dep)
            self.partners[arc.dep].add(arc.head)
            if arc.dep.is_null:
                self.null_neighbors.setdefault(arc.head, []).append(arc.dep)
            if arc.head.is_null:
                self.null_neighbors.setdefault(arc.dep, []).append(arc.head)
        for labels in self.pair_labels.values():
            labels.sort()
        for nulls in self.null_neighbors.values():
            nulls.sort()
        # placeholder id -> gold null id, and the set of created gold nulls
        self.alignment: dict[NodeId, NodeId] = {}
        self.created: set[NodeId] = set()
        self.created_order: list[NodeId] = []

    # -- helpers -----------------------------------------------------------

    def to_gold(self, node: NodeId) -> NodeId:
        if node.is_null:
            return self.alignment[node]
        return node

    def _pending(self, head: NodeId, dep: NodeId) -> list[str]:
        return self.pair_labels.get((head, dep), _EMPTY)

    def _uncreated_null_neighbors(self, gold_node: NodeId) -> list[NodeId]:
        return [n for n in self.null_neighbors.get(gold_node, _EMPTY)
                if n not in self.created]

    # -- the decision rule ---------------------------------------------------

    def choose(self, c: Configuration) -> Transition:
        """The next transition for ``c``; raises OracleDeadEnd when stuck."""
        if c.terminal:
            raise OracleDeadEnd("configuration is terminal")
        stack = c.stack
        if not c.buffer and stack == (ROOT,):
            return tr.FINISH
        if len(stack) >= 2:
            s0, s1 = stack[-1], stack[-2]
            g0, g1 = self.to_gold(s0), self.to_gold(s1)
            right = self._pending(g1, g0)
            if right:
                if c.head_count.get(s0, 0) >= self.params.max_heads:
                    raise OracleDeadEnd(
                        f"gold arc ({g1}, {g0}, {right[0]}) exceeds the head limit"
                    )
                return tr.right_edge(right[0])
            left = self._pending(g0, g1)
            if left:
                if s1 == ROOT:
                    raise OracleDeadEnd("gold graph makes the root a dependent")
                if c.head_count.get(s1, 0) >= self.params.max_heads:
                    raise OracleDeadEnd(
                        f"gold arc ({g0}, {g1}, {left[0]}) exceeds the head limit"
                    )
                return tr.left_edge(left[0])
        s0 = stack[-1]
        g0 = self.to_gold(s0)
        if self._uncreated_null_neighbors(g0):
            if c.null_count >= self.params.null_budget(c.word_count):
                raise OracleDeadEnd("gold graph exceeds the null-node budget")
            return tr.NODE
        if s0 != ROOT and self.remaining.get(g0, 0) == 0:
            if c.head_count.get(s0, 0) == 0:
                raise OracleDeadEnd(f"gold node {g0} has no head")
            return tr.REDUCE0
        if len(stack) >= 2:
            s1 = stack[-2]
            g1 = self.to_gold(s1)
            if s1 != ROOT and self.remaining.get(g1, 0) == 0:
                if c.head_count.get(s1, 0) == 0:
                    raise OracleDeadEnd(f"gold node {g1} has no head")
                return tr.REDUCE1
            if c.gen_order[s1] < c.gen_order[s0]:
                wanted = self.partners.get(g0, _EMPTY_SET)
                if any(self.to_gold(x) in wanted for x in stack[:-2]):
                    return tr.SWAP
        if c.buffer:
            return tr.SHIFT
        raise OracleDeadEnd("no oracle rule applies (graph not derivable)")

    def observe(self, before: Configuration, t: Transition,
                after: Configuration) -> None:
        """Update bookkeeping after ``t`` was applied to ``before``."""
        if t.kind is Kind.NODE:
            placeholder = after.buffer[0]
            g0 = self.to_gold(before.stack[-1])
            uncreated = self._uncreated_null_neighbors(g0)
            if not uncreated:
                raise OracleDeadEnd("NODE observed without a pending gold null")
            gold_null = uncreated[0]
            self.alignment[placeholder] = gold_null
            self.created.add(gold_null)
            self.created_order.append(placeholder)
            return
        if not t.is_edge:
            return
        arc = tr.arc_added_by(before, t)
        gh, gd = self.to_gold(arc.head), self.to_gold(arc.dep)
        labels = self.pair_labels.get((gh, gd))
        if not labels or t.label not in labels:
            raise OracleDeadEnd(f"constructed arc {arc} is not pending in gold")
        labels.remove(t.label)
        self.remaining[gh] -= 1
        self.remaining[gd] -= 1
        if not labels and not self.pair_labels.get((gd, gh)):
            self.partners[gh].discard(gd)
            self.partners[gd].discard(gh)


@dataclass
class OracleRun:
    """Outcome of driving the oracle through the executor."""

    steps: list[TraceStep]
    config: Configuration
    derivable: bool
    failure: str | None = None
    alignment: dict[NodeId, NodeId] = field(default_factory=dict)

    @property
    def graph(self) -> EnhancedGraph:
        return self.config.graph()

    @property
    def transitions(self) -> list[Transition]:
        return [s.transition for s in self.steps]


def derive(gold: EnhancedGraph, word_count: int,
           params: ConstraintParams = tr.DEFAULT_PARAMS,
           budget_mult: int = DEFAULT_BUDGET_MULT) -> OracleRun:
    """Run the oracle against the executor for a gold graph.

    Never loops: the step budget is ``budget_mult * word_count``.  On a
    dead end or an exhausted budget the partial sequence is returned with
    ``derivable=False`` and a diagnostic.
    """
    over = [n for n in gold.nodes if gold.head_count(n) > params.max_heads]
    if over:
        c = tr.initial(word_count)
        return OracleRun([], c, False,
                         f"node {over[0]} has more than {params.max_heads} heads")
    if len(gold.nulls) > params.null_budget(word_count):
        c = tr.initial(word_count)
        return OracleRun([], c, False, "more null nodes than the budget allows")
    oracle = StaticOracle(gold, params)
    c = tr.initial(word_count)
    budget = budget_mult * word_count
    steps: list[TraceStep] = []
    while not c.terminal:
        if len(steps) >= budget:
            return OracleRun(steps, tr.halt(c), False,
                             f"budget of {budget} transitions exhausted",
                             oracle.alignment)
        try:
            t = oracle.choose(c)
            after = tr.apply(c, t, params)
            oracle.observe(c, t, after)
        except OracleDeadEnd as exc:
            return OracleRun(steps, tr.halt(c), False, str(exc), oracle.alignment)
        steps.append(TraceStep(len(steps) + 1, t, tr.arc_added_by(c, t)))
        c = after
    return OracleRun(steps, c, True, None, oracle.alignment)


def oracle_sequence(sent: Sentence, gold: EnhancedGraph | None = None,
                    params: ConstraintParams = tr.DEFAULT_PARAMS,
                    budget_mult: int = DEFAULT_BUDGET_MULT) -> OracleRun:
    """Derive the transition sequence for a sentence's gold graph."""
    if gold is None:
        gold = extract_graph(sent)
    return derive(gold, sent.word_count, params, budget_mult)
