"""Connectivity repair and graph validation.

Predicted graphs must be connected: every node reachable from the root.
The transition constraints leave two failure modes — unconnected cycles and
(after premature termination) headless nodes.  Repair attaches both kinds
to the predicate (the first dependent of the root, falling back to the root
itself) with ``orphan``-labeled arcs until the validator is satisfied.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import ROOT, Arc, EnhancedGraph, NodeId

ORPHAN = "orphan"


@dataclass(frozen=True)
class Violation:
    kind: str  # "unreachable" | "headless" | "root-has-head" | "duplicate-arc"
    node: NodeId | None = None

    def __str__(self) -> str:
        return f"{self.kind}({self.node})" if self.node is not None else self.kind


@dataclass
class RepairReport:
    """What repair did: (node, attachment head) pairs, in order."""

    attached: list[tuple[NodeId, NodeId]] = field(default_factory=list)
    premature_finish: bool = False

    @property
    def changed(self) -> bool:
        return bool(self.attached)


def validate(g: EnhancedGraph) -> list[Violation]:
    """Empty iff ``g`` is connected, fully headed and structurally sound."""
    out: list[Violation] = []
    # duplicate triples and root-as-dependent are rejected at construction
    # time, so only reachability and headedness can fail here.
    reach = g.reachable_from(ROOT)
    for node in g.nodes:
        if node == ROOT:
            if g.heads_of(node):
                out.append(Violation("root-has-head", node))
            continue
        if node not in reach:
            out.append(Violation("unreachable", node))
        if not g.heads_of(node):
            out.append(Violation("headless", node))
    return out


def _predicate(g: EnhancedGraph) -> NodeId:
    """The attachment point: smallest root dependent, preferring ``root``
    arcs; the root itself when it has no dependents."""
    deps = g.dependents_of(ROOT)
    if not deps:
        return ROOT
    root_labeled = sorted(d for d, label in deps if label == "root")
    if root_labeled:
        return root_labeled[0]
    return min(d for d, _ in deps)


def repair(g: EnhancedGraph) -> tuple[EnhancedGraph, RepairReport]:
    """Make ``g`` valid by attaching unreachable and headless nodes.

    While unreachable nodes exist, the one with the most descendants
    (ties: smallest id) is attached to the predicate, recomputing
    reachability after every arc.  Any node still lacking a head is then
    attached the same way.  The result always passes ``validate``.
    """
    report = RepairReport()
    while True:
        reach = g.reachable_from(ROOT)
        unreachable = [n for n in g.nodes if n != ROOT and n not in reach]
        if not unreachable:
            break
        best = max(unreachable, key=lambda n: (len(g.reachable_from(n)), _neg(n)))
        target = _predicate(g)
        g = g.with_arcs([Arc(target, best, ORPHAN)])
        report.attached.append((best, target))
    for node in g.nodes:
        if node != ROOT and not g.heads_of(node):
            target = _predicate(g)
            g = g.with_arcs([Arc(target, node, ORPHAN)])
            report.attached.append((node, target))
    return g, report


def _neg(n: NodeId) -> tuple[int, int]:
    # max() with smallest-id tie-break
    return (-n.index, -n.sub)
