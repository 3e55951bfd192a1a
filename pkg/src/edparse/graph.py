"""Enhanced dependency graph model.

An enhanced graph is a directed multigraph over a root node, word nodes and
null (empty) nodes.  Unlike a dependency tree it may contain cycles and
nodes with several heads; arcs carry atomic label strings (label suffixes
such as ``nmod:van`` are never split).
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, NamedTuple

from .errors import GraphError

_ID_RE = re.compile(r"(0|[1-9][0-9]*)(?:\.([1-9][0-9]*))?$")


class NodeId(NamedTuple):
    """Identifier of a graph node: the root, a word, or a null node.

    The root is ``(0, 0)``, word ``i`` is ``(i, 0)`` and null node ``a.s``
    is ``(a, s)``.  Tuple comparison therefore gives exactly the CoNLL-U
    node order: ``0 < 0.1 < 1 < 1.1 < 1.2 < 2 < ...``.
    """

    index: int
    sub: int = 0

    @classmethod
    def word(cls, index: int) -> "NodeId":
        if index < 1:
            raise GraphError(f"word index must be >= 1, got {index}")
        return cls(index, 0)

    @classmethod
    def null(cls, anchor: int, sub: int) -> "NodeId":
        if anchor < 0 or sub < 1:
            raise GraphError(f"invalid null node id {anchor}.{sub}")
        return cls(anchor, sub)

    @classmethod
    def parse(cls, text: str) -> "NodeId":
        """Parse a CoNLL-U node id such as ``0``, ``12`` or ``12.1``."""
        m = _ID_RE.match(text)
        if m is None:
            raise GraphError(f"malformed node id {text!r}")
        return cls(int(m.group(1)), int(m.group(2) or 0))

    @property
    def is_root(self) -> bool:
        return self.index == 0 and self.sub == 0

    @property
    def is_word(self) -> bool:
        return self.index > 0 and self.sub == 0

    @property
    def is_null(self) -> bool:
        return self.sub > 0

    def __str__(self) -> str:
        return f"{self.index}.{self.sub}" if self.sub else str(self.index)


ROOT = NodeId(0, 0)


class Arc(NamedTuple):
    """A labeled dependency with explicit head and dependent."""

    head: NodeId
    dep: NodeId
    label: str

    def __str__(self) -> str:
        return f"({self.head} -{self.label}-> {self.dep})"


class EnhancedGraph:
    """Immutable enhanced dependency graph.

    ``nodes`` always includes the root.  Arcs are kept sorted by
    (head, dependent, label) so that iteration order, serialization and
    derived traces are reproducible.  Duplicate triples, self-loops and
    arcs into the root are rejected; cycles and multiple heads are fine.
    """

    __slots__ = ("nodes", "arcs", "_node_set", "_heads", "_deps")

    def __init__(self, nodes: Iterable[NodeId] = (), arcs: Iterable[Arc] = ()):
        node_set = set(nodes)
        node_set.add(ROOT)
        arc_list = sorted(arcs)
        heads: dict[NodeId, list[tuple[NodeId, str]]] = {}
        deps: dict[NodeId, list[tuple[NodeId, str]]] = {}
        prev = None
        for arc in arc_list:
            if arc == prev:
                raise GraphError(f"duplicate arc {arc}")
            prev = arc
            if arc.head not in node_set or arc.dep not in node_set:
                raise GraphError(f"arc {arc} references a node outside the graph")
            if arc.dep.is_root:
                raise GraphError(f"arc {arc} makes the root a dependent")
            if arc.head == arc.dep:
                raise GraphError(f"arc {arc} is a self-loop")
            if not arc.label:
                raise GraphError(f"arc {arc} has an empty label")
            heads.setdefault(arc.dep, []).append((arc.head, arc.label))
            deps.setdefault(arc.head, []).append((arc.dep, arc.label))
        self.nodes: tuple[NodeId, ...] = tuple(sorted(node_set))
        self.arcs: tuple[Arc, ...] = tuple(arc_list)
        self._node_set = node_set
        self._heads = heads
        self._deps = deps

    # -- basic queries ----------------------------------------------------

    def __contains__(self, node: NodeId) -> bool:
        return node in self._node_set

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EnhancedGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.arcs == other.arcs

    def __hash__(self) -> int:
        return hash((self.nodes, self.arcs))

    def __repr__(self) -> str:
        return f"EnhancedGraph(nodes={len(self.nodes)}, arcs={len(self.arcs)})"

    @property
    def words(self) -> tuple[NodeId, ...]:
        return tuple(n for n in self.nodes if n.is_word)

    @property
    def nulls(self) -> tuple[NodeId, ...]:
        return tuple(n for n in self.nodes if n.is_null)

    def heads_of(self, node: NodeId) -> set[tuple[NodeId, str]]:
        """All (head, label) pairs of arcs pointing into ``node``."""
        self._check_node(node)
        return set(self._heads.get(node, ()))

    def dependents_of(self, node: NodeId) -> set[tuple[NodeId, str]]:
        """All (dependent, label) pairs of arcs going out of ``node``."""
        self._check_node(node)
        return set(self._deps.get(node, ()))

    def head_count(self, node: NodeId) -> int:
        return len(self._heads.get(node, ()))

    def _check_node(self, node: NodeId) -> None:
        if node not in self._node_set:
            raise GraphError(f"unknown node {node}")

    # -- reachability ------------------------------------------------------

    def reachable_from(self, node: NodeId) -> set[NodeId]:
        """Descendants of ``node`` following head->dependent arcs.

        ``node`` itself is included only when it lies on a cycle through
        itself.
        """
        self._check_node(node)
        seen: set[NodeId] = set()
        frontier = [d for d, _ in self._deps.get(node, ())]
        while frontier:
            n = frontier.pop()
            if n in seen:
                continue
            seen.add(n)
            frontier.extend(d for d, _ in self._deps.get(n, ()))
        return seen

    def is_connected(self) -> bool:
        """True iff every non-root node is reachable from the root."""
        return len(self.reachable_from(ROOT)) == len(self.nodes) - 1

    # -- builders ----------------------------------------------------------

    def with_arcs(self, extra: Iterable[Arc]) -> "EnhancedGraph":
        return EnhancedGraph(self.nodes, list(self.arcs) + list(extra))

    def relabel_nulls(self, mapping: dict[NodeId, NodeId]) -> "EnhancedGraph":
        """Rename null nodes; words and root are never renamed."""

        def m(n: NodeId) -> NodeId:
            return mapping.get(n, n)

        nodes = [m(n) for n in self.nodes]
        if len(set(nodes)) != len(nodes):
            raise GraphError("null relabeling collapses nodes")
        arcs = [Arc(m(a.head), m(a.dep), a.label) for a in self.arcs]
        return EnhancedGraph(nodes, arcs)


def graph_equal_modulo_null_ids(g1: EnhancedGraph, g2: EnhancedGraph) -> bool:
    """Equality of graphs up to a bijective renaming of null nodes.

    Null nodes are matched on their labeled neighborhoods; ambiguous
    signatures are resolved by backtracking, so two nulls with identical
    surroundings may be swapped freely.
    """
    if set(g1.words) != set(g2.words):
        return False
    nulls1, nulls2 = g1.nulls, g2.nulls
    if len(nulls1) != len(nulls2) or len(g1.arcs) != len(g2.arcs):
        return False
    fixed1 = {a for a in g1.arcs if not (a.head.is_null or a.dep.is_null)}
    fixed2 = {a for a in g2.arcs if not (a.head.is_null or a.dep.is_null)}
    if fixed1 != fixed2:
        return False
    if not nulls1:
        return True

    def signature(g: EnhancedGraph, n: NodeId):
        head_part = frozenset((h, l) for h, l in g.heads_of(n) if not h.is_null)
        dep_part = frozenset((d, l) for d, l in g.dependents_of(n) if not d.is_null)
        null_in = tuple(sorted(l for h, l in g.heads_of(n) if h.is_null))
        null_out = tuple(sorted(l for d, l in g.dependents_of(n) if d.is_null))
        return (head_part, dep_part, null_in, null_out)

    sig2: dict[NodeId, object] = {n: signature(g2, n) for n in nulls2}
    candidates = {
        n1: [n2 for n2 in nulls2 if sig2[n2] == signature(g1, n1)] for n1 in nulls1
    }
    if any(not c for c in candidates.values()):
        return False
    order = sorted(nulls1, key=lambda n: len(candidates[n]))

    def labels_between(g: EnhancedGraph, a: NodeId, b: NodeId) -> tuple[str, ...]:
        return tuple(sorted(l for d, l in g.dependents_of(a) if d == b))

    assignment: dict[NodeId, NodeId] = {}

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        n1 = order[i]
        for n2 in candidates[n1]:
            if n2 in assignment.values():
                continue
            ok = all(
                labels_between(g1, n1, m1) == labels_between(g2, n2, m2)
                and labels_between(g1, m1, n1) == labels_between(g2, m2, n2)
                for m1, m2 in assignment.items()
            )
            if not ok:
                continue
            assignment[n1] = n2
            if extend(i + 1):
                return True
            del assignment[n1]
        return False

    return extend(0)


def iter_arcs_sorted(arcs: Iterable[Arc]) -> Iterator[Arc]:
    return iter(sorted(arcs))
