"""Shared test utilities."""

from edparse import Arc, EnhancedGraph, NodeId, ROOT

W = NodeId.word
N = NodeId.null


def random_graph(rng):
    """Arbitrary (frequently invalid) graphs: detached cycles, headless
    nodes, null chains, the lot."""
    n = rng.randint(1, 10)
    nodes = [W(i) for i in range(1, n + 1)]
    for s in range(1, rng.randint(0, 3) + 1):
        nodes.append(N(rng.randint(0, n), s) if rng.random() < 0.5 else N(1, s))
    fixed, counters = [], {}
    for node in sorted(nodes):
        if node.is_null:
            sub = counters.get(node.index, 0) + 1
            counters[node.index] = sub
            fixed.append(N(node.index, sub))
        else:
            fixed.append(node)
    nodes = fixed
    arcs = set()
    for _ in range(rng.randint(0, 2 * n)):
        h = rng.choice([ROOT] + nodes)
        d = rng.choice(nodes)
        if h == d:
            continue
        arcs.add(Arc(h, d, rng.choice("abc")))
    return EnhancedGraph(nodes, arcs)
