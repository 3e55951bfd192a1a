"""Graph model: node ordering, adjacency, reachability, null-blind equality."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edparse import Arc, EnhancedGraph, NodeId, ROOT, extract_graph
from edparse.errors import GraphError
from edparse.graph import graph_equal_modulo_null_ids

W = NodeId.word
N = NodeId.null


class TestNodeId:
    def test_conllu_order(self):
        ordered = [ROOT, N(0, 1), W(1), N(1, 1), N(1, 2), W(2), N(2, 1), W(3)]
        assert ordered == sorted(ordered)

    def test_kinds(self):
        assert ROOT.is_root and not ROOT.is_word and not ROOT.is_null
        assert W(3).is_word and not W(3).is_null
        assert N(3, 1).is_null and not N(3, 1).is_word

    def test_str_and_parse_roundtrip(self):
        for node in (ROOT, W(12), N(12, 1), N(0, 2)):
            assert NodeId.parse(str(node)) == node

    def test_parse_rejects_junk(self):
        for bad in ("", "1.0", "01", "1.01", "-1", "x", "1-2"):
            with pytest.raises(GraphError):
                NodeId.parse(bad)

    @given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 4)), min_size=2))
    def test_strict_total_order(self, raw):
        nodes = [NodeId(i, s) for i, s in raw]
        for a, b in itertools.combinations(nodes, 2):
            assert (a < b) + (a == b) + (b < a) == 1


class TestConstruction:
    def test_root_always_present(self):
        assert ROOT in EnhancedGraph().nodes

    def test_rejects_duplicate_triples(self):
        with pytest.raises(GraphError, match="duplicate"):
            EnhancedGraph([W(1)], [Arc(ROOT, W(1), "root"), Arc(ROOT, W(1), "root")])

    def test_rejects_root_as_dependent(self):
        with pytest.raises(GraphError, match="root"):
            EnhancedGraph([W(1)], [Arc(W(1), ROOT, "x")])

    def test_rejects_self_loop(self):
        with pytest.raises(GraphError, match="self-loop"):
            EnhancedGraph([W(1)], [Arc(W(1), W(1), "x")])

    def test_allows_cycles_and_multiple_heads(self):
        g = EnhancedGraph(
            [W(1), W(2)],
            [Arc(ROOT, W(1), "root"), Arc(W(1), W(2), "a"),
             Arc(W(2), W(1), "b"), Arc(ROOT, W(2), "c")],
        )
        assert len(g.arcs) == 4
        assert g.head_count(W(1)) == 2

    def test_deterministic_arc_order(self):
        arcs = [Arc(W(2), W(1), "b"), Arc(ROOT, W(1), "root"), Arc(ROOT, W(2), "a")]
        g = EnhancedGraph([W(1), W(2)], arcs)
        assert list(g.arcs) == sorted(arcs)


class TestAdjacency:
    def test_control_verb_heads(self, english_sentence):
        # "We" has three governors: passive subject of "made" plus the
        # propagated external subjects of both "feel" and "welcome"
        g = extract_graph(english_sentence)
        assert g.heads_of(W(1)) == {
            (W(3), "nsubj:pass"), (W(5), "nsubj:xsubj"), (W(7), "nsubj:xsubj"),
        }

    def test_root_never_a_dependent(self, english_sentence, dutch_sentence):
        for sent in (english_sentence, dutch_sentence):
            assert extract_graph(sent).heads_of(ROOT) == set()

    def test_null_dependents(self, dutch_sentence):
        g = extract_graph(dutch_sentence)
        null = N(11, 1)
        assert {(W(11), "cc"), (W(12), "det"), (W(15), "acl:relcl")} <= g.dependents_of(null)

    def test_unknown_node(self):
        with pytest.raises(GraphError, match="unknown node"):
            EnhancedGraph().heads_of(W(1))


class TestReachability:
    def test_all_words_reachable_in_gold(self, english_sentence):
        g = extract_graph(english_sentence)
        assert g.reachable_from(ROOT) == set(g.words)

    def test_empty_graph(self):
        assert EnhancedGraph().reachable_from(ROOT) == set()

    def test_detached_cycle_closure(self):
        a, b = W(1), W(2)
        g = EnhancedGraph([a, b], [Arc(a, b, "x"), Arc(b, a, "x")])
        assert g.reachable_from(a) == {a, b}
        assert not g.is_connected()

    def test_connected_fixtures(self, english_sentence, dutch_sentence):
        assert extract_graph(english_sentence).is_connected()
        assert extract_graph(dutch_sentence).is_connected()

    def test_root_only_graph_is_connected(self):
        assert EnhancedGraph().is_connected()

    def test_connectivity_iff_count(self, dutch_sentence):
        g = extract_graph(dutch_sentence)
        assert g.is_connected() == (len(g.reachable_from(ROOT)) == len(g.nodes) - 1)

    def test_arc_insertion_monotone(self, dutch_sentence):
        g = extract_graph(dutch_sentence)
        before = g.reachable_from(ROOT)
        bigger = g.with_arcs([Arc(W(3), W(17), "extra")])
        assert before <= bigger.reachable_from(ROOT)


def _brute_force_equal(g1, g2):
    """Independent oracle: try every null bijection."""
    nulls1, nulls2 = list(g1.nulls), list(g2.nulls)
    if len(nulls1) != len(nulls2):
        return False
    for perm in itertools.permutations(nulls2):
        mapping = dict(zip(nulls1, perm))

        def m(n):
            return mapping.get(n, n)

        relabeled = {Arc(m(a.head), m(a.dep), a.label) for a in g1.arcs}
        if relabeled == set(g2.arcs) and {m(n) for n in g1.nodes} == set(g2.nodes):
            return True
    return False


class TestNullBlindEquality:
    def test_renamed_null(self, dutch_sentence):
        g = extract_graph(dutch_sentence)
        renamed = g.relabel_nulls({N(11, 1): N(7, 1)})
        assert graph_equal_modulo_null_ids(g, renamed)
        assert g != renamed

    def test_missing_arc_detected(self, dutch_sentence):
        g = extract_graph(dutch_sentence)
        pruned = EnhancedGraph(g.nodes, [a for a in g.arcs
                                         if a != Arc(N(11, 1), W(11), "cc")])
        assert not graph_equal_modulo_null_ids(g, pruned)

    def test_identical_signature_nulls_swap(self):
        # two nulls with exactly the same neighborhoods, swapped
        def build(first, second):
            return EnhancedGraph(
                [W(1), W(2), W(3), first, second],
                [Arc(ROOT, W(1), "root"), Arc(W(1), first, "conj"),
                 Arc(W(1), second, "conj"), Arc(first, W(2), "det"),
                 Arc(second, W(3), "det")],
            )

        g1 = build(N(1, 1), N(1, 2))
        g2 = build(N(1, 2), N(1, 1))
        assert _brute_force_equal(g1, g2)
        assert graph_equal_modulo_null_ids(g1, g2)

    def test_null_chain_mismatch(self):
        g1 = EnhancedGraph(
            [W(1), N(1, 1), N(1, 2)],
            [Arc(ROOT, W(1), "root"), Arc(W(1), N(1, 1), "a"),
             Arc(N(1, 1), N(1, 2), "b"), Arc(N(1, 2), W(1), "c")],
        )
        g2 = EnhancedGraph(
            [W(1), N(1, 1), N(1, 2)],
            [Arc(ROOT, W(1), "root"), Arc(W(1), N(1, 2), "a"),
             Arc(N(1, 2), N(1, 1), "c"), Arc(N(1, 1), W(1), "b")],
        )
        assert graph_equal_modulo_null_ids(g1, g2) == _brute_force_equal(g1, g2)


@st.composite
def small_graphs(draw):
    n_words = draw(st.integers(1, 3))
    n_nulls = draw(st.integers(0, 2))
    nodes = [W(i) for i in range(1, n_words + 1)]
    nodes += [N(1, s) for s in range(1, n_nulls + 1)]
    labels = ["x", "y"]
    arcs = []
    pool = [
        Arc(h, d, l)
        for h in [ROOT] + nodes
        for d in nodes
        if h != d
        for l in labels
    ]
    chosen = draw(st.lists(st.sampled_from(pool), max_size=6, unique=True))
    seen = set()
    for a in chosen:
        if a not in seen:
            seen.add(a)
            arcs.append(a)
    return EnhancedGraph(nodes, arcs)


class TestEqualityIsEquivalence:
    @settings(max_examples=150, deadline=None)
    @given(small_graphs())
    def test_reflexive(self, g):
        assert graph_equal_modulo_null_ids(g, g)

    @settings(max_examples=150, deadline=None)
    @given(small_graphs(), small_graphs())
    def test_symmetric_and_matches_brute_force(self, g1, g2):
        lhs = graph_equal_modulo_null_ids(g1, g2)
        assert lhs == graph_equal_modulo_null_ids(g2, g1)
        assert lhs == _brute_force_equal(g1, g2)

    @settings(max_examples=100, deadline=None)
    @given(small_graphs(), small_graphs(), small_graphs())
    def test_transitive(self, a, b, c):
        if graph_equal_modulo_null_ids(a, b) and graph_equal_modulo_null_ids(b, c):
            assert graph_equal_modulo_null_ids(a, c)
