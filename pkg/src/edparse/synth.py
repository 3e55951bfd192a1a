"""Synthetic gold treebanks for tests and benchmarks.

Sentences start from a random projective tree; the enhanced layer then adds
the structures the transition system exists for: extra heads (conjunct
propagation style), length-2 cycles, and null nodes with their own
dependents, occasionally chained.  Elided tree arcs under a null are
dropped half the time, so gold graphs are not always supersets of the tree.

Every emitted sentence is checked to be derivable by the static oracle;
candidates that are not (a small minority) are resampled, so the generator
is safe to use for round-trip suites.
"""

from __future__ import annotations

import random

from .conllu import Document, Sentence, Token, extract_graph
from .graph import ROOT, NodeId
from .oracle import derive

_TAGS = ("NOUN", "VERB", "ADJ", "DET", "ADP", "ADV", "PRON", "PROPN", "CCONJ")
_LABEL_BY_TAG = {
    "NOUN": ("nsubj", "obj", "nmod", "obl"),
    "PROPN": ("nsubj", "nmod", "obl"),
    "PRON": ("nsubj", "obj"),
    "VERB": ("xcomp", "advcl", "conj", "ccomp"),
    "ADJ": ("amod",),
    "DET": ("det",),
    "ADP": ("case",),
    "ADV": ("advmod",),
    "CCONJ": ("cc",),
}
_EXTRA_SUFFIXES = ("conj:en", "nmod:van", "obl:aan", "nsubj:xsubj")
_NULL_HEAD_LABEL = "conj:en"
_NULL_DEP_LABELS = ("det", "nmod", "ref", "acl:relcl", "cc")
_MAX_HEADS = 7


def _projective_tree(rng: random.Random, n: int) -> list[int]:
    heads = [0] * (n + 1)

    def build(lo: int, hi: int, parent: int) -> None:
        h = rng.randint(lo, hi)
        heads[h] = parent
        partition(lo, h - 1, h)
        partition(h + 1, hi, h)

    def partition(lo: int, hi: int, parent: int) -> None:
        while lo <= hi:
            cut = rng.randint(lo, hi)
            build(lo, cut, parent)
            lo = cut + 1

    build(1, n, 0)
    return heads


def _form(rng: random.Random, tag: str) -> str:
    k = min(rng.randrange(1, 13), rng.randrange(1, 13))  # shifted toward 1
    return f"{tag.lower()}{k}"


class _Draft:
    """Mutable arc set during generation, with head-count accounting."""

    def __init__(self, n: int):
        self.n = n
        self.arcs: set[tuple[NodeId, NodeId, str]] = set()
        self.heads: dict[NodeId, int] = {}

    def can_add(self, head: NodeId, dep: NodeId, label: str) -> bool:
        return (
            head != dep
            and not dep.is_root
            and (head, dep, label) not in self.arcs
            and self.heads.get(dep, 0) < _MAX_HEADS
        )

    def add(self, head: NodeId, dep: NodeId, label: str) -> bool:
        if not self.can_add(head, dep, label):
            return False
        self.arcs.add((head, dep, label))
        self.heads[dep] = self.heads.get(dep, 0) + 1
        return True

    def drop(self, head: NodeId, dep: NodeId, label: str) -> None:
        if (head, dep, label) in self.arcs:
            self.arcs.remove((head, dep, label))
            self.heads[dep] -= 1


def _candidate(rng: random.Random, sent_index: int,
               min_words: int, max_words: int) -> Sentence:
    n = rng.randint(min_words, max_words)
    tags = [rng.choice(_TAGS) for _ in range(n)]
    forms = [_form(rng, t) for t in tags]
    tree = _projective_tree(rng, n)
    deprel = [""] * (n + 1)
    for i in range(1, n + 1):
        deprel[i] = "root" if tree[i] == 0 else rng.choice(_LABEL_BY_TAG[tags[i - 1]])

    word = NodeId.word
    draft = _Draft(n)
    for i in range(1, n + 1):
        draft.add(NodeId(tree[i], 0), word(i), deprel[i])

    # extra heads: a second governor for one or two words
    if n >= 4 and rng.random() < 0.6:
        for _ in range(rng.randint(1, 2)):
            d = rng.randint(1, n)
            h = rng.randint(1, n)
            label = rng.choice(_EXTRA_SUFFIXES)
            draft.add(word(h), word(d), label)

    # a mutual pair, as relative clauses produce
    if n >= 3 and rng.random() < 0.35:
        candidates = [(h, d) for h, d, _ in draft.arcs if h.is_word and d.is_word]
        if candidates:
            h, d = rng.choice(candidates)
            draft.add(d, h, "nsubj:relsubj")

    # null nodes for elided material
    nulls: list[tuple[int, NodeId]] = []
    if rng.random() < 0.45:
        anchor = rng.randint(1, n)
        null = NodeId(anchor, 99)  # provisional sub, renumbered below
        head = rng.randint(1, n)
        if draft.add(word(head), null, _NULL_HEAD_LABEL):
            nulls.append((anchor, null))
            n_deps = rng.randint(1, min(3, n))
            for d in rng.sample(range(1, n + 1), n_deps):
                if d == head:
                    continue
                label = rng.choice(_NULL_DEP_LABELS)
                if draft.add(null, word(d), label) and rng.random() < 0.5:
                    # elide the tree arc the null now covers, unless that
                    # would orphan the word
                    if draft.heads.get(word(d), 0) > 1:
                        draft.drop(NodeId(tree[d], 0), word(d), deprel[d])
            if rng.random() < 0.2:
                anchor2 = rng.randint(1, n)
                null2 = NodeId(anchor2, 98)
                if draft.add(null, null2, "conj"):
                    nulls.append((anchor2, null2))
                    d = rng.randint(1, n)
                    draft.add(null2, word(d), rng.choice(_NULL_DEP_LABELS))

    # renumber provisional null ids per anchor
    mapping: dict[NodeId, NodeId] = {}
    counters: dict[int, int] = {}
    for anchor, null in sorted(nulls):
        sub = counters.get(anchor, 0) + 1
        counters[anchor] = sub
        mapping[null] = NodeId(anchor, sub)
    arcs = sorted(
        (mapping.get(h, h), mapping.get(d, d), l) for h, d, l in draft.arcs
    )

    deps_of: dict[NodeId, list[tuple[NodeId, str]]] = {}
    for h, d, l in arcs:
        deps_of.setdefault(d, []).append((h, l))

    null_ids = sorted(mapping.values())
    tokens: list[Token] = []
    for i in range(1, n + 1):
        tokens.append(Token(
            id=word(i), form=forms[i - 1], lemma=forms[i - 1], upos=tags[i - 1],
            head=NodeId(tree[i], 0), deprel=deprel[i],
            deps=tuple(sorted(deps_of.get(word(i), ()))),
        ))
        tokens.extend(
            Token(id=nid, form="_", deps=tuple(sorted(deps_of.get(nid, ()))))
            for nid in null_ids if nid.index == i
        )
    meta = (
        f"# sent_id = synth-{sent_index}",
        "# text = " + " ".join(forms),
    )
    return Sentence(meta, tuple(tokens))


def synthesize_treebank(n_sentences: int, seed: int = 0, min_words: int = 3,
                        max_words: int = 12) -> Document:
    """Generate oracle-derivable gold sentences; deterministic per seed."""
    rng = random.Random(seed)
    doc: Document = []
    attempts = 0
    while len(doc) < n_sentences:
        attempts += 1
        if attempts > 50 * n_sentences:
            raise RuntimeError("generator rejection rate unexpectedly high")
        sent = _candidate(rng, len(doc) + 1, min_words, max_words)
        gold = extract_graph(sent)
        if not gold.is_connected():
            continue
        if any(not gold.heads_of(x) for x in gold.nodes if x != ROOT):
            continue
        if not derive(gold, sent.word_count).derivable:
            continue
        doc.append(sent)
    return doc
