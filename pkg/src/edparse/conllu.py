"""CoNLL-U reading and writing with enhanced dependencies and empty nodes.

Rows round-trip byte-identically with one exception: the DEPS column is
normalized to be sorted by head id, then label.  A DEPS entry ``h:l``
splits at the first colon after the head id, so ``12.1:conj:en`` is head
``12.1`` with the atomic label ``conj:en``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterable, TextIO

from .errors import ConlluError
from .graph import ROOT, Arc, EnhancedGraph, NodeId

Document = list["Sentence"]

_SPAN_RE = re.compile(r"([1-9][0-9]*)-([1-9][0-9]*)$")
_DEPS_ITEM_RE = re.compile(r"([0-9]+(?:\.[0-9]+)?):(.+)$", re.S)


@dataclass(frozen=True)
class Token:
    """One CoNLL-U row: a word, an empty node, or a multiword-token range.

    Range rows have ``span`` set and ``id`` None; they are surface sugar and
    never graph nodes.  Empty-node rows carry ``_`` in HEAD and DEPREL.
    """

    id: NodeId | None
    form: str
    lemma: str = "_"
    upos: str = "_"
    xpos: str = "_"
    feats: str = "_"
    head: NodeId | None = None
    deprel: str = "_"
    deps: tuple[tuple[NodeId, str], ...] = ()
    misc: str = "_"
    span: tuple[int, int] | None = None

    @property
    def is_word(self) -> bool:
        return self.id is not None and self.id.is_word

    @property
    def is_null(self) -> bool:
        return self.id is not None and self.id.is_null

    @property
    def is_range(self) -> bool:
        return self.span is not None


@dataclass(frozen=True)
class Sentence:
    """A sentence block: verbatim comment lines plus token rows."""

    metadata: tuple[str, ...] = ()
    tokens: tuple[Token, ...] = ()

    @property
    def sent_id(self) -> str | None:
        for line in self.metadata:
            if line.startswith("# sent_id"):
                _, _, value = line.partition("=")
                return value.strip()
        return None

    @property
    def words(self) -> tuple[Token, ...]:
        return tuple(t for t in self.tokens if t.is_word)

    @property
    def nulls(self) -> tuple[Token, ...]:
        return tuple(t for t in self.tokens if t.is_null)

    @property
    def word_count(self) -> int:
        return sum(1 for t in self.tokens if t.is_word)

    def token(self, node: NodeId) -> Token | None:
        for t in self.tokens:
            if t.id == node:
                return t
        return None

    def node_ids(self) -> set[NodeId]:
        return {t.id for t in self.tokens if t.id is not None}


def _parse_deps(cell: str, known: set[NodeId] | None, line: int) -> tuple:
    if cell == "_":
        return ()
    pairs = []
    for item in cell.split("|"):
        m = _DEPS_ITEM_RE.match(item)
        if m is None:
            raise ConlluError(f"malformed DEPS entry {item!r}", line)
        try:
            head = NodeId.parse(m.group(1))
        except Exception:
            raise ConlluError(f"malformed DEPS head in {item!r}", line) from None
        if known is not None and head != ROOT and head not in known:
            raise ConlluError(f"DEPS references nonexistent node {head}", line)
        pairs.append((head, m.group(2)))
    return tuple(sorted(pairs))


def _parse_token(line: str, lineno: int) -> Token:
    cols = line.split("\t")
    if len(cols) != 10:
        raise ConlluError(f"expected 10 columns, got {len(cols)}", lineno)
    id_cell, form, lemma, upos, xpos, feats, head_cell, deprel, deps_cell, misc = cols
    span_m = _SPAN_RE.match(id_cell)
    if span_m:
        if head_cell != "_" or deprel != "_" or deps_cell != "_":
            raise ConlluError("range rows must have _ in HEAD, DEPREL and DEPS", lineno)
        return Token(
            id=None, form=form, lemma=lemma, upos=upos, xpos=xpos, feats=feats,
            deps=(), misc=misc, span=(int(span_m.group(1)), int(span_m.group(2))),
        )
    try:
        node = NodeId.parse(id_cell)
    except Exception:
        raise ConlluError(f"malformed token id {id_cell!r}", lineno) from None
    if node == ROOT:
        raise ConlluError("token id 0 is reserved for the root", lineno)
    if node.is_null and (head_cell != "_" or deprel != "_"):
        raise ConlluError("empty-node rows must have _ in HEAD and DEPREL", lineno)
    head = None
    if head_cell != "_":
        try:
            head = NodeId.parse(head_cell)
        except Exception:
            raise ConlluError(f"malformed HEAD {head_cell!r}", lineno) from None
        if head.is_null:
            raise ConlluError(f"HEAD must be a word id or 0, got {head_cell!r}", lineno)
    # DEPS references are checked once the whole sentence is known.
    deps = _parse_deps(deps_cell, None, lineno)
    return Token(
        id=node, form=form, lemma=lemma, upos=upos, xpos=xpos, feats=feats,
        head=head, deprel=deprel, deps=deps, misc=misc,
    )


def _validate_sentence(sent: Sentence, first_line: int) -> None:
    word_ids = [t.id.index for t in sent.tokens if t.is_word]
    if word_ids != list(range(1, len(word_ids) + 1)):
        raise ConlluError(
            f"word ids are not consecutive from 1: {word_ids}", first_line
        )
    n = len(word_ids)
    subs: dict[int, int] = {}
    words_seen = 0
    for t in sent.tokens:
        if t.is_word:
            words_seen += 1
        elif t.is_range:
            lo, hi = t.span
            if lo != words_seen + 1 or hi < lo or hi > n:
                raise ConlluError(f"range row {lo}-{hi} out of place", first_line)
        elif t.is_null:
            anchor, sub = t.id
            if anchor != words_seen:
                raise ConlluError(
                    f"empty node {t.id} must directly follow word {anchor}", first_line
                )
            expected = subs.get(anchor, 0) + 1
            if sub != expected:
                raise ConlluError(
                    f"empty node {t.id} breaks per-anchor numbering (expected {anchor}.{expected})",
                    first_line,
                )
            subs[anchor] = sub
    known = sent.node_ids()
    for t in sent.tokens:
        if t.head is not None and t.head != ROOT and t.head not in known:
            raise ConlluError(f"HEAD references nonexistent node {t.head}", first_line)
        for head, _ in t.deps:
            if head != ROOT and head not in known:
                raise ConlluError(f"DEPS references nonexistent node {head}", first_line)
        if t.id is not None and any(h == t.id for h, _ in t.deps):
            raise ConlluError(f"DEPS self-loop on node {t.id}", first_line)


def parse_conllu(source: str | TextIO | Iterable[str]) -> Document:
    """Parse CoNLL-U text into a list of sentences.

    ``source`` may be a string, an open text file, or any iterable of lines.
    """
    if isinstance(source, str):
        lines: Iterable[str] = source.splitlines()
    else:
        lines = source
    doc: Document = []
    metadata: list[str] = []
    tokens: list[Token] = []
    start_line = 1

    def flush(lineno: int) -> None:
        nonlocal metadata, tokens, start_line
        if not metadata and not tokens:
            return
        if not tokens:
            raise ConlluError("comment block without token rows", start_line)
        sent = Sentence(tuple(metadata), tuple(tokens))
        _validate_sentence(sent, start_line)
        doc.append(sent)
        metadata, tokens = [], []
        start_line = lineno + 1

    lineno = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            flush(lineno)
            continue
        if line.startswith("#"):
            if tokens:
                raise ConlluError("comment line inside a token block", lineno)
            if not metadata and not tokens:
                start_line = lineno
            metadata.append(line)
        else:
            if not metadata and not tokens:
                start_line = lineno
            tokens.append(_parse_token(line, lineno))
    flush(lineno + 1)
    return doc


def _format_deps(deps: tuple[tuple[NodeId, str], ...]) -> str:
    if not deps:
        return "_"
    return "|".join(f"{head}:{label}" for head, label in sorted(deps))


def serialize_token(t: Token) -> str:
    if t.is_range:
        id_cell = f"{t.span[0]}-{t.span[1]}"
        head_cell, deprel, deps_cell = "_", "_", "_"
    else:
        id_cell = str(t.id)
        head_cell = "_" if t.head is None else str(t.head.index)
        deprel = t.deprel
        deps_cell = _format_deps(t.deps)
    return "\t".join(
        (id_cell, t.form, t.lemma, t.upos, t.xpos, t.feats,
         head_cell, deprel, deps_cell, t.misc)
    )


def serialize_conllu(doc: Document) -> str:
    """Render sentences with LF endings and a blank line after each block."""
    blocks = []
    for sent in doc:
        lines = list(sent.metadata)
        lines.extend(serialize_token(t) for t in sent.tokens)
        blocks.append("\n".join(lines) + "\n\n")
    return "".join(blocks)


def extract_graph(sent: Sentence) -> EnhancedGraph:
    """Build the enhanced graph from the DEPS column of every node row."""
    nodes = [ROOT]
    arcs = []
    for t in sent.tokens:
        if t.is_range:
            continue
        nodes.append(t.id)
        arcs.extend(Arc(head, t.id, label) for head, label in t.deps)
    return EnhancedGraph(nodes, arcs)


def strip_enhancements(sent: Sentence) -> Sentence:
    """Drop DEPS entries and empty-node rows, keeping everything else."""
    kept = tuple(replace(t, deps=()) for t in sent.tokens if not t.is_null)
    return Sentence(sent.metadata, kept)


def inject_graph(sent: Sentence, graph: EnhancedGraph) -> Sentence:
    """Rewrite the DEPS columns of ``sent`` from ``graph``.

    Null nodes present in the graph are materialized as empty-node rows
    (rows for nulls already in the sentence are reused so their surface
    columns survive; new placeholders get ``_`` everywhere).  Null rows are
    inserted right after their anchor word, ordered by sub-index.
    """
    n = sent.word_count
    for node in graph.nodes:
        if node.is_word and node.index > n:
            raise ConlluError(f"graph references word {node} beyond sentence length {n}")
        if node.is_null and node.index > n:
            raise ConlluError(f"graph null node {node} anchored past the last word")

    deps_of: dict[NodeId, tuple] = {}
    for node in graph.nodes:
        if node == ROOT:
            continue
        deps_of[node] = tuple(sorted((h, l) for h, l in graph.heads_of(node)))

    existing_nulls = {t.id: t for t in sent.tokens if t.is_null}
    null_rows: dict[int, list[Token]] = {}
    for node in sorted(graph.nulls):
        base = existing_nulls.get(node)
        if base is None:
            base = Token(id=node, form="_")
        row = replace(base, head=None, deprel="_", deps=deps_of.get(node, ()))
        null_rows.setdefault(node.index, []).append(row)

    rows: list[Token] = []
    rows.extend(null_rows.get(0, ()))
    for t in sent.tokens:
        if t.is_null:
            continue
        if t.is_range:
            rows.append(t)
            continue
        rows.append(replace(t, deps=deps_of.get(t.id, ())))
        rows.extend(null_rows.get(t.id.index, ()))
    return Sentence(sent.metadata, tuple(rows))
