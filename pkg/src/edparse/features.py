"""Deterministic hashed features over parser configurations.

Features are strings hashed with 64-bit FNV-1a into a power-of-two space,
so no vocabulary files are needed and runs are reproducible regardless of
interpreter hash randomization.
"""

from __future__ import annotations

from .conllu import Sentence
from .graph import ROOT, NodeId
from .transitions import Configuration

DEFAULT_DIM = 1 << 20

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a64(text: str) -> int:
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


_ROOT_FORM = "<root>"
_NULL_FORM = "<null>"
_NONE_FORM = "<none>"


class FeatureExtractor:
    """Caches per-sentence token lookups; one instance per sentence."""

    def __init__(self, sent: Sentence, dim: int = DEFAULT_DIM):
        if dim & (dim - 1):
            raise ValueError("feature dimension must be a power of two")
        self.dim = dim
        self._forms: dict[NodeId, str] = {ROOT: _ROOT_FORM}
        self._upos: dict[NodeId, str] = {ROOT: _ROOT_FORM}
        for t in sent.tokens:
            if t.id is not None:
                self._forms[t.id] = t.form
                self._upos[t.id] = t.upos

    def _form(self, node: NodeId | None) -> str:
        if node is None:
            return _NONE_FORM
        if node.is_null:
            return _NULL_FORM
        return self._forms.get(node, _NONE_FORM)

    def _pos(self, node: NodeId | None) -> str:
        if node is None:
            return _NONE_FORM
        if node.is_null:
            return _NULL_FORM
        return self._upos.get(node, _NONE_FORM)

    def features(self, c: Configuration) -> tuple[int, ...]:
        """Sorted hashed feature indices for a configuration."""
        stack, buffer = c.stack, c.buffer
        s0 = stack[-1] if stack else None
        s1 = stack[-2] if len(stack) >= 2 else None
        s2 = stack[-3] if len(stack) >= 3 else None
        b0 = buffer[0] if buffer else None
        b1 = buffer[1] if len(buffer) >= 2 else None

        s0w, s1w, b0w = self._form(s0), self._form(s1), self._form(b0)
        s0p, s1p, b0p = self._pos(s0), self._pos(s1), self._pos(b0)

        feats = [
            "bias",
            "s0w=" + s0w, "s0p=" + s0p,
            "s1w=" + s1w, "s1p=" + s1p,
            "s2w=" + self._form(s2), "s2p=" + self._pos(s2),
            "b0w=" + b0w, "b0p=" + b0p,
            "b1w=" + self._form(b1), "b1p=" + self._pos(b1),
            f"s0null={int(s0 is not None and s0.is_null)}",
            f"s1null={int(s1 is not None and s1.is_null)}",
            f"b0null={int(b0 is not None and b0.is_null)}",
            f"s0nh={min(c.head_count.get(s0, 0), 7) if s0 else -1}",
            f"s1nh={min(c.head_count.get(s1, 0), 7) if s1 else -1}",
            "blen=" + _bucket(len(buffer)),
            "slen=" + _bucket(len(stack)),
            "ratio=" + _ratio_bucket(c.null_count, c.word_count),
            # pairwise conjunctions
            "s0p|s1p=" + s0p + "|" + s1p,
            "s0w|s1w=" + s0w + "|" + s1w,
            "s0w|s1p=" + s0w + "|" + s1p,
            "s0p|s1w=" + s0p + "|" + s1w,
            "s0p|b0p=" + s0p + "|" + b0p,
            "s1p|b0p=" + s1p + "|" + b0p,
            "s0p|s1p|b0p=" + s0p + "|" + s1p + "|" + b0p,
        ]
        if s0 is not None and s1 is not None:
            for label in sorted(l for d, l in _arcs_between(c, s0, s1)):
                feats.append("a(s0,s1)=" + label)
            for label in sorted(l for d, l in _arcs_between(c, s1, s0)):
                feats.append("a(s1,s0)=" + label)
        mask = self.dim - 1
        return tuple(sorted({fnv1a64(f) & mask for f in feats}))


def _arcs_between(c: Configuration, head: NodeId, dep: NodeId):
    for arc in c.arcs:
        if arc.head == head and arc.dep == dep:
            yield arc.dep, arc.label


def _bucket(n: int) -> str:
    if n <= 4:
        return str(n)
    if n <= 8:
        return "5-8"
    if n <= 16:
        return "9-16"
    return "17+"


def _ratio_bucket(nulls: int, words: int) -> str:
    if nulls == 0:
        return "0"
    r = nulls / words
    for cap in (0.25, 0.5, 0.75, 1.0):
        if r <= cap:
            return f"<={cap}"
    return ">1"


def featurize(c: Configuration, sent: Sentence, dim: int = DEFAULT_DIM) -> tuple[int, ...]:
    """One-shot feature extraction; prefer FeatureExtractor in loops."""
    return FeatureExtractor(sent, dim).features(c)
