"""Input validation helpers for the estimator and metric entry points."""

from __future__ import annotations

import os
from typing import Iterable

from .conllu import Document, Sentence, parse_conllu
from .errors import EdparseError


def ensure_document(X) -> Document:
    """Coerce estimator input into a list of sentences.

    Accepts a Document (list of Sentence), a single Sentence, a path to a
    CoNLL-U file, or raw CoNLL-U text.
    """
    if isinstance(X, Sentence):
        return [X]
    if isinstance(X, str):
        if "\n" not in X and os.path.exists(X):
            with open(X, encoding="utf-8") as fh:
                return parse_conllu(fh)
        return parse_conllu(X)
    if isinstance(X, Iterable):
        doc = list(X)
        bad = [i for i, s in enumerate(doc) if not isinstance(s, Sentence)]
        if bad:
            raise EdparseError(
                f"expected Sentence objects, got {type(doc[bad[0]]).__name__} at index {bad[0]}"
            )
        return doc
    raise EdparseError(f"cannot interpret {type(X).__name__} as a document")


def check_has_gold(doc: Document) -> None:
    """Training data must carry enhanced dependencies somewhere."""
    if not any(t.deps for s in doc for t in s.tokens):
        raise EdparseError("treebank has no DEPS annotations to learn from")
