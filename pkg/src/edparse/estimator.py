"""Scikit-learn style facade over the training and parsing pipeline."""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .conllu import Document
from .features import DEFAULT_DIM
from .metrics import elas
from .model import train
from .oracle import DEFAULT_BUDGET_MULT
from .parser import ModelPolicy, parse_sentence, parsed_sentence
from .transitions import ConstraintParams
from .validation import check_has_gold, ensure_document


class EnhancedDependencyParser(BaseEstimator):
    """Greedy transition parser for enhanced dependency graphs.

    ``fit`` imitates the static oracle on a gold treebank with an averaged
    perceptron; ``predict`` parses tokenized sentences into connected
    enhanced graphs, returning new Sentence objects with DEPS (and any
    predicted null-node rows) filled in.

    Parameters
    ----------
    epochs : training passes over the treebank.
    seed : RNG seed for per-epoch shuffling; fixes the model bytes.
    feature_dim : hashed feature space size (power of two).
    max_heads : per-node head limit enforced by the transition system.
    max_nulls_per_word : null-node budget as a fraction of the word count.
    budget_mult : transition budget per sentence, in multiples of its length.
    """

    def __init__(self, epochs: int = 10, seed: int = 0,
                 feature_dim: int = DEFAULT_DIM, max_heads: int = 7,
                 max_nulls_per_word: float = 1.0,
                 budget_mult: int = DEFAULT_BUDGET_MULT):
        self.epochs = epochs
        self.seed = seed
        self.feature_dim = feature_dim
        self.max_heads = max_heads
        self.max_nulls_per_word = max_nulls_per_word
        self.budget_mult = budget_mult

    def _params(self) -> ConstraintParams:
        return ConstraintParams(self.max_heads, self.max_nulls_per_word)

    def fit(self, X, y=None):
        doc = ensure_document(X)
        check_has_gold(doc)
        result = train(
            doc, epochs=self.epochs, seed=self.seed, params=self._params(),
            feature_dim=self.feature_dim, budget_mult=self.budget_mult,
        )
        self.model_ = result.model
        self.training_epochs_ = result.epochs
        self.dropped_sentences_ = result.dropped
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError(
                "this EnhancedDependencyParser instance is not fitted yet"
            )

    def predict(self, X) -> Document:
        self._check_fitted()
        doc = ensure_document(X)
        params = self._params()
        out = []
        for sent in doc:
            result = parse_sentence(
                sent, ModelPolicy(self.model_, sent), params, self.budget_mult
            )
            out.append(parsed_sentence(sent, result))
        return out

    def score(self, X, y=None) -> float:
        """Enhanced attachment F1 of ``predict(X)`` against X's own DEPS."""
        doc = ensure_document(X)
        return elas(doc, self.predict(doc)).f1
