"""Averaged-perceptron transition classifier with hashed features.

The model maps hashed feature ids to one weight per transition.  Training
imitates the static oracle: at each oracle step, if the current argmax over
the legal transitions differs from the oracle's choice, the oracle row is
promoted and the argmax row demoted.  Weights are averaged over all update
steps, which is what makes the tiny model usable at all.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .conllu import Document, Sentence, extract_graph
from .errors import ModelFormatError
from .features import DEFAULT_DIM, FeatureExtractor
from .oracle import DEFAULT_BUDGET_MULT, derive
from . import transitions as tr
from .transitions import ConstraintParams, Transition

_MAGIC = "edparse-linear-model"
_VERSION = 1


class LinearModel:
    """Sparse linear scorer over transitions."""

    def __init__(self, transitions: list[Transition], feature_dim: int = DEFAULT_DIM):
        if not transitions:
            raise ValueError("a model needs at least one transition")
        self.transitions = list(transitions)
        self.index = {t: i for i, t in enumerate(self.transitions)}
        self.feature_dim = feature_dim
        self.weights: dict[int, np.ndarray] = {}

    @property
    def edge_labels(self) -> list[str]:
        labels = {t.label for t in self.transitions if t.is_edge}
        return sorted(labels)

    def scores(self, feats: tuple[int, ...]) -> np.ndarray:
        total = np.zeros(len(self.transitions))
        for f in feats:
            row = self.weights.get(f)
            if row is not None:
                total += row
        return total

    def choose(self, feats: tuple[int, ...], legal: list[Transition]) -> Transition:
        """Highest-scoring legal transition; ties break on canonical order."""
        scores = self.scores(feats)
        best = None
        best_score = None
        for t in legal:
            i = self.index.get(t)
            if i is None:
                continue
            if best_score is None or scores[i] > best_score:
                best, best_score = t, scores[i]
        if best is None:
            # every legal transition is outside the learned inventory
            return legal[0]
        return best

    # -- persistence --------------------------------------------------------

    def save(self, path: str) -> None:
        """Line-based text format: header, transition list, sparse rows."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{_MAGIC} v{_VERSION}\n")
            fh.write(f"dim\t{self.feature_dim}\n")
            fh.write(f"transitions\t{len(self.transitions)}\n")
            for t in self.transitions:
                fh.write(f"t\t{t.encode()}\n")
            for fid in sorted(self.weights):
                row = self.weights[fid]
                cells = " ".join(
                    # repr of a Python float round-trips exactly
                    f"{i}:{float(row[i])!r}" for i in np.flatnonzero(row)
                )
                if cells:
                    fh.write(f"w\t{fid}\t{cells}\n")

    @classmethod
    def load(cls, path: str) -> "LinearModel":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if header != f"{_MAGIC} v{_VERSION}":
                raise ModelFormatError(f"unrecognized model header {header!r}")
            dim = n_trans = None
            transitions: list[Transition] = []
            weights: dict[int, np.ndarray] = {}
            for line in fh:
                kind, _, rest = line.rstrip("\n").partition("\t")
                if kind == "dim":
                    dim = int(rest)
                elif kind == "transitions":
                    n_trans = int(rest)
                elif kind == "t":
                    transitions.append(Transition.decode(rest))
                elif kind == "w":
                    fid_text, _, cells = rest.partition("\t")
                    row = np.zeros(len(transitions))
                    for cell in cells.split():
                        i, _, v = cell.partition(":")
                        row[int(i)] = float(v)
                    weights[int(fid_text)] = row
                else:
                    raise ModelFormatError(f"unrecognized record {kind!r}")
        if dim is None or n_trans is None or len(transitions) != n_trans:
            raise ModelFormatError("incomplete model header")
        model = cls(transitions, dim)
        model.weights = weights
        return model


@dataclass
class EpochStats:
    epoch: int
    steps: int
    correct: int
    dropped_sentences: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.steps if self.steps else 0.0


@dataclass
class TrainResult:
    model: LinearModel
    epochs: list[EpochStats] = field(default_factory=list)
    dropped: list[str] = field(default_factory=list)

    @property
    def final_accuracy(self) -> float:
        return self.epochs[-1].accuracy if self.epochs else 0.0


def transition_inventory(doc: Document) -> list[Transition]:
    """Canonical transition list induced by a treebank's edge labels."""
    labels = set()
    for sent in doc:
        for t in sent.tokens:
            labels.update(label for _, label in t.deps)
    out = [tr.SHIFT, tr.REDUCE0, tr.REDUCE1, tr.NODE, tr.SWAP, tr.FINISH]
    for label in sorted(labels):
        out.append(tr.left_edge(label))
        out.append(tr.right_edge(label))
    return out


def _oracle_steps(sent: Sentence, params: ConstraintParams,
                  budget_mult: int, dim: int,
                  labels: list[str]) -> list[tuple[tuple[int, ...], Transition, list[Transition]]] | None:
    """Featurized oracle steps for one sentence; None when not derivable."""
    gold = extract_graph(sent)
    run = derive(gold, sent.word_count, params, budget_mult)
    if not run.derivable:
        return None
    extractor = FeatureExtractor(sent, dim)
    steps = []
    c = tr.initial(sent.word_count)
    for step in run.steps:
        legal = tr.legal_transitions(c, params, labels)
        steps.append((extractor.features(c), step.transition, legal))
        c = tr.apply(c, step.transition, params)
    return steps


def train(doc: Document, epochs: int = 10, seed: int = 0,
          params: ConstraintParams = tr.DEFAULT_PARAMS,
          feature_dim: int = DEFAULT_DIM,
          budget_mult: int = DEFAULT_BUDGET_MULT,
          log=None) -> TrainResult:
    """Imitation training over oracle transitions.

    Sentences the oracle cannot derive are dropped (and reported); the
    remaining ones are shuffled each epoch with a seeded RNG, so identical
    inputs and seed give byte-identical models.
    """
    if not doc:
        raise ValueError("cannot train on an empty treebank")
    inventory = transition_inventory(doc)
    model = LinearModel(inventory, feature_dim)
    labels = model.edge_labels
    cached = []
    dropped = []
    for i, sent in enumerate(doc):
        steps = _oracle_steps(sent, params, budget_mult, feature_dim, labels)
        if steps is None:
            dropped.append(sent.sent_id or f"sentence {i + 1}")
        else:
            cached.append(steps)
    if not cached:
        raise ValueError("no derivable sentences in the treebank")

    n_t = len(inventory)
    weights: dict[int, np.ndarray] = {}
    totals: dict[int, np.ndarray] = {}
    stamps: dict[int, int] = {}
    model.weights = weights  # live view during training
    rng = random.Random(seed)
    order = list(range(len(cached)))
    result = TrainResult(model, dropped=dropped)
    now = 0

    def bump(fid: int, idx: int, delta: float) -> None:
        row = weights.get(fid)
        if row is None:
            row = np.zeros(n_t)
            weights[fid] = row
            totals[fid] = np.zeros(n_t)
            stamps[fid] = now
        else:
            totals[fid] += row * (now - stamps[fid])
            stamps[fid] = now
        row[idx] += delta

    for epoch in range(1, epochs + 1):
        rng.shuffle(order)
        stats = EpochStats(epoch, 0, 0, len(dropped))
        for si in order:
            for feats, gold_t, legal in cached[si]:
                now += 1
                guess = model.choose(feats, legal)
                stats.steps += 1
                if guess == gold_t:
                    stats.correct += 1
                else:
                    gi, wi = model.index[gold_t], model.index[guess]
                    for fid in feats:
                        bump(fid, gi, 1.0)
                        bump(fid, wi, -1.0)
        result.epochs.append(stats)
        if log is not None:
            log(f"epoch={epoch} steps={stats.steps} accuracy={stats.accuracy:.4f}")

    # finalize averaging
    if now:
        averaged: dict[int, np.ndarray] = {}
        for fid, row in weights.items():
            totals[fid] += row * (now - stamps[fid])
            avg = totals[fid] / now
            if np.any(avg):
                averaged[fid] = avg
        model.weights = averaged
    return result
