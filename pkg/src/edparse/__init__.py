"""Transition-based parsing toolkit for enhanced dependency graphs.

The package reads CoNLL-U treebanks with enhanced dependencies (including
empty nodes), derives oracle transition sequences for gold graphs, learns
and executes transition policies, repairs disconnected outputs and scores
predictions with an enhanced labeled attachment metric.
"""

from .conllu import (
    Document,
    Sentence,
    Token,
    extract_graph,
    inject_graph,
    parse_conllu,
    serialize_conllu,
    strip_enhancements,
)
from .errors import (
    AlignmentError,
    ConlluError,
    EdparseError,
    GraphError,
    IllegalTransition,
    ModelFormatError,
    OracleDeadEnd,
)
from .graph import ROOT, Arc, EnhancedGraph, NodeId, graph_equal_modulo_null_ids
from .metrics import Score, collapse_nulls, elas, per_label_report
from .model import LinearModel, TrainResult, train
from .oracle import OracleRun, StaticOracle, TraceStep, derive, oracle_sequence
from .parser import (
    AllShiftPolicy,
    ModelPolicy,
    OraclePolicy,
    ParseResult,
    copy_tree_baseline,
    label_inventory,
    parse_sentence,
    parsed_sentence,
)
from .repair import RepairReport, Violation, repair, validate
from .synth import synthesize_treebank
from .transitions import (
    Configuration,
    ConstraintParams,
    Kind,
    Transition,
    apply,
    forced_finish,
    initial,
    legal,
    legal_transitions,
)

__version__ = "0.1.0"


def __getattr__(name):
    # keep scikit-learn out of the import path unless the estimator is used
    if name == "EnhancedDependencyParser":
        from .estimator import EnhancedDependencyParser

        return EnhancedDependencyParser
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
