"""Command-line interface.

Subcommands: oracle, replay, train, parse, eval, validate, stats.  Every
command reads CoNLL-U from files or standard input (``-``) and writes to a
file or standard output.  Exit codes: 0 success, 1 usage or I/O error,
2 semantic failure (validation errors, underivable sentences, misaligned
documents).
"""

from __future__ import annotations

import argparse
import sys
from multiprocessing import Pool

from .conllu import (
    Document,
    parse_conllu,
    serialize_conllu,
    extract_graph,
)
from .errors import AlignmentError, ConlluError, EdparseError
from .graph import graph_equal_modulo_null_ids
from .metrics import aggregate, check_aligned, format_report, sentence_items
from .model import LinearModel, train
from .oracle import DEFAULT_BUDGET_MULT, oracle_sequence
from .parser import (
    ModelPolicy,
    OraclePolicy,
    label_inventory,
    parse_sentence,
    parsed_sentence,
)
from .repair import validate
from .transitions import ConstraintParams

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SEMANTIC = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def _read_doc(path: str) -> Document:
    if path == "-":
        return parse_conllu(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return parse_conllu(fh)


def _read_docs(paths: list[str]) -> Document:
    doc: Document = []
    for path in paths:
        doc.extend(_read_doc(path))
    return doc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _sent_label(sent, i: int) -> str:
    return sent.sent_id or str(i + 1)


def _constraints(args) -> ConstraintParams:
    return ConstraintParams(args.max_heads, args.max_nulls_per_word)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-heads", type=int, default=7,
                   help="head limit per node (default 7)")
    p.add_argument("--max-nulls-per-word", type=float, default=1.0,
                   help="null-node budget per word (default 1)")
    p.add_argument("--budget-mult", type=int, default=DEFAULT_BUDGET_MULT,
                   help="transition budget per word (default 50)")


def _trace_block(sent, i, steps) -> str:
    lines = [f"# sent_id = {_sent_label(sent, i)}"]
    lines.extend(step.encode() for step in steps)
    return "\n".join(lines) + "\n\n"


def _oracle_one(payload):
    sent, i, params, budget_mult = payload
    run = oracle_sequence(sent, params=params, budget_mult=budget_mult)
    return _trace_block(sent, i, run.steps), run.derivable, run.failure


def cmd_oracle(args) -> int:
    doc = _read_docs(args.input)
    params = _constraints(args)
    payloads = [(s, i, params, args.budget_mult) for i, s in enumerate(doc)]
    results = _map(payloads, _oracle_one, args.jobs)
    failures = []
    for (sent, i, _, _), (_, derivable, failure) in zip(payloads, results):
        if not derivable:
            failures.append((_sent_label(sent, i), failure))
    _write(args.trace, "".join(block for block, _, _ in results))
    for label, reason in failures:
        sys.stderr.write(f"{label}: not derivable: {reason}\n")
    return EXIT_SEMANTIC if failures else EXIT_OK


def _replay_one(payload):
    sent, i, params, budget_mult = payload
    gold = extract_graph(sent)
    run = oracle_sequence(sent, gold, params, budget_mult)
    if not run.derivable:
        return (_sent_label(sent, i), "SKIP", run.failure)
    ok = graph_equal_modulo_null_ids(run.graph, gold)
    return (_sent_label(sent, i), "MATCH" if ok else "MISMATCH", None)


def cmd_replay(args) -> int:
    doc = _read_docs(args.input)
    params = _constraints(args)
    payloads = [(s, i, params, args.budget_mult) for i, s in enumerate(doc)]
    results = _map(payloads, _replay_one, args.jobs)
    matched = mismatched = skipped = 0
    lines = []
    for label, verdict, reason in results:
        suffix = f"\t{reason}" if reason else ""
        lines.append(f"{label}\t{verdict}{suffix}")
        if verdict == "MATCH":
            matched += 1
        elif verdict == "MISMATCH":
            mismatched += 1
        else:
            skipped += 1
    derivable = matched + mismatched
    rate = 100.0 * matched / derivable if derivable else 100.0
    lines.append(
        f"# match rate {rate:.2f}% ({matched}/{derivable} derivable, {skipped} skipped)"
    )
    _write(args.output, "\n".join(lines) + "\n")
    return EXIT_OK if mismatched == 0 else EXIT_SEMANTIC


def cmd_train(args) -> int:
    doc = _read_docs(args.input)
    try:
        result = train(
            doc, epochs=args.epochs, seed=args.seed, params=_constraints(args),
            budget_mult=args.budget_mult,
            log=lambda line: sys.stderr.write(line + "\n"),
        )
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_SEMANTIC
    for label in result.dropped:
        sys.stderr.write(f"dropped (not derivable): {label}\n")
    result.model.save(args.model)
    sys.stderr.write(
        f"final accuracy {result.final_accuracy:.4f}; model written to {args.model}\n"
    )
    return EXIT_OK


def _parse_one(payload):
    sent, policy, params, budget_mult = payload
    result = parse_sentence(sent, policy, params, budget_mult)
    return parsed_sentence(sent, result)


def cmd_parse(args) -> int:
    doc = _read_docs(args.input)
    params = _constraints(args)
    if args.model:
        model = LinearModel.load(args.model)
        payloads = [(s, ModelPolicy(model, s), params, args.budget_mult)
                    for s in doc]
    elif args.policy == "oracle":
        gold_doc = _read_doc(args.gold) if args.gold else doc
        if len(gold_doc) != len(doc):
            raise AlignmentError(
                f"gold has {len(gold_doc)} sentences, input has {len(doc)}"
            )
        payloads = [
            (s, OraclePolicy(extract_graph(g), params), params, args.budget_mult)
            for s, g in zip(doc, gold_doc)
        ]
    else:
        sys.stderr.write("error: provide --model or --policy oracle\n")
        return EXIT_USAGE
    parsed = _map(payloads, _parse_one, args.jobs)
    _write(args.output, serialize_conllu(parsed))
    return EXIT_OK


def cmd_eval(args) -> int:
    gold = _read_doc(args.gold)
    pred = _read_doc(args.pred)
    check_aligned(gold, pred)
    item_pairs = _map(list(zip(gold, pred)), sentence_items, args.jobs)
    total, macro, per_label = aggregate(item_pairs, per_label=args.per_label)
    _write(args.output, format_report(total, macro, per_label) + "\n")
    return EXIT_OK


def cmd_validate(args) -> int:
    doc = _read_docs(args.input)
    bad = 0
    for i, sent in enumerate(doc):
        violations = validate(extract_graph(sent))
        for v in violations:
            sys.stdout.write(f"{_sent_label(sent, i)}\t{v}\n")
        bad += bool(violations)
    sys.stdout.write(f"# {len(doc) - bad}/{len(doc)} sentences valid\n")
    return EXIT_SEMANTIC if bad else EXIT_OK


def cmd_stats(args) -> int:
    doc = _read_docs(args.input)
    stats = label_inventory(doc)
    lines = [
        f"EDGE_LABELS={stats.n_labels}",
        f"WITH_SUFFIX={stats.n_suffixed}",
        f"EDGE_TRANSITIONS={2 * stats.n_labels}",
        f"OTHER_TRANSITIONS=6",
    ]
    lines.extend(f"{label}\t{stats.occurrences[label]}" for label in stats.labels)
    _write(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


def _map(payloads, fn, jobs: int):
    if jobs <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with Pool(jobs) as pool:
        return pool.map(fn, payloads, chunksize=max(1, len(payloads) // (4 * jobs)))


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="edparse",
                  description="enhanced dependency graph parsing toolkit")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oracle", help="derive gold transition traces")
    p.add_argument("--input", action="append", required=True)
    p.add_argument("--trace", default="-")
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("replay", help="oracle + executor round-trip against gold")
    p.add_argument("--input", action="append", required=True)
    p.add_argument("--output", default="-")
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("train", help="train the linear transition policy")
    p.add_argument("--input", action="append", required=True,
                   help="training treebank(s); repeat to concatenate")
    p.add_argument("--model", required=True)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("parse", help="parse sentences into enhanced graphs")
    p.add_argument("--input", action="append", required=True)
    p.add_argument("--output", default="-")
    p.add_argument("--model")
    p.add_argument("--policy", choices=["oracle"])
    p.add_argument("--gold", help="gold file for --policy oracle")
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("eval", help="score predictions against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--output", default="-")
    p.add_argument("--per-label", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("validate", help="check graphs for connectivity and heads")
    p.add_argument("--input", action="append", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("stats", help="label inventory of a treebank")
    p.add_argument("--input", action="append", required=True)
    p.add_argument("--output", default="-")
    p.set_defaults(fn=cmd_stats)
    return top


def main(argv: list[str] | None = None) -> int:
    top = build_parser()
    args = top.parse_args(argv)
    try:
        return args.fn(args)
    except (ConlluError, AlignmentError, EdparseError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_SEMANTIC
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
