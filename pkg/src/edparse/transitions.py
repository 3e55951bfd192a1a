"""The eight-transition state machine for building enhanced graphs.

A configuration holds a stack (top to the right), a buffer (front to the
left), the arcs constructed so far and the generated order of every node
that has entered the stack.  Edge transitions connect the two top stack
items without popping, two reduce flavors pop either of them, NODE inserts
a fresh null node at the buffer front, and SWAP moves the second-top stack
item back to the buffer.  Cycles of length 2 and nodes with several heads
are therefore constructible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import IllegalTransition
from .graph import ROOT, Arc, EnhancedGraph, NodeId


class Kind(enum.Enum):
    SHIFT = "SHIFT"
    REDUCE0 = "REDUCE-0"
    REDUCE1 = "REDUCE-1"
    NODE = "NODE"
    LEFT_EDGE = "LEFT-EDGE"
    RIGHT_EDGE = "RIGHT-EDGE"
    SWAP = "SWAP"
    FINISH = "FINISH"


_EDGE_KINDS = frozenset({Kind.LEFT_EDGE, Kind.RIGHT_EDGE})


@dataclass(frozen=True, slots=True)
class Transition:
    """One parser action; edge kinds carry the arc label."""

    kind: Kind
    label: str | None = None

    def __post_init__(self):
        if self.kind in _EDGE_KINDS:
            if not self.label:
                raise ValueError(f"{self.kind.value} requires a label")
        elif self.label is not None:
            raise ValueError(f"{self.kind.value} does not take a label")

    @property
    def is_edge(self) -> bool:
        return self.kind in _EDGE_KINDS

    def encode(self) -> str:
        if self.is_edge:
            return f"{self.kind.value}:{self.label}"
        return self.kind.value

    @classmethod
    def decode(cls, text: str) -> "Transition":
        for kind in (Kind.LEFT_EDGE, Kind.RIGHT_EDGE):
            prefix = kind.value + ":"
            if text.startswith(prefix):
                return cls(kind, text[len(prefix):])
        try:
            return cls(Kind(text))
        except ValueError:
            raise ValueError(f"unknown transition {text!r}") from None

    def __str__(self) -> str:
        return self.encode()


SHIFT = Transition(Kind.SHIFT)
REDUCE0 = Transition(Kind.REDUCE0)
REDUCE1 = Transition(Kind.REDUCE1)
NODE = Transition(Kind.NODE)
SWAP = Transition(Kind.SWAP)
FINISH = Transition(Kind.FINISH)


def left_edge(label: str) -> Transition:
    return Transition(Kind.LEFT_EDGE, label)


def right_edge(label: str) -> Transition:
    return Transition(Kind.RIGHT_EDGE, label)


@dataclass(frozen=True)
class ConstraintParams:
    """Structural limits: heads per node and null nodes per word."""

    max_heads: int = 7
    max_nulls_per_word: float = 1.0

    def __post_init__(self):
        if self.max_heads < 1:
            raise ValueError("max_heads must be >= 1")
        if self.max_nulls_per_word < 0:
            raise ValueError("max_nulls_per_word must be >= 0")

    def null_budget(self, word_count: int) -> int:
        return int(self.max_nulls_per_word * word_count)


DEFAULT_PARAMS = ConstraintParams()


class Configuration:
    """Immutable parser state; ``apply`` returns a fresh configuration.

    ``gen_order`` maps each node that has ever been pushed onto the stack
    to its generation number; it is what keeps SWAP from looping.
    """

    __slots__ = (
        "stack", "buffer", "arcs", "nodes", "gen_order", "head_count",
        "null_seq", "null_count", "word_count", "gen_counter", "terminal",
    )

    def __init__(self, stack, buffer, arcs, nodes, gen_order, head_count,
                 null_seq, null_count, word_count, gen_counter, terminal):
        self.stack: tuple[NodeId, ...] = stack
        self.buffer: tuple[NodeId, ...] = buffer
        self.arcs: frozenset[Arc] = arcs
        self.nodes: frozenset[NodeId] = nodes
        self.gen_order: dict[NodeId, int] = gen_order
        self.head_count: dict[NodeId, int] = head_count
        self.null_seq: dict[int, int] = null_seq
        self.null_count: int = null_count
        self.word_count: int = word_count
        self.gen_counter: int = gen_counter
        self.terminal: bool = terminal

    def _replace(self, **kw) -> "Configuration":
        values = {name: getattr(self, name) for name in Configuration.__slots__}
        values.update(kw)
        return Configuration(**values)

    def __repr__(self) -> str:
        state = "terminal" if self.terminal else "live"
        stack = " ".join(str(n) for n in self.stack)
        buffer = " ".join(str(n) for n in self.buffer)
        return f"<Configuration [{stack}] / [{buffer}] arcs={len(self.arcs)} {state}>"

    def graph(self) -> EnhancedGraph:
        return EnhancedGraph(self.nodes, self.arcs)


def initial(word_count: int) -> Configuration:
    """Stack with the root, buffer with every word, no arcs."""
    if word_count < 1:
        raise ValueError("a sentence needs at least one word")
    return Configuration(
        stack=(ROOT,),
        buffer=tuple(NodeId(i, 0) for i in range(1, word_count + 1)),
        arcs=frozenset(),
        nodes=frozenset(NodeId(i, 0) for i in range(word_count + 1)),
        gen_order={ROOT: 0},
        head_count={},
        null_seq={},
        null_count=0,
        word_count=word_count,
        gen_counter=1,
        terminal=False,
    )


def peek_null_id(c: Configuration) -> NodeId:
    """The id the next NODE transition would create.

    Placeholder nulls are numbered ``p.k`` where ``p`` is the index of the
    current stack top (0 for the root) and ``k`` counts nulls per anchor.
    """
    anchor = c.stack[-1].index if c.stack else 0
    return NodeId(anchor, c.null_seq.get(anchor, 0) + 1)


def illegal_reason(c: Configuration, t: Transition,
                   params: ConstraintParams = DEFAULT_PARAMS) -> str | None:
    """None when ``t`` is legal in ``c``; otherwise the violated condition."""
    if c.terminal:
        return "configuration is terminal"
    kind = t.kind
    if kind is Kind.SHIFT:
        if not c.buffer:
            return "SHIFT needs a non-empty buffer"
        return None
    if kind is Kind.REDUCE0:
        if not c.stack:
            return "REDUCE-0 needs a stack item"
        s0 = c.stack[-1]
        if s0 == ROOT:
            return "the root cannot be reduced"
        if c.head_count.get(s0, 0) == 0:
            return "REDUCE-0 requires the top item to have a head"
        return None
    if kind is Kind.REDUCE1:
        if len(c.stack) < 2:
            return "REDUCE-1 needs two stack items"
        s1 = c.stack[-2]
        if s1 == ROOT:
            return "the root cannot be reduced"
        if c.head_count.get(s1, 0) == 0:
            return "REDUCE-1 requires the second item to have a head"
        return None
    if kind is Kind.NODE:
        if c.null_count >= params.null_budget(c.word_count):
            return "null node budget exhausted"
        return None
    if kind is Kind.LEFT_EDGE:
        if len(c.stack) < 2:
            return "LEFT-EDGE needs two stack items"
        s0, s1 = c.stack[-1], c.stack[-2]
        if s1 == ROOT:
            return "the root cannot be a dependent"
        if Arc(s0, s1, t.label) in c.arcs:
            return "arc already constructed"
        if c.head_count.get(s1, 0) >= params.max_heads:
            return "dependent reached the head limit"
        return None
    if kind is Kind.RIGHT_EDGE:
        if len(c.stack) < 2:
            return "RIGHT-EDGE needs two stack items"
        s0, s1 = c.stack[-1], c.stack[-2]
        if Arc(s1, s0, t.label) in c.arcs:
            return "arc already constructed"
        if c.head_count.get(s0, 0) >= params.max_heads:
            return "dependent reached the head limit"
        return None
    if kind is Kind.SWAP:
        if len(c.stack) < 2:
            return "SWAP needs two stack items"
        s0, s1 = c.stack[-1], c.stack[-2]
        if s1 == ROOT:
            return "the root cannot be swapped"
        if c.gen_order[s1] >= c.gen_order[s0]:
            return "SWAP requires the stack pair in generation order"
        return None
    if kind is Kind.FINISH:
        if c.buffer or c.stack != (ROOT,):
            return "FINISH requires an empty buffer and only the root on the stack"
        return None
    raise AssertionError(f"unhandled kind {kind}")


def legal(c: Configuration, t: Transition,
          params: ConstraintParams = DEFAULT_PARAMS) -> bool:
    return illegal_reason(c, t, params) is None


def apply(c: Configuration, t: Transition,
          params: ConstraintParams = DEFAULT_PARAMS) -> Configuration:
    """Apply a legal transition, returning the successor configuration."""
    reason = illegal_reason(c, t, params)
    if reason is not None:
        raise IllegalTransition(f"{t}: {reason}")
    kind = t.kind
    if kind is Kind.SHIFT:
        b = c.buffer[0]
        if b in c.gen_order:
            return c._replace(stack=c.stack + (b,), buffer=c.buffer[1:])
        gen_order = dict(c.gen_order)
        gen_order[b] = c.gen_counter
        return c._replace(
            stack=c.stack + (b,), buffer=c.buffer[1:],
            gen_order=gen_order, gen_counter=c.gen_counter + 1,
        )
    if kind is Kind.REDUCE0:
        return c._replace(stack=c.stack[:-1])
    if kind is Kind.REDUCE1:
        return c._replace(stack=c.stack[:-2] + (c.stack[-1],))
    if kind is Kind.NODE:
        null = peek_null_id(c)
        null_seq = dict(c.null_seq)
        null_seq[null.index] = null.sub
        return c._replace(
            buffer=(null,) + c.buffer,
            nodes=c.nodes | {null},
            null_seq=null_seq,
            null_count=c.null_count + 1,
        )
    if kind in _EDGE_KINDS:
        s0, s1 = c.stack[-1], c.stack[-2]
        arc = Arc(s0, s1, t.label) if kind is Kind.LEFT_EDGE else Arc(s1, s0, t.label)
        head_count = dict(c.head_count)
        head_count[arc.dep] = head_count.get(arc.dep, 0) + 1
        return c._replace(arcs=c.arcs | {arc}, head_count=head_count)
    if kind is Kind.SWAP:
        s1 = c.stack[-2]
        return c._replace(
            stack=c.stack[:-2] + (c.stack[-1],),
            buffer=(s1,) + c.buffer,
        )
    if kind is Kind.FINISH:
        return c._replace(terminal=True)
    raise AssertionError(f"unhandled kind {kind}")


def arc_added_by(c: Configuration, t: Transition) -> Arc | None:
    """The arc an edge transition would add in ``c`` (None for non-edges)."""
    if t.kind is Kind.LEFT_EDGE:
        return Arc(c.stack[-1], c.stack[-2], t.label)
    if t.kind is Kind.RIGHT_EDGE:
        return Arc(c.stack[-2], c.stack[-1], t.label)
    return None


def legal_transitions(c: Configuration, params: ConstraintParams = DEFAULT_PARAMS,
                      labels: Sequence[str] = ()) -> list[Transition]:
    """Every legal transition, edge kinds instantiated over ``labels``.

    The result is in a fixed canonical order so downstream tie-breaking is
    deterministic.
    """
    if c.terminal:
        return []
    out = []
    for t in (SHIFT, REDUCE0, REDUCE1, NODE):
        if legal(c, t, params):
            out.append(t)
    if len(c.stack) >= 2:
        for label in labels:
            t = left_edge(label)
            if legal(c, t, params):
                out.append(t)
            t = right_edge(label)
            if legal(c, t, params):
                out.append(t)
    for t in (SWAP, FINISH):
        if legal(c, t, params):
            out.append(t)
    return out


def forced_finish(c: Configuration, params: ConstraintParams = DEFAULT_PARAMS,
                  labels: Sequence[str] = ()) -> Configuration:
    """Terminate a dead-end configuration, keeping stack and buffer intact.

    Only valid when no transition is legal; premature termination for other
    reasons (budget exhaustion, a policy declining to act) is handled by the
    parse driver, not here.
    """
    if c.terminal:
        raise IllegalTransition("configuration is already terminal")
    remaining = legal_transitions(c, params, labels)
    if remaining:
        raise IllegalTransition(
            f"legal transitions exist ({remaining[0]}, ...); not a dead end"
        )
    return c._replace(terminal=True)


def halt(c: Configuration) -> Configuration:
    """Mark a configuration terminal without any dead-end check."""
    if c.terminal:
        return c
    return c._replace(terminal=True)


def run(c: Configuration, transitions: Iterable[Transition],
        params: ConstraintParams = DEFAULT_PARAMS) -> Configuration:
    """Fold ``apply`` over a transition sequence."""
    for t in transitions:
        c = apply(c, t, params)
    return c
