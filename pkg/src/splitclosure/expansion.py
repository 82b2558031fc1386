"""Iterated clasp splitting: expand a stable graph until it is preordered.

Each iteration fixes the least clasp x (in vertex order), computes its
context sets, splits x by one of two rewiring rules, and records a
compression map from the new graph back onto the old one.  No non-loop
arrow is ever added: the rewiring moves arrows onto the fresh vertex, so
the non-loop arrow count is invariant and only vertices accumulate.  The
run stops at the first preordered graph and returns the composite map,
which witnesses the input as a compression of the result.

Both rewiring rules presuppose a stable graph whose clasps are all
unlocked; a locked clasp is a hard obstruction, reported as an error
before anything is touched.  Stability and unlocked-ness are re-checked
after every iteration, converting the supporting theorems into runtime
assertions (cheap at the sizes this package targets).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .compression import CompressionMap, compose, identity_map, verify_compression
from .digraph import DiGraph, bits, emit_digraph
from .errors import (
    InternalInvariantBreached,
    LockedClasp,
    NotAClasp,
    NotStable,
    PreconditionViolated,
)
from .predicates import (
    _clasp_witness,
    _require_reflexive,
    is_preordered,
    is_stable,
    locked_status,
)


@dataclass(frozen=True)
class ClaspContext:
    """The two vertex sets steering one iteration around clasp ``clasp``.

    ``witness_heads`` are the successors y of the clasp such that some
    predecessor w of the clasp misses the chord w -> y; nonempty exactly
    when the vertex is a clasp.  ``triple_tails`` are the predecessors a
    forming a transitive triple (a, clasp, y) onto some witness head y.
    """

    clasp: str
    witness_heads: tuple[str, ...]
    triple_tails: tuple[str, ...]


@dataclass(frozen=True)
class ConstructionChoice:
    """Which rewiring rule applies, with the selection witnesses for B.

    Rule B is chosen when some triple tail (``kept_tail``) rides a
    transitive triple onto ``pivot_head`` while another (``detour_tail``)
    misses its chord to that head; otherwise rule A.
    """

    kind: str  # "A" or "B"
    detour_tail: Optional[str] = None
    kept_tail: Optional[str] = None
    pivot_head: Optional[str] = None


@dataclass(frozen=True)
class IterationRecord:
    """Ledger of one split: what moved, what was removed and added."""

    index: int
    clasp: str
    context: ClaspContext
    choice: ConstructionChoice
    moved_heads: Optional[tuple[str, ...]]  # rule A: successors rerouted to t
    moved_pairs: Optional[tuple[tuple[str, str], ...]]  # rule B: (c, z) pairs
    removed: tuple[tuple[str, str], ...]
    added: tuple[tuple[str, str], ...]
    new_vertex: str

    def to_json(self) -> dict:
        record: dict = {
            "index": self.index,
            "clasp": self.clasp,
            "construction": self.choice.kind,
            "Y": list(self.context.witness_heads),
            "A": list(self.context.triple_tails),
        }
        if self.choice.kind == "A":
            record["B"] = list(self.moved_heads or ())
        else:
            record["T"] = [list(p) for p in (self.moved_pairs or ())]
            record["witness"] = {
                "a": self.choice.detour_tail,
                "b": self.choice.kept_tail,
                "y": self.choice.pivot_head,
            }
        record["removed"] = [list(p) for p in self.removed]
        record["added"] = [list(p) for p in self.added]
        record["new_vertex"] = self.new_vertex
        return record


@dataclass(frozen=True)
class ExpansionOutcome:
    """A preordered expansion with its composite map and full trace."""

    result: DiGraph
    mapping: CompressionMap
    trace: tuple[IterationRecord, ...]

    @property
    def iterations(self) -> int:
        return len(self.trace)

    def to_json(self) -> dict:
        return {
            "input": emit_digraph(self.mapping.target, "dg"),
            "iterations": [r.to_json() for r in self.trace],
            "result": emit_digraph(self.result, "dg"),
            "map": self.mapping.to_json(),
        }


def clasp_context(graph: DiGraph, vertex: str) -> ClaspContext:
    """Compute the witness heads and triple tails for a clasp."""
    _require_reflexive(graph)
    i = graph.index(vertex)
    rows = graph._rows
    cols = graph._cols
    labels = graph.vertices
    ibit = 1 << i
    outs = rows[i] & ~ibit
    ins_any = cols[i]
    head_mask = 0
    for y in bits(outs):
        if ins_any & ~cols[y]:
            head_mask |= 1 << y
    if not head_mask:
        raise NotAClasp(vertex)
    tail_mask = 0
    for a in bits(cols[i] & ~ibit):
        if rows[a] & head_mask:
            tail_mask |= 1 << a
    return ClaspContext(
        vertex,
        tuple(labels[y] for y in bits(head_mask)),
        tuple(labels[a] for a in bits(tail_mask)),
    )


def select_construction(graph: DiGraph, vertex: str, ctx: ClaspContext) -> ConstructionChoice:
    """Pick rule B when its witnesses exist, else rule A.

    Witnesses are chosen deterministically: least pivot head in vertex
    order, then least kept tail, then least detour tail.
    """
    i = graph.index(vertex)
    cols = graph._cols
    tail_mask = 0
    for a in ctx.triple_tails:
        tail_mask |= 1 << graph.index(a)
    labels = graph.vertices
    for y_label in ctx.witness_heads:
        y = graph.index(y_label)
        kept = tail_mask & cols[y]
        detour = tail_mask & ~cols[y]
        if kept and detour:
            return ConstructionChoice(
                "B",
                detour_tail=labels[(detour & -detour).bit_length() - 1],
                kept_tail=labels[(kept & -kept).bit_length() - 1],
                pivot_head=y_label,
            )
    return ConstructionChoice("A")


def _rebuild(graph: DiGraph, removed, added, new_vertex) -> DiGraph:
    arrows = set(graph.arrows)
    arrows.difference_update(removed)
    arrows.update(added)
    arrows.add((new_vertex, new_vertex))
    return DiGraph(graph.vertices + (new_vertex,), arrows, name=graph.name)


def construction_a(
    graph: DiGraph,
    vertex: str,
    ctx: ClaspContext,
    new_vertex: str,
    index: int = 1,
) -> tuple[DiGraph, IterationRecord]:
    """Rule A: move every triple tail's arrow into the clasp, and the
    clasp's arrows onto every successor reachable through a witness head,
    over to the fresh vertex."""
    choice = select_construction(graph, vertex, ctx)
    if choice.kind != "A":
        raise PreconditionViolated("rule B witnesses exist; rule A does not apply")
    i = graph.index(vertex)
    rows = graph._rows
    cols = graph._cols
    labels = graph.vertices
    head_mask = 0
    for y in ctx.witness_heads:
        head_mask |= 1 << graph.index(y)
    moved = 0
    for b in bits(rows[i] & ~(1 << i)):
        # (vertex, b, y): b -> y for a witness head, or (vertex, y, b): y -> b.
        if rows[b] & head_mask or cols[b] & head_mask:
            moved |= 1 << b
    moved_heads = tuple(labels[b] for b in bits(moved))
    removed = tuple((a, vertex) for a in ctx.triple_tails) + tuple(
        (vertex, b) for b in moved_heads
    )
    added = tuple((a, new_vertex) for a in ctx.triple_tails) + tuple(
        (new_vertex, b) for b in moved_heads
    )
    if head_mask & ~moved:
        raise InternalInvariantBreached("witness heads escaped the moved set")
    record = IterationRecord(
        index, vertex, ctx, choice, moved_heads, None, removed, added, new_vertex
    )
    return _rebuild(graph, removed, added, new_vertex), record


def construction_b(
    graph: DiGraph,
    vertex: str,
    pivot_head: str,
    new_vertex: str,
    index: int = 1,
) -> tuple[DiGraph, IterationRecord]:
    """Rule B: detour every transitive triple (c, vertex, z) whose tail c
    misses the chord to the pivot head through the fresh vertex."""
    ctx = clasp_context(graph, vertex)
    if pivot_head not in ctx.witness_heads:
        raise PreconditionViolated(f"{pivot_head} is not a witness head of {vertex}")
    i = graph.index(vertex)
    rows = graph._rows
    cols = graph._cols
    labels = graph.vertices
    y = graph.index(pivot_head)
    tail_mask = 0
    for a in ctx.triple_tails:
        tail_mask |= 1 << graph.index(a)
    if not (tail_mask & cols[y]) or not (tail_mask & ~cols[y]):
        raise PreconditionViolated(
            f"rule B does not apply at {vertex} with pivot head {pivot_head}"
        )
    choice = select_construction(graph, vertex, ctx)
    if choice.pivot_head != pivot_head:
        detour = tail_mask & ~cols[y]
        kept = tail_mask & cols[y]
        choice = ConstructionChoice(
            "B",
            detour_tail=labels[(detour & -detour).bit_length() - 1],
            kept_tail=labels[(kept & -kept).bit_length() - 1],
            pivot_head=pivot_head,
        )
    ibit = 1 << i
    pairs = []
    for c in bits(cols[i] & ~cols[y] & ~ibit):
        for z in bits(rows[i] & rows[c] & ~ibit):
            pairs.append((labels[c], labels[z]))
    if not pairs:
        raise InternalInvariantBreached("rule B selected but no arrows to detour")
    tails = sorted({c for c, _ in pairs}, key=graph.index)
    heads = sorted({z for _, z in pairs}, key=graph.index)
    removed = tuple((c, vertex) for c in tails) + tuple((vertex, z) for z in heads)
    added = tuple((c, new_vertex) for c in tails) + tuple(
        (new_vertex, z) for z in heads
    )
    record = IterationRecord(
        index, vertex, ctx, choice, None, tuple(pairs), removed, added, new_vertex
    )
    return _rebuild(graph, removed, added, new_vertex), record


def fresh_vertex(graph: DiGraph, start: int = 1) -> tuple[str, int]:
    """Smallest unused t<k> label at or after ``start``."""
    k = start
    while f"t{k}" in graph:
        k += 1
    return f"t{k}", k + 1


def _check_preconditions(graph: DiGraph) -> None:
    _require_reflexive(graph)
    stable, witness = is_stable(graph)
    if not stable:
        raise NotStable(witness)
    for i, v in enumerate(graph.vertices):
        if _clasp_witness(graph, i) is not None:
            status = locked_status(graph, v)
            if status.kind == "locked":
                raise LockedClasp(v, status.witness)


def _step(
    graph: DiGraph, vertex: str, index: int, new_vertex: str
) -> tuple[DiGraph, CompressionMap, IterationRecord]:
    """One split plus its verified step map; preconditions assumed."""
    ctx = clasp_context(graph, vertex)
    choice = select_construction(graph, vertex, ctx)
    if choice.kind == "A":
        expanded, record = construction_a(graph, vertex, ctx, new_vertex, index)
    else:
        assert choice.pivot_head is not None
        expanded, record = construction_b(
            graph, vertex, choice.pivot_head, new_vertex, index
        )
    if len(record.removed) != len(record.added):
        raise InternalInvariantBreached("removed and added arrow counts differ")
    assignment = {v: v for v in graph.vertices}
    assignment[new_vertex] = vertex
    step_map = CompressionMap(expanded, graph, assignment)
    verdict = verify_compression(step_map)
    if not verdict.valid:
        raise InternalInvariantBreached(f"step map invalid: {verdict.describe()}")
    stable, witness = is_stable(expanded)
    if not stable:
        raise InternalInvariantBreached(f"split produced an unstable graph: {witness}")
    for i, v in enumerate(expanded.vertices):
        if _clasp_witness(expanded, i) is not None:
            if locked_status(expanded, v).kind == "locked":
                raise InternalInvariantBreached(f"split produced a locked clasp at {v}")
    return expanded, step_map, record


def expand_once(
    graph: DiGraph, vertex: str, index: int = 1
) -> tuple[DiGraph, CompressionMap, IterationRecord]:
    """Run one iteration at the given unlocked clasp of a stable graph."""
    _require_reflexive(graph)
    stable, witness = is_stable(graph)
    if not stable:
        raise NotStable(witness)
    status = locked_status(graph, vertex)
    if status.kind == "not-a-clasp":
        raise NotAClasp(vertex)
    if status.kind == "locked":
        raise LockedClasp(vertex, status.witness)
    name, _ = fresh_vertex(graph)
    return _step(graph, vertex, index, name)


def expand_to_preorder(graph: DiGraph) -> ExpansionOutcome:
    """Split the least clasp repeatedly until the graph is preordered.

    Termination is capped at |V| + 2|A*| iterations of the input; the
    counting argument behind the algorithm keeps every vertex incident to
    a non-loop arrow while the non-loop arrow count stays fixed, so the
    vertex count cannot grow past that bound.  Exceeding the cap, or any
    failed re-check along the way, raises InternalInvariantBreached.
    """
    _check_preconditions(graph)
    cap = len(graph.vertices) + 2 * len(graph.non_loop_arrows())
    current = graph
    composite = identity_map(graph)
    trace: list[IterationRecord] = []
    next_index = 1
    while not is_preordered(current):
        if len(trace) >= cap:
            raise InternalInvariantBreached(
                f"expansion did not stop within {cap} iterations"
            )
        clasp = None
        for i, v in enumerate(current.vertices):
            if _clasp_witness(current, i) is not None:
                clasp = v
                break
        if clasp is None:
            raise InternalInvariantBreached("graph is not preordered yet has no clasp")
        name, next_index = fresh_vertex(current, next_index)
        current, step_map, record = _step(current, clasp, len(trace) + 1, name)
        composite = compose(composite, step_map)
        trace.append(record)
    verdict = verify_compression(composite)
    if not verdict.valid:
        raise InternalInvariantBreached(f"composite map invalid: {verdict.describe()}")
    if len(current.non_loop_arrows()) != len(graph.non_loop_arrows()):
        raise InternalInvariantBreached("non-loop arrow count changed")
    return ExpansionOutcome(current, composite, tuple(trace))
