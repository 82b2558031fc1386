"""Compression maps: verification, composition, and vertex splitting.

A compression map sends the vertices of a source graph onto the vertices
of a target graph so that (1) arrows are preserved, (2) every transitive
triple of the target lifts to one in the source, and (3) the induced map
on non-loop arrows is a bijection.  The target is then a *compression* of
the source, and the source an *expansion* of the target.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .digraph import Arrow, DiGraph, bits
from .errors import (
    ChainMismatch,
    DomainMismatch,
    DuplicateVertex,
    InternalInvariantBreached,
    InvalidSplit,
    NotReflexive,
    ParseError,
    PreconditionViolated,
)


@dataclass(frozen=True)
class CompressionMap:
    """A vertex assignment from ``source`` onto ``target``.

    Validity against the three compression conditions is checked by
    :func:`verify_compression`, not at construction.
    """

    source: DiGraph
    target: DiGraph
    assignment: Mapping[str, str]

    def apply(self, v: str) -> str:
        return self.assignment[v]

    def as_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple((v, self.assignment[v]) for v in self.source.vertices)

    def to_json(self) -> dict:
        return {v: self.assignment[v] for v in self.source.vertices}


def identity_map(graph: DiGraph) -> CompressionMap:
    return CompressionMap(graph, graph, {v: v for v in graph.vertices})


_CONDITIONS = (
    "not-surjective",
    "cond1",
    "cond2",
    "cond3-not-well-defined",
    "cond3-not-injective",
)


@dataclass(frozen=True)
class CompressionVerdict:
    """Valid, or the first violated condition with a replayable witness."""

    valid: bool
    condition: Optional[str] = None
    witness: Optional[tuple] = None

    def describe(self) -> str:
        if self.valid:
            return "Valid"
        if self.condition == "not-surjective":
            return f"violation not-surjective: target vertex {self.witness[0]} has no preimage"
        if self.condition == "cond1":
            u, v = self.witness
            return f"violation cond1: image of arrow {u} {v} is not a target arrow"
        if self.condition == "cond2":
            a, b, c = self.witness
            return f"violation cond2: transitive triple ({a}, {b}, {c}) has no lift"
        if self.condition == "cond3-not-well-defined":
            u, v = self.witness
            return f"violation cond3: non-loop arrow {u} {v} collapses to a loop"
        if self.condition == "cond3-not-injective":
            (u1, v1), (u2, v2) = self.witness
            return (
                f"violation cond3: arrows {u1} {v1} and {u2} {v2} share an image"
            )
        return f"violation {self.condition}: {self.witness}"


VALID = CompressionVerdict(True)


def verify_compression(cmap: CompressionMap) -> CompressionVerdict:
    """Check the three compression conditions plus surjectivity.

    Conditions are tested in a fixed order (surjectivity, arrow
    preservation, triple lifting, arrow-map well-definedness, arrow-map
    injectivity) and the first failure wins, so verdicts are
    deterministic.
    """
    src, tgt = cmap.source, cmap.target
    assignment = cmap.assignment
    for v in src.vertices:
        if v not in assignment:
            raise DomainMismatch(f"no image for source vertex {v}")
        if assignment[v] not in tgt:
            raise DomainMismatch(f"image {assignment[v]} of {v} is not a target vertex")
    for g, side in ((src, "source"), (tgt, "target")):
        for i, v in enumerate(g.vertices):
            if not (g._rows[i] >> i) & 1:
                raise NotReflexive(f"{side} vertex {v} has no loop")

    covered = {assignment[v] for v in src.vertices}
    for t in tgt.vertices:
        if t not in covered:
            return CompressionVerdict(False, "not-surjective", (t,))

    for u, v in src.sorted_arrows():
        if not tgt.has_arrow(assignment[u], assignment[v]):
            return CompressionVerdict(False, "cond1", (u, v))

    fibers: dict[str, list[str]] = {t: [] for t in tgt.vertices}
    for v in src.vertices:
        fibers[assignment[v]].append(v)

    tgt_labels = tgt.vertices
    tgt_rows = tgt._rows
    for a1 in range(len(tgt_labels)):
        r1 = tgt_rows[a1]
        for a2 in bits(r1):
            both = tgt_rows[a2] & r1
            for a3 in bits(both):
                triple = (tgt_labels[a1], tgt_labels[a2], tgt_labels[a3])
                if not _lifts(src, fibers, triple):
                    return CompressionVerdict(False, "cond2", triple)

    seen: dict[tuple[str, str], Arrow] = {}
    for arrow in src.sorted_arrows(include_loops=False):
        u, v = arrow
        image = (assignment[u], assignment[v])
        if image[0] == image[1]:
            return CompressionVerdict(False, "cond3-not-well-defined", (u, v))
        if image in seen:
            return CompressionVerdict(
                False, "cond3-not-injective", (tuple(seen[image]), (u, v))
            )
        seen[image] = arrow

    # Surjectivity of the induced arrow map is forced by condition 2 on
    # triples (a, b, b); a failure here would be an implementation bug.
    if len(seen) != len(tgt.non_loop_arrows()):
        raise InternalInvariantBreached("arrow map not surjective after cond2 passed")
    return VALID


def _lifts(src: DiGraph, fibers: dict[str, list[str]], triple: tuple[str, str, str]) -> bool:
    f1, f2, f3 = (fibers[a] for a in triple)
    if len(f1) == 1 and len(f2) == 1 and len(f3) == 1:
        x1, x2, x3 = f1[0], f2[0], f3[0]
        return (
            src.has_arrow(x1, x2) and src.has_arrow(x2, x3) and src.has_arrow(x1, x3)
        )
    for x1 in f1:
        for x2 in f2:
            if not src.has_arrow(x1, x2):
                continue
            for x3 in f3:
                if src.has_arrow(x2, x3) and src.has_arrow(x1, x3):
                    return True
    return False


def compose(outer: CompressionMap, inner: CompressionMap) -> CompressionMap:
    """The map sending v to outer(inner(v)); inner's target must equal
    outer's source.  Validity is preserved under composition."""
    if inner.target != outer.source:
        raise ChainMismatch("inner target does not match outer source")
    assignment = {
        v: outer.assignment[inner.assignment[v]] for v in inner.source.vertices
    }
    return CompressionMap(inner.source, outer.target, assignment)


def split_vertex(
    graph: DiGraph,
    vertex: str,
    in_moved: Iterable[str],
    out_moved: Iterable[str],
    new_label: str,
) -> tuple[DiGraph, CompressionMap]:
    """Split ``vertex``: reroute the chosen in/out arrows to a fresh vertex.

    Arrows a -> vertex with a in ``in_moved`` become a -> new, and
    vertex -> b with b in ``out_moved`` become new -> b; the new vertex
    gets a loop and maps back onto ``vertex``.  The split is refused
    (InvalidSplit) unless the resulting map verifies as a compression.
    """
    i = graph.index(vertex)
    if new_label in graph:
        raise DuplicateVertex(new_label)
    ins = set(in_moved)
    outs = set(out_moved)
    in_nbrs = {graph.vertices[j] for j in bits(graph._cols[i])} - {vertex}
    out_nbrs = {graph.vertices[j] for j in bits(graph._rows[i])} - {vertex}
    if not ins <= in_nbrs:
        raise PreconditionViolated(
            f"in_moved contains non-predecessors of {vertex}: {sorted(ins - in_nbrs)}"
        )
    if not outs <= out_nbrs:
        raise PreconditionViolated(
            f"out_moved contains non-successors of {vertex}: {sorted(outs - out_nbrs)}"
        )
    arrows = set(graph.arrows)
    for a in ins:
        arrows.discard((a, vertex))
        arrows.add((a, new_label))
    for b in outs:
        arrows.discard((vertex, b))
        arrows.add((new_label, b))
    arrows.add((new_label, new_label))
    split = DiGraph(graph.vertices + (new_label,), arrows, name=graph.name)
    assignment = {v: v for v in graph.vertices}
    assignment[new_label] = vertex
    cmap = CompressionMap(split, graph, assignment)
    verdict = verify_compression(cmap)
    if not verdict.valid:
        raise InvalidSplit(verdict)
    return split, cmap


def parse_map_file(text: str, source: DiGraph, target: DiGraph) -> CompressionMap:
    """Read ``<source-vertex> <target-vertex>`` lines into a map.

    Source vertices omitted from the file default to the identically
    labeled target vertex when one exists; otherwise the file is rejected
    as non-total.
    """
    assignment: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected '<source> <target>', got {line!r}")
        s, t = parts
        if s not in source:
            raise ParseError(f"line {lineno}: unknown source vertex {s}")
        if t not in target:
            raise ParseError(f"line {lineno}: unknown target vertex {t}")
        if s in assignment:
            raise ParseError(f"line {lineno}: repeated mapping for {s}")
        assignment[s] = t
    for v in source.vertices:
        if v not in assignment:
            if v in target:
                assignment[v] = v
            else:
                raise DomainMismatch(
                    f"map file is not total: no image for source vertex {v}"
                )
    return CompressionMap(source, target, assignment)
