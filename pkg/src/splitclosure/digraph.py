"""Directed-graph value type, derived graphs, isomorphism, and text I/O.

A ``DiGraph`` is immutable after construction.  Loops are stored explicitly:
nothing is ever implied by reflexivity, so non-reflexive inputs stay visible
and can be reported instead of silently repaired.  The listing order of the
vertices defines the total order used for every deterministic tie-break in
the rest of the package.

Adjacency is kept as per-vertex bit rows (successor and predecessor masks)
because every algorithm here tests arrow membership in tight loops.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional

from .errors import (
    DuplicateArrow,
    DuplicateVertex,
    ParseError,
    UnknownVertex,
)


class Arrow(NamedTuple):
    tail: str
    head: str


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class DiGraph:
    """A finite directed graph: ordered vertex labels plus a set of arrows.

    Vertex labels are non-empty, whitespace-free strings and must be
    distinct.  Arrows are ordered pairs of listed labels; loops ``(v, v)``
    are ordinary arrows.  Equality and hashing are structural (vertex
    sequence and arrow set); the optional ``name`` is carried along but
    ignored by comparisons.
    """

    def __init__(
        self,
        vertices: Iterable[str],
        arrows: Iterable[tuple[str, str]] = (),
        name: Optional[str] = None,
    ):
        self.name = name
        self.vertices = tuple(vertices)
        index: dict[str, int] = {}
        for i, v in enumerate(self.vertices):
            if not v or any(c.isspace() for c in v):
                raise ValueError(f"invalid vertex label {v!r}")
            if v in index:
                raise DuplicateVertex(v)
            index[v] = i
        self._index = index
        n = len(self.vertices)
        rows = [0] * n
        cols = [0] * n
        arrow_set: set[tuple[str, str]] = set()
        for u, w in arrows:
            iu = index.get(u)
            iw = index.get(w)
            if iu is None:
                raise UnknownVertex(u)
            if iw is None:
                raise UnknownVertex(w)
            rows[iu] |= 1 << iw
            cols[iw] |= 1 << iu
            arrow_set.add((u, w))
        self.arrows = frozenset(arrow_set)
        self._rows = tuple(rows)
        self._cols = tuple(cols)

    # -- identity ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.arrows == other.arrows

    def __hash__(self) -> int:
        return hash((self.vertices, self.arrows))

    def __contains__(self, v: str) -> bool:
        return v in self._index

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return (
            f"<DiGraph{label} |V|={len(self.vertices)} |A|={len(self.arrows)}>"
        )

    # -- adjacency --------------------------------------------------------

    def index(self, v: str) -> int:
        """Position of ``v`` in the vertex order; raises UnknownVertex."""
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVertex(v) from None

    def has_arrow(self, u: str, v: str) -> bool:
        return (self._rows[self.index(u)] >> self.index(v)) & 1 == 1

    def out_neighbors(self, v: str) -> tuple[str, ...]:
        return tuple(self.vertices[j] for j in bits(self._rows[self.index(v)]))

    def in_neighbors(self, v: str) -> tuple[str, ...]:
        return tuple(self.vertices[j] for j in bits(self._cols[self.index(v)]))

    def sorted_arrows(self, include_loops: bool = True) -> list[Arrow]:
        """Arrows ordered by (tail position, head position)."""
        out = []
        for i, u in enumerate(self.vertices):
            row = self._rows[i]
            for j in bits(row):
                if include_loops or i != j:
                    out.append(Arrow(u, self.vertices[j]))
        return out

    def non_loop_arrows(self) -> frozenset[tuple[str, str]]:
        return frozenset((u, v) for (u, v) in self.arrows if u != v)

    def is_reflexive(self) -> bool:
        return all((self._rows[i] >> i) & 1 for i in range(len(self.vertices)))

    # -- derived graphs ----------------------------------------------------

    def star(self) -> DiGraph:
        """Same vertices, loops dropped."""
        return DiGraph(self.vertices, self.non_loop_arrows(), name=self.name)

    def induced(self, subset: Iterable[str]) -> DiGraph:
        """Induced subgraph on ``subset``, in this graph's vertex order."""
        chosen = {self.index(v) for v in subset}
        verts = tuple(v for i, v in enumerate(self.vertices) if i in chosen)
        keep = set(verts)
        arrows = [(u, v) for (u, v) in self.arrows if u in keep and v in keep]
        return DiGraph(verts, arrows, name=self.name)

    def transitive_closure(self) -> DiGraph:
        """Smallest transitive supergraph on the same vertices (Warshall)."""
        n = len(self.vertices)
        rows = list(self._rows)
        for k in range(n):
            bit = 1 << k
            rk = rows[k]
            for i in range(n):
                if rows[i] & bit:
                    rows[i] |= rk
        arrows = [
            (self.vertices[i], self.vertices[j])
            for i in range(n)
            for j in bits(rows[i])
        ]
        return DiGraph(self.vertices, arrows, name=self.name)


# -- isomorphism -----------------------------------------------------------


@dataclass(frozen=True)
class VertexBijection:
    """A one-to-one vertex correspondence witnessing an isomorphism."""

    pairs: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    def apply(self, v: str) -> str:
        for a, b in self.pairs:
            if a == v:
                return b
        raise UnknownVertex(v)

    def inverse(self) -> "VertexBijection":
        return VertexBijection(tuple((b, a) for a, b in self.pairs))


def _packed_matrix(graph: DiGraph) -> int:
    """Full adjacency matrix, row-major, first cell most significant."""
    n = len(graph.vertices)
    packed = 0
    for i in range(n):
        row = graph._rows[i]
        for j in range(n):
            packed = (packed << 1) | ((row >> j) & 1)
    return packed


@functools.lru_cache(maxsize=None)
def _canonical_packed(n: int, packed: int) -> int:
    """Lexicographically minimal packed matrix over all vertex relabelings."""
    cells = [(packed >> (n * n - 1 - (i * n + j))) & 1 for i in range(n) for j in range(n)]
    best = None
    for perm in itertools.permutations(range(n)):
        cand = 0
        for i in range(n):
            pi = perm[i]
            for j in range(n):
                cand = (cand << 1) | cells[pi * n + perm[j]]
            if best is not None and cand > (best >> (n * (n - 1 - i))):
                break
        else:
            if best is None or cand < best:
                best = cand
    assert best is not None
    return best


def canonical_form(graph: DiGraph) -> tuple[int, int]:
    """A label-independent key: two graphs are isomorphic iff keys match."""
    n = len(graph.vertices)
    return n, _canonical_packed(n, _packed_matrix(graph))


def is_isomorphic(first: DiGraph, second: DiGraph) -> Optional[VertexBijection]:
    """Search for a bijection carrying the arrows of one graph exactly onto
    the other's; returns None when the graphs are not isomorphic.

    Brute-force permutation search, intended for small graphs; a cached
    canonical form rejects most non-isomorphic pairs without searching.
    """
    n = len(first.vertices)
    if n != len(second.vertices) or len(first.arrows) != len(second.arrows):
        return None
    if canonical_form(first) != canonical_form(second):
        return None
    rows1, rows2 = first._rows, second._rows
    for perm in itertools.permutations(range(n)):
        ok = True
        for i in range(n):
            target = 0
            row = rows1[i]
            for j in bits(row):
                target |= 1 << perm[j]
            if rows2[perm[i]] != target:
                ok = False
                break
        if ok:
            pairs = tuple(
                (first.vertices[i], second.vertices[perm[i]]) for i in range(n)
            )
            return VertexBijection(pairs)
    return None


def is_star_acyclic(graph: DiGraph) -> bool:
    """True iff the graph with loops removed has no directed cycle."""
    n = len(graph.vertices)
    rows = [graph._rows[i] & ~(1 << i) for i in range(n)]
    state = [0] * n  # 0 unseen, 1 on stack, 2 done
    for root in range(n):
        if state[root]:
            continue
        stack = [(root, rows[root])]
        state[root] = 1
        while stack:
            node, todo = stack[-1]
            advanced = False
            for j in bits(todo):
                todo &= ~(1 << j)
                stack[-1] = (node, todo)
                if state[j] == 1:
                    return False
                if state[j] == 0:
                    state[j] = 1
                    stack.append((j, rows[j]))
                    advanced = True
                    break
            if not advanced:
                state[node] = 2
                stack.pop()
    return True


# -- dg / DOT text formats --------------------------------------------------


def parse_digraph(text: str) -> DiGraph:
    """Parse the line-oriented dg format.

    Layout, in order: optional ``digraph: <name>``, required
    ``vertices: <lbl> ...``, optional ``loops: auto|explicit`` (default
    auto), required ``arrows:`` followed by ``<tail> <head>`` lines.
    Comment lines starting with ``#`` and blank lines may appear anywhere.
    Under ``loops: auto`` every loop is added; ``explicit`` takes the arrow
    list verbatim.
    """
    name: Optional[str] = None
    vertices: Optional[list[str]] = None
    loops_mode: Optional[str] = None
    in_arrows = False
    pairs: list[tuple[str, str]] = []
    seen_pairs: set[tuple[str, str]] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if in_arrows:
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected '<tail> <head>', got {line!r}")
            pair = (parts[0], parts[1])
            if pair in seen_pairs:
                raise DuplicateArrow(f"line {lineno}: arrow {parts[0]} {parts[1]} repeated")
            seen_pairs.add(pair)
            pairs.append(pair)
        elif line.startswith("digraph:"):
            if name is not None or vertices is not None:
                raise ParseError(f"line {lineno}: misplaced 'digraph:'")
            name = line[len("digraph:"):].strip()
            if not name:
                raise ParseError(f"line {lineno}: empty graph name")
        elif line.startswith("vertices:"):
            if vertices is not None:
                raise ParseError(f"line {lineno}: repeated 'vertices:'")
            vertices = line[len("vertices:"):].split()
        elif line.startswith("loops:"):
            if vertices is None or loops_mode is not None:
                raise ParseError(f"line {lineno}: misplaced 'loops:'")
            loops_mode = line[len("loops:"):].strip()
            if loops_mode not in ("auto", "explicit"):
                raise ParseError(f"line {lineno}: loops must be auto or explicit")
        elif line == "arrows:":
            if vertices is None:
                raise ParseError(f"line {lineno}: 'arrows:' before 'vertices:'")
            in_arrows = True
        else:
            raise ParseError(f"line {lineno}: unrecognized line {line!r}")

    if not in_arrows:
        raise ParseError("missing 'arrows:' section")
    assert vertices is not None
    if loops_mode is None:
        loops_mode = "auto"
    arrow_set: set[tuple[str, str]] = set(pairs)
    if loops_mode == "auto":
        arrow_set.update((v, v) for v in vertices)
    return DiGraph(vertices, arrow_set, name=name)


def emit_digraph(graph: DiGraph, fmt: str = "dg") -> str:
    """Render the graph as dg or DOT text, deterministically.

    dg output round-trips through :func:`parse_digraph` to an equal graph.
    DOT output lists non-loop arrows only.
    """
    if fmt == "dg":
        lines = []
        if graph.name:
            lines.append(f"digraph: {graph.name}")
        lines.append(("vertices: " + " ".join(graph.vertices)).rstrip())
        if graph.is_reflexive():
            lines.append("loops: auto")
            arrows = graph.star().sorted_arrows()
        else:
            lines.append("loops: explicit")
            arrows = graph.sorted_arrows()
        lines.append("arrows:")
        lines.extend(f"{u} {v}" for u, v in arrows)
        return "\n".join(lines) + "\n"
    if fmt == "dot":
        name = graph.name or "G"
        lines = [f"digraph {name} {{"]
        for u, v in graph.star().sorted_arrows():
            lines.append(f'  "{u}" -> "{v}";')
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
