"""Structural property checks, each returning a replayable witness on failure.

Balanced and stable are only defined for reflexive graphs; calling those
checks on a non-reflexive graph raises ``NotReflexive`` rather than
returning False.  Witness selection is lexicographic in the graph's vertex
order so reports are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from .digraph import DiGraph, bits
from .errors import NotReflexive


def missing_loop(graph: DiGraph) -> Optional[str]:
    """First vertex (in order) without a loop, or None."""
    for i, v in enumerate(graph.vertices):
        if not (graph._rows[i] >> i) & 1:
            return v
    return None


def is_reflexive(graph: DiGraph) -> bool:
    return missing_loop(graph) is None


def _require_reflexive(graph: DiGraph) -> None:
    v = missing_loop(graph)
    if v is not None:
        raise NotReflexive(v)


def transitive_witness(graph: DiGraph) -> Optional[tuple[str, str, str]]:
    """First triple (x, y, z) with xy, yz present but xz missing."""
    rows = graph._rows
    labels = graph.vertices
    for x in range(len(labels)):
        rx = rows[x]
        for y in bits(rx):
            missing = rows[y] & ~rx
            for z in bits(missing):
                return labels[x], labels[y], labels[z]
    return None


def is_transitive(graph: DiGraph) -> bool:
    return transitive_witness(graph) is None


def is_preordered(graph: DiGraph) -> bool:
    return is_reflexive(graph) and is_transitive(graph)


def trans_triples(graph: DiGraph) -> frozenset[tuple[str, str, str]]:
    """All ordered triples (a, b, c), repeats allowed, with ab, bc, ac arrows."""
    rows = graph._rows
    labels = graph.vertices
    out = set()
    for a in range(len(labels)):
        ra = rows[a]
        for b in bits(ra):
            both = rows[b] & ra
            for c in bits(both):
                out.add((labels[a], labels[b], labels[c]))
    return frozenset(out)


def distinct_trans_triples(graph: DiGraph) -> frozenset[tuple[str, str, str]]:
    return frozenset(
        (a, b, c) for (a, b, c) in trans_triples(graph) if a != b and b != c and a != c
    )


def is_balanced(graph: DiGraph) -> tuple[bool, Optional[tuple[str, str, str, str]]]:
    """Whenever wx, xy, yz, wz are arrows, the chords wy and xz must be
    present or absent together.  Quantified over all vertex quadruples,
    repeats allowed; loops count as arrows.
    """
    _require_reflexive(graph)
    rows = graph._rows
    labels = graph.vertices
    for w in range(len(labels)):
        rw = rows[w]
        for x in bits(rw):
            rx = rows[x]
            for y in bits(rx):
                wy = (rw >> y) & 1
                zmask = rows[y] & rw
                for z in bits(zmask):
                    if ((rx >> z) & 1) != wy:
                        return False, (labels[w], labels[x], labels[y], labels[z])
    return True, None


class StableWitness(NamedTuple):
    kind: str  # "balance" or "stability"
    quad: tuple[str, str, str, str]


def is_stable(graph: DiGraph) -> tuple[bool, Optional[StableWitness]]:
    """Balanced, plus: distinct a, b, c, d with ab, ac, bc, bd, cd force ad."""
    ok, quad = is_balanced(graph)
    if not ok:
        assert quad is not None
        return False, StableWitness("balance", quad)
    rows = graph._rows
    labels = graph.vertices
    n = len(labels)
    for a in range(n):
        ra = rows[a]
        abit = 1 << a
        for b in bits(ra & ~abit):
            rb = rows[b]
            cmask = ra & rb & ~abit & ~(1 << b)
            for c in bits(cmask):
                # d distinct from a, b, c with the chord a -> d missing;
                # d = a is already impossible since the loop aa is present
                dmask = rb & rows[c] & ~abit & ~(1 << b) & ~(1 << c) & ~ra
                for d in bits(dmask):
                    return False, StableWitness(
                        "stability", (labels[a], labels[b], labels[c], labels[d])
                    )
    return True, None


class LockWitness(NamedTuple):
    u: str
    v: str
    w: str
    y: str


class LockStatus(NamedTuple):
    kind: str  # "not-a-clasp", "unlocked", or "locked"
    witness: Optional[LockWitness]


@dataclass(frozen=True)
class ClaspRecord:
    """A clasp vertex with its least witness and lock status.

    ``witness`` is the pair (w, y): w points at the vertex, the vertex
    points at y, and the chord w -> y is missing.
    """

    vertex: str
    witness: tuple[str, str]
    locked: bool
    lock_witness: Optional[LockWitness] = None

    @property
    def status(self) -> str:
        return "locked" if self.locked else "unlocked"


def _clasp_witness(graph: DiGraph, i: int) -> Optional[tuple[str, str]]:
    rows = graph._rows
    ibit = 1 << i
    ins = graph._cols[i] & ~ibit
    outs = rows[i] & ~ibit
    if not ins or not outs:
        return None
    for w in bits(ins):
        missing = outs & ~rows[w]
        for y in bits(missing):
            return graph.vertices[w], graph.vertices[y]
    return None


def locked_status(graph: DiGraph, x: str) -> LockStatus:
    """Classify ``x``: not a clasp, an unlocked clasp, or locked.

    Locked means there are u, v, w, y (all different from x, repeats among
    themselves allowed) with (u,x,y), (u,x,v), (w,x,v) all transitive
    triples while the arrow w -> y is missing.
    """
    _require_reflexive(graph)
    i = graph.index(x)
    rows = graph._rows
    labels = graph.vertices
    ibit = 1 << i
    ins = graph._cols[i] & ~ibit
    outs = rows[i] & ~ibit
    if _clasp_witness(graph, i) is None:
        return LockStatus("not-a-clasp", None)
    for u in bits(ins):
        ru = rows[u]
        heads = outs & ru  # y or v candidates: (u, x, *) is a transitive triple
        if not heads:
            continue
        for v in bits(heads):
            for w in bits(ins & graph._cols[v]):
                broken = heads & ~rows[w]
                for y in bits(broken):
                    return LockStatus(
                        "locked",
                        LockWitness(labels[u], labels[v], labels[w], labels[y]),
                    )
    return LockStatus("unlocked", None)


def clasps(graph: DiGraph) -> tuple[ClaspRecord, ...]:
    """Every clasp in vertex order, each with its least witness and status."""
    _require_reflexive(graph)
    records = []
    for i, v in enumerate(graph.vertices):
        witness = _clasp_witness(graph, i)
        if witness is None:
            continue
        status = locked_status(graph, v)
        records.append(
            ClaspRecord(v, witness, status.kind == "locked", status.witness)
        )
    return tuple(records)


def clasp_vertices(graph: DiGraph) -> tuple[str, ...]:
    return tuple(r.vertex for r in clasps(graph))


def is_paired(graph: DiGraph, r: str, s: str) -> bool:
    """True iff both arrows r -> s and s -> r are present."""
    return graph.has_arrow(r, s) and graph.has_arrow(s, r)


def soloists(graph: DiGraph) -> tuple[str, ...]:
    """Vertices paired with no other vertex, in vertex order."""
    _require_reflexive(graph)
    out = []
    for i, v in enumerate(graph.vertices):
        partners = graph._rows[i] & graph._cols[i] & ~(1 << i)
        if not partners:
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class PropertyReport:
    """Aggregate verdicts for one graph.

    ``balanced``/``stable`` (and the clasp and soloist listings) are None
    when the graph is not reflexive, since those notions are undefined
    there.
    """

    reflexive: bool
    missing_loop: Optional[str]
    transitive: bool
    transitive_witness: Optional[tuple[str, str, str]]
    preordered: bool
    balanced: Optional[bool]
    balanced_witness: Optional[tuple[str, str, str, str]]
    stable: Optional[bool]
    stable_witness: Optional[StableWitness]
    clasps: Optional[tuple[ClaspRecord, ...]]
    soloists: Optional[tuple[str, ...]]

    def to_json(self) -> dict:
        clasp_list = None
        if self.clasps is not None:
            clasp_list = [
                {
                    "vertex": r.vertex,
                    "witness": list(r.witness),
                    "status": r.status,
                    "lock_witness": list(r.lock_witness) if r.lock_witness else None,
                }
                for r in self.clasps
            ]
        stable_witness = None
        if self.stable_witness is not None:
            stable_witness = {
                "kind": self.stable_witness.kind,
                "witness": list(self.stable_witness.quad),
            }
        return {
            "reflexive": self.reflexive,
            "missing_loop": self.missing_loop,
            "transitive": self.transitive,
            "transitive_witness": (
                list(self.transitive_witness) if self.transitive_witness else None
            ),
            "preordered": self.preordered,
            "balanced": self.balanced,
            "balanced_witness": (
                list(self.balanced_witness) if self.balanced_witness else None
            ),
            "stable": self.stable,
            "stable_witness": stable_witness,
            "clasps": clasp_list,
            "soloists": list(self.soloists) if self.soloists is not None else None,
        }


def property_report(graph: DiGraph) -> PropertyReport:
    """Evaluate every predicate with witnesses."""
    loopless = missing_loop(graph)
    reflexive = loopless is None
    t_witness = transitive_witness(graph)
    transitive = t_witness is None
    if reflexive:
        balanced, b_witness = is_balanced(graph)
        stable, s_witness = is_stable(graph)
        clasp_records = clasps(graph)
        solo = soloists(graph)
    else:
        balanced = b_witness = stable = s_witness = None
        clasp_records = solo = None
    return PropertyReport(
        reflexive=reflexive,
        missing_loop=loopless,
        transitive=transitive,
        transitive_witness=t_witness,
        preordered=reflexive and transitive,
        balanced=balanced,
        balanced_witness=b_witness,
        stable=stable,
        stable_witness=s_witness,
        clasps=clasp_records,
        soloists=solo,
    )
