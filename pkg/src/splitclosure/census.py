"""Exhaustive small-graph enumeration and desk-scale theorem validation.

The census enumerates reflexive digraphs either labeled or up to
isomorphism, mines minimal forbidden induced subgraphs for the predicate
family, provides an independent brute-force decision procedure for "is a
compression of a preordered graph" at bounded size, and sweeps the whole
universe re-checking every theorem the rest of the package relies on.

Enumeration is by packed non-loop adjacency bit-strings (row-major, first
cell most significant), so lexicographic order on bit-strings is numeric
order on masks.  Up-to-isomorphism streams emit each orbit's minimal mask.
For n <= 5 whole orbits are marked eagerly; n = 6 falls back to a lazy
per-mask canonicity test, which is correct but only suitable for partial
consumption.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .compression import CompressionMap, verify_compression
from .digraph import DiGraph, bits, canonical_form, emit_digraph
from .errors import BoundExceeded, NotReflexive
from .expansion import ExpansionOutcome, expand_to_preorder
from .predicates import (
    clasp_vertices,
    clasps,
    is_balanced,
    is_preordered,
    is_stable,
    missing_loop,
    soloists,
    trans_triples,
)

_LABELS = ("a", "b", "c", "d", "e", "f")
_MAX_N = 6


def _positions(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def graph_from_mask(n: int, mask: int, name: Optional[str] = None) -> DiGraph:
    """Reflexive graph on letter vertices from a packed non-loop mask."""
    verts = _LABELS[:n]
    pos = _positions(n)
    width = len(pos)
    arrows = {(v, v) for v in verts}
    for p, (i, j) in enumerate(pos):
        if (mask >> (width - 1 - p)) & 1:
            arrows.add((verts[i], verts[j]))
    return DiGraph(verts, arrows, name=name)


def mask_from_graph(graph: DiGraph) -> int:
    n = len(graph.vertices)
    pos = _positions(n)
    width = len(pos)
    mask = 0
    for p, (i, j) in enumerate(pos):
        if (graph._rows[i] >> j) & 1:
            mask |= 1 << (width - 1 - p)
    return mask


@functools.lru_cache(maxsize=None)
def _perm_chunk_tables(n: int) -> tuple:
    """Per permutation, byte-indexed lookup tables applying the induced
    bit permutation to a packed mask 8 bits at a time."""
    pos = _positions(n)
    width = len(pos)
    pos_index = {pair: p for p, pair in enumerate(pos)}
    nchunks = (width + 7) // 8
    all_tables = []
    for perm in itertools.permutations(range(n)):
        single = [0] * width
        for p, (i, j) in enumerate(pos):
            q = pos_index[(perm[i], perm[j])]
            single[width - 1 - p] = 1 << (width - 1 - q)
        chunks = []
        for c in range(nchunks):
            table = [0] * 256
            for byte in range(1, 256):
                low = byte & -byte
                bit = c * 8 + low.bit_length() - 1
                mapped = single[bit] if bit < width else 0
                table[byte] = table[byte ^ low] | mapped
            chunks.append(tuple(table))
        all_tables.append(tuple(chunks))
    return tuple(all_tables)


def _apply_chunks(chunks: tuple, mask: int) -> int:
    out = chunks[0][mask & 255]
    shift = 8
    for c in range(1, len(chunks)):
        out |= chunks[c][(mask >> shift) & 255]
        shift += 8
    return out


@functools.lru_cache(maxsize=None)
def canonical_masks(n: int) -> tuple[int, ...]:
    """Minimal mask of every isomorphism orbit, ascending (n <= 5)."""
    if n == 1:
        return (0,)
    width = n * (n - 1)
    tables = _perm_chunk_tables(n)
    total = 1 << width
    seen = bytearray(total)
    out = []
    for mask in range(total):
        if seen[mask]:
            continue
        out.append(mask)
        for chunks in tables:
            seen[_apply_chunks(chunks, mask)] = 1
    return tuple(out)


def _lazy_canonical_masks(n: int) -> Iterator[int]:
    tables = _perm_chunk_tables(n)
    width = n * (n - 1)
    for mask in range(1 << width):
        for chunks in tables:
            if _apply_chunks(chunks, mask) < mask:
                break
        else:
            yield mask


@dataclass(frozen=True)
class IsoClassStream:
    """A deterministic, re-iterable stream of reflexive census graphs."""

    n: int
    mode: str  # "labeled" or "up-to-iso"

    def __iter__(self) -> Iterator[DiGraph]:
        n = self.n
        if self.mode == "labeled":
            for mask in range(1 << (n * (n - 1))):
                yield graph_from_mask(n, mask, name=f"g{n}-{mask}")
        else:
            masks: Iterator[int] | tuple[int, ...]
            if n <= 5:
                masks = canonical_masks(n)
            else:
                masks = _lazy_canonical_masks(n)
            for mask in masks:
                yield graph_from_mask(n, mask, name=f"c{n}-{mask}")


def enumerate_reflexive(n: int, mode: str = "up-to-iso") -> IsoClassStream:
    """All reflexive digraphs on ``n`` vertices, labeled or one per class."""
    if mode not in ("labeled", "up-to-iso"):
        raise ValueError(f"unknown mode {mode!r}")
    if not 1 <= n <= _MAX_N:
        raise BoundExceeded(f"vertex count {n} outside 1..{_MAX_N}")
    return IsoClassStream(n, mode)


# -- minimal forbidden induced subgraphs ------------------------------------


def _fails_balanced(graph: DiGraph) -> bool:
    return not is_balanced(graph)[0]


def _fails_stable_given_balanced(graph: DiGraph) -> bool:
    return is_balanced(graph)[0] and not is_stable(graph)[0]


def _fails_unlocked_given_stable(graph: DiGraph) -> bool:
    return is_stable(graph)[0] and any(r.locked for r in clasps(graph))


_PREDICATE_FAILS: dict[str, Callable[[DiGraph], bool]] = {
    "balanced": _fails_balanced,
    "stable-given-balanced": _fails_stable_given_balanced,
    "unlocked-given-stable": _fails_unlocked_given_stable,
}


@dataclass(frozen=True)
class ObstructionSet:
    """Minimal forbidden induced subgraphs for one predicate, up to iso."""

    predicate: str
    n_max: int
    members: tuple[DiGraph, ...]

    def to_json(self) -> dict:
        return {
            "predicate": self.predicate,
            "n_max": self.n_max,
            "classes": [emit_digraph(g, "dg") for g in self.members],
        }


def contains_induced(graph: DiGraph, pattern: DiGraph) -> bool:
    """Does some induced subgraph of ``graph`` realize ``pattern``?"""
    k = len(pattern.vertices)
    if k > len(graph.vertices):
        return False
    key = canonical_form(pattern)
    for subset in itertools.combinations(graph.vertices, k):
        if canonical_form(graph.induced(subset)) == key:
            return True
    return False


def minimal_obstructions(predicate: str, n_max: int) -> ObstructionSet:
    """Mine every minimal failing induced subgraph up to ``n_max`` vertices.

    A member fails the predicate while all of its proper induced
    subgraphs satisfy it; members are pairwise non-isomorphic canonical
    representatives ordered by vertex count, then mask.
    """
    try:
        fails = _PREDICATE_FAILS[predicate]
    except KeyError:
        raise ValueError(f"unknown predicate {predicate!r}") from None
    if not 1 <= n_max <= 5:
        raise BoundExceeded(f"obstruction search bound {n_max} outside 1..5")
    members = []
    for n in range(1, n_max + 1):
        for graph in enumerate_reflexive(n, "up-to-iso"):
            if not fails(graph):
                continue
            minimal = True
            for size in range(1, n):
                for subset in itertools.combinations(graph.vertices, size):
                    if fails(graph.induced(subset)):
                        minimal = False
                        break
                if not minimal:
                    break
            if minimal:
                members.append(
                    DiGraph(
                        graph.vertices,
                        graph.arrows,
                        name=f"{predicate}-obstruction-{len(members) + 1}",
                    )
                )
    return ObstructionSet(predicate, n_max, tuple(members))


# -- bounded oracle ----------------------------------------------------------


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def oracle_preorder_expansion(
    target: DiGraph, max_extra: int
) -> Optional[tuple[DiGraph, CompressionMap]]:
    """Brute-force search for a preordered expansion of ``target``.

    Candidates are parameterized exactly by the arrow-bijection condition:
    choose how many copies each target vertex gets (every vertex at least
    one, at most ``max_extra`` extras in total), then choose the single
    preimage pair of every non-loop target arrow; intra-fiber arrows are
    impossible, so nothing else varies.  The first candidate (in the fixed
    search order) that is preordered and verifies as a compression is
    returned; None means no expansion exists within the bound.
    """
    loopless = missing_loop(target)
    if loopless is not None:
        raise NotReflexive(loopless)
    n = len(target.vertices)
    if max_extra < 0 or n + max_extra > 8:
        raise BoundExceeded(f"search size {n}+{max_extra} outside 1..8")
    target_arrows = target.star().sorted_arrows()
    taken = set(target.vertices)

    for total in range(n, n + max_extra + 1):
        for sizes in _compositions(total, n):
            copies: dict[str, list[str]] = {}
            source_vertices: list[str] = []
            for v, k in zip(target.vertices, sizes):
                fiber = [v]
                for extra in range(2, k + 1):
                    label = f"{v}.{extra}"
                    while label in taken:
                        label += "."
                    fiber.append(label)
                copies[v] = fiber
                source_vertices.extend(fiber)
            index = {name: i for i, name in enumerate(source_vertices)}
            loops = [1 << i for i in range(total)]
            option_lists = []
            for u, w in target_arrows:
                option_lists.append(
                    [
                        (index[cu], index[cw])
                        for cu in copies[u]
                        for cw in copies[w]
                    ]
                )
            for choice in itertools.product(*option_lists):
                rows = list(loops)
                for iu, iw in choice:
                    rows[iu] |= 1 << iw
                transitive = True
                for i in range(total):
                    row = rows[i]
                    probe = row & ~(1 << i)
                    while probe:
                        low = probe & -probe
                        if rows[low.bit_length() - 1] & ~row:
                            transitive = False
                            break
                        probe ^= low
                    if not transitive:
                        break
                if not transitive:
                    continue
                arrows = [(source_vertices[i], source_vertices[i]) for i in range(total)]
                arrows.extend(
                    (source_vertices[iu], source_vertices[iw]) for iu, iw in choice
                )
                candidate = DiGraph(source_vertices, arrows)
                assignment = {
                    c: v for v, fiber in copies.items() for c in fiber
                }
                cmap = CompressionMap(candidate, target, assignment)
                if verify_compression(cmap).valid:
                    return candidate, cmap
    return None


# -- theorem sweeps ----------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    instances: int
    counterexample: Optional[str] = None  # dg text of the offending graph
    detail: Optional[str] = None


@dataclass(frozen=True)
class ValidationReport:
    n_max: int
    classes_scanned: tuple[int, ...]
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "n_max": self.n_max,
            "classes_scanned": list(self.classes_scanned),
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "instances": c.instances,
                    "counterexample": c.counterexample,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }

    def render_text(self) -> str:
        lines = [f"theorem validation up to n={self.n_max}"]
        lines.append(
            "iso classes scanned: "
            + ", ".join(str(c) for c in self.classes_scanned)
        )
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            line = f"check {c.name}: {status} ({c.instances} instances)"
            if not c.passed and c.detail:
                line += f" -- {c.detail}"
            lines.append(line)
        lines.append("overall: " + ("pass" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def _soloist_lemma_instances(graph: DiGraph) -> tuple[int, Optional[str]]:
    """Check all six soloist biconditionals; returns (count, violation)."""
    verts = graph.vertices
    solo = set(soloists(graph))
    has = graph.has_arrow
    checked = 0
    for s in verts:
        if s not in solo:
            continue
        others = [v for v in verts if v != s]
        for a in others:
            for b in others:
                if a != b and has(a, b) and has(b, s) and has(a, s):
                    # pattern 1: (a, b, s) transitive
                    for c in verts:
                        if has(s, c):
                            checked += 1
                            if has(a, c) != has(b, c):
                                return checked, f"1(a) at s={s} a={a} b={b} c={c}"
                    for x in verts:
                        if has(x, a):
                            checked += 1
                            if has(x, s) != has(x, b):
                                return checked, f"1(b) at s={s} a={a} b={b} x={x}"
        for a in others:
            if not has(a, s):
                continue
            for c in others:
                if has(s, c) and has(a, c):
                    # pattern 2: (a, s, c) transitive
                    for x in verts:
                        if has(x, a):
                            checked += 1
                            if has(x, c) != has(x, s):
                                return checked, f"2(a) at s={s} a={a} c={c} x={x}"
                    for d in verts:
                        if has(c, d):
                            checked += 1
                            if has(a, d) != has(s, d):
                                return checked, f"2(b) at s={s} a={a} c={c} d={d}"
        for b in others:
            if not has(s, b):
                continue
            for c in others:
                if b != c and has(b, c) and has(s, c):
                    # pattern 3: (s, b, c) transitive
                    for d in verts:
                        if has(c, d):
                            checked += 1
                            if has(b, d) != has(s, d):
                                return checked, f"3(a) at s={s} b={b} c={c} d={d}"
                    for a in verts:
                        if has(a, s):
                            checked += 1
                            if has(a, b) != has(a, c):
                                return checked, f"3(b) at s={s} b={b} c={c} a={a}"
    return checked, None


def _transitive_inducing_holds(cmap: CompressionMap) -> bool:
    src, tgt = cmap.source, cmap.target
    triples = trans_triples(tgt)
    assignment = cmap.assignment
    labels = src.vertices
    rows = src._rows
    for x in range(len(labels)):
        rx = rows[x]
        for y in bits(rx):
            for z in bits(rows[y] & ~rx):
                if (assignment[labels[x]], assignment[labels[y]], assignment[labels[z]]) in triples:
                    return False
    return True


def _compression_theorem_holds(cmap: CompressionMap) -> Optional[str]:
    src, tgt = cmap.source, cmap.target
    if is_balanced(tgt)[0] and not is_balanced(src)[0]:
        return "balanced not inherited"
    if is_stable(tgt)[0] and not is_stable(src)[0]:
        return "stable not inherited"
    if is_preordered(tgt) and not is_preordered(src):
        return "preordered not inherited"
    if not _transitive_inducing_holds(cmap):
        return "transitive-inducing failed"
    if len(src.non_loop_arrows()) != len(tgt.non_loop_arrows()):
        return "non-loop arrow counts differ"
    if is_stable(src)[0]:
        src_locked = any(r.locked for r in clasps(src))
        tgt_locked = any(r.locked for r in clasps(tgt))
        if src_locked != tgt_locked:
            return "locked-clasp existence not transferred"
    return None


def _replay_step_maps(outcome: ExpansionOutcome) -> list[CompressionMap]:
    maps = []
    graph = outcome.mapping.target
    for record in outcome.trace:
        arrows = set(graph.arrows)
        arrows.difference_update(record.removed)
        arrows.update(record.added)
        arrows.add((record.new_vertex, record.new_vertex))
        expanded = DiGraph(
            graph.vertices + (record.new_vertex,), arrows, name=graph.name
        )
        assignment = {v: v for v in graph.vertices}
        assignment[record.new_vertex] = record.clasp
        maps.append(CompressionMap(expanded, graph, assignment))
        graph = expanded
    return maps


def validate_theorems(n_max: int) -> ValidationReport:
    """Sweep the census and re-check every supported theorem.

    The negative direction of the main theorem is checked as *bounded
    consistency* only: the oracle proves no expansion exists up to its
    size limit, not in general.
    """
    if not 1 <= n_max <= 5:
        raise BoundExceeded(f"validation bound {n_max} outside 1..5")
    counts = []
    stable_unlocked: list[DiGraph] = []
    stable_locked: list[DiGraph] = []
    stable_all: list[DiGraph] = []
    for n in range(1, n_max + 1):
        count = 0
        for graph in enumerate_reflexive(n, "up-to-iso"):
            count += 1
            if not is_stable(graph)[0]:
                continue
            stable_all.append(graph)
            if any(r.locked for r in clasps(graph)):
                stable_locked.append(graph)
            else:
                stable_unlocked.append(graph)
        counts.append(count)

    checks = []

    # (a) positive direction: every stable all-unlocked class expands.
    outcomes: list[tuple[DiGraph, ExpansionOutcome]] = []
    failure = None
    for graph in stable_unlocked:
        try:
            outcome = expand_to_preorder(graph)
        except Exception as exc:  # any breach is a counterexample
            failure = (graph, f"expansion raised: {exc}")
            break
        result = outcome.result
        if not is_preordered(result):
            failure = (graph, "result not preordered")
            break
        if not is_stable(result)[0]:
            failure = (graph, "result not stable")
            break
        if len(result.non_loop_arrows()) != len(graph.non_loop_arrows()):
            failure = (graph, "non-loop arrows not conserved")
            break
        cap = len(graph.vertices) + 2 * len(graph.non_loop_arrows())
        if outcome.iterations > cap:
            failure = (graph, "iteration cap exceeded")
            break
        outcomes.append((graph, outcome))
    checks.append(
        CheckResult(
            "main-theorem-positive",
            failure is None,
            len(stable_unlocked),
            emit_digraph(failure[0]) if failure else None,
            failure[1] if failure else None,
        )
    )

    # (b) negative direction, bounded consistency at n <= 4.
    failure = None
    small_locked = [g for g in stable_locked if len(g.vertices) <= 4]
    for graph in small_locked:
        if oracle_preorder_expansion(graph, 3) is not None:
            failure = (graph, "bounded oracle found an expansion of a locked graph")
            break
    checks.append(
        CheckResult(
            "main-theorem-negative-consistency",
            failure is None,
            len(small_locked),
            emit_digraph(failure[0]) if failure else None,
            failure[1] if failure else None,
        )
    )

    # (c) every clasp of a stable graph is a soloist.
    failure = None
    for graph in stable_all:
        if not set(clasp_vertices(graph)) <= set(soloists(graph)):
            failure = (graph, "clasp that is not a soloist")
            break
    checks.append(
        CheckResult(
            "clasp-implies-soloist",
            failure is None,
            len(stable_all),
            emit_digraph(failure[0]) if failure else None,
            failure[1] if failure else None,
        )
    )

    # (d) soloist biconditionals.
    failure = None
    instances = 0
    for graph in stable_all:
        checked, violation = _soloist_lemma_instances(graph)
        instances += checked
        if violation is not None:
            failure = (graph, violation)
            break
    checks.append(
        CheckResult(
            "soloist-lemma",
            failure is None,
            instances,
            emit_digraph(failure[0]) if failure else None,
            failure[1] if failure else None,
        )
    )

    # (e) compression theorem and transitive-inducing on generated maps.
    failure = None
    map_count = 0
    for graph, outcome in outcomes:
        for cmap in _replay_step_maps(outcome) + [outcome.mapping]:
            map_count += 1
            problem = _compression_theorem_holds(cmap)
            if problem is not None:
                failure = (graph, problem)
                break
        if failure:
            break
    if failure is None:
        from .compression import split_vertex
        from .errors import InvalidSplit

        for n in range(1, min(3, n_max) + 1):
            for graph in enumerate_reflexive(n, "up-to-iso"):
                for vertex in graph.vertices:
                    ins = [u for u in graph.in_neighbors(vertex) if u != vertex]
                    outs = [u for u in graph.out_neighbors(vertex) if u != vertex]
                    for r in range(len(ins) + 1):
                        for ins_sub in itertools.combinations(ins, r):
                            for q in range(len(outs) + 1):
                                for outs_sub in itertools.combinations(outs, q):
                                    try:
                                        _, cmap = split_vertex(
                                            graph, vertex, ins_sub, outs_sub, "t1"
                                        )
                                    except InvalidSplit:
                                        continue
                                    map_count += 1
                                    problem = _compression_theorem_holds(cmap)
                                    if problem is not None:
                                        failure = (graph, problem)
                                        break
                                if failure:
                                    break
                            if failure:
                                break
                        if failure:
                            break
                    if failure:
                        break
                if failure:
                    break
            if failure:
                break
    checks.append(
        CheckResult(
            "compression-theorem",
            failure is None,
            map_count,
            emit_digraph(failure[0]) if failure else None,
            failure[1] if failure else None,
        )
    )

    # (f) corollary consistency on acyclic-star members with known status.
    from .digraph import is_star_acyclic

    obstructions = []
    for predicate, bound in (
        ("balanced", min(4, n_max)),
        ("stable-given-balanced", min(4, n_max)),
        ("unlocked-given-stable", min(5, n_max)),
    ):
        for member in minimal_obstructions(predicate, bound).members:
            if is_star_acyclic(member):
                obstructions.append(member)
    failure = None
    instances = 0
    statuses = [(g, True) for g in stable_unlocked] + [
        (g, False) for g in stable_locked if len(g.vertices) <= 4
    ]
    for graph, expected in statuses:
        if not is_star_acyclic(graph):
            continue
        instances += 1
        free = not any(contains_induced(graph, h) for h in obstructions)
        if free != expected:
            failure = (
                graph,
                f"obstruction-free={free} but compression-of-preordered={expected}",
            )
            break
    checks.append(
        CheckResult(
            "corollary-acyclic-star",
            failure is None,
            instances,
            emit_digraph(failure[0]) if failure else None,
            failure[1] if failure else None,
        )
    )

    return ValidationReport(n_max, tuple(counts), tuple(checks))
