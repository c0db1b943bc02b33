#!/usr/bin/env python3
"""
Tropical covers of line, caterpillar and cycle targets
- Left-to-right sweeps over open edge germs: one vertex per insertion point for
  descendant covers, a full fiber of vertices per leg point for Hurwitz covers
- Cycle targets cut at a base point and glue the last open germs back to the first
- Cover multiplicities, automorphism counts and isomorphism dedupe (networkx matching)
- Tropical descendant invariants, tropical Hurwitz numbers, the degeneration splitting check
- Deterministic JSON and DOT emission
"""
from __future__ import annotations

import itertools
import logging
import time
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher, categorical_edge_match, categorical_node_match
from networkx.utils import UnionFind

from exact_arith import format_rational
from local_gw import vertex_multiplicity
from partitions import (
    EMPTY, DegreeMismatch, GWHError, Partition, centralizer_size, enumerate_partitions,
    format_partition, make_partition, merge, ones, remove_parts, size, sub_partitions,
)
from perm_hurwitz import HurwitzProblem, local_hurwitz

logger = logging.getLogger(__name__)

LINE = "line"
CATERPILLAR = "caterpillar"
CYCLE = "cycle"

# origin of germs entering from the left boundary (or across the base point of a cycle)
BOUNDARY = -1

Germ = Tuple[int, int]  # (origin vertex or BOUNDARY, weight)
EdgeKey = Tuple[int, int, int, int]  # (left, right, weight, winding) with BOUNDARY for open sides


@dataclass(frozen=True)
class TargetShape:
    kind: str
    insertions: Tuple[int, ...] = ()
    vertical: Tuple[Partition, ...] = ()
    left: Partition = EMPTY
    right: Partition = EMPTY

    def __post_init__(self):
        if self.kind not in (LINE, CATERPILLAR, CYCLE):
            raise GWHError(f"unknown target kind {self.kind!r}")
        object.__setattr__(self, "insertions", tuple(int(k) for k in self.insertions))
        object.__setattr__(self, "vertical", tuple(make_partition(mu) for mu in self.vertical))
        object.__setattr__(self, "left", make_partition(self.left))
        object.__setattr__(self, "right", make_partition(self.right))
        if any(k < 0 for k in self.insertions):
            raise GWHError("insertion powers must be non-negative")
        if self.kind == CATERPILLAR and self.insertions:
            raise GWHError("caterpillar targets carry ramification profiles only")
        if self.kind == LINE and self.vertical:
            raise GWHError("line targets carry descendant insertions only")
        if self.kind == CYCLE and (self.left or self.right):
            raise GWHError("cycle targets have no horizontal ends")
        if self.kind == CYCLE and self.insertions and self.vertical:
            raise GWHError("a cycle target carries insertions or vertical profiles, not both")

    @classmethod
    def line(cls, insertions: Sequence[int] = ()) -> "TargetShape":
        return cls(LINE, insertions=tuple(insertions))

    @classmethod
    def caterpillar(cls, profiles: Sequence[Partition]) -> "TargetShape":
        """First and last profiles sit on the horizontal ends, the rest on the legs."""
        profiles = [make_partition(mu) for mu in profiles]
        if len(profiles) < 2:
            raise GWHError("a caterpillar needs at least its two horizontal end profiles")
        return cls(CATERPILLAR, vertical=tuple(profiles[1:-1]), left=profiles[0], right=profiles[-1])

    @classmethod
    def cycle(cls, insertions: Sequence[int] = (), vertical: Sequence[Partition] = ()) -> "TargetShape":
        return cls(CYCLE, insertions=tuple(insertions), vertical=tuple(vertical))

    @property
    def points(self) -> int:
        return len(self.vertical) if self.vertical else len(self.insertions)

    def profiles(self) -> Tuple[Partition, ...]:
        if self.kind == CATERPILLAR:
            return (self.left,) + self.vertical + (self.right,)
        return self.vertical

    def to_json(self) -> Dict:
        out: Dict = {"kind": self.kind}
        if self.insertions:
            out["insertions"] = list(self.insertions)
        if self.vertical:
            out["vertical"] = [format_partition(mu) for mu in self.vertical]
        if self.kind == CATERPILLAR:
            out["left"] = format_partition(self.left)
            out["right"] = format_partition(self.right)
        return out


def caterpillar_for(profiles: Sequence[Partition], d: int) -> TargetShape:
    """Caterpillar for a genus-0 Hurwitz problem, padding missing end profiles with (1^d)."""
    profiles = [make_partition(mu) for mu in profiles]
    while len(profiles) < 2:
        profiles.append(ones(d))
    return TargetShape.caterpillar(profiles)


@dataclass(frozen=True)
class CoverVertex:
    position: int
    genus: int
    vertical: Partition = EMPTY
    marked: Partition = EMPTY

    def to_json(self) -> Dict:
        out: Dict = {"position": self.position, "genus": self.genus}
        if self.vertical:
            out["vertical"] = format_partition(self.vertical)
        if self.marked:
            out["marked"] = format_partition(self.marked)
        return out


@dataclass(frozen=True)
class EdgeClass:
    """Parallel edges with the same attachments, weight and winding; None is an open side."""

    left: Optional[int]
    right: Optional[int]
    weight: int
    multiplicity: int = 1
    winding: int = 0

    @property
    def bounded(self) -> bool:
        return self.left is not None and self.right is not None

    @property
    def free(self) -> bool:
        return self.left is None and self.right is None

    def sort_key(self) -> Tuple:
        left = -1 if self.left is None else self.left
        right = 1 << 30 if self.right is None else self.right
        return (left, right, self.weight, self.winding, self.multiplicity)

    def to_json(self) -> Dict:
        out = {"left": self.left, "right": self.right, "weight": self.weight,
               "multiplicity": self.multiplicity}
        if self.winding:
            out["winding"] = self.winding
        return out


@dataclass(frozen=True)
class TropicalCover:
    target: TargetShape
    vertices: Tuple[CoverVertex, ...]
    edges: Tuple[EdgeClass, ...]

    @classmethod
    def assemble(cls, target: TargetShape, vertices: Sequence[CoverVertex],
                 edges: Mapping[EdgeKey, int]) -> "TropicalCover":
        classes = []
        for (left, right, weight, winding), m in edges.items():
            if m <= 0:
                continue
            classes.append(EdgeClass(None if left == BOUNDARY else left,
                                     None if right == BOUNDARY else right, weight, m, winding))
        classes.sort(key=EdgeClass.sort_key)
        return cls(target, tuple(vertices), tuple(classes))

    def degree(self) -> int:
        if self.target.kind == CYCLE:
            return sum(e.weight * e.multiplicity * e.winding for e in self.edges)
        return sum(e.weight * e.multiplicity for e in self.edges if e.left is None)

    def sides(self, v: int) -> Tuple[Partition, Partition]:
        """Left and right edge weights at vertex v; loops count on both sides."""
        left: List[int] = []
        right: List[int] = []
        for e in self.edges:
            if e.right == v:
                left.extend([e.weight] * e.multiplicity)
            if e.left == v:
                right.extend([e.weight] * e.multiplicity)
        return make_partition(left), make_partition(right)

    def ends(self) -> Tuple[Partition, Partition]:
        left = [e.weight for e in self.edges if e.left is None and self.target.kind != CYCLE
                for _ in range(e.multiplicity)]
        right = [e.weight for e in self.edges if e.right is None and self.target.kind != CYCLE
                 for _ in range(e.multiplicity)]
        return make_partition(left), make_partition(right)

    def component_genera(self) -> List[int]:
        uf = UnionFind(range(len(self.vertices)))
        for e in self.edges:
            if e.bounded:
                uf.union(e.left, e.right)
        genera: Dict[int, int] = defaultdict(int)
        edges_in: Dict[int, int] = defaultdict(int)
        verts_in: Dict[int, int] = defaultdict(int)
        for i, v in enumerate(self.vertices):
            root = uf[i]
            genera[root] += v.genus
            verts_in[root] += 1
        for e in self.edges:
            if e.bounded:
                edges_in[uf[e.left]] += e.multiplicity
        out = [genera[r] + edges_in[r] - verts_in[r] + 1 for r in verts_in]
        for e in self.edges:
            if e.free:
                out.extend([1 if self.target.kind == CYCLE else 0] * e.multiplicity)
        return out

    def genus(self) -> int:
        """Arithmetic genus with 2 - 2g = sum over components of (2 - 2g_c)."""
        return 1 - sum(1 - g for g in self.component_genera())

    def is_connected(self) -> bool:
        return len(self.component_genera()) == 1

    def sort_key(self) -> Tuple:
        return (tuple((v.position, v.genus, v.vertical, v.marked) for v in self.vertices),
                tuple(e.sort_key() for e in self.edges))

    def to_json(self) -> Dict:
        return {
            "target": self.target.to_json(),
            "vertices": [dict(id=i, **v.to_json()) for i, v in enumerate(self.vertices)],
            "edges": [e.to_json() for e in self.edges],
            "genus": self.genus(),
            "connected": self.is_connected(),
        }

    def to_dot(self, name: str = "cover") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        if any(e.left is None and not e.free for e in self.edges) or any(e.free and not e.winding for e in self.edges):
            lines.append('  L [shape=point];')
        if any(e.right is None and not e.free for e in self.edges) or any(e.free and not e.winding for e in self.edges):
            lines.append('  R [shape=point];')
        for i, v in enumerate(self.vertices):
            label = f"v{i} @{v.position} g={v.genus}"
            if v.vertical:
                label += f" |{format_partition(v.vertical)}"
            if v.marked:
                label += f" *{format_partition(v.marked)}"
            lines.append(f'  v{i} [label="{label}"];')
        for c, e in enumerate(self.edges):
            label = f"{e.weight}" + (f" x{e.multiplicity}" if e.multiplicity > 1 else "")
            if e.winding:
                label += f" r={e.winding}"
            if e.free and e.winding:
                lines.append(f'  c{c} [shape=circle,label=""];')
                lines.append(f'  c{c} -> c{c} [label="{label}"];')
                continue
            src = "L" if e.left is None else f"v{e.left}"
            dst = "R" if e.right is None else f"v{e.right}"
            lines.append(f'  {src} -> {dst} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class CoverMultiplicity:
    automorphisms: int
    vertex_factor: Fraction
    edge_factor: int
    free_factor: Fraction = Fraction(1)

    @property
    def automorphism_factor(self) -> Fraction:
        return Fraction(1, self.automorphisms)

    @property
    def total(self) -> Fraction:
        return self.automorphism_factor * self.vertex_factor * self.edge_factor * self.free_factor

    def to_json(self) -> Dict[str, str]:
        return {
            "automorphisms": str(self.automorphisms),
            "vertex_factor": format_rational(self.vertex_factor),
            "edge_factor": str(self.edge_factor),
            "free_factor": format_rational(self.free_factor),
            "total": format_rational(self.total),
        }


CoverList = List[Tuple[TropicalCover, CoverMultiplicity]]


# automorphisms and isomorphism classes

def parallel_factor(cover: TropicalCover) -> int:
    """prod m! over edge classes and over repeated vertical ends at each vertex."""
    total = prod(factorial(e.multiplicity) for e in cover.edges)
    for v in cover.vertices:
        for mu in (v.vertical, v.marked):
            total *= prod(factorial(m) for m in Counter(mu).values())
    return total


def cover_graph(cover: TropicalCover) -> nx.DiGraph:
    """Vertices carry position, genus, vertical and end data; bundles of parallel edges become one arc."""
    left_ends: Dict[int, List[int]] = defaultdict(list)
    right_ends: Dict[int, List[int]] = defaultdict(list)
    bundles: Dict[Tuple[int, int], List[Tuple[int, int, int]]] = defaultdict(list)
    for e in cover.edges:
        if e.free:
            continue
        if e.left is None:
            left_ends[e.right].extend([e.weight] * e.multiplicity)
        elif e.right is None:
            right_ends[e.left].extend([e.weight] * e.multiplicity)
        else:
            bundles[(e.left, e.right)].append((e.weight, e.winding, e.multiplicity))
    g = nx.DiGraph()
    for i, v in enumerate(cover.vertices):
        label = (v.position, v.genus, v.vertical, v.marked,
                 tuple(sorted(left_ends[i])), tuple(sorted(right_ends[i])))
        g.add_node(i, label=str(label))
    for (a, b), bundle in bundles.items():
        g.add_edge(a, b, bundle=str(tuple(sorted(bundle))))
    return g


_node_match = categorical_node_match("label", None)
_edge_match = categorical_edge_match("bundle", None)


def _free_signature(cover: TropicalCover) -> Tuple:
    return tuple(sorted((e.weight, e.winding, e.multiplicity) for e in cover.edges if e.free))


def automorphism_count(cover: TropicalCover) -> int:
    """|Aut| = (vertex permutations preserving all data) * prod m! over parallel classes."""
    g = cover_graph(cover)
    vertex_auts = 1
    if g.number_of_nodes() > 1:
        matcher = DiGraphMatcher(g, g, node_match=_node_match, edge_match=_edge_match)
        vertex_auts = sum(1 for _ in matcher.isomorphisms_iter())
    return vertex_auts * parallel_factor(cover)


def _signature(cover: TropicalCover, g: nx.DiGraph) -> Tuple:
    wl = nx.weisfeiler_lehman_graph_hash(g, node_attr="label", edge_attr="bundle") if g.number_of_nodes() else ""
    return (g.number_of_nodes(), g.number_of_edges(), wl, _free_signature(cover))


def isomorphic(a: TropicalCover, b: TropicalCover) -> bool:
    if _free_signature(a) != _free_signature(b):
        return False
    ga, gb = cover_graph(a), cover_graph(b)
    return DiGraphMatcher(ga, gb, node_match=_node_match, edge_match=_edge_match).is_isomorphic()


def dedupe_covers(covers: Sequence[TropicalCover]) -> List[TropicalCover]:
    """One representative per isomorphism class: bucket by hash, then exact matching."""
    buckets: Dict[Tuple, List[Tuple[TropicalCover, nx.DiGraph]]] = defaultdict(list)
    reps: List[TropicalCover] = []
    for cover in covers:
        g = cover_graph(cover)
        bucket = buckets[_signature(cover, g)]
        placed = False
        for _, h in bucket:
            if DiGraphMatcher(g, h, node_match=_node_match, edge_match=_edge_match).is_isomorphic():
                placed = True
                break
        if not placed:
            bucket.append((cover, g))
            reps.append(cover)
    return reps


# multiplicities

def _edge_and_free_factors(cover: TropicalCover) -> Tuple[int, Fraction]:
    edge_factor = 1
    free_factor = Fraction(1)
    for e in cover.edges:
        if e.bounded:
            edge_factor *= e.weight ** e.multiplicity
        elif e.free:
            # lines weigh 1/w, circles 1/winding
            free_factor *= Fraction(1, e.winding if e.winding else e.weight) ** e.multiplicity
    return edge_factor, free_factor


def descendant_multiplicity(cover: TropicalCover) -> CoverMultiplicity:
    vertex_factor = Fraction(1)
    for i, v in enumerate(cover.vertices):
        left, right = cover.sides(i)
        vertex_factor *= vertex_multiplicity(v.genus, left, right)
    edge_factor, free_factor = _edge_and_free_factors(cover)
    # vertices sit over distinct points, so only parallel classes permute
    return CoverMultiplicity(parallel_factor(cover), vertex_factor, edge_factor, free_factor)


def vertex_genus(left: Partition, right: Partition, vertical: Partition) -> Optional[int]:
    """Local Riemann-Hurwitz over a trivalent target vertex; None when no genus fits."""
    d = size(left)
    chi = 2 * d - sum(w - 1 for w in left + right + vertical)
    if chi % 2 or chi > 2:
        return None
    return (2 - chi) // 2


def hurwitz_multiplicity(cover: TropicalCover) -> CoverMultiplicity:
    vertex_factor = Fraction(1)
    for i, v in enumerate(cover.vertices):
        left, right = cover.sides(i)
        vertex_factor *= local_hurwitz(v.genus, 0, [left, right, merge(v.vertical, v.marked)])
    edge_factor, free_factor = _edge_and_free_factors(cover)
    return CoverMultiplicity(automorphism_count(cover), vertex_factor, edge_factor, free_factor)


# sweeps

def _start(profile: Partition) -> Counter:
    return Counter({(BOUNDARY, w): m for w, m in Counter(profile).items()})


def _weights(open_: Counter) -> Partition:
    return make_partition(w for (_, w), m in open_.items() for _ in range(m))


def _descendant_sweep(start: Counter, insertions: Sequence[int]) -> Iterator[Tuple[List[Tuple[int, Partition, Partition]], Counter, Counter]]:
    """Yield (genus, left, right) per point, the edges closed so far and the germs still open."""
    n = len(insertions)

    def walk(i: int, open_: Counter, vertices: List, edges: Counter):
        if i == n:
            yield vertices, edges, open_
            return
        k = insertions[i]
        classes = sorted((g, m) for g, m in open_.items() if m)
        for counts in itertools.product(*(range(m + 1) for _, m in classes)):
            taken = sum(counts)
            # at least one left and one right edge
            if taken == 0 or taken > k + 1:
                continue
            left = make_partition(w for ((_, w), _), c in zip(classes, counts) for _ in range(c))
            weight = size(left)
            rest = Counter(open_)
            closed = Counter(edges)
            for (germ, _), c in zip(classes, counts):
                if c:
                    rest[germ] -= c
                    closed[(germ[0], i, germ[1], 0)] += c
            rest = +rest
            for g_v in range((k + 1 - taken) // 2 + 1):
                length = k + 2 - 2 * g_v - taken
                if length < 1 or length > weight:
                    continue
                for right in enumerate_partitions(weight, max_length=length):
                    if len(right) != length:
                        continue
                    emitted = Counter(rest)
                    for w in right:
                        emitted[(i, w)] += 1
                    yield from walk(i + 1, emitted, vertices + [(g_v, left, right)], closed)

    yield from walk(0, start, [], Counter())


def _expected_genus(insertions: Sequence[int], mu: Partition, nu: Partition,
                    genus: Optional[int], connected: bool) -> Optional[int]:
    twice = sum(insertions) + 2 - len(mu) - len(nu)
    if twice % 2:
        return None
    g = twice // 2
    if genus is not None and genus != g:
        return None
    if connected and g < 0:
        return None
    return g


def enumerate_descendant_covers(mu: Partition, nu: Partition, insertions: Sequence[int],
                                genus: Optional[int] = None, connected: bool = False) -> CoverList:
    """All line covers for <mu| tau_k1 ... tau_kn |nu>, one vertex over each insertion point."""
    mu, nu = make_partition(mu), make_partition(nu)
    if size(mu) != size(nu):
        raise DegreeMismatch(f"|mu| = {size(mu)} but |nu| = {size(nu)}")
    target = TargetShape.line(insertions)
    g = _expected_genus(target.insertions, mu, nu, genus, connected)
    if g is None:
        return []
    started = time.perf_counter()
    out: CoverList = []
    for vertices, edges, open_ in _descendant_sweep(_start(mu), target.insertions):
        if _weights(open_) != nu:
            continue
        closed = Counter(edges)
        for (origin, w), m in open_.items():
            if m:
                closed[(origin, BOUNDARY, w, 0)] += m
        cover = TropicalCover.assemble(
            target, [CoverVertex(i, gv) for i, (gv, _, _) in enumerate(vertices)], closed)
        if connected and not cover.is_connected():
            continue
        out.append((cover, descendant_multiplicity(cover)))
    out.sort(key=lambda cm: cm[0].sort_key())
    logger.debug(f"[COVERS] line mu={mu} nu={nu} k={target.insertions} g={g}: {len(out)} covers "
                 f"({time.perf_counter() - started:.3f}s)")
    return out


def descendant_invariant(mu: Partition, nu: Partition, insertions: Sequence[int],
                         genus: Optional[int] = None, connected: bool = False) -> Fraction:
    return sum((m.total for _, m in enumerate_descendant_covers(mu, nu, insertions, genus, connected)),
               Fraction(0))


def _chains(sources: List[int], sinks: Counter, lines: int) -> Iterator[Tuple[Counter, int]]:
    """Glue open germs (by origin) to germs re-entering at the base point (by destination).

    A chain a -> b may run through j vertex-free lines first; yields the chain counts
    keyed (a, b, j) and the number of lines left over for circles.
    """
    def walk(idx: int, remaining: Counter, budget: int, prev: Optional[Tuple[int, int, int]], acc: Counter):
        if idx == len(sources):
            yield acc, budget
            return
        a = sources[idx]
        for b in sorted(remaining):
            if not remaining[b]:
                continue
            for j in range(budget + 1):
                choice = (a, b, j)
                if prev is not None and prev[0] == a and choice < prev:
                    continue
                remaining[b] -= 1
                acc[choice] += 1
                yield from walk(idx + 1, remaining, budget - j, choice, acc)
                acc[choice] -= 1
                if not acc[choice]:
                    del acc[choice]
                remaining[b] += 1

    for chains, left in walk(0, Counter(sinks), lines, None, Counter()):
        yield Counter(chains), left


def _glue_cycle(edges: Counter, open_: Counter) -> Iterator[Counter]:
    """Close a swept cycle: match final open germs to the base-point germs weight by weight."""
    inner = Counter({key: m for key, m in edges.items() if key[0] != BOUNDARY})
    per_weight: Dict[int, Tuple[List[int], Counter, int]] = {}
    for w in sorted({w for (_, w) in open_} | {key[2] for key in edges if key[0] == BOUNDARY}):
        sources = sorted(origin for (origin, ww), m in open_.items() if ww == w and origin != BOUNDARY
                         for _ in range(m))
        sinks = Counter({key[1]: m for key, m in edges.items() if key[0] == BOUNDARY and key[2] == w})
        per_weight[w] = (sources, sinks, open_.get((BOUNDARY, w), 0))

    options = []
    for w, (sources, sinks, lines) in per_weight.items():
        glued = []
        for chains, leftover in _chains(sources, sinks, lines):
            for circles in enumerate_partitions(leftover):
                part = Counter()
                for (a, b, j), m in chains.items():
                    part[(a, b, w, j + 1)] += m
                for r in circles:
                    part[(BOUNDARY, BOUNDARY, w, r)] += 1
                glued.append(part)
        options.append(glued)
    for combo in itertools.product(*options):
        closed = Counter(inner)
        for part in combo:
            closed.update(part)
        yield closed


def enumerate_elliptic_covers(d: int, insertions: Sequence[int], genus: Optional[int] = None,
                              connected: bool = False) -> CoverList:
    """Descendant covers of the cycle target: sum k_i = 2g - 2, one vertex per insertion point."""
    if d < 1:
        raise DegreeMismatch("elliptic covers need positive degree")
    target = TargetShape.cycle(insertions=insertions)
    g = _expected_genus(target.insertions, EMPTY, EMPTY, genus, connected)
    if g is None:
        return []
    started = time.perf_counter()
    raw: List[TropicalCover] = []
    for lam in enumerate_partitions(d):
        for vertices, edges, open_ in _descendant_sweep(_start(lam), target.insertions):
            if _weights(open_) != lam:
                continue
            verts = [CoverVertex(i, gv) for i, (gv, _, _) in enumerate(vertices)]
            for closed in _glue_cycle(edges, open_):
                raw.append(TropicalCover.assemble(target, verts, closed))
    out: CoverList = []
    for cover in sorted(set(raw), key=TropicalCover.sort_key):
        if connected and not cover.is_connected():
            continue
        out.append((cover, descendant_multiplicity(cover)))
    logger.debug(f"[COVERS] cycle d={d} k={target.insertions} g={g}: {len(out)} covers "
                 f"({time.perf_counter() - started:.3f}s)")
    return out


def elliptic_invariant(d: int, insertions: Sequence[int], genus: Optional[int] = None,
                       connected: bool = False) -> Fraction:
    return sum((m.total for _, m in enumerate_elliptic_covers(d, insertions, genus, connected)), Fraction(0))


# Hurwitz covers

def _set_partitions(items: List) -> Iterator[List[List]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for blocks in _set_partitions(rest):
        for i in range(len(blocks)):
            yield blocks[:i] + [[first] + blocks[i]] + blocks[i + 1:]
        yield [[first]] + blocks


def _distribute(eta: Partition, degrees: Sequence[int]) -> Iterator[Tuple[Partition, ...]]:
    if not degrees:
        if not eta:
            yield ()
        return
    for part in sub_partitions(eta):
        if size(part) == degrees[0]:
            for rest in _distribute(remove_parts(eta, part), degrees[1:]):
                yield (part,) + rest


def _fibers(open_: Counter, eta: Partition) -> Iterator[List[Tuple[Tuple[Germ, ...], Partition, Partition, int]]]:
    """Group every open germ into vertices over a leg point, share eta out, choose right sides."""
    items = sorted(open_.elements())
    seen = set()
    for blocks in _set_partitions(items):
        key = tuple(sorted(tuple(sorted(b)) for b in blocks))
        if key in seen:
            continue
        seen.add(key)
        degrees = [sum(w for _, w in block) for block in key]
        for verticals in _distribute(eta, degrees):
            per_vertex = []
            for block, vert, dv in zip(key, verticals, degrees):
                left = make_partition(w for _, w in block)
                options = []
                for right in enumerate_partitions(dv):
                    gv = vertex_genus(left, right, vert)
                    if gv is not None and local_hurwitz(gv, 0, [left, right, vert]):
                        options.append((block, vert, right, gv))
                if not options:
                    break
                per_vertex.append(options)
            else:
                for fiber in itertools.product(*per_vertex):
                    yield list(fiber)


def _hurwitz_sweep(start: Counter, legs: Sequence[Partition]) -> Iterator[Tuple[List[CoverVertex], Counter, Counter]]:
    def walk(i: int, open_: Counter, vertices: List[CoverVertex], edges: Counter):
        if i == len(legs):
            yield vertices, edges, open_
            return
        for fiber in _fibers(open_, legs[i]):
            emitted = Counter()
            closed = Counter(edges)
            placed = list(vertices)
            for block, vert, right, gv in fiber:
                vid = len(placed)
                placed.append(CoverVertex(i, gv, vert))
                for origin, w in block:
                    closed[(origin, vid, w, 0)] += 1
                for w in right:
                    emitted[(vid, w)] += 1
            yield from walk(i + 1, emitted, placed, closed)

    yield from walk(0, start, [], Counter())


def _hurwitz_genus(target: TargetShape, d: int) -> Optional[int]:
    h = 1 if target.kind == CYCLE else 0
    return HurwitzProblem(d, target.profiles(), target_genus=h, connected=False).riemann_hurwitz_genus()


def enumerate_hurwitz_covers(target: TargetShape, degree: Optional[int] = None,
                             genus: Optional[int] = None, connected: bool = False) -> CoverList:
    """Tropical covers of a caterpillar or a cycle with vertical profiles, up to isomorphism."""
    if target.kind == LINE:
        raise GWHError("Hurwitz covers need a caterpillar or cycle target")
    profiles = target.profiles()
    sizes = {size(mu) for mu in profiles}
    if degree is not None:
        sizes.add(degree)
    if len(sizes) != 1:
        if not sizes:
            raise DegreeMismatch("a cycle target without profiles needs an explicit degree")
        raise DegreeMismatch(f"profiles of different sizes {sorted(sizes)}")
    d = sizes.pop()
    if d < 1:
        raise DegreeMismatch("Hurwitz covers need positive degree")
    if target.kind == CYCLE and not target.vertical:
        target = TargetShape.cycle(vertical=(ones(d),))
    g = _hurwitz_genus(target, d)
    if g is None or (genus is not None and genus != g) or (connected and g < 0):
        return []
    started = time.perf_counter()
    raw: List[TropicalCover] = []
    if target.kind == CATERPILLAR:
        for vertices, edges, open_ in _hurwitz_sweep(_start(target.left), target.vertical):
            if _weights(open_) != target.right:
                continue
            closed = Counter(edges)
            for (origin, w), m in open_.items():
                if m:
                    closed[(origin, BOUNDARY, w, 0)] += m
            raw.append(TropicalCover.assemble(target, vertices, closed))
    else:
        for lam in enumerate_partitions(d):
            for vertices, edges, open_ in _hurwitz_sweep(_start(lam), target.vertical):
                if _weights(open_) != lam:
                    continue
                for closed in _glue_cycle(edges, open_):
                    raw.append(TropicalCover.assemble(target, vertices, closed))
    reps = dedupe_covers(raw)
    out: CoverList = []
    for cover in sorted(reps, key=TropicalCover.sort_key):
        if connected and not cover.is_connected():
            continue
        out.append((cover, hurwitz_multiplicity(cover)))
    logger.debug(f"[COVERS] {target.kind} d={d} profiles={profiles} g={g}: {len(raw)} raw, "
                 f"{len(out)} classes ({time.perf_counter() - started:.3f}s)")
    return out


def hurwitz_tropical(target: TargetShape, degree: Optional[int] = None, genus: Optional[int] = None,
                     connected: bool = False) -> Fraction:
    return sum((m.total for _, m in enumerate_hurwitz_covers(target, degree, genus, connected)), Fraction(0))


# degeneration

@dataclass(frozen=True)
class SplitReport:
    mu: Partition
    nu: Partition
    insertions: Tuple[int, ...]
    position: int
    direct: Fraction
    glued: Fraction
    terms: Tuple[Tuple[Partition, Fraction, Fraction, Fraction], ...]

    @property
    def holds(self) -> bool:
        return self.direct == self.glued

    def to_json(self) -> Dict:
        return {
            "mu": format_partition(self.mu),
            "nu": format_partition(self.nu),
            "insertions": list(self.insertions),
            "position": self.position,
            "direct": format_rational(self.direct),
            "glued": format_rational(self.glued),
            "holds": self.holds,
            "terms": [{"eta": format_partition(eta), "z": format_rational(z),
                       "left": format_rational(a), "right": format_rational(b)}
                      for eta, z, a, b in self.terms],
        }


def split_at_point(mu: Partition, nu: Partition, insertions: Sequence[int], position: int) -> SplitReport:
    """Cut the target before insertion `position` and glue: sum_eta z(eta) <mu|..|eta> <eta|..|nu>."""
    mu, nu = make_partition(mu), make_partition(nu)
    insertions = tuple(insertions)
    if not 0 <= position <= len(insertions):
        raise GWHError(f"split position {position} outside 0..{len(insertions)}")
    d = size(mu)
    direct = descendant_invariant(mu, nu, insertions)
    glued = Fraction(0)
    terms = []
    for eta in enumerate_partitions(d):
        a = descendant_invariant(mu, eta, insertions[:position])
        if not a:
            continue
        b = descendant_invariant(eta, nu, insertions[position:])
        if not b:
            continue
        z = Fraction(centralizer_size(eta))
        glued += z * a * b
        terms.append((eta, z, a, b))
    report = SplitReport(mu, nu, insertions, position, direct, glued, tuple(terms))
    if not report.holds:
        logger.error(f"[COVERS] split mismatch mu={mu} nu={nu} k={insertions} at {position}: "
                     f"{direct} != {glued}")
    return report


def covers_to_json(covers: CoverList) -> List[Dict]:
    return [dict(cover.to_json(), multiplicity=mult.to_json()) for cover, mult in covers]
