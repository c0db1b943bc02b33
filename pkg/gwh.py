#!/usr/bin/env python3
"""
GW/H correspondence machinery
- Local expansion of a descendant vertex into tripod covers weighted by completion coefficients
- Cover-by-cover surgery: descendant line covers -> weighted caterpillar Hurwitz covers
- Collapse of a surgery output back onto its descendant cover
- Completed-cycle substitution into the multilinear extended Hurwitz function
"""
from __future__ import annotations

import itertools
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from exact_arith import format_rational
from local_gw import VertexData, completion_coefficients, connected_one_point
from partitions import (
    EMPTY, ConstraintViolation, DegreeMismatch, GWHError, Partition, WElement, aut_count,
    enumerate_partitions, format_partition, make_partition, merge, ones, remove_parts, size, sub_partitions,
)
from perm_hurwitz import eval_hurwitz_multilinear, local_hurwitz
from trop_covers import (
    BOUNDARY, CATERPILLAR, LINE, CoverMultiplicity, CoverVertex, TargetShape, TropicalCover, dedupe_covers,
    descendant_multiplicity, hurwitz_multiplicity, vertex_genus,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class TripodComponent:
    """One vertex over the tripod: left/right flags, marked vertical ends and unmarked 1-ends."""

    left: Partition
    right: Partition
    marked: Partition
    unmarked: int
    genus: int

    @property
    def degree(self) -> int:
        return size(self.left)

    @property
    def vertical(self) -> Partition:
        return merge(self.marked, ones(self.unmarked))

    def local_factor(self) -> Fraction:
        return local_hurwitz(self.genus, 0, [self.left, self.right, self.vertical])

    def automorphisms(self) -> int:
        return aut_count(self.left) * aut_count(self.right) * aut_count(self.marked) * factorial(self.unmarked)

    def to_json(self) -> Dict:
        return {"genus": self.genus, "left": format_partition(self.left), "right": format_partition(self.right),
                "marked": format_partition(self.marked), "unmarked": self.unmarked}


@dataclass(frozen=True)
class TripodCover:
    k: int
    components: Tuple[TripodComponent, ...]

    @property
    def marked_profile(self) -> Partition:
        return merge(*(c.marked for c in self.components))

    @property
    def genus(self) -> int:
        return 1 - sum(1 - c.genus for c in self.components)

    def automorphisms(self) -> int:
        total = prod(c.automorphisms() for c in self.components)
        return total * prod(factorial(m) for m in Counter(self.components).values())

    def rho_factor(self) -> Fraction:
        """rho_{k+1, mu_X} / k!"""
        return completion_coefficients(self.k).coefficient(self.marked_profile) / factorial(self.k)

    def weight(self) -> Fraction:
        local = prod((c.local_factor() for c in self.components), start=Fraction(1))
        return self.rho_factor() * local / self.automorphisms()

    def to_json(self) -> Dict:
        return {"k": self.k, "genus": self.genus, "marked_profile": format_partition(self.marked_profile),
                "components": [c.to_json() for c in self.components]}


def _component_splits(mu: Partition, nu: Partition) -> Iterator[Tuple[Tuple[Partition, Partition], ...]]:
    """Multisets of (left, right) blocks with equal sizes covering mu and nu."""
    if not mu and not nu:
        yield ()
        return
    if not mu or not nu:
        return
    head, tail = mu[0], mu[1:]
    for extra in sub_partitions(tail):
        left = merge((head,), extra)
        for right in sub_partitions(nu):
            if not right or size(right) != size(left):
                continue
            for rest in _component_splits(remove_parts(tail, extra), remove_parts(nu, right)):
                yield ((left, right),) + rest


def _components_over(left: Partition, right: Partition) -> Iterator[TripodComponent]:
    d = size(left)
    for unmarked in range(d):
        for marked in enumerate_partitions(d - unmarked):
            gv = vertex_genus(left, right, merge(marked, ones(unmarked)))
            if gv is None:
                continue
            comp = TripodComponent(left, right, marked, unmarked, gv)
            if comp.local_factor():
                yield comp


def local_expand(star: VertexData) -> List[Tuple[TripodCover, Fraction]]:
    """<mu|tau_k|nu> = sum_X (rho_{k+1,mu_X}/k!) prod H(v) / |Aut X| over admissible tripod covers X."""
    k = star.power
    if k < 0:
        raise ConstraintViolation(f"vertex {star} has negative descendant power", relation="dimension")
    seen = set()
    out: List[Tuple[TripodCover, Fraction]] = []
    for blocks in _component_splits(star.mu, star.nu):
        options = [list(_components_over(left, right)) for left, right in blocks]
        for choice in itertools.product(*options):
            x = TripodCover(k, tuple(sorted(choice)))
            if x in seen:
                continue
            seen.add(x)
            mu_x = x.marked_profile
            if 2 * x.genus + len(mu_x) + k - size(mu_x) != 2 * star.genus:
                continue
            w = x.weight()
            if w:
                out.append((x, w))
    out.sort(key=lambda xw: (xw[0].marked_profile, xw[0].components))
    total = sum((w for _, w in out), Fraction(0))
    expected = connected_one_point(star.genus, star.mu, star.nu)
    if total != expected:
        logger.error(f"[SURGERY] local expansion of {star} sums to {total}, expected {expected}")
        raise ConstraintViolation(f"local expansion of {star} sums to {total}, not {expected}",
                                  relation="local-expansion")
    logger.debug(f"[SURGERY] {star}: {len(out)} tripod covers")
    return out


# surgery

@dataclass(frozen=True)
class SurgeryEntry:
    cover: TropicalCover
    coefficient: Fraction
    multiplicity: CoverMultiplicity

    @property
    def degree(self) -> Fraction:
        return self.coefficient * self.multiplicity.total


@dataclass(frozen=True)
class SurgeryResult:
    source: TropicalCover
    source_multiplicity: Fraction
    entries: Tuple[SurgeryEntry, ...]

    @property
    def total(self) -> Fraction:
        return sum((e.degree for e in self.entries), Fraction(0))

    @property
    def holds(self) -> bool:
        return self.total == self.source_multiplicity

    def to_json(self) -> Dict:
        return {
            "source": self.source.to_json(),
            "source_multiplicity": format_rational(self.source_multiplicity),
            "total": format_rational(self.total),
            "entries": [dict(e.cover.to_json(), coefficient=format_rational(e.coefficient),
                             multiplicity=e.multiplicity.to_json()) for e in self.entries],
        }


def _split(ids: Sequence[int], counts: Sequence[int], offset: int = 0) -> Iterator[Dict[int, int]]:
    if offset == len(counts):
        if not ids:
            yield {}
        return
    for chosen in itertools.combinations(ids, counts[offset]):
        rest = [e for e in ids if e not in chosen]
        for tail in _split(rest, counts, offset + 1):
            out = dict(tail)
            out.update({e: offset for e in chosen})
            yield out


def _attachments(ids: Sequence[int], weights: Sequence[int], demands: Sequence[Partition]) -> Iterator[Dict[int, int]]:
    """Every way to hand the edge ends `ids` to components with the given flag multisets."""
    by_weight: Dict[int, List[int]] = defaultdict(list)
    for e in ids:
        by_weight[weights[e]].append(e)
    options = []
    for w, group in sorted(by_weight.items()):
        options.append(list(_split(group, [d.count(w) for d in demands])))
    for combo in itertools.product(*options):
        out: Dict[int, int] = {}
        for part in combo:
            out.update(part)
        yield out


def _glue(cover: TropicalCover, xs: Sequence[TripodCover]) -> Iterator[TropicalCover]:
    n = len(cover.vertices)
    single = [(e.left, e.right, e.weight) for e in cover.edges for _ in range(e.multiplicity)]
    weights = [w for _, _, w in single]
    mu, nu = cover.ends()
    per_vertex = []
    for i, x in enumerate(xs):
        incoming = [j for j, (_, r, _) in enumerate(single) if r == i]
        outgoing = [j for j, (l, _, _) in enumerate(single) if l == i]
        ins = list(_attachments(incoming, weights, [c.left for c in x.components]))
        outs = list(_attachments(outgoing, weights, [c.right for c in x.components]))
        per_vertex.append(list(itertools.product(ins, outs)))

    for choice in itertools.product(*per_vertex):
        vertices: List[CoverVertex] = []
        comp_id: Dict[Tuple[int, int], int] = {}
        for i, x in enumerate(xs):
            for c, comp in enumerate(x.components):
                comp_id[(i, c)] = len(vertices)
                vertices.append(CoverVertex(i, comp.genus, ones(comp.unmarked), comp.marked))
        edges: Counter = Counter()
        for j, (l, r, w) in enumerate(single):
            chain = [BOUNDARY if l is None else comp_id[(l, choice[l][1][j])]]
            lo = -1 if l is None else l
            hi = n if r is None else r
            for p in range(lo + 1, hi):
                # pass-through: w unmarked weight-1 vertical ends
                chain.append(len(vertices))
                vertices.append(CoverVertex(p, 0, ones(w)))
            chain.append(BOUNDARY if r is None else comp_id[(r, choice[r][0][j])])
            for a, b in zip(chain, chain[1:]):
                edges[(a, b, w, 0)] += 1
        vertical = [merge(*(merge(v.vertical, v.marked) for v in vertices if v.position == p)) for p in range(n)]
        target = TargetShape(kind=CATERPILLAR, vertical=tuple(vertical), left=mu, right=nu)
        yield TropicalCover.assemble(target, vertices, edges)


def tgwh_surgery(cover: TropicalCover) -> SurgeryResult:
    """Replace every vertex by its tripod expansions and thread passing edges through new vertices."""
    if cover.target.kind != LINE:
        raise GWHError("surgery takes covers of a line target")
    stars = []
    for i, v in enumerate(cover.vertices):
        left, right = cover.sides(i)
        star = VertexData(v.genus, left, right)
        if star.power != cover.target.insertions[i]:
            raise ConstraintViolation(f"vertex {i} has valence incompatible with tau_{cover.target.insertions[i]}",
                                      relation="valence")
        stars.append(star)
    expansions = [local_expand(star) for star in stars]
    entries: List[SurgeryEntry] = []
    for combo in itertools.product(*expansions):
        xs = [x for x, _ in combo]
        coefficient = prod((x.rho_factor() for x in xs), start=Fraction(1))
        for result in dedupe_covers(list(_glue(cover, xs))):
            entries.append(SurgeryEntry(result, coefficient, hurwitz_multiplicity(result)))
    entries.sort(key=lambda e: e.cover.sort_key())
    result = SurgeryResult(cover, descendant_multiplicity(cover).total, tuple(entries))
    if result.holds:
        logger.debug(f"[SURGERY] {len(entries)} caterpillar covers, total {result.total}")
    else:
        logger.error(f"[SURGERY] total {result.total} != cover multiplicity {result.source_multiplicity}")
    return result


def collapse_surgery(caterpillar: TropicalCover, insertions: Sequence[int]) -> TropicalCover:
    """Undo the surgery: merge marked vertices per leg, drop pass-through vertices."""
    insertions = tuple(insertions)
    n = len(insertions)
    verts = caterpillar.vertices
    if caterpillar.target.kind != CATERPILLAR or caterpillar.target.points != n:
        raise GWHError("collapse needs a caterpillar cover with one leg per insertion")
    through = {i for i, v in enumerate(verts) if not v.marked}
    outgoing: Dict[int, List[Tuple[Optional[int], int]]] = defaultdict(list)
    starts: List[Tuple[Optional[int], Optional[int], int]] = []
    for e in caterpillar.edges:
        for _ in range(e.multiplicity):
            if e.left in through:
                outgoing[e.left].append((e.right, e.weight))
            else:
                starts.append((e.left, e.right, e.weight))
    edges: Counter = Counter()
    for left, right, w in starts:
        while right in through:
            right, w2 = outgoing[right].pop()
            if w2 != w:
                raise GWHError("pass-through vertex changes the edge weight")
        a = BOUNDARY if left is None else verts[left].position
        b = BOUNDARY if right is None else verts[right].position
        edges[(a, b, w, 0)] += 1
    merged: List[CoverVertex] = []
    for i, k in enumerate(insertions):
        val = sum(m for (a, b, _, _), m in edges.items() if a == i) + \
              sum(m for (a, b, _, _), m in edges.items() if b == i)
        twice = k + 2 - val
        if twice % 2 or twice < 0:
            raise ConstraintViolation(f"collapsed vertex {i} has valence {val} for tau_{k}", relation="valence")
        merged.append(CoverVertex(i, twice // 2))
    return TropicalCover.assemble(TargetShape.line(insertions), merged, edges)


# completed-cycle substitution

def _check_dimension(mu: Partition, nu: Partition, insertions: Sequence[int], genus: Optional[int]) -> int:
    twice = sum(insertions) + 2 - len(mu) - len(nu)
    if twice % 2 or (genus is not None and twice != 2 * genus):
        raise ConstraintViolation(
            f"sum k_i = {sum(insertions)} does not equal 2g - 2 + l(mu) + l(nu)", relation="dimension")
    return twice // 2


def substitute_and_evaluate(mu: Partition, nu: Partition, insertions: Sequence[int],
                            genus: Optional[int] = None) -> Fraction:
    """H*(mu, (k1+1)bar/k1!, ..., (kn+1)bar/kn!, nu) on the multilinear extended Hurwitz function."""
    mu, nu = make_partition(mu), make_partition(nu)
    if size(mu) != size(nu):
        raise DegreeMismatch(f"|mu| = {size(mu)} but |nu| = {size(nu)}")
    _check_dimension(mu, nu, insertions, genus)
    conditions = [WElement.basis(mu)] + [completion_coefficients(k).insertion() for k in insertions] + \
                 [WElement.basis(nu)]
    return eval_hurwitz_multilinear(size(mu), conditions)


def substitute_elliptic(d: int, insertions: Sequence[int], genus: Optional[int] = None) -> Fraction:
    """Elliptic target: H*_{d->1}((k1+1)bar/k1!, ...)."""
    if d < 1:
        raise DegreeMismatch("elliptic invariants need positive degree")
    _check_dimension(EMPTY, EMPTY, insertions, genus)
    conditions = [completion_coefficients(k).insertion() for k in insertions]
    return eval_hurwitz_multilinear(d, conditions, h=1)
