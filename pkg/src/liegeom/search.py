"""Exhaustive search for blocking sets, round-up triples, geometric lines,
hyperbolic lines, distance-3 traces and ovoids.

Everything here runs on opposition bitsets.  The blocking-set enumerator
uses witness-driven branching: every set it must find fails to cover some
least uncovered point, so candidates can be restricted to the non-opposites
of that witness.  Sibling exclusion sets make the enumeration exact with
each solution produced exactly once.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .geometry import Geometry, GeometryError, bit_indices, bitset
from .relations import (
    OPPOSITE,
    SPECIAL,
    classify_pair,
    geometry_family,
    opposition_sets,
    _cache,
)


class BudgetExceeded(RuntimeError):
    pass


# -- common opposite / blocking sets -----------------------------------------


def common_opposite(g: Geometry, pts: Sequence[int]) -> Optional[int]:
    """Any point opposite every member of pts, or None if pts blocks."""
    bits = opposition_sets(g).common_opposite_bits(pts)
    if not bits:
        return None
    return (bits & -bits).bit_length() - 1


def enumerate_blocking_sets(g: Geometry, k: int, minimal_only: bool = False,
                            budget: Optional[int] = None) -> list[tuple[int, ...]]:
    """All k-subsets admitting no common opposite point.

    With minimal_only=True, only sets none of whose proper subsets block
    are kept (the k-th point must be the one emptying the intersection,
    and no (k-1)-subset may block).
    """
    o = opposition_sets(g)
    opp = o.opp
    notopp_pts = [tuple(bit_indices(b)) for b in o.notopp]
    results: list[tuple[int, ...]] = []
    nodes = 0

    def minimal(pts: tuple[int, ...]) -> bool:
        for drop in range(len(pts)):
            inter = g.full_mask
            for i, p in enumerate(pts):
                if i != drop:
                    inter &= opp[p]
            if inter == 0:
                return False
        return True

    def dfs(chosen: list[int], inter: int, excluded: int):
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise BudgetExceeded(f"blocking-set search exceeded {budget} nodes")
        if inter == 0:
            if len(chosen) == k:
                got = tuple(sorted(chosen))
                if not minimal_only or minimal(got):
                    results.append(got)
            elif not minimal_only:
                chosen_bits = bitset(chosen)
                rest = [p for p in range(g.n)
                        if not (chosen_bits >> p & 1) and not (excluded >> p & 1)]
                for extra in combinations(rest, k - len(chosen)):
                    results.append(tuple(sorted(chosen + list(extra))))
            return
        if len(chosen) == k:
            return
        w = (inter & -inter).bit_length() - 1
        chosen_bits = bitset(chosen)
        cands = [p for p in notopp_pts[w]
                 if not (excluded >> p & 1) and not (chosen_bits >> p & 1)]
        taken = 0
        for p in cands:
            dfs(chosen + [p], inter & opp[p], excluded | taken)
            taken |= 1 << p
    dfs([], g.full_mask, 0)
    return sorted(set(results))


def blocking_soundness_sample(g: Geometry, k: int, found: Iterable[tuple[int, ...]],
                              trials: int = 1000, seed: int = 0) -> bool:
    """Every sampled k-set the enumerator skipped has a common opposite."""
    o = opposition_sets(g)
    found_set = set(found)
    rng = random.Random(seed)
    for _ in range(trials):
        s = tuple(sorted(rng.sample(range(g.n), k)))
        if s in found_set:
            continue
        if o.common_opposite_bits(s) == 0:
            return False
    return True


# -- round-up triples ----------------------------------------------------------


def is_round_up_triple(g: Geometry, v1: int, v2: int, v3: int) -> bool:
    """No point is opposite exactly one of v1, v2, v3."""
    if len({v1, v2, v3}) != 3:
        raise GeometryError("round-up triples require three distinct points")
    return exactly_one_opposite(g, (v1, v2, v3)) == 0


def enumerate_round_up_triples(g: Geometry, base_point: Optional[int] = None,
                               budget: Optional[int] = None) -> list[tuple[int, int, int]]:
    """All round-up triples; with base_point set, only triples through it."""
    o = opposition_sets(g)
    opp, notopp = o.opp, o.notopp
    n = g.n
    out = []
    nodes = 0
    if base_point is None:
        firsts = range(n)
    else:
        firsts = (base_point,)
    for i in firsts:
        oi = opp[i]
        lo = 0 if base_point is not None else i + 1
        for j in range(lo, n):
            if j == i:
                continue
            V = oi ^ opp[j]
            W = ~(oi | opp[j]) & g.full_mask
            for k in range(j + 1, n):
                if k == i:
                    continue
                nodes += 1
                if budget is not None and nodes > budget:
                    raise BudgetExceeded(f"triple scan exceeded {budget} nodes")
                if not (V & notopp[k]) and not (opp[k] & W):
                    out.append(tuple(sorted((i, j, k))))
    return sorted(set(out))


# -- geometric lines -------------------------------------------------------------


def exactly_one_opposite(g: Geometry, pts: Sequence[int]) -> int:
    """Bitset of points opposite exactly one member of pts."""
    o = opposition_sets(g)
    ge1 = 0
    ge2 = 0
    for p in pts:
        b = o.opp[p]
        ge2 |= ge1 & b
        ge1 |= b
    return ge1 & ~ge2


def is_geometric_line(g: Geometry, pts: Sequence[int]) -> bool:
    """Every point is opposite none or all-but-one members of pts."""
    o = opposition_sets(g)
    pts = list(pts)
    m = len(pts)
    counts = [0] * g.n
    for p in pts:
        for w in bit_indices(o.opp[p]):
            counts[w] += 1
    return all(c in (0, m - 1) for c in counts)


def geometric_line_closure(g: Geometry, triple: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Grow a round-up triple to a geometric line, or None.

    A point v can join S (which has no point opposite exactly one member)
    iff v's opposite set is covered by the union of the members' opposite
    sets; closure iterates this to a fixed point and then validates the
    full geometric-line condition.
    """
    if not is_round_up_triple(g, *triple):
        raise GeometryError("closure requires a round-up triple")
    o = opposition_sets(g)
    cur = bitset(triple)
    union = 0
    for p in triple:
        union |= o.opp[p]
    while True:
        grow = cur
        for v in range(g.n):
            if not (cur >> v & 1) and not (o.opp[v] & ~union):
                grow |= 1 << v
        if grow == cur:
            break
        for v in bit_indices(grow & ~cur):
            union |= o.opp[v]
        cur = grow
    pts = tuple(bit_indices(cur))
    return pts if is_geometric_line(g, pts) else None


def enumerate_geometric_lines(g: Geometry, base_point: Optional[int] = None,
                              budget: Optional[int] = None) -> list[tuple[int, ...]]:
    """Deduplicated validated closures of all round-up triples."""
    seen = set()
    for t in enumerate_round_up_triples(g, base_point=base_point, budget=budget):
        gl = geometric_line_closure(g, t)
        if gl is not None:
            seen.add(gl)
    return sorted(seen)


# -- hexagon objects ---------------------------------------------------------------


def _distance2_bits(g: Geometry) -> tuple[int, ...]:
    cache = _cache(g)
    if "dist2" not in cache:
        out = []
        for x in range(g.n):
            near = g.adj[x]
            grow = 0
            for y in bit_indices(near):
                grow |= g.adj[y]
            out.append(grow & ~near)
        cache["dist2"] = tuple(out)
    return cache["dist2"]


def special_center(g: Geometry, a: int, b: int) -> int:
    """The unique common neighbour of a special pair."""
    common = g.adj[a] & g.adj[b] & ~(1 << a) & ~(1 << b)
    if common.bit_count() != 1:
        raise GeometryError(f"({a},{b}) is not a special pair")
    return common.bit_length() - 1


@dataclass
class HyperbolicLine:
    center: int
    points: tuple[int, ...]
    regular: bool


def hyperbolic_line(g: Geometry, a: int, b: int) -> HyperbolicLine:
    """Hyperbolic line through a special pair of a generalised hexagon.

    H = intersection of q-special-traces on the perp of the centre, over
    all points q opposite the centre and special to both a and b.
    """
    if geometry_family(g) != "hexagon":
        raise GeometryError("hyperbolic lines are defined here for hexagons")
    c = special_center(g, a, b)
    d2 = _distance2_bits(g)
    o = opposition_sets(g)
    h = g.adj[c] & ~(1 << c)
    found = False
    for q in bit_indices(o.opp[c]):
        if (d2[q] >> a & 1) and (d2[q] >> b & 1):
            h &= d2[q]
            found = True
    if not found:
        raise GeometryError("no point opposite the centre is special to both")
    pts = tuple(bit_indices(h))
    if not (h >> a & 1) or not (h >> b & 1):
        raise GeometryError("hyperbolic line does not contain its defining pair")
    regular = all(
        (d2[q] & g.adj[c]) == h
        for q in bit_indices(o.opp[c])
        if (d2[q] & h).bit_count() >= 2)
    return HyperbolicLine(c, pts, regular)


def all_hyperbolic_lines(g: Geometry) -> list[tuple[int, ...]]:
    d2 = _distance2_bits(g)
    out = set()
    for a in range(g.n):
        for b in bit_indices(d2[a]):
            if b > a:
                out.add(hyperbolic_line(g, a, b).points)
    return sorted(out)


def close_to_line_bits(g: Geometry, li: int) -> int:
    """Points off the line collinear with exactly one of its points."""
    cache = _cache(g).setdefault("close_line", {})
    if li not in cache:
        bits = 0
        for p in g.lines[li]:
            bits |= g.adj[p]
        cache[li] = bits & ~g.line_bits[li]
    return cache[li]


def opposite_lines_polygon(g: Geometry, li: int, mi: int) -> bool:
    """Lines at maximal incidence-graph distance.

    In a hexagon that means disjoint with no collinear cross pair (each
    point of one line is then special to a unique point of the other);
    in a quadrangle it means disjoint.
    """
    if li == mi:
        return False
    fam = geometry_family(g)
    if fam == "quadrangle":
        return not (g.line_bits[li] & g.line_bits[mi])
    if fam != "hexagon":
        raise GeometryError("line opposition implemented for generalised polygons")
    reach = 0
    for p in g.lines[li]:
        reach |= g.adj[p]
    return not (reach & g.line_bits[mi])


def opposite_line_pairs(g: Geometry) -> list[tuple[int, int]]:
    fam = geometry_family(g)
    if fam == "quadrangle":
        blocker = list(g.line_bits)
    else:
        blocker = []
        for li in range(len(g.lines)):
            bits = 0
            for p in g.lines[li]:
                bits |= g.adj[p]
            blocker.append(bits)
    out = []
    for li in range(len(g.lines)):
        for mi in range(li + 1, len(g.lines)):
            if not (blocker[li] & g.line_bits[mi]):
                out.append((li, mi))
    return out


@dataclass
class Distance3Trace:
    line_pair: tuple[int, int]
    points: tuple[int, ...]


def distance3_trace(g: Geometry, li: int, mi: int) -> Distance3Trace:
    """Points close to both of two opposite lines of a hexagon."""
    if geometry_family(g) != "hexagon":
        raise GeometryError("distance-3 traces are defined here for hexagons")
    if not opposite_lines_polygon(g, li, mi):
        raise GeometryError(f"lines {li} and {mi} are not opposite")
    bits = close_to_line_bits(g, li) & close_to_line_bits(g, mi)
    pts = tuple(bit_indices(bits))
    s = len(g.lines[li]) - 1
    if len(pts) != s + 1:
        raise GeometryError(f"trace has {len(pts)} points, expected {s + 1}")
    return Distance3Trace((li, mi), pts)


def all_distance3_traces(g: Geometry) -> list[tuple[int, ...]]:
    return sorted({distance3_trace(g, li, mi).points
                   for li, mi in opposite_line_pairs(g)})


def trace_regular(g: Geometry, tr: Distance3Trace) -> bool:
    """[N,M]3 = [L,M]3 whenever N is opposite M and shares >= 2 trace points."""
    li, mi = tr.line_pair
    bits = bitset(tr.points)
    close_m = close_to_line_bits(g, mi)
    for ni in range(len(g.lines)):
        if ni == mi or not opposite_lines_polygon(g, ni, mi):
            continue
        t = close_to_line_bits(g, ni) & close_m
        if (t & bits).bit_count() >= 2 and t != bits:
            return False
    return True


# -- quadrangle objects ----------------------------------------------------------


def gq_dominating_check(g: Geometry, pts: Sequence[int]) -> bool:
    """Every point equal or collinear to some member (no common opposite)."""
    bits = 0
    for p in pts:
        bits |= g.adj[p]
    return bits == g.full_mask


def is_ovoid(g: Geometry, pts: Sequence[int]) -> bool:
    """Every line meets pts exactly once."""
    if g.order is not None:
        s, t = g.order
        if len(set(pts)) != s * t + 1:
            return False
    bits = bitset(pts)
    return all((lb & bits).bit_count() == 1 for lb in g.line_bits)


def enumerate_ovoids(g: Geometry) -> list[tuple[int, ...]]:
    """All ovoids, by covering the least unmet line at each step."""
    out = []
    nl = len(g.lines)

    def dfs(chosen_bits: int, chosen: list[int], hit: list[bool]):
        li = next((i for i in range(nl) if not hit[i]), None)
        if li is None:
            if is_ovoid(g, chosen):
                out.append(tuple(sorted(chosen)))
            return
        for p in g.lines[li]:
            if g.adj[p] & chosen_bits:
                continue
            new_hit = list(hit)
            ok = True
            for lj in g.lines_through[p]:
                if new_hit[lj]:
                    ok = False
                    break
                new_hit[lj] = True
            if ok:
                dfs(chosen_bits | 1 << p, chosen + [p], new_hit)
    dfs(0, [], [False] * nl)
    return sorted(set(out))


# -- polar hyperbolic lines and pencils -------------------------------------------


def polar_hyperbolic_line(g: Geometry, x: int, y: int) -> tuple[int, ...]:
    """{x,y}^perp-perp for non-collinear points of a polar space."""
    if g.collinear(x, y):
        raise GeometryError("hyperbolic lines need a non-collinear pair")
    common = g.adj[x] & g.adj[y]
    h = g.full_mask
    for z in bit_indices(common):
        h &= g.adj[z]
    return tuple(bit_indices(h))


def residual_point_map(g: Geometry, res: Geometry) -> dict[int, int]:
    """Map line-of-base -> residual point ID for a point_residual output."""
    return {li: i for i, li in enumerate(res.meta["lines_of_base"])}


# -- classification -----------------------------------------------------------------


def classify_blocking_set(g: Geometry, pts: Sequence[int]) -> str:
    """Tag a blocking set against the structure recognizers."""
    pts = tuple(sorted(pts))
    fam = geometry_family(g)
    if g.line_id(pts) is not None:
        return "PlanarPencil" if fam == "grassmannian" else "Line"
    if fam == "hexagon":
        rels = {classify_pair(g, a, b) for a, b in combinations(pts, 2)}
        if rels == {SPECIAL}:
            try:
                if set(hyperbolic_line(g, pts[0], pts[1]).points) == set(pts):
                    return "HyperbolicLine"
            except GeometryError:
                pass
        if rels == {OPPOSITE} and _is_trace(g, pts):
            return "Distance3Trace"
        return "Unclassified"
    if fam == "grassmannian":
        if _is_hyperbolic_pencil(g, pts):
            return "HyperbolicPencil"
        return "Unclassified"
    if fam == "quadrangle":
        sub: Optional[Geometry] = g.meta.get("subgq")
        if sub is not None:
            parent_pts = sub.meta["parent_points"]
            back = {p: i for i, p in enumerate(parent_pts)}
            if all(p in back for p in pts) and is_ovoid(sub, [back[p] for p in pts]):
                return "OvoidOfSubGQ"
        if _is_polar_hyperbolic(g, pts):
            return "HyperbolicLine"
        return "Unclassified"
    if fam == "polar" and _is_polar_hyperbolic(g, pts):
        return "HyperbolicLine"
    return "Unclassified"


def _is_trace(g: Geometry, pts: Sequence[int]) -> bool:
    bits = bitset(pts)
    a = pts[0]
    for li in range(len(g.lines)):
        if not (close_to_line_bits(g, li) >> a & 1):
            continue
        if all(close_to_line_bits(g, li) >> p & 1 for p in pts):
            for mi in range(len(g.lines)):
                if mi != li and opposite_lines_polygon(g, li, mi) \
                        and not (bits & ~(close_to_line_bits(g, li) & close_to_line_bits(g, mi))):
                    t = close_to_line_bits(g, li) & close_to_line_bits(g, mi)
                    if t == bits:
                        return True
    return False


def _is_polar_hyperbolic(g: Geometry, pts: Sequence[int]) -> bool:
    if len(pts) < 3 or g.collinear(pts[0], pts[1]):
        return False
    try:
        return set(polar_hyperbolic_line(g, pts[0], pts[1])) == set(pts)
    except GeometryError:
        return False


def _is_hyperbolic_pencil(g: Geometry, pts: Sequence[int]) -> bool:
    """Lines of the base through one point, hyperbolic in the point residual."""
    from .geometry import point_residual
    from .relations import grassmannian_base
    try:
        base = grassmannian_base(g)
    except Exception:
        return False
    common = base.full_mask
    for li in pts:
        common &= base.line_bits[li]
    if common.bit_count() != 1:
        return False
    p = common.bit_length() - 1
    cache = _cache(base).setdefault("residuals", {})
    if p not in cache:
        cache[p] = point_residual(base, p)
    res = cache[p]
    rmap = residual_point_map(base, res)
    rpts = sorted(rmap[li] for li in pts)
    if res.collinear(rpts[0], rpts[1]):
        return False
    return set(polar_hyperbolic_line(res, rpts[0], rpts[1])) == set(rpts)
