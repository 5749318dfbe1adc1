"""Immutable point-line incidence geometries over dense integer point IDs.

Collinearity is kept as one Python-int bitset per point (diagonal bit set:
a point counts as collinear with itself, which is the convention every
closure computation here relies on; strict-perp consumers subtract the
diagonal explicitly).  Geometries are frozen after construction so the
bitsets can be shared freely.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field as dfield
from typing import Iterable, Optional, Sequence

import numpy as np


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Kind:
    """Family tag: polygon:<n>, polar:<rank>, grassmannian:<of>, other."""

    family: str
    param: Optional[int] = None
    of: Optional[str] = None

    def as_str(self) -> str:
        if self.family == "polygon":
            return f"polygon:{self.param}"
        if self.family == "polar":
            return f"polar:{self.param}"
        if self.family == "grassmannian":
            return f"grassmannian:{self.of or ''}"
        return "other"

    @staticmethod
    def from_str(s: str) -> "Kind":
        if s.startswith("polygon:"):
            return Kind("polygon", int(s.split(":", 1)[1]))
        if s.startswith("polar:"):
            return Kind("polar", int(s.split(":", 1)[1]))
        if s.startswith("grassmannian"):
            rest = s.split(":", 1)[1] if ":" in s else ""
            return Kind("grassmannian", of=rest or None)
        return Kind("other")


class Geometry:
    """A partial linear space with precomputed collinearity bitsets.

    `lines` are sorted tuples of 0-based point IDs; the line list itself is
    sorted, so equal geometries have identical serialized form.
    """

    def __init__(self, n: int, lines: Iterable[Sequence[int]], kind: Kind = Kind("other"),
                 name: str = "", order: Optional[tuple[int, int]] = None, meta: Optional[dict] = None):
        lines = sorted(tuple(sorted(set(l))) for l in lines)
        for l in lines:
            if l and (l[0] < 0 or l[-1] >= n):
                raise GeometryError(f"line {l} has point IDs outside [0, {n})")
        self.n = n
        self.lines = tuple(lines)
        self.kind = kind
        self.name = name
        self.order = order
        self.meta = meta or {}

        adj = [1 << i for i in range(n)]
        line_bits = []
        lines_through: list[list[int]] = [[] for _ in range(n)]
        for li, l in enumerate(self.lines):
            bits = 0
            for p in l:
                bits |= 1 << p
                lines_through[p].append(li)
            line_bits.append(bits)
            for p in l:
                adj[p] |= bits
        self.adj = tuple(adj)
        self.line_bits = tuple(line_bits)
        self.lines_through = tuple(tuple(v) for v in lines_through)
        self.full_mask = (1 << n) - 1
        self._line_index = {l: i for i, l in enumerate(self.lines)}
        self._np_adj: Optional[np.ndarray] = None

    # -- basic queries --------------------------------------------------

    def line_id(self, pts: Sequence[int]) -> Optional[int]:
        return self._line_index.get(tuple(sorted(pts)))

    def collinear(self, x: int, y: int) -> bool:
        return bool(self.adj[x] >> y & 1)

    def perp(self, x: int) -> int:
        """Bitset of points collinear with x, x included."""
        return self.adj[x]

    def line_through(self, x: int, y: int) -> Optional[int]:
        """Line ID of the unique line on two distinct collinear points."""
        for li in self.lines_through[x]:
            if self.line_bits[li] >> y & 1:
                return li
        return None

    def np_adjacency(self, strict: bool = True) -> np.ndarray:
        """Boolean adjacency matrix; cached with diagonal False, view-adjusted."""
        if self._np_adj is None:
            a = np.zeros((self.n, self.n), dtype=bool)
            for i, bits in enumerate(self.adj):
                for j in _bit_indices(bits):
                    a[i, j] = True
            np.fill_diagonal(a, False)
            self._np_adj = a
        if strict:
            return self._np_adj
        out = self._np_adj.copy()
        np.fill_diagonal(out, True)
        return out

    def __eq__(self, other):
        return isinstance(other, Geometry) and self.n == other.n and self.lines == other.lines

    def __hash__(self):
        return hash((self.n, self.lines))

    def __repr__(self):
        nm = self.name or self.kind.as_str()
        return f"<Geometry {nm}: {self.n} points, {len(self.lines)} lines>"

    # -- serialization ---------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "name": self.name,
            "kind": self.kind.as_str(),
            "order": list(self.order) if self.order else None,
            "points": self.n,
            "lines": [list(l) for l in self.lines],
        }
        return json.dumps(doc, separators=(",", ":"), sort_keys=True)

    @staticmethod
    def from_json(text: str, warn=None) -> "Geometry":
        doc = json.loads(text)
        lines = doc["lines"]
        for l in lines:
            if sorted(l) != l and warn is not None:
                warn(f"line {l} not sorted; normalizing")
        seen = set()
        for l in lines:
            key = tuple(sorted(l))
            if key in seen:
                raise GeometryError(f"duplicated line {l}")
            seen.add(key)
        g = Geometry(
            doc["points"], lines, Kind.from_str(doc.get("kind", "other")),
            name=doc.get("name", ""),
            order=tuple(doc["order"]) if doc.get("order") else None,
        )
        rep = validate(g)
        if not rep.partial_linear:
            raise GeometryError(f"import violates partial linearity: {rep.violations[:3]}")
        return g

    def fingerprint(self) -> dict:
        digest = hashlib.sha256(self.to_json().encode()).hexdigest()[:16]
        return {"points": self.n, "lines": len(self.lines), "hash": digest}


def _bit_indices(bits: int):
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def bit_indices(bits: int) -> list[int]:
    return list(_bit_indices(bits))


def bitset(points: Iterable[int]) -> int:
    out = 0
    for p in points:
        out |= 1 << p
    return out


# -- validation ----------------------------------------------------------


@dataclass
class ValidationReport:
    partial_linear: bool
    connected: bool
    point_degrees: tuple[int, int]   # (min, max) lines per point
    line_sizes: tuple[int, int]      # (min, max) points per line
    order: Optional[tuple[int, int]]
    thick: bool
    violations: list = dfield(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.partial_linear and self.connected and not self.violations


def validate(g: Geometry) -> ValidationReport:
    """Check partial linearity, degree uniformity and connectivity."""
    violations = []
    pair_seen = {}
    for li, l in enumerate(g.lines):
        for i in range(len(l)):
            for j in range(i + 1, len(l)):
                key = (l[i], l[j])
                if key in pair_seen:
                    violations.append(("pair-on-two-lines", key, pair_seen[key], li))
                else:
                    pair_seen[key] = li
    partial_linear = not violations
    deg = [len(v) for v in g.lines_through]
    sizes = [len(l) for l in g.lines] or [0]
    order = None
    if sizes and min(sizes) == max(sizes) and deg and min(deg) == max(deg):
        order = (min(sizes) - 1, min(deg) - 1)
    thick = bool(sizes) and min(sizes) >= 3 and min(deg or [0]) >= 3
    connected = _connected(g)
    return ValidationReport(partial_linear, connected, (min(deg or [0]), max(deg or [0])),
                            (min(sizes), max(sizes)), order, thick, violations)


def _connected(g: Geometry) -> bool:
    if g.n == 0:
        return True
    seen = 1
    frontier = 1
    while frontier:
        grow = 0
        for i in _bit_indices(frontier):
            grow |= g.adj[i]
        frontier = grow & ~seen
        seen |= grow
    return seen == g.full_mask


def recompute_collinearity(g: Geometry) -> tuple[int, ...]:
    """Independent rebuild of the collinearity bitsets from the line list."""
    adj = [1 << i for i in range(g.n)]
    for l in g.lines:
        bits = bitset(l)
        for p in l:
            adj[p] |= bits
    return tuple(adj)


# -- graph metrics ---------------------------------------------------------


def point_distance(g: Geometry, x: int, y: int) -> int:
    """Distance in the collinearity graph; raises on unreachable pairs."""
    if x == y:
        return 0
    seen = 1 << x
    frontier = seen
    d = 0
    while frontier:
        d += 1
        grow = 0
        for i in _bit_indices(frontier):
            grow |= g.adj[i]
        frontier = grow & ~seen
        seen |= grow
        if seen >> y & 1:
            return d
    raise GeometryError(f"points {x} and {y} are in different components")


def distance_bitsets(g: Geometry, x: int) -> list[int]:
    """Bitsets of points at distance 0, 1, 2, ... from x."""
    layers = [1 << x]
    seen = 1 << x
    frontier = seen
    while True:
        grow = 0
        for i in _bit_indices(frontier):
            grow |= g.adj[i]
        frontier = grow & ~seen
        if not frontier:
            return layers
        layers.append(frontier)
        seen |= frontier


def incidence_girth_diameter(g: Geometry) -> tuple[int, int]:
    """Girth and diameter of the bipartite point-line incidence graph.

    BFS from every node; girth from the shortest cycle closed by a
    non-tree edge over all roots (exact for unweighted graphs).
    """
    n = g.n
    nodes = n + len(g.lines)
    nbrs: list[list[int]] = [[] for _ in range(nodes)]
    for li, l in enumerate(g.lines):
        for p in l:
            nbrs[p].append(n + li)
            nbrs[n + li].append(p)
    diameter = 0
    girth = None
    for root in range(nodes):
        dist = [-1] * nodes
        parent = [-1] * nodes
        dist[root] = 0
        dq = deque([root])
        while dq:
            u = dq.popleft()
            for v in nbrs[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    dq.append(v)
                elif v != parent[u] and u < v:
                    c = dist[u] + dist[v] + 1
                    if girth is None or c < girth:
                        girth = c
        far = max(dist)
        if far < 0 or -1 in dist:
            raise GeometryError("incidence graph is disconnected")
        diameter = max(diameter, far)
    return (girth or 0, diameter)


def is_generalized_polygon(g: Geometry, gonality: int) -> bool:
    """True iff the incidence graph has diameter n and girth 2n, thickly."""
    rep = validate(g)
    if not rep.partial_linear or not rep.connected or not rep.thick:
        return False
    try:
        girth, diam = incidence_girth_diameter(g)
    except GeometryError:
        return False
    return girth == 2 * gonality and diam == gonality


# -- gamma spaces, planes, residues, Grassmannians -------------------------


def is_gamma_space(g: Geometry) -> bool:
    """Each point collinear with 0, 1 or all points of every line."""
    adj = g.np_adjacency(strict=False)
    for l in g.lines:
        counts = adj[:, list(l)].sum(axis=1)
        bad = ~np.isin(counts, (0, 1, len(l)))
        if bad.any():
            return False
    return True


def singular_planes(g: Geometry) -> list[tuple[int, ...]]:
    """All singular subspaces of projective dimension 2.

    Requires a gamma space.  A plane is generated as the union of the
    lines joining an off-line point p to the points of a line L it is
    fully collinear with; the result is checked to be a singular subspace.
    """
    if not is_gamma_space(g):
        raise GeometryError("singular_planes requires a gamma space")
    planes = set()
    for li, l in enumerate(g.lines):
        common = g.full_mask
        for p in l:
            common &= g.adj[p]
        common &= ~g.line_bits[li]
        for p in _bit_indices(common):
            pts = set(l)
            ok = True
            for x in l:
                lj = g.line_through(p, x)
                if lj is None:
                    ok = False
                    break
                pts.update(g.lines[lj])
            if not ok:
                continue
            key = tuple(sorted(pts))
            if key in planes:
                continue
            if _is_singular_subspace(g, pts):
                planes.add(key)
    return sorted(planes)


def _is_singular_subspace(g: Geometry, pts: set[int]) -> bool:
    bits = bitset(pts)
    for x in pts:
        if bits & ~g.adj[x]:
            return False
    for x in pts:
        for y in pts:
            if y <= x:
                continue
            li = g.line_through(x, y)
            if li is None or g.line_bits[li] & ~bits:
                return False
    return True


def singular_subspace_dim(g: Geometry, pts: Sequence[int]) -> int:
    """Projective dimension via greedy generator extraction."""
    pts = list(pts)
    if not pts:
        return -1
    span = {pts[0]}
    gens = 1
    changed = True
    remaining = set(pts) - span
    while remaining:
        p = min(remaining)
        span.add(p)
        gens += 1
        # close under lines
        changed = True
        while changed:
            changed = False
            for x in list(span):
                for y in list(span):
                    if y <= x:
                        continue
                    li = g.line_through(x, y)
                    if li is not None:
                        for z in g.lines[li]:
                            if z not in span:
                                span.add(z)
                                changed = True
        remaining = set(pts) - span
    return gens - 1


def line_grassmannian(g: Geometry, name: str = "") -> Geometry:
    """Points: lines of g.  Lines: planar pencils {lines of pi through p}."""
    planes = singular_planes(g)
    in_plane_count = [0] * len(g.lines)
    pencils = set()
    for pl in planes:
        pl_set = set(pl)
        plane_lines = sorted({g.line_through(x, y) for i, x in enumerate(pl)
                              for y in pl[i + 1:]})
        for li in plane_lines:
            in_plane_count[li] += 1
        for p in pl:
            pencil = tuple(sorted(li for li in plane_lines if p in g.lines[li]))
            pencils.add(pencil)
    missing = [li for li, c in enumerate(in_plane_count) if c == 0]
    if missing:
        raise GeometryError(f"{len(missing)} lines lie in no plane (first: {missing[0]})")
    return Geometry(len(g.lines), sorted(pencils),
                    Kind("grassmannian", of=g.name or g.kind.as_str()),
                    name=name or (f"Gr({g.name})" if g.name else "Gr"),
                    meta={"base": g})


def point_residual(g: Geometry, p: int) -> Geometry:
    """Geometry on the lines through p; lines are the pencils at p in planes on p."""
    through = g.lines_through[p]
    if not through:
        raise GeometryError(f"point {p} lies on no line")
    index = {li: i for i, li in enumerate(through)}
    res_lines = set()
    # planes through p: generated by pairs of coplanar lines on p
    for a_pos in range(len(through)):
        la = through[a_pos]
        for b_pos in range(a_pos + 1, len(through)):
            lb = through[b_pos]
            plane = _plane_spanned(g, la, lb, p)
            if plane is None:
                continue
            pencil = tuple(sorted(index[li] for li in g.lines_through[p]
                                  if not g.line_bits[li] & ~plane))
            if len(pencil) >= 2:
                res_lines.add(pencil)
    if not res_lines:
        raise GeometryError(f"no plane through point {p}")
    return Geometry(len(through), sorted(res_lines), Kind("other"),
                    name=(f"Res({g.name},{p})" if g.name else f"Res({p})"),
                    meta={"base": g, "base_point": p, "lines_of_base": through})


def _plane_spanned(g: Geometry, la: int, lb: int, p: int) -> Optional[int]:
    """Bitset of the plane spanned by two lines meeting at p, or None."""
    a_pts = [x for x in g.lines[la] if x != p]
    b_pts = [x for x in g.lines[lb] if x != p]
    for x in a_pts:
        for y in b_pts:
            if not g.collinear(x, y):
                return None
    pts = set(g.lines[la])
    x0 = a_pts[0]
    for y in b_pts:
        li = g.line_through(x0, y)
        if li is None:
            return None
        pts.update(g.lines[li])
    # close once more through remaining pairs
    for x in list(pts):
        for y in b_pts:
            if x == y:
                continue
            li = g.line_through(x, y)
            if li is None:
                return None
            pts.update(g.lines[li])
    if not _is_singular_subspace(g, pts):
        return None
    return bitset(pts)


def convex_closure(g: Geometry, seed: Iterable[int], subspace_closure: bool = True) -> int:
    """Smallest superset of seed closed under geodesics (and full lines).

    Returns a bitset.  Iterates to a fixed point; all geodesics between
    members are included, so BFS tie-breaking cannot matter.
    """
    cur = bitset(seed)
    dist_cache: dict[int, list[int]] = {}
    while True:
        members = bit_indices(cur)
        grow = cur
        for i, x in enumerate(members):
            if x not in dist_cache:
                dist_cache[x] = _dist_array(g, x)
            dx = dist_cache[x]
            for y in members[i + 1:]:
                if y not in dist_cache:
                    dist_cache[y] = _dist_array(g, y)
                dy = dist_cache[y]
                d = dx[y]
                if d >= 2:
                    for z in range(g.n):
                        if dx[z] + dy[z] == d:
                            grow |= 1 << z
                elif d == 1 and subspace_closure:
                    li = g.line_through(x, y)
                    if li is not None:
                        grow |= g.line_bits[li]
        if grow == cur:
            return cur
        cur = grow


def _dist_array(g: Geometry, x: int) -> list[int]:
    dist = [-1] * g.n
    for d, layer in enumerate(distance_bitsets(g, x)):
        for z in _bit_indices(layer):
            dist[z] = d
    return dist
