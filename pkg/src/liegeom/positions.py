"""Mutual positions of line pairs in hexagonic models, and combing.

A position is matched from the multiset signatures of the rows and
columns of the pairwise relation matrix between the two lines; the 26
catalogue entries are generated from shape templates (homogeneous,
matching, pointed, row- and column-constant) whose signature pairs are
pairwise distinct, which is asserted when a catalogue is built.  The
combing table maps every entry to its successor position, with the
terminal position being the opposite pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import Geometry, GeometryError
from .relations import (
    COLLINEAR,
    EQUAL,
    OPPOSITE,
    REL_DISPLAY,
    SPECIAL,
    SYMPLECTIC,
    relation_matrix,
)


class PositionError(GeometryError):
    pass


class NoCombingLine(PositionError):
    pass


class NonterminatingComb(PositionError):
    pass


class AlgorithmViolation(PositionError):
    pass


# -- display ------------------------------------------------------------------

_DUAL = {EQUAL: OPPOSITE, COLLINEAR: SPECIAL, SYMPLECTIC: SYMPLECTIC,
         SPECIAL: COLLINEAR, OPPOSITE: EQUAL}


def to_display(tup: Sequence[int]) -> str:
    return "".join(REL_DISPLAY[c] for c in tup)


def parse_display(s: str) -> tuple[int, ...]:
    rev = {"0": EQUAL, "1": COLLINEAR, "3/2": SYMPLECTIC, "2": SPECIAL, "3": OPPOSITE}
    out = []
    i = 0
    while i < len(s):
        if s[i] == "3" and s[i:i + 3] == "3/2":
            out.append(SYMPLECTIC)
            i += 3
        else:
            out.append(rev[s[i]])
            i += 1
    return tuple(out)


# -- catalogue ----------------------------------------------------------------


@dataclass(frozen=True)
class CatalogueEntry:
    tuple4: tuple[int, int, int, int]
    shape: str                  # homog | matching | pointed | rows | cols
    cls: str                    # I | II | III | IV
    table_row: int              # row number in the combing table
    successor: Optional[tuple[int, int, int, int]]
    local_relation: str         # relation of the auxiliary line to L in the residue
    k_unique: bool

    @property
    def display(self) -> str:
        return to_display(self.tuple4)

    @property
    def terminal(self) -> bool:
        return self.successor == self.tuple4

    def template(self, m: int) -> list[list[int]]:
        a, b, c, d = self.tuple4
        if self.shape == "homog":
            return [[a] * m for _ in range(m)]
        if self.shape == "matching":
            return [[a if i == j else b for j in range(m)] for i in range(m)]
        if self.shape == "pointed":
            out = [[d] * m for _ in range(m)]
            out[0][0] = a
            for j in range(1, m):
                out[0][j] = b
            for i in range(1, m):
                out[i][0] = c
            return out
        if self.shape == "rows":
            return [[a] * m] + [[c] * m for _ in range(m - 1)]
        if self.shape == "cols":
            return [[a] + [b] * (m - 1) for _ in range(m)]
        raise PositionError(f"unknown shape {self.shape}")

    def dual_tuple(self) -> tuple[int, int, int, int]:
        a, b, c, d = self.tuple4
        if self.shape == "matching":
            return (_DUAL[b], _DUAL[a], _DUAL[a], _DUAL[b])
        return (_DUAL[d], _DUAL[b], _DUAL[c], _DUAL[a])

    def inverse_tuple(self) -> tuple[int, int, int, int]:
        a, b, c, d = self.tuple4
        return (a, c, b, d)

    @property
    def has_projection_row(self) -> bool:
        """Whether L carries a distinguished (projection) point."""
        return self.shape in ("pointed", "rows")


E, C, Y, S, O = EQUAL, COLLINEAR, SYMPLECTIC, SPECIAL, OPPOSITE

#: (tuple, shape, class, combing-table row, successor, local relation of K
#: to L for the first transition, K unique).  Display reminders: C is 1,
#: Y is 3/2, S is 2, O is 3.
_RAW = (
    # Class I, completely homogeneous
    ((C, C, C, C), "homog", "I", 18, (C, C, Y, S), "collinear", False),
    ((Y, Y, Y, Y), "homog", "I", 19, (Y, Y, S, S), "collinear", False),
    ((S, S, S, S), "homog", "I", 20, (S, S, S, O), "symplectic", False),
    # Class II, projection homogeneous (perfect matchings)
    ((E, C, C, E), "matching", "II", 1, (E, C, C, S), "equal", True),
    ((C, Y, Y, C), "matching", "II", 5, (C, Y, S, S), "symplectic", True),
    ((Y, S, S, Y), "matching", "II", 11, (Y, S, S, O), "collinear", True),
    ((S, O, O, S), "matching", "II", 17, (S, O, O, S), "special", True),
    # Class III, symmetric non-homogeneous
    ((E, C, C, C), "pointed", "III", 2, (C, C, Y, S), "equal or collinear", False),
    ((E, C, C, Y), "pointed", "III", 3, (C, Y, S, S), "equal", True),
    ((E, C, C, S), "pointed", "III", 6, (C, S, S, O), "equal", True),
    ((C, C, C, Y), "pointed", "III", 4, (C, Y, S, S), "collinear", True),
    ((C, Y, Y, Y), "pointed", "III", 23, (Y, Y, S, S), "collinear", False),
    ((C, Y, Y, S), "pointed", "III", 9, (Y, S, S, O), "collinear", True),
    ((Y, Y, Y, S), "pointed", "III", 26, (Y, S, S, O), "collinear", True),
    ((Y, S, S, S), "pointed", "III", 14, (S, S, S, O), "collinear or symplectic", False),
    ((C, S, S, O), "pointed", "III", 12, (S, O, O, S), "equal", True),
    ((Y, S, S, O), "pointed", "III", 15, (S, O, O, S), "collinear", True),
    ((S, S, S, O), "pointed", "III", 16, (S, O, O, S), "symplectic", True),
    # Class IV, asymmetric with two projection points
    ((C, Y, C, S), "pointed", "IV", 7, (C, S, S, O), "collinear", True),
    ((C, C, Y, S), "pointed", "IV", 8, (Y, S, S, O), "equal", True),
    ((C, Y, S, S), "pointed", "IV", 13, (S, S, S, O), "equal or collinear", False),
    ((C, S, Y, S), "pointed", "IV", 10, (Y, S, S, O), "symplectic", True),
    # Class IV, asymmetric with one projection point
    ((C, Y, C, Y), "cols", "IV", 21, (C, Y, S, S), "collinear", True),
    ((C, C, Y, Y), "rows", "IV", 22, (Y, Y, S, S), "equal", True),
    ((Y, Y, S, S), "rows", "IV", 24, (S, S, S, O), "collinear", False),
    ((Y, S, Y, S), "cols", "IV", 25, (Y, S, S, O), "symplectic", True),
)

TERMINAL = (S, O, O, S)


@dataclass
class CatalogueMiss:
    line_a: int
    line_b: int
    matrix: list[list[int]]

    @property
    def display(self) -> str:
        return "miss:" + ";".join(",".join(REL_DISPLAY[v] for v in row) for row in self.matrix)


class PositionCatalogue:
    """The 26 positions with signatures for a fixed line size m."""

    def __init__(self, m: int):
        if m < 3:
            raise PositionError("catalogue needs lines with at least 3 points")
        self.m = m
        self.entries: list[CatalogueEntry] = []
        for tup, shape, cls, row, succ, loc, uniq in _entries_data():
            self.entries.append(CatalogueEntry(tup, shape, cls, row, succ, loc, uniq))
        if len(self.entries) != 26:
            raise PositionError(f"catalogue has {len(self.entries)} entries, expected 26")
        self.by_tuple = {e.tuple4: e for e in self.entries}
        self.by_sig: dict[tuple, CatalogueEntry] = {}
        for e in self.entries:
            sig = matrix_signature(e.template(m))
            if sig in self.by_sig:
                raise PositionError(
                    f"signature collision between {e.display} and {self.by_sig[sig].display}")
            self.by_sig[sig] = e
        self._check_structure()

    def _check_structure(self):
        for e in self.entries:
            if e.inverse_tuple() not in self.by_tuple:
                raise PositionError(f"inverse of {e.display} missing")
            if e.dual_tuple() not in self.by_tuple:
                raise PositionError(f"dual of {e.display} missing")
            if self.by_tuple[e.dual_tuple()].dual_tuple() != e.tuple4:
                raise PositionError(f"duality not involutive at {e.display}")
            if e.successor not in self.by_tuple:
                raise PositionError(f"successor of {e.display} missing")
        # successor chains all reach the terminal entry
        for e in self.entries:
            self.level_of(e.tuple4)

    def entry(self, tup: tuple[int, int, int, int]) -> CatalogueEntry:
        return self.by_tuple[tup]

    def level_of(self, tup: tuple[int, int, int, int]) -> int:
        steps = 0
        cur = tup
        while cur != TERMINAL:
            cur = self.by_tuple[cur].successor
            steps += 1
            if steps > 4:
                raise PositionError(f"successor chain from {to_display(tup)} does not terminate")
        return steps


def _entries_data():
    return _RAW


def matrix_signature(mat: Sequence[Sequence[int]]) -> tuple:
    rows = tuple(sorted(tuple(sorted(r)) for r in mat))
    ncols = len(mat[0])
    cols = tuple(sorted(tuple(sorted(mat[i][j] for i in range(len(mat))))
                        for j in range(ncols)))
    return rows, cols


# -- position context ------------------------------------------------------------


class HexagonicModel:
    """Bundle of a hexagonic geometry, its relation matrix and catalogue."""

    def __init__(self, g: Geometry, eager_threshold: int = 2000):
        self.geometry = g
        sizes = {len(l) for l in g.lines}
        if len(sizes) != 1:
            raise PositionError("positions need uniform line size")
        self.m = sizes.pop()
        self.rel = relation_matrix(g, eager_threshold)
        self.catalogue = PositionCatalogue(self.m)

    def pair_matrix(self, li: int, mi: int) -> list[list[int]]:
        g, R = self.geometry, self.rel
        return [[R.rel(x, y) for y in g.lines[mi]] for x in g.lines[li]]

    def position_of(self, li: int, mi: int):
        mat = self.pair_matrix(li, mi)
        entry = self.catalogue.by_sig.get(matrix_signature(mat))
        if entry is None:
            return CatalogueMiss(li, mi, mat)
        return entry.tuple4

    def free_points(self, li: int, mi: int) -> tuple[int, ...]:
        """Points of L other than the projection point for (L, M)."""
        g = self.geometry
        if li == mi:
            return ()
        pos = self.position_of(li, mi)
        if isinstance(pos, CatalogueMiss):
            raise PositionError(f"pair ({li},{mi}) is not a catalogue position")
        entry = self.catalogue.entry(pos)
        if not entry.has_projection_row:
            return tuple(g.lines[li])
        target = tuple(sorted(entry.template(self.m)[0]))
        mat = self.pair_matrix(li, mi)
        pts = g.lines[li]
        hits = [pts[i] for i in range(len(pts)) if tuple(sorted(mat[i])) == target]
        if len(hits) != 1:
            raise PositionError(f"projection point not unique for pair ({li},{mi})")
        return tuple(p for p in pts if p != hits[0])

    def locally_opposite_at(self, x: int, ki: int, li: int) -> bool:
        g = self.geometry
        if not (g.line_bits[ki] >> x & 1) or not (g.line_bits[li] >> x & 1):
            raise PositionError(f"lines {ki},{li} do not both pass through {x}")
        if ki == li:
            return False
        return self.position_of(ki, li) == (E, C, C, S)

    def level(self, li: int, mi: int) -> int:
        pos = self.position_of(li, mi)
        if isinstance(pos, CatalogueMiss):
            raise PositionError(f"pair ({li},{mi}) is not a catalogue position")
        return self.catalogue.level_of(pos)


# -- census -----------------------------------------------------------------------


_ROWBASE = 6 ** 3
_KEYBASE = _ROWBASE ** 3


def _sort3(a, b, c):
    lo = np.minimum(np.minimum(a, b), c)
    hi = np.maximum(np.maximum(a, b), c)
    mid = (a.astype(np.int16) + b + c) - lo - hi
    return lo.astype(np.int16), mid.astype(np.int16), hi.astype(np.int16)


def _codes3(x, axis):
    """Encode sorted triples along an axis of length 3 into one int."""
    a, b, c = np.moveaxis(x, axis, 0)
    lo, mid, hi = _sort3(a, b, c)
    return lo + 6 * mid + 36 * hi


def _sig_key(sub: np.ndarray) -> np.ndarray:
    """int64 key of the (row multiset, column multiset) signature pair.

    sub has shape (..., 3, 3): last axis are the points of M, the one
    before the points of L.
    """
    rowcode = _codes3(sub, -1)
    r0, r1, r2 = (x.astype(np.int64) for x in _sort3(*np.moveaxis(rowcode, -1, 0)))
    rowsig = r0 + _ROWBASE * r1 + _ROWBASE * _ROWBASE * r2
    colcode = _codes3(sub, -2)
    c0, c1, c2 = (x.astype(np.int64) for x in _sort3(*np.moveaxis(colcode, -1, 0)))
    colsig = c0 + _ROWBASE * c1 + _ROWBASE * _ROWBASE * c2
    return rowsig * _KEYBASE + colsig


def _swap_key(key: int) -> int:
    return (key % _KEYBASE) * _KEYBASE + key // _KEYBASE


@dataclass
class PositionCensus:
    counts: dict                      # display string -> ordered-pair count
    misses: list                      # CatalogueMiss examples (capped)
    miss_count: int
    instances: dict                   # display string -> list of (li, mi)
    total: int

    def realized(self) -> list[str]:
        return sorted(self.counts)


def position_census(model: HexagonicModel, instance_cap: int = 10000,
                    block: int = 128) -> PositionCensus:
    """Exhaustive census of all ordered line pairs.

    Vectorized for 3-point lines; larger line sizes fall back to the
    scalar path.  The inverse law is checked for every realized
    signature key: the key of (M, L) is the component swap of the key of
    (L, M), so checking the key table covers all pairs.
    """
    g = model.geometry
    nl = len(g.lines)
    if model.m != 3:
        return _census_scalar(model, instance_cap)
    R = model.rel.np()
    lines_arr = np.array(g.lines, dtype=np.int32)
    key_entry = {}
    for e in model.catalogue.entries:
        key_entry[int(_sig_key(np.array(e.template(3), dtype=np.int8)))] = e
    counts: dict[int, int] = {}
    inst: dict[int, list] = {k: [] for k in key_entry}
    miss_examples: list[CatalogueMiss] = []
    miss_count = 0
    for i0 in range(0, nl, block):
        rows = lines_arr[i0:i0 + block]
        sub = R[rows][:, :, lines_arr].transpose(0, 2, 1, 3)  # (b, nl, 3, 3)
        keys = _sig_key(sub)
        vals, cnts = np.unique(keys, return_counts=True)
        for v, c in zip(vals.tolist(), cnts.tolist()):
            counts[v] = counts.get(v, 0) + c
            if v not in key_entry:
                miss_count += c
        for v in vals.tolist():
            want = instance_cap if v in key_entry else 100
            bucket = inst.setdefault(v, [])
            if len(bucket) >= want:
                continue
            bi, mj = np.nonzero(keys == v)
            for b, m in zip(bi.tolist(), mj.tolist()):
                if len(bucket) >= want:
                    break
                bucket.append((i0 + b, m))
    for v, pairs in inst.items():
        if v not in key_entry and pairs:
            li, mi = pairs[0]
            miss_examples.append(CatalogueMiss(li, mi, model.pair_matrix(li, mi)))
    # inverse law, exhaustively at the signature-key level
    for v, c in counts.items():
        w = _swap_key(v)
        if counts.get(w) != c:
            raise PositionError("census is not symmetric under pair reversal")
        if v in key_entry:
            if w not in key_entry or \
                    key_entry[w].tuple4 != key_entry[v].inverse_tuple():
                raise PositionError(
                    f"inverse law fails for {key_entry[v].display}")
    out_counts = {}
    out_inst = {}
    for v, c in counts.items():
        if v in key_entry:
            d = key_entry[v].display
            out_counts[d] = out_counts.get(d, 0) + c
            out_inst[d] = inst[v]
    return PositionCensus(out_counts, miss_examples, miss_count, out_inst, nl * nl)


def _census_scalar(model: HexagonicModel, instance_cap: int) -> PositionCensus:
    g = model.geometry
    nl = len(g.lines)
    counts: dict[str, int] = {}
    inst: dict[str, list] = {}
    miss_examples: list[CatalogueMiss] = []
    miss_count = 0
    for li in range(nl):
        for mi in range(nl):
            pos = model.position_of(li, mi)
            if isinstance(pos, CatalogueMiss):
                miss_count += 1
                if len(miss_examples) < 100:
                    miss_examples.append(pos)
                continue
            d = to_display(pos)
            counts[d] = counts.get(d, 0) + 1
            bucket = inst.setdefault(d, [])
            if len(bucket) < instance_cap:
                bucket.append((li, mi))
    for d, c in counts.items():
        e = model.catalogue.by_tuple[parse_display(d)]
        if counts.get(to_display(e.inverse_tuple()), 0) != c:
            raise PositionError(f"inverse law fails for {d}")
    return PositionCensus(counts, miss_examples, miss_count, inst, nl * nl)


def seeded_instances(census: PositionCensus, display: str, k: int, seed: int) -> list:
    """Deterministic seeded selection of k instances of a position."""
    import random as _random
    pool = census.instances.get(display, [])
    if len(pool) <= k:
        return list(pool)
    return _random.Random(seed).sample(pool, k)


# -- combing ---------------------------------------------------------------------


@dataclass
class CombStep:
    line: int
    position: tuple[int, int, int, int]
    x: int
    k: int
    replacement: int


@dataclass
class CombTrace:
    start: int
    target: int
    steps: list[CombStep]
    final: int

    @property
    def positions(self) -> list[str]:
        return [to_display(s.position) for s in self.steps]


def find_combing_line(model: HexagonicModel, li: int, mi: int, x: int) -> int:
    """A line K through x, not locally opposite L, every line through x
    locally opposite K landing on the table successor position with M."""
    g = model.geometry
    pos = model.position_of(li, mi)
    if isinstance(pos, CatalogueMiss):
        raise PositionError("combing requires a catalogue position")
    if pos == TERMINAL:
        raise PositionError("pair already opposite")
    if x not in model.free_points(li, mi):
        raise PositionError(f"{x} is not a free point for ({li},{mi})")
    succ = model.catalogue.entry(pos).successor
    for ki in g.lines_through[x]:
        if ki != li and model.locally_opposite_at(x, ki, li):
            continue
        mates = [l2 for l2 in g.lines_through[x]
                 if l2 != ki and model.locally_opposite_at(x, ki, l2)]
        if not mates:
            continue
        if all(model.position_of(l2, mi) == succ for l2 in mates):
            return ki
    raise NoCombingLine(
        f"no combing line for pair ({li},{mi}) at point {x} "
        f"(position {to_display(pos)})")


def comb_to_opposite(model: HexagonicModel, li: int, mi: int, bound: int = 8) -> CombTrace:
    """Iterate combing replacements until the pair is opposite."""
    g = model.geometry
    steps: list[CombStep] = []
    cur = li
    for _ in range(bound):
        pos = model.position_of(cur, mi)
        if isinstance(pos, CatalogueMiss):
            raise PositionError("combing requires catalogue positions")
        if pos == TERMINAL:
            return CombTrace(li, mi, steps, cur)
        if cur == mi:
            # degenerate equal pair: comb with K = L at the least point
            x = g.lines[cur][0]
            ki = cur
        else:
            x = min(model.free_points(cur, mi))
            ki = find_combing_line(model, cur, mi, x)
        repl = min(l2 for l2 in g.lines_through[x]
                   if l2 != ki and model.locally_opposite_at(x, ki, l2))
        steps.append(CombStep(cur, pos, x, ki, repl))
        nxt = model.position_of(repl, mi)
        if nxt != model.catalogue.entry(pos).successor:
            raise PositionError(
                f"transition {to_display(pos)} -> "
                f"{nxt if isinstance(nxt, CatalogueMiss) else to_display(nxt)} "
                f"does not match the combing table")
        cur = repl
    raise NonterminatingComb(f"comb of ({li},{mi}) exceeded {bound} steps")


def level(model: HexagonicModel, li: int, mi: int) -> int:
    """Number of combing steps to the opposite position (0 when opposite)."""
    return model.level(li, mi)


# -- the two combing algorithms ----------------------------------------------------


@dataclass
class CombingRun:
    x: int
    auxiliary: tuple[int, ...]
    result: int
    levels_before: tuple[int, ...]
    levels_after: tuple[int, ...]


def _common_free_point(model: HexagonicModel, li: int, targets: Sequence[int]) -> int:
    g = model.geometry
    free = set(g.lines[li])
    for t in targets:
        free &= set(model.free_points(li, t)) if t != li else set()
    if not free:
        raise AlgorithmViolation("ALG1: projection points cover the base line")
    return min(free)


def _auxiliary_lines(model: HexagonicModel, li: int, targets: Sequence[int], x: int) -> list[int]:
    g = model.geometry
    out = []
    for t in targets:
        pos = model.position_of(li, t)
        if pos == TERMINAL:
            # projection of the opposite line onto x: through the centre of
            # the unique special pair (x, y) with y on the target
            row = [model.rel.rel(x, y) for y in g.lines[t]]
            y = g.lines[t][row.index(SPECIAL)]
            centre = (g.adj[x] & g.adj[y] & ~(1 << x) & ~(1 << y)).bit_length() - 1
            ki = g.line_through(x, centre)
            if ki is None or not model.locally_opposite_at(x, ki, li):
                raise PositionError("projection line is not locally opposite the base")
            out.append(ki)
        else:
            out.append(find_combing_line(model, li, t, x))
    return out


def combing_algorithm_1(model: HexagonicModel, li: int, targets: Sequence[int]) -> CombingRun:
    """Replace L by a line through a common free point locally opposite
    every auxiliary line; levels decrease, opposite targets stay opposite."""
    g = model.geometry
    x = _common_free_point(model, li, targets)
    aux = _auxiliary_lines(model, li, targets, x)
    before = tuple(model.level(li, t) for t in targets)
    for cand in g.lines_through[x]:
        if all(cand != m and model.locally_opposite_at(x, cand, m) for m in set(aux)):
            after = tuple(model.level(cand, t) for t in targets)
            return CombingRun(x, tuple(aux), cand, before, after)
    raise AlgorithmViolation("ALG2: no line through the free point is locally "
                             "opposite every auxiliary line")


def combing_algorithm_2(model: HexagonicModel, li: int, targets: Sequence[int],
                        comb_back_at: int) -> CombingRun:
    """Comb back at one auxiliary line: stay non-(locally-)opposite to it."""
    g = model.geometry
    x = _common_free_point(model, li, targets)
    aux = _auxiliary_lines(model, li, targets, x)
    m_star = aux[comb_back_at]
    if not model.locally_opposite_at(x, m_star, li):
        raise AlgorithmViolation("ALG3: designated auxiliary line is not locally "
                                 "opposite the base (target not opposite)")
    others = {m for i, m in enumerate(aux) if m != m_star}
    before = tuple(model.level(li, t) for t in targets)
    for cand in g.lines_through[x]:
        if cand == m_star or model.locally_opposite_at(x, cand, m_star):
            continue
        if all(cand != m and model.locally_opposite_at(x, cand, m) for m in others):
            after = tuple(model.level(cand, t) for t in targets)
            return CombingRun(x, tuple(aux), cand, before, after)
    raise AlgorithmViolation("ALG3: no admissible line through the free point")


def comb_until_opposite_all(model: HexagonicModel, li: int, targets: Sequence[int],
                            bound: int = 64) -> list[int]:
    """Drive the two algorithms until the base line is opposite every target.

    Applies the first algorithm while at least two targets are at level 2
    or more, combs back when exactly one is, and finishes with the first
    algorithm; returns the sequence of base lines."""
    seq = [li]
    cur = li
    for _ in range(bound):
        levels = [model.level(cur, t) for t in targets]
        if all(lv == 0 for lv in levels):
            return seq
        high = [i for i, lv in enumerate(levels) if lv >= 2]
        if len(high) == 1 and any(lv == 0 for lv in levels):
            back = next(i for i, lv in enumerate(levels) if lv == 0)
            cur = combing_algorithm_2(model, cur, targets, back).result
        else:
            cur = combing_algorithm_1(model, cur, targets).result
        seq.append(cur)
    raise NonterminatingComb(f"combing driver exceeded {bound} iterations")
