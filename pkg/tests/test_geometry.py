import json

import pytest

from liegeom.constructors import pg, polar_space, PolarFormSpec
from liegeom.geometry import (
    Geometry,
    GeometryError,
    Kind,
    bit_indices,
    bitset,
    convex_closure,
    incidence_girth_diameter,
    is_gamma_space,
    is_generalized_polygon,
    line_grassmannian,
    point_distance,
    point_residual,
    recompute_collinearity,
    singular_planes,
    singular_subspace_dim,
    validate,
)
from liegeom.relations import SYMPLECTIC, relation_matrix


def fano():
    return pg(2, 2)


def test_validate_fano():
    rep = validate(fano())
    assert rep.valid and rep.partial_linear and rep.connected
    assert rep.order == (2, 2)


def test_validate_flags_repeated_line():
    g = Geometry(4, [(0, 1, 2), (0, 1, 3)])
    rep = validate(g)
    assert not rep.partial_linear
    assert rep.violations and rep.violations[0][0] == "pair-on-two-lines"


def test_girth_diameter():
    assert incidence_girth_diameter(fano()) == (6, 3)
    w32 = polar_space(PolarFormSpec("sp", 3, 2))
    assert incidence_girth_diameter(w32) == (8, 4)


def test_girth_diameter_h2(h2):
    assert incidence_girth_diameter(h2) == (12, 6)
    assert is_generalized_polygon(h2, 6)
    assert not is_generalized_polygon(h2, 4)


def test_is_generalized_polygon_quadrangle(w32):
    assert is_generalized_polygon(w32, 4)
    assert not is_generalized_polygon(w32, 6)


def test_point_distance(h2):
    assert point_distance(h2, 5, 5) == 0
    x, y = h2.lines[0][0], h2.lines[0][1]
    assert point_distance(h2, x, y) == 1
    dmax = max(point_distance(h2, 0, y) for y in range(h2.n))
    assert dmax == 3


def test_point_distance_disconnected():
    g = Geometry(6, [(0, 1, 2), (3, 4, 5)])
    with pytest.raises(GeometryError):
        point_distance(g, 0, 3)


def test_collinearity_recompute(h2, w52):
    for g in (h2, w52):
        assert recompute_collinearity(g) == g.adj


def test_singular_planes_counts(w32, w52):
    assert singular_planes(w32) == []
    assert len(singular_planes(w52)) == 135
    assert len(singular_planes(pg(3, 2))) == 15


def test_singular_planes_q72(q72):
    planes = singular_planes(q72)
    assert len(planes) == 2025
    assert all(len(p) == 7 for p in planes)


def test_gamma_space_gate():
    # a triangle-with-tail is not a gamma space
    g = Geometry(4, [(0, 1, 3), (1, 2, 3), (0, 2, 3)])
    assert not validate(g).partial_linear or not is_gamma_space(g)


def test_line_grassmannian_counts(q72, w52, gr_q72, gr_w52):
    assert gr_q72.n == 1575 and len(gr_q72.lines) == 14175
    assert gr_w52.n == 315 and len(gr_w52.lines) == 945
    g3 = line_grassmannian(pg(3, 2))
    assert g3.n == 35
    for g in (gr_q72, gr_w52):
        assert validate(g).partial_linear


def test_line_grassmannian_requires_planes(w32):
    with pytest.raises(GeometryError):
        line_grassmannian(w32)


def test_point_residual_w52(w52):
    res = point_residual(w52, 0)
    assert (res.n, len(res.lines)) == (15, 15)
    assert is_generalized_polygon(res, 4)
    assert validate(res).order == (2, 2)


def test_point_residual_pg32():
    res = point_residual(pg(3, 2), 0)
    assert (res.n, len(res.lines)) == (7, 7)
    assert validate(res).order == (2, 2)


def test_point_residual_needs_planes(w32):
    with pytest.raises(GeometryError):
        point_residual(w32, 0)


def test_point_residual_of_grassmannian_connected(gr_q72):
    import random
    rng = random.Random(31)
    for p in rng.sample(range(gr_q72.n), 60):
        res = point_residual(gr_q72, p)
        rep = validate(res)
        assert rep.partial_linear and rep.connected
        assert res.n == 27


def test_convex_closure_basics(w52):
    assert convex_closure(w52, [3]) == 1 << 3
    li = w52.lines[10]
    got = convex_closure(w52, [li[0], li[1]])
    assert got == bitset(li)
    # idempotent and monotone
    seed = [0, 5, 9]
    c1 = convex_closure(w52, seed)
    assert convex_closure(w52, bit_indices(c1)) == c1
    assert c1 & bitset(seed) == bitset(seed)
    assert convex_closure(w52, seed[:2]) & ~c1 == 0


def test_convex_closure_symp_is_polar(gr_q72, gr_model):
    rel = gr_model.rel
    pair = next((x, y) for x in range(40) for y in range(gr_q72.n)
                if rel.rel(x, y) == SYMPLECTIC)
    bits = convex_closure(gr_q72, pair)
    members = bit_indices(bits)
    inner = [li for li, lb in enumerate(gr_q72.line_bits) if not (lb & ~bits)]
    assert inner, "symp closure contains no full line"
    for x in members:
        for li in inner:
            c = (gr_q72.adj[x] & gr_q72.line_bits[li]).bit_count()
            assert c in (1, len(gr_q72.lines[li]))


def test_json_round_trip(h2):
    text = h2.to_json()
    g2 = Geometry.from_json(text)
    assert g2 == h2
    assert g2.to_json() == text
    assert g2.kind.as_str() == "polygon:6"


def test_json_import_rejects_duplicates():
    doc = {"name": "bad", "kind": "other", "order": None, "points": 3,
           "lines": [[0, 1, 2], [2, 1, 0]]}
    with pytest.raises(GeometryError):
        Geometry.from_json(json.dumps(doc))


def test_json_import_normalizes_unsorted():
    doc = {"name": "g", "kind": "other", "order": None, "points": 5,
           "lines": [[2, 1, 0], [0, 3, 4]]}
    warnings = []
    g = Geometry.from_json(json.dumps(doc), warn=warnings.append)
    assert warnings
    assert (0, 1, 2) in g.lines


def test_singular_subspace_dim(w52):
    pl = singular_planes(w52)[0]
    assert singular_subspace_dim(w52, pl) == 2
    assert singular_subspace_dim(w52, w52.lines[0]) == 1


def test_kind_round_trip():
    for s in ("polygon:6", "polar:3", "grassmannian:W(5,2)", "other"):
        assert Kind.from_str(s).as_str() == s
