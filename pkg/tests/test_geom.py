import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tileforge.geom import (
    GeomError,
    adjacency_graph,
    ball_covered,
    canonicalize,
    clip_area_rect,
    contact,
    contact_between,
    enumerate_r_patterns,
    extract_rpattern,
    make_shape,
    pattern_build,
    pt,
    shape_diameter_sq,
    tile,
    two_tile_census,
)
from tileforge.rings import Quad, SQRT2, mpq, rat

UNIT = make_shape("unit", [pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)])
FIVE_HALF = make_shape(
    "sq5/2", [pt(0, 0), pt(rat(5, 2), 0), pt(rat(5, 2), rat(5, 2)), pt(0, rat(5, 2))]
)


def unit_block(coords):
    return [tile(UNIT, x, y) for x, y in coords]


# -- shapes ------------------------------------------------------------------


def test_make_shape_unit_square():
    assert UNIT.area() == 1
    assert UNIT.origin == pt(0, 0)


def test_make_shape_five_half():
    assert FIVE_HALF.area() == rat(25, 4)


def test_make_shape_cw_input_reversed():
    s = make_shape("cw", [pt(0, 0), pt(0, 1), pt(1, 1), pt(1, 0)])
    assert s.area() == 1


def test_make_shape_bowtie_rejected():
    with pytest.raises(GeomError) as e:
        make_shape("bow", [pt(0, 0), pt(1, 1), pt(1, 0), pt(0, 1)])
    assert e.value.code == "SELF_INTERSECTION"


def test_make_shape_degenerate_rejected():
    with pytest.raises(GeomError) as e:
        make_shape("flat", [pt(0, 0), pt(1, 0), pt(2, 0)])
    assert e.value.code == "ZERO_AREA"


def test_diameter_sq():
    assert shape_diameter_sq(UNIT) == 2
    assert shape_diameter_sq(FIVE_HALF) == rat(25, 2)
    from tileforge.rings import SQRT3

    tri = make_shape(
        "tri",
        [pt(0, 0), pt(rat(5, 2), 0), (Quad(mpq(5, 4)), SQRT3 * rat(5, 4))],
    )
    assert shape_diameter_sq(tri) == rat(25, 4)


# -- contact -----------------------------------------------------------------


def test_contact_side_by_side():
    c = contact(tile(UNIT, 0, 0), tile(UNIT, 1, 0))
    assert c.kind == "segment"
    (lo, hi) = c.segments[0]
    assert lo == pt(1, 0) and hi == pt(1, 1)


def test_contact_diagonal_point():
    c = contact(tile(UNIT, 0, 0), tile(UNIT, 1, 1))
    assert c.kind == "point"
    assert c.points == (pt(1, 1),)


def test_contact_identical_overlap():
    assert contact(tile(UNIT, 0, 0), tile(UNIT, 0, 0)).kind == "overlap"


def test_contact_partial_overlap():
    assert contact(tile(UNIT, 0, 0), tile(UNIT, rat(1, 2), 0)).kind == "overlap"


def test_contact_disjoint():
    assert contact(tile(UNIT, 0, 0), tile(UNIT, 3, 0)).kind == "disjoint"


def test_contact_partial_edge_slide():
    c = contact(tile(UNIT, 0, 0), tile(UNIT, 1, rat(1, 3)))
    assert c.kind == "segment"
    lo, hi = c.segments[0]
    assert lo == pt(1, rat(1, 3)) and hi == pt(1, 1)


def test_contact_vertex_crossing_edge_overlap():
    # rotated-ish poke: a triangle whose vertex sits inside the square edge,
    # wedges overlapping
    tri = make_shape("poke", [pt(0, 0), pt(2, 1), pt(0, 2)])
    sq = tile(UNIT, rat(3, 2), rat(1, 2))
    assert contact(tile(tri, 0, 0), sq).kind == "overlap"


# -- patterns ----------------------------------------------------------------


def test_pattern_block_ok():
    p = pattern_build(unit_block([(0, 0), (1, 0), (0, 1), (1, 1)]))
    assert len(p) == 4
    segs = [e for e in p.adjacency if e[2] == "segment"]
    points = [e for e in p.adjacency if e[2] == "point"]
    assert len(segs) == 4 and len(points) == 2


def test_pattern_ring_not_simply_connected():
    ring = [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)]
    with pytest.raises(GeomError) as e:
        pattern_build(unit_block(ring))
    assert e.value.code == "NOT_SIMPLY_CONNECTED"


def test_pattern_corner_only_disconnected():
    with pytest.raises(GeomError) as e:
        pattern_build(unit_block([(0, 0), (1, 1)]))
    assert e.value.code == "DISCONNECTED"


def test_pattern_overlap():
    with pytest.raises(GeomError) as e:
        pattern_build([tile(UNIT, 0, 0), tile(UNIT, rat(1, 2), rat(1, 2))])
    assert e.value.code == "OVERLAP"


# -- canonicalize -------------------------------------------------------------


coords = st.integers(-8, 8)


@given(st.sets(st.tuples(coords, coords), min_size=1, max_size=6), coords, coords)
@settings(max_examples=60, deadline=None)
def test_canonical_translation_invariance(cells, dx, dy):
    tiles = unit_block(sorted(cells))
    moved = [t.translated(pt(dx, dy)) for t in tiles]
    assert canonicalize(tiles).digest == canonicalize(moved).digest


def test_canonical_rotation_differs():
    ell = unit_block([(0, 0), (1, 0), (0, 1)])
    rot = unit_block([(0, 0), (0, 1), (1, 1)])  # 90deg image of the L
    assert canonicalize(ell).digest != canonicalize(rot).digest


# -- census / adjacency graph --------------------------------------------------


def test_census_block():
    p = pattern_build(unit_block([(x, y) for x in range(3) for y in range(3)]))
    n, classes = two_tile_census([p])
    assert n == 4


def test_census_union_monotone():
    p1 = pattern_build(unit_block([(0, 0), (1, 0)]))
    p2 = pattern_build(unit_block([(0, 0), (0, 1)]))
    n1, _ = two_tile_census([p1])
    n2, _ = two_tile_census([p2])
    n12, _ = two_tile_census([p1, p2])
    assert n1 == n2 == 1 and n12 == 2


def test_adjacency_graph_strip():
    p = pattern_build(unit_block([(0, 0), (1, 0), (2, 0)]))
    g = adjacency_graph(p)
    assert g.n == 3 and len(g.edges) == 2
    assert g.distances_from(0)[2] == 2


def test_adjacency_graph_block():
    p = pattern_build(unit_block([(0, 0), (1, 0), (0, 1), (1, 1)]))
    g = adjacency_graph(p)
    assert g.n == 4 and len(g.edges) == 6


def test_adjacency_graph_single():
    p = pattern_build([tile(UNIT, 0, 0)])
    g = adjacency_graph(p)
    assert g.n == 1 and len(g.edges) == 0


# -- clipping / balls -----------------------------------------------------------


def test_clip_area_basic():
    v = [pt(0, 0), pt(2, 0), pt(2, 2), pt(0, 2)]
    assert clip_area_rect(v, Quad(1), Quad(3), Quad(1), Quad(3)) == 1
    assert clip_area_rect(v, Quad(-1), Quad(0), Quad(0), Quad(1)) == 0


def test_clip_area_nonconvex():
    # U-shape: rectangle cut into the top
    u = [pt(0, 0), pt(3, 0), pt(3, 2), pt(2, 2), pt(2, 1), pt(1, 1), pt(1, 2), pt(0, 2)]
    v = make_shape("u", u).vertices
    assert clip_area_rect(v, Quad(0), Quad(3), Quad(0), Quad(2)) == 5
    # window covering the notch: only the two prongs' area counts
    assert clip_area_rect(v, Quad(0), Quad(3), Quad(1), Quad(2)) == 2


def test_ball_covered():
    tiles = unit_block([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert ball_covered(tiles, pt(1, 1), rat(1, 2))
    assert ball_covered(tiles, pt(1, 1), Quad(1))
    assert not ball_covered(tiles, pt(1, 1), rat(3, 2))


# -- r-patterns -----------------------------------------------------------------


def edge_to_edge_allowed(shape):
    side = shape.bbox[2] - shape.bbox[0]
    out = []
    for dx, dy in [(side, 0), (0, side), (side, side), (side, -side)]:
        out.append(canonicalize([tile(shape, 0, 0), tile(shape, dx, dy)]))
    return out


def test_extract_rpattern_block():
    patch = unit_block([(x, y) for x in range(4) for y in range(4)])
    rp = extract_rpattern(patch, pt(2, 2), Quad(1), Quad(2))
    assert len(rp.pattern.tiles) == 4


def test_enumerate_r0_single_tiles():
    res = enumerate_r_patterns([UNIT], edge_to_edge_allowed(UNIT), Quad(0))
    assert all(len(rp.pattern.tiles) == 1 for rp in res)
    assert len(res) == 1


def test_enumerate_r_half_blocks():
    res = enumerate_r_patterns([UNIT], edge_to_edge_allowed(UNIT), rat(1, 2))
    sizes = sorted(len(rp.pattern.tiles) for rp in res)
    # minimal covers of a unit ball: 1x1, 1x2, 2x1, 2x2 blocks
    assert sizes == [1, 2, 2, 4]


def brute_force_r_patterns(shape, allowed, r, max_tiles=4):
    """Independent oracle: enumerate connected lattice patches up to
    translation, filter by the r-pattern conditions over candidate centers
    taken from a 1-D face decomposition per axis."""
    from tileforge.geom import check_rpattern

    side = shape.bbox[2] - shape.bbox[0]
    d_max_sq = shape_diameter_sq(shape)

    def norm(cells):
        mx = min(c[0] for c in cells)
        my = min(c[1] for c in cells)
        return tuple(sorted((x - mx, y - my) for x, y in cells))

    patches = set()
    frontier = [norm([(0, 0)])]
    patches.add(frontier[0])
    while frontier:
        cur = frontier.pop()
        if len(cur) >= max_tiles:
            continue
        for (x, y) in cur:
            for dx, dy in [(1, 0), (-1, 0), (0, 1), (0, -1)]:
                nxt = (x + dx, y + dy)
                if nxt in cur:
                    continue
                new = norm(list(cur) + [nxt])
                if new not in patches:
                    patches.add(new)
                    frontier.append(new)

    def face_reps(vals):
        vals = sorted(set(vals), key=float)
        out = list(vals)
        for a, b in zip(vals, vals[1:]):
            out.append((a + b) / 2)
        return out

    found = {}
    for patch in sorted(patches):
        tiles = [tile(shape, side * x, side * y) for x, y in patch]
        xvals = {v[0] for t in tiles for v in t.vertices()}
        yvals = {v[1] for t in tiles for v in t.vertices()}
        cxs = face_reps([x - r for x in xvals] + [x + r for x in xvals])
        cys = face_reps([y - r for y in yvals] + [y + r for y in yvals])
        ok = False
        for cx in cxs:
            for cy in cys:
                if check_rpattern(tiles, (cx, cy), r, d_max_sq) is None:
                    ok = True
                    break
            if ok:
                break
        if ok:
            found[canonicalize(tiles).digest] = patch
    return found


def test_enumerate_matches_bruteforce_unit():
    r = rat(1, 2)
    res = enumerate_r_patterns([UNIT], edge_to_edge_allowed(UNIT), r)
    mine = {rp.canonical().digest for rp in res}
    oracle = set(brute_force_r_patterns(UNIT, None, r))
    assert mine == oracle


def test_enumerate_five_half_at_dmax():
    r = SQRT2 * rat(5, 2)  # sqrt(25/2)
    res = enumerate_r_patterns([FIVE_HALF], edge_to_edge_allowed(FIVE_HALF), r)
    sizes = sorted(len(rp.pattern.tiles) for rp in res)
    assert len(res) > 0
    # covers need 3 or 4 tiles per axis
    assert set(sizes) <= {9, 12, 16}
    # outer-ball containment holds for all
    for rp in res:
        from tileforge.geom import support_in_ball

        assert support_in_ball(rp.pattern.tiles, rp.center, rp.radius, rat(25, 2))
