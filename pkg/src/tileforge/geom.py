"""Exact polygon kernel: shapes, placed tiles, patterns, contacts, censuses.

All predicates are decided in exact quadratic-ring arithmetic; floats only
appear in rendering code elsewhere.  Polygons are simple, stored
counter-clockwise.  Patterns are finite interior-disjoint tile sets whose
support is connected (through shared boundary segments) and simply
connected; the latter is decided through the Euler characteristic of the
boundary arrangement.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .rings import Quad, QuadLike, mpq, qmax, qmin, rat

Point = tuple[Quad, Quad]


class GeomError(Exception):
    def __init__(self, code: str, message: str = "", **data):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.data = data


def pt(x: QuadLike, y: QuadLike) -> Point:
    return (Quad.of(x), Quad.of(y))


def padd(p: Point, q: Point) -> Point:
    return (p[0] + q[0], p[1] + q[1])


def psub(p: Point, q: Point) -> Point:
    return (p[0] - q[0], p[1] - q[1])


def cross(u: Point, v: Point) -> Quad:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Point, v: Point) -> Quad:
    return u[0] * v[0] + u[1] * v[1]


def orient(a: Point, b: Point, c: Point) -> int:
    return cross(psub(b, a), psub(c, a)).sign()


def dist_sq(p: Point, q: Point) -> Quad:
    d = psub(p, q)
    return dot(d, d)


def _lex_less(p: Point, q: Point) -> bool:
    return p[0] < q[0] or (p[0] == q[0] and p[1] < q[1])


def lex_min_point(points: Iterable[Point]) -> Point:
    it = iter(points)
    best = next(it)
    for p in it:
        if _lex_less(p, best):
            best = p
    return best


# ---------------------------------------------------------------------------
# segment predicates
# ---------------------------------------------------------------------------


def _on_segment_collinear(p: Point, a: Point, b: Point) -> bool:
    """p collinear with a-b assumed; is p within the closed segment?"""
    return (
        qmin((a[0], b[0])) <= p[0] <= qmax((a[0], b[0]))
        and qmin((a[1], b[1])) <= p[1] <= qmax((a[1], b[1]))
    )


def on_segment(p: Point, a: Point, b: Point) -> bool:
    return orient(a, b, p) == 0 and _on_segment_collinear(p, a, b)


def seg_intersection(a: Point, b: Point, c: Point, d: Point):
    """Exact intersection of closed segments ab and cd.

    Returns (kind, payload): kind in {"none", "point", "segment"} with
    payload None, a point, or an ordered point pair; plus a bool flag
    `proper` when a point crossing is interior to both segments.
    """
    d1 = orient(c, d, a)
    d2 = orient(c, d, b)
    d3 = orient(a, b, c)
    d4 = orient(a, b, d)

    if d1 == 0 and d2 == 0:
        # collinear: project on the dominant axis
        axis = 0 if (a[0] != b[0]) else 1
        lo1, hi1 = (a, b) if a[axis] <= b[axis] else (b, a)
        lo2, hi2 = (c, d) if c[axis] <= d[axis] else (d, c)
        lo = lo1 if lo1[axis] >= lo2[axis] else lo2
        hi = hi1 if hi1[axis] <= hi2[axis] else hi2
        if lo[axis] > hi[axis]:
            return ("none", None, False)
        if lo[axis] == hi[axis]:
            return ("point", lo, False)
        return ("segment", (lo, hi), False)

    if d1 * d2 < 0 and d3 * d4 < 0:
        r = psub(b, a)
        s = psub(d, c)
        t = cross(psub(c, a), s) / cross(r, s)
        p = (a[0] + r[0] * t, a[1] + r[1] * t)
        return ("point", p, True)

    # endpoint touches (T-junctions, shared endpoints)
    if d1 == 0 and _on_segment_collinear(a, c, d):
        return ("point", a, False)
    if d2 == 0 and _on_segment_collinear(b, c, d):
        return ("point", b, False)
    if d3 == 0 and _on_segment_collinear(c, a, b):
        return ("point", c, False)
    if d4 == 0 and _on_segment_collinear(d, a, b):
        return ("point", d, False)
    return ("none", None, False)


def point_in_polygon(p: Point, verts: Sequence[Point]) -> int:
    """2 strictly inside, 1 on the boundary, 0 outside (simple polygon)."""
    n = len(verts)
    inside = False
    px, py = p
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        if on_segment(p, a, b):
            return 1
        ay, by = a[1], b[1]
        if (ay > py) != (by > py):
            side = orient(a, b, p)
            if by > ay:
                if side > 0:
                    inside = not inside
            else:
                if side < 0:
                    inside = not inside
    return 2 if inside else 0


def polygon_area2(verts: Sequence[Point]) -> Quad:
    """Twice the signed area."""
    total = Quad(0)
    n = len(verts)
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        total = total + (a[0] * b[1] - b[0] * a[1])
    return total


def _clip_halfplane(verts: list[Point], axis: int, bound: Quad, keep_le: bool) -> list[Point]:
    """Insert boundary crossings then clamp; preserves enclosed area exactly."""
    if not verts:
        return []
    out: list[Point] = []
    n = len(verts)
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        out.append(a)
        av, bv = a[axis], b[axis]
        if (av < bound < bv) or (bv < bound < av):
            t = (bound - av) / (bv - av)
            other = a[1 - axis] + (b[1 - axis] - a[1 - axis]) * t
            out.append((bound, other) if axis == 0 else (other, bound))
    clamped: list[Point] = []
    for p in out:
        v = p[axis]
        if keep_le:
            v = v if v <= bound else bound
        else:
            v = v if v >= bound else bound
        clamped.append((v, p[1]) if axis == 0 else (p[0], v))
    return clamped


def clip_area_rect(verts: Sequence[Point], xlo: Quad, xhi: Quad, ylo: Quad, yhi: Quad) -> Quad:
    """Exact area of polygon ∩ axis rectangle (polygon given CCW)."""
    if xlo >= xhi or ylo >= yhi:
        return Quad(0)
    poly = list(verts)
    poly = _clip_halfplane(poly, 0, Quad.of(xhi), True)
    poly = _clip_halfplane(poly, 0, Quad.of(xlo), False)
    poly = _clip_halfplane(poly, 1, Quad.of(yhi), True)
    poly = _clip_halfplane(poly, 1, Quad.of(ylo), False)
    area2 = polygon_area2(poly)
    return area2 / 2


# ---------------------------------------------------------------------------
# shapes and placed tiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Shape:
    name: str
    vertices: tuple[Point, ...]
    origin: Point

    def __post_init__(self):
        box = _bbox(self.vertices)
        object.__setattr__(self, "_bbox", box)
        x0, y0, x1, y1 = box
        corners = {(x0, y0), (x1, y0), (x1, y1), (x0, y1)}
        object.__setattr__(
            self, "_is_box", len(self.vertices) == 4 and set(self.vertices) == corners
        )

    @property
    def bbox(self):
        return self._bbox

    @property
    def is_box(self) -> bool:
        """True when the shape is exactly its axis-aligned bounding box."""
        return self._is_box

    def area(self) -> Quad:
        return polygon_area2(self.vertices) / 2

    def edges(self) -> list[tuple[Point, Point]]:
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def __hash__(self):
        return hash((self.name, self.vertices))


def _bbox(points: Iterable[Point]):
    xs = []
    ys = []
    for p in points:
        xs.append(p[0])
        ys.append(p[1])
    return (qmin(xs), qmin(ys), qmax(xs), qmax(ys))


def _ring_of(points: Iterable[Point]) -> int:
    d = 1
    for p in points:
        for c in p:
            if c.d != 1:
                if d == 1:
                    d = c.d
                elif d != c.d:
                    raise GeomError("MIXED_RINGS", f"radicands {d} and {c.d}")
    return d


def make_shape(name: str, vertices: Sequence[Point], origin: Optional[Point] = None) -> Shape:
    verts = [(Quad.of(x), Quad.of(y)) for (x, y) in vertices]
    if len(verts) < 3:
        raise GeomError("ZERO_AREA", "need at least 3 vertices")
    _ring_of(verts)
    for i in range(len(verts)):
        if verts[i] == verts[(i + 1) % len(verts)]:
            raise GeomError("ZERO_AREA", "repeated consecutive vertex")
    n = len(verts)
    if all(orient(verts[0], verts[1], v) == 0 for v in verts[2:]):
        raise GeomError("ZERO_AREA", f"{name}: vertices collinear")
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        for j in range(i + 1, n):
            c, d = verts[j], verts[(j + 1) % n]
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            kind, payload, proper = seg_intersection(a, b, c, d)
            if kind == "none":
                continue
            if kind == "segment":
                raise GeomError("SELF_INTERSECTION", f"{name}: edges {i},{j} overlap")
            if adjacent:
                shared = b if j == i + 1 else a
                if payload != shared:
                    raise GeomError("SELF_INTERSECTION", f"{name}: edges {i},{j}")
            else:
                raise GeomError("SELF_INTERSECTION", f"{name}: edges {i},{j}")
    area2 = polygon_area2(verts)
    if area2 == 0:
        raise GeomError("ZERO_AREA", name)
    if area2 < 0:
        verts.reverse()
    if origin is None:
        origin = lex_min_point(verts)
    else:
        origin = (Quad.of(origin[0]), Quad.of(origin[1]))
    return Shape(name, tuple(verts), origin)


def shape_diameter_sq(shape: Shape) -> Quad:
    best = Quad(0)
    v = shape.vertices
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            d = dist_sq(v[i], v[j])
            if d > best:
                best = d
    return best


@dataclass(frozen=True)
class PlacedTile:
    shape: Shape
    offset: Point
    label: object = None

    def vertices(self) -> list[Point]:
        ox, oy = self.offset
        return [(x + ox, y + oy) for (x, y) in self.shape.vertices]

    def bbox(self):
        ox, oy = self.offset
        x0, y0, x1, y1 = self.shape.bbox
        return (x0 + ox, y0 + oy, x1 + ox, y1 + oy)

    def translated(self, v: Point) -> "PlacedTile":
        return PlacedTile(self.shape, padd(self.offset, v), self.label)

    def __hash__(self):
        return hash((self.shape, self.offset, self.label))


def tile(shape: Shape, x: QuadLike = 0, y: QuadLike = 0, label: object = None) -> PlacedTile:
    return PlacedTile(shape, pt(x, y), label)


# ---------------------------------------------------------------------------
# contact classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Contact:
    kind: str  # "overlap" | "disjoint" | "point" | "segment"
    points: tuple[Point, ...] = ()
    segments: tuple[tuple[Point, Point], ...] = ()

    @property
    def touching(self) -> bool:
        return self.kind in ("point", "segment")


def _bbox_gap(b1, b2) -> bool:
    return b1[2] < b2[0] or b2[2] < b1[0] or b1[3] < b2[1] or b2[3] < b1[1]


def _wedge_at(p: Point, verts: Sequence[Point]) -> Optional[tuple[Point, Point]]:
    """Open CCW direction sector (start, end) of the polygon interior at
    boundary point p, or None if p is not on the boundary."""
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if p == a:
            prev = verts[(i - 1) % n]
            return (psub(b, p), psub(prev, p))
        if p != b and on_segment(p, a, b):
            d = psub(b, a)
            return (d, (-d[0], -d[1]))
    return None


def _in_open_sector(d: Point, s: Point, e: Point) -> bool:
    cs = cross(s, e).sign()
    if cs > 0:
        return cross(s, d) > 0 and cross(d, e) > 0
    if cs < 0:
        return not (cross(e, d) >= 0 and cross(d, s) >= 0)
    # s, e collinear
    if dot(s, e) < 0:  # straight angle: open half-plane left of s
        return cross(s, d) > 0
    # zero-angle wedge cannot occur in a simple polygon; treat as full circle
    return cross(s, d) != 0 or dot(s, d) > 0


def _sectors_overlap(w1: tuple[Point, Point], w2: tuple[Point, Point]) -> bool:
    s1, e1 = w1
    s2, e2 = w2
    if _in_open_sector(s2, s1, e1) or _in_open_sector(s1, s2, e2):
        return True
    # identical start directions
    return cross(s1, s2) == 0 and dot(s1, s2) > 0


def contact(a: PlacedTile, b: PlacedTile) -> Contact:
    if _bbox_gap(a.bbox(), b.bbox()):
        return Contact("disjoint")
    va = a.vertices()
    vb = b.vertices()
    pts: list[Point] = []
    segs: list[tuple[Point, Point]] = []
    na, nb = len(va), len(vb)
    for i in range(na):
        p1, p2 = va[i], va[(i + 1) % na]
        for j in range(nb):
            q1, q2 = vb[j], vb[(j + 1) % nb]
            kind, payload, proper = seg_intersection(p1, p2, q1, q2)
            if kind == "none":
                continue
            if proper:
                return Contact("overlap")
            if kind == "point":
                pts.append(payload)
            else:
                segs.append(payload)
    for p in va:
        if point_in_polygon(p, vb) == 2:
            return Contact("overlap")
    for p in vb:
        if point_in_polygon(p, va) == 2:
            return Contact("overlap")
    if not pts and not segs:
        return Contact("disjoint")

    # same-side abutment along shared segments => interior overlap
    for lo, hi in segs:
        splits = {lo, hi}
        for v in list(va) + list(vb):
            if v != lo and v != hi and on_segment(v, lo, hi):
                splits.add(v)
        axis = 0 if lo[0] != hi[0] else 1
        ordered = _sort_on_segment(list(splits), axis)
        for k in range(len(ordered) - 1):
            m = (
                (ordered[k][0] + ordered[k + 1][0]) / 2,
                (ordered[k][1] + ordered[k + 1][1]) / 2,
            )
            wa = _wedge_at(m, va)
            wb = _wedge_at(m, vb)
            if wa and wb and _sectors_overlap(wa, wb):
                return Contact("overlap")

    # wedge overlap at isolated touch points => interior overlap
    seg_cover = list(segs)
    isolated = []
    seen = set()
    for p in pts:
        key = p
        if key in seen:
            continue
        seen.add(key)
        if any(on_segment(p, lo, hi) for lo, hi in seg_cover):
            continue
        isolated.append(p)
    for p in isolated:
        wa = _wedge_at(p, va)
        wb = _wedge_at(p, vb)
        if wa and wb and _sectors_overlap(wa, wb):
            return Contact("overlap")

    merged = _merge_segments(segs)
    if merged:
        return Contact("segment", tuple(isolated), tuple(merged))
    return Contact("point", tuple(isolated))


def _sort_on_segment(points: list[Point], axis: int) -> list[Point]:
    return sorted(points, key=_AxisKey(axis))


class _AxisKey:
    def __init__(self, axis: int):
        self.axis = axis

    def __call__(self, p: Point):
        return _QuadKey(p[self.axis])


class _QuadKey:
    """Sort key wrapper: Quad is totally ordered but not against tuples."""

    __slots__ = ("v",)

    def __init__(self, v: Quad):
        self.v = v

    def __lt__(self, other):
        return self.v < other.v

    def __eq__(self, other):
        return self.v == other.v


def point_sort_key(p: Point):
    return (_QuadKey(p[0]), _QuadKey(p[1]))


def _merge_segments(segs: list[tuple[Point, Point]]) -> list[tuple[Point, Point]]:
    """Merge collinear overlapping segments into maximal ones."""
    out: list[tuple[Point, Point]] = []
    rest = list(segs)
    while rest:
        lo, hi = rest.pop()
        changed = True
        while changed:
            changed = False
            for k, (a, b) in enumerate(rest):
                if orient(lo, hi, a) == 0 and orient(lo, hi, b) == 0:
                    if _on_segment_collinear(a, lo, hi) or _on_segment_collinear(b, lo, hi) or _on_segment_collinear(lo, a, b):
                        cand = [lo, hi, a, b]
                        axis = 0 if any(p[0] != lo[0] for p in cand) else 1
                        cand = _sort_on_segment(cand, axis)
                        lo, hi = cand[0], cand[-1]
                        rest.pop(k)
                        changed = True
                        break
        out.append((lo, hi))
    dedup = []
    for s in out:
        if s not in dedup:
            dedup.append(s)
    return dedup


# ---------------------------------------------------------------------------
# patterns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pattern:
    tiles: tuple[PlacedTile, ...]
    adjacency: tuple[tuple[int, int, str], ...] = field(default=(), compare=False)

    def support_bbox(self):
        boxes = [t.bbox() for t in self.tiles]
        return (
            qmin(b[0] for b in boxes),
            qmin(b[1] for b in boxes),
            qmax(b[2] for b in boxes),
            qmax(b[3] for b in boxes),
        )

    def translated(self, v: Point) -> "Pattern":
        return Pattern(tuple(t.translated(v) for t in self.tiles), self.adjacency)

    def __len__(self):
        return len(self.tiles)

    def __hash__(self):
        return hash(self.tiles)


_contact_cache: dict = {}


def contact_between(a: PlacedTile, b: PlacedTile) -> Contact:
    """Contact with caching on (shape pair, relative offset)."""
    dx = b.offset[0] - a.offset[0]
    dy = b.offset[1] - a.offset[1]
    key = (id(a.shape), id(b.shape), dx, dy)
    hit = _contact_cache.get(key)
    if hit is None:
        c = contact(a, b)
        rel = Contact(
            c.kind,
            tuple(psub(p, a.offset) for p in c.points),
            tuple((psub(s, a.offset), psub(t, a.offset)) for s, t in c.segments),
        )
        # keep shape refs alive so id() keys stay unique
        _contact_cache[key] = (a.shape, b.shape, rel)
        return c
    _, _, rel = hit
    return Contact(
        rel.kind,
        tuple(padd(p, a.offset) for p in rel.points),
        tuple((padd(s, a.offset), padd(t, a.offset)) for s, t in rel.segments),
    )


def pattern_build(tiles: Sequence[PlacedTile], check_simply_connected: bool = True) -> Pattern:
    tiles = tuple(tiles)
    if not tiles:
        raise GeomError("DISCONNECTED", "empty tile list")
    _ring_of(v for t in tiles for v in (t.offset,))
    adj: list[tuple[int, int, str]] = []
    seg_adj: dict[int, set[int]] = {i: set() for i in range(len(tiles))}
    for i in range(len(tiles)):
        for j in range(i + 1, len(tiles)):
            c = contact_between(tiles[i], tiles[j])
            if c.kind == "overlap":
                raise GeomError("OVERLAP", f"tiles {i} and {j}", pair=(i, j))
            if c.kind == "segment":
                adj.append((i, j, "segment"))
                seg_adj[i].add(j)
                seg_adj[j].add(i)
            elif c.kind == "point":
                adj.append((i, j, "point"))
    # connectivity through shared segments
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in seg_adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(tiles):
        raise GeomError("DISCONNECTED", f"{len(tiles) - len(seen)} tiles unreachable")
    if check_simply_connected and len(tiles) > 1:
        if euler_characteristic(tiles) != 1:
            raise GeomError("NOT_SIMPLY_CONNECTED", "support has a hole or pinch cycle")
    return Pattern(tiles, tuple(adj))


_euler_cache: dict = {}


def _geom_signature(tiles: Sequence[PlacedTile]):
    """Translation-normalized geometry key (labels ignored)."""
    anchor = lex_min_point(t.offset for t in tiles)
    return frozenset(
        (t.shape.name, repr(t.offset[0] - anchor[0]), repr(t.offset[1] - anchor[1]))
        for t in tiles
    )


def euler_characteristic(tiles: Sequence[PlacedTile]) -> int:
    """V - E + F of the boundary arrangement complex (F = tile count)."""
    sig = _geom_signature(tiles)
    hit = _euler_cache.get(sig)
    if hit is not None:
        return hit
    chi = _euler_characteristic_raw(tiles)
    _euler_cache[sig] = chi
    return chi


def _euler_characteristic_raw(tiles: Sequence[PlacedTile]) -> int:
    edges: list[tuple[Point, Point]] = []
    for t in tiles:
        v = t.vertices()
        for i in range(len(v)):
            edges.append((v[i], v[(i + 1) % len(v)]))
    # gather split points per edge; grid buckets keep the pairing near-linear
    splits: list[set] = [set((a, b)) for (a, b) in edges]
    for i, j in _edge_candidate_pairs(edges):
        a, b = edges[i]
        c, d = edges[j]
        kind, payload, _ = seg_intersection(a, b, c, d)
        if kind == "point":
            splits[i].add(payload)
            splits[j].add(payload)
        elif kind == "segment":
            lo, hi = payload
            splits[i].update((lo, hi))
            splits[j].update((lo, hi))
    sub_edges = set()
    verts = set()
    for (a, b), ss in zip(edges, splits):
        axis = 0 if a[0] != b[0] else 1
        pts = _sort_on_segment([p for p in ss if on_segment(p, a, b)], axis)
        for k in range(len(pts) - 1):
            u, w = pts[k], pts[k + 1]
            key = tuple(sorted((point_key(u), point_key(w))))
            sub_edges.add(key)
            verts.add(point_key(u))
            verts.add(point_key(w))
    return len(verts) - len(sub_edges) + len(tiles)


def point_key(p: Point):
    return (repr(p[0]), repr(p[1]))


def _edge_candidate_pairs(edges: list[tuple[Point, Point]]) -> Iterator[tuple[int, int]]:
    """Index pairs whose bounding boxes may touch, via a unit-grid hash."""
    buckets: dict[tuple[int, int], list[int]] = {}
    boxes = []
    for k, (a, b) in enumerate(edges):
        xlo, xhi = (a[0], b[0]) if a[0] <= b[0] else (b[0], a[0])
        ylo, yhi = (a[1], b[1]) if a[1] <= b[1] else (b[1], a[1])
        boxes.append((xlo, ylo, xhi, yhi))
        for cx in range(xlo.floor(), xhi.floor() + 1):
            for cy in range(ylo.floor(), yhi.floor() + 1):
                buckets.setdefault((cx, cy), []).append(k)
    seen = set()
    for members in buckets.values():
        for ii in range(len(members)):
            for jj in range(ii + 1, len(members)):
                i, j = members[ii], members[jj]
                if (i, j) in seen:
                    continue
                seen.add((i, j))
                b1, b2 = boxes[i], boxes[j]
                if b1[2] < b2[0] or b2[2] < b1[0] or b1[3] < b2[1] or b2[3] < b1[1]:
                    continue
                yield (i, j)


# ---------------------------------------------------------------------------
# canonical forms
# ---------------------------------------------------------------------------


def _label_key(label: object):
    return repr(label)


@dataclass(frozen=True)
class CanonicalPattern:
    tiles: tuple[PlacedTile, ...]
    digest: str

    def __hash__(self):
        return hash(self.digest)

    def __eq__(self, other):
        return isinstance(other, CanonicalPattern) and self.digest == other.digest


def canonicalize(pattern: Pattern | Sequence[PlacedTile]) -> CanonicalPattern:
    tiles = pattern.tiles if isinstance(pattern, Pattern) else tuple(pattern)
    anchor = lex_min_point(p for t in tiles for p in t.vertices())
    neg = (-anchor[0], -anchor[1])
    moved = [t.translated(neg) for t in tiles]
    moved.sort(key=lambda t: (t.shape.name, point_sort_key(t.offset), _label_key(t.label)))
    h = hashlib.sha256()
    for t in moved:
        h.update(t.shape.name.encode())
        h.update(repr(t.offset).encode())
        h.update(_label_key(t.label).encode())
        h.update(b"|")
    return CanonicalPattern(tuple(moved), h.hexdigest())


def two_tile_census(patterns: Iterable[Pattern]) -> tuple[int, list[CanonicalPattern]]:
    """Distinct adjacent 2-tile sub-patterns up to translation."""
    seen: dict[str, CanonicalPattern] = {}
    for pat in patterns:
        tiles = pat.tiles
        for i, j, _kind in pat.adjacency:
            c = canonicalize((tiles[i], tiles[j]))
            seen.setdefault(c.digest, c)
    ordered = [seen[k] for k in sorted(seen)]
    return len(ordered), ordered


@dataclass(frozen=True)
class AdjacencyGraph:
    n: int
    edges: tuple[tuple[int, int, str], ...]  # (i, j, 2-tile class digest)

    def degree(self, i: int) -> int:
        return sum(1 for a, b, _ in self.edges if a == i or b == i)

    def distances_from(self, src: int) -> list[Optional[int]]:
        dist: list[Optional[int]] = [None] * self.n
        dist[src] = 0
        queue = [src]
        nb: dict[int, list[int]] = {i: [] for i in range(self.n)}
        for a, b, _ in self.edges:
            nb[a].append(b)
            nb[b].append(a)
        while queue:
            nxt = []
            for u in queue:
                for w in nb[u]:
                    if dist[w] is None:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            queue = nxt
        return dist


def adjacency_graph(pattern: Pattern) -> AdjacencyGraph:
    edges = []
    for i, j, _kind in pattern.adjacency:
        c = canonicalize((pattern.tiles[i], pattern.tiles[j]))
        edges.append((i, j, c.digest))
    return AdjacencyGraph(len(pattern.tiles), tuple(edges))


# ---------------------------------------------------------------------------
# r-patterns
# ---------------------------------------------------------------------------


def ball_covered(tiles: Sequence[PlacedTile], center: Point, r: Quad) -> bool:
    """Exact: is the closed L-inf ball B(center, r) inside the tile union?"""
    if r < 0:
        return False
    if r == 0:
        return any(point_in_polygon(center, t.vertices()) > 0 for t in tiles)
    xlo, xhi = center[0] - r, center[0] + r
    ylo, yhi = center[1] - r, center[1] + r
    total = Quad(0)
    for t in tiles:
        total = total + clip_area_rect(t.vertices(), xlo, xhi, ylo, yhi)
    return total == (xhi - xlo) * (yhi - ylo)


def support_in_ball(tiles: Sequence[PlacedTile], center: Point, r: Quad, d_max_sq: Quad) -> bool:
    """supp ⊆ B(center, r + sqrt(d_max_sq)), via squared comparisons."""
    for t in tiles:
        x0, y0, x1, y1 = t.bbox()
        for v in (center[0] - x0, x1 - center[0], center[1] - y0, y1 - center[1]):
            excess = v - r
            if excess > 0 and excess * excess > d_max_sq:
                return False
    return True


@dataclass(frozen=True)
class RPattern:
    pattern: Pattern
    center: Point
    radius: Quad

    def canonical(self) -> CanonicalPattern:
        return canonicalize(self.pattern)


def _pattern_valid(tiles: Sequence[PlacedTile]) -> bool:
    try:
        pattern_build(tiles)
        return True
    except GeomError:
        return False


def check_rpattern(tiles: Sequence[PlacedTile], center: Point, r: Quad, d_max_sq: Quad) -> Optional[str]:
    """None if (tiles, center, r) satisfies every r-pattern condition, else a reason."""
    if not support_in_ball(tiles, center, r, d_max_sq):
        return "support exceeds outer ball"
    if not ball_covered(tiles, center, r):
        return "ball not covered"
    if not _pattern_valid(tiles):
        return "invalid pattern"
    for k in range(len(tiles)):
        rest = tuple(tiles[:k]) + tuple(tiles[k + 1:])
        if not rest:
            continue
        if ball_covered(rest, center, r) and _pattern_valid(rest):
            return f"tile {k} removable"
    return None


def tile_sort_key(t: PlacedTile):
    return (t.shape.name, point_sort_key(t.offset), _label_key(t.label))


def extract_rpattern(
    patch: Sequence[PlacedTile], center: Point, r: Quad, d_max_sq: Quad
) -> RPattern:
    """Minimal sub-pattern of `patch` covering B(center, r).

    Tiles with positive-area ball overlap are mandatory; others are pruned
    in canonical order until every remaining tile is irremovable.
    """
    xlo, xhi = center[0] - r, center[0] + r
    ylo, yhi = center[1] - r, center[1] + r
    if r == 0:
        chosen = [t for t in patch if point_in_polygon(center, t.vertices()) > 0]
    else:
        chosen = [
            t
            for t in patch
            if not _bbox_gap(t.bbox(), (xlo, ylo, xhi, yhi))
            and clip_area_rect(t.vertices(), xlo, xhi, ylo, yhi) > 0
        ]
    if not chosen:
        raise GeomError("BALL_UNCOVERED", "no tile meets the ball")
    if not ball_covered(chosen, center, r):
        raise GeomError("BALL_UNCOVERED", "patch does not cover the ball")
    if not _pattern_valid(chosen):
        raise GeomError("NOT_SIMPLY_CONNECTED", "positive-area cover is not a pattern")
    chosen.sort(key=tile_sort_key)
    changed = True
    while changed:
        changed = False
        for k in range(len(chosen)):
            rest = chosen[:k] + chosen[k + 1:]
            if rest and _pattern_valid(rest) and ball_covered(rest, center, r):
                chosen = rest
                changed = True
                break
    reason = check_rpattern(chosen, center, r, d_max_sq)
    if reason:
        raise GeomError("NOT_AN_RPATTERN", reason)
    return RPattern(pattern_build(chosen), center, r)


def _is_rectilinear(shape: Shape) -> bool:
    return all(a[0] == b[0] or a[1] == b[1] for a, b in shape.edges())


def _placement_lattice(
    shapes: Sequence[Shape], allowed: Sequence[CanonicalPattern], reach: Quad
) -> list[PlacedTile]:
    """All placements reachable from each seed shape through allowed-pair
    offsets, with bbox within `reach` of the origin in L-inf."""
    offsets: dict[str, list[tuple[str, Point]]] = {s.name: [] for s in shapes}
    by_name = {s.name: s for s in shapes}
    for cp in allowed:
        if len(cp.tiles) != 2:
            raise GeomError("BAD_ALLOWED_LIST", "allowed patterns must have 2 tiles")
        a, b = cp.tiles
        offsets.setdefault(a.shape.name, []).append((b.shape.name, psub(b.offset, a.offset)))
        offsets.setdefault(b.shape.name, []).append((a.shape.name, psub(a.offset, b.offset)))
    found: dict = {}
    frontier: list[PlacedTile] = []
    for s in shapes:
        t0 = PlacedTile(s, pt(0, 0))
        found[(s.name, point_key(t0.offset))] = t0
        frontier.append(t0)
    while frontier:
        t = frontier.pop()
        for other_name, off in offsets.get(t.shape.name, ()):
            if other_name not in by_name:
                continue
            nt = PlacedTile(by_name[other_name], padd(t.offset, off))
            x0, y0, x1, y1 = nt.bbox()
            if x1 < -reach or x0 > reach or y1 < -reach or y0 > reach:
                continue
            key = (nt.shape.name, point_key(nt.offset))
            if key not in found:
                found[key] = nt
                frontier.append(nt)
    return sorted(found.values(), key=tile_sort_key)


def _allowed_pair_ok(a: PlacedTile, b: PlacedTile, allowed_digests: set[str]) -> bool:
    return canonicalize((PlacedTile(a.shape, a.offset), PlacedTile(b.shape, b.offset))).digest in allowed_digests


def enumerate_r_patterns(
    shapes: Sequence[Shape],
    allowed: Sequence[CanonicalPattern],
    r: Quad,
    cap: int = 10000,
) -> list[RPattern]:
    """All r-patterns up to translation for an axis-aligned shapeset.

    Exhaustive for rectilinear shapes through an exact face decomposition
    of the center space; raises BUDGET_EXCEEDED past `cap` emissions.
    Positive-area covers must be hole-free (true for convex shapes).
    """
    for s in shapes:
        if not _is_rectilinear(s):
            raise GeomError("UNSUPPORTED_SHAPESET", "enumeration needs rectilinear shapes")
    d_max_sq = qmax(shape_diameter_sq(s) for s in shapes)
    # reach: supports stay within B(center, r + D_max)
    reach = r + _sqrt_upper(d_max_sq) + 2
    placements = _placement_lattice(shapes, allowed, reach + 2)
    allowed_digests = {cp.digest for cp in allowed}

    xs = sorted({_QuadKey(v[0]).v for t in placements for v in t.vertices()}, key=_QuadKey)
    ys = sorted({_QuadKey(v[1]).v for t in placements for v in t.vertices()}, key=_QuadKey)
    cand_x = _face_reps([x - r for x in xs] + [x + r for x in xs])
    cand_y = _face_reps([y - r for y in ys] + [y + r for y in ys])
    gxlo, gxhi = xs[0], xs[-1]
    gylo, gyhi = ys[0], ys[-1]

    out: dict[str, RPattern] = {}
    seen_sets: set = set()
    for cx in cand_x:
        if cx - r < gxlo or cx + r > gxhi:
            continue
        for cy in cand_y:
            if cy - r < gylo or cy + r > gyhi:
                continue
            center = (cx, cy)
            tiles = _positive_overlap_tiles(placements, center, r)
            if not tiles:
                continue
            sig = _translation_signature(tiles)
            if sig in seen_sets:
                continue
            seen_sets.add(sig)
            try:
                rp = extract_rpattern(tiles, center, r, d_max_sq)
            except GeomError:
                continue
            if not _tiles_locally_allowed(rp.pattern, allowed_digests):
                continue
            digest = rp.canonical().digest
            if digest not in out:
                if len(out) >= cap:
                    raise GeomError("BUDGET_EXCEEDED", f"more than {cap} r-patterns")
                out[digest] = rp
    ordered = sorted(out.values(), key=lambda rp: (len(rp.pattern.tiles), rp.canonical().digest))
    return ordered


def _positive_overlap_tiles(
    placements: Sequence[PlacedTile], center: Point, r: Quad
) -> list[PlacedTile]:
    xlo, xhi = center[0] - r, center[0] + r
    ylo, yhi = center[1] - r, center[1] + r
    out = []
    for t in placements:
        x0, y0, x1, y1 = t.bbox()
        if r == 0:
            if x0 <= center[0] <= x1 and y0 <= center[1] <= y1 and point_in_polygon(
                center, t.vertices()
            ) > 0:
                out.append(t)
            continue
        if not (xlo < x1 and x0 < xhi and ylo < y1 and y0 < yhi):
            continue
        if t.shape.is_box or clip_area_rect(t.vertices(), xlo, xhi, ylo, yhi) > 0:
            out.append(t)
    return out


def _translation_signature(tiles: Sequence[PlacedTile]):
    anchor = lex_min_point(t.offset for t in tiles)
    return frozenset(
        (t.shape.name, point_key(psub(t.offset, anchor)), _label_key(t.label)) for t in tiles
    )


def _tiles_locally_allowed(pattern: Pattern, allowed_digests: set[str]) -> bool:
    for i, j, _k in pattern.adjacency:
        a, b = pattern.tiles[i], pattern.tiles[j]
        if not _allowed_pair_ok(a, b, allowed_digests):
            return False
    return True


def _sqrt_upper(q: Quad) -> Quad:
    """A rational upper bound for sqrt(q)."""
    v = Quad(1)
    while v * v < q:
        v = v * 2
    return v


def _face_reps(values: list[Quad]) -> list[Quad]:
    """Representatives of every face (point and open interval) of a 1-D
    subdivision: the values themselves plus interval midpoints."""
    distinct: list[Quad] = []
    for v in sorted(values, key=_QuadKey):
        if not distinct or v != distinct[-1]:
            distinct.append(v)
    reps = list(distinct)
    for i in range(len(distinct) - 1):
        reps.append((distinct[i] + distinct[i + 1]) / 2)
    return reps
