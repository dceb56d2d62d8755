"""Grid detection on labelled patterns.

A pattern of placeholder/coloured tiles is grid-like when some unit grid
g_{x0,y0} crosses only cells of the matching row/column residues, avoids
containing boundary or cell-grid segments, and avoids triple points.  The
admissible anchors (x0, y0) mod 1 form an intersection of per-tile 1/4
boxes on the torus; the pattern is grid-like iff that region is nonempty,
with the segment/triple-point conditions verified exactly at a chosen
witness anchor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .geom import (
    GeomError,
    Pattern,
    PlacedTile,
    Point,
    check_rpattern,
    contact_between,
    point_in_polygon,
    pt,
)
from .placeholder import CELL, Cell, ColouredTile, PlaceholderTile
from .rings import Quad, mpq, qmax, qmin, rat


class GridlikeError(Exception):
    def __init__(self, code: str, message: str = "", **data):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.data = data


def _placeholder_of(tile: PlacedTile) -> PlaceholderTile:
    lab = tile.label
    if isinstance(lab, ColouredTile):
        return lab.placeholder
    if isinstance(lab, PlaceholderTile):
        return lab
    raise GridlikeError("MISSING_PLACEHOLDER", f"tile label {lab!r}")


def _coloured_of(tile: PlacedTile) -> ColouredTile:
    lab = tile.label
    if isinstance(lab, ColouredTile):
        return lab
    raise GridlikeError("MISSING_PLACEHOLDER", f"tile {lab!r} carries no colours")


def _frac(q: Quad):
    if not q.is_rational:
        raise GridlikeError("MISSING_PLACEHOLDER", "anchor algebra needs rational coords")
    v = q.as_rational()
    return v - int(v // 1)


# ---------------------------------------------------------------------------
# torus interval / box algebra
# ---------------------------------------------------------------------------


def _wrap_interval(lo, length):
    """Closed interval [lo, lo+length] mod 1 as pieces within [0, 1]."""
    lo = lo - int(lo // 1)
    hi = lo + length
    if hi <= 1:
        return [(lo, hi)]
    return [(lo, mpq(1)), (mpq(0), hi - 1)]


def _intersect_pieces(a, b):
    out = []
    for lo1, hi1 in a:
        for lo2, hi2 in b:
            lo = max(lo1, lo2)
            hi = min(hi1, hi2)
            if lo <= hi:
                out.append((lo, hi))
    # merge duplicates and the 0/1 seam
    dedup = []
    for piece in out:
        if piece not in dedup:
            dedup.append(piece)
    return dedup


@dataclass(frozen=True)
class AnchorRegion:
    """Product region on the torus: x-pieces x y-pieces (closed boxes)."""

    boxes: tuple[tuple[object, object, object, object], ...]  # (xlo,xhi,ylo,yhi)

    @staticmethod
    def full() -> "AnchorRegion":
        return AnchorRegion(((mpq(0), mpq(1), mpq(0), mpq(1)),))

    @staticmethod
    def from_box(xlo, xlen, ylo, ylen) -> "AnchorRegion":
        xs = _wrap_interval(xlo, xlen)
        ys = _wrap_interval(ylo, ylen)
        return AnchorRegion(tuple((a, b, c, d) for a, b in xs for c, d in ys))

    def intersect(self, other: "AnchorRegion") -> "AnchorRegion":
        out = []
        for (x1, x2, y1, y2) in self.boxes:
            for (u1, u2, v1, v2) in other.boxes:
                xs = _intersect_pieces([(x1, x2)], [(u1, u2)])
                ys = _intersect_pieces([(y1, y2)], [(v1, v2)])
                for a, b in xs:
                    for c, d in ys:
                        box = (a, b, c, d)
                        if box not in out:
                            out.append(box)
        return AnchorRegion(tuple(out))

    @property
    def empty(self) -> bool:
        return not self.boxes

    @property
    def has_interior(self) -> bool:
        return any(x1 < x2 and y1 < y2 for (x1, x2, y1, y2) in self.boxes)

    def contains(self, x, y) -> bool:
        fx = x - int(x // 1)
        fy = y - int(y // 1)
        for (x1, x2, y1, y2) in self.boxes:
            okx = x1 <= fx <= x2 or x1 <= fx + 1 <= x2
            oky = y1 <= fy <= y2 or y1 <= fy + 1 <= y2
            if okx and oky:
                return True
        return False


def tile_anchor_box(tile: PlacedTile) -> AnchorRegion:
    ph = _placeholder_of(tile)
    ox = _frac(Quad.of(tile.offset[0]) + tile.shape.origin[0])
    oy = _frac(Quad.of(tile.offset[1]) + tile.shape.origin[1])
    q = mpq(1, 4)
    return AnchorRegion.from_box(ox + q * ph.i, q, oy + q * ph.j, q)


def anchor_region(pattern: Pattern | Sequence[PlacedTile]) -> AnchorRegion:
    tiles = pattern.tiles if isinstance(pattern, Pattern) else tuple(pattern)
    region = AnchorRegion.full()
    for t in tiles:
        region = region.intersect(tile_anchor_box(t))
        if region.empty:
            break
    return region


# ---------------------------------------------------------------------------
# exact condition checks at a concrete anchor
# ---------------------------------------------------------------------------


def _axis_boundary_levels(tiles: Sequence[PlacedTile], vertical: bool) -> set:
    levels = set()
    for t in tiles:
        verts = t.vertices()
        n = len(verts)
        for k in range(n):
            a, b = verts[k], verts[(k + 1) % n]
            if vertical and a[0] == b[0]:
                levels.add(_frac(a[0]))
            if not vertical and a[1] == b[1]:
                levels.add(_frac(a[1]))
    return levels


def _cell_grid_levels(tiles: Sequence[PlacedTile], vertical: bool) -> set:
    levels = set()
    q = mpq(1, 4)
    for t in tiles:
        if vertical:
            o = _frac(Quad.of(t.offset[0]) + t.shape.origin[0])
        else:
            o = _frac(Quad.of(t.offset[1]) + t.shape.origin[1])
        for k in range(4):
            levels.add(_frac(Quad.of(o + q * k)))
    return levels


def triple_points(tiles: Sequence[PlacedTile]) -> list[Point]:
    """Points lying on the boundary of three or more tiles."""
    candidates: set = set()
    for i in range(len(tiles)):
        for j in range(i + 1, len(tiles)):
            c = contact_between(tiles[i], tiles[j])
            for p in c.points:
                candidates.add(p)
            for lo, hi in c.segments:
                candidates.add(lo)
                candidates.add(hi)
    out = []
    for p in candidates:
        cnt = sum(1 for t in tiles if point_in_polygon(p, t.vertices()) == 1)
        if cnt >= 3:
            out.append(p)
    return out


def verify_anchor(tiles: Sequence[PlacedTile], x0, y0, check_classes: bool = True) -> Optional[str]:
    """None when grid g_{x0,y0} satisfies the grid-like conditions, else a
    reason.  Exact; independent of the box algebra."""
    fx0 = _frac(Quad.of(x0))
    fy0 = _frac(Quad.of(y0))
    if fx0 in _axis_boundary_levels(tiles, vertical=True):
        return "vertical grid line contains a boundary segment"
    if fy0 in _axis_boundary_levels(tiles, vertical=False):
        return "horizontal grid line contains a boundary segment"
    if fx0 in _cell_grid_levels(tiles, vertical=True):
        return "vertical grid line contains a cell-grid segment"
    if fy0 in _cell_grid_levels(tiles, vertical=False):
        return "horizontal grid line contains a cell-grid segment"
    for p in triple_points(tiles):
        if _frac(p[0]) == fx0 or _frac(p[1]) == fy0:
            return f"grid passes through a triple point"
    if not check_classes:
        return None
    for t in tiles:
        ph = _placeholder_of(t)
        ox = Quad.of(t.offset[0]) + t.shape.origin[0]
        oy = Quad.of(t.offset[1]) + t.shape.origin[1]
        bx0, by0, bx1, by1 = t.bbox()
        n = (bx0 - fx0).floor()
        while fx0 + n <= bx1:
            x = fx0 + n
            if bx0 < x < bx1:
                col = (((x - ox) / CELL).floor()) % 4
                if col != ph.i:
                    return f"vertical line crosses column {col} != {ph.i}"
            n += 1
        m = (by0 - fy0).floor()
        while fy0 + m <= by1:
            y = fy0 + m
            if by0 < y < by1:
                row = (((y - oy) / CELL).floor()) % 4
                if row != ph.j:
                    return f"horizontal line crosses row {row} != {ph.j}"
            m += 1
    return None


# ---------------------------------------------------------------------------
# grid-like decision
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridVerdict:
    grid_like: bool
    witness: Optional[tuple] = None  # rational (x0, y0) mod 1
    region: Optional[AnchorRegion] = None
    degenerate: bool = False


def _interval_candidates(lo, hi):
    """Deterministic rational points of [lo, hi]: midpoint-first dyadics."""
    if lo == hi:
        yield lo
        return
    span = hi - lo
    for k in range(1, 9):
        step = span / (1 << k)
        for m in range(1, (1 << k), 2):
            yield lo + step * m
    yield lo
    yield hi


def is_grid_like(pattern: Pattern | Sequence[PlacedTile]) -> GridVerdict:
    tiles = pattern.tiles if isinstance(pattern, Pattern) else tuple(pattern)
    region = anchor_region(tiles)
    if region.empty:
        return GridVerdict(False, region=region)
    bad_x = _axis_boundary_levels(tiles, vertical=True) | _cell_grid_levels(tiles, vertical=True)
    bad_y = _axis_boundary_levels(tiles, vertical=False) | _cell_grid_levels(tiles, vertical=False)
    for p in triple_points(tiles):
        bad_x.add(_frac(p[0]))
        bad_y.add(_frac(p[1]))
    boxes = sorted(region.boxes, key=lambda b: (str(b[0]), str(b[2])))
    degenerate = not region.has_interior
    for (x1, x2, y1, y2) in boxes:
        cx = next((c for c in _interval_candidates(x1, x2) if _frac(Quad.of(c)) not in bad_x), None)
        cy = next((c for c in _interval_candidates(y1, y2) if _frac(Quad.of(c)) not in bad_y), None)
        if cx is None or cy is None:
            continue
        reason = verify_anchor(tiles, cx, cy)
        if reason is None:
            return GridVerdict(True, (cx, cy), region, degenerate)
    return GridVerdict(False, region=region, degenerate=degenerate)


# ---------------------------------------------------------------------------
# coherence
# ---------------------------------------------------------------------------


def _seg_point_dist_sq(p: Point, a: Point, b: Point) -> Quad:
    ab = (b[0] - a[0], b[1] - a[1])
    ap = (p[0] - a[0], p[1] - a[1])
    denom = ab[0] * ab[0] + ab[1] * ab[1]
    if denom == 0:
        dx, dy = ap
        return dx * dx + dy * dy
    t = (ap[0] * ab[0] + ap[1] * ab[1]) / denom
    if t < 0:
        t = Quad(0)
    elif t > 1:
        t = Quad(1)
    cx = a[0] + ab[0] * t
    cy = a[1] + ab[1] * t
    dx = p[0] - cx
    dy = p[1] - cy
    return dx * dx + dy * dy


def _seg_seg_dist_sq(a: Point, b: Point, c: Point, d: Point) -> Quad:
    from .geom import seg_intersection

    kind, _, _ = seg_intersection(a, b, c, d)
    if kind != "none":
        return Quad(0)
    return qmin(
        (
            _seg_point_dist_sq(a, c, d),
            _seg_point_dist_sq(b, c, d),
            _seg_point_dist_sq(c, a, b),
            _seg_point_dist_sq(d, a, b),
        )
    )


def _poly_dist_sq_le(pa: Sequence[Point], pb: Sequence[Point], bound: Quad) -> bool:
    """Is dist(closed(pa), closed(pb))^2 <= bound?  Convex pieces."""
    if any(point_in_polygon(p, pb) > 0 for p in pa) or any(
        point_in_polygon(p, pa) > 0 for p in pb
    ):
        return True
    best = None
    na, nb = len(pa), len(pb)
    for i in range(na):
        a1, a2 = pa[i], pa[(i + 1) % na]
        for j in range(nb):
            b1, b2 = pb[j], pb[(j + 1) % nb]
            d = _seg_seg_dist_sq(a1, a2, b1, b2)
            if best is None or d < best:
                best = d
            if best <= bound:
                return True
    return best <= bound


@dataclass(frozen=True)
class CodingCellRef:
    tile_index: int
    cell_index: tuple[int, int]
    letter: object
    piece: tuple[Point, ...]


def coding_cell_refs(tiles: Sequence[PlacedTile]) -> list[CodingCellRef]:
    refs = []
    for ti, t in enumerate(tiles):
        ct = _coloured_of(t)
        ph = ct.placeholder
        for cell in ph.coding_cells():
            piece = tuple((x + t.offset[0], y + t.offset[1]) for x, y in cell.piece)
            refs.append(CodingCellRef(ti, cell.index, ct.colour_of(cell.index), piece))
    return refs


def is_coherent(pattern: Pattern | Sequence[PlacedTile]):
    """(True, None) or (False, (ref_a, ref_b)) for a closest offending pair."""
    tiles = pattern.tiles if isinstance(pattern, Pattern) else tuple(pattern)
    refs = coding_cell_refs(tiles)
    bound = rat(1, 16)  # (1/4)^2
    boxes = []
    for ref in refs:
        xs = [p[0] for p in ref.piece]
        ys = [p[1] for p in ref.piece]
        boxes.append((qmin(xs), qmin(ys), qmax(xs), qmax(ys)))
    quarter = rat(1, 4)
    for i in range(len(refs)):
        for j in range(i + 1, len(refs)):
            if refs[i].tile_index == refs[j].tile_index:
                continue
            if refs[i].letter == refs[j].letter:
                continue
            b1, b2 = boxes[i], boxes[j]
            if (
                b2[0] - b1[2] > quarter
                or b1[0] - b2[2] > quarter
                or b2[1] - b1[3] > quarter
                or b1[1] - b2[3] > quarter
            ):
                continue
            if _poly_dist_sq_le(refs[i].piece, refs[j].piece, bound):
                return False, (refs[i], refs[j])
    return True, None


# ---------------------------------------------------------------------------
# induced configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InducedConfig:
    cells: tuple[tuple[tuple[int, int], object], ...]  # ((n,m), letter) sorted
    anchor: tuple

    def mapping(self) -> dict:
        return dict(self.cells)

    def normalized(self) -> "InducedConfig":
        if not self.cells:
            return self
        n0 = min(nm[0] for nm, _ in self.cells)
        m0 = min(nm[1] for nm, _ in self.cells)
        return InducedConfig(
            tuple(sorted(((n - n0, m - m0), v) for (n, m), v in self.cells)),
            self.anchor,
        )


def induced_config(
    pattern: Pattern | Sequence[PlacedTile], anchor: tuple
) -> InducedConfig:
    tiles = pattern.tiles if isinstance(pattern, Pattern) else tuple(pattern)
    region = anchor_region(tiles)
    x0 = Quad.of(anchor[0])
    y0 = Quad.of(anchor[1])
    if not region.contains(x0.as_rational(), y0.as_rational()):
        raise GridlikeError("ANCHOR_INVALID", f"anchor {anchor} outside region")
    boxes = [t.bbox() for t in tiles]
    gx0 = qmin(b[0] for b in boxes)
    gy0 = qmin(b[1] for b in boxes)
    gx1 = qmax(b[2] for b in boxes)
    gy1 = qmax(b[3] for b in boxes)
    cells = {}
    n = (gx0 - x0).floor()
    while x0 + n <= gx1:
        m = (gy0 - y0).floor()
        x = x0 + n
        while y0 + m <= gy1:
            y = y0 + m
            p = (x, y)
            hit = False
            for t in tiles:
                bx0, by0, bx1, by1 = t.bbox()
                if not (bx0 <= x <= bx1 and by0 <= y <= by1):
                    continue
                if point_in_polygon(p, t.vertices()) == 0:
                    continue
                hit = True
                ct = _coloured_of(t)
                ph = ct.placeholder
                ox = Quad.of(t.offset[0]) + t.shape.origin[0]
                oy = Quad.of(t.offset[1]) + t.shape.origin[1]
                qi = (x - ox) / CELL
                qj = (y - oy) / CELL
                ci, cj = qi.floor(), qj.floor()
                if qi == ci or qj == cj:
                    raise GridlikeError(
                        "ANCHOR_INVALID", "grid vertex on a cell-grid line"
                    )
                if ph.cell_class((ci, cj)) != "coding":
                    raise GridlikeError(
                        "CELL_NOT_CODING",
                        f"vertex ({n},{m}) in cell ({ci},{cj}) of class "
                        f"{ph.cell_class((ci, cj))}",
                    )
                try:
                    letter = ct.colour_of((ci, cj))
                except KeyError:
                    # vertex on the boundary sliver of a zero-area cell piece
                    continue
                prev = cells.get((n, m))
                if prev is not None and prev != letter:
                    raise GridlikeError("CELL_NOT_CODING", "conflicting letters")
                cells[(n, m)] = letter
            if hit and (n, m) not in cells:
                raise GridlikeError(
                    "CELL_NOT_CODING", f"vertex ({n},{m}) carries no letter"
                )
            m += 1
        n += 1
    return InducedConfig(tuple(sorted(cells.items())), (x0.as_rational(), y0.as_rational()))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PatternClass:
    kind: str  # "non-grid-like" | "incoherent" | "induces-forbidden" | "allowed"
    witness: object = None

    @property
    def allowed(self) -> bool:
        return self.kind == "allowed"


def config_forbidden_witness(config: InducedConfig, forbidden_h, forbidden_v):
    cells = config.mapping()
    for (n, m), a in cells.items():
        b = cells.get((n + 1, m))
        if b is not None and (a, b) in forbidden_h:
            return ((n, m), (n + 1, m), (a, b), "h")
        b = cells.get((n, m + 1))
        if b is not None and (a, b) in forbidden_v:
            return ((n, m), (n, m + 1), (a, b), "v")
    return None


def classify(
    pattern: Pattern | Sequence[PlacedTile],
    center: Point,
    radius: Quad,
    forbidden_h: Iterable[tuple],
    forbidden_v: Iterable[tuple],
    d_max_sq: Quad,
    skip_dmax_check: bool = False,
) -> PatternClass:
    """Verdict for a labelled D_max-pattern, first failing check winning:
    non-grid-like, incoherent, induces-forbidden, allowed."""
    tiles = pattern.tiles if isinstance(pattern, Pattern) else tuple(pattern)
    if not skip_dmax_check:
        reason = check_rpattern(tiles, center, radius, d_max_sq)
        if reason:
            raise GridlikeError("NOT_A_DMAX_PATTERN", reason)
    verdict = is_grid_like(tiles)
    if not verdict.grid_like:
        return PatternClass("non-grid-like", verdict)
    ok, pair = is_coherent(tiles)
    if not ok:
        return PatternClass("incoherent", pair)
    config = induced_config(tiles, verdict.witness)
    fw = config_forbidden_witness(config, set(forbidden_h), set(forbidden_v))
    if fw is not None:
        return PatternClass("induces-forbidden", fw)
    return PatternClass("allowed", config)
