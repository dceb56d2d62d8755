"""Nearest-neighbour instances compiled to coloured-tile constraints.

`compile_instance` packages a shapeset, its allowed 2-tile pattern list and
a nearest-neighbour instance into a classifier over labelled windows.
`encode` realizes a letter configuration as a coloured patch on a chosen
grid anchor; `decode` recovers the configuration from a coloured patch by
breadth-first placement of grid vertices inside coding cells; `qi_map` and
`qi_verify` expose the tile-to-lattice quasi-isometry underlying the
construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import gmpy2

from .geom import (
    CanonicalPattern,
    GeomError,
    Pattern,
    PlacedTile,
    Point,
    RPattern,
    adjacency_graph,
    canonicalize,
    check_rpattern,
    enumerate_r_patterns,
    extract_rpattern,
    pattern_build,
    point_in_polygon,
    qmax,
    qmin,
    shape_diameter_sq,
    tile_sort_key,
)
from .gridlike import (
    GridlikeError,
    PatternClass,
    _axis_boundary_levels,
    _cell_grid_levels,
    _coloured_of,
    _frac,
    _placeholder_of,
    classify,
    is_coherent,
    is_grid_like,
    triple_points,
    verify_anchor,
)
from .placeholder import (
    CELL,
    ColouredTile,
    ColouredTileset,
    PlaceholderTile,
    build_tileset,
    check_normalized,
    checker,
    placeholders,
)
from .rings import Quad, mpq, rat


class ReductionError(Exception):
    def __init__(self, code: str, message: str = "", **data):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.data = data


def quad_sqrt(value: Quad) -> Quad:
    """Exact square root of a nonnegative rational as a Quad, when the
    squarefree part is one of the supported radicands."""
    if not value.is_rational:
        raise ReductionError("RING_ERROR", f"sqrt of irrational {value}")
    q = value.as_rational()
    if q < 0:
        raise ReductionError("RING_ERROR", "sqrt of negative")
    num, den = q.numerator, q.denominator
    m = num * den
    s = gmpy2.isqrt(m)
    if s * s == m:
        return Quad(mpq(s, den))
    square_part = 1
    rest = m
    p = 2
    while p * p <= rest and p < 20000:
        while rest % (p * p) == 0:
            square_part *= p
            rest //= p * p
        p += 1
    if rest in (2, 3, 5):
        return Quad(0, mpq(square_part, den), int(rest))
    raise ReductionError("RING_ERROR", f"sqrt({value}) outside supported rings")


@dataclass(frozen=True)
class NNInstance:
    """Nearest-neighbour constraints: forbidden ordered letter pairs."""

    alphabet: tuple
    forbidden_h: frozenset
    forbidden_v: frozenset

    def __post_init__(self):
        letters = set(self.alphabet)
        for a, b in list(self.forbidden_h) + list(self.forbidden_v):
            if a not in letters or b not in letters:
                raise ReductionError("EMPTY_ALPHABET", f"pair ({a},{b}) outside alphabet")

    @staticmethod
    def make(alphabet, forbidden_h=(), forbidden_v=()) -> "NNInstance":
        return NNInstance(
            tuple(alphabet), frozenset(forbidden_h), frozenset(forbidden_v)
        )

    def config_ok(self, cells: Mapping[tuple[int, int], object]) -> bool:
        for (n, m), a in cells.items():
            b = cells.get((n + 1, m))
            if b is not None and (a, b) in self.forbidden_h:
                return False
            b = cells.get((n, m + 1))
            if b is not None and (a, b) in self.forbidden_v:
                return False
        return True


@dataclass
class ReductionInstance:
    shapes: tuple
    allowed: tuple[CanonicalPattern, ...]
    nn: NNInstance
    tileset: ColouredTileset
    d_max_sq: Quad

    @property
    def d_max(self) -> Quad:
        return quad_sqrt(self.d_max_sq)

    def classify(self, pattern, center, skip_dmax_check: bool = False) -> PatternClass:
        return classify(
            pattern,
            center,
            self.d_max,
            self.nn.forbidden_h,
            self.nn.forbidden_v,
            self.d_max_sq,
            skip_dmax_check=skip_dmax_check,
        )


def compile_instance(nn: NNInstance, shapes: Sequence, allowed: Sequence[CanonicalPattern]) -> ReductionInstance:
    if not nn.alphabet:
        raise ReductionError("EMPTY_ALPHABET")
    if not allowed:
        raise ReductionError("EMPTY_L")
    reason = check_normalized(shapes)
    if reason:
        raise ReductionError("SHAPESET_NOT_NORMALIZED", reason)
    tileset = build_tileset(shapes, nn.alphabet)
    d_max_sq = qmax(shape_diameter_sq(s) for s in shapes)
    return ReductionInstance(tuple(shapes), tuple(allowed), nn, tileset, d_max_sq)


# ---------------------------------------------------------------------------
# anchors
# ---------------------------------------------------------------------------


def find_anchor(patch: Sequence[PlacedTile] | Pattern) -> tuple:
    """Deterministic rational anchor whose grid avoids every horizontal and
    vertical boundary line, cell-grid line and triple point of the patch."""
    tiles = patch.tiles if isinstance(patch, Pattern) else tuple(patch)
    bad_x = _axis_boundary_levels(tiles, vertical=True) | _cell_grid_levels(tiles, vertical=True)
    bad_y = _axis_boundary_levels(tiles, vertical=False) | _cell_grid_levels(tiles, vertical=False)
    for p in triple_points(tiles):
        bad_x.add(_frac(p[0]))
        bad_y.add(_frac(p[1]))

    def pick(bad):
        for k in itertools.count():
            den = 3 << k
            for num in range(1, den):
                cand = mpq(num, den)
                if cand not in bad:
                    return cand

    x0 = pick(bad_x)
    y0 = pick(bad_y)
    reason = verify_anchor(tiles, x0, y0, check_classes=False)
    if reason is not None:
        raise ReductionError("ANCHOR_COLLISION", reason)
    return (x0, y0)


# ---------------------------------------------------------------------------
# encode
# ---------------------------------------------------------------------------


def _tile_origin(t: PlacedTile) -> tuple[Quad, Quad]:
    return (
        Quad.of(t.offset[0]) + t.shape.origin[0],
        Quad.of(t.offset[1]) + t.shape.origin[1],
    )


def _vertex_in_range(lo: Quad, hi: Quad, x0) -> Optional[int]:
    """The unique integer n with lo <= x0+n <= hi (interval shorter than 1)."""
    n = (lo - Quad.of(x0)).floor()
    for cand in (n, n + 1):
        v = Quad.of(x0) + cand
        if lo <= v <= hi:
            return cand
    return None


def encode(
    patch: Sequence[PlacedTile] | Pattern,
    config: Mapping[tuple[int, int], object],
    nn: NNInstance,
    anchor: Optional[tuple] = None,
) -> Pattern:
    """Colour a geometric patch so its coding cells spell `config` on the
    grid g_anchor.  Each tile receives the unique residue variant matching
    the anchor, and every coding cell the letter of its nearest vertex."""
    tiles = patch.tiles if isinstance(patch, Pattern) else tuple(patch)
    if anchor is None:
        anchor = find_anchor(tiles)
    else:
        reason = verify_anchor(tiles, anchor[0], anchor[1], check_classes=False)
        if reason is not None:
            raise ReductionError("ANCHOR_COLLISION", reason)
    x0, y0 = Quad.of(anchor[0]), Quad.of(anchor[1])
    out = []
    missing = []
    for t in tiles:
        ox, oy = _tile_origin(t)
        i = int(((x0 - ox) / CELL).floor()) % 4
        j = int(((y0 - oy) / CELL).floor()) % 4
        ph = PlaceholderTile(checker(t.shape), i, j)
        colours = {}
        for cell in ph.coding_cells():
            cxlo, cylo, cxhi, cyhi = cell.bounds
            n = _vertex_in_range(cxlo + t.offset[0], cxhi + t.offset[0], x0)
            m = _vertex_in_range(cylo + t.offset[1], cyhi + t.offset[1], y0)
            if n is None or m is None:
                raise ReductionError(
                    "ANCHOR_COLLISION", f"no vertex in coding cell {cell.index}"
                )
            if (n, m) not in config:
                missing.append((n, m))
                continue
            colours[cell.index] = config[(n, m)]
        if missing:
            continue
        out.append(PlacedTile(t.shape, t.offset, ColouredTile(ph, tuple(sorted(colours.items())))))
    if missing:
        raise ReductionError(
            "CONFIG_UNDERDEFINED", f"missing letters at {sorted(set(missing))}"
        )
    return pattern_build(out)


# ---------------------------------------------------------------------------
# decode
# ---------------------------------------------------------------------------


@dataclass
class DecodeResult:
    config: dict
    positions: dict  # (n, m) -> rational grid vertex (Point)
    seed_cell: tuple  # (tile_index, cell_index)

    def normalized_config(self) -> dict:
        if not self.config:
            return {}
        n0 = min(n for n, _ in self.config)
        m0 = min(m for _, m in self.config)
        return {(n - n0, m - m0): v for (n, m), v in self.config.items()}


def _cell_letter_at(tiles: Sequence[PlacedTile], p: Point):
    """(letter, coding?) of the cell containing point p, or None."""
    for ti, t in enumerate(tiles):
        bx0, by0, bx1, by1 = t.bbox()
        if not (bx0 <= p[0] <= bx1 and by0 <= p[1] <= by1):
            continue
        if point_in_polygon(p, t.vertices()) == 0:
            continue
        ct = _coloured_of(t)
        ph = ct.placeholder
        ox, oy = _tile_origin(t)
        qi = (p[0] - ox) / CELL
        qj = (p[1] - oy) / CELL
        ci, cj = qi.floor(), qj.floor()
        if qi == ci or qj == cj:
            continue
        if ph.cell_class((ci, cj)) != "coding":
            return (None, False, (ti, (ci, cj)))
        try:
            return (ct.colour_of((ci, cj)), True, (ti, (ci, cj)))
        except KeyError:
            continue
    return None


def decode(
    patch: Sequence[PlacedTile] | Pattern,
    d_max_sq: Quad,
    reverse_order: bool = False,
) -> DecodeResult:
    """Recover the letter configuration of a coloured patch.

    Grid vertices are placed breadth-first from a seed coding cell; every
    step extracts the surrounding maximal-diameter window, demands it be
    grid-like and coherent, and reads the colour of the coding cell holding
    the new vertex.  A verification pass re-reads every defined vertex from
    each neighbour's grid, so the result is order-independent.
    """
    tiles = patch.tiles if isinstance(patch, Pattern) else tuple(patch)
    r = quad_sqrt(d_max_sq)
    window_cache: dict = {}
    demand_cache: dict = {}

    def window(center: Point) -> Optional[RPattern]:
        from .geom import _positive_overlap_tiles

        pos = _positive_overlap_tiles(tiles, center, r)
        if not pos:
            return None
        key = frozenset(pos)
        if key in window_cache:
            return window_cache[key]
        try:
            rp = extract_rpattern(pos, center, r, d_max_sq)
        except GeomError:
            rp = None
        window_cache[key] = rp
        return rp

    def demand(rp: RPattern):
        key = frozenset(rp.pattern.tiles)
        hit = demand_cache.get(key)
        if hit is not None:
            if isinstance(hit, ReductionError):
                raise hit
            return hit
        verdict = is_grid_like(rp.pattern)
        if not verdict.grid_like:
            err = ReductionError("NOT_GRID_LIKE", "window admits no grid", window=rp)
            demand_cache[key] = err
            raise err
        ok, pair = is_coherent(rp.pattern)
        if not ok:
            err = ReductionError(
                "INCOHERENT",
                f"cells {pair[0].cell_index}/{pair[1].cell_index}",
                witness=pair,
            )
            demand_cache[key] = err
            raise err
        demand_cache[key] = verdict.witness
        return verdict.witness

    # seed: lexicographically smallest full coding cell with a viable window
    candidates = []
    for ti, t in enumerate(tiles):
        ct = _coloured_of(t)
        for cell in ct.placeholder.coding_cells():
            if not cell.full:
                continue
            cxlo, cylo, cxhi, cyhi = cell.bounds
            center = (
                (cxlo + cxhi) / 2 + t.offset[0],
                (cylo + cyhi) / 2 + t.offset[1],
            )
            candidates.append((center, ti, cell))
    candidates.sort(key=lambda c: (repr(c[0][0]), repr(c[0][1]), c[1]))
    seed = None
    for center, ti, cell in candidates:
        rp = window(center)
        if rp is not None:
            seed = (center, ti, cell, rp)
            break
    if seed is None:
        raise ReductionError("PATCH_TOO_SMALL", "no full coding cell with a full window")
    center, ti, cell, rp = seed
    wx, wy = demand(rp)
    n0 = _vertex_in_range(cell.bounds[0] + tiles[ti].offset[0], cell.bounds[2] + tiles[ti].offset[0], wx)
    m0 = _vertex_in_range(cell.bounds[1] + tiles[ti].offset[1], cell.bounds[3] + tiles[ti].offset[1], wy)
    if n0 is None or m0 is None:
        raise ReductionError("NOT_GRID_LIKE", "witness grid misses the seed cell")
    pos0 = (Quad.of(wx) + n0, Quad.of(wy) + m0)

    positions: dict = {(0, 0): pos0}
    config: dict = {}
    first = _cell_letter_at(tiles, pos0)
    if first is None or not first[1]:
        raise ReductionError("NOT_GRID_LIKE", "seed vertex outside a coding cell")
    config[(0, 0)] = first[0]

    frontier = [(0, 0)]
    steps = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    while frontier:
        frontier.sort(key=lambda nm: (abs(nm[0]) + abs(nm[1]), nm), reverse=reverse_order)
        cur = frontier.pop(0 if not reverse_order else -1)
        base = positions[cur]
        for dx, dy in steps:
            nxt = (cur[0] + dx, cur[1] + dy)
            if nxt in positions:
                continue
            q = (base[0] + dx, base[1] + dy)
            hit = _cell_letter_at(tiles, q)
            if hit is None:
                continue  # outside the patch
            if not hit[1]:
                raise ReductionError(
                    "NOT_GRID_LIKE", f"vertex {nxt} in non-coding cell {hit[2]}"
                )
            rp = window(q)
            if rp is None:
                continue  # too close to the patch boundary to certify
            wx, wy = demand(rp)
            vn = (q[0] - Quad.of(wx) + rat(1, 2)).floor()
            vm = (q[1] - Quad.of(wy) + rat(1, 2)).floor()
            v = (Quad.of(wx) + vn, Quad.of(wy) + vm)
            vhit = _cell_letter_at(tiles, v)
            if vhit is None or not vhit[1]:
                raise ReductionError("NOT_GRID_LIKE", f"snapped vertex {nxt} not in coding cell")
            positions[nxt] = v
            config[nxt] = vhit[0]
            frontier.append(nxt)

    # order-independence verification: re-read each vertex from neighbours
    for (n, m), p in positions.items():
        for dx, dy in steps:
            other = (n + dx, m + dy)
            if other not in positions:
                continue
            q = (p[0] + dx, p[1] + dy)
            hit = _cell_letter_at(tiles, q)
            if hit is None or not hit[1] or hit[0] != config[other]:
                raise ReductionError(
                    "INCOHERENT", f"vertex {other} reads differently from {(n, m)}"
                )
    return DecodeResult(config, positions, (seed[1], seed[2].index))


# ---------------------------------------------------------------------------
# quasi-isometry extraction
# ---------------------------------------------------------------------------


def qi_map(patch: Sequence[PlacedTile] | Pattern, anchor: tuple) -> dict:
    """tile index -> lexicographically smallest grid vertex (n, m) inside it."""
    tiles = patch.tiles if isinstance(patch, Pattern) else tuple(patch)
    x0, y0 = Quad.of(anchor[0]), Quad.of(anchor[1])
    out = {}
    for ti, t in enumerate(tiles):
        bx0, by0, bx1, by1 = t.bbox()
        best = None
        n = (bx0 - x0).floor()
        while x0 + n <= bx1:
            if x0 + n >= bx0:
                m = (by0 - y0).floor()
                while y0 + m <= by1:
                    if y0 + m >= by0 and point_in_polygon(
                        (x0 + n, y0 + m), t.vertices()
                    ) > 0:
                        if best is None:
                            best = (n, m)
                    m += 1
            if best is not None:
                break
            n += 1
        if best is None:
            raise ReductionError("NO_VERTEX_IN_TILE", f"tile {ti}")
        out[ti] = best
    return out


@dataclass(frozen=True)
class QiReport:
    ok: bool
    witness: object = None


def qi_verify(mapping: dict, patch: Sequence[PlacedTile] | Pattern, k, anchor: Optional[tuple] = None) -> QiReport:
    """Check the quasi-isometry inequalities for phi = mapping over all tile
    pairs (graph metric vs L1 on the lattice) and the k-net condition over
    grid vertices inside the patch."""
    pat = patch if isinstance(patch, Pattern) else pattern_build(patch)
    tiles = pat.tiles
    k = Quad.of(k)
    g = adjacency_graph(pat)
    for src in range(len(tiles)):
        dist = g.distances_from(src)
        for dst in range(len(tiles)):
            dg = dist[dst]
            if dg is None:
                continue
            a = mapping[src]
            b = mapping[dst]
            dz = abs(a[0] - b[0]) + abs(a[1] - b[1])
            if not (Quad.of(dg) / k - k <= Quad.of(dz) <= k * dg + k):
                return QiReport(False, (src, dst, dg, dz))
    if anchor is not None:
        x0, y0 = Quad.of(anchor[0]), Quad.of(anchor[1])
        bx0, by0, bx1, by1 = pat.support_bbox()
        n = (bx0 - x0).floor()
        while x0 + n <= bx1:
            m = (by0 - y0).floor()
            while y0 + m <= by1:
                p = (x0 + n, y0 + m)
                if any(point_in_polygon(p, t.vertices()) > 0 for t in tiles):
                    near = min(
                        abs(mapping[ti][0] - n) + abs(mapping[ti][1] - m)
                        for ti in mapping
                    )
                    if Quad.of(near) > k:
                        return QiReport(False, ("uncovered", (n, m), near))
                m += 1
            n += 1
    return QiReport(True)


# ---------------------------------------------------------------------------
# materialization of the forbidden family
# ---------------------------------------------------------------------------


@dataclass
class Materialized:
    complete: bool
    patterns: list  # (labelled tiles tuple, PatternClass)


def materialize_forbidden(instance: ReductionInstance, cap: int, geom_cap: int = 200) -> Materialized:
    """Stream labelled maximal-diameter windows that the classifier rejects,
    in deterministic order, up to `cap` entries."""
    r = instance.d_max
    rps = enumerate_r_patterns(instance.shapes, instance.allowed, r, cap=geom_cap)
    out = []
    complete = True
    checkered = {s.name: checker(s) for s in instance.shapes}
    for rp in rps:
        geo = rp.pattern.tiles
        ph_lists = [placeholders(checkered[t.shape.name]) for t in geo]
        for ph_choice in itertools.product(*ph_lists):
            coding_counts = [len(ph.coding_cells()) for ph in ph_choice]
            total = sum(coding_counts)
            for letters in itertools.product(instance.nn.alphabet, repeat=total):
                labelled = []
                k = 0
                for t, ph, cnt in zip(geo, ph_choice, coding_counts):
                    cells = [c.index for c in ph.coding_cells()]
                    cols = tuple(sorted(zip(cells, letters[k : k + cnt])))
                    k += cnt
                    labelled.append(PlacedTile(t.shape, t.offset, ColouredTile(ph, cols)))
                verdict = instance.classify(labelled, rp.center, skip_dmax_check=True)
                if not verdict.allowed:
                    if len(out) >= cap:
                        return Materialized(False, out)
                    out.append((tuple(labelled), verdict))
    return Materialized(complete, out)


# ---------------------------------------------------------------------------
# window sweep helpers (interior classification)
# ---------------------------------------------------------------------------


def interior_centers(patch: Sequence[PlacedTile] | Pattern, r: Quad) -> list[Point]:
    """Face representatives of the center space whose window ball fits
    inside the patch support's bounding box."""
    tiles = patch.tiles if isinstance(patch, Pattern) else tuple(patch)
    from .geom import _QuadKey, _face_reps

    xs = sorted({v[0] for t in tiles for v in t.vertices()}, key=_QuadKey)
    ys = sorted({v[1] for t in tiles for v in t.vertices()}, key=_QuadKey)
    cand_x = [c for c in _face_reps([x - r for x in xs] + [x + r for x in xs]) if xs[0] <= c - r and c + r <= xs[-1]]
    cand_y = [c for c in _face_reps([y - r for y in ys] + [y + r for y in ys]) if ys[0] <= c - r and c + r <= ys[-1]]
    return [(cx, cy) for cx in cand_x for cy in cand_y]


def classify_interior(instance: ReductionInstance, patch: Pattern) -> list[tuple[Point, PatternClass]]:
    """Classify the window at every interior face representative.

    Windows sharing the same labelled tile set are classified once.
    """
    from .geom import _positive_overlap_tiles

    r = instance.d_max
    out = []
    window_memo: dict = {}
    verdict_memo: dict = {}
    for center in interior_centers(patch, r):
        pos = _positive_overlap_tiles(patch.tiles, center, r)
        if not pos:
            continue
        key = frozenset(pos)
        if key not in window_memo:
            try:
                window_memo[key] = extract_rpattern(pos, center, r, instance.d_max_sq)
            except GeomError:
                window_memo[key] = None
        rp = window_memo[key]
        if rp is None:
            continue
        vkey = frozenset(rp.pattern.tiles)
        if vkey not in verdict_memo:
            verdict_memo[vkey] = instance.classify(rp.pattern, center, skip_dmax_check=True)
        out.append((center, verdict_memo[vkey]))
    return out
