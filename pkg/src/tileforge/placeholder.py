"""Quarter-grid checkered tiles, the 16 residue-marked variants per shape,
letter colourings of coding cells, and shapeset normalization.

A checkered tile carries a square grid of cell width 1/4 anchored at the
shape's origin.  Variant (i, j) marks cell (i', j') as a coding cell when
i' = i and j' = j mod 4, as a column cell when i' = i, and as a row cell
when j' = j; coding cells are both.  Colourings assign one alphabet letter
to every coding cell.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import gmpy2

from .geom import (
    GeomError,
    Point,
    Shape,
    clip_area_rect,
    make_shape,
    orient,
    polygon_area2,
    pt,
    shape_diameter_sq,
)
from .rings import Quad, mpq, qmax, qmin, rat

CELL = rat(1, 4)
CELL_AREA = CELL * CELL


class PlaceholderError(Exception):
    def __init__(self, code: str, message: str = "", **data):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.data = data


@dataclass(frozen=True)
class Cell:
    """One quarter-grid cell piece of a checkered tile (shape-local coords)."""

    index: tuple[int, int]
    bounds: tuple[Quad, Quad, Quad, Quad]  # xlo, ylo, xhi, yhi of the grid cell
    piece: tuple[Point, ...]               # cell ∩ shape (exact for convex shapes)
    area: Quad
    full: bool

    def __repr__(self):
        return f"Cell{self.index}{'*' if self.full else ''}"


@dataclass(frozen=True)
class CheckeredTile:
    shape: Shape
    cells: tuple[Cell, ...]

    def __post_init__(self):
        object.__setattr__(self, "_by_index", {c.index: c for c in self.cells})

    def cell(self, index: tuple[int, int]) -> Optional[Cell]:
        return self._by_index.get(index)

    def __repr__(self):
        return f"CheckeredTile({self.shape.name},{len(self.cells)} cells)"

    def __eq__(self, other):
        return isinstance(other, CheckeredTile) and self.shape == other.shape

    def __hash__(self):
        return hash(self.shape)


def _clip_convex(subject: Sequence[Point], xlo, xhi, ylo, yhi) -> list[Point]:
    """Sutherland-Hodgman clip of a polygon to a rectangle; exact geometry
    for convex subjects."""
    from .geom import _clip_halfplane

    poly = list(subject)
    poly = _clip_halfplane(poly, 0, xhi, True)
    poly = _clip_halfplane(poly, 0, xlo, False)
    poly = _clip_halfplane(poly, 1, yhi, True)
    poly = _clip_halfplane(poly, 1, ylo, False)
    out: list[Point] = []
    for p in poly:
        if not out or p != out[-1]:
            out.append(p)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


_checker_cache: dict = {}


def checker(shape: Shape) -> CheckeredTile:
    """Cell decomposition of a shape by the quarter grid at its origin."""
    hit = _checker_cache.get(id(shape))
    if hit is not None:
        return hit[1]
    ct = _checker_raw(shape)
    _checker_cache[id(shape)] = (shape, ct)
    return ct


def _checker_raw(shape: Shape) -> CheckeredTile:
    ox, oy = shape.origin
    x0, y0, x1, y1 = shape.bbox
    i_lo = ((x0 - ox) / CELL).floor()
    i_hi = ((x1 - ox) / CELL).floor()
    j_lo = ((y0 - oy) / CELL).floor()
    j_hi = ((y1 - oy) / CELL).floor()
    cells = []
    verts = shape.vertices
    for i in range(i_lo, i_hi + 1):
        cxlo = ox + CELL * i
        cxhi = cxlo + CELL
        for j in range(j_lo, j_hi + 1):
            cylo = oy + CELL * j
            cyhi = cylo + CELL
            area = clip_area_rect(verts, cxlo, cxhi, cylo, cyhi)
            if area <= 0:
                continue
            piece = tuple(_clip_convex(verts, cxlo, cxhi, cylo, cyhi))
            cells.append(
                Cell((i, j), (cxlo, cylo, cxhi, cyhi), piece, area, area == CELL_AREA)
            )
    return CheckeredTile(shape, tuple(cells))


@dataclass(frozen=True)
class PlaceholderTile:
    checkered: CheckeredTile = field(compare=False)
    i: int = 0
    j: int = 0

    def __post_init__(self):
        if not (0 <= self.i <= 3 and 0 <= self.j <= 3):
            raise PlaceholderError("BAD_RESIDUE", f"({self.i},{self.j})")

    @property
    def shape(self) -> Shape:
        return self.checkered.shape

    def cell_class(self, index: tuple[int, int]) -> str:
        ci = index[0] % 4 == self.i
        cj = index[1] % 4 == self.j
        if ci and cj:
            return "coding"
        if ci:
            return "column"
        if cj:
            return "row"
        return "plain"

    def coding_cells(self) -> list[Cell]:
        return [c for c in self.checkered.cells if self.cell_class(c.index) == "coding"]

    def full_coding_cells(self) -> list[Cell]:
        return [c for c in self.coding_cells() if c.full]

    def linking_cells(self) -> list[Cell]:
        return [
            c
            for c in self.checkered.cells
            if self.cell_class(c.index) in ("row", "column")
        ]

    def __repr__(self):
        return f"PH({self.shape.name},{self.i},{self.j})"

    def __eq__(self, other):
        return (
            isinstance(other, PlaceholderTile)
            and self.shape == other.shape
            and (self.i, self.j) == (other.i, other.j)
        )

    def __hash__(self):
        return hash((self.shape.name, self.i, self.j))


def placeholders(checkered: CheckeredTile) -> list[PlaceholderTile]:
    """The 16 residue variants of a checkered tile."""
    return [PlaceholderTile(checkered, i, j) for i in range(4) for j in range(4)]


@dataclass(frozen=True)
class ColouredTile:
    placeholder: PlaceholderTile
    colours: tuple[tuple[tuple[int, int], object], ...]  # sorted ((i',j'), letter)

    @property
    def shape(self) -> Shape:
        return self.placeholder.shape

    def colour_of(self, index: tuple[int, int]):
        for idx, letter in self.colours:
            if idx == index:
                return letter
        raise KeyError(index)

    def __repr__(self):
        cols = ",".join(f"{i},{j}:{v}" for (i, j), v in self.colours)
        return f"CT({self.shape.name},{self.placeholder.i},{self.placeholder.j}|{cols})"

    def __eq__(self, other):
        return (
            isinstance(other, ColouredTile)
            and self.placeholder == other.placeholder
            and self.colours == other.colours
        )

    def __hash__(self):
        return hash((self.placeholder, self.colours))


def colour(
    placeholder: PlaceholderTile,
    assignment: Mapping[tuple[int, int], object],
    alphabet: Optional[Sequence[object]] = None,
) -> ColouredTile:
    if alphabet is not None and len(alphabet) == 0:
        raise PlaceholderError("EMPTY_ALPHABET")
    coding = {c.index for c in placeholder.coding_cells()}
    given = set(assignment)
    missing = coding - given
    if missing:
        raise PlaceholderError("PARTIAL_ASSIGNMENT", f"missing {sorted(missing)}")
    extra = given - coding
    if extra:
        raise PlaceholderError("EXTRANEOUS_CELL", f"non-coding {sorted(extra)}")
    if alphabet is not None:
        bad = [v for v in assignment.values() if v not in alphabet]
        if bad:
            raise PlaceholderError("EXTRANEOUS_CELL", f"letters {bad} not in alphabet")
    cols = tuple(sorted(assignment.items()))
    return ColouredTile(placeholder, cols)


@dataclass
class ColouredTileset:
    """Lazily enumerable set of coloured tiles with an exact closed-form count."""

    shapes: tuple[Shape, ...]
    alphabet: tuple[object, ...]
    placeholders: tuple[PlaceholderTile, ...]

    @property
    def count(self) -> int:
        k = len(self.alphabet)
        return sum(k ** len(ph.coding_cells()) for ph in self.placeholders)

    def __iter__(self) -> Iterator[ColouredTile]:
        for ph in self.placeholders:
            coding = [c.index for c in ph.coding_cells()]
            for letters in itertools.product(self.alphabet, repeat=len(coding)):
                yield ColouredTile(ph, tuple(sorted(zip(coding, letters))))

    def take(self, cap: int) -> list[ColouredTile]:
        out = []
        for t in self:
            if len(out) >= cap:
                raise PlaceholderError("BUDGET_EXCEEDED", f"tileset larger than {cap}")
            out.append(t)
        return out


def build_tileset(shapes: Sequence[Shape], alphabet: Sequence[object]) -> ColouredTileset:
    if not alphabet:
        raise PlaceholderError("EMPTY_ALPHABET")
    phs = []
    for s in shapes:
        phs.extend(placeholders(checker(s)))
    return ColouredTileset(tuple(shapes), tuple(alphabet), tuple(phs))


# ---------------------------------------------------------------------------
# shapeset normalization
# ---------------------------------------------------------------------------


def _is_convex(shape: Shape) -> bool:
    v = shape.vertices
    n = len(v)
    return all(orient(v[k], v[(k + 1) % n], v[(k + 2) % n]) >= 0 for k in range(n))


def _axis_segments(shape: Shape, horizontal: bool) -> list[tuple[Quad, Quad, Quad]]:
    """Maximal horizontal (resp. vertical) boundary segments as
    (level, lo, hi): level is the y (resp. x) of the segment."""
    runs: dict = {}
    for a, b in shape.edges():
        if horizontal and a[1] == b[1]:
            level, lo, hi = a[1], qmin((a[0], b[0])), qmax((a[0], b[0]))
        elif not horizontal and a[0] == b[0]:
            level, lo, hi = a[0], qmin((a[1], b[1])), qmax((a[1], b[1]))
        else:
            continue
        runs.setdefault(level, []).append((lo, hi))
    out = []
    from .geom import _QuadKey

    for level, intervals in runs.items():
        intervals.sort(key=lambda iv: _QuadKey(iv[0]))
        cur_lo, cur_hi = intervals[0]
        for lo, hi in intervals[1:]:
            if lo <= cur_hi:
                cur_hi = qmax((cur_hi, hi))
            else:
                out.append((level, cur_lo, cur_hi))
                cur_lo, cur_hi = lo, hi
        out.append((level, cur_lo, cur_hi))
    return out


def _strictly_contains_unit_square(shape: Shape) -> bool:
    """Is some closed axis-aligned unit square inside the open interior?
    Exact for convex shapes."""
    if not _is_convex(shape):
        raise PlaceholderError(
            "UNSUPPORTED_SHAPE", f"{shape.name}: normalization needs convex shapes"
        )
    poly = list(shape.vertices)
    for dx, dy in ((1, 0), (0, 1), (1, 1)):
        shifted = [(x - dx, y - dy) for x, y in shape.vertices]
        poly = _clip_convex_poly(poly, shifted)
        if not poly:
            return False
    return polygon_area2(poly) > 0


def _clip_convex_poly(subject: list[Point], clip: list[Point]) -> list[Point]:
    """Clip polygon against a convex CCW polygon (Sutherland-Hodgman)."""
    poly = list(subject)
    n = len(clip)
    for k in range(n):
        if not poly:
            return []
        a, b = clip[k], clip[(k + 1) % n]
        out: list[Point] = []
        m = len(poly)
        for idx in range(m):
            p, q = poly[idx], poly[(idx + 1) % m]
            side_p = orient(a, b, p)
            side_q = orient(a, b, q)
            if side_p >= 0:
                out.append(p)
            if (side_p > 0 and side_q < 0) or (side_p < 0 and side_q > 0):
                ax, ay = a
                bx, by = b
                px, py = p
                qx, qy = q
                denom = (bx - ax) * (qy - py) - (by - ay) * (qx - px)
                t = ((bx - ax) * (ay - py) - (by - ay) * (ax - px)) / denom
                out.append((px + (qx - px) * t, py + (qy - py) * t))
        poly = out
    return poly


def _scaled_shape(shape: Shape, s) -> Shape:
    verts = [(x * s, y * s) for x, y in shape.vertices]
    return make_shape(shape.name, verts, origin=(shape.origin[0] * s, shape.origin[1] * s))


def _is_integer_rational(q: Quad) -> bool:
    return q.is_rational and q.as_rational().denominator == 1


def _dmax_is_integer(shapes: Sequence[Shape]) -> bool:
    dsq = qmax(shape_diameter_sq(s) for s in shapes)
    if not dsq.is_rational:
        return False
    v = dsq.as_rational()
    num, den = v.numerator, v.denominator
    rn = gmpy2.isqrt(num)
    rd = gmpy2.isqrt(den)
    if rn * rn != num or rd * rd != den:
        return False  # irrational diameter
    return (mpq(rn) / mpq(rd)).denominator == 1


def check_normalized(shapes: Sequence[Shape]) -> Optional[str]:
    """None when all normalization conditions hold, else a reason."""
    for s in shapes:
        if not _strictly_contains_unit_square(s):
            return f"{s.name}: no strictly interior unit square"
        for horizontal in (True, False):
            segs = _axis_segments(s, horizontal)
            for k in range(len(segs)):
                for l in range(k + 1, len(segs)):
                    d = abs(segs[k][0] - segs[l][0])
                    if _is_integer_rational(d):
                        kind = "horizontal" if horizontal else "vertical"
                        return f"{s.name}: {kind} segments at integer distance {d}"
    if _dmax_is_integer(shapes):
        return "max diameter is an integer"
    return None


def _scale_candidates() -> Iterator:
    yield mpq(1)
    yield mpq(5, 2)
    for q in itertools.count(1):
        for p in range(1, 12 * q + 1):
            s = mpq(p, q)
            if s.denominator != q:
                continue  # not in lowest terms; seen earlier
            if s == 1 or s == mpq(5, 2):
                continue
            yield s


def normalize_shapeset(shapes: Sequence[Shape], max_candidates: int = 5000):
    """Scale a shapeset so every shape strictly contains a unit square, no
    two same-direction boundary segments of a shape sit at integer offset,
    and the largest diameter is not an integer.

    Returns (scaled shapes, scale).  Tries scale 1, then 5/2 (the canonical
    workbench scale), then small rationals by denominator.
    """
    for s in shapes:
        for horizontal in (True, False):
            segs = _axis_segments(s, horizontal)
            levels = [seg[0] for seg in segs]
            for k in range(len(levels)):
                for l in range(k + 1, len(levels)):
                    if levels[k] == levels[l]:
                        raise PlaceholderError(
                            "UNSCALABLE",
                            f"{s.name}: two parallel boundary segments on one line",
                        )
    tried = 0
    for cand in _scale_candidates():
        tried += 1
        if tried > max_candidates:
            break
        scaled = [_scaled_shape(s, cand) for s in shapes]
        if check_normalized(scaled) is None:
            return scaled, cand
    raise PlaceholderError("UNSCALABLE", f"no scale found in {max_candidates} candidates")
