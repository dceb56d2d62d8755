"""Lattice subshifts of finite type and Wang tiles.

Forbidden finite patterns are recoded to nearest-neighbour form through the
higher-block construction; bounded block search and torus search give a
sound, deliberately incomplete emptiness semi-decision.  Searches are
deterministic backtracking with forward checking over bitmask domains.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class WangError(Exception):
    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SFTInstance:
    """Finite-support forbidden patterns over an alphabet.

    Each forbidden pattern maps lattice positions to letters; supports are
    nonempty and finite.
    """

    alphabet: tuple
    forbidden: tuple  # tuple of frozenset({(x, y): letter}.items())

    @staticmethod
    def make(alphabet, forbidden: Iterable[dict]) -> "SFTInstance":
        pats = []
        for p in forbidden:
            if not p:
                raise WangError("EMPTY_SUPPORT")
            pats.append(frozenset(p.items()))
        return SFTInstance(tuple(alphabet), tuple(pats))


@dataclass(frozen=True)
class NNPairs:
    """Nearest-neighbour SFT as allowed pairs (dense form used by searches)."""

    alphabet: tuple
    allowed_h: frozenset  # ordered (left, right)
    allowed_v: frozenset  # ordered (bottom, top)

    @staticmethod
    def from_forbidden(alphabet, forbidden_h, forbidden_v) -> "NNPairs":
        letters = tuple(alphabet)
        fh = set(forbidden_h)
        fv = set(forbidden_v)
        ah = frozenset((a, b) for a in letters for b in letters if (a, b) not in fh)
        av = frozenset((a, b) for a in letters for b in letters if (a, b) not in fv)
        return NNPairs(letters, ah, av)


@dataclass(frozen=True)
class WangTileset:
    tiles: tuple  # (id, north, east, south, west)

    def __post_init__(self):
        ids = [t[0] for t in self.tiles]
        if len(set(ids)) != len(ids):
            raise WangError("DUPLICATE_ID")

    def __len__(self):
        return len(self.tiles)

    def by_id(self, tid):
        for t in self.tiles:
            if t[0] == tid:
                return t
        raise KeyError(tid)


def wang_to_nn(tiles: WangTileset) -> NNPairs:
    """Tiles become letters; horizontal pair (a,b) allowed iff east(a)=west(b),
    vertical pair (a,b) allowed iff north(a)=south(b)."""
    letters = tuple(t[0] for t in tiles.tiles)
    rec = {t[0]: t for t in tiles.tiles}
    ah = frozenset(
        (a, b) for a in letters for b in letters if rec[a][2] == rec[b][4]
    )
    av = frozenset(
        (a, b) for a in letters for b in letters if rec[a][1] == rec[b][3]
    )
    return NNPairs(letters, ah, av)


class WangBridge:
    """Letter/tile bridge that retains the tileset, so the inverse is the
    identity on tile ids."""

    def __init__(self, tiles: WangTileset):
        self.tiles = tiles
        self.nn = wang_to_nn(tiles)

    def inverse(self, nn: NNPairs) -> WangTileset:
        if set(nn.alphabet) != {t[0] for t in self.tiles.tiles}:
            raise WangError("DUPLICATE_ID", "letter set does not match tile ids")
        if nn.allowed_h != self.nn.allowed_h or nn.allowed_v != self.nn.allowed_v:
            raise WangError("DUPLICATE_ID", "pair constraints do not match tileset")
        return self.tiles


def nn_to_wang_blocks(nn: NNPairs) -> tuple[WangTileset, dict]:
    """Standalone conversion: tiles are allowed 2x2 letter blocks; edge
    labels are the shared dominoes.  The Wang subshift is conjugate to the
    source (letters recovered from the bottom-left corner)."""
    tiles = []
    corner = {}
    for a, b, c, d in itertools.product(nn.alphabet, repeat=4):
        # layout: c d   (top row)
        #         a b   (bottom row)
        if (
            (a, b) in nn.allowed_h
            and (c, d) in nn.allowed_h
            and (a, c) in nn.allowed_v
            and (b, d) in nn.allowed_v
        ):
            tid = (a, b, c, d)
            tiles.append((tid, (c, d), (b, d), (a, b), (a, c)))
            corner[tid] = a
    return WangTileset(tuple(tiles)), corner


# ---------------------------------------------------------------------------
# higher-block recoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockRecoding:
    window: int
    blocks: tuple  # tuple of letter-matrices (row-major tuples of tuples)

    def block_letter(self, config: dict, x: int, y: int):
        k = self.window
        return tuple(
            tuple(config[(x + dx, y + dy)] for dx in range(k)) for dy in range(k)
        )


def _pattern_extent(p) -> int:
    xs = [z[0] for z, _ in p]
    ys = [z[1] for z, _ in p]
    return max(max(xs) - min(xs), max(ys) - min(ys)) + 1


def _block_admissible(block, forbidden, k) -> bool:
    # block[dy][dx]; forbid any occurrence of a forbidden pattern inside
    for p in forbidden:
        xs = [z[0] for z, _ in p]
        ys = [z[1] for z, _ in p]
        w = max(xs) - min(xs)
        h = max(ys) - min(ys)
        x0, y0 = min(xs), min(ys)
        for ox in range(k - w):
            for oy in range(k - h):
                if all(
                    block[z[1] - y0 + oy][z[0] - x0 + ox] == letter
                    for z, letter in p
                ):
                    return False
    return True


def nn_convert(sft: SFTInstance) -> tuple[NNPairs, BlockRecoding]:
    """Higher-block conversion: letters of the image are locally admissible
    k x k blocks (k the largest forbidden-support extent); adjacent blocks
    must agree on their overlap."""
    k = max((_pattern_extent(p) for p in sft.forbidden), default=1)
    blocks = [
        tuple(tuple(row) for row in b)
        for b in itertools.product(
            itertools.product(sft.alphabet, repeat=k), repeat=k
        )
    ]
    blocks = [b for b in blocks if _block_admissible(b, sft.forbidden, k)]
    if k == 1:
        ah = frozenset((a, b) for a in blocks for b in blocks)
        av = ah
        return NNPairs(tuple(blocks), ah, av), BlockRecoding(1, tuple(blocks))
    ah = frozenset(
        (a, b)
        for a in blocks
        for b in blocks
        if all(a[dy][dx + 1] == b[dy][dx] for dy in range(k) for dx in range(k - 1))
    )
    av = frozenset(
        (a, b)
        for a in blocks
        for b in blocks
        if all(a[dy + 1][dx] == b[dy][dx] for dy in range(k - 1) for dx in range(k))
    )
    return NNPairs(tuple(blocks), ah, av), BlockRecoding(k, tuple(blocks))


# ---------------------------------------------------------------------------
# searches
# ---------------------------------------------------------------------------


def _masks(nn: NNPairs):
    letters = list(nn.alphabet)
    index = {a: i for i, a in enumerate(letters)}
    n = len(letters)
    right_of = [0] * n  # right_of[a]: letters allowed to the right of a
    left_of = [0] * n
    above = [0] * n
    below = [0] * n
    for a, b in nn.allowed_h:
        right_of[index[a]] |= 1 << index[b]
        left_of[index[b]] |= 1 << index[a]
    for a, b in nn.allowed_v:
        above[index[a]] |= 1 << index[b]
        below[index[b]] |= 1 << index[a]
    return letters, index, right_of, left_of, above, below


def _mask_iter(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _search_grid(nn: NNPairs, width: int, height: int, wrap: bool,
                 value_order: Optional[Sequence[int]] = None):
    """Deterministic backtracking with forward checking.  Cells are filled
    in a fixed row-major order; `value_order` optionally reorders letter
    preference per cell index (a complete-search warm start)."""
    letters, index, right_of, left_of, above, below = _masks(nn)
    n = len(letters)
    if n == 0:
        return None
    full = (1 << n) - 1
    cells = width * height
    domains = [full] * cells
    assign = [-1] * cells
    trail: list[list[tuple[int, int]]] = []

    def neighbours(c):
        x, y = c % width, c // width
        out = []
        if wrap or x + 1 < width:
            out.append((((x + 1) % width) + y * width, right_of))
        if wrap or x > 0:
            out.append((((x - 1) % width) + y * width, left_of))
        if wrap or y + 1 < height:
            out.append((x + ((y + 1) % height) * width, above))
        if wrap or y > 0:
            out.append((x + ((y - 1) % height) * width, below))
        return out

    nbs = [neighbours(c) for c in range(cells)]

    def prune(c, letter) -> bool:
        changes = trail[-1]
        for (o, table) in nbs[c]:
            if o == c:
                # wrap-around self-adjacency (period-1 torus)
                if not (table[letter] >> letter) & 1:
                    return False
                continue
            if assign[o] >= 0:
                continue
            allowed = table[letter]
            old = domains[o]
            new = old & allowed
            if new != old:
                changes.append((o, old))
                domains[o] = new
                if new == 0:
                    return False
        return True

    order = list(range(cells))

    def choose_values(c):
        mask = domains[c]
        if value_order is not None:
            pref = value_order[c] if isinstance(value_order[0], (list, tuple)) else value_order
            out = [v for v in pref if (mask >> v) & 1]
            rest = [v for v in _mask_iter(mask) if v not in out]
            return out + rest
        return list(_mask_iter(mask))

    pos = 0
    stack: list[list[int]] = []
    while True:
        if pos == cells:
            return {(c % width, c // width): letters[assign[c]] for c in range(cells)}
        c = order[pos]
        if len(stack) == pos:
            stack.append(choose_values(c))
        advanced = False
        while stack[pos]:
            v = stack[pos].pop(0)
            trail.append([])
            assign[c] = v
            if prune(c, v):
                pos += 1
                advanced = True
                break
            for (o, old) in trail.pop():
                domains[o] = old
            assign[c] = -1
        if advanced:
            continue
        stack.pop()
        if pos == 0:
            return None
        pos -= 1
        c = order[pos]
        for (o, old) in trail.pop():
            domains[o] = old
        assign[c] = -1


def block_search(nn: NNPairs, n: int, value_order=None) -> Optional[dict]:
    """A locally valid n x n block, or None when none exists."""
    if n < 1:
        raise WangError("BAD_SIZE")
    return _search_grid(nn, n, n, wrap=False, value_order=value_order)


@dataclass(frozen=True)
class TorusCertificate:
    periods: tuple[int, int]
    assignment: tuple  # ((x, y), letter) sorted

    def mapping(self) -> dict:
        return dict(self.assignment)


def check_certificate(nn: NNPairs, cert: TorusCertificate) -> bool:
    """Full independent wrap-around re-check."""
    p, q = cert.periods
    cells = cert.mapping()
    if len(cells) != p * q:
        return False
    for x in range(p):
        for y in range(q):
            a = cells[(x, y)]
            if (a, cells[((x + 1) % p, y)]) not in nn.allowed_h:
                return False
            if (a, cells[(x, (y + 1) % q)]) not in nn.allowed_v:
                return False
    return True


def periodic_search(
    nn: NNPairs,
    pmax: int,
    periods: Optional[Sequence[tuple[int, int]]] = None,
    value_order=None,
) -> Optional[TorusCertificate]:
    """Smallest-first torus search; every returned certificate re-checks."""
    if periods is None:
        periods = sorted(
            ((p, q) for p in range(1, pmax + 1) for q in range(1, pmax + 1)),
            key=lambda pq: (pq[0] * pq[1], pq),
        )
    for (p, q) in periods:
        sol = _search_grid(nn, p, q, wrap=True, value_order=value_order)
        if sol is not None:
            cert = TorusCertificate((p, q), tuple(sorted(sol.items())))
            if not check_certificate(nn, cert):
                raise WangError("BAD_CERTIFICATE", f"torus {p}x{q} failed re-check")
            return cert
    return None


@dataclass(frozen=True)
class SemiDecision:
    verdict: str  # "empty" | "nonempty-periodic" | "unknown"
    empty_at: Optional[int] = None
    certificate: Optional[TorusCertificate] = None


def semi_decide(nn: NNPairs, nmax: int, pmax: int) -> SemiDecision:
    """Sound and deliberately incomplete: no n x n block certifies
    emptiness; a verified torus certifies nonemptiness."""
    for n in range(1, nmax + 1):
        if block_search(nn, n) is None:
            return SemiDecision("empty", empty_at=n)
    cert = periodic_search(nn, pmax)
    if cert is not None:
        return SemiDecision("nonempty-periodic", certificate=cert)
    return SemiDecision("unknown")
