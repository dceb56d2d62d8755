import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tileforge.wang import (
    BlockRecoding,
    NNPairs,
    SFTInstance,
    TorusCertificate,
    WangBridge,
    WangError,
    WangTileset,
    block_search,
    check_certificate,
    nn_convert,
    nn_to_wang_blocks,
    periodic_search,
    semi_decide,
    wang_to_nn,
)


def free_instance(letters=("a",)):
    return NNPairs.from_forbidden(letters, [], [])


def all_forbidden(letters=("a",)):
    pairs = [(x, y) for x in letters for y in letters]
    return NNPairs.from_forbidden(letters, pairs, pairs)


def checkerboard():
    # two letters, equal neighbours forbidden both ways
    return NNPairs.from_forbidden(
        "01", [("0", "0"), ("1", "1")], [("0", "0"), ("1", "1")]
    )


def test_block_search_free():
    assert block_search(free_instance(), 8) is not None


def test_block_search_all_forbidden():
    assert block_search(all_forbidden(), 2) is None
    assert block_search(all_forbidden(), 1) is not None


def test_periodic_single_free_tile():
    cert = periodic_search(free_instance(), 1)
    assert cert is not None and cert.periods == (1, 1)


def test_periodic_checkerboard():
    nn = checkerboard()
    assert periodic_search(nn, 1) is None
    cert = periodic_search(nn, 2)
    assert cert is not None and cert.periods == (2, 2)
    assert check_certificate(nn, cert)


def test_monotone_block_failure():
    nn = checkerboard()
    # blocks exist at all sizes here; a failing instance stays failing
    bad = all_forbidden("ab")
    sizes = [n for n in range(2, 5) if block_search(bad, n) is None]
    assert sizes == [2, 3, 4]


def test_semi_decide():
    assert semi_decide(all_forbidden(), 4, 4).verdict == "empty"
    r = semi_decide(free_instance(), 4, 4)
    assert r.verdict == "nonempty-periodic" and r.certificate.periods == (1, 1)


def test_wang_bridge_roundtrip():
    tiles = WangTileset(
        (
            ("t0", "A", "B", "A", "B"),
            ("t1", "A", "C", "A", "B"),
            ("t2", "A", "B", "A", "C"),
        )
    )
    bridge = WangBridge(tiles)
    nn = bridge.nn
    assert ("t0", "t0") in nn.allowed_h  # east B = west B
    assert ("t1", "t0") not in nn.allowed_h  # east C vs west B
    assert ("t1", "t2") in nn.allowed_h
    back = bridge.inverse(nn)
    assert [t[0] for t in back.tiles] == ["t0", "t1", "t2"]


def test_wang_single_tile_matching_labels():
    tiles = WangTileset((("t", "x", "y", "x", "y"),))
    nn = wang_to_nn(tiles)
    assert ("t", "t") in nn.allowed_h and ("t", "t") in nn.allowed_v
    cert = periodic_search(nn, 1)
    assert cert is not None


def test_wang_incompatible_tiles():
    tiles = WangTileset((("a", "1", "2", "3", "4"), ("b", "5", "6", "7", "8")))
    nn = wang_to_nn(tiles)
    assert not nn.allowed_h and not nn.allowed_v


# -- higher block conversion ---------------------------------------------------


def brute_count(alphabet, forbidden, n):
    """All n x n arrays avoiding every forbidden pattern occurrence."""
    count = 0
    cells = [(x, y) for y in range(n) for x in range(n)]
    for values in itertools.product(alphabet, repeat=n * n):
        grid = dict(zip(cells, values))
        ok = True
        for p in forbidden:
            xs = [z[0] for z, _ in p]
            ys = [z[1] for z, _ in p]
            w, h = max(xs) - min(xs), max(ys) - min(ys)
            x0, y0 = min(xs), min(ys)
            for ox in range(n - w):
                for oy in range(n - h):
                    if all(grid[(z[0] - x0 + ox, z[1] - y0 + oy)] == v for z, v in p):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count


def nn_block_count(nn, n):
    count = 0
    letters = list(nn.alphabet)
    cells = [(x, y) for y in range(n) for x in range(n)]

    def rec(idx, grid):
        nonlocal count
        if idx == len(cells):
            count += 1
            return
        x, y = cells[idx]
        for a in letters:
            if x > 0 and (grid[(x - 1, y)], a) not in nn.allowed_h:
                continue
            if y > 0 and (grid[(x, y - 1)], a) not in nn.allowed_v:
                continue
            grid[(x, y)] = a
            rec(idx + 1, grid)
            del grid[(x, y)]

    rec(0, {})
    return count


def test_nn_convert_1x1_supports():
    sft = SFTInstance.make("ab", [{(0, 0): "b"}])
    nn, rec = nn_convert(sft)
    assert rec.window == 1
    assert len(nn.alphabet) == 1  # only 'a' survives


def test_nn_convert_2x2_block_language_bijection():
    rng = random.Random(3)
    for _ in range(12):
        # one random 2x2 forbidden pattern over {0,1}
        pat = {
            (x, y): rng.choice("01") for x in range(2) for y in range(2)
        }
        sft = SFTInstance.make("01", [pat])
        nn, rec = nn_convert(sft)
        assert rec.window == 2
        for n in range(2, 5):
            # image n x n blocks correspond to source (n+1) x (n+1) blocks
            assert nn_block_count(nn, n) == brute_count("01", sft.forbidden, n + 1)


def test_nn_convert_already_nearest_neighbour():
    # forbidden horizontal domino ("a","b") as a 2-cell pattern
    sft = SFTInstance.make("ab", [{(0, 0): "a", (1, 0): "b"}])
    nn, rec = nn_convert(sft)
    assert rec.window == 2
    for n in range(2, 5):
        direct = NNPairs.from_forbidden("ab", [("a", "b")], [])
        assert nn_block_count(nn, n) == nn_block_count(direct, n + 1)


def test_block_tiles_conversion():
    nn = checkerboard()
    tiles, corner = nn_to_wang_blocks(nn)
    assert len(tiles) == 2  # two alternating 2x2 blocks
    nn2 = wang_to_nn(tiles)
    cert = periodic_search(nn2, 2)
    assert cert is not None


def test_duplicate_id_rejected():
    with pytest.raises(WangError):
        WangTileset((("t", "a", "b", "c", "d"), ("t", "a", "b", "c", "d")))
