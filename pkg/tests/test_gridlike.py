import pytest

from tileforge.geom import PlacedTile, make_shape, pattern_build, pt, tile
from tileforge.gridlike import (
    GridlikeError,
    anchor_region,
    induced_config,
    is_coherent,
    is_grid_like,
    verify_anchor,
)
from tileforge.placeholder import ColouredTile, PlaceholderTile, checker, placeholders
from tileforge.rings import mpq, rat

SQ = make_shape("sq", [pt(0, 0), pt(rat(5, 2), 0), pt(rat(5, 2), rat(5, 2)), pt(0, rat(5, 2))])
CHK = checker(SQ)
PH = {(i, j): PlaceholderTile(CHK, i, j) for i in range(4) for j in range(4)}


def coloured(ph, letter="a"):
    return ColouredTile(ph, tuple(sorted((c.index, letter) for c in ph.coding_cells())))


def coloured_map(ph, mapping):
    return ColouredTile(ph, tuple(sorted(mapping.items())))


def test_single_tile_box():
    t = tile(SQ, 0, 0, PH[(0, 0)])
    region = anchor_region([t])
    assert len(region.boxes) == 1
    x1, x2, y1, y2 = region.boxes[0]
    assert x2 - x1 == mpq(1, 4) and y2 - y1 == mpq(1, 4)
    assert (x1, y1) == (0, 0)


def test_single_tile_box_wraps_origin():
    t = tile(SQ, rat(7, 8), 0, PH[(0, 0)])
    region = anchor_region([t])
    # x-interval [7/8, 9/8] wraps: two boxes
    assert len(region.boxes) == 2


def test_adjacent_residue_shift_two_compatible():
    # origins differ by 5/2 = 1/2 mod 1 => residue shift of two keeps the
    # same anchor box, any other shift moves it
    a = tile(SQ, 0, 0, PH[(0, 0)])
    b = tile(SQ, rat(5, 2), 0, PH[(2, 0)])
    region = anchor_region([a, b])
    assert not region.empty
    assert region.boxes == anchor_region([a]).boxes


def test_adjacent_same_residue_empty():
    a = tile(SQ, 0, 0, PH[(0, 0)])
    b = tile(SQ, rat(5, 2), 0, PH[(0, 0)])
    assert anchor_region([a, b]).empty


def test_is_grid_like_single_tile():
    t = tile(SQ, 0, 0, PH[(1, 2)])
    verdict = is_grid_like([t])
    assert verdict.grid_like
    x0, y0 = verdict.witness
    assert verify_anchor([t], x0, y0) is None


def test_not_grid_like_mismatch():
    a = tile(SQ, 0, 0, PH[(0, 0)])
    b = tile(SQ, rat(5, 2), 0, PH[(1, 0)])
    assert not is_grid_like([a, b]).grid_like


def test_coherent_single_tile():
    t = tile(SQ, 0, 0, coloured(PH[(0, 0)], "a"))
    ok, _ = is_coherent([t])
    assert ok


def test_incoherent_abutting_cells():
    # tiles offset 5/2 with equal residues: coding cells sit exactly 1/4
    # apart across the boundary, binding the colours
    a = tile(SQ, 0, 0, coloured(PH[(0, 0)], "a"))
    b = tile(SQ, rat(5, 2), 0, coloured(PH[(0, 0)], "b"))
    ok, pair = is_coherent([a, b])
    assert not ok
    assert pair is not None


def test_coherent_when_letters_match():
    a = tile(SQ, 0, 0, coloured(PH[(0, 0)], "a"))
    b = tile(SQ, rat(5, 2), 0, coloured(PH[(0, 0)], "a"))
    ok, _ = is_coherent([a, b])
    assert ok


def test_induced_config_constant():
    t = tile(SQ, 0, 0, coloured(PH[(0, 0)], "z"))
    verdict = is_grid_like([t])
    cfg = induced_config([t], verdict.witness)
    cells = cfg.mapping()
    assert cells and set(cells.values()) == {"z"}
    # support of the induced block contains a 2x2 square
    ns = {n for n, _ in cells}
    ms = {m for _, m in cells}
    assert len(ns) >= 2 and len(ms) >= 2


def test_induced_config_anchor_invalid():
    t = tile(SQ, 0, 0, coloured(PH[(0, 0)], "z"))
    with pytest.raises(GridlikeError) as e:
        induced_config([t], (mpq(1, 2), mpq(1, 2)))
    assert e.value.code == "ANCHOR_INVALID"
