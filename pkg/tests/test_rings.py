from hypothesis import given, settings
from hypothesis import strategies as st

from tileforge.rings import PHI, Quad, SQRT2, SQRT5, Z5, mpq, rat


rationals = st.fractions(max_denominator=50).map(lambda f: mpq(f.numerator, f.denominator))


def quads(d):
    return st.tuples(rationals, rationals).map(lambda ab: Quad(ab[0], ab[1], d))


def test_rat_parsing():
    assert rat("5/10") == mpq(1, 2)
    assert rat(3) == 3
    assert rat(1, 4) == mpq(1, 4)


def test_phi_identity():
    assert PHI * PHI == PHI + 1
    assert SQRT5 * SQRT5 == Quad(5)
    assert SQRT2 * SQRT2 == Quad(2)


def test_ordering_basics():
    assert SQRT2 > 1
    assert SQRT2 < Quad(mpq(3, 2))
    assert Quad(1) + SQRT2 > 2
    assert PHI > Quad(mpq(8, 5))
    assert PHI < Quad(mpq(13, 8))


def test_floor():
    assert (SQRT2 * 10).floor() == 14
    assert Quad(mpq(-7, 2)).floor() == -4
    assert (-SQRT2).floor() == -2
    assert Quad(3).floor() == 3


@given(quads(2), quads(2))
@settings(max_examples=150)
def test_field_ops(x, y):
    assert (x + y) - y == x
    assert x * y == y * x
    if y != Quad(0):
        assert (x / y) * y == x


@given(quads(5), quads(5), quads(5))
@settings(max_examples=100)
def test_order_total_and_compatible(x, y, z):
    assert (x < y) + (x == y) + (y < x) == 1
    if x < y:
        assert x + z < y + z
    if x < y and z > Quad(0):
        assert x * z < y * z


@given(st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_z5_kernel_quotient(cs):
    v = Z5(*cs)
    w = Z5(*(c + k for c, k in zip(cs, (1, -1, 1, -1, 1))))
    assert v == w
    x1, y1 = v.to_plane()
    x2, y2 = w.to_plane()
    assert x1 == x2 and y1 == y2


def test_z5_phi_scaling():
    v = Z5.unit(0)
    w = v.mul_phi()
    x, y = w.to_plane()
    assert x == PHI and y == Quad(0)
    assert w.norm_sq() == PHI * PHI


def test_z5_norm():
    v = Z5.unit(0) + Z5.unit(5)
    assert v == Z5.zero()
    assert Z5.unit(3).norm_sq() == Quad(1)
    # rhombus diagonal u0 + u1 has squared length 2 + 2cos36 = 2 + phi
    assert (Z5.unit(0) + Z5.unit(1)).norm_sq() == Quad(2) + PHI
