"""Exact coordinate arithmetic.

Coordinates live in a real quadratic extension Q(sqrt(d)) for a squarefree
d (d=1 gives the plain rationals).  Values are ``a + b*sqrt(d)`` with a, b
rational; equality and total order are decided exactly, never through
floats.  Penrose combinatorics uses a separate integer lattice type
(:class:`Z5`) indexed by the ten unit directions at multiples of 36 degrees.
"""

from __future__ import annotations

from typing import Iterable, Union

import gmpy2

mpq = gmpy2.mpq

RatLike = Union[int, str, "gmpy2.mpq"]


def rat(x: RatLike, den: RatLike | None = None):
    """Exact rational from int, 'p/q' string or mpq."""
    if den is not None:
        return mpq(x) / mpq(den)
    if isinstance(x, str):
        if "/" in x:
            p, q = x.split("/")
            return mpq(int(p), int(q))
        return mpq(int(x))
    return mpq(x)


RAT_ZERO = mpq(0)
RAT_ONE = mpq(1)

_SQUAREFREE_OK = {1, 2, 3, 5}


class Quad:
    """Element a + b*sqrt(d) of Q(sqrt(d)), d squarefree (d=1: rational)."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a: RatLike, b: RatLike = 0, d: int = 1):
        a = mpq(a)
        b = mpq(b)
        if d not in _SQUAREFREE_OK:
            raise ValueError(f"unsupported radicand {d}")
        if b == 0 or d == 1:
            if b != 0:
                a = a + b  # sqrt(1) == 1
            b = RAT_ZERO
            d = 1
        self.a = a
        self.b = b
        self.d = d

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def of(x: "QuadLike") -> "Quad":
        if isinstance(x, Quad):
            return x
        return Quad(mpq(x))

    @staticmethod
    def sqrt_of(d: int, coeff: RatLike = 1) -> "Quad":
        return Quad(0, coeff, d)

    # -- ring coercion ---------------------------------------------------------

    def _match(self, other: "QuadLike"):
        """Common-ring components (a1, b1, a2, b2, d)."""
        o = Quad.of(other)
        if self.d == o.d or o.d == 1:
            return self.a, self.b, o.a, o.b, self.d
        if self.d == 1:
            return self.a, self.b, o.a, o.b, o.d
        raise ValueError(f"mixed radicands {self.d} and {o.d}")

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other):
        a1, b1, a2, b2, d = self._match(other)
        return Quad(a1 + a2, b1 + b2, d)

    __radd__ = __add__

    def __sub__(self, other):
        a1, b1, a2, b2, d = self._match(other)
        return Quad(a1 - a2, b1 - b2, d)

    def __rsub__(self, other):
        a1, b1, a2, b2, d = self._match(other)
        return Quad(a2 - a1, b2 - b1, d)

    def __mul__(self, other):
        a1, b1, a2, b2, d = self._match(other)
        return Quad(a1 * a2 + b1 * b2 * d, a1 * b2 + b1 * a2, d)

    __rmul__ = __mul__

    def inverse(self) -> "Quad":
        n = self.a * self.a - self.b * self.b * self.d
        if n == 0:
            raise ZeroDivisionError("zero element of quadratic ring")
        return Quad(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        return self * Quad.of(other).inverse()

    def __rtruediv__(self, other):
        return Quad.of(other) * self.inverse()

    def __neg__(self):
        return Quad(-self.a, -self.b, self.d)

    def __abs__(self):
        return self if self.sign() >= 0 else -self

    # -- comparison ------------------------------------------------------------

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return -1 if a < 0 else (1 if a > 0 else 0)
        if a == 0:
            return -1 if b < 0 else 1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with b^2 d; sign follows the larger side
        lhs = a * a
        rhs = b * b * self.d
        if lhs == rhs:
            return 0
        big_is_a = lhs > rhs
        return (1 if a > 0 else -1) if big_is_a else (1 if b > 0 else -1)

    def _cmp(self, other) -> int:
        a1, b1, a2, b2, d = self._match(other)
        return Quad(a1 - a2, b1 - b2, d).sign()

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except (ValueError, TypeError):
            return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return NotImplemented if r is NotImplemented else not r

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return not (self.a == 0 and self.b == 0)

    # -- conversions -----------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_rational(self):
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    def is_integer(self) -> bool:
        return self.b == 0 and self.a.denominator == 1

    def __float__(self):
        return float(self.a) + float(self.b) * float(self.d) ** 0.5

    def floor(self) -> int:
        """Exact floor."""
        if self.b == 0:
            return int(self.a) if self.a.denominator == 1 else int(gmpy2.floor(self.a))
        lo, hi = self._int_bracket()
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self._cmp(mid) >= 0:
                lo = mid
            else:
                hi = mid
        return lo if self._cmp(hi) < 0 else hi

    def _int_bracket(self) -> tuple[int, int]:
        f = float(self)
        lo = int(f) - 2
        hi = int(f) + 2
        while self._cmp(lo) < 0:
            lo -= 1
        while self._cmp(hi) >= 0:
            hi += 1
        return lo, hi

    def __repr__(self):
        if self.b == 0:
            return f"{self.a}"
        return f"{self.a}+{self.b}*sqrt({self.d})"


QuadLike = Union[Quad, int, "gmpy2.mpq"]

Q_ZERO = Quad(0)
Q_ONE = Quad(1)
SQRT2 = Quad.sqrt_of(2)
SQRT3 = Quad.sqrt_of(3)
SQRT5 = Quad.sqrt_of(5)
PHI = Quad(mpq(1, 2), mpq(1, 2), 5)


def qmin(values: Iterable[Quad]) -> Quad:
    it = iter(values)
    best = next(it)
    for v in it:
        if v < best:
            best = v
    return best


def qmax(values: Iterable[Quad]) -> Quad:
    it = iter(values)
    best = next(it)
    for v in it:
        if v > best:
            best = v
    return best


# ---------------------------------------------------------------------------
# Z5: integer combinations of the ten unit directions at multiples of 36deg.
# ---------------------------------------------------------------------------

# Direction k (0 <= k < 10) is the unit vector at angle k*36deg; directions
# k and k+5 are opposite, so points are stored on the basis of directions
# 0..4.  The only relation among those five is
#     u0 - u1 + u2 - u3 + u4 = 0,
# hence equality is decided on a canonical representative with last
# coordinate zero.

_Z5_KERNEL = (1, -1, 1, -1, 1)

# cos(36k deg) = _COS_NUM[k] as a Quad over sqrt(5); sin(36k deg) equals
# sin(36deg) * _SIN_FACTOR[k] with _SIN_FACTOR rational-in-phi.
_COS = (
    Quad(1),
    Quad(mpq(1, 4), mpq(1, 4), 5),    # cos 36 = (1+sqrt5)/4
    Quad(mpq(-1, 4), mpq(1, 4), 5),   # cos 72 = (sqrt5-1)/4
    Quad(mpq(1, 4), mpq(-1, 4), 5),   # cos 108 = (1-sqrt5)/4
    Quad(mpq(-1, 4), mpq(-1, 4), 5),  # cos 144 = -(1+sqrt5)/4
)
_SIN_RATIO = (
    Quad(0),
    Quad(1),
    PHI,   # sin 72 / sin 36
    PHI,   # sin 108 / sin 36
    Quad(1),
)


class Z5:
    """Point of the 36deg-direction integer lattice (rank-4 quotient)."""

    __slots__ = ("c",)

    def __init__(self, c0=0, c1=0, c2=0, c3=0, c4=0):
        # canonical representative: subtract c4 * kernel
        k = c4
        self.c = (
            c0 - k * _Z5_KERNEL[0],
            c1 - k * _Z5_KERNEL[1],
            c2 - k * _Z5_KERNEL[2],
            c3 - k * _Z5_KERNEL[3],
            0,
        )

    @staticmethod
    def zero() -> "Z5":
        return Z5()

    @staticmethod
    def unit(k: int) -> "Z5":
        """Unit step in direction k (0 <= k < 10)."""
        k %= 10
        sign = 1
        if k >= 5:
            k -= 5
            sign = -1
        coeffs = [0] * 5
        coeffs[k] = sign
        return Z5(*coeffs)

    def __add__(self, other: "Z5") -> "Z5":
        return Z5(*(a + b for a, b in zip(self.c, other.c)))

    def __sub__(self, other: "Z5") -> "Z5":
        return Z5(*(a - b for a, b in zip(self.c, other.c)))

    def __neg__(self) -> "Z5":
        return Z5(*(-a for a in self.c))

    def __eq__(self, other):
        return isinstance(other, Z5) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def mul_phi(self) -> "Z5":
        """Multiply by the golden ratio (exact lattice automorphism)."""
        # phi * u_k = u_{k+1} + u_{k-1} since 2cos36 = phi
        out = Z5()
        for k, a in enumerate(self.c):
            if a:
                out = out + _scaled(Z5.unit(k + 1), a) + _scaled(Z5.unit(k - 1), a)
        return out

    def rot36(self, steps: int = 1) -> "Z5":
        """Rotate by steps*36 degrees."""
        out = Z5()
        for k, a in enumerate(self.c):
            if a:
                out = out + _scaled(Z5.unit(k + steps), a)
        return out

    def to_plane(self) -> tuple[Quad, Quad]:
        """Exact sheared-plane embedding (x, y/sin36): affine, injective.

        Collinearity, orientation and intersection predicates computed on
        these coordinates agree with the true plane; distances do not.
        """
        x = Quad(0)
        y = Quad(0)
        for k, a in enumerate(self.c):
            if a:
                x = x + _COS[k] * a
                y = y + _SIN_RATIO[k] * a
        return x, y

    def norm_sq(self) -> Quad:
        """Exact squared Euclidean length, an element of Q(sqrt5)."""
        total = Quad(0)
        for j, aj in enumerate(self.c):
            if not aj:
                continue
            for k, ak in enumerate(self.c):
                if ak:
                    total = total + _COS[abs(j - k)] * (aj * ak)
        return total

    def to_xy(self) -> tuple[float, float]:
        """Float plane coordinates, for rendering only."""
        import math

        x = sum(a * math.cos(math.pi * k / 5) for k, a in enumerate(self.c))
        y = sum(a * math.sin(math.pi * k / 5) for k, a in enumerate(self.c))
        return x, y

    def __repr__(self):
        return f"Z5{self.c[:4]}"


def _scaled(v: Z5, n: int) -> Z5:
    return Z5(*(n * a for a in v.c))
