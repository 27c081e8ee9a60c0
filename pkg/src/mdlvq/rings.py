"""Integer rings used to build similar sublattices.

Rational integers, Gaussian integers a+bi, Eisenstein integers a+b*w with
w = exp(2*pi*i/3), and Lipschitz/Hurwitz integral quaternions.  Each ring
element knows the integer matrix of right multiplication acting on
coefficient row vectors, which is the similarity matrix U of the sublattice
it generates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import InputError


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (small arguments only)."""
    if n < 1:
        raise InputError("factorize needs a positive integer")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class GaussianInt:
    a: int
    b: int

    def __add__(self, o):
        o = _gauss(o)
        return GaussianInt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = _gauss(o)
        return GaussianInt(self.a - o.a, self.b - o.b)

    def __neg__(self):
        return GaussianInt(-self.a, -self.b)

    def __mul__(self, o):
        o = _gauss(o)
        return GaussianInt(self.a * o.a - self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conj(self):
        return GaussianInt(self.a, -self.b)

    def norm(self) -> int:
        return self.a * self.a + self.b * self.b

    def __bool__(self):
        return bool(self.a or self.b)

    def __divmod__(self, o):
        o = _gauss(o)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        num = self * o.conj()
        q = GaussianInt(_round_frac(num.a, n), _round_frac(num.b, n))
        return q, self - q * o

    def units(self):
        return [GaussianInt(1, 0), GaussianInt(0, 1), GaussianInt(-1, 0), GaussianInt(0, -1)]

    def canonical(self) -> "GaussianInt":
        """Associate with a > 0, b >= 0."""
        if not self:
            return self
        for u in self.units():
            z = self * u
            if z.a > 0 and z.b >= 0:
                return z
        raise AssertionError("unreachable")

    def matrix(self):
        """Right multiplication (x + iy) -> (x + iy) * xi on coefficient rows of Z^2."""
        return ((self.a, self.b), (-self.b, self.a))

    def __str__(self):
        return f"{self.a}{self.b:+d}i"


@dataclass(frozen=True)
class EisensteinInt:
    """a + b*w, w = exp(2 pi i / 3), so w^2 = -1 - w and norm a^2 - ab + b^2."""

    a: int
    b: int

    def __add__(self, o):
        o = _eis(o)
        return EisensteinInt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = _eis(o)
        return EisensteinInt(self.a - o.a, self.b - o.b)

    def __neg__(self):
        return EisensteinInt(-self.a, -self.b)

    def __mul__(self, o):
        o = _eis(o)
        bd = self.b * o.b
        return EisensteinInt(self.a * o.a - bd, self.a * o.b + self.b * o.a - bd)

    __rmul__ = __mul__

    def conj(self):
        return EisensteinInt(self.a - self.b, -self.b)

    def norm(self) -> int:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def __bool__(self):
        return bool(self.a or self.b)

    def __divmod__(self, o):
        o = _eis(o)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        num = self * o.conj()
        q0 = EisensteinInt(_round_frac(num.a, n), _round_frac(num.b, n))
        # coordinate rounding can miss the nearest point of the hexagonal lattice
        best = None
        for da, db in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)):
            q = EisensteinInt(q0.a + da, q0.b + db)
            r = self - q * o
            if best is None or r.norm() < best[1].norm():
                best = (q, r)
        return best

    def units(self):
        w = EisensteinInt(0, 1)
        u = [EisensteinInt(1, 0)]
        for _ in range(5):
            u.append(u[-1] * EisensteinInt(1, 1))  # 1 + w = -w^2 = exp(i pi/3)
        return u

    def canonical(self) -> "EisensteinInt":
        """Associate with argument in [0, pi/3), i.e. a > b >= 0."""
        if not self:
            return self
        for u in self.units():
            z = self * u
            if z.a > z.b >= 0:
                return z
        raise AssertionError("unreachable")

    def matrix(self):
        """Right multiplication on coefficient rows of A2 (basis 1, w)."""
        return ((self.a, self.b), (-self.b, self.a - self.b))

    def __str__(self):
        return f"{self.a}{self.b:+d}w"


def _round_frac(num: int, den: int) -> int:
    return (2 * num + den) // (2 * den)


def _gauss(x) -> GaussianInt:
    if isinstance(x, GaussianInt):
        return x
    if isinstance(x, int):
        return GaussianInt(x, 0)
    raise TypeError(f"cannot use {x!r} as a Gaussian integer")


def _eis(x) -> EisensteinInt:
    if isinstance(x, EisensteinInt):
        return x
    if isinstance(x, int):
        return EisensteinInt(x, 0)
    raise TypeError(f"cannot use {x!r} as an Eisenstein integer")


LIPSCHITZ = "Lipschitz"
HURWITZ = "Hurwitz"


@dataclass(frozen=True)
class Quaternion:
    """w + x i + y j + z k with integer or all-half-odd components."""

    w: Fraction
    x: Fraction
    y: Fraction
    z: Fraction
    ring_tag: str = LIPSCHITZ

    def __post_init__(self):
        comps = tuple(Fraction(v) for v in (self.w, self.x, self.y, self.z))
        for name, v in zip("wxyz", comps):
            object.__setattr__(self, name, v)
        if self.ring_tag not in (LIPSCHITZ, HURWITZ):
            raise InputError(f"unknown quaternion ring {self.ring_tag!r}")
        ints = all(v.denominator == 1 for v in comps)
        halves = all(v.denominator == 2 for v in comps)
        if self.ring_tag == LIPSCHITZ and not ints:
            raise InputError("Lipschitz quaternions need integer components")
        if self.ring_tag == HURWITZ and not (ints or halves):
            raise InputError("Hurwitz quaternions need all-integer or all-half-odd components")

    @classmethod
    def hurwitz(cls, w, x, y, z):
        return cls(w, x, y, z, HURWITZ)

    @classmethod
    def d4_form(cls, alpha: int, beta: int) -> "Quaternion":
        """(alpha/2)(1 + i) + (beta/2)(j + k)."""
        return cls.hurwitz(Fraction(alpha, 2), Fraction(alpha, 2), Fraction(beta, 2), Fraction(beta, 2))

    @property
    def components(self):
        return (self.w, self.x, self.y, self.z)

    def _tag(self, o):
        return HURWITZ if HURWITZ in (self.ring_tag, o.ring_tag) else LIPSCHITZ

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            o = Quaternion(o, 0, 0, 0, HURWITZ if Fraction(o).denominator != 1 else LIPSCHITZ)
        a1, b1, c1, d1 = self.components
        a2, b2, c2, d2 = o.components
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            self._tag(o),
        )

    def __add__(self, o):
        return Quaternion(*(p + q for p, q in zip(self.components, o.components)), self._tag(o))

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z, self.ring_tag)

    def conj(self):
        return Quaternion(self.w, -self.x, -self.y, -self.z, self.ring_tag)

    def norm(self) -> Fraction:
        return self.w**2 + self.x**2 + self.y**2 + self.z**2

    def __bool__(self):
        return any(self.components)

    def __str__(self):
        return "({}, {}, {}, {})".format(*self.components)


def norm(q):
    """Norm q * conj(q) of any supported ring element (ints: q^2)."""
    if isinstance(q, int):
        return q * q
    n = q.norm()
    return n


def left_matrix(q: Quaternion):
    """L_q: row vector v (as a quaternion) times L_q equals q v."""
    a, b, c, d = q.components
    return (
        (a, b, c, d),
        (-b, a, d, -c),
        (-c, -d, a, b),
        (-d, c, -b, a),
    )


def right_matrix(q: Quaternion):
    """R_q: row vector v times R_q equals v q."""
    a, b, c, d = q.components
    return (
        (a, b, c, d),
        (-b, a, -d, c),
        (-c, d, a, -b),
        (-d, -c, b, a),
    )


# ---------------------------------------------------------------------------
# Representability


def two_squares_representable(N: int):
    """Whether N = a^2 + b^2; returns ``(flag, (a, b) or None)``.

    The witness has a >= b >= 0 with the smallest possible a.
    """
    if N < 1:
        raise InputError("N must be positive")
    ok = all(e % 2 == 0 for p, e in factorize(N).items() if p % 4 == 3)
    if not ok:
        return False, None
    a = isqrt((N + 1) // 2)
    while 2 * a * a < N:
        a += 1
    while a * a <= N:
        r = N - a * a
        b = isqrt(r)
        if b * b == r and b <= a:
            return True, (a, b)
        a += 1
    raise AssertionError(f"no witness for {N}")


def eisenstein_representable(N: int):
    """Whether N = a^2 + ab + b^2; returns ``(flag, (a, b) or None)``.

    The witness has a >= b >= 0 with the smallest possible a.  The value set
    equals that of the Eisenstein norm a^2 - ab + b^2 (replace b by -b).
    """
    if N < 1:
        raise InputError("N must be positive")
    ok = all(e % 2 == 0 for p, e in factorize(N).items() if p % 3 == 2)
    if not ok:
        return False, None
    for a in range(0, isqrt(N) + 1):
        for b in range(0, a + 1):
            if a * a + a * b + b * b == N:
                return True, (a, b)
    raise AssertionError(f"no witness for {N}")


def four_squares(m: int) -> tuple[int, int, int, int]:
    """m = a^2 + b^2 + c^2 + d^2 with a >= b >= c >= d >= 0.

    Among such tuples the lexicographically greatest one is returned (largest
    leading entry first), e.g. 25 -> (5, 0, 0, 0).
    """
    if m < 1:
        raise InputError("m must be positive")
    for a in range(isqrt(m), -1, -1):
        ra = m - a * a
        for b in range(min(a, isqrt(ra)), -1, -1):
            rb = ra - b * b
            for c in range(min(b, isqrt(rb)), -1, -1):
                rc = rb - c * c
                d = isqrt(rc)
                if d * d == rc and d <= c:
                    return (a, b, c, d)
    raise AssertionError(f"Lagrange failed for {m}")


# ---------------------------------------------------------------------------
# gcd / lcm in the commutative rings


RINGS = ("Z", "G", "J")


def ring_of(x) -> str:
    if isinstance(x, bool):
        raise InputError("booleans are not ring elements")
    if isinstance(x, int):
        return "Z"
    if isinstance(x, GaussianInt):
        return "G"
    if isinstance(x, EisensteinInt):
        return "J"
    if isinstance(x, Quaternion):
        return "H"
    raise InputError(f"unsupported ring element {x!r}")


def canonical(x):
    if isinstance(x, int):
        return abs(x)
    return x.canonical()


def exact_div(x, y):
    """x / y in the ring, raising if y does not divide x."""
    if isinstance(x, int):
        q, r = divmod(x, y)
        if r:
            raise InputError(f"{y} does not divide {x}")
        return q
    q, r = divmod(x, y)
    if r:
        raise InputError(f"{y} does not divide {x}")
    return q


def divides(y, x) -> bool:
    if isinstance(x, int):
        return x % y == 0
    return not divmod(x, y)[1]


def gcd_lcm(ring: str, x1, x2):
    """(gcd, lcm) of two nonzero elements of Z, G or J, as canonical associates."""
    if ring not in RINGS:
        raise InputError(f"gcd/lcm needs a commutative ring among {RINGS}, got {ring!r}")
    for x in (x1, x2):
        if ring_of(x) != ring:
            raise InputError(f"{x!r} is not in ring {ring}")
        if not x:
            raise InputError("gcd/lcm of zero is not defined here")
    if ring == "Z":
        g = gcd(x1, x2)
        return g, abs(x1 * x2) // g
    a, b = x1, x2
    while b:
        a, b = b, divmod(a, b)[1]
    g = a.canonical()
    return g, exact_div(x1 * x2, g).canonical()


def elements_of_norm(ring: str, N: int) -> list:
    """Canonical representatives of all elements with the given norm."""
    out = []
    if ring == "Z":
        r = isqrt(N)
        return [r] if r * r == N else []
    r = isqrt(4 * N) + 1
    for a in range(-r, r + 1):
        for b in range(-r, r + 1):
            z = GaussianInt(a, b) if ring == "G" else EisensteinInt(a, b)
            if z.norm() == N and z.canonical() == z:
                out.append(z)
    return sorted(out, key=lambda z: (z.a, z.b))
