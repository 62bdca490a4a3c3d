"""
Exact points of the projective line over real quadratic fields

A QNum is either infinity or a number (p + q*sqrt(D)) / r with integer p, q,
positive r and squarefree D >= 0. Rationals are the q = 0 case. All
comparisons are decided by integer sign analysis; floats only appear in
__float__ for plotting.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Tuple, Union

from sympy import factorint

from src.errors import (
    CFKitError, DivisionByZeroError, MixedFieldError, NegativeDiscriminantError,
    ParseError, RationalRootsError, ValidationError,
)


Number = Union[int, Fraction, "QNum"]


@lru_cache(maxsize=4096)
def squarefree_split(n: int) -> Tuple[int, int]:
    """
    Split n > 0 as s^2 * m with m squarefree.

    Returns:
        (s, m)
    """
    s, m = 1, 1
    for prime, exponent in factorint(n).items():
        s *= prime ** (exponent // 2)
        if exponent % 2:
            m *= prime
    return s, m


def _sign_of_surd(p: int, q: int, d: int) -> int:
    """Sign of p + q*sqrt(d), d a nonsquare or q == 0."""
    if q == 0 or d == 0:
        return (p > 0) - (p < 0)
    sp = (p > 0) - (p < 0)
    sq = (q > 0) - (q < 0)
    if sp == 0 or sp == sq:
        return sq
    # opposite signs: compare p^2 with q^2 d
    diff = p * p - q * q * d
    if sp > 0:
        return (diff > 0) - (diff < 0)
    return (diff < 0) - (diff > 0)



def _sign_of_two_surds(a: int, b: int, d1: int, c: int, d2: int) -> int:
    """Sign of a + b*sqrt(d1) + c*sqrt(d2) for distinct squarefree d1, d2 > 1."""
    # b*sqrt(d1) + c*sqrt(d2) is zero only when b == c == 0
    sb = (b > 0) - (b < 0)
    sc = (c > 0) - (c < 0)
    if sb == 0 or sc == 0 or sb == sc:
        sx = sb or sc
    else:
        diff = b * b * d1 - c * c * d2
        sx = sb if diff > 0 else sc
    sa = (a > 0) - (a < 0)
    if sx == 0:
        return sa
    if sa == 0 or sa == sx:
        return sx
    # opposite signs: compare a^2 with (b sqrt d1 + c sqrt d2)^2
    bigger = _sign_of_surd(a * a - b * b * d1 - c * c * d2, -2 * b * c, d1 * d2)
    return sa * bigger


@dataclass(frozen=True)
class QNum:
    """
    Canonical element of Q(sqrt(D)) or the point at infinity (r == 0).

    Construct freely; __post_init__ reduces to canonical form so that
    structural equality is numeric equality.
    """
    p: int
    q: int = 0
    r: int = 1
    d: int = 0

    def __post_init__(self):
        p, q, r, d = int(self.p), int(self.q), int(self.r), int(self.d)
        if r == 0:
            if p == 0 and q == 0:
                raise DivisionByZeroError("0/0 is not a point of the projective line")
            p, q, d = 1, 0, 0
        else:
            if q == 0 or d == 0:
                q, d = 0, 0
            elif d < 0:
                raise NegativeDiscriminantError(f"negative radicand {d}")
            else:
                root = isqrt(d)
                if root * root == d:
                    p, q, d = p + q * root, 0, 0
                else:
                    s, d = squarefree_split(d)
                    q *= s
            if r < 0:
                p, q, r = -p, -q, -r
            g = gcd(gcd(p, q), r)
            if g > 1:
                p, q, r = p // g, q // g, r // g
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'q', q)
        object.__setattr__(self, 'r', r)
        object.__setattr__(self, 'd', d)

    # -- construction -------------------------------------------------

    @classmethod
    def coerce(cls, value: Number) -> 'QNum':
        if isinstance(value, QNum):
            return value
        if isinstance(value, int):
            return cls(value)
        if isinstance(value, Fraction):
            return cls(value.numerator, 0, value.denominator)
        raise TypeError(f"cannot convert {value!r} to QNum")

    @classmethod
    def rational(cls, num: int, den: int = 1) -> 'QNum':
        if den == 0:
            raise DivisionByZeroError("zero denominator")
        return cls(num, 0, den)

    # -- predicates -----------------------------------------------------

    @property
    def is_infinite(self) -> bool:
        return self.r == 0

    @property
    def is_rational(self) -> bool:
        return self.r != 0 and self.q == 0

    @property
    def is_zero(self) -> bool:
        return self.r != 0 and self.p == 0 and self.q == 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise CFKitError(f"{self} is not rational")
        return Fraction(self.p, self.r)

    # -- field arithmetic ------------------------------------------------

    def _field_with(self, other: 'QNum') -> int:
        if self.is_infinite or other.is_infinite:
            raise CFKitError("infinity is not a ring element; use a Mobius map")
        if self.d and other.d and self.d != other.d:
            raise MixedFieldError(f"Q(sqrt {self.d}) vs Q(sqrt {other.d})")
        return self.d or other.d

    def __add__(self, other: Number) -> 'QNum':
        other = QNum.coerce(other)
        d = self._field_with(other)
        return QNum(self.p * other.r + other.p * self.r,
                    self.q * other.r + other.q * self.r,
                    self.r * other.r, d)

    __radd__ = __add__

    def __neg__(self) -> 'QNum':
        if self.is_infinite:
            return self
        return QNum(-self.p, -self.q, self.r, self.d)

    def __sub__(self, other: Number) -> 'QNum':
        return self + (-QNum.coerce(other))

    def __rsub__(self, other: Number) -> 'QNum':
        return QNum.coerce(other) - self

    def __mul__(self, other: Number) -> 'QNum':
        other = QNum.coerce(other)
        d = self._field_with(other)
        return QNum(self.p * other.p + self.q * other.q * d,
                    self.p * other.q + self.q * other.p,
                    self.r * other.r, d)

    __rmul__ = __mul__

    def inverse(self) -> 'QNum':
        if self.is_infinite:
            raise CFKitError("infinity is not a ring element; use a Mobius map")
        if self.is_zero:
            raise DivisionByZeroError("division by zero")
        norm = self.p * self.p - self.q * self.q * self.d
        return QNum(self.r * self.p, -self.r * self.q, norm, self.d)

    def __truediv__(self, other: Number) -> 'QNum':
        other = QNum.coerce(other)
        self._field_with(other)
        return self * other.inverse()

    def __rtruediv__(self, other: Number) -> 'QNum':
        return QNum.coerce(other) / self

    # -- order -----------------------------------------------------------

    def sign(self) -> int:
        if self.is_infinite:
            raise CFKitError("infinity has no sign")
        return _sign_of_surd(self.p, self.q, self.d)

    def cmp(self, other: Number) -> int:
        """Exact comparison: -1, 0 or 1, also across distinct fields."""
        other = QNum.coerce(other)
        if self.is_infinite or other.is_infinite:
            raise CFKitError("infinity has no sign")
        if not (self.d and other.d and self.d != other.d):
            return (self - other).sign()
        return _sign_of_two_surds(self.p * other.r - other.p * self.r,
                                  self.q * other.r, self.d, -other.q * self.r, other.d)

    def __lt__(self, other: Number) -> bool:
        return self.cmp(other) < 0

    def __le__(self, other: Number) -> bool:
        return self.cmp(other) <= 0

    def __gt__(self, other: Number) -> bool:
        return self.cmp(other) > 0

    def __ge__(self, other: Number) -> bool:
        return self.cmp(other) >= 0

    def floor(self) -> int:
        if self.is_infinite:
            raise CFKitError("floor of infinity")
        if self.q == 0:
            return self.p // self.r
        surd = isqrt(self.q * self.q * self.d)
        whole = surd if self.q > 0 else -surd - 1
        return (self.p + whole) // self.r

    def ceil(self) -> int:
        return -(-self).floor()

    def conjugate(self) -> 'QNum':
        """Galois conjugate sqrt(D) -> -sqrt(D)."""
        if self.is_infinite or self.q == 0:
            return self
        return QNum(self.p, -self.q, self.r, self.d)

    def __abs__(self) -> 'QNum':
        return -self if self.sign() < 0 else self

    def __float__(self) -> float:
        if self.is_infinite:
            return float('inf')
        return (self.p + self.q * self.d ** 0.5) / self.r

    # -- text ------------------------------------------------------------

    def to_text(self) -> str:
        if self.is_infinite:
            return "inf"
        return f"({self.p} {self.q} {self.r} {self.d})"

    def __str__(self) -> str:
        if self.is_infinite:
            return "inf"
        if self.q == 0:
            return str(self.p) if self.r == 1 else f"{self.p}/{self.r}"
        sign = '+' if self.q > 0 else '-'
        coeff = '' if abs(self.q) == 1 else str(abs(self.q))
        body = f"{self.p}{sign}{coeff}√{self.d}" if self.p else f"{'-' if self.q < 0 else ''}{coeff}√{self.d}"
        return f"({body})/{self.r}" if self.r != 1 else body


ZERO = QNum(0)
ONE = QNum(1)
INF = QNum(1, 0, 0)
TAU = QNum(1, 1, 2, 5)


def parse_qnum(text: Union[str, int]) -> QNum:
    """
    Parse "inf", "(p q r D)", "p/q" or an integer.

    Raises:
        ParseError: on anything else
    """
    if isinstance(text, bool):
        raise ParseError(f"not a number: {text!r}")
    if isinstance(text, int):
        return QNum(text)
    if not isinstance(text, str):
        raise ParseError(f"not a number: {text!r}")
    s = text.strip()
    if s.lower() in ('inf', '∞'):
        return INF
    try:
        if s.startswith('(') and s.endswith(')'):
            parts = s[1:-1].split()
            if len(parts) != 4:
                raise ParseError(f"expected (p q r D): {text!r}")
            p, q, r, d = (int(x) for x in parts)
            if r <= 0:
                raise ParseError(f"denominator must be positive: {text!r}")
            if d < 0:
                raise ParseError(f"negative radicand: {text!r}")
            return QNum(p, q, r, d)
        if '/' in s:
            num, den = s.split('/')
            if int(den) == 0:
                raise ParseError(f"zero denominator: {text!r}")
            return QNum.rational(int(num), int(den))
        return QNum(int(s))
    except ValueError as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError(f"not a number: {text!r}") from e


def qnum_arith(a: QNum, b: QNum, op: str) -> QNum:
    """Dispatch on op in '+', '-', '*', '/'."""
    if op == '+':
        return a + b
    if op == '-':
        return a - b
    if op in ('*', 'x', '×'):
        return a * b
    if op in ('/', '÷'):
        return a / b
    raise ValueError(f"unknown operator {op!r}")


def qnum_cmp(a: QNum, b: QNum) -> str:
    return {-1: '<', 0: '=', 1: '>'}[a.cmp(b)]


def floor_sum(a: QNum, b: QNum) -> int:
    """floor(a + b) for finite a, b from any two fields."""
    fa, fb = a.floor(), b.floor()
    # fa + fb <= a + b < fa + fb + 2
    top = fa + fb + 1
    return top if (a - top).cmp(-b) >= 0 else top - 1


# Circular order ---------------------------------------------------------

@dataclass(frozen=True, order=True)
class CircKey:
    """
    Sort key along the circle 0 -> 1 -> inf -> -1 -> 0-.

    band 0 holds x >= 0, band 1 infinity, band 2 x < 0 and band 3 is the
    end of the circle (0 approached from the negative side).
    """
    band: int
    value: QNum = ZERO


TOP = CircKey(3)


def circ_key(x: QNum) -> CircKey:
    if x.is_infinite:
        return CircKey(1)
    if x.sign() >= 0:
        return CircKey(0, x)
    return CircKey(2, x)


def circle_coordinate(x: QNum) -> QNum:
    """
    Monotone rational chart of the circle onto [0, 2].

    x >= 0 goes to x/(1+x), infinity to 1, x < 0 to 2 + x/(1-x).
    """
    if x.is_infinite:
        return ONE
    if x.sign() >= 0:
        return x / (x + 1)
    return 2 + x / (1 - x)


def from_circle_coordinate(u: QNum) -> QNum:
    """Inverse of circle_coordinate on [0, 2)."""
    if u == ONE:
        return INF
    if u < ONE:
        return u / (1 - u)
    v = u - 2
    return v / (1 + v)


def orientation(a: QNum, b: QNum, c: QNum) -> int:
    """+1 when a, b, c are met in this cyclic order along the circle, else -1."""
    ka, kb, kc = circ_key(a), circ_key(b), circ_key(c)
    if len({ka, kb, kc}) < 3:
        return 0
    return 1 if (ka < kb < kc or kb < kc < ka or kc < ka < kb) else -1


# Quadratic forms --------------------------------------------------------

@dataclass(frozen=True)
class QuadForm:
    """Primitive f1 x^2 + f2 x + f3 with a selected root (+1 or -1)."""
    f1: int
    f2: int
    f3: int
    root_sel: int = 1

    def __post_init__(self):
        if self.f1 == 0:
            raise ValidationError("leading coefficient is zero", "QuadForm")
        if gcd(gcd(self.f1, self.f2), self.f3) != 1:
            raise ValidationError(f"form {self.f1},{self.f2},{self.f3} is not primitive", "QuadForm")
        if self.root_sel not in (1, -1):
            raise ValidationError("root_sel must be +1 or -1", "QuadForm")

    @property
    def discriminant(self) -> int:
        return self.f2 * self.f2 - 4 * self.f1 * self.f3

    def to_text(self) -> str:
        return f"[{self.f1},{self.f2},{self.f3}]{'+' if self.root_sel > 0 else '-'}"


def form_roots(f: QuadForm) -> Tuple[QNum, QNum]:
    """
    Roots of a quadratic form.

    Returns:
        (omega, omega'): omega = (-f2 + root_sel * sqrt(disc)) / (2 f1)
    """
    disc = f.discriminant
    if disc < 0:
        raise NegativeDiscriminantError(f"discriminant {disc}")
    root = isqrt(disc)
    if root * root == disc:
        raise RationalRootsError(f"discriminant {disc} is a perfect square")
    omega = QNum(-f.f2, f.root_sel, 2 * f.f1, disc)
    return omega, omega.conjugate()


def form_of(x: QNum) -> QuadForm:
    """Primitive minimal form of a quadratic irrational, f1 > 0."""
    if x.is_infinite or x.q == 0:
        raise RationalRootsError(f"{x} is rational")
    f1 = x.r * x.r
    f2 = -2 * x.p * x.r
    f3 = x.p * x.p - x.q * x.q * x.d
    g = gcd(gcd(f1, f2), f3)
    return QuadForm(f1 // g, f2 // g, f3 // g, 1 if x.q > 0 else -1)


def discriminant_of(x: QNum) -> int:
    return form_of(x).discriminant


def demo():
    """Demonstrate exact arithmetic in Q(sqrt 5)."""
    phi = TAU - 1
    print(f"tau - 1          = {phi}   {phi.to_text()}")
    print(f"(tau - 1)^2      = {phi * phi}")
    print(f"cmp(tau-1, 2/3)  = {qnum_cmp(phi, QNum.rational(2, 3))}")
    print(f"form of tau - 1  = {form_of(phi).to_text()}")


if __name__ == '__main__':
    demo()
