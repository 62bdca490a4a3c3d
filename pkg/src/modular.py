"""
Extended modular group

Integer 2x2 matrices of determinant +1 or -1 taken up to sign, their
projective action on QNum, the representation of words (l -> L, n -> N,
f -> F), unimodular intervals and branch/dual matrices of arrows.
"""

from dataclasses import dataclass
from math import gcd, isqrt
from typing import List, Sequence, Tuple

from src.errors import IdentityMatrixError, ValidationError
from src.exact import INF, QNum, parse_qnum
from src.words import Arrow, Word, sharp


IDENTITY_KIND = "Identity"
PARABOLIC = "Parabolic"
ELLIPTIC = "Elliptic"
HYPERBOLIC = "Hyperbolic"
REFLECTIONLIKE = "Reflectionlike"


@dataclass(frozen=True)
class Mat:
    """[[a, b], [c, d]] up to global sign; first nonzero of a, b, c is positive."""
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        det = a * d - b * c
        if det not in (1, -1):
            raise ValidationError(f"determinant {det} is not +-1 for [[{a},{b}],[{c},{d}]]", "Mat")
        lead = a or b or c
        if lead < 0:
            object.__setattr__(self, 'a', -a)
            object.__setattr__(self, 'b', -b)
            object.__setattr__(self, 'c', -c)
            object.__setattr__(self, 'd', -d)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> 'Mat':
        try:
            (a, b), (c, d) = rows
            return cls(int(a), int(b), int(c), int(d))
        except (TypeError, ValueError) as e:
            if isinstance(e, ValidationError):
                raise
            raise ValidationError(f"matrix must be [[a,b],[c,d]] of integers: {rows!r}", "Mat") from e

    def to_rows(self) -> List[List[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def is_identity(self) -> bool:
        return self == IDENTITY

    def __matmul__(self, other: 'Mat') -> 'Mat':
        return Mat(self.a * other.a + self.b * other.c,
                   self.a * other.b + self.b * other.d,
                   self.c * other.a + self.d * other.c,
                   self.c * other.b + self.d * other.d)

    def inverse(self) -> 'Mat':
        # adjugate; the determinant is a sign and signs are dropped
        return Mat(self.d, -self.b, -self.c, self.a)

    def transpose(self) -> 'Mat':
        return Mat(self.a, self.c, self.b, self.d)

    def power(self, k: int) -> 'Mat':
        base = self if k >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(k)):
            out = out @ base
        return out

    def __call__(self, x: QNum) -> QNum:
        return mobius(self, x)

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


IDENTITY = Mat(1, 0, 0, 1)
L = Mat(1, 0, 1, 1)
N = Mat(1, 1, 0, 1)
F = Mat(0, 1, 1, 0)
S = Mat(0, -1, 1, 0)

_LETTER = {'l': L, 'n': N}


def mobius(m: Mat, x: QNum) -> QNum:
    """Projective action x -> (a x + b) / (c x + d), exact."""
    if x.is_infinite:
        return QNum(m.a, 0, m.c) if m.c else INF
    p, q, r, d = x.p, x.q, x.r, x.d
    num_p, num_q = m.a * p + m.b * r, m.a * q
    den_p, den_q = m.c * p + m.d * r, m.c * q
    if den_p == 0 and den_q == 0:
        return INF
    norm = den_p * den_p - den_q * den_q * d
    return QNum(num_p * den_p - num_q * den_q * d,
                num_q * den_p - num_p * den_q,
                norm, d)


def proj(w: Word) -> Mat:
    out = IDENTITY
    for ch in w.body:
        out = out @ _LETTER[ch]
    if w.flip:
        out = out @ F
    return out


def mat_classify(m: Mat) -> str:
    if m.det == -1:
        return REFLECTIONLIKE
    if m.is_identity:
        return IDENTITY_KIND
    t = abs(m.trace)
    if t == 2:
        return PARABOLIC
    return HYPERBOLIC if t > 2 else ELLIPTIC


@dataclass(frozen=True)
class FixedPoint:
    value: QNum
    kind: str   # attracting, repelling, parabolic, neutral


def fixed_points(m: Mat) -> List[FixedPoint]:
    """
    Fixed points of a non-identity matrix, tagged by the derivative.

    Solves c x^2 + (d - a) x - b = 0; the derivative at a finite fixed point
    is det / (c x + d)^2.

    Raises:
        IdentityMatrixError: for the identity
    """
    if m.is_identity:
        raise IdentityMatrixError("the identity fixes every point")
    a, b, c, d = m.a, m.b, m.c, m.d
    if c == 0:
        if a == d:
            return [FixedPoint(INF, "parabolic")]
        points = [FixedPoint(INF, _tag_at_infinity(a, d))]
        x = QNum(b, 0, d - a)
        points.append(FixedPoint(x, _tag(m, x)))
        return points
    disc = (a - d) ** 2 + 4 * b * c
    if disc < 0:
        return []
    if disc == 0:
        return [FixedPoint(QNum(a - d, 0, 2 * c), "parabolic")]
    root = isqrt(disc)
    if root * root == disc:
        roots = [QNum(a - d + root, 0, 2 * c), QNum(a - d - root, 0, 2 * c)]
    else:
        roots = [QNum(a - d, 1, 2 * c, disc), QNum(a - d, -1, 2 * c, disc)]
    return [FixedPoint(x, _tag(m, x)) for x in roots]


def _tag(m: Mat, x: QNum) -> str:
    slope = m.c * x + m.d
    cmp = (slope * slope).cmp(1)
    if cmp > 0:
        return "attracting"
    if cmp < 0:
        return "repelling"
    return "neutral"


def _tag_at_infinity(a: int, d: int) -> str:
    if abs(a) > abs(d):
        return "attracting"
    if abs(a) < abs(d):
        return "repelling"
    return "neutral"


def fixed_point_values(m: Mat) -> List[QNum]:
    return [fp.value for fp in fixed_points(m)]


def attracting_fixed_point(m: Mat) -> QNum:
    for fp in fixed_points(m):
        if fp.kind in ("attracting", "parabolic"):
            return fp.value
    raise ValidationError(f"{m} has no attracting fixed point", "Mat")


# Unimodular intervals ----------------------------------------------------

@dataclass(frozen=True)
class UnimodInterval:
    """
    Image of [0, inf] under a determinant +1 matrix.

    Columns [[p', p], [q', q]] denote the circular interval [p/q, p'/q'].
    """
    mat: Mat

    def __post_init__(self):
        if self.mat.det != 1:
            raise ValidationError(f"interval matrix {self.mat} must have determinant +1", "UnimodInterval")

    @classmethod
    def from_endpoints(cls, lo: QNum, hi: QNum) -> 'UnimodInterval':
        p, q = _as_pair(lo)
        p1, q1 = _as_pair(hi)
        det = p1 * q - p * q1
        if det == 1:
            return cls(Mat(p1, p, q1, q))
        if det == -1:
            return cls(Mat(-p1, p, -q1, q))
        raise ValidationError(f"[{lo}, {hi}] is not a unimodular interval (determinant {det})",
                              "UnimodInterval")

    @property
    def lo(self) -> QNum:
        return mobius(self.mat, QNum(0))

    @property
    def hi(self) -> QNum:
        return mobius(self.mat, INF)

    def contains(self, x: QNum) -> bool:
        y = mobius(self.mat.inverse(), x)
        return y.is_infinite or y.sign() >= 0

    def complement(self) -> 'UnimodInterval':
        return UnimodInterval(self.mat @ S)

    def to_json(self) -> dict:
        return {"matrix": self.mat.to_rows()}

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def _as_pair(x: QNum) -> Tuple[int, int]:
    if x.is_infinite:
        return 1, 0
    if not x.is_rational:
        raise ValidationError(f"interval endpoint {x} must be rational", "UnimodInterval")
    return x.p, x.r


def parse_interval(obj: dict, location: str = "interval") -> UnimodInterval:
    if not isinstance(obj, dict):
        raise ValidationError("expected an object with 'matrix' or 'endpoints'", location)
    if "matrix" in obj:
        mat = Mat.from_rows(obj["matrix"])
        if mat.det != 1:
            raise ValidationError(f"matrix {mat} has determinant {mat.det}, expected +1", location)
        return UnimodInterval(mat)
    if "endpoints" in obj:
        lo, hi = (parse_qnum(t) for t in obj["endpoints"])
        return UnimodInterval.from_endpoints(lo, hi)
    raise ValidationError("expected 'matrix' or 'endpoints'", location)


def interval_member(x: QNum, interval: UnimodInterval) -> bool:
    return interval.contains(x)


def branch_matrix(a: Arrow, intervals: Sequence[UnimodInterval]) -> Mat:
    """B_a = I_i proj(sigma) I_j^-1, mapping I_j into I_i."""
    return intervals[a.source].mat @ proj(a.word) @ intervals[a.target].mat.inverse()


def dual_matrix(a: Arrow, intervals: Sequence[UnimodInterval]) -> Mat:
    """D_a = (I_j S) proj(sigma#) (I_i S)^-1, which equals B_a^-1."""
    source_c = intervals[a.source].mat @ S
    target_c = intervals[a.target].mat @ S
    return target_c @ proj(sharp(a.word)) @ source_c.inverse()


def gcd_pair(x: int, y: int) -> Tuple[int, int, int]:
    """Extended Euclid: (g, u, v) with u x + v y = g."""
    if y == 0:
        return (abs(x), 1 if x >= 0 else -1, 0)
    g, u, v = gcd_pair(y, x % y)
    return g, v, u - (x // y) * v


def unimodular_through(x: QNum) -> Mat:
    """A determinant +1 matrix C with C(inf) = x, x rational or infinite."""
    if x.is_infinite:
        return IDENTITY
    p, q = x.p, x.r
    g, u, v = gcd_pair(p, q)
    # u p + v q = 1  =>  [[p, -v], [q, u]] has determinant 1
    assert g == 1 and gcd(p, q) == 1
    return Mat(p, -v, q, u)


def demo():
    """Print the generators and a branch matrix."""
    print(f"L = {L}, N = {N}, F = {F}, S = {S}")
    i0 = UnimodInterval.from_endpoints(QNum(-1), QNum(0))
    i1 = UnimodInterval(L)
    from src.words import parse_arrow
    arrow = parse_arrow("1:nf:0")
    print(f"B_1nf0 = {branch_matrix(arrow, [i0, i1])}")


if __name__ == '__main__':
    demo()
