"""
Affine twin and the Minkowski question mark function

Words act on [0, 1] by dyadic affine maps l -> x/2, n -> x/2 + 1/2,
f -> 1 - x. The question mark function reads the LR expansion of a point as
a binary expansion; it conjugates each branch B_a of a continued fraction to
its affine twin C_a = I'_i aff(sigma) I'_j^-1, where I'_i translates by the
node's affine offset.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from src.cfspec import CFSpec, g_matrix
from src.errors import OutOfRangeError
from src.exact import ONE, ZERO, QNum
from src.intervals import Desc
from src.modular import L, UnimodInterval, mobius
from src.transducer import lr_expand
from src.words import Word


logger = logging.getLogger(__name__)

MAX_BITS = 64


@dataclass(frozen=True)
class Dyadic:
    """num / 2^exp with num odd unless exp is 0."""
    num: int
    exp: int = 0

    def __post_init__(self):
        if self.exp < 0:
            raise OutOfRangeError(f"negative exponent {self.exp}")
        num, exp = self.num, self.exp
        while exp and num % 2 == 0:
            num //= 2
            exp -= 1
        object.__setattr__(self, 'num', num)
        object.__setattr__(self, 'exp', exp)

    @classmethod
    def from_fraction(cls, value: Fraction) -> 'Dyadic':
        value = Fraction(value)
        den = value.denominator
        exp = den.bit_length() - 1
        if den != 1 << exp:
            raise OutOfRangeError(f"{value} is not dyadic")
        return cls(value.numerator, exp)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def _align(self, other: 'Dyadic') -> Tuple[int, int, int]:
        exp = max(self.exp, other.exp)
        return self.num << (exp - self.exp), other.num << (exp - other.exp), exp

    def __add__(self, other: 'Dyadic') -> 'Dyadic':
        a, b, exp = self._align(other)
        return Dyadic(a + b, exp)

    def __neg__(self) -> 'Dyadic':
        return Dyadic(-self.num, self.exp)

    def __sub__(self, other: 'Dyadic') -> 'Dyadic':
        return self + (-other)

    def __mul__(self, other: 'Dyadic') -> 'Dyadic':
        return Dyadic(self.num * other.num, self.exp + other.exp)

    def __lt__(self, other: 'Dyadic') -> bool:
        return self.to_fraction() < other.to_fraction()

    def __le__(self, other: 'Dyadic') -> bool:
        return self.to_fraction() <= other.to_fraction()

    def __gt__(self, other: 'Dyadic') -> bool:
        return self.to_fraction() > other.to_fraction()

    def __ge__(self, other: 'Dyadic') -> bool:
        return self.to_fraction() >= other.to_fraction()

    def __str__(self) -> str:
        return str(self.num) if not self.exp else f"{self.num}/2^{self.exp}"


HALF = Dyadic(1, 1)
D_ZERO = Dyadic(0)
D_ONE = Dyadic(1)


@dataclass(frozen=True)
class AffMap:
    """x -> scale * x + offset."""
    scale: Dyadic
    offset: Dyadic = D_ZERO

    def __call__(self, x: Dyadic) -> Dyadic:
        return self.scale * x + self.offset

    def __matmul__(self, other: 'AffMap') -> 'AffMap':
        return AffMap(self.scale * other.scale, self.scale * other.offset + self.offset)

    def inverse(self) -> 'AffMap':
        s = self.scale
        if abs(s.num) != 1:
            raise OutOfRangeError(f"scale {s} is not a signed power of 2")
        inv = Dyadic(s.num * (1 << s.exp))
        return AffMap(inv, -(inv * self.offset))

    def __str__(self) -> str:
        return f"x -> {self.scale} x + {self.offset}"


AFF_IDENTITY = AffMap(D_ONE)
AFF_L = AffMap(HALF)
AFF_N = AffMap(HALF, HALF)
AFF_F = AffMap(Dyadic(-1), D_ONE)


def aff(w: Word) -> AffMap:
    """Affine twin of a word, composed in word order."""
    out = AFF_IDENTITY
    for ch in w.body:
        out = out @ (AFF_L if ch == 'l' else AFF_N)
    if w.flip:
        out = out @ AFF_F
    return out


def translation(offset: int) -> AffMap:
    return AffMap(D_ONE, Dyadic(offset))


def twin_map(spec: CFSpec, label: str) -> AffMap:
    """C_a = I'_i aff(sigma) I'_j^-1."""
    a = spec.code.arrow(label)
    return translation(spec.offset(a.source)) @ aff(a.word) @ translation(spec.offset(a.target)).inverse()


# Question mark -------------------------------------------------------------

_UNIT = UnimodInterval(L)


def _binary(letters: str) -> Dyadic:
    value = 0
    for ch in letters:
        value = 2 * value + (1 if ch == 'n' else 0)
    return Dyadic(value, len(letters))


def qmark(x: QNum) -> Dyadic:
    """
    Exact ?(x) for rational x in [0, 1].

    Raises:
        OutOfRangeError: if x is irrational or outside [0, 1]
    """
    if x.is_infinite or not x.is_rational or x < ZERO or x > ONE:
        raise OutOfRangeError(f"question mark needs a rational in [0, 1], got {x}")
    z = lr_expand(x, _UNIT)[0]
    value = _binary(z.preperiod)
    if z.period == 'n':
        value = value + Dyadic(1, len(z.preperiod))
    return value


def qmark_approx(x: QNum, bits: int = 20) -> Tuple[Dyadic, Dyadic]:
    """
    Dyadic bracket of width 2^-bits around ?(x), x in [0, 1].

    Raises:
        OutOfRangeError: if x is outside [0, 1] or bits is not in 1..64
    """
    if not 1 <= bits <= MAX_BITS:
        raise OutOfRangeError(f"bits must be in 1..{MAX_BITS}, got {bits}")
    if x.is_infinite or x < ZERO or x > ONE:
        raise OutOfRangeError(f"{x} is outside [0, 1]")
    if x.is_rational:
        value = qmark(x)
        return value, value
    z = lr_expand(x, _UNIT)[0]
    letters = ''.join(z.letter(t) for t in range(bits))
    lower = _binary(letters)
    return lower, lower + Dyadic(1, bits)


def chart(spec: CFSpec, node: int, x: QNum) -> QNum:
    """L I_i^-1: the node interval onto [0, 1]."""
    return mobius(L @ spec.intervals[node].mat.inverse(), x)


def minkowski_copy(spec: CFSpec, node: int, x: QNum) -> Dyadic:
    """M_i(x) = I'_i ?(L I_i^-1 x), exact on rationals."""
    return translation(spec.offset(node))(qmark(chart(spec, node, x)))


def minkowski_bracket(spec: CFSpec, node: int, x: QNum, bits: int = 20) -> Tuple[Dyadic, Dyadic]:
    lo, hi = qmark_approx(chart(spec, node, x), bits)
    t = translation(spec.offset(node))
    return t(lo), t(hi)


def farey_points(bound: int) -> List[QNum]:
    """Rationals of [0, 1] with denominator at most bound, increasing."""
    pts = {Fraction(p, q) for q in range(1, bound + 1) for p in range(q + 1)}
    return [QNum(f.numerator, 0, f.denominator) for f in sorted(pts)]


@dataclass
class ConjugacyReport:
    name: str
    checked: int = 0
    mismatches: List[Tuple[str, str, str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {"name": self.name, "checked": self.checked, "ok": self.ok,
                "mismatches": [{"arrow": a, "x": x, "lhs": lhs, "rhs": rhs}
                               for a, x, lhs, rhs in self.mismatches]}


def conjugacy_check(spec: CFSpec, bound: int = 30) -> ConjugacyReport:
    """
    Check M_i(B_a x) = C_a(M_j(x)) for every arrow a = i sigma j and every
    point x of I_j whose [0, 1] chart coordinate has denominator <= bound.
    """
    report = ConjugacyReport(spec.name)
    for a in spec.code.arrows:
        c = twin_map(spec, a.label)
        to_node = (L @ spec.intervals[a.target].mat.inverse()).inverse()
        for u in farey_points(bound):
            x = mobius(to_node, u)
            lhs = minkowski_copy(spec, a.source, mobius(spec.branch[a.label], x))
            rhs = c(minkowski_copy(spec, a.target, x))
            report.checked += 1
            if lhs != rhs:
                report.mismatches.append((a.label, x.to_text(), str(lhs), str(rhs)))
    logger.info("%s: %d conjugacy checks, %d mismatches", spec.name, report.checked, len(report.mismatches))
    return report


def affine_lengths(spec: CFSpec, H: Optional[Sequence[Desc]] = None,
                   bits: int = 20) -> List[Tuple[Dyadic, Dyadic]]:
    """Brackets of the Lebesgue measures of the affine attractor components M_i(H_i)."""
    H = spec.H if H is None else H
    out = []
    for node, desc in enumerate(H):
        lower, upper = D_ZERO, D_ZERO
        for arc in desc.expand(0).components():
            if arc.is_point:
                continue
            lo_lo, lo_hi = minkowski_bracket(spec, node, arc.lo, bits)
            hi_lo, hi_hi = minkowski_bracket(spec, node, arc.hi, bits)
            lower = lower + (hi_lo - lo_hi)
            upper = upper + (hi_hi - lo_lo)
        out.append((lower, upper))
    return out


def measure_identity_holds(spec: CFSpec, lengths: Sequence[Tuple[Dyadic, Dyadic]]) -> bool:
    """Bracket test of sum_j G[i][j] len_j = len_i for every node."""
    g = g_matrix(spec.code)
    for i, (lo_i, hi_i) in enumerate(lengths):
        lo = sum((g[i][j] * lengths[j][0].to_fraction() for j in range(len(lengths))), Fraction(0))
        hi = sum((g[i][j] * lengths[j][1].to_fraction() for j in range(len(lengths))), Fraction(0))
        if hi < lo_i.to_fraction() or lo > hi_i.to_fraction():
            return False
    return True


def demo():
    """?(tau - 1) and the affine twin of 1nf0."""
    from src.exact import TAU
    from src.utils import load_preset
    lo, hi = qmark_approx(TAU - 1, 20)
    print(f"?(tau - 1) in [{float(lo.to_fraction()):.8f}, {float(hi.to_fraction()):.8f}]")
    spec = load_preset("tau-minus-one")
    print(f"C_s: {twin_map(spec, 's')}")


if __name__ == '__main__':
    demo()
