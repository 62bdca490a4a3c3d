"""
Exact closed subsets of the projective line

IntervalUnion is a finite union of closed circular intervals with QNum
endpoints. Internally the circle is cut at 0 and stored as sorted linear
pieces over CircKey; a piece ending at TOP reaches 0 from the negative side.

Attractor descriptors: FiniteAttractor wraps an IntervalUnion, ParabolicTail
denotes the union of P^t[base] for t >= 0 together with the fixed point of P.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple, Union

from src.errors import ValidationError
from src.exact import (
    INF, ONE, TOP, ZERO, CircKey, QNum, circ_key, circle_coordinate, floor_sum,
    from_circle_coordinate,
)
from src.modular import (
    PARABOLIC, Mat, UnimodInterval, mat_classify, mobius, unimodular_through,
)


K0 = CircKey(0, ZERO)
Piece = Tuple[CircKey, CircKey]


def key_point(k: CircKey) -> QNum:
    if k.band == 1:
        return INF
    if k.band == 3:
        return ZERO
    return k.value


def key_coordinate(k: CircKey) -> QNum:
    """Position of a key in the [0, 2] circle chart."""
    if k.band == 3:
        return QNum(2)
    return circle_coordinate(key_point(k))


def rational_between(a: QNum, b: QNum) -> QNum:
    """
    The simplest rational strictly between finite a < b.

    Walks the continued fraction expansions until they disagree.
    """
    k = a.floor()
    if QNum(k + 1) < b:
        return QNum(k + 1)
    # a - k in [0, 1) and b - k in (0, 1]; invert to (1/(b-k), 1/(a-k))
    near, far = b - k, a - k
    if far.is_zero:
        return QNum(k) + QNum(1, 0, near.inverse().floor() + 1)
    y = rational_between(near.inverse(), far.inverse())
    return QNum(k) + y.inverse()


@dataclass(frozen=True)
class Arc:
    """Closed circular interval from lo counterclockwise to hi."""
    lo: QNum
    hi: QNum
    full: bool = False

    @property
    def is_point(self) -> bool:
        return not self.full and self.lo == self.hi

    def to_json(self) -> dict:
        if self.full:
            return {"lo": "0", "hi": "0", "full": True}
        return {"lo": self.lo.to_text(), "hi": self.hi.to_text()}

    def __str__(self) -> str:
        if self.full:
            return "P1"
        if self.is_point:
            return f"{{{self.lo}}}"
        return f"[{self.lo}, {self.hi}]"


def arc_pieces(lo: QNum, hi: QNum) -> List[Piece]:
    klo, khi = circ_key(lo), circ_key(hi)
    if klo == khi:
        return [(klo, klo)]
    if klo < khi:
        return [(klo, khi)]
    return [(klo, TOP), (K0, khi)]


def piece_sample(start: CircKey, end: CircKey) -> QNum:
    """A rational point strictly inside a linear piece start < end."""
    v = rational_between(key_coordinate(start), key_coordinate(end))
    return from_circle_coordinate(v)


def arc_sample(lo: QNum, hi: QNum) -> QNum:
    """A rational point in the interior of the arc [lo, hi], lo != hi."""
    for start, end in arc_pieces(lo, hi):
        if start != end:
            return piece_sample(start, end)
    raise ValidationError(f"arc [{lo}, {hi}] has no interior", "Arc")


def _canonical(pieces: Iterable[Piece]) -> Tuple[Piece, ...]:
    pieces = list(pieces)
    if any(end == TOP for _, end in pieces):
        pieces.append((K0, K0))
    pieces.sort()
    merged: List[Piece] = []
    for start, end in pieces:
        if merged and start <= merged[-1][1]:
            if end > merged[-1][1]:
                merged[-1] = (merged[-1][0], end)
        else:
            merged.append((start, end))
    return tuple(merged)


@dataclass(frozen=True)
class IntervalUnion:
    pieces: Tuple[Piece, ...] = ()

    # -- constructors -----------------------------------------------------

    @classmethod
    def empty(cls) -> 'IntervalUnion':
        return cls(())

    @classmethod
    def full(cls) -> 'IntervalUnion':
        return cls(((K0, TOP),))

    @classmethod
    def from_pieces(cls, pieces: Iterable[Piece]) -> 'IntervalUnion':
        return cls(_canonical(pieces))

    @classmethod
    def from_arc(cls, lo: QNum, hi: QNum) -> 'IntervalUnion':
        return cls.from_pieces(arc_pieces(lo, hi))

    @classmethod
    def from_arcs(cls, arcs: Iterable[Tuple[QNum, QNum]]) -> 'IntervalUnion':
        pieces: List[Piece] = []
        for lo, hi in arcs:
            pieces.extend(arc_pieces(lo, hi))
        return cls.from_pieces(pieces)

    @classmethod
    def point(cls, x: QNum) -> 'IntervalUnion':
        return cls.from_arc(x, x)

    @classmethod
    def from_interval(cls, interval: UnimodInterval) -> 'IntervalUnion':
        return cls.from_arc(interval.lo, interval.hi)

    # -- predicates -------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def is_full(self) -> bool:
        return self.pieces == ((K0, TOP),)

    def contains(self, x: QNum) -> bool:
        k = circ_key(x)
        return any(start <= k <= end for start, end in self.pieces)

    def __contains__(self, x: QNum) -> bool:
        return self.contains(x)

    def issubset(self, other: 'IntervalUnion') -> bool:
        return self.intersection(other) == self

    # -- set algebra ------------------------------------------------------

    def union(self, other: 'IntervalUnion') -> 'IntervalUnion':
        return IntervalUnion.from_pieces(self.pieces + other.pieces)

    __or__ = union

    def intersection(self, other: 'IntervalUnion') -> 'IntervalUnion':
        out: List[Piece] = []
        for s1, e1 in self.pieces:
            for s2, e2 in other.pieces:
                s, e = max(s1, s2), min(e1, e2)
                if s <= e:
                    out.append((s, e))
        return IntervalUnion.from_pieces(out)

    __and__ = intersection

    def difference(self, other: 'IntervalUnion') -> 'IntervalUnion':
        """Closure of self minus other."""
        current: List[Piece] = list(self.pieces)
        for s2, e2 in other.pieces:
            if s2 == e2:
                continue
            nxt: List[Piece] = []
            for s1, e1 in current:
                if e1 <= s2 or s1 >= e2:
                    nxt.append((s1, e1))
                    continue
                if s1 <= s2:
                    nxt.append((s1, s2))
                if e2 <= e1:
                    nxt.append((e2, e1))
            current = nxt
        kept = [(s, e) for s, e in current
                if s != e or not other.contains(key_point(s))]
        return IntervalUnion.from_pieces(kept)

    __sub__ = difference

    def complement(self) -> 'IntervalUnion':
        return IntervalUnion.full().difference(self)

    def image(self, m: Mat) -> 'IntervalUnion':
        """Exact image under the projective action of m."""
        if self.is_full:
            return self
        arcs = []
        for arc in self.components():
            a, b = mobius(m, arc.lo), mobius(m, arc.hi)
            arcs.append((a, b) if m.det == 1 else (b, a))
        return IntervalUnion.from_arcs(arcs)

    # -- inspection -------------------------------------------------------

    def components(self) -> List[Arc]:
        """Maximal arcs, with the pieces around 0 glued back together."""
        if not self.pieces:
            return []
        if self.is_full:
            return [Arc(ZERO, ZERO, full=True)]
        pieces = list(self.pieces)
        wrap_head: Optional[Piece] = None
        if pieces[-1][1] == TOP and pieces[0][0] == K0 and len(pieces) > 1:
            wrap_head = pieces.pop(0)
            last = pieces.pop()
            pieces.append((last[0], wrap_head[1]))
        arcs = []
        for start, end in pieces:
            arcs.append(Arc(key_point(start), key_point(end)))
        return arcs

    def endpoints(self) -> List[QNum]:
        out: List[QNum] = []
        for arc in self.components():
            if arc.full:
                continue
            for x in (arc.lo, arc.hi):
                if x not in out:
                    out.append(x)
        return out

    def interior_points(self) -> List[QNum]:
        """One rational interior point per nondegenerate piece."""
        return [piece_sample(s, e) for s, e in self.pieces if s != e]

    def isolated_points(self) -> List[QNum]:
        return [arc.lo for arc in self.components() if arc.is_point]

    def spread(self) -> QNum:
        """Total length of the pieces in the [0, 2] circle chart."""
        total = ZERO
        for s, e in self.pieces:
            total = total + (key_coordinate(e) - key_coordinate(s))
        return total

    def widest_piece(self) -> QNum:
        best = ZERO
        for s, e in self.pieces:
            width = key_coordinate(e) - key_coordinate(s)
            if width > best:
                best = width
        return best

    def to_json(self) -> List[dict]:
        return [arc.to_json() for arc in self.components()]

    def __str__(self) -> str:
        if not self.pieces:
            return "{}"
        return " u ".join(str(arc) for arc in self.components())


def gap_bound(a: IntervalUnion, b: IntervalUnion) -> QNum:
    """Chart-length bound on the Hausdorff distance between nested unions."""
    return max((a - b).widest_piece(), (b - a).widest_piece())


# Attractor descriptors ----------------------------------------------------

@dataclass(frozen=True)
class FiniteAttractor:
    union: IntervalUnion

    exact = True

    def contains(self, x: QNum) -> bool:
        return self.union.contains(x)

    def expand(self, depth: int = 0) -> IntervalUnion:
        return self.union

    def hull(self) -> IntervalUnion:
        return self.union

    def image(self, m: Mat) -> 'FiniteAttractor':
        return FiniteAttractor(self.union.image(m))

    def to_json(self) -> List[dict]:
        return self.union.to_json()

    def __str__(self) -> str:
        return str(self.union)


@dataclass(frozen=True)
class ParabolicTail:
    """
    Union of P^t[base], t >= 0, plus the fixed point `limit` of P.

    Membership is decided exactly: conjugating P by C with C(inf) = limit
    gives the translation z -> z + k, so the iterate count reaching the base
    is found by a floor computation instead of by iteration.
    """
    P: Mat
    base: IntervalUnion
    limit: QNum
    label: Optional[str] = None

    exact = True

    def __post_init__(self):
        if mat_classify(self.P) != PARABOLIC:
            raise ValidationError(f"tail map {self.P} is not parabolic", "ParabolicTail")
        if mobius(self.P, self.limit) != self.limit:
            raise ValidationError(f"{self.P} does not fix {self.limit}", "ParabolicTail")
        if self.base.contains(self.limit):
            raise ValidationError(f"tail base contains its limit {self.limit}", "ParabolicTail")

    def _translation(self) -> Tuple[Mat, int]:
        conj = unimodular_through(self.limit)
        t = conj.inverse() @ self.P @ conj
        return conj, t.b

    def iterate_index(self, x: QNum) -> Optional[int]:
        """Smallest t >= 0 with P^-t(x) in base, or None."""
        if x == self.limit:
            return None
        conj, k = self._translation()
        z = mobius(conj.inverse(), x)
        best: Optional[int] = None
        for arc in self.base.image(conj.inverse()).components():
            alpha, beta = arc.lo, arc.hi
            # z and the base endpoints may lie in different fields
            if k > 0:
                t0 = max(0, -floor_sum(beta / k, -z / k))
                ok = (z - k * t0) >= alpha
            else:
                kk = -k
                t0 = max(0, -floor_sum(z / kk, -alpha / kk))
                ok = (z + kk * t0) <= beta
            if ok and (best is None or t0 < best):
                best = t0
        return best

    def contains(self, x: QNum) -> bool:
        if x == self.limit:
            return True
        return self.iterate_index(x) is not None

    def hull(self) -> IntervalUnion:
        """The arc from the far end of the base to the limit; covers every iterate."""
        conj, k = self._translation()
        arcs = self.base.image(conj.inverse()).components()
        if k > 0:
            window = IntervalUnion.from_arc(min(arc.lo for arc in arcs), INF)
        else:
            window = IntervalUnion.from_arc(INF, max(arc.hi for arc in arcs))
        return window.image(conj)

    def expand(self, depth: int) -> IntervalUnion:
        out = IntervalUnion.point(self.limit)
        layer = self.base
        for _ in range(depth):
            out = out.union(layer)
            layer = layer.image(self.P)
        return out

    def image(self, m: Mat) -> 'ParabolicTail':
        return ParabolicTail(m @ self.P @ m.inverse(), self.base.image(m),
                             mobius(m, self.limit), self.label)

    def to_json(self) -> List[dict]:
        return [{"tail": {"P_label": self.label, "P": self.P.to_rows(),
                          "base": self.base.to_json(), "limit": self.limit.to_text()}}]

    def __str__(self) -> str:
        return f"tail({self.P}, {self.base}, -> {self.limit})"


Desc = Union[FiniteAttractor, ParabolicTail]


def union_algebra(op: str, a: IntervalUnion, b: Optional[IntervalUnion] = None,
                  m: Optional[Mat] = None) -> IntervalUnion:
    """Dispatch for union, intersection, difference, complement and image."""
    if op == 'union':
        return a.union(b)
    if op == 'intersection':
        return a.intersection(b)
    if op == 'difference':
        return a.difference(b)
    if op == 'complement':
        return a.complement()
    if op == 'image':
        return a.image(m)
    raise ValueError(f"unknown interval operation {op!r}")


def demo():
    """Glue two abutting intervals and map an arc through infinity."""
    from src.modular import L
    a = IntervalUnion.from_arc(QNum(-3), QNum(-5, 0, 2))
    b = IntervalUnion.from_arc(QNum(-5, 0, 2), QNum(-2))
    print(f"[-3,-5/2] u [-5/2,-2] = {a | b}")
    print(f"L^-1 [inf, 0]         = {IntervalUnion.from_arc(INF, ZERO).image(L.inverse())}")
    print(f"complement of [0, 1]  = {IntervalUnion.from_arc(ZERO, ONE).complement()}")


if __name__ == '__main__':
    demo()
