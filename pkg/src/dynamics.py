"""
Gauss-type maps of a realized continued fraction

A realization glues the attractor components H_i (base side) and K_i (dual
side) into one projective line. F sends (i, x) to every (j, B_a^-1 x) with
B_a^-1 x in H_j; the dual map F# sends (j, x) to every (i, B_a x) with B_a x
in K_i. Orbits of quadratic irrationals are finite, so they are explored
exhaustively; sweeps over discriminants check the Galois-type criteria
purely periodic <=> conjugate in K (slow) or in R (jump).
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from math import gcd, isqrt
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from src.attractor import (
    BASE, DUAL, GDIFS, REFUTED, compute_R, parabolic_arrows, telescope_verify,
    verify_fixed_point,
)
from src.cfspec import CFSpec
from src.errors import (
    BadDiscriminantError, ChainBrokenError, InvariantViolation, NoReturnError,
    NotInAttractorError, RationalPointError, StepBudgetExceededError, ValidationError,
    WitnessNotParabolicError,
)
from src.exact import QNum, QuadForm, discriminant_of, floor_sum
from src.intervals import Desc, IntervalUnion, piece_sample
from src.modular import Mat, attracting_fixed_point, mobius


logger = logging.getLogger(__name__)

SLOW = "slow"
JUMP = "jump"

OK = "OK"
FAIL = "Fail"

GEOMETRIC = "Geometric"
BASE_ONLY = "BaseOnly"
NEITHER = "Neither"

DEFAULT_BUDGET = 10000


@dataclass(frozen=True)
class Realization:
    spec: CFSpec
    H: Tuple[Desc, ...]
    K: Tuple[Desc, ...]
    R: Optional[Tuple[IntervalUnion, ...]]
    P: Tuple[Optional[str], ...]

    @property
    def J(self) -> Tuple[str, ...]:
        return tuple(a.label for a in self.spec.code.arrows if a.label not in self.P)


def build_realization(spec: CFSpec, verify: bool = True) -> Realization:
    """
    Bundle verified attractors with the parabolic sets and R.

    Raises:
        ValidationError: if candidates are missing or refuted, or J is empty
    """
    if spec.H is None or spec.K is None:
        raise ValidationError("realization needs H and K candidates", "attractors")
    if verify:
        for side, desc in ((BASE, spec.H), (DUAL, spec.K)):
            verdict = verify_fixed_point(GDIFS(spec, side), desc)
            if not verdict.verified:
                raise ValidationError(f"{side} candidate is {verdict.status}", f"attractors.{'H' if side == BASE else 'K'}")
    P = parabolic_arrows(spec)
    if all(a.label in P for a in spec.code.arrows):
        raise ValidationError("every arrow is parabolic; J is empty", "code")
    try:
        computed = compute_R(spec, spec.K, P)
    except (ChainBrokenError, WitnessNotParabolicError) as e:
        logger.info("%s: R not computed (%s)", spec.name, e)
        computed = None
    R = spec.R if spec.R is not None else computed
    if spec.R is not None and verify:
        if computed is not None:
            if tuple(spec.R) != computed:
                given = ", ".join(str(u) for u in spec.R)
                found = ", ".join(str(u) for u in computed)
                raise ValidationError(f"R is ({given}) but K gives ({found})", "attractors.R")
        elif telescope_verify(GDIFS(spec, DUAL), spec.R, P).status == REFUTED:
            raise ValidationError("R does not telescope onto K", "attractors.R")
    return Realization(spec, spec.H, spec.K, R, P)


@dataclass(frozen=True)
class OrbitState:
    node: int
    x: QNum

    @property
    def form(self) -> QuadForm:
        from src.exact import form_of
        return form_of(self.x)

    def to_json(self) -> dict:
        return {"node": self.node, "x": self.x.to_text()}

    def __str__(self) -> str:
        return f"({self.node}, {self.x})"


def _state_key(s: OrbitState):
    return (s.node, float(s.x) if not s.x.is_infinite else float('inf'), s.x.to_text())


Move = Tuple[Tuple[str, ...], OrbitState]


# One-step maps -------------------------------------------------------------

def _base_moves(spec: CFSpec, H: Sequence[Desc], s: OrbitState) -> List[Move]:
    out = []
    for a in spec.code.arrows_from(s.node):
        y = mobius(spec.branch[a.label].inverse(), s.x)
        if H[a.target].contains(y):
            out.append(((a.label,), OrbitState(a.target, y)))
    return out


def _dual_moves(spec: CFSpec, K: Sequence[Desc], s: OrbitState) -> List[Move]:
    out = []
    for a in spec.code.arrows_into(s.node):
        y = mobius(spec.branch[a.label], s.x)
        if K[a.source].contains(y):
            out.append(((a.label,), OrbitState(a.source, y)))
    return out


def step_F(r: Realization, s: OrbitState) -> List[OrbitState]:
    """
    Raises:
        NotInAttractorError: if x is outside H_node
    """
    if not r.H[s.node].contains(s.x):
        raise NotInAttractorError(f"{s.x} is not in H_{s.node}")
    return sorted({st for _, st in _base_moves(r.spec, r.H, s)}, key=_state_key)


def step_Fdual(r: Realization, s: OrbitState) -> List[OrbitState]:
    """
    Raises:
        NotInAttractorError: if x is outside K_node
    """
    if not r.K[s.node].contains(s.x):
        raise NotInAttractorError(f"{s.x} is not in K_{s.node}")
    return sorted({st for _, st in _dual_moves(r.spec, r.K, s)}, key=_state_key)


def _jump_moves(r: Realization, s: OrbitState, budget: int = DEFAULT_BUDGET) -> List[Move]:
    if s.x.is_infinite or s.x.is_rational:
        raise RationalPointError(f"jump transformation is undefined at rational {s.x}")
    out: List[Move] = []
    todo: List[Move] = [((), s)]
    spent = 0
    while todo:
        block, st = todo.pop()
        for (label,), nxt in _base_moves(r.spec, r.H, st):
            if label == r.P[st.node]:
                spent += 1
                if spent > budget:
                    raise StepBudgetExceededError(f"parabolic run from {s} exceeds {budget} steps")
                todo.append((block + (label,), nxt))
            else:
                out.append((block + (label,), nxt))
    return out


def jump_step(r: Realization, s: OrbitState) -> List[OrbitState]:
    """
    Apply the parabolic branch of the node while it acts, then one branch in J.

    Raises:
        NotInAttractorError, RationalPointError, StepBudgetExceededError
    """
    if not r.H[s.node].contains(s.x):
        raise NotInAttractorError(f"{s.x} is not in H_{s.node}")
    return sorted({st for _, st in _jump_moves(r, s)}, key=_state_key)


def _first_return_moves(r: Realization, s: OrbitState, budget: int = DEFAULT_BUDGET) -> List[Move]:
    if r.R is None:
        raise ValidationError("first return needs R", "attractors.R")
    returned: List[Move] = []
    frontier: List[Move] = [((), s)]
    steps = 0
    while frontier:
        steps += 1
        if steps > budget:
            raise NoReturnError(f"{s} does not return to R within {budget} steps")
        nxt_frontier: List[Move] = []
        for block, st in frontier:
            for (label,), nxt in _dual_moves(r.spec, r.K, st):
                if r.R[nxt.node].contains(nxt.x):
                    returned.append((block + (label,), nxt))
                else:
                    nxt_frontier.append((block + (label,), nxt))
        frontier = nxt_frontier
    if not returned:
        raise NoReturnError(f"every dual branch of {s} dies before returning to R")
    return returned


def first_return(r: Realization, s: OrbitState) -> Tuple[OrbitState, ...]:
    """
    First return of the dual map to R.

    Returns:
        The node-states reached at the first return; they share one value

    Raises:
        NotInAttractorError: if x is outside R_node
        InvariantViolation: if branches return to distinct values
    """
    if r.R is None or not r.R[s.node].contains(s.x):
        raise NotInAttractorError(f"{s.x} is not in R_{s.node}")
    states = sorted({st for _, st in _first_return_moves(r, s)}, key=_state_key)
    if len({st.x for st in states}) != 1:
        raise InvariantViolation(f"first return of {s} is not single-valued: {[str(v) for v in states]}")
    return tuple(states)


# Orbits ----------------------------------------------------------------------

@dataclass
class PeriodReport:
    start: OrbitState
    purely_periodic: bool
    period: List[str] = field(default_factory=list)
    blocks: List[Tuple[str, ...]] = field(default_factory=list)
    cycle: List[OrbitState] = field(default_factory=list)
    preperiod: Optional[int] = None
    multivalued_points: int = 0
    states: List[OrbitState] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "start": self.start.to_json(),
            "purely_periodic": self.purely_periodic,
            "period": self.period,
            "blocks": ["".join(b) for b in self.blocks],
            "preperiod": self.preperiod,
            "multivalued_points": self.multivalued_points,
            "cycle": [s.to_json() for s in self.cycle],
            "states": len(self.states),
        }


def _mover(r: Realization, mode: str, side: str = BASE) -> Callable[[OrbitState], List[Move]]:
    if side == BASE:
        if mode == SLOW:
            return lambda s: _base_moves(r.spec, r.H, s)
        if mode == JUMP:
            return lambda s: _jump_moves(r, s)
    else:
        if mode == SLOW:
            return lambda s: _dual_moves(r.spec, r.K, s)
        if mode == JUMP:
            return lambda s: _first_return_moves(r, s)
    raise ValidationError(f"unknown map {mode!r}", "mode")


def explore(moves: Callable[[OrbitState], List[Move]], start: OrbitState,
            max_steps: int = DEFAULT_BUDGET) -> PeriodReport:
    """Breadth-first exploration of a multivalued orbit with memoized states."""
    graph: Dict[OrbitState, List[Move]] = {}
    order = [start]
    queue = deque([start])
    seen = {start}
    while queue:
        u = queue.popleft()
        if len(graph) >= max_steps:
            raise StepBudgetExceededError(f"orbit of {start} exceeds {max_steps} states")
        graph[u] = moves(u)
        for _, v in graph[u]:
            if v not in seen:
                seen.add(v)
                order.append(v)
                queue.append(v)
    # glued points count once: branches landing on one value are not a split
    multi = sum(1 for u in graph if len({v.x for _, v in graph[u]}) > 1)
    report = PeriodReport(start, False, multivalued_points=multi, states=order)

    # shortest cycle through the start
    parent: Dict[OrbitState, Tuple[OrbitState, Tuple[str, ...]]] = {}
    queue = deque([start])
    visited = {start}
    closing = None
    while queue and closing is None:
        u = queue.popleft()
        for block, v in graph[u]:
            if v == start:
                closing = (u, block)
                break
            if v not in visited:
                visited.add(v)
                parent[v] = (u, block)
                queue.append(v)
    if closing is not None:
        u, block = closing
        blocks, cycle = [block], [u]
        while u != start:
            u, b = parent[u]
            blocks.append(b)
            cycle.append(u)
        report.purely_periodic = True
        report.blocks = blocks[::-1]
        report.cycle = cycle[::-1]
        report.period = [label for b in report.blocks for label in b]
        report.preperiod = 0
        if multi:
            raise InvariantViolation(f"purely periodic orbit of {start} has {multi} multivalued points")
    elif not multi:
        # single-valued chain: walk it until a state repeats
        walk, u = [start], start
        while graph[u]:
            u = graph[u][0][1]
            if u in walk:
                idx = walk.index(u)
                report.preperiod = idx
                report.cycle = walk[idx:]
                report.blocks = [graph[v][0][0] for v in walk[idx:]]
                report.period = [label for b in report.blocks for label in b]
                break
            walk.append(u)
    return report


def orbit(r: Realization, s: OrbitState, mode: str = SLOW, max_steps: int = DEFAULT_BUDGET) -> PeriodReport:
    """
    Explore the orbit of s under the slow map F or the jump transformation.

    Raises:
        NotInAttractorError: if x is outside H_node
        StepBudgetExceededError: if more than max_steps states are visited
        InvariantViolation: if discriminants drift or a periodic orbit branches
    """
    if not r.H[s.node].contains(s.x):
        raise NotInAttractorError(f"{s.x} is not in H_{s.node}")
    report = explore(_mover(r, mode), s, max_steps)
    if not s.x.is_infinite and not s.x.is_rational:
        disc = discriminant_of(s.x)
        for st in report.states:
            if discriminant_of(st.x) != disc:
                raise InvariantViolation(f"discriminant changed from {disc} at {st}")
    logger.debug("orbit of %s: %d states, periodic=%s", s, len(report.states), report.purely_periodic)
    return report


def dual_orbit(r: Realization, s: OrbitState, mode: str = SLOW, max_steps: int = DEFAULT_BUDGET) -> PeriodReport:
    """Orbit of s under F# (slow) or the first-return map to R (jump)."""
    if not r.K[s.node].contains(s.x):
        raise NotInAttractorError(f"{s.x} is not in K_{s.node}")
    return explore(_mover(r, mode, DUAL), s, max_steps)


def duality_check(forward: PeriodReport, dual: PeriodReport) -> Tuple[bool, bool]:
    """
    Compare a periodic orbit of omega with the dual orbit of its conjugate.

    Returns:
        (labels reversed, pointwise conjugate): the dual labels read the
        forward period backwards and the t-th dual state is the conjugate of
        the forward state t steps back
    """
    if not (forward.purely_periodic and dual.purely_periodic):
        return False, False
    reversed_ok = dual.period == forward.period[::-1]
    p = len(forward.cycle)
    pointwise = len(dual.cycle) == p and all(
        dual.cycle[t].x == forward.cycle[(-t) % p].x.conjugate() for t in range(p))
    return reversed_ok, pointwise


# Realization checks -------------------------------------------------------

@dataclass
class RealizationVerdict:
    status: str
    witness: Optional[QNum] = None
    nodes: Optional[Tuple[int, int]] = None
    images: Tuple[List[str], List[str]] = field(default_factory=lambda: ([], []))
    lag: Optional[int] = None

    def to_json(self) -> dict:
        out = {"status": self.status}
        if self.witness is not None:
            out.update({"witness": self.witness.to_text(), "nodes": list(self.nodes),
                        "images": [list(self.images[0]), list(self.images[1])], "lag": self.lag})
        return out


def _refine(pieces: List[IntervalUnion], domain: IntervalUnion) -> List[IntervalUnion]:
    out = []
    for p in pieces:
        for part in (p.intersection(domain), p.difference(domain)):
            for piece in part.pieces:
                if piece[0] != piece[1]:
                    out.append(IntervalUnion.from_pieces([piece]))
    return out


def realization_check(spec: CFSpec, side: str, desc: Sequence[Desc], depth: int = 16) -> RealizationVerdict:
    """
    Check that glued components act alike on their overlaps.

    On every open piece between breakpoints both sides must use the same set
    of matrices; at breakpoints and isolated overlap points their image sets
    must coincide.
    """
    moves = (lambda s: _base_moves(spec, desc, s)) if side == BASE else (lambda s: _dual_moves(spec, desc, s))
    matrix_of = (lambda label: spec.branch[label].inverse()) if side == BASE else (lambda label: spec.branch[label])
    expanded = [d.expand(depth) for d in desc]
    ifs = GDIFS(spec, side)
    domains = {}
    for node in range(spec.nodes):
        domains[node] = [desc[br.source].image(br.matrix).expand(depth) for br in ifs.branches_into(node)]

    def acting(node: int, x: QNum):
        return {matrix_of(block[0]) for block, _ in moves(OrbitState(node, x))}

    def values(node: int, x: QNum):
        return sorted({st.x.to_text() for _, st in moves(OrbitState(node, x))})

    for i in range(spec.nodes):
        for j in range(i + 1, spec.nodes):
            overlap = expanded[i].intersection(expanded[j])
            if overlap.is_empty:
                continue
            pieces = [IntervalUnion.from_pieces([p]) for p in overlap.pieces if p[0] != p[1]]
            for dom in domains[i] + domains[j]:
                pieces = _refine(pieces, dom)
            points = list(overlap.isolated_points())
            for p in pieces:
                for x in p.endpoints():
                    if x not in points and desc[i].contains(x) and desc[j].contains(x):
                        points.append(x)
            for p in pieces:
                x = piece_sample(*p.pieces[0])
                if not (desc[i].contains(x) and desc[j].contains(x)):
                    continue
                if acting(i, x) != acting(j, x):
                    return _failure(moves, i, j, x, values)
            for x in points:
                if values(i, x) != values(j, x):
                    return _failure(moves, i, j, x, values)
    return RealizationVerdict(OK)


def _failure(moves, i: int, j: int, x: QNum, values) -> RealizationVerdict:
    return RealizationVerdict(FAIL, x, (i, j), (values(i, x), values(j, x)), _lag(moves, i, j, x))


def _lag(moves, i: int, j: int, x: QNum, max_lag: int = 3) -> Optional[int]:
    """Smallest d such that a one-step image of one side reappears d steps later on the other."""
    def layers(node: int) -> List[set]:
        out, frontier = [], {OrbitState(node, x)}
        for _ in range(1 + max_lag):
            frontier = {v for u in frontier for _, v in moves(u)}
            out.append({v.x for v in frontier})
        return out

    li, lj = layers(i), layers(j)
    for d in range(1, max_lag + 1):
        if li[0] & lj[d] or lj[0] & li[d]:
            return d
    return None


def geometric_check(spec: CFSpec, H: Sequence[Desc], K: Sequence[Desc]) -> str:
    base = realization_check(spec, BASE, H)
    if base.status != OK:
        return NEITHER
    dual = realization_check(spec, DUAL, K)
    return GEOMETRIC if dual.status == OK else BASE_ONLY


# Discriminant sweeps -------------------------------------------------------

def check_discriminant(D: int) -> None:
    """
    Raises:
        BadDiscriminantError: unless D > 0, D = 0 or 1 mod 4 and D is not a square
    """
    if D <= 0 or D % 4 not in (0, 1) or isqrt(D) ** 2 == D:
        raise BadDiscriminantError(f"{D} is not the discriminant of a real quadratic field order")


def enumerate_quadratics(D: int, window: IntervalUnion, f1max: int) -> List[Tuple[QuadForm, QNum, QNum]]:
    """
    Primitive forms of discriminant D with 0 < f1 <= f1max whose selected root lies in window.

    Raises:
        BadDiscriminantError: for invalid D
        ValidationError: if the window is unbounded
    """
    check_discriminant(D)
    ends = window.endpoints()
    if window.contains(QNum(1, 0, 0)) or window.is_full:
        raise ValidationError("window must be bounded", "window")
    bound = max((abs(x).ceil() for x in ends), default=0)
    root = isqrt(D) + 1
    out = []
    for f1 in range(1, f1max + 1):
        reach = 2 * f1 * bound + root
        for f2 in range(-reach, reach + 1):
            num = f2 * f2 - D
            if num % (4 * f1):
                continue
            f3 = num // (4 * f1)
            if gcd(gcd(f1, f2), f3) != 1:
                continue
            for sel in (1, -1):
                omega = QNum(-f2, sel, 2 * f1, D)
                if window.contains(omega):
                    out.append((QuadForm(f1, f2, f3, sel), omega, omega.conjugate()))
    return out


@dataclass
class GaloisReport:
    name: str
    mode: str
    records: List[dict] = field(default_factory=list)
    geometric: str = NEITHER

    @property
    def counterexamples(self) -> List[dict]:
        return [rec for rec in self.records if rec["purely_periodic"] != rec["criterion_met"]]

    @property
    def duality_failures(self) -> List[dict]:
        return [rec for rec in self.records if rec.get("duality_ok") is False]

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame.from_records(self.records)

    def summary(self) -> pd.DataFrame:
        """Per-node counts of forms, periodic points and counterexamples."""
        df = self.frame()
        if df.empty:
            return pd.DataFrame(columns=["node", "forms", "periodic", "counterexamples"])
        df["counterexample"] = df["purely_periodic"] != df["criterion_met"]
        return (df.groupby("node")
                  .agg(forms=("omega", "count"), periodic=("purely_periodic", "sum"),
                       counterexamples=("counterexample", "sum"))
                  .reset_index())

    def to_json(self) -> dict:
        return {"name": self.name, "mode": self.mode, "geometric": self.geometric,
                "forms": len(self.records), "counterexamples": len(self.counterexamples),
                "duality_failures": len(self.duality_failures),
                "records": self.records}


def galois_verify(r: Realization, dmin: int = 5, dmax: int = 200, f1max: int = 30,
                  mode: str = SLOW, max_steps: int = DEFAULT_BUDGET) -> GaloisReport:
    """
    Sweep quadratic points of H and compare pure periodicity with the
    conjugate criterion: omega' in K (slow) or omega' in R (jump).

    For geometric realizations every periodic point is also checked for the
    reversed dual period and for the pointwise conjugate identity.
    """
    if mode == JUMP and r.R is None:
        raise ValidationError("jump sweeps need R", "attractors.R")
    geometric = geometric_check(r.spec, r.H, r.K)
    report = GaloisReport(r.spec.name, mode, geometric=geometric)
    target = r.K if mode == SLOW else r.R
    for D in range(dmin, dmax + 1):
        try:
            check_discriminant(D)
        except BadDiscriminantError:
            continue
        for node in range(r.spec.nodes):
            window = r.H[node].hull()
            for form, omega, conj in enumerate_quadratics(D, window, f1max):
                if not r.H[node].contains(omega):
                    continue
                start = OrbitState(node, omega)
                fwd = orbit(r, start, mode, max_steps)
                criterion = target[node].contains(conj)
                rec = {
                    "D": D, "node": node, "form": form.to_text(),
                    "omega": omega.to_text(), "conj": conj.to_text(),
                    "purely_periodic": fwd.purely_periodic, "criterion_met": criterion,
                    "period_labels": "".join(fwd.period),
                    "period_blocks": ["".join(b) for b in fwd.blocks],
                    "block_sizes": [len(b) for b in fwd.blocks],
                    "dual_period_labels": "",
                }
                if fwd.purely_periodic and criterion and geometric == GEOMETRIC:
                    dual = dual_orbit(r, OrbitState(node, conj), mode, max_steps)
                    reversed_ok, pointwise = duality_check(fwd, dual)
                    rec["dual_period_labels"] = "".join(dual.period)
                    rec["duality_ok"] = reversed_ok and pointwise
                report.records.append(rec)
        logger.info("D=%d: %d forms so far", D, len(report.records))
    if report.counterexamples:
        logger.warning("%s: %d counterexamples", r.spec.name, len(report.counterexamples))
    return report


def classical_galois_check(records: Sequence[dict]) -> Tuple[int, List[dict]]:
    """
    Farey jump records only: -1/omega' must be the attracting fixed point of
    the product of [[0,1],[1,c]] over the partial quotients read backwards.

    Returns:
        (number of periodic records checked, failing records)
    """
    from src.exact import parse_qnum
    checked, failures = 0, []
    for rec in records:
        if not rec["purely_periodic"]:
            continue
        digits = rec["block_sizes"]
        m = Mat(1, 0, 0, 1)
        for c in reversed(digits):
            m = m @ Mat(0, 1, 1, c)
        target = -1 / parse_qnum(rec["conj"])
        checked += 1
        if attracting_fixed_point(m) != target:
            failures.append(rec)
    return checked, failures


# Reference maps ----------------------------------------------------------------

def gauss_map(x: QNum) -> QNum:
    y = x.inverse()
    return y - y.floor()


def renyi_map(x: QNum) -> QNum:
    y = (1 - x).inverse()
    return y - y.floor()


def ceiling_map(x: QNum) -> QNum:
    y = x.inverse()
    return QNum(y.ceil()) - y


def alpha_map(alpha: QNum, x: QNum) -> QNum:
    """x -> |1/x| - floor(|1/x| + 1 - alpha) on [alpha - 1, alpha]."""
    y = abs(x.inverse())
    return y - floor_sum(y + 1, -alpha)


def folded_nearest_map(x: QNum) -> QNum:
    """x -> |1/x - nearest integer| on [0, 1/2]."""
    y = x.inverse()
    return abs(y - (y + QNum(1, 0, 2)).floor())


def demo():
    """Jump orbit of sqrt(2) - 1 under the tau-minus-one map."""
    from src.utils import load_preset
    r = build_realization(load_preset("tau-minus-one"))
    rep = orbit(r, OrbitState(1, QNum(-1, 1, 1, 2)), JUMP)
    print(f"periodic: {rep.purely_periodic}, period: {''.join(rep.period)}")
    print(f"first return of (0, -5/2): {[str(s) for s in first_return(r, OrbitState(0, QNum(-5, 0, 2)))]}")


if __name__ == '__main__':
    demo()
