"""
Graph-directed iterated function systems and their attractors

The base system acts by B_a : I_j -> I_i for each arrow a = i sigma j, so the
new component at node i gathers B_a[T_j] over the arrows leaving i. The dual
system acts by D_a = B_a^-1 : I_i S -> I_j S, so node j gathers D_a[T_i] over
the arrows entering j.

Candidates are verified exactly: finite unions by set equality of the
Hutchinson image, parabolic tails by telescoping the images of the
non-parabolic branches onto the tail base.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from src.cfspec import CFSpec
from src.errors import ChainBrokenError, InvariantViolation, WitnessNotParabolicError
from src.exact import QNum
from src.intervals import (
    Desc, FiniteAttractor, IntervalUnion, ParabolicTail, gap_bound, piece_sample,
)
from src.modular import PARABOLIC, Mat, fixed_point_values, mat_classify, mobius
from src.words import is_parabolic


logger = logging.getLogger(__name__)

BASE = "base"
DUAL = "dual"

VERIFIED = "Verified"
REFUTED = "Refuted"
UNVERIFIED = "Unverified"

TRUNCATION_DEPTH = 64


@dataclass(frozen=True)
class Branch:
    """One map feeding node `node` from node `source`."""
    label: str
    matrix: Mat
    source: int
    node: int


@dataclass(frozen=True)
class GDIFS:
    spec: CFSpec
    side: str = BASE

    def branches_into(self, node: int) -> List[Branch]:
        """Maps whose images land in the component at `node`."""
        code = self.spec.code
        if self.side == BASE:
            return [Branch(a.label, self.spec.branch[a.label], a.target, node)
                    for a in code.arrows_from(node)]
        return [Branch(a.label, self.spec.dual[a.label], a.source, node)
                for a in code.arrows_into(node)]

    def start(self) -> Tuple[IntervalUnion, ...]:
        """T_i = I_i on the base side, I_i S on the dual side."""
        if self.side == BASE:
            return tuple(IntervalUnion.from_interval(iv) for iv in self.spec.intervals)
        return tuple(IntervalUnion.from_interval(iv.complement()) for iv in self.spec.intervals)


def parabolic_arrows(spec: CFSpec) -> Tuple[Optional[str], ...]:
    """
    Per node, the label of the parabolic loop whose branch fixes zero_point.

    Raises:
        InvariantViolation: if some node has more than one
    """
    out = []
    for node in range(spec.nodes):
        found = [a.label for a in spec.code.arrows
                 if a.source == node and a.target == node and is_parabolic(a)
                 and mobius(spec.branch[a.label], spec.zero_point) == spec.zero_point]
        if len(found) > 1:
            raise InvariantViolation(f"node {node} has several parabolic arrows {found}")
        out.append(found[0] if found else None)
    return tuple(out)


# Hutchinson operator -------------------------------------------------------

def hutchinson_step(ifs: GDIFS, state: Sequence[IntervalUnion]) -> Tuple[IntervalUnion, ...]:
    out = []
    for node in range(ifs.spec.nodes):
        acc = IntervalUnion.empty()
        for br in ifs.branches_into(node):
            acc = acc.union(state[br.source].image(br.matrix))
        out.append(acc)
    return tuple(out)


@dataclass
class HutchinsonRun:
    state: Tuple[IntervalUnion, ...]
    iterations: int
    converged: bool
    gap: QNum
    history: List[Tuple[IntervalUnion, ...]] = field(default_factory=list)


def iterate_hutchinson(ifs: GDIFS, start: Optional[Sequence[IntervalUnion]] = None,
                       max_iters: int = 50, stop: Fraction = Fraction(0),
                       keep_history: bool = False) -> HutchinsonRun:
    """
    Iterate the Hutchinson operator.

    Args:
        start: initial tuple, defaults to the node intervals
        max_iters: number of steps at most
        stop: halt once successive tuples are within this chart-length bound

    Returns:
        HutchinsonRun; converged is True only for an exact fixed point
    """
    state = tuple(start) if start is not None else ifs.start()
    history = [state] if keep_history else []
    gap = QNum(2)
    for step in range(1, max_iters + 1):
        nxt = hutchinson_step(ifs, state)
        if nxt == state:
            logger.info("exact fixed point after %d steps", step)
            return HutchinsonRun(nxt, step, True, QNum(0), history)
        gap = max(gap_bound(a, b) for a, b in zip(state, nxt))
        state = nxt
        if keep_history:
            history.append(state)
        logger.debug("step %d: gap %s", step, gap)
        if stop and gap <= QNum.coerce(stop):
            return HutchinsonRun(state, step, False, gap, history)
    return HutchinsonRun(state, max_iters, False, gap, history)


def is_descending(history: Sequence[Sequence[IntervalUnion]]) -> bool:
    for prev, nxt in zip(history, history[1:]):
        if not all(b.issubset(a) for a, b in zip(prev, nxt)):
            return False
    return True


# Telescoping ---------------------------------------------------------------

@dataclass(frozen=True)
class TailGroup:
    witness: Mat
    limit: QNum
    base: IntervalUnion
    labels: Tuple[str, ...]


def telescope(tails: Sequence[Tuple[str, ParabolicTail]]) -> Tuple[IntervalUnion, List[TailGroup]]:
    """
    Exact union of parabolic tails, grouped by their map and limit.

    A group whose bases form one arc [x, y] with W(y) inside it and W(y) != y
    sweeps out [limit, y]; symmetrically W(x) inside gives [x, limit].

    Raises:
        WitnessNotParabolicError: if a group map is not parabolic
        ChainBrokenError: if a group does not chain up to its limit
    """
    grouped: "OrderedDict[Tuple[Mat, QNum], List[Tuple[str, ParabolicTail]]]" = OrderedDict()
    for label, tail in tails:
        grouped.setdefault((tail.P, tail.limit), []).append((label, tail))
    total = IntervalUnion.empty()
    groups = []
    for (w, limit), members in grouped.items():
        if mat_classify(w) != PARABOLIC:
            raise WitnessNotParabolicError(f"{w} is not parabolic")
        base = IntervalUnion.empty()
        for _, tail in members:
            base = base.union(tail.base)
        arcs = base.components()
        if len(arcs) != 1 or arcs[0].is_point or arcs[0].full:
            raise ChainBrokenError(f"bases {base} do not form one arc")
        x, y = arcs[0].lo, arcs[0].hi
        wy, wx = mobius(w, y), mobius(w, x)
        if wy != y and base.contains(wy):
            swept = IntervalUnion.from_arc(limit, y)
        elif wx != x and base.contains(wx):
            swept = IntervalUnion.from_arc(x, limit)
        else:
            raise ChainBrokenError(f"{w} does not chain {base} toward {limit}")
        groups.append(TailGroup(w, limit, base, tuple(label for label, _ in members)))
        total = total.union(swept)
    return total, groups


@dataclass
class NodeVerdict:
    node: int
    status: str
    witness: Optional[QNum] = None
    gap: Optional[QNum] = None
    detail: str = ""
    groups: List[TailGroup] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"node": self.node, "status": self.status, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness.to_text()
        if self.gap is not None:
            out["gap"] = str(self.gap)
        if self.groups:
            out["groups"] = [{"W": g.witness.to_rows(), "limit": g.limit.to_text(),
                              "base": g.base.to_json(), "labels": list(g.labels)}
                             for g in self.groups]
        return out


@dataclass
class Verdict:
    nodes: List[NodeVerdict]

    @property
    def status(self) -> str:
        states = {v.status for v in self.nodes}
        if REFUTED in states:
            return REFUTED
        if UNVERIFIED in states:
            return UNVERIFIED
        return VERIFIED

    @property
    def verified(self) -> bool:
        return self.status == VERIFIED

    def to_json(self) -> dict:
        return {"status": self.status, "nodes": [v.to_json() for v in self.nodes]}


def _image_desc(desc: Desc, m: Mat) -> Desc:
    return desc.image(m)


def _sum_images(images: Sequence[Tuple[str, Desc]]):
    """Exact union of finite images and telescoped tails."""
    finite = IntervalUnion.empty()
    tails = []
    for label, desc in images:
        if isinstance(desc, ParabolicTail):
            tails.append((label, desc))
        else:
            finite = finite.union(desc.union)
    swept, groups = telescope(tails) if tails else (IntervalUnion.empty(), [])
    return finite.union(swept), groups


def _truncated(images: Sequence[Tuple[str, Desc]], depth: int) -> IntervalUnion:
    out = IntervalUnion.empty()
    for _, desc in images:
        out = out.union(desc.expand(depth))
    return out


def _candidate_points(u: IntervalUnion) -> List[QNum]:
    pts = [piece_sample(s, e) for s, e in u.pieces if s != e]
    pts.extend(u.isolated_points())
    return pts


def _first_witness(points: Sequence[QNum], in_image, in_candidate) -> Optional[QNum]:
    for x in points:
        if in_image(x) != in_candidate(x):
            return x
    return None


def _verify_finite(node: int, target: IntervalUnion, images, depth: int) -> NodeVerdict:
    try:
        total, groups = _sum_images(images)
    except (ChainBrokenError, WitnessNotParabolicError) as e:
        approx = _truncated(images, depth)
        witness = _first_witness(_candidate_points(approx - target), lambda x: True, target.contains)
        if witness is not None:
            return NodeVerdict(node, REFUTED, witness, detail=f"image leaves the candidate ({e})")
        return NodeVerdict(node, UNVERIFIED, gap=(target - approx).widest_piece(),
                           detail=f"truncated at depth {depth}: {e}")
    if total == target:
        return NodeVerdict(node, VERIFIED, groups=groups)
    diff = (total - target).union(target - total)
    witness = _first_witness(_candidate_points(diff), total.contains, target.contains)
    return NodeVerdict(node, REFUTED, witness, detail=f"image is {total}", groups=groups)


def _verify_tail(node: int, target: ParabolicTail, images, depth: int) -> NodeVerdict:
    rest = [(label, d) for label, d in images
            if not (isinstance(d, ParabolicTail) and d.P == target.P and d.limit == target.limit
                    and d.base == target.base.image(target.P))]
    if len(rest) == len(images):
        approx = _truncated(images, depth)
        extra = approx - target.expand(depth)
        witness = _first_witness(_candidate_points(extra), lambda x: True, target.contains)
        if witness is not None:
            return NodeVerdict(node, REFUTED, witness, detail="no branch reproduces the tail")
        return NodeVerdict(node, UNVERIFIED, detail="no branch reproduces the tail")
    inner = ParabolicTail(target.P, target.base.image(target.P), target.limit)
    try:
        total, groups = _sum_images(rest)
    except (ChainBrokenError, WitnessNotParabolicError) as e:
        approx = _truncated(rest, depth)
        witness = _first_witness(_candidate_points(approx - target.base),
                                 lambda x: True, target.contains)
        if witness is not None:
            return NodeVerdict(node, REFUTED, witness, detail=f"image leaves the candidate ({e})")
        return NodeVerdict(node, UNVERIFIED, gap=(target.base - approx).widest_piece(),
                           detail=f"truncated at depth {depth}: {e}")
    if total == target.base:
        return NodeVerdict(node, VERIFIED, groups=groups)

    def in_image(x: QNum) -> bool:
        return total.contains(x) or inner.contains(x)

    diff = (total - target.base).union(target.base - total)
    witness = _first_witness(_candidate_points(diff), in_image, target.contains)
    if witness is not None:
        return NodeVerdict(node, REFUTED, witness, detail=f"non-parabolic part is {total}", groups=groups)
    return NodeVerdict(node, UNVERIFIED, detail=f"non-parabolic part is {total}", groups=groups)


def verify_fixed_point(ifs: GDIFS, candidate: Sequence[Desc],
                       depth: int = TRUNCATION_DEPTH) -> Verdict:
    """
    Check that the candidate tuple is the fixed point of the Hutchinson operator.

    Returns:
        Verdict with a per-node Verified, Refuted (with witness) or Unverified
    """
    nodes = []
    for node in range(ifs.spec.nodes):
        images = [(br.label, _image_desc(candidate[br.source], br.matrix))
                  for br in ifs.branches_into(node)]
        target = candidate[node]
        if isinstance(target, ParabolicTail):
            nodes.append(_verify_tail(node, target, images, depth))
        else:
            nodes.append(_verify_finite(node, target.union, images, depth))
    verdict = Verdict(nodes)
    logger.info("%s %s attractor: %s", ifs.spec.name, ifs.side, verdict.status)
    return verdict


def tails_from_R(spec: CFSpec, R: Sequence[IntervalUnion],
                 P: Optional[Sequence[Optional[str]]] = None) -> Tuple[Desc, ...]:
    """K_i as the D_a-tail of R_i for the parabolic arrow a at node i, else R_i."""
    P = parabolic_arrows(spec) if P is None else P
    out = []
    for node in range(spec.nodes):
        label = P[node]
        if label is None:
            out.append(FiniteAttractor(R[node]))
            continue
        m = spec.dual[label]
        limit = fixed_point_values(m)[0]
        out.append(ParabolicTail(m, R[node], limit, label))
    return tuple(out)


def telescope_verify(ifs: GDIFS, R: Sequence[IntervalUnion],
                     P: Optional[Sequence[Optional[str]]] = None) -> Verdict:
    """
    Check R_i = union of D_b[K_j] over the non-parabolic arrows b into i,
    where K_j is the parabolic tail of R_j.
    """
    spec = ifs.spec
    P = parabolic_arrows(spec) if P is None else P
    K = tails_from_R(spec, R, P)
    nodes = []
    for node in range(spec.nodes):
        images = [(br.label, K[br.source].image(br.matrix))
                  for br in ifs.branches_into(node) if br.label != P[node]]
        nodes.append(_verify_finite(node, R[node], images, TRUNCATION_DEPTH))
    return Verdict(nodes)


def compute_R(spec: CFSpec, K: Sequence[Desc],
              P: Optional[Sequence[Optional[str]]] = None) -> Tuple[IntervalUnion, ...]:
    """
    R_i as the exact union of D_b[K_j] over the arrows b into i outside P.

    Raises:
        ChainBrokenError, WitnessNotParabolicError: if a tail image does not telescope
    """
    ifs = GDIFS(spec, DUAL)
    P = parabolic_arrows(spec) if P is None else P
    out = []
    for node in range(spec.nodes):
        images = [(br.label, K[br.source].image(br.matrix))
                  for br in ifs.branches_into(node) if br.label != P[node]]
        total, _ = _sum_images(images)
        out.append(total)
    return tuple(out)


def attractor_member(x: QNum, node: int, desc: Sequence[Desc]) -> bool:
    return desc[node].contains(x)


# Open set condition ----------------------------------------------------------

@dataclass
class OSCResult:
    ok: bool
    conflicts: List[Tuple[int, str, str]] = field(default_factory=list)


def open_set_condition(ifs: GDIFS, H: Sequence[IntervalUnion]) -> OSCResult:
    """Images of the component interiors are pairwise disjoint inside each node."""
    conflicts = []
    for node in range(ifs.spec.nodes):
        images = [(br.label, H[br.source].image(br.matrix)) for br in ifs.branches_into(node)]
        for idx, (la, ua) in enumerate(images):
            if not ua.issubset(H[node]):
                conflicts.append((node, la, "outside"))
            for lb, ub in images[idx + 1:]:
                common = ua.intersection(ub)
                if any(s != e for s, e in common.pieces):
                    conflicts.append((node, la, lb))
    return OSCResult(not conflicts, conflicts)


def candidate_unions(desc: Sequence[Desc], depth: int = TRUNCATION_DEPTH) -> Tuple[IntervalUnion, ...]:
    return tuple(d.expand(depth) for d in desc)


def attractor_report(spec: CFSpec, iterations: int = 20) -> Dict:
    """Hutchinson iterates plus exact verdicts for the candidates of a spec."""
    base = GDIFS(spec, BASE)
    run = iterate_hutchinson(base, max_iters=iterations)
    report: Dict = {
        "name": spec.name,
        "iterates": {"steps": run.iterations, "exact": run.converged, "gap": str(run.gap),
                     "state": [u.to_json() for u in run.state]},
    }
    if spec.H is not None:
        report["H"] = {"candidate": [d.to_json() for d in spec.H],
                       "verdict": verify_fixed_point(base, spec.H).to_json()}
        finite = all(isinstance(d, FiniteAttractor) for d in spec.H)
        if finite:
            osc = open_set_condition(base, [d.union for d in spec.H])
            report["H"]["open_set_condition"] = osc.ok
    if spec.K is not None:
        dual = GDIFS(spec, DUAL)
        report["K"] = {"candidate": [d.to_json() for d in spec.K],
                       "verdict": verify_fixed_point(dual, spec.K).to_json()}
        try:
            R = compute_R(spec, spec.K)
            report["R"] = [u.to_json() for u in R]
        except (ChainBrokenError, WitnessNotParabolicError) as e:
            report["R"] = {"error": str(e)}
    return report


def demo():
    """Verify the Farey dual attractor."""
    from src.utils import load_preset
    spec = load_preset("farey")
    dual = GDIFS(spec, DUAL)
    run = iterate_hutchinson(dual, start=(IntervalUnion.from_arc(QNum(1, 0, 0), QNum(0)),))
    print(f"Farey K after {run.iterations} step(s): {run.state[0]} (exact: {run.converged})")


if __name__ == '__main__':
    demo()
