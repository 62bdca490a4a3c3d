"""
Abstract continued fractions: codes, their graph and definition files

A CFSpec bundles a finite code in the node-decorated multimonoid, one
unimodular interval per node and optional candidate attractors. check_cf
decides admissibility: the code is a code (generalized Sardinas-Patterson),
its node graph is strongly connected and its weight matrix G has a positive
eigenvector for eigenvalue 1.
"""

import json
import logging
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix, Rational, eye

from src.errors import NotIrreducibleError, ParseError, ValidationError
from src.exact import ZERO, QNum, parse_qnum
from src.intervals import Desc, FiniteAttractor, IntervalUnion, ParabolicTail
from src.modular import (
    Mat, UnimodInterval, branch_matrix, dual_matrix, parse_interval,
)
from src.words import (
    Arrow, arrow_sharp, is_prefix, left_quotient, normalize,
)


logger = logging.getLogger(__name__)

GMatrix = List[List[Fraction]]


@dataclass(frozen=True)
class Code:
    """Finite set of labelled arrows over `nodes` nodes."""
    nodes: int
    arrows: Tuple[Arrow, ...]

    def __post_init__(self):
        if self.nodes < 1:
            raise ValidationError("a code needs at least one node", "nodes")
        labels = set()
        seen = set()
        for idx, a in enumerate(self.arrows):
            where = f"code[{idx}]"
            if not (0 <= a.source < self.nodes and 0 <= a.target < self.nodes):
                raise ValidationError(f"node index out of range in {a.to_text()}", where)
            if a.source == a.target and a.word.is_empty:
                raise ValidationError("identity arrows are not allowed", where)
            if a.label is None or a.label in labels:
                raise ValidationError(f"missing or duplicate label {a.label!r}", where)
            if (a.source, a.word, a.target) in seen:
                raise ValidationError(f"duplicate arrow {a.to_text()}", where)
            labels.add(a.label)
            seen.add((a.source, a.word, a.target))

    def arrow(self, label: str) -> Arrow:
        for a in self.arrows:
            if a.label == label:
                return a
        raise ValidationError(f"unknown arrow label {label!r}", "code")

    def arrows_from(self, node: int) -> List[Arrow]:
        return [a for a in self.arrows if a.source == node]

    def arrows_into(self, node: int) -> List[Arrow]:
        return [a for a in self.arrows if a.target == node]

    @property
    def max_grade(self) -> int:
        return max((a.grade for a in self.arrows), default=0)


def make_code(nodes: int, arrows: Sequence[Tuple[str, str]]) -> Code:
    """Build a code from (label, "i:word:j") pairs."""
    from src.words import parse_arrow
    return Code(nodes, tuple(parse_arrow(text, label) for label, text in arrows))


# Codehood ---------------------------------------------------------------

@dataclass(frozen=True)
class CodeVerdict:
    is_code: bool
    witness: Optional[Tuple[Tuple[str, ...], Tuple[str, ...]]] = None


def is_code(c: Code) -> CodeVerdict:
    """
    Sardinas-Patterson over the multimonoid.

    A residual (j, r, k) records two partial factorizations with equal
    source, the shorter ending at node j and the longer one ahead of it by
    the word r and ending at node k. The set is not a code iff a residual
    (i, e, i) is reachable. Each residual carries label lists
    (shorter, longer) with prod(shorter) * r = prod(longer).
    """
    queue = deque()
    seen = set()

    def push(state, lists):
        if state not in seen:
            seen.add(state)
            queue.append((state, lists))

    for a in c.arrows:
        for b in c.arrows:
            if a is b or a.source != b.source or not is_prefix(a.word, b.word):
                continue
            rest = left_quotient(a.word, b.word)
            push((a.target, rest, b.target), ((a.label,), (b.label,)))

    while queue:
        (j, rest, k), (short, long) = queue.popleft()
        if rest.is_empty and j == k:
            logger.debug("double factorization found after %d residuals", len(seen))
            return CodeVerdict(False, (short, long))
        for w in c.arrows_from(j):
            if is_prefix(w.word, rest):
                push((w.target, left_quotient(w.word, rest), k), (short + (w.label,), long))
            elif is_prefix(rest, w.word):
                # the shorter side overtakes: roles swap
                push((k, left_quotient(rest, w.word), w.target), (long, short + (w.label,)))
    logger.debug("code verified with %d residuals", len(seen))
    return CodeVerdict(True)


def dual_code(c: Code) -> Code:
    return Code(c.nodes, tuple(arrow_sharp(a) for a in c.arrows))


def _reach(nodes: int, edges: List[Tuple[int, int]], start: int) -> set:
    seen = {start}
    todo = [start]
    while todo:
        u = todo.pop()
        for s, t in edges:
            if s == u and t not in seen:
                seen.add(t)
                todo.append(t)
    return seen


def _graph_strongly_connected(nodes: int, edges: List[Tuple[int, int]]) -> bool:
    forward = _reach(nodes, edges, 0)
    backward = _reach(nodes, [(t, s) for s, t in edges], 0)
    return len(forward) == nodes and len(backward) == nodes


def strongly_connected(c: Code) -> bool:
    return _graph_strongly_connected(c.nodes, [(a.source, a.target) for a in c.arrows])


def g_matrix(c: Code) -> GMatrix:
    g = [[Fraction(0)] * c.nodes for _ in range(c.nodes)]
    for a in c.arrows:
        g[a.source][a.target] += Fraction(1, 2 ** a.grade)
    return g


@dataclass(frozen=True)
class PerronResult:
    ok: bool
    eigvec: Optional[Tuple[int, ...]] = None


def perron_unit(g: GMatrix) -> PerronResult:
    """
    Decide whether G has spectral radius 1 via a positive kernel vector of G - I.

    Raises:
        NotIrreducibleError: if the support graph of G is not strongly connected
    """
    n = len(g)
    edges = [(i, j) for i in range(n) for j in range(n) if g[i][j] > 0]
    if not _graph_strongly_connected(n, edges):
        raise NotIrreducibleError("weight matrix is not irreducible")
    m = Matrix([[Rational(x.numerator, x.denominator) for x in row] for row in g]) - eye(n)
    kernel = m.nullspace()
    if len(kernel) != 1:
        return PerronResult(False)
    vec = list(kernel[0])
    if all(v < 0 for v in vec):
        vec = [-v for v in vec]
    if not all(v > 0 for v in vec):
        return PerronResult(False)
    fracs = [Fraction(int(v.p), int(v.q)) for v in vec]
    scale = lcm(*[f.denominator for f in fracs])
    ints = [int(f * scale) for f in fracs]
    common = 0
    for v in ints:
        common = gcd(common, v)
    return PerronResult(True, tuple(v // common for v in ints))


def spectral_radius_estimate(g: GMatrix) -> float:
    """Floating cross-check only; admissibility is decided by perron_unit."""
    arr = np.array([[float(x) for x in row] for row in g])
    return float(max(abs(np.linalg.eigvals(arr))))


# Specs -------------------------------------------------------------------

@dataclass(frozen=True)
class CFSpec:
    code: Code
    intervals: Tuple[UnimodInterval, ...]
    name: str = "unnamed"
    zero_point: QNum = ZERO
    H: Optional[Tuple[Desc, ...]] = None
    K: Optional[Tuple[Desc, ...]] = None
    R: Optional[Tuple[IntervalUnion, ...]] = None
    affine_offsets: Tuple[int, ...] = ()
    description: str = ""
    default_mode: str = "slow"

    def __post_init__(self):
        if len(self.intervals) != self.code.nodes:
            raise ValidationError(f"expected {self.code.nodes} intervals, got {len(self.intervals)}",
                                  "intervals")
        for key in ("H", "K", "R"):
            value = getattr(self, key)
            if value is not None and len(value) != self.code.nodes:
                raise ValidationError(f"expected {self.code.nodes} components", f"attractors.{key}")

    @property
    def nodes(self) -> int:
        return self.code.nodes

    @cached_property
    def branch(self) -> Dict[str, Mat]:
        return {a.label: branch_matrix(a, self.intervals) for a in self.code.arrows}

    @cached_property
    def dual(self) -> Dict[str, Mat]:
        return {a.label: dual_matrix(a, self.intervals) for a in self.code.arrows}

    def offset(self, node: int) -> int:
        return self.affine_offsets[node] if self.affine_offsets else 0

    def with_candidates(self, **kwargs) -> 'CFSpec':
        from dataclasses import replace
        return replace(self, **kwargs)


@dataclass
class CheckReport:
    name: str
    code: CodeVerdict
    dual_code: CodeVerdict
    strongly_connected: bool
    perron: Optional[PerronResult]
    g: GMatrix
    spectral_radius: float
    interval_problems: List[str] = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        return (self.code.is_code and self.strongly_connected
                and self.perron is not None and self.perron.ok
                and not self.interval_problems)

    def failures(self) -> List[str]:
        out = []
        if not self.code.is_code:
            out.append("not a code")
        if not self.strongly_connected:
            out.append("graph not strongly connected")
        if self.perron is None or not self.perron.ok:
            out.append("spectral radius is not 1")
        out.extend(self.interval_problems)
        return out


def check_intervals(spec: CFSpec) -> List[str]:
    """Every branch of positive grade maps I_j onto a proper subinterval of I_i."""
    problems = []
    for a in spec.code.arrows:
        source = IntervalUnion.from_interval(spec.intervals[a.source])
        target = IntervalUnion.from_interval(spec.intervals[a.target])
        image = target.image(spec.branch[a.label])
        if not image.issubset(source):
            problems.append(f"B_{a.label} does not map I_{a.target} into I_{a.source}")
        elif a.grade >= 1 and image == source:
            problems.append(f"B_{a.label} maps I_{a.target} onto I_{a.source}")
    return problems


def check_cf(spec: CFSpec) -> CheckReport:
    code = spec.code
    g = g_matrix(code)
    connected = strongly_connected(code)
    perron = perron_unit(g) if connected else None
    report = CheckReport(
        name=spec.name,
        code=is_code(code),
        dual_code=is_code(dual_code(code)),
        strongly_connected=connected,
        perron=perron,
        g=g,
        spectral_radius=spectral_radius_estimate(g),
        interval_problems=check_intervals(spec),
    )
    logger.info("%s: admissible=%s", spec.name, report.admissible)
    return report


# Definition files ----------------------------------------------------------

def _parse_union(items, location: str) -> IntervalUnion:
    if not isinstance(items, list):
        raise ValidationError("expected a list of {lo, hi} pairs", location)
    arcs = []
    for idx, item in enumerate(items):
        if not isinstance(item, dict) or "lo" not in item or "hi" not in item:
            raise ValidationError("expected {lo, hi}", f"{location}[{idx}]")
        if item.get("full"):
            return IntervalUnion.full()
        arcs.append((parse_qnum(item["lo"]), parse_qnum(item["hi"])))
    return IntervalUnion.from_arcs(arcs)


def _parse_desc(items, location: str, maps: Dict[str, Mat]) -> Desc:
    if isinstance(items, list) and len(items) == 1 and isinstance(items[0], dict) and "tail" in items[0]:
        tail = items[0]["tail"]
        label = tail.get("P_label")
        if "P" in tail:
            p = Mat.from_rows(tail["P"])
        elif label in maps:
            p = maps[label]
        else:
            raise ValidationError(f"unknown P_label {label!r}", f"{location}.tail")
        return ParabolicTail(p, _parse_union(tail.get("base", []), f"{location}.tail.base"),
                             parse_qnum(tail.get("limit", "0")), label)
    return FiniteAttractor(_parse_union(items, location))


def spec_from_dict(data: dict) -> CFSpec:
    """
    Build a CFSpec from its JSON form.

    Raises:
        ValidationError: with the location of the offending entry
    """
    if not isinstance(data, dict):
        raise ValidationError("top level must be an object", "$")
    try:
        nodes = int(data["nodes"])
        raw_code = data["code"]
        raw_intervals = data["intervals"]
    except KeyError as e:
        raise ValidationError(f"missing key {e.args[0]!r}", "$") from e
    except (TypeError, ValueError) as e:
        raise ValidationError("nodes must be an integer", "nodes") from e
    arrows = []
    for idx, entry in enumerate(raw_code):
        where = f"code[{idx}]"
        try:
            arrows.append(Arrow(int(entry["from"]), normalize(entry["word"]),
                                int(entry["to"]), str(entry["label"])))
        except ParseError as e:
            raise ValidationError(str(e), f"{where}.word") from e
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError("arrow needs label, from, word, to", where) from e
    code = Code(nodes, tuple(arrows))
    intervals = []
    for idx, obj in enumerate(raw_intervals):
        try:
            intervals.append(parse_interval(obj, f"intervals[{idx}]"))
        except ValidationError as e:
            if e.location:
                raise
            raise ValidationError(str(e), f"intervals[{idx}]") from e
    spec = CFSpec(code, tuple(intervals), name=str(data.get("name", "unnamed")),
                  zero_point=parse_qnum(data.get("zero_point", "0")),
                  affine_offsets=tuple(int(v) for v in data.get("affine_offsets", ())),
                  description=str(data.get("description", "")),
                  default_mode=str(data.get("default_mode", "slow")))
    attractors = data.get("attractors") or {}
    updates = {}
    for key, maps in (("H", spec.branch), ("K", spec.dual)):
        if key in attractors:
            updates[key] = tuple(_parse_desc(items, f"attractors.{key}[{i}]", maps)
                                 for i, items in enumerate(attractors[key]))
    if "R" in attractors:
        updates["R"] = tuple(_parse_union(items, f"attractors.R[{i}]")
                             for i, items in enumerate(attractors["R"]))
    return spec.with_candidates(**updates) if updates else spec


def spec_to_dict(spec: CFSpec) -> dict:
    data = {
        "name": spec.name,
        "nodes": spec.nodes,
        "code": [{"label": a.label, "from": a.source, "word": str(a.word) if not a.word.is_empty else "",
                  "to": a.target} for a in spec.code.arrows],
        "intervals": [iv.to_json() for iv in spec.intervals],
        "zero_point": spec.zero_point.to_text(),
    }
    if spec.description:
        data["description"] = spec.description
    if spec.default_mode != "slow":
        data["default_mode"] = spec.default_mode
    if spec.affine_offsets:
        data["affine_offsets"] = list(spec.affine_offsets)
    attractors = {}
    for key in ("H", "K"):
        value = getattr(spec, key)
        if value is not None:
            attractors[key] = [desc.to_json() for desc in value]
    if spec.R is not None:
        attractors["R"] = [u.to_json() for u in spec.R]
    if attractors:
        data["attractors"] = attractors
    return data


def load_spec(path: str) -> CFSpec:
    """
    Load a definition file.

    Raises:
        ParseError: if the file is not valid JSON
        ValidationError: if the content is not a valid spec
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: {e}") from e
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror}") from e
    logger.debug("loaded %s", os.path.basename(path))
    return spec_from_dict(data)


def save_spec(spec: CFSpec, path: str) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(spec_to_dict(spec), f, indent=2, ensure_ascii=False)


def demo():
    """Check the Farey code."""
    farey = make_code(1, [("a", "0:l:0"), ("b", "0:nf:0")])
    print(f"code?               {is_code(farey).is_code}")
    print(f"strongly connected? {strongly_connected(farey)}")
    print(f"G                   {g_matrix(farey)}")
    print(f"Perron              {perron_unit(g_matrix(farey))}")


if __name__ == '__main__':
    demo()
