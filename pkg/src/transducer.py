"""
LR expansions, the infinite product map and the symbolic-orbit transducer

Points of [0, inf] are coded by sequences over {l, n}; an eventually periodic
path of arrows multiplies out positionwise to a node and such a sequence.
The transducer reads a sequence from a node and outputs, in parallel, every
path of the code whose infinite product it is.
"""

import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from src.cfspec import CFSpec, Code
from src.errors import (
    AllTokensDiedError, CycleNotFoundError, InvariantViolation, NotComposableError,
    NotInAttractorError, NotInIntervalError, ParseError, StepBudgetExceededError,
    ValidationError,
)
from src.exact import INF, ONE, ZERO, QNum
from src.modular import L, N, UnimodInterval, fixed_points, mobius, proj
from src.words import Arrow, Word, concat, swap_letters


logger = logging.getLogger(__name__)


def canonical_cycle(pre: Sequence, period: Sequence) -> Tuple[tuple, tuple]:
    """Shortest preperiod and primitive period of pre . period^omega."""
    pre, period = tuple(pre), tuple(period)
    if not period:
        raise ValidationError("period must be nonempty", "stream")
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period == period[:d] * (n // d):
            period = period[:d]
            break
    while pre and pre[-1] == period[-1]:
        pre = pre[:-1]
        period = period[-1:] + period[:-1]
    return pre, period


@dataclass(frozen=True)
class LRStream:
    preperiod: str
    period: str

    def __post_init__(self):
        if any(ch not in 'ln' for ch in self.preperiod + self.period):
            raise ParseError(f"stream letters must be l or n: {self.preperiod}({self.period})*")
        pre, per = canonical_cycle(self.preperiod, self.period)
        object.__setattr__(self, 'preperiod', ''.join(pre))
        object.__setattr__(self, 'period', ''.join(per))

    def letter(self, t: int) -> str:
        if t < len(self.preperiod):
            return self.preperiod[t]
        return self.period[(t - len(self.preperiod)) % len(self.period)]

    def phase(self, t: int) -> Optional[int]:
        """Position inside the period once the preperiod has been read."""
        if t < len(self.preperiod):
            return None
        return (t - len(self.preperiod)) % len(self.period)

    def __str__(self) -> str:
        return f"{self.preperiod}({self.period})*"


_STREAM = re.compile(r'^\s*([ln]*)\(([ln]+)\)\*?\s*$')


def parse_stream(text: str) -> LRStream:
    """Parse "prefix(period)*" over l, n."""
    m = _STREAM.match(text)
    if not m:
        raise ParseError(f"input must look like prefix(period)*, got {text!r}")
    return LRStream(m.group(1), m.group(2))


def stream_point(z: LRStream) -> QNum:
    """The point of [0, inf] coded by z."""
    per = proj(Word(z.period))
    if set(z.period) == {'l'}:
        y = ZERO
    elif set(z.period) == {'n'}:
        y = INF
    else:
        # positive hyperbolic matrix: exactly one fixed point in [0, inf]
        y = next(fp.value for fp in fixed_points(per) if fp.value.sign() > 0)
    return mobius(proj(Word(z.preperiod)), y)


def lr_expand(x: QNum, base: UnimodInterval, budget: int = 100000) -> List[LRStream]:
    """
    LR expansions of x relative to a unimodular interval.

    Returns:
        One stream, or two for interior rational points

    Raises:
        NotInIntervalError: if x is outside the interval
    """
    if not base.contains(x):
        raise NotInIntervalError(f"{x} is not in {base}")
    y0 = mobius(base.mat.inverse(), x)
    out: List[LRStream] = []
    todo = [(y0, '')]
    while todo:
        y, emitted = todo.pop()
        seen: Dict[QNum, int] = {}
        while True:
            if y.is_zero:
                out.append(LRStream(emitted, 'l'))
                break
            if y.is_infinite:
                out.append(LRStream(emitted, 'n'))
                break
            if y in seen:
                start = seen[y]
                out.append(LRStream(emitted[:start], emitted[start:]))
                break
            if len(emitted) > budget:
                raise StepBudgetExceededError(f"LR expansion of {x} longer than {budget}")
            seen[y] = len(emitted)
            if y == ONE:
                todo.append((ZERO, emitted + 'n'))
                y, emitted = INF, emitted + 'l'
            elif y < ONE:
                y, emitted = mobius(L.inverse(), y), emitted + 'l'
            else:
                y, emitted = mobius(N.inverse(), y), emitted + 'n'
    return sorted(set(out), key=str)


# Infinite products ---------------------------------------------------------

@dataclass(frozen=True)
class ArrowPath:
    """Eventually periodic sequence of arrow labels."""
    preperiod: Tuple[str, ...]
    period: Tuple[str, ...]

    def __post_init__(self):
        pre, per = canonical_cycle(self.preperiod, self.period)
        object.__setattr__(self, 'preperiod', pre)
        object.__setattr__(self, 'period', per)

    @property
    def purely_periodic(self) -> bool:
        return not self.preperiod

    def to_json(self) -> dict:
        return {"preperiod": list(self.preperiod), "period": list(self.period)}

    def __str__(self) -> str:
        return ''.join(self.preperiod) + '(' + ''.join(self.period) + ')^w'


def _product(arrows: Sequence[Arrow]) -> Tuple[int, Word, int]:
    if not arrows:
        raise ValidationError("empty arrow sequence", "path")
    word = Word()
    for a, b in zip(arrows, arrows[1:]):
        if a.target != b.source:
            raise NotComposableError(f"{a} ends at {a.target} but {b} starts at {b.source}")
    for a in arrows:
        word = concat(word, a.word)
    return arrows[0].source, word, arrows[-1].target


def phi(preperiod: Sequence[Arrow], period: Sequence[Arrow] = ()) -> Tuple[int, object]:
    """
    Product of an arrow path.

    A finite path gives (node, Word); an eventually periodic one gives
    (node, LRStream), the positionwise limit of the growing products.

    Raises:
        NotComposableError: if consecutive arrows do not share a node
    """
    if not period:
        source, word, _ = _product(preperiod)
        return source, word
    head = list(preperiod) + list(period)
    _product(head + list(period[:1]))
    source = head[0].source
    _, q, _ = _product(period)
    if q.flip:
        q = concat(q, q)
    if not q.body:
        raise ValidationError("period multiplies out to a word without letters", "path")
    prefix = Word()
    for a in preperiod:
        prefix = concat(prefix, a.word)
    body = swap_letters(q.body) if prefix.flip else q.body
    return source, LRStream(prefix.body, body)


def path_arrows(code: Code, labels: Iterable[str]) -> List[Arrow]:
    return [code.arrow(label) for label in labels]


# Transducer ----------------------------------------------------------------

TNode = Tuple[int, str, bool]   # (node, prefix over l/n, primed)


@dataclass(frozen=True)
class TEdge:
    source: TNode
    letter: str
    target: TNode
    output: Optional[str] = None


@dataclass
class Transducer:
    code: Code
    nodes: List[TNode]
    edges: List[TEdge]
    _out: Dict[TNode, Dict[str, List[TEdge]]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        table: Dict[TNode, Dict[str, List[TEdge]]] = defaultdict(lambda: defaultdict(list))
        for e in self.edges:
            table[e.source][e.letter].append(e)
        self._out = table

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def moves(self, node: TNode, letter: str) -> List[TEdge]:
        return self._out.get(node, {}).get(letter, [])


def node_name(v: TNode) -> str:
    node, prefix, primed = v
    shown = swap_letters(prefix) if primed else prefix
    return f"{node}{shown}" + ("'" if primed else "")


def build_transducer(code: Code) -> Transducer:
    """Prefix nodes, their primed mirrors and the z / z|a edges of every splitting."""
    prefixes: Set[Tuple[int, str]] = set()
    for node in range(code.nodes):
        prefixes.add((node, ''))
    for a in code.arrows:
        for k in range(len(a.word.body)):
            prefixes.add((a.source, a.word.body[:k]))
    nodes: List[TNode] = sorted((i, u, p) for i, u in prefixes for p in (False, True))
    edges: List[TEdge] = []
    for i, u in sorted(prefixes):
        for z in 'ln':
            if (i, u + z) in prefixes:
                edges.append(TEdge((i, u, False), z, (i, u + z, False)))
                edges.append(TEdge((i, u, True), swap_letters(z), (i, u + z, True)))
    for a in code.arrows:
        body = a.word.body
        if not body:
            continue
        u, z = body[:-1], body[-1]
        lands_primed = a.word.flip
        edges.append(TEdge((a.source, u, False), z, (a.target, '', lands_primed), a.label))
        edges.append(TEdge((a.source, u, True), swap_letters(z), (a.target, '', not lands_primed), a.label))
    logger.debug("transducer with %d nodes and %d edges", len(nodes), len(edges))
    return Transducer(code, nodes, edges)


@dataclass
class _Token:
    parent: Optional[TNode]
    output: Optional[str]


def run_transducer(t: Transducer, start: int, z: LRStream, steps: int = 10000) -> List[ArrowPath]:
    """
    Parallel-token run on an eventually periodic input.

    Token configurations are keyed by the node set and the input phase; once
    one repeats, the surviving paths are the cycles of the ancestor map over
    one configuration period.

    Raises:
        AllTokensDiedError: if every token dies
        CycleNotFoundError: if no configuration repeats within `steps`
        InvariantViolation: if two tokens ever share a node
    """
    if steps < 1:
        raise ValidationError("steps must be at least 1", "steps")
    layers: List[Dict[TNode, _Token]] = [{(start, '', False): _Token(None, None)}]
    seen: Dict[Tuple[int, frozenset], int] = {}
    for step in range(steps):
        phase = z.phase(step)
        if phase is not None:
            key = (phase, frozenset(layers[-1]))
            if key in seen:
                return _harvest(layers, seen[key], step)
            seen[key] = step
        letter = z.letter(step)
        nxt: Dict[TNode, _Token] = {}
        for v in layers[-1]:
            for e in t.moves(v, letter):
                if e.target in nxt:
                    raise InvariantViolation(f"two tokens meet at {node_name(e.target)} after {step + 1} letters")
                nxt[e.target] = _Token(v, e.output)
        if not nxt:
            raise AllTokensDiedError(f"all tokens died after {step + 1} letters of {z}")
        layers.append(nxt)
    raise CycleNotFoundError(f"no configuration cycle within {steps} letters")


def _lineage(layers: List[Dict[TNode, _Token]], t_from: int, t_to: int, v: TNode) -> Tuple[TNode, List[str]]:
    out: List[str] = []
    for t in range(t_to, t_from, -1):
        tok = layers[t][v]
        if tok.output is not None:
            out.append(tok.output)
        v = tok.parent
    return v, out[::-1]


def _harvest(layers: List[Dict[TNode, _Token]], t1: int, t2: int) -> List[ArrowPath]:
    ancestor: Dict[TNode, TNode] = {}
    segment: Dict[TNode, List[str]] = {}
    for v in layers[t2]:
        ancestor[v], segment[v] = _lineage(layers, t1, t2, v)
    # successor along surviving lines: u at t1 continues as the w with ancestor[w] == u
    on_cycle = []
    for v in ancestor:
        u, hops = v, 0
        while hops <= len(ancestor):
            u = ancestor.get(u)
            hops += 1
            if u is None or u == v:
                break
        if u == v:
            on_cycle.append(v)
    children = {ancestor[w]: w for w in on_cycle}
    paths = set()
    for v in on_cycle:
        _, head = _lineage(layers, 0, t1, v)
        period: List[str] = []
        u = v
        while True:
            u = children[u]
            period.extend(segment[u])
            if u == v:
                break
        if not period:
            raise CycleNotFoundError("a surviving token outputs nothing over its cycle")
        paths.add(ArrowPath(tuple(head), tuple(period)))
    if not paths:
        raise AllTokensDiedError("no token survives the configuration cycle")
    logger.debug("configuration cycle between letters %d and %d, %d paths", t1, t2, len(paths))
    return sorted(paths, key=str)


def fiber(x: QNum, node: int, spec: CFSpec, transducer: Optional[Transducer] = None,
          steps: int = 10000) -> List[ArrowPath]:
    """
    All symbolic orbits of x from `node`.

    Raises:
        NotInAttractorError: if x is outside H_node (or I_node without H)
        InvariantViolation: if the fiber exceeds the transducer node count, or a
            purely periodic member is not alone
    """
    if spec.H is not None and not spec.H[node].contains(x):
        raise NotInAttractorError(f"{x} is not in H_{node}")
    t = transducer or build_transducer(spec.code)
    found: Set[ArrowPath] = set()
    died = 0
    streams = lr_expand(x, spec.intervals[node])
    for z in streams:
        try:
            found.update(run_transducer(t, node, z, steps))
        except AllTokensDiedError:
            died += 1
    if died == len(streams):
        raise AllTokensDiedError(f"{x} has no symbolic orbit from node {node}")
    if len(found) > t.node_count:
        raise InvariantViolation(f"fiber of {x} has {len(found)} > {t.node_count} members")
    if any(p.purely_periodic for p in found) and len(found) != 1:
        raise InvariantViolation(f"purely periodic point {x} has {len(found)} symbolic orbits")
    return sorted(found, key=str)


def demo():
    """Two symbolic orbits of a point of the tau-minus-one system."""
    from src.utils import load_preset
    spec = load_preset("tau-minus-one")
    t = build_transducer(spec.code)
    print(f"transducer nodes: {', '.join(node_name(v) for v in t.nodes)}")
    for path in run_transducer(t, 1, parse_stream("nl(ln)*")):
        print(f"  {path}")


if __name__ == '__main__':
    demo()
