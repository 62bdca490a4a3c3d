"""
Unit tests for LR expansions, infinite products and the symbolic-orbit transducer
"""

import random
import pytest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.errors import (
    AllTokensDiedError, NotComposableError, NotInAttractorError, NotInIntervalError,
    ParseError,
)
from src.exact import INF, ONE, TAU, QNum
from src.modular import IDENTITY, L, UnimodInterval
from src.transducer import (
    ArrowPath, LRStream, build_transducer, canonical_cycle, fiber, node_name,
    parse_stream, path_arrows, phi, run_transducer, stream_point, lr_expand,
)
from src.dynamics import enumerate_quadratics
from src.utils import load_preset
from src.words import Word, concat


HALF_LINE = UnimodInterval(IDENTITY)


@pytest.fixture(scope="module")
def tau():
    return load_preset("tau-minus-one")


class TestStreams:
    """Eventually periodic sequences over l and n"""

    def test_canonical_cycle(self):
        assert canonical_cycle("x", "abab") == (("x",), ("a", "b"))
        assert canonical_cycle("ab", "ab") == ((), ("a", "b"))

    def test_stream_normalized(self):
        assert LRStream("nll", "nl") == LRStream("nl", "ln")
        assert str(LRStream("", "lnln")) == "(ln)*"

    def test_parse(self):
        assert parse_stream("nl(ln)*") == LRStream("nl", "ln")
        assert parse_stream("(n)") == LRStream("", "n")

    @pytest.mark.parametrize("bad", ["abc", "ln", "(lx)*", "()*"])
    def test_parse_errors(self, bad):
        with pytest.raises(ParseError):
            parse_stream(bad)

    def test_stream_point(self):
        assert stream_point(parse_stream("(ln)*")) == TAU - 1
        assert stream_point(parse_stream("(n)*")) == INF
        assert stream_point(parse_stream("l(n)*")) == ONE


class TestLRExpansion:
    """Expansions relative to a unimodular interval"""

    def test_golden(self):
        assert lr_expand(TAU - 1, HALF_LINE) == [LRStream("", "ln")]

    def test_rational_has_two(self):
        assert lr_expand(ONE, HALF_LINE) == [LRStream("l", "n"), LRStream("n", "l")]

    def test_infinity(self):
        assert lr_expand(INF, HALF_LINE) == [LRStream("", "n")]

    def test_relative_to_unit_interval(self):
        assert lr_expand(QNum(15, -1, 22, 5), UnimodInterval(L)) == [LRStream("nl", "ln")]

    def test_outside(self):
        with pytest.raises(NotInIntervalError):
            lr_expand(QNum(-1), UnimodInterval(L))


class TestProducts:
    """Finite and eventually periodic arrow products"""

    def test_finite(self, tau):
        node, word = phi(path_arrows(tau.code, ["o", "q"]))
        assert (node, word) == (0, Word("nnl"))

    def test_periodic(self, tau):
        code = tau.code
        assert phi(path_arrows(code, ["s", "o"]), path_arrows(code, ["q"])) == (1, LRStream("nl", "ln"))
        assert phi(path_arrows(code, ["s", "r", "s"]), path_arrows(code, ["q"])) == (1, LRStream("nl", "ln"))

    def test_not_composable(self, tau):
        with pytest.raises(NotComposableError):
            phi(path_arrows(tau.code, ["o", "s"]))


class TestTransducer:
    """Construction and parallel runs"""

    def test_node_counts(self, tau):
        assert build_transducer(tau.code).node_count == 10
        assert build_transducer(load_preset("farey").code).node_count == 2

    def test_node_names(self, tau):
        names = [node_name(v) for v in build_transducer(tau.code).nodes]
        assert "0nn" in names
        assert "1n'" in names

    def test_two_orbits(self, tau):
        paths = run_transducer(build_transducer(tau.code), 1, parse_stream("nl(ln)*"))
        assert set(paths) == {ArrowPath(("s", "o"), ("q",)), ArrowPath(("s", "r", "s"), ("q",))}

    def test_dead_input(self, tau):
        with pytest.raises(AllTokensDiedError):
            run_transducer(build_transducer(tau.code), 0, parse_stream("(l)*"))


def live_prefixes(code, node, z, depth):
    """Label sequences from node whose product agrees with z up to grade depth."""
    out = set()
    stack = [(node, Word(), ())]
    while stack:
        at, word, labels = stack.pop()
        if word.grade >= depth:
            out.add(labels)
            continue
        for a in code.arrows_from(at):
            w = concat(word, a.word)
            if all(w.body[i] == z.letter(i) for i in range(w.grade)):
                stack.append((a.target, w, labels + (a.label,)))
    return out


def cut(code, labels, depth):
    grade = 0
    for k, label in enumerate(labels):
        grade += code.arrow(label).grade
        if grade >= depth:
            return tuple(labels[:k + 1])
    raise AssertionError(f"{labels} stays below grade {depth}")


class TestSoundness:
    """Transducer outputs against direct products of arrows"""

    def test_outputs_multiply_back(self, tau):
        z = parse_stream("nl(ln)*")
        for p in run_transducer(build_transducer(tau.code), 1, z):
            pre, per = path_arrows(tau.code, p.preperiod), path_arrows(tau.code, p.period)
            assert phi(pre, per) == (1, z)

    def test_every_deep_prefix_is_output(self, tau):
        code = tau.code
        z = parse_stream("nl(ln)*")
        live = {cut(code, labels, 6) for labels in live_prefixes(code, 1, z, 12)}
        paths = run_transducer(build_transducer(code), 1, z)
        outputs = {cut(code, list(p.preperiod) + list(p.period) * 12, 6) for p in paths}
        assert live == outputs == {("s", "o", "q", "q"), ("s", "r", "s", "q")}

    @pytest.mark.parametrize("name", ["farey", "ceiling", "even", "tau-minus-one"])
    def test_fibers_of_quadratic_points(self, name):
        spec = load_preset(name)
        t = build_transducer(spec.code)
        points = [(node, omega)
                  for node in range(spec.nodes)
                  for D in (5, 8, 12, 13, 17, 20, 21, 24)
                  for _, omega, _ in enumerate_quadratics(D, spec.H[node].hull(), 3)
                  if spec.H[node].contains(omega)]
        rng = random.Random(3)
        for node, x in rng.sample(points, min(12, len(points))):
            paths = fiber(x, node, spec, t)
            assert 1 <= len(paths) <= t.node_count
            expansions = lr_expand(x, spec.intervals[node])
            for p in paths:
                source, z = phi(path_arrows(spec.code, p.preperiod), path_arrows(spec.code, p.period))
                assert source == node
                assert z in expansions


class TestFiber:
    """All symbolic orbits of a point"""

    def test_quadratic_point(self, tau):
        paths = fiber(QNum(15, -1, 22, 5), 1, tau)
        assert [str(p) for p in paths] == ["so(q)^w", "srs(q)^w"]

    def test_purely_periodic_point_is_alone(self, tau):
        # attracting fixed point of B_o B_q
        paths = fiber(QNum(-2, 1, 1, 3), 0, tau)
        assert paths == [ArrowPath((), ("o", "q"))]
        assert paths[0].purely_periodic

    def test_outside_attractor(self, tau):
        with pytest.raises(NotInAttractorError):
            fiber(QNum.rational(-1, 2), 0, tau)

    def test_path_json(self):
        assert ArrowPath(("s",), ("q",)).to_json() == {"preperiod": ["s"], "period": ["q"]}


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
