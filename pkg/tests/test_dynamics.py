"""
Unit tests for realizations, Gauss-type maps, orbits and discriminant sweeps
"""

import pytest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.attractor import DUAL, compute_R
from src.dynamics import (
    BASE_ONLY, FAIL, GEOMETRIC, JUMP, SLOW, OrbitState, alpha_map, build_realization,
    check_discriminant, classical_galois_check, dual_orbit, duality_check,
    enumerate_quadratics, first_return, folded_nearest_map, galois_verify,
    gauss_map, geometric_check, jump_step, orbit, realization_check, renyi_map, step_F,
    step_Fdual,
)
from src.errors import (
    BadDiscriminantError, NotInAttractorError, RationalPointError, ValidationError,
)
from src.exact import INF, ONE, TAU, QNum
from src.intervals import FiniteAttractor, IntervalUnion
from src.utils import load_preset


ROOT2_M1 = QNum(-1, 1, 1, 2)      # sqrt(2) - 1
HALF_ROOT2 = QNum(0, 1, 2, 2)     # sqrt(2) / 2


def arc(lo, hi):
    return IntervalUnion.from_arc(QNum.coerce(lo), QNum.coerce(hi))


@pytest.fixture(scope="module")
def farey():
    return build_realization(load_preset("farey"))


@pytest.fixture(scope="module")
def ceiling():
    return build_realization(load_preset("ceiling"))


@pytest.fixture(scope="module")
def tau():
    return build_realization(load_preset("tau-minus-one"))


class TestRealization:
    """Verified attractors, parabolic arrows and R"""

    def test_tau_minus_one(self, tau):
        assert tau.P == ("o", "p")
        assert tau.J == ("q", "r", "s", "t")
        assert tau.R == (arc(INF, -2), arc(INF, -2))

    def test_refuted_candidate_rejected(self):
        spec = load_preset("tau-minus-one")
        bad = spec.with_candidates(H=(FiniteAttractor(arc(-1, 0)), FiniteAttractor(arc(0, 1))))
        with pytest.raises(ValidationError):
            build_realization(bad)

    def test_tampered_R_rejected(self):
        spec = load_preset("tau-minus-one").with_candidates(R=(arc(INF, -3), arc(INF, -3)))
        with pytest.raises(ValidationError):
            build_realization(spec)

    def test_R_may_be_omitted(self, tau):
        r = build_realization(tau.spec.with_candidates(R=None))
        assert r.R == tau.R

    @pytest.mark.parametrize("name", ["farey", "ceiling", "even", "odd", "nicf"])
    def test_R_matches_K(self, name):
        spec = load_preset(name)
        assert compute_R(spec, spec.K) == tuple(spec.R)

    def test_missing_candidates(self):
        spec = load_preset("farey").with_candidates(K=None)
        with pytest.raises(ValidationError):
            build_realization(spec)

    def test_geometric(self, tau):
        assert geometric_check(tau.spec, tau.H, tau.K) == GEOMETRIC

    def test_odd_is_base_only(self):
        spec = load_preset("odd")
        assert geometric_check(spec, spec.H, spec.K) == BASE_ONLY

    def test_shifted_fails_dual_check(self):
        spec = load_preset("tau-minus-one-shifted")
        assert geometric_check(spec, spec.H, spec.K) == BASE_ONLY
        verdict = realization_check(spec, DUAL, spec.K)
        assert verdict.status == FAIL
        assert verdict.witness is not None
        assert verdict.to_json()["nodes"] == list(verdict.nodes)


class TestSteps:
    """One application of F, F# and the jump transformation"""

    def test_glued_values_count_once(self, farey):
        assert step_F(farey, OrbitState(0, QNum.rational(1, 2))) == [OrbitState(0, ONE)]

    def test_step_outside(self, farey):
        with pytest.raises(NotInAttractorError):
            step_F(farey, OrbitState(0, QNum(2)))

    def test_dual_step(self, farey):
        # x -> 1/(x + 1) sends -1 - sqrt(2) to -sqrt(2)/2
        assert step_Fdual(farey, OrbitState(0, QNum(-1, -1, 1, 2))) == [OrbitState(0, -HALF_ROOT2)]

    def test_jump_fixed_point(self, tau):
        assert jump_step(tau, OrbitState(1, ROOT2_M1)) == [OrbitState(1, ROOT2_M1)]

    def test_jump_through_parabolic_run(self, tau):
        x = QNum(1, -1, 2, 3)
        assert jump_step(tau, OrbitState(0, x)) == [OrbitState(0, QNum(-2, 1, 1, 3))]

    def test_jump_at_rational(self, farey):
        with pytest.raises(RationalPointError):
            jump_step(farey, OrbitState(0, QNum.rational(1, 3)))

    def test_first_return_glued(self, tau):
        states = first_return(tau, OrbitState(0, QNum.rational(-5, 2)))
        assert states == (OrbitState(0, QNum(-2)), OrbitState(1, QNum(-2)))

    def test_first_return_outside_R(self, tau):
        with pytest.raises(NotInAttractorError):
            first_return(tau, OrbitState(0, QNum(-1)))


class TestOrbits:
    """Pure periodicity in slow and jump mode"""

    def test_golden_slow(self, farey):
        rep = orbit(farey, OrbitState(0, TAU - 1), SLOW)
        assert rep.purely_periodic
        assert rep.period == ["b"]

    def test_slow_but_not_jump(self, farey):
        start = OrbitState(0, HALF_ROOT2)
        slow = orbit(farey, start, SLOW)
        assert slow.purely_periodic
        assert sorted(slow.period) == ["a", "b"]
        jump = orbit(farey, start, JUMP)
        assert not jump.purely_periodic
        assert jump.preperiod == 1

    def test_jump_block(self, farey):
        rep = orbit(farey, OrbitState(0, ROOT2_M1), JUMP)
        assert rep.blocks == [("a", "b")]

    def test_dual_period_reversed(self, farey):
        fwd = orbit(farey, OrbitState(0, ROOT2_M1), JUMP)
        dual = dual_orbit(farey, OrbitState(0, ROOT2_M1.conjugate()), JUMP)
        assert dual.period == ["b", "a"]
        assert duality_check(fwd, dual) == (True, True)

    def test_orbit_outside(self, farey):
        with pytest.raises(NotInAttractorError):
            orbit(farey, OrbitState(0, QNum(-1, 0, 2)))


class TestConjugacies:
    """First return maps against classical maps"""

    @pytest.mark.parametrize("x", [QNum(-1, -1, 1, 2), -TAU - 1])
    def test_farey_return_is_gauss(self, farey, x):
        (state,) = first_return(farey, OrbitState(0, x))
        assert -1 / state.x == gauss_map(-1 / x)

    def test_ceiling_return_is_renyi(self, ceiling):
        (state,) = first_return(ceiling, OrbitState(0, TAU))
        assert state.x == TAU + 1
        assert 1 - 1 / state.x == renyi_map(1 - 1 / TAU)

    def test_alpha_map(self):
        assert alpha_map(TAU - 1, ROOT2_M1) == ROOT2_M1

    def test_folded_nearest(self):
        assert folded_nearest_map(ROOT2_M1) == ROOT2_M1


class TestDiscriminants:
    """Enumeration of quadratic points and Galois sweeps"""

    @pytest.mark.parametrize("D", [4, 6, 9, 0, -3])
    def test_bad_discriminant(self, D):
        with pytest.raises(BadDiscriminantError):
            check_discriminant(D)

    def test_golden_form_enumerated(self):
        found = enumerate_quadratics(5, arc(0, 1), 3)
        assert any(form.to_text() == "[1,1,-1]+" and omega == TAU - 1 for form, omega, _ in found)
        for _, omega, _ in found:
            assert arc(0, 1).contains(omega)

    def test_unbounded_window(self):
        with pytest.raises(ValidationError):
            enumerate_quadratics(5, arc(INF, -2), 3)

    def test_farey_jump_sweep(self, farey):
        report = galois_verify(farey, dmin=8, dmax=8, f1max=3, mode=JUMP)
        assert report.geometric == GEOMETRIC
        assert report.counterexamples == []
        rec = next(r for r in report.records if r["omega"] == ROOT2_M1.to_text())
        assert rec["purely_periodic"] and rec["criterion_met"]
        assert rec["period_blocks"] == ["ab"]
        assert rec["dual_period_labels"] == "ba"
        assert rec["duality_ok"]
        checked, failures = classical_galois_check(report.records)
        assert checked >= 1
        assert failures == []

    def test_farey_jump_sweep_wide(self, farey):
        report = galois_verify(farey, dmin=5, dmax=60, f1max=8, mode=JUMP)
        periodic = [rec for rec in report.records if rec["purely_periodic"]]
        assert len(periodic) >= 50
        assert report.counterexamples == []
        assert report.duality_failures == []
        assert all(rec["duality_ok"] for rec in periodic)
        checked, failures = classical_galois_check(report.records)
        assert checked == len(periodic)
        assert failures == []

    @pytest.mark.parametrize("name", ["ceiling", "even", "odd", "nicf", "tau-minus-one"])
    def test_preset_sweep(self, name):
        spec = load_preset(name)
        report = galois_verify(build_realization(spec), dmin=5, dmax=24, f1max=4,
                               mode=spec.default_mode)
        assert any(rec["purely_periodic"] for rec in report.records)
        assert report.counterexamples == []
        assert report.duality_failures == []

    def test_slow_sweep_beyond_farey(self, tau):
        report = galois_verify(tau, dmin=5, dmax=13, f1max=3, mode=SLOW)
        assert report.records
        assert report.counterexamples == []
        assert report.duality_failures == []

    def test_summary_frame(self, farey):
        report = galois_verify(farey, dmin=5, dmax=8, f1max=2, mode=SLOW)
        summary = report.summary()
        assert list(summary["node"]) == [0]
        assert int(summary["counterexamples"].sum()) == 0


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
