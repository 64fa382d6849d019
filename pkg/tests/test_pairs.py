import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from uniqlab import pairs
from uniqlab.errors import (ConjugacyError, ParameterError, TooFewPointsError)


def lattice(p=2.0, alpha=0.25, j_max=10_000, shift=0.0):
    return pairs.make_power_lattice(p, alpha, j_max, shift)


class TestPowerLattice:
    def test_closed_form_values(self):
        lat = lattice()
        pos = lat.side_moduli(1)
        assert_allclose(pos[7], 2.0, rtol=1e-14)          # (2*0.25*8)^(1/2)
        assert_allclose(pos[0], math.sqrt(0.5), rtol=1e-14)

    def test_odd_symmetry_without_shift(self):
        lat = lattice(p=1.7, alpha=0.3, j_max=50)
        assert_allclose(lat.points, -lat.points[::-1], rtol=1e-14)

    @pytest.mark.parametrize("bad", [
        dict(p=1.0, alpha=0.2, j_max=10),
        dict(p=0.5, alpha=0.2, j_max=10),
        dict(p=2.0, alpha=0.0, j_max=10),
        dict(p=2.0, alpha=-1.0, j_max=10),
        dict(p=2.0, alpha=0.2, j_max=1),
    ])
    def test_rejects_bad_parameters(self, bad):
        with pytest.raises(ParameterError):
            pairs.make_power_lattice(**bad)

    def test_generator_tail_converges(self):
        lat = lattice(p=2.0, alpha=0.25, j_max=5000)
        est = pairs.density_functional(lat, 2.0, tail_start=1000)
        assert abs(est.sup - 0.25) < 0.001


class TestDensityFunctional:
    def test_lattice_tail_estimate(self):
        est = pairs.density_functional(lattice(), 2.0, tail_start=100)
        assert 0.249 <= est.alpha_plus <= 0.251
        assert 0.249 <= est.alpha_minus <= 0.251

    def test_equispaced_points_diverge_for_p2(self):
        # |lambda_j| * gap is unbounded for an arithmetic lattice when p > 1
        small = pairs.SampleSequence(np.arange(1.0, 101.0), side="positive")
        big = pairs.SampleSequence(np.arange(1.0, 1001.0), side="positive")
        e1 = pairs.density_functional(small, 2.0, tail_start=0)
        e2 = pairs.density_functional(big, 2.0, tail_start=0)
        assert e2.sup > e1.sup > 1.0

    def test_single_gap_case(self):
        seq = pairs.SampleSequence(np.array([1.5, 2.25]), side="positive")
        est = pairs.density_functional(seq, 2.0, tail_start=0)
        assert_allclose(est.alpha_plus, 1.5 * (2.25 - 1.5), rtol=1e-14)

    def test_too_few_points(self):
        seq = pairs.SampleSequence(np.array([1.0, 2.0, 3.0]), side="positive")
        with pytest.raises(TooFewPointsError):
            pairs.density_functional(seq, 2.0, tail_start=5)

    def test_refinement_monotone(self):
        lat = lattice(j_max=2000)
        sups = [pairs.density_functional(lat, 2.0, ts).sup
                for ts in (10, 50, 200, 1000)]
        assert all(a >= b - 1e-15 for a, b in zip(sups, sups[1:]))

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    @pytest.mark.parametrize("alpha", [0.1, 0.25, 0.5])
    def test_generated_density_within_one_percent(self, p, alpha):
        lat = pairs.make_power_lattice(p, alpha, 4000)
        est = pairs.density_functional(lat, p, tail_start=100)
        assert abs(est.sup / alpha - 1.0) < 0.01
        assert abs(est.inf / alpha - 1.0) < 0.01


def _estimate(sup, inf=None, exponent=2.0):
    inf = sup if inf is None else inf
    return pairs.DensityEstimate(sup, sup, inf, inf, 0, 1, exponent)


class TestClassifyPair:
    def setup_method(self):
        lat = lattice(j_max=10)
        self.spec = pairs.PairSpec(lat, lat, 2.0)

    def test_supercritical(self):
        v = pairs.classify_pair(self.spec, _estimate(0.4), _estimate(0.4))
        assert v.kind == "supercritical"
        assert_allclose(v.product_value, 0.4, rtol=1e-14)

    def test_subcritical(self):
        v = pairs.classify_pair(self.spec, _estimate(0.6), _estimate(0.6))
        assert v.kind == "subcritical"
        assert_allclose(v.product_value, 0.6, rtol=1e-14)

    def test_boundary_indeterminate(self):
        v = pairs.classify_pair(self.spec, _estimate(0.5), _estimate(0.5))
        assert v.kind == "indeterminate"

    def test_monotone_in_density(self):
        # enlarging the sups never moves subcritical toward supercritical
        order = {"supercritical": 0, "indeterminate": 1, "subcritical": 2}
        rng = np.random.default_rng(11)
        for _ in range(50):
            lo = rng.uniform(0.05, 1.0)
            hi = lo + rng.uniform(0.0, 0.5)
            v_lo = pairs.classify_pair(self.spec, _estimate(lo), _estimate(lo))
            v_hi = pairs.classify_pair(self.spec, _estimate(hi), _estimate(hi))
            assert order[v_hi.kind] >= order[v_lo.kind]

    def test_exponent_mismatch_rejected(self):
        with pytest.raises(ParameterError):
            pairs.classify_pair(self.spec, _estimate(0.4, exponent=3.0),
                                _estimate(0.4))


class TestBeurlingCondition:
    def test_unit_weights_match_hardy_constant(self):
        lat = lattice(j_max=10)
        spec = pairs.PairSpec(lat, lat, 2.0, a=1.0, b=1.0)
        rep = pairs.beurling_condition_check(spec, _estimate(0.4), _estimate(0.4))
        assert rep.bound_lambda == 0.5
        assert rep.bound_mu == 0.5
        assert rep.passed

    def test_asymmetric_weights(self):
        lat = lattice(j_max=10)
        spec = pairs.PairSpec(lat, lat, 2.0, a=1.0, b=4.0)
        rep = pairs.beurling_condition_check(spec, _estimate(0.4), _estimate(0.2))
        assert_allclose(rep.bound_lambda, 1.0, rtol=1e-14)
        assert_allclose(rep.bound_mu, 0.25, rtol=1e-14)

    def test_bound_product_is_half(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            p = rng.uniform(1.1, 5.0)
            q = pairs.conjugate_exponent(p)
            a, b = rng.uniform(0.1, 10.0, size=2)
            prod = ((0.5 * (b / a) ** (1 / q)) ** (1 / p)
                    * (0.5 * (a / b) ** (1 / p)) ** (1 / q))
            assert abs(prod - 0.5) <= 1e-12


class TestMorganThreshold:
    def test_hardy_point(self):
        assert_allclose(pairs.morgan_threshold(2.0, 2.0), 1.0, rtol=1e-14)

    def test_p4(self):
        assert_allclose(pairs.morgan_threshold(4.0, 4.0 / 3.0),
                        0.5946035575013603, rtol=1e-12)

    def test_limit_r_to_one(self):
        p = 1.0001
        assert pairs.morgan_threshold(p, pairs.conjugate_exponent(p)) < 0.01

    def test_conjugacy_violation(self):
        with pytest.raises(ConjugacyError):
            pairs.morgan_threshold(2.0, 3.0)


class TestTrigInequality:
    def test_p2_at_pi_over_8(self):
        rep = pairs.trig_inequality_check(2.0, [math.pi / 8])
        assert_allclose(rep.lhs[0], 0.5, rtol=1e-14)
        assert_allclose(rep.rhs[0], 0.45508986056222733, rtol=1e-12)
        assert rep.margin[0] > 0.04

    def test_margin_vanishes_at_origin(self):
        rep = pairs.trig_inequality_check(2.0, [1e-4])
        assert 0 < rep.margin[0] < 1e-9
        assert_allclose(rep.lhs[0] / rep.rhs[0], 1.0, atol=1e-7)

    def test_p3_at_pi_over_12(self):
        rep = pairs.trig_inequality_check(3.0, [math.pi / 12])
        assert_allclose(rep.lhs[0], 1.0 / 3.0, rtol=1e-12)
        assert_allclose(rep.rhs[0], 0.2905145555072514, rtol=1e-12)
        assert rep.margin[0] > 0

    @pytest.mark.parametrize("p", [1.2, 1.5, 2.0, 3.0, 5.0])
    def test_positive_margin_on_interior_grids(self, p):
        n = 50
        grid = math.pi / (2 * p) * np.arange(1, n + 1) / (n + 1)
        rep = pairs.trig_inequality_check(p, grid)
        assert rep.min_margin > 0

    def test_rejects_boundary_angles(self):
        with pytest.raises(ParameterError):
            pairs.trig_inequality_check(2.0, [0.0])
        with pytest.raises(ParameterError):
            pairs.trig_inequality_check(2.0, [math.pi / 4])


class TestEtaSubstitution:
    def test_hand_worked_case(self):
        # eta = 2*1*(0.8)^{-1} = 2.5; both sides equal 1.5625
        assert pairs.eta_substitution_check(0.4, 1.0, 2.0, 2.0) <= 1e-13

    def test_second_case(self):
        assert pairs.eta_substitution_check(0.5, 0.5, 2.0, 2.0) <= 1e-12

    def test_random_inputs(self):
        rng = np.random.default_rng(13)
        for _ in range(1000):
            p = rng.uniform(1.1, 10.0)
            resid = pairs.eta_substitution_check(
                rng.uniform(0.1, 2.0), rng.uniform(0.1, 10.0),
                p, pairs.conjugate_exponent(p))
            assert resid <= 1e-12


class TestCriticalityAlgebra:
    def test_above_threshold(self):
        res = pairs.criticality_algebra_check(0.6, 0.6, 2.0, 2.0)
        assert res.lhs_holds and res.rhs_holds and res.equivalent
        assert_allclose(res.lhs_value, 1.2 ** 4, rtol=1e-14)
        assert_allclose(res.rhs_value, 1.2, rtol=1e-14)

    def test_below_threshold(self):
        res = pairs.criticality_algebra_check(0.4, 0.4, 2.0, 2.0)
        assert not res.lhs_holds and not res.rhs_holds and res.equivalent

    def test_boundary_both_sides_equal_one(self):
        res = pairs.criticality_algebra_check(0.5, 0.5, 2.0, 2.0)
        assert_allclose(res.lhs_value, 1.0, rtol=1e-14)
        assert_allclose(res.rhs_value, 1.0, rtol=1e-14)
        assert res.equivalent

    def test_random_including_near_boundary(self):
        rng = np.random.default_rng(17)
        for i in range(1000):
            p = rng.uniform(1.1, 5.0)
            q = pairs.conjugate_exponent(p)
            if i % 3:
                alpha, beta = rng.uniform(0.05, 3.0, size=2)
            else:
                # near the boundary alpha^{1/p} beta^{1/q} = 1/2
                beta = rng.uniform(0.2, 1.0)
                target = (0.5 / beta ** (1 / q)) ** p
                alpha = target * (1.0 + rng.uniform(-1e-4, 1e-4))
            res = pairs.criticality_algebra_check(alpha, beta, p, q)
            assert res.equivalent


class TestSerialization:
    def test_csv_round_trip(self, tmp_path):
        lat = lattice(j_max=5)
        path = tmp_path / "seq.csv"
        pairs.sequence_to_csv(lat, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "j,lambda_j"
        assert len(lines) == 11
        j, x = lines[1].split(",")
        assert j == "-5"
        assert float(x) == lat.points[0]

    def test_generator_record_round_trip(self):
        lat = lattice(p=2.5, alpha=0.3, j_max=40, shift=0.1)
        rec = pairs.generator_record(lat)
        assert rec["kind"] == "power_lattice"
        rebuilt = pairs.sequence_from_generator(rec)
        assert_allclose(rebuilt.points, lat.points, rtol=1e-15)

    def test_pair_spec_recomputes_q(self):
        lat = lattice(j_max=5)
        spec = pairs.PairSpec(lat, lat, 3.0)
        assert_allclose(spec.q, 1.5, rtol=1e-15)
        with pytest.raises(ConjugacyError):
            pairs.PairSpec(lat, lat, 3.0, q=2.0)
