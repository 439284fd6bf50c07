import cmath
import math

import numpy as np
import pytest

from qnrsim import statevector as sv
from qnrsim.errors import MeanOffTarget, NotPrime, WrongResidueClass
from qnrsim.number_theory import jacobi, primes_below, qnr_set_bruteforce
from qnrsim.sampler import (
    RotationPlan,
    Schedule,
    build_instance,
    pipeline_stages,
    predicted_final,
    run_pipeline,
    sample_qnr,
    verify,
)
from qnrsim.statevector import Indicator

PRIMES_1_MOD_8 = [p for p in primes_below(1000) if p % 8 == 1]


class TestBuildInstance:
    def test_p41(self):
        inst, plan = build_instance(41)
        assert (inst.n, inst.N) == (6, 64)
        assert abs(plan.theta - math.acos(-3 / 5)) < 1e-15
        assert len(plan.even_qnr) == len(plan.odd_qnr) == 10
        assert plan.all_qnr.as_set() == qnr_set_bruteforce(41)

    def test_p17_degenerate(self):
        inst, plan = build_instance(17)
        assert (inst.n, inst.N) == (5, 32)
        assert plan.theta == math.pi

    def test_p97(self):
        inst, plan = build_instance(97)
        assert (inst.n, inst.N) == (7, 128)
        assert abs(math.cos(plan.theta) - (-1 / 3)) < 1e-15
        assert abs(math.sin(plan.theta) - math.sqrt(128 * (2 * 97 - 2 - 128)) / 96) < 1e-15

    @pytest.mark.parametrize("p", [3, 5, 7, 13, 43])
    def test_wrong_class(self, p):
        with pytest.raises(WrongResidueClass):
            build_instance(p)

    def test_not_prime(self):
        with pytest.raises(NotPrime):
            build_instance(33)

    @pytest.mark.parametrize("p", PRIMES_1_MOD_8)
    def test_plan_invariants(self, p):
        inst, plan = build_instance(p)
        assert plan.even_qnr.isdisjoint(plan.odd_qnr)
        assert len(plan.all_qnr) == (p - 1) // 2
        assert all(x < p for x in plan.all_qnr) and 0 not in plan.all_qnr
        assert all(x % 2 == 0 for x in plan.even_qnr) and all(x % 2 for x in plan.odd_qnr)
        assert 0 <= plan.theta <= math.pi
        assert abs(math.cos(plan.theta) - (1 - inst.N / (p - 1))) < 1e-15

    def test_values_above_p_never_marked(self):
        inst, plan = build_instance(41)
        above = [x for x in range(41, 64) if jacobi(x, 41) == -1]
        assert above and not set(above) & plan.all_qnr.as_set()


class TestPipeline:
    def test_p41_rotated_amplitudes(self):
        inst, plan = build_instance(41)
        rotated = pipeline_stages(inst, plan)["rotated"].amplitudes
        for x in plan.even_qnr:
            assert abs(rotated[x] - complex(-3 / 40, 1 / 10)) < 1e-15
        for x in plan.odd_qnr:
            assert abs(rotated[x] - complex(-3 / 40, -1 / 10)) < 1e-15
        # arithmetic from the worked example: (20 * (-3/40) + 44 / 8) / 64
        assert (20 * (-3 / 40) + 44 * (1 / 8)) / 64 == 1 / 16

    def test_p41_final(self):
        inst, plan = build_instance(41)
        final = run_pipeline(inst, plan)
        mask = plan.all_qnr.mask()
        assert np.max(np.abs(final.amplitudes[~mask])) < 1e-10
        assert np.max(np.abs(final.probabilities()[mask] - 1 / 20)) < 1e-12

    def test_p17_final_is_real(self):
        inst, plan = build_instance(17)
        final = run_pipeline(inst, plan).amplitudes
        for x in plan.all_qnr:
            assert abs(final[x] - 2 / math.sqrt(32)) < 1e-12
            assert abs(abs(final[x]) ** 2 - 1 / 8) < 1e-12

    @pytest.mark.parametrize("p", PRIMES_1_MOD_8)
    def test_schedules_agree(self, p):
        inst, plan = build_instance(p)
        a = run_pipeline(inst, plan, Schedule.TWO_STEP).amplitudes
        b = run_pipeline(inst, plan, Schedule.DIRECT).amplitudes
        assert np.max(np.abs(a - b)) < 1e-12

    @pytest.mark.parametrize("p", PRIMES_1_MOD_8)
    def test_rotated_mean_is_real(self, p):
        inst, plan = build_instance(p)
        m = sv.mean(pipeline_stages(inst, plan)["rotated"])
        assert abs(m.imag) < 1e-12
        assert abs(m - 1 / (2 * math.sqrt(inst.N))) < 1e-12

    def test_broken_split_trips_mean_check(self):
        inst, plan = build_instance(41)
        lopsided = RotationPlan(plan.theta, plan.all_qnr, Indicator.from_indices(inst.n, []))
        with pytest.raises(MeanOffTarget):
            run_pipeline(inst, lopsided, Schedule.DIRECT)

    def test_conjugate_pairing(self):
        inst, plan = build_instance(73)
        final = run_pipeline(inst, plan).amplitudes
        e = final[plan.even_qnr.indices]
        o = final[plan.odd_qnr.indices]
        assert np.max(np.abs(e[:, None] - np.conj(o)[None, :])) < 1e-12


class TestPrediction:
    def test_p41(self):
        inst, plan = build_instance(41)
        pred = predicted_final(inst, plan)
        assert abs(pred.squared_magnitude - 0.05) < 1e-15
        assert abs(pred.even_amplitude.real - 0.2) < 1e-12
        assert abs(abs(pred.even_amplitude) ** 2 - 0.05) < 1e-12

    @pytest.mark.parametrize("p", PRIMES_1_MOD_8)
    def test_closed_form_matches_rotation_formula(self, p):
        inst, plan = build_instance(p)
        pred = predicted_final(inst, plan)
        root = math.sqrt(inst.N)
        assert abs(pred.even_amplitude - (1 - cmath.exp(1j * plan.theta)) / root) < 1e-12
        assert abs(pred.odd_amplitude - (1 - cmath.exp(-1j * plan.theta)) / root) < 1e-12
        total = float(np.sum(np.abs(pred.amplitudes) ** 2))
        assert abs(total - 1) < 1e-12


class TestVerify:
    @pytest.mark.parametrize("p", [17, 41, 97, 113, 193, 257, 337, 401, 433, 449])
    def test_passes(self, p):
        rep = verify(p)
        assert rep.passed, rep.checks
        assert rep.path == "quantum"
        assert rep.max_deviation < 1e-10

    def test_classical(self):
        rep = verify(43)
        assert rep.path == "classical" and rep.shortcut == 42 and rep.passed
        assert rep.max_deviation is None

    def test_reports_unmarked_nonresidues_above_p(self):
        rep = verify(41)
        assert rep.nonresidues_above_p == sum(jacobi(x, 41) == -1 for x in range(41, 64))

    def test_tight_tolerance_fails_cleanly(self):
        rep = verify(41, tolerance=1e-30)
        assert not rep.passed
        assert rep.first_failure() is not None


class TestSampleQnr:
    def test_classical(self):
        assert sample_qnr(7, seed=0, count=5) == ([6] * 5, "classical")
        assert sample_qnr(13, seed=0, count=2) == ([2, 2], "classical")

    def test_quantum_membership(self):
        qnr = qnr_set_bruteforce(41)
        for seed in range(5):
            samples, path = sample_qnr(41, seed=seed, count=500)
            assert path == "quantum" and set(samples) <= qnr

    def test_every_sample_is_nonresidue(self):
        for p in (17, 73, 89, 97):
            samples, _ = sample_qnr(p, seed=p, count=300)
            assert all(jacobi(a, p) == -1 for a in samples)

    def test_reproducible(self):
        assert sample_qnr(41, 99, 1000)[0] == sample_qnr(41, 99, 1000)[0]
        assert sample_qnr(41, 99, 1000)[0] != sample_qnr(41, 100, 1000)[0]

    def test_not_prime(self):
        with pytest.raises(NotPrime):
            sample_qnr(15, 1, 1)
