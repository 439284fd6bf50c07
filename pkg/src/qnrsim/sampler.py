"""Exact nonresidue sampling by complex rotation plus one mean inversion.

For a prime p = 1 mod 8 with N/2 < p < N = 2**n, the even nonresidues below
p are rotated by +theta and the odd ones by -theta, where
cos(theta) = 1 - N/(p - 1). The rotated imaginary parts cancel in the mean,
which lands at 1/(2 sqrt(N)); inverting about it zeroes every
non-nonresidue amplitude and leaves each nonresidue with probability
2/(p - 1).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import statevector as sv
from .errors import InvalidInput, MeanOffTarget, WrongResidueClass
from .number_theory import (
    OddPrimeInstance,
    jacobi,
    qnr_set_bruteforce,
    qnr_shortcut,
    require_odd_prime,
)
from .statevector import Indicator, StateVector

DEFAULT_TOLERANCE = 1e-10
IDENTITY_TOLERANCE = 1e-12
MEAN_TOLERANCE = 1e-9


class Schedule(str, enum.Enum):
    TWO_STEP = "two_step"  # -2 theta on odd, then +theta on all
    DIRECT = "direct"  # +theta on even, -theta on odd


@dataclass(frozen=True)
class RotationPlan:
    theta: float
    even_qnr: Indicator
    odd_qnr: Indicator
    schedule: Schedule = Schedule.TWO_STEP

    @property
    def all_qnr(self) -> Indicator:
        return self.even_qnr.union(self.odd_qnr)


@dataclass(frozen=True)
class PredictedFinalState:
    amplitudes: np.ndarray
    even_amplitude: complex
    odd_amplitude: complex
    squared_magnitude: float


def rotation_angle(p: int, N: int) -> float:
    cos_theta = 1.0 - N / (p - 1)
    # N < 2p and both even give N <= 2(p - 1), so |cos| <= 1
    assert -1.0 <= cos_theta <= 1.0, f"arccos argument {cos_theta} out of domain"
    return math.acos(cos_theta)


def qnr_indicators(instance: OddPrimeInstance) -> tuple[Indicator, Indicator]:
    """Even and odd members of f(x) = [jacobi(x, p) = -1 and x < p]."""
    p, N = instance.p, instance.N
    jacobi_neg = np.fromiter((jacobi(x, p) == -1 for x in range(N)), dtype=bool, count=N)
    below_p = np.arange(N) < p
    f = Indicator.from_mask(jacobi_neg & below_p)
    return f.split_parity()


def build_instance(p: int, schedule: Schedule = Schedule.TWO_STEP) -> tuple[OddPrimeInstance, RotationPlan]:
    instance = OddPrimeInstance.from_prime(p)
    if instance.residue_class_mod8 != 1:
        raise WrongResidueClass(
            f"p = {p} is {instance.residue_class_mod8} mod 8; use the classical shortcut {qnr_shortcut(p)}"
        )
    sv.check_qubits(instance.n)
    even, odd = qnr_indicators(instance)
    quarter = (instance.p - 1) // 4
    if len(even) != quarter or len(odd) != quarter:
        raise AssertionError(f"parity split {len(even)}/{len(odd)} != {quarter}/{quarter} for p = {p}")
    plan = RotationPlan(rotation_angle(instance.p, instance.N), even, odd, Schedule(schedule))
    return instance, plan


def rotate(state: StateVector, plan: RotationPlan, schedule: Schedule | None = None) -> StateVector:
    schedule = plan.schedule if schedule is None else Schedule(schedule)
    if schedule is Schedule.TWO_STEP:
        state = sv.phase_rotate(state, plan.odd_qnr, -2.0 * plan.theta)
        return sv.phase_rotate(state, plan.all_qnr, plan.theta)
    state = sv.phase_rotate(state, plan.even_qnr, plan.theta)
    return sv.phase_rotate(state, plan.odd_qnr, -plan.theta)


def pipeline_stages(
    instance: OddPrimeInstance, plan: RotationPlan, schedule: Schedule | None = None
) -> dict[str, StateVector]:
    """States after preparation, after rotation, and after inversion."""
    initial = sv.uniform(instance.n)
    rotated = rotate(initial, plan, schedule)
    target = 1.0 / (2.0 * math.sqrt(instance.N))
    got = sv.mean(rotated)
    if abs(got - target) > MEAN_TOLERANCE:
        raise MeanOffTarget(f"pre-inversion mean {got} != {target} for p = {instance.p}")
    return {"initial": initial, "rotated": rotated, "final": sv.invert_about_mean(rotated)}


def run_pipeline(instance: OddPrimeInstance, plan: RotationPlan, schedule: Schedule | None = None) -> StateVector:
    return pipeline_stages(instance, plan, schedule)["final"]


def predicted_final(instance: OddPrimeInstance, plan: RotationPlan) -> PredictedFinalState:
    N, p, theta = instance.N, instance.p, plan.theta
    root = math.sqrt(N)
    even = (1 - complex(math.cos(theta), math.sin(theta))) / root
    odd = (1 - complex(math.cos(theta), -math.sin(theta))) / root
    # second closed form, written in p and N only
    re = root / (p - 1)
    im = math.sqrt(2 * p - 2 - N) / (p - 1)
    for a, b in ((even, complex(re, -im)), (odd, complex(re, im))):
        if abs(a - b) > IDENTITY_TOLERANCE:
            raise AssertionError(f"closed forms disagree for p = {p}: {a} vs {b}")
    amps = np.zeros(N, dtype=np.complex128)
    amps[plan.even_qnr.indices] = even
    amps[plan.odd_qnr.indices] = odd
    return PredictedFinalState(amps, even, odd, 2.0 / (p - 1))


@dataclass
class VerificationReport:
    p: int
    path: str
    n: int | None = None
    N: int | None = None
    theta: float | None = None
    max_deviation: float | None = None
    max_nonqnr_amplitude: float | None = None
    mean_after_rotation: list[float] | None = None  # [real, imag]
    target_mean: float | None = None
    probability_sum: float | None = None
    shortcut: int | None = None
    # x in [p, N) with jacobi(x, p) = -1; observed only, never rotated
    nonresidues_above_p: int | None = None
    checks: dict[str, bool] = field(default_factory=dict)
    tolerance: float = DEFAULT_TOLERANCE
    passed: bool = False

    def first_failure(self) -> str | None:
        return next((name for name, ok in self.checks.items() if not ok), None)


def verify(p: int, tolerance: float = DEFAULT_TOLERANCE) -> VerificationReport:
    """Run the pipeline for p and compare it against every oracle we have.

    Primes outside 1 mod 8 get a classical-path report whose only check is
    that the shortcut value really is a nonresidue.
    """
    p = require_odd_prime(p)
    shortcut = qnr_shortcut(p)
    if shortcut is not None:
        ok = jacobi(shortcut, p) == -1 and shortcut in qnr_set_bruteforce(p)
        return VerificationReport(
            p=p, path="classical", shortcut=shortcut, checks={"shortcut_is_qnr": ok}, tolerance=tolerance, passed=ok
        )

    instance, plan = build_instance(p)
    report = VerificationReport(p=p, path="quantum", n=instance.n, N=instance.N, theta=plan.theta, tolerance=tolerance)
    checks = report.checks
    target = 1.0 / (2.0 * math.sqrt(instance.N))
    report.target_mean = target
    report.nonresidues_above_p = sum(jacobi(x, p) == -1 for x in range(p, instance.N))
    try:
        stages = pipeline_stages(instance, plan, Schedule.TWO_STEP)
    except MeanOffTarget:
        checks["mean_on_target"] = False
        return report
    final = stages["final"]
    m = sv.mean(stages["rotated"])
    report.mean_after_rotation = [m.real, m.imag]
    checks["mean_on_target"] = abs(m - target) <= tolerance
    checks["mean_is_real"] = abs(m.imag) < IDENTITY_TOLERANCE

    predicted = predicted_final(instance, plan)
    report.max_deviation = float(np.max(np.abs(final.amplitudes - predicted.amplitudes)))
    checks["matches_prediction"] = report.max_deviation <= tolerance

    qnr_mask = plan.all_qnr.mask()
    mags = np.abs(final.amplitudes)
    report.max_nonqnr_amplitude = float(np.max(mags[~qnr_mask]))
    checks["nonqnr_zero"] = report.max_nonqnr_amplitude <= tolerance
    support = frozenset(np.flatnonzero(mags > tolerance).tolist())
    checks["support_is_qnr_set"] = support == qnr_set_bruteforce(p)

    probs = final.probabilities()
    checks["uniform_magnitude"] = bool(np.all(np.abs(probs[qnr_mask] - 2.0 / (p - 1)) <= tolerance))
    report.probability_sum = float(np.sum(probs))
    checks["probability_sum"] = abs(report.probability_sum - 1.0) <= tolerance

    direct = run_pipeline(instance, plan, Schedule.DIRECT)
    checks["schedule_equivalence"] = float(np.max(np.abs(direct.amplitudes - final.amplitudes))) <= IDENTITY_TOLERANCE

    even_amps = final.amplitudes[plan.even_qnr.indices]
    odd_amps = final.amplitudes[plan.odd_qnr.indices]
    ref = even_amps[0]
    checks["conjugate_pairing"] = bool(
        np.all(np.abs(even_amps - ref) <= IDENTITY_TOLERANCE)
        and np.all(np.abs(np.conj(odd_amps) - ref) <= IDENTITY_TOLERANCE)
    )
    report.passed = all(checks.values())
    return report


def sample_qnr(p: int, seed: int, count: int, workers: int = 1) -> tuple[list[int], str]:
    """``count`` nonresidues mod p and the path used ("classical" or "quantum")."""
    p = require_odd_prime(p)
    if count < 1:
        raise InvalidInput(f"count must be >= 1, got {count}")
    shortcut = qnr_shortcut(p)
    if shortcut is not None:
        return [shortcut] * count, "classical"
    instance, plan = build_instance(p)
    final = run_pipeline(instance, plan)
    return sv.sample_indices(final, seed, count, workers=workers), "quantum"
