"""Grover iteration and its exact, deterministic variants.

The exact variants all finish the same way: split the marked states into two
equal halves, rotate one half by +theta and the other by -theta so the
imaginary parts cancel in the mean, and pick theta so the mean sits at half
the unmarked amplitude. One inversion about the mean then sends every
unmarked amplitude to zero. When the marked set has no natural split, one
extra low qubit is appended and each x becomes the pair (x,0), (x,1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import statevector as sv
from .errors import CountMismatch, InfeasibleAngle, InvalidInput
from .statevector import Indicator, StateVector

REALNESS_TOLERANCE = 1e-12
MAX_RETRIES = 2


@dataclass(frozen=True)
class AmplificationPlan:
    M: int
    k: int
    pre_iterations: int
    final_theta: float
    pairing: tuple[Indicator, Indicator]
    augmented: bool = False


def grover_iteration(state: StateVector, marked: Indicator) -> StateVector:
    return sv.invert_about_mean(sv.phase_rotate(state, marked, math.pi))


def success_curve(M: int, k: int, t: int) -> float:
    """Marked probability after t plain Grover iterations from uniform."""
    phi = math.asin(math.sqrt(k / M))
    return math.sin((2 * t + 1) * phi) ** 2


def optimal_iterations(M: int, k: int) -> int:
    """Iteration count maximising sin^2((2t+1) phi); ties go to the smaller t."""
    if not 1 <= k < M:
        raise InvalidInput(f"need 1 <= k < M, got k = {k}, M = {M}")
    phi = math.asin(math.sqrt(k / M))
    guess = int(math.floor(math.pi / (4 * phi)))
    best, best_val = None, -1.0
    for t in (guess - 1, guess, guess + 1):
        if t < 0:
            continue
        val = success_curve(M, k, t)
        if val > best_val + 1e-12:
            best, best_val = t, val
    return best


def solve_final_theta(m: float, u: float, M: int, k: int = 2) -> float:
    """Angle that puts the mean at u/2 once the k marked states are rotated.

    Needs (k m cos(theta) + (M - k) u) / M = u / 2, so
    cos(theta) = u (2k - M) / (2 k m); for k = 2 this is u (4 - M) / (4 m).
    """
    if u == 0.0:
        return math.pi / 2
    if m == 0.0:
        raise InfeasibleAngle("marked amplitude is zero; no rotation can move the mean")
    c = u * (2 * k - M) / (2 * k * m)
    if abs(c) > 1.0 + 1e-12:
        raise InfeasibleAngle(f"required cos(theta) = {c} is outside [-1, 1]")
    return math.acos(max(-1.0, min(1.0, c)))


def _check_pairing(n: int, half_a: Indicator, half_b: Indicator) -> Indicator:
    if half_a.n != n or half_b.n != n:
        raise InvalidInput("pairing halves must live on the same register as the state")
    if len(half_a) != len(half_b):
        raise InvalidInput(f"pairing halves differ in size: {len(half_a)} vs {len(half_b)}")
    if not half_a.isdisjoint(half_b):
        raise InvalidInput("pairing halves overlap")
    if len(half_a) == 0:
        raise InvalidInput("marked set is empty")
    return half_a.union(half_b)


def _pre_iterate(n: int, marked: Indicator, t: int) -> StateVector:
    state = sv.uniform(n)
    for _ in range(t):
        state = grover_iteration(state, marked)
    return state


def _marked_and_unmarked(state: StateVector, marked: Indicator) -> tuple[float, float]:
    amps = state.amplitudes
    if np.max(np.abs(amps.imag)) > REALNESS_TOLERANCE:
        raise AssertionError("pre-rotation amplitudes are not real")
    mask = marked.mask()
    on, off = amps.real[mask], amps.real[~mask]
    if np.ptp(on) > REALNESS_TOLERANCE or (off.size and np.ptp(off) > REALNESS_TOLERANCE):
        raise AssertionError("pre-rotation amplitudes are not constant on marked/unmarked sets")
    return float(on[0]), float(off[0]) if off.size else 0.0


def amplify_pairs(n: int, half_a: Indicator, half_b: Indicator) -> tuple[StateVector, AmplificationPlan]:
    """Exact amplification of ``half_a | half_b`` on n qubits.

    Returns the final state, in which every unmarked amplitude is zero up to
    rounding, together with the plan that produced it.
    """
    marked = _check_pairing(n, half_a, half_b)
    M, k = 1 << n, len(marked)
    if 4 * k >= M:
        t, theta = 0, math.acos(1.0 - M / (2 * k))
        state = sv.uniform(n)
    else:
        t = optimal_iterations(M, k)
        for attempt in range(MAX_RETRIES + 1):
            state = _pre_iterate(n, marked, t)
            m, u = _marked_and_unmarked(state, marked)
            try:
                theta = solve_final_theta(m, u, M, k)
                break
            except InfeasibleAngle:
                if attempt == MAX_RETRIES or t == 0:
                    raise
                t -= 1
    state = sv.phase_rotate(state, half_a, theta)
    state = sv.phase_rotate(state, half_b, -theta)
    state = sv.invert_about_mean(state)
    return state, AmplificationPlan(M=M, k=k, pre_iterations=t, final_theta=theta, pairing=(half_a, half_b))


def augment(n: int, marked: Iterable[int]) -> tuple[Indicator, Indicator]:
    """Halves {2x} and {2x+1} on n+1 qubits for each marked x."""
    xs = np.unique(np.fromiter((int(x) for x in marked), dtype=np.int64))
    return Indicator(n + 1, 2 * xs), Indicator(n + 1, 2 * xs + 1)


def collapse_augmented(state: StateVector) -> np.ndarray:
    """Outcome probabilities after dropping the appended low bit."""
    return state.probabilities().reshape(-1, 2).sum(axis=1)


def single_marked_state(n: int, omega: int) -> tuple[StateVector, AmplificationPlan]:
    if not 0 <= omega < 1 << n:
        raise InvalidInput(f"target {omega} outside 0..{(1 << n) - 1}")
    sv.check_qubits(n + 1)
    half_a, half_b = augment(n, [omega])
    state, plan = amplify_pairs(n + 1, half_a, half_b)
    return state, _augmented(plan)


def deterministic_single_marked(n: int, omega: int, seed: int) -> int:
    state, _ = single_marked_state(n, omega)
    return sv.measure(state, np.random.default_rng(seed)) >> 1


def known_set_state(
    n: int,
    marked: Indicator,
    k: int,
    pairing: tuple[Indicator, Indicator] | None = None,
) -> tuple[StateVector, AmplificationPlan]:
    """Exact amplification of a marked set whose size k is known up front.

    With ``pairing`` given the two halves are used as-is on n qubits;
    otherwise the register is augmented by one bit.
    """
    if marked.n != n:
        raise InvalidInput(f"indicator is on {marked.n} qubits, expected {n}")
    if len(marked) != k:
        raise CountMismatch(f"indicator marks {len(marked)} states but k = {k}")
    if k < 1:
        raise InvalidInput("k must be at least 1")
    if pairing is not None:
        half_a, half_b = pairing
        if _check_pairing(n, half_a, half_b).as_set() != marked.as_set():
            raise InvalidInput("pairing halves do not cover the marked set exactly")
        sv.check_qubits(n)
        return amplify_pairs(n, half_a, half_b)
    sv.check_qubits(n + 1)
    half_a, half_b = augment(n, marked)
    state, plan = amplify_pairs(n + 1, half_a, half_b)
    return state, _augmented(plan)


def deterministic_known_set_sample(
    n: int,
    marked: Indicator,
    k: int,
    seed: int,
    pairing: tuple[Indicator, Indicator] | None = None,
) -> int:
    state, plan = known_set_state(n, marked, k, pairing)
    x = sv.measure(state, np.random.default_rng(seed))
    return x >> 1 if plan.augmented else x


def _augmented(plan: AmplificationPlan) -> AmplificationPlan:
    return AmplificationPlan(plan.M, plan.k, plan.pre_iterations, plan.final_theta, plan.pairing, augmented=True)
