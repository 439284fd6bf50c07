"""Dense statevector over 2**n basis states and the few transforms we need.

Operations return new :class:`StateVector` objects; the input is never
modified. Basis index ``x`` corresponds to ``|x>`` with bit 0 as the low bit.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import InvalidInput, MemoryCapExceeded, NotNormalized

DEFAULT_MAX_QUBITS = 26
MAX_QUBITS_ENV = "QNRSIM_MAX_QUBITS"
SAMPLE_BLOCK = 4096


def max_qubits() -> int:
    raw = os.environ.get(MAX_QUBITS_ENV)
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidInput(f"{MAX_QUBITS_ENV} must be an integer, got {raw!r}") from None
    if not 1 <= cap <= 30:
        raise InvalidInput(f"{MAX_QUBITS_ENV} must be in 1..30, got {cap}")
    return cap


def check_qubits(n: int, cap: int | None = None) -> int:
    cap = max_qubits() if cap is None else cap
    if n < 1:
        raise InvalidInput(f"need at least one qubit, got n = {n}")
    if n > cap:
        raise MemoryCapExceeded(f"n = {n} qubits exceeds the memory cap of {cap}")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n,):
            raise InvalidInput(
                f"expected {1 << self.n} amplitudes for n = {self.n}, got shape {self.amplitudes.shape}"
            )

    @classmethod
    def from_amplitudes(cls, values: Iterable[complex]) -> "StateVector":
        amps = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.complex128)
        n = int(amps.size).bit_length() - 1
        if amps.ndim != 1 or amps.size != 1 << n or n < 1:
            raise InvalidInput(f"amplitude count must be a power of two >= 2, got {amps.size}")
        return cls(n, amps.copy())

    @property
    def size(self) -> int:
        return 1 << self.n

    def probabilities(self) -> np.ndarray:
        return self.amplitudes.real ** 2 + self.amplitudes.imag ** 2

    def norm_squared(self) -> float:
        return float(np.sum(self.probabilities()))

    def _with(self, amps: np.ndarray) -> "StateVector":
        return StateVector(self.n, amps)


@dataclass(frozen=True, eq=False)
class Indicator:
    """A set of marked basis indices, stored sorted and unique."""

    n: int
    indices: np.ndarray

    def __post_init__(self):
        if self.indices.size and (self.indices[0] < 0 or self.indices[-1] >= 1 << self.n):
            raise InvalidInput(f"marked index outside 0..{(1 << self.n) - 1}")

    @classmethod
    def from_indices(cls, n: int, marked: Iterable[int]) -> "Indicator":
        arr = np.unique(np.fromiter((int(x) for x in marked), dtype=np.int64))
        return cls(n, arr)

    @classmethod
    def from_predicate(cls, n: int, predicate: Callable[[int], bool]) -> "Indicator":
        return cls.from_indices(n, (x for x in range(1 << n) if predicate(x)))

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "Indicator":
        mask = np.asarray(mask, dtype=bool)
        n = int(mask.size).bit_length() - 1
        if mask.size != 1 << n:
            raise InvalidInput(f"mask length must be a power of two, got {mask.size}")
        return cls(n, np.flatnonzero(mask).astype(np.int64))

    def __len__(self) -> int:
        return int(self.indices.size)

    def __contains__(self, x: object) -> bool:
        i = np.searchsorted(self.indices, x)
        return bool(i < self.indices.size and self.indices[i] == x)

    def __iter__(self):
        return iter(self.indices.tolist())

    def as_set(self) -> frozenset[int]:
        return frozenset(self.indices.tolist())

    def mask(self) -> np.ndarray:
        m = np.zeros(1 << self.n, dtype=bool)
        m[self.indices] = True
        return m

    def union(self, other: "Indicator") -> "Indicator":
        _same_width(self.n, other.n)
        return Indicator(self.n, np.union1d(self.indices, other.indices))

    def intersection(self, other: "Indicator") -> "Indicator":
        _same_width(self.n, other.n)
        return Indicator(self.n, np.intersect1d(self.indices, other.indices))

    def isdisjoint(self, other: "Indicator") -> bool:
        return np.intersect1d(self.indices, other.indices).size == 0

    def split_parity(self) -> tuple["Indicator", "Indicator"]:
        """(even, odd) sub-indicators keyed on the low bit."""
        low = self.indices & 1
        return Indicator(self.n, self.indices[low == 0]), Indicator(self.n, self.indices[low == 1])


def _same_width(a: int, b: int) -> None:
    if a != b:
        raise InvalidInput(f"qubit count mismatch: {a} vs {b}")


def uniform(n: int, cap: int | None = None) -> StateVector:
    check_qubits(n, cap)
    size = 1 << n
    return StateVector(n, np.full(size, 1.0 / np.sqrt(size), dtype=np.complex128))


def basis_state(n: int, x: int, cap: int | None = None) -> StateVector:
    check_qubits(n, cap)
    if not 0 <= x < 1 << n:
        raise InvalidInput(f"basis index {x} outside 0..{(1 << n) - 1}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[x] = 1.0
    return StateVector(n, amps)


def walsh_hadamard(state: StateVector) -> StateVector:
    """H on every qubit via the in-place butterfly, then one scale pass."""
    work = state.amplitudes.copy()
    size = work.size
    half = 1
    while half < size:
        blocks = work.reshape(-1, 2, half)
        lo = blocks[:, 0, :].copy()
        blocks[:, 0, :] += blocks[:, 1, :]
        blocks[:, 1, :] = lo - blocks[:, 1, :]
        half *= 2
    work *= 2.0 ** (-state.n / 2)
    return state._with(work)


def negate_zero(state: StateVector) -> StateVector:
    amps = state.amplitudes.copy()
    amps[0] = -amps[0]
    return state._with(amps)


def mean(state: StateVector) -> complex:
    # np.sum reduces pairwise in a fixed order, O(eps log N) error
    return complex(np.sum(state.amplitudes) / state.size)


def invert_about_mean(state: StateVector) -> StateVector:
    """alpha_x -> 2*mean - alpha_x."""
    return state._with(2.0 * mean(state) - state.amplitudes)


def invert_about_mean_via_hadamard(state: StateVector) -> StateVector:
    """The same map built from H, negate |0>, H and a global phase of -1."""
    out = walsh_hadamard(negate_zero(walsh_hadamard(state)))
    return out._with(-out.amplitudes)


def phase_rotate(state: StateVector, marked: Indicator, angle: float) -> StateVector:
    """Multiply marked amplitudes by exp(i*angle)."""
    _same_width(state.n, marked.n)
    amps = state.amplitudes.copy()
    # exact -1 for a sign flip keeps real states real
    amps[marked.indices] *= -1.0 if angle == np.pi else np.exp(1j * angle)
    return state._with(amps)


def _cdf(state: StateVector, tol: float = 1e-6) -> np.ndarray:
    cdf = np.cumsum(state.probabilities())
    if abs(cdf[-1] - 1.0) > tol:
        raise NotNormalized(f"state norm squared is {cdf[-1]!r}, expected 1 within {tol}")
    return cdf


def _draw(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    # side="right" never lands on a zero-probability index
    idx = np.searchsorted(cdf, u * cdf[-1], side="right")
    last = int(np.searchsorted(cdf, cdf[-1], side="left"))
    return np.minimum(idx, last)


def measure(state: StateVector, rng: np.random.Generator) -> int:
    """One basis index drawn with probability |alpha_x|**2; state untouched."""
    cdf = _cdf(state)
    return int(_draw(cdf, np.array([rng.random()]))[0])


def sample_indices(state: StateVector, seed: int, count: int, workers: int = 1) -> list[int]:
    """``count`` independent measurements, reproducible from ``seed`` alone.

    Draws are split into fixed blocks of ``SAMPLE_BLOCK``, each with its own
    spawned child seed, so the result does not depend on ``workers``.
    """
    if count < 1:
        raise InvalidInput(f"count must be >= 1, got {count}")
    cdf = _cdf(state)
    n_blocks = -(-count // SAMPLE_BLOCK)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    sizes = [min(SAMPLE_BLOCK, count - i * SAMPLE_BLOCK) for i in range(n_blocks)]

    def run(i: int) -> np.ndarray:
        rng = np.random.Generator(np.random.PCG64(children[i]))
        return _draw(cdf, rng.random(sizes[i]))

    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    else:
        parts = [run(i) for i in range(n_blocks)]
    return np.concatenate(parts).tolist()


def dump_csv(state: StateVector, rows: Iterable[int] | None = None) -> str:
    """index,real,imag,prob with 17 significant digits."""
    amps = state.amplitudes
    probs = state.probabilities()
    lines = ["index,real,imag,prob"]
    for x in range(state.size) if rows is None else rows:
        a = amps[x]
        lines.append(f"{x},{a.real:.17g},{a.imag:.17g},{probs[x]:.17g}")
    return "\n".join(lines) + "\n"
