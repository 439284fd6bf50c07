"""Modular arithmetic helpers: Jacobi symbols, primality, residue oracles.

Everything here is a pure function of its arguments. The brute-force set
builders never call :func:`jacobi`; they enumerate powers directly so they
can serve as independent oracles for the Jacobi-driven code paths.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import InvalidInput, NotPrime

MAX_PRIME_INPUT = 1 << 63

# Deterministic for every n < 3.3e24 (Sorenson & Webster), so all of 64 bits.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def jacobi(a: int, m: int) -> int:
    """Jacobi symbol (a/m) for odd positive m, by the binary algorithm."""
    if m <= 0 or m % 2 == 0:
        raise InvalidInput(f"Jacobi symbol needs an odd positive modulus, got {m}")
    a %= m
    result = 1
    while a:
        # strip factors of two; (2/m) = -1 iff m = 3, 5 mod 8
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                result = -result
        # reciprocity flips the sign iff both are 3 mod 4
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            result = -result
        a %= m
    return result if m == 1 else 0


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin, exact for all inputs up to 2**63."""
    if p < 0 or p > MAX_PRIME_INPUT:
        raise InvalidInput(f"primality input out of range [0, 2**63]: {p}")
    if p < 2:
        return False
    for q in _MR_BASES:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, p)
        if x == 1 or x == p - 1:
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


def require_odd_prime(p: int) -> int:
    p = int(p)
    if p == 2:
        raise InvalidInput("p = 2 has no quadratic nonresidues")
    if p < 2 or not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    return p


def bit_length_above(p: int) -> int:
    """Least n with 2**n > p."""
    return int(p).bit_length()


@dataclass(frozen=True)
class OddPrimeInstance:
    p: int
    n: int
    N: int
    k: int
    residue_class_mod8: int

    @classmethod
    def from_prime(cls, p: int) -> "OddPrimeInstance":
        p = require_odd_prime(p)
        n = bit_length_above(p)
        N = 1 << n
        assert N // 2 < p < N
        return cls(p=p, n=n, N=N, k=(p - 1) // 2, residue_class_mod8=p % 8)


def qnr_shortcut(p: int) -> int | None:
    """Classical nonresidue for p not 1 mod 8, else ``None``.

    -1 (as p - 1) works when p = 3 mod 4 and 2 works when p = 5 mod 8.
    """
    p = require_odd_prime(p)
    if p % 4 == 3:
        return p - 1
    if p % 8 == 5:
        return 2
    return None


def squares_mod(p: int) -> np.ndarray:
    """Boolean table ``t`` with ``t[a]`` true iff a is a nonzero square mod p."""
    if p > (1 << 31):
        raise InvalidInput(f"brute-force enumeration too large for p = {p}")
    x = np.arange(1, p, dtype=np.int64)
    table = np.zeros(p, dtype=bool)
    table[(x * x) % p] = True
    table[0] = False
    return table


def qnr_set_bruteforce(p: int) -> frozenset[int]:
    """Nonresidues in 1..p-1, found by listing every square (no Jacobi calls)."""
    p = require_odd_prime(p)
    table = squares_mod(p)
    table[0] = True
    return frozenset(np.flatnonzero(~table).tolist())


def parity_counts(p: int) -> tuple[int, int]:
    """(even, odd) nonresidue counts over representatives 1..p-1."""
    p = require_odd_prime(p)
    if p % 4 != 1:
        raise InvalidInput(f"parity balance needs p = 1 mod 4, got p = {p} ({p % 4} mod 4)")
    even = odd = 0
    for a in range(1, p):
        if jacobi(a, p) == -1:
            if a % 2:
                odd += 1
            else:
                even += 1
    return even, odd


def power_residue_indicator(a: int, p: int, d: int) -> bool:
    """True iff a is a d-th power nonresidue mod p (Euler's criterion)."""
    p = require_odd_prime(p)
    if d < 1 or (p - 1) % d:
        raise InvalidInput(f"d = {d} does not divide p - 1 = {p - 1}")
    if gcd(a, p) != 1:
        raise InvalidInput(f"a = {a} is not coprime to p = {p}")
    return pow(a, (p - 1) // d, p) != 1


def power_nonresidue_set_bruteforce(p: int, d: int) -> frozenset[int]:
    """d-th power nonresidues in 1..p-1 by enumerating x**d mod p."""
    p = require_odd_prime(p)
    if d < 1 or (p - 1) % d:
        raise InvalidInput(f"d = {d} does not divide p - 1 = {p - 1}")
    powers = {pow(x, d, p) for x in range(1, p)}
    return frozenset(a for a in range(1, p) if a not in powers)


def primes_below(bound: int) -> list[int]:
    if bound <= 2:
        return []
    sieve = np.ones(bound, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(bound ** 0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve).tolist()
