import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnrsim.errors import InvalidInput, NotPrime
from qnrsim.number_theory import (
    OddPrimeInstance,
    is_prime,
    jacobi,
    parity_counts,
    power_nonresidue_set_bruteforce,
    power_residue_indicator,
    primes_below,
    qnr_set_bruteforce,
    qnr_shortcut,
)


def trial_division(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def squares(p):
    return {x * x % p for x in range(1, p)}


SMALL_ODD_PRIMES = [q for q in range(3, 2000) if trial_division(q)]


class TestJacobi:
    @pytest.mark.parametrize(
        "a, m, expected",
        [(-1, 41, 1), (2, 41, 1), (1, 41, 1), (1, 7, 1), (1, 1_000_003, 1), (3, 41, -1), (0, 41, 0), (82, 41, 0)],
    )
    def test_examples(self, a, m, expected):
        assert jacobi(a, m) == expected

    def test_three_mod_41_against_square_enumeration(self):
        assert 3 not in squares(41)
        assert jacobi(3, 41) == -1

    @pytest.mark.parametrize("m", [0, -3, 4, 10])
    def test_rejects_bad_modulus(self, m):
        with pytest.raises(InvalidInput):
            jacobi(3, m)

    def test_composite_modulus_gcd(self):
        assert jacobi(6, 15) == 0
        assert jacobi(2, 15) == 1  # (2/3)(2/5) = (-1)(-1)

    @pytest.mark.parametrize("p", SMALL_ODD_PRIMES)
    def test_matches_bruteforce_set(self, p):
        qnr = qnr_set_bruteforce(p)
        assert {a for a in range(1, p) if jacobi(a, p) == -1} == qnr

    def test_half_residues_half_nonresidues(self):
        for p in primes_below(10_000)[1:]:
            neg = sum(jacobi(a, p) == -1 for a in range(1, p))
            assert neg == (p - 1) // 2

    @settings(max_examples=200)
    @given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6), st.sampled_from(SMALL_ODD_PRIMES))
    def test_multiplicative(self, a, b, p):
        assert jacobi(a * b, p) == jacobi(a, p) * jacobi(b, p)

    @settings(max_examples=200)
    @given(st.integers(0, 10**6), st.sampled_from(SMALL_ODD_PRIMES))
    def test_euler_criterion(self, a, p):
        e = pow(a, (p - 1) // 2, p)
        assert jacobi(a, p) == (0 if a % p == 0 else (1 if e == 1 else -1))


class TestIsPrime:
    @pytest.mark.parametrize("n, expected", [(41, True), (1, False), (0, False), (2, True), (561, False)])
    def test_examples(self, n, expected):
        assert is_prime(n) is expected

    def test_carmichael_561_by_trial_division(self):
        assert not trial_division(561)
        assert not is_prime(561)

    def test_agrees_with_trial_division(self):
        for n in range(20_000):
            assert is_prime(n) == trial_division(n), n

    @pytest.mark.parametrize(
        "n, expected",
        [
            (2**61 - 1, True),
            ((2**61 - 1) * 3, False),
            (3_825_123_056_546_413_051, False),  # strong pseudoprime to bases 2..23
            (9_223_372_036_854_775_783, True),  # largest prime below 2**63
        ],
    )
    def test_large(self, n, expected):
        assert is_prime(n) is expected

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidInput):
            is_prime(-1)
        with pytest.raises(InvalidInput):
            is_prime(2**63 + 1)


class TestShortcut:
    @pytest.mark.parametrize("p, expected", [(7, 6), (13, 2), (41, None), (3, 2), (5, 2), (11, 10), (17, None)])
    def test_examples(self, p, expected):
        assert qnr_shortcut(p) == expected

    @pytest.mark.parametrize("p", [q for q in SMALL_ODD_PRIMES if q % 8 != 1])
    def test_value_is_nonresidue(self, p):
        assert qnr_shortcut(p) in qnr_set_bruteforce(p)

    def test_rejects(self):
        with pytest.raises(InvalidInput):
            qnr_shortcut(2)
        with pytest.raises(NotPrime):
            qnr_shortcut(15)


class TestBruteforce:
    def test_examples(self):
        assert qnr_set_bruteforce(17) == {3, 5, 6, 7, 10, 11, 12, 14}
        assert qnr_set_bruteforce(5) == {2, 3}
        assert len(qnr_set_bruteforce(41)) == 20

    @pytest.mark.parametrize("p", [5, 13, 17, 41, 97, 1009])
    def test_complement_of_squares(self, p):
        assert qnr_set_bruteforce(p) == set(range(1, p)) - squares(p)

    @pytest.mark.parametrize("p", [q for q in SMALL_ODD_PRIMES if q % 4 == 1])
    def test_negation_pairs(self, p):
        qnr = qnr_set_bruteforce(p)
        for x in qnr:
            assert p - x in qnr and p - x != x


class TestParity:
    @pytest.mark.parametrize("p, expected", [(41, (10, 10)), (13, (3, 3)), (5, (1, 1))])
    def test_examples(self, p, expected):
        assert parity_counts(p) == expected

    def test_p13_against_bruteforce(self):
        qnr = qnr_set_bruteforce(13)
        assert (sum(x % 2 == 0 for x in qnr), sum(x % 2 for x in qnr)) == parity_counts(13)

    @pytest.mark.parametrize("p", [3, 7, 11, 43])
    def test_rejects_3_mod_4(self, p):
        with pytest.raises(InvalidInput):
            parity_counts(p)


class TestPowerResidue:
    def test_examples(self):
        assert power_residue_indicator(1, 13, 3) is False
        assert power_residue_indicator(2, 13, 3) is True
        assert pow(2, 4, 13) == 3

    def test_cubic_count_13(self):
        cubes = {x**3 % 13 for x in range(1, 13)}
        expected = set(range(1, 13)) - cubes
        got = {a for a in range(1, 13) if power_residue_indicator(a, 13, 3)}
        assert got == expected == power_nonresidue_set_bruteforce(13, 3)
        assert len(got) == 2 * 12 // 3 == 8

    @pytest.mark.parametrize("p, d", [(13, 4), (31, 5), (37, 9), (41, 2)])
    def test_indicator_matches_enumeration(self, p, d):
        got = {a for a in range(1, p) if power_residue_indicator(a, p, d)}
        assert got == power_nonresidue_set_bruteforce(p, d)
        assert len(got) == (p - 1) - (p - 1) // d

    def test_d2_is_legendre(self):
        assert {a for a in range(1, 41) if power_residue_indicator(a, 41, 2)} == qnr_set_bruteforce(41)

    def test_rejects(self):
        with pytest.raises(InvalidInput):
            power_residue_indicator(2, 13, 5)
        with pytest.raises(InvalidInput):
            power_residue_indicator(26, 13, 3)


class TestInstance:
    @pytest.mark.parametrize("p, n", [(41, 6), (17, 5), (97, 7), (3, 2), (7, 3)])
    def test_fields(self, p, n):
        inst = OddPrimeInstance.from_prime(p)
        assert (inst.n, inst.N, inst.k, inst.residue_class_mod8) == (n, 2**n, (p - 1) // 2, p % 8)
        assert inst.N // 2 < p < inst.N

    def test_rejects(self):
        with pytest.raises(NotPrime):
            OddPrimeInstance.from_prime(45)
