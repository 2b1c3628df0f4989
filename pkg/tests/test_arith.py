import cmath
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagtet.arith import (QuadExt, as_exact, bernoulli, bloch_wigner, dilog,
                           factor, factor_signed, is_exact, is_prime,
                           squarefree_decompose, to_complex)
from flagtet.errors import ZeroInput

mpmath.mp.dps = 30


class TestPrimality:
    def test_small_range_against_sieve(self):
        sieve = [True] * 2000
        sieve[0] = sieve[1] = False
        for p in range(2, 45):
            if sieve[p]:
                for q in range(p * p, 2000, p):
                    sieve[q] = False
        for n in range(2000):
            assert is_prime(n) == sieve[n], n

    def test_carmichael_numbers_composite(self):
        for n in (561, 1105, 1729, 2465, 6601, 8911, 41041, 825265):
            assert not is_prime(n)

    def test_large_primes(self):
        assert is_prime(2 ** 31 - 1)
        assert is_prime(2 ** 61 - 1)
        assert not is_prime((2 ** 31 - 1) * (2 ** 61 - 1))


class TestFactor:
    def test_known(self):
        assert factor(600851475143) == {71: 1, 839: 1, 1471: 1, 6857: 1}
        assert factor(1) == {}
        assert factor(2 ** 10) == {2: 10}
        assert factor(97) == {97: 1}

    def test_zero_and_negative(self):
        with pytest.raises(ZeroInput):
            factor(0)
        with pytest.raises(ValueError):
            factor(-12)

    def test_semiprime(self):
        p, q = 1000003, 998244353
        assert factor(p * q) == {p: 1, q: 1}

    def test_perfect_power(self):
        assert factor(1000003 ** 2) == {1000003: 2}

    @settings(max_examples=120, deadline=None)
    @given(st.integers(min_value=1, max_value=10 ** 12))
    def test_round_trip(self, n):
        f = factor(n)
        prod = 1
        for p, e in f.items():
            assert is_prime(p)
            assert e >= 1
            prod *= p ** e
        assert prod == n

    @pytest.mark.slow
    def test_round_trip_bulk(self):
        rng = random.Random(5)
        for _ in range(10 ** 4):
            n = rng.randint(1, 10 ** 15)
            prod = 1
            for p, e in factor(n).items():
                prod *= p ** e
            assert prod == n

    def test_signed_rational(self):
        assert factor_signed(Fraction(-8, 45)) == (-1, {2: 3, 3: -2, 5: -1})
        assert factor_signed(Fraction(1)) == (1, {})
        with pytest.raises(ZeroInput):
            factor_signed(Fraction(0))

    def test_squarefree_decompose(self):
        assert squarefree_decompose(12) == (2, 3)
        assert squarefree_decompose(-75) == (5, -3)
        assert squarefree_decompose(1) == (1, 1)
        assert squarefree_decompose(-3) == (1, -3)


class TestQuadExt:
    def setup_method(self):
        self.omega = QuadExt(Fraction(1, 2), Fraction(1, 2), -3)

    def test_demotion(self):
        assert QuadExt(3, 0, -3) == Fraction(3)
        assert isinstance(QuadExt(3, 0, -3), Fraction)
        assert QuadExt(2, 5, 1) == Fraction(7)
        assert QuadExt(1, 1, 4) == Fraction(3)

    def test_square_factor_normalization(self):
        assert QuadExt(1, 1, -12) == QuadExt(1, 2, -3)

    def test_sixth_root_of_unity(self):
        w = self.omega
        assert w ** 2 == w - 1
        assert w ** 3 == Fraction(-1)
        assert w ** 6 == Fraction(1)
        assert w * w.conj() == Fraction(1)
        assert w + w.conj() == Fraction(1)

    def test_inverse_and_division(self):
        w = self.omega
        assert w * w.inverse() == Fraction(1)
        assert (1 / w) * w == Fraction(1)
        assert w ** -2 == (w ** 2).inverse()
        q = QuadExt(3, -2, 7)
        assert (q / q) == Fraction(1)

    def test_norm_trace(self):
        q = QuadExt(3, -2, 7)
        assert q.norm() == 9 - 7 * 4
        assert q.trace() == 6

    def test_to_complex(self):
        w = self.omega
        assert abs(complex(w) - cmath.exp(1j * cmath.pi / 3)) < 1e-15
        r = QuadExt(1, 1, 2)
        assert abs(complex(r) - (1 + math.sqrt(2))) < 1e-15

    def test_mixed_field_promotes(self):
        a = QuadExt(0, 1, -3)
        b = QuadExt(0, 1, -7)
        v = a * b
        assert isinstance(v, complex)
        assert abs(v - (-math.sqrt(21))) < 1e-12

    def test_arithmetic_stays_exact(self):
        w = self.omega
        v = (2 * w - 3) * (w + Fraction(1, 5)) / (w - 2)
        assert isinstance(v, QuadExt)
        assert v.m == -3

    def test_exactness_predicates(self):
        assert is_exact(self.omega)
        assert is_exact(Fraction(1, 3))
        assert is_exact(7)
        assert not is_exact(0.5)
        assert not is_exact(1j)
        assert as_exact(4) == Fraction(4)
        with pytest.raises(TypeError):
            as_exact(True)

    def test_equality_and_hash(self):
        w = self.omega
        assert w != Fraction(1)
        assert hash(QuadExt(1, 2, -3)) == hash(QuadExt(1, 4, Fraction(-3, 4)))


class TestBernoulli:
    def test_values(self):
        expected = [Fraction(1), Fraction(-1, 2), Fraction(1, 6), 0,
                    Fraction(-1, 30), 0, Fraction(1, 42), 0, Fraction(-1, 30)]
        for k, v in enumerate(expected):
            assert bernoulli(k) == v


class TestDilog:
    def test_special_values(self):
        pi = math.pi
        assert dilog(0) == 0
        assert abs(dilog(1) - pi ** 2 / 6) < 1e-15
        assert abs(dilog(-1) + pi ** 2 / 12) < 1e-15
        assert abs(dilog(0.5) - (pi ** 2 / 12 - math.log(2) ** 2 / 2)) < 1e-15

    def test_against_mpmath_grid(self):
        rng = random.Random(11)
        worst = 0.0
        for _ in range(300):
            z = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
            if abs(z) < 1e-3 or abs(z - 1) < 1e-3:
                continue
            ours = dilog(z)
            ref = complex(mpmath.polylog(2, z))
            worst = max(worst, abs(ours - ref) / max(1.0, abs(ref)))
        assert worst < 5e-14

    def test_near_branch_point(self):
        for z in (0.999, 0.99 + 0.01j, 1 + 1e-8j, 1.001 + 1e-9j,
                  1.001 - 1e-9j):
            ref = complex(mpmath.polylog(2, mpmath.mpc(z)))
            assert abs(dilog(z) - ref) < 1e-12

    def test_cut_value_is_limit_from_above(self):
        # for real x > 1 the value on the cut continues from Im z > 0
        x = 1.75
        got = dilog(x)
        assert got.imag > 0
        ref = complex(mpmath.polylog(2, mpmath.mpc(x, "1e-25")))
        assert abs(got - ref) < 1e-12

    def test_nan_propagates(self):
        assert cmath.isnan(dilog(complex("nan")))

    def test_infinite_input_rejected(self):
        with pytest.raises(ValueError):
            dilog(complex("inf"))


class TestBlochWigner:
    def test_reference_value(self):
        # maximum of D on the unit circle, at the primitive sixth root
        w = cmath.exp(1j * cmath.pi / 3)
        assert abs(bloch_wigner(w) - 1.0149416064096536) < 1e-14

    def test_vanishes_on_reals(self):
        for x in (-2.5, -1, 0, 0.5, 1, 7.25):
            assert bloch_wigner(x) == 0.0
        assert bloch_wigner(complex("inf")) == 0.0

    def test_odd_under_conjugation(self, rng):
        for _ in range(50):
            z = complex(rng.uniform(-3, 3), rng.uniform(0.01, 3))
            assert abs(bloch_wigner(z.conjugate()) + bloch_wigner(z)) < 1e-13

    def test_six_fold_symmetry(self, rng):
        for _ in range(30):
            z = complex(rng.uniform(-3, 3), rng.uniform(0.05, 3))
            d = bloch_wigner(z)
            assert abs(bloch_wigner(1 / z) + d) < 1e-12
            assert abs(bloch_wigner(1 - z) + d) < 1e-12
            assert abs(bloch_wigner(1 - 1 / z) - d) < 1e-12

    def test_five_term_relation(self, rng):
        for _ in range(40):
            x = complex(rng.uniform(-3, 3), rng.uniform(0.05, 2))
            y = complex(rng.uniform(-3, 3), rng.uniform(0.05, 2))
            if abs(x) < 0.05 or abs(x - 1) < 0.05 or abs(x - y) < 0.05:
                continue
            if abs(y) < 0.05 or abs(y - 1) < 0.05:
                continue
            total = (bloch_wigner(x) - bloch_wigner(y) + bloch_wigner(y / x)
                     - bloch_wigner((1 - 1 / x) / (1 - 1 / y))
                     + bloch_wigner((1 - x) / (1 - y)))
            assert abs(total) < 1e-12

    def test_nan(self):
        assert math.isnan(bloch_wigner(complex("nan")))
