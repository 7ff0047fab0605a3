import numpy as np
import pytest
import sympy

from pahash.bitlinalg import BitVector
from pahash.facm import (
    FactorBudgetError,
    FieldElementShort,
    NaIndex,
    RingElement,
    enumerate_field,
    extend,
    factorize,
    find_na_at_least,
    is_in_na,
    is_probable_prime,
    ring_add,
    ring_identity,
    ring_mul,
    ring_pow,
    ring_zero,
    schoolbook_ring_mul,
    shorten,
)


def bv(s):
    return BitVector.from_bits(int(c) for c in s)


def elem(k, s):
    return RingElement(k, bv(s))


K2 = NaIndex(2)
K4 = NaIndex(4)
K10 = NaIndex(10)


class TestNumberTheory:
    def test_primes_against_sympy_small(self):
        for n in range(2, 5000):
            assert is_probable_prime(n) == sympy.isprime(n), n

    def test_primes_against_sympy_large(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(1 << 40, 1 << 50))
            assert is_probable_prime(n) == sympy.isprime(n), n

    def test_factorize_against_sympy(self):
        rng = np.random.default_rng(1)
        for _ in range(60):
            n = int(rng.integers(2, 1 << 40))
            assert factorize(n) == sympy.factorint(n), n

    def test_factorize_reconstructs(self):
        for n in (2, 12, 1018, 10**6 + 2, 999999000001):
            f = factorize(n)
            prod = 1
            for p, e in f.items():
                assert is_probable_prime(p)
                prod *= p**e
            assert prod == n

    def test_factor_budget_error(self):
        # tiny budget on a product of two 18-digit-ish primes
        hard = 1000000000000000003 * 1000000000000000009
        with pytest.raises(FactorBudgetError):
            factorize(hard, rho_budget=4)


class TestNaMembership:
    def test_paper_style_examples(self):
        assert is_in_na(4)      # 2^i mod 5 hits every nonzero residue
        assert not is_in_na(6)  # 2 has order 3 mod 7
        assert is_in_na(10)
        assert is_in_na(100)

    def test_small_odd_and_degenerate(self):
        assert not is_in_na(1)  # k+1 = 2 is not an odd prime
        assert not is_in_na(7)  # k+1 = 8 composite
        assert is_in_na(2)

    def test_agrees_with_direct_order_computation(self):
        for k in range(1, 1001):
            direct = (
                k >= 2
                and sympy.isprime(k + 1)
                and (k + 1) % 2 == 1
                and sympy.n_order(2, k + 1) == k
            )
            assert is_in_na(k) == direct, k

    def test_find_reproduces_table(self):
        table = {10: 10, 100: 100, 10**3: 1018, 10**4: 10036,
                 10**5: 100002, 10**6: 1000002}
        for lower, expect in table.items():
            assert find_na_at_least(lower).k == expect

    def test_find_small(self):
        assert find_na_at_least(2).k == 2
        assert find_na_at_least(3).k == 4

    def test_find_budget(self):
        from pahash.facm import NaSearchError

        with pytest.raises(NaSearchError):
            find_na_at_least(10**6, max_candidates=1)

    def test_na_index_validates(self):
        with pytest.raises(ValueError):
            NaIndex(6)


class TestShortForms:
    def test_extend_parity_completion(self):
        assert extend(FieldElementShort(K2, bv("10"))).coeffs == bv("101")
        assert extend(FieldElementShort(K2, bv("00"))).coeffs == bv("000")

    def test_shorten_drops_parity(self):
        assert shorten(elem(K2, "101")).bits == bv("10")

    def test_shorten_rejects_odd_weight(self):
        with pytest.raises(ValueError):
            elem(K2, "100")

    def test_roundtrip_small_exhaustive(self):
        for k in (K2, K4):
            for v in range(1 << k.k):
                s = FieldElementShort(k, BitVector.from_int(v, k.k))
                assert shorten(extend(s)) == s

    def test_roundtrip_large_sampled(self):
        k = find_na_at_least(1000)
        assert k.k == 1018
        rng = np.random.default_rng(2)
        for _ in range(1000):
            s = FieldElementShort(k, BitVector.random(k.k, rng))
            assert shorten(extend(s)) == s
            assert extend(shorten(extend(s))) == extend(s)


class TestRingArithmetic:
    def test_add_is_xor(self):
        a, b = elem(K2, "110"), elem(K2, "101")
        assert ring_add(a, b).coeffs == bv("011")
        assert ring_add(a, a) == ring_zero(K2)
        assert ring_add(a, ring_zero(K2)) == a

    def test_add_mismatched_fields(self):
        with pytest.raises(ValueError):
            ring_add(elem(K2, "110"), RingElement(K4, bv("11000")))

    def test_hand_mul_k2(self):
        # (1+x)(1+x^2) = 1 + x + x^2 + x^3 = x + x^2  (x^3 = 1)
        assert ring_mul(elem(K2, "110"), elem(K2, "101")) == elem(K2, "011")

    def test_identity_element(self):
        e = ring_identity(K2)
        assert e == elem(K2, "011")
        for s in enumerate_field(K2):
            assert ring_mul(e, s) == s
        assert ring_mul(e, e) == e

    def test_mul_by_zero(self):
        for s in enumerate_field(K4):
            assert ring_mul(s, ring_zero(K4)) == ring_zero(K4)

    def test_frobenius_square(self):
        # (1+x)^2 = 1 + x^2 over GF(2)
        assert ring_pow(elem(K2, "110"), 2) == elem(K2, "101")

    def test_pow_basics(self):
        a = elem(K4, "11000")
        assert ring_pow(a, 0) == ring_identity(K4)
        assert ring_pow(a, 1) == a
        assert ring_pow(a, 5) == ring_mul(a, ring_mul(a, ring_mul(a, ring_mul(a, a))))

    def test_closure_even_weight(self):
        rng = np.random.default_rng(3)
        k = K10
        for _ in range(200):
            a = extend(FieldElementShort(k, BitVector.random(k.k, rng)))
            b = extend(FieldElementShort(k, BitVector.random(k.k, rng)))
            c = ring_mul(a, b)
            assert c.coeffs.weight() % 2 == 0


class TestFieldAxioms:
    @pytest.mark.parametrize("k", [K2, K4])
    def test_exhaustive_axioms(self, k):
        elements = list(enumerate_field(k))
        assert len(set(e.coeffs.to_bytes() for e in elements)) == 1 << k.k
        e = ring_identity(k)
        zero = ring_zero(k)
        for a in elements:
            assert ring_mul(a, e) == a
            for b in elements:
                assert ring_mul(a, b) == ring_mul(b, a)
                if not a.is_zero() and not b.is_zero():
                    assert not ring_mul(a, b).is_zero()  # no zero divisors
        # unique identity
        for cand in elements:
            if all(ring_mul(cand, a) == a for a in elements):
                assert cand == e

    @pytest.mark.parametrize("k", [K2, K4])
    def test_exhaustive_associativity_distributivity(self, k):
        elements = list(enumerate_field(k))
        for a in elements:
            for b in elements:
                ab = ring_mul(a, b)
                for c in elements:
                    assert ring_mul(ab, c) == ring_mul(a, ring_mul(b, c))
                    assert ring_mul(a, ring_add(b, c)) == ring_add(
                        ring_mul(a, b), ring_mul(a, c)
                    )

    def test_sampled_axioms_k10(self):
        rng = np.random.default_rng(4)
        k = K10
        for _ in range(100):
            a = extend(FieldElementShort(k, BitVector.random(k.k, rng)))
            b = extend(FieldElementShort(k, BitVector.random(k.k, rng)))
            c = extend(FieldElementShort(k, BitVector.random(k.k, rng)))
            assert ring_mul(a, b) == ring_mul(b, a)
            assert ring_mul(ring_mul(a, b), c) == ring_mul(a, ring_mul(b, c))
            assert ring_mul(a, ring_add(b, c)) == ring_add(
                ring_mul(a, b), ring_mul(a, c)
            )
            if not a.is_zero() and not b.is_zero():
                assert not ring_mul(a, b).is_zero()

    def test_field_size_k10(self):
        k = K10
        seen = {e.coeffs.to_bytes() for e in enumerate_field(k)}
        assert len(seen) == 1 << 10  # |S| = 2^k

    def test_multiplicative_group_order_k4(self):
        # nonzero elements form a cyclic group of order 2^4 - 1
        k = K4
        nonzero = [a for a in enumerate_field(k) if not a.is_zero()]
        orders = set()
        for a in nonzero:
            o, p = 1, a
            while p != ring_identity(k):
                p = ring_mul(p, a)
                o += 1
            orders.add(o)
        assert max(orders) == 15  # a generator exists
        assert all(15 % o == 0 for o in orders)


class TestFastVsSchoolbook:
    @pytest.mark.parametrize("k", [K2, K4])
    def test_exhaustive_agreement(self, k):
        for a in enumerate_field(k):
            for b in enumerate_field(k):
                assert ring_mul(a, b, method="fft") == schoolbook_ring_mul(a, b)

    @pytest.mark.parametrize("kval", [10, 100, 1018])
    def test_sampled_agreement(self, kval):
        k = NaIndex(kval)
        rng = np.random.default_rng(kval)
        for _ in range(50):
            a = extend(FieldElementShort(k, BitVector.random(k.k, rng)))
            b = extend(FieldElementShort(k, BitVector.random(k.k, rng)))
            assert ring_mul(a, b, method="fft") == schoolbook_ring_mul(a, b)
