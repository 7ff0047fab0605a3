"""Field arithmetic using circulant matrices.

For k with k+1 an odd prime and 2 a primitive root modulo k+1 (the set
``N_A``), the even-weight polynomials of degree <= k form a copy of
F_{2^k} inside F_2[x]/(x^{k+1} + 1).  Multiplication there is a cyclic
convolution, so a single length-(k+1) convolution multiplies field
elements in O(k log k).

Elements travel in two shapes:

* :class:`RingElement` - the full k+1 coefficients, even Hamming weight;
* :class:`FieldElementShort` - k bits; the dropped top coefficient is
  the parity of the rest, so extend/shorten are mutually inverse.

The number-theoretic helpers (Miller-Rabin, Pollard rho, the membership
test and the incremental search) are self-contained; tests cross-check
them against sympy.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bitlinalg import BitVector, cyclic_convolve_f2

__all__ = [
    "NaIndex",
    "RingElement",
    "FieldElementShort",
    "FactorBudgetError",
    "NaSearchError",
    "is_probable_prime",
    "primality_is_deterministic",
    "factorize",
    "is_in_na",
    "find_na_at_least",
    "extend",
    "shorten",
    "ring_add",
    "ring_mul",
    "ring_pow",
    "ring_zero",
    "ring_identity",
    "schoolbook_ring_mul",
]


class FactorBudgetError(RuntimeError):
    """Factoring ran out of its step budget."""


class NaSearchError(RuntimeError):
    """The incremental search exhausted its candidate budget."""


# ---------------------------------------------------------------------------
# Primality and factoring
# ---------------------------------------------------------------------------

_SMALL_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97,
)

# Miller-Rabin with these witnesses is a proven primality test below this
# bound; beyond it we fall back to 64 pseudo-random rounds.
_MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_FALLBACK_ROUNDS = 64


def primality_is_deterministic(n: int) -> bool:
    """True when :func:`is_probable_prime` is an unconditional proof for n."""
    return n < _MR_DETERMINISTIC_BOUND


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = (x * x) % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin: deterministic below ~3.3e24, 64 rounds above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if primality_is_deterministic(n):
        witnesses = _MR_WITNESSES
    else:
        rnd = random.Random(n)  # reproducible rounds per candidate
        witnesses = tuple(rnd.randrange(2, n - 1) for _ in range(_MR_FALLBACK_ROUNDS))
    return all(_mr_round(n, d, s, a % n or 2) for a in witnesses)


def _pollard_rho(n: int, max_steps: int) -> int | None:
    """Brent-cycle rho; returns a nontrivial factor or None on budget end."""
    if n % 2 == 0:
        return 2
    rnd = random.Random(n ^ 0x9E3779B9)
    steps = 0
    while steps < max_steps:
        y = rnd.randrange(1, n)
        c = rnd.randrange(1, n)
        m = 128
        g, r, q = 1, 1, 1
        x = ys = y
        while g == 1 and steps < max_steps:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            j = 0
            while j < r and g == 1:
                ys = y
                for _ in range(min(m, r - j)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                steps += min(m, r - j)
                g = _gcd(q, n)
                j += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = _gcd(abs(x - ys), n)
                steps += 1
                if steps >= max_steps:
                    break
        if 1 < g < n:
            return g
    return None


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def factorize(n: int, rho_budget: int = 2_000_000) -> dict[int, int]:
    """Prime factorization via trial division then Pollard rho.

    Raises :class:`FactorBudgetError` when rho exhausts ``rho_budget``
    steps on some cofactor; callers searching for candidates treat that
    as "skip this one".
    """
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    factors: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    p = _SMALL_PRIMES[-1] + 2
    while p * p <= n and p < 100_000:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += 2
    stack = [n] if n > 1 else []
    while stack:
        v = stack.pop()
        if v == 1:
            continue
        if is_probable_prime(v):
            factors[v] = factors.get(v, 0) + 1
            continue
        g = _pollard_rho(v, rho_budget)
        if g is None:
            raise FactorBudgetError(f"rho budget exhausted factoring {v}")
        stack.append(g)
        stack.append(v // g)
    return factors


# ---------------------------------------------------------------------------
# N_A membership and search
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def is_in_na(k: int, rho_budget: int = 2_000_000) -> bool:
    """k+1 an odd prime and 2 of full order k modulo k+1.

    The order condition is checked through the factorization of k:
    2^(k/p) != 1 (mod k+1) for every prime p | k.
    """
    if k < 2 or k % 2 != 0:
        return False  # k+1 even or < 3 cannot be an odd prime
    if not is_probable_prime(k + 1):
        return False
    for p in factorize(k, rho_budget):
        if pow(2, k // p, k + 1) == 1:
            return False
    return True


def find_na_at_least(lower: int, max_candidates: int = 2_000_000) -> "NaIndex":
    """Smallest member of N_A that is >= lower.

    Searches even candidates upward; candidates whose factorization
    blows the rho budget are skipped (the search cap is mandatory, the
    set is only conjectured infinite).
    """
    if lower < 2:
        raise ValueError("lower must be >= 2")
    k = lower + (lower % 2)
    for _ in range(max_candidates):
        try:
            if is_in_na(k):
                return NaIndex(k)
        except FactorBudgetError:
            pass
        k += 2
    raise NaSearchError(
        f"no member found in [{lower}, {k}) within {max_candidates} candidates"
    )


@dataclass(frozen=True)
class NaIndex:
    """A validated field-size index: k+1 odd prime, 2 primitive mod k+1."""

    k: int

    def __post_init__(self):
        if not is_in_na(self.k):
            raise ValueError(f"{self.k} is not a valid field-size index")

    def __int__(self) -> int:
        return self.k


# ---------------------------------------------------------------------------
# Ring elements and arithmetic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingElement:
    """Even-weight coefficient vector of length k+1: a field element."""

    k: NaIndex
    coeffs: BitVector

    def __post_init__(self):
        if len(self.coeffs) != self.k.k + 1:
            raise ValueError(
                f"expected {self.k.k + 1} coefficients, got {len(self.coeffs)}"
            )
        if self.coeffs.weight() % 2 != 0:
            raise ValueError("coefficient weight must be even")

    def is_zero(self) -> bool:
        return self.coeffs.weight() == 0


@dataclass(frozen=True)
class FieldElementShort:
    """k-bit shortened form; every k-bit string is a valid element."""

    k: NaIndex
    bits: BitVector

    def __post_init__(self):
        if len(self.bits) != self.k.k:
            raise ValueError(f"expected {self.k.k} bits, got {len(self.bits)}")


def _extend_bits(bits: np.ndarray) -> np.ndarray:
    out = np.empty(bits.size + 1, dtype=np.uint8)
    out[:-1] = bits
    out[-1] = bits.sum() & 1
    return out


def extend(s: FieldElementShort) -> RingElement:
    """Append the parity bit, producing the even-weight full form."""
    return RingElement(
        s.k, BitVector(_extend_bits(s.bits.bits), _trusted=True)
    )


def shorten(a: RingElement) -> FieldElementShort:
    """Drop the top coefficient; rejects inputs outside the field subset."""
    return FieldElementShort(a.k, a.coeffs[: a.k.k])


def ring_zero(k: NaIndex) -> RingElement:
    return RingElement(k, BitVector.zeros(k.k + 1))


def ring_identity(k: NaIndex) -> RingElement:
    """Multiplicative identity: x + x^2 + ... + x^k.

    By the Chinese remainder theorem this is the unique element that is
    0 mod (x+1) and 1 mod (x^k + ... + 1); validated in the test suite by
    e*e = e and e*s = s sweeps.
    """
    bits = np.ones(k.k + 1, dtype=np.uint8)
    bits[0] = 0
    return RingElement(k, BitVector(bits, _trusted=True))


def _check_same_field(a: RingElement, b: RingElement):
    if a.k != b.k:
        raise ValueError(f"field size mismatch: {a.k.k} vs {b.k.k}")


def ring_add(a: RingElement, b: RingElement) -> RingElement:
    _check_same_field(a, b)
    return RingElement(a.k, a.coeffs ^ b.coeffs)


def ring_mul(a: RingElement, b: RingElement, method: str = "auto") -> RingElement:
    """a(x) b(x) mod x^{k+1} + 1, i.e. one cyclic convolution."""
    _check_same_field(a, b)
    return RingElement(a.k, cyclic_convolve_f2(a.coeffs, b.coeffs, method=method))


def schoolbook_ring_mul(a: RingElement, b: RingElement) -> RingElement:
    """Same contract as :func:`ring_mul` via the quadratic path only."""
    _check_same_field(a, b)
    return RingElement(a.k, cyclic_convolve_f2(a.coeffs, b.coeffs, method="schoolbook"))


def ring_pow(a: RingElement, e: int, method: str = "auto") -> RingElement:
    """Square-and-multiply; a^0 is the multiplicative identity."""
    if e < 0:
        raise ValueError("exponent must be >= 0")
    result = ring_identity(a.k)
    base = a
    while e:
        if e & 1:
            result = ring_mul(result, base, method=method)
        base = ring_mul(base, base, method=method)
        e >>= 1
    return result


def enumerate_field(k: NaIndex):
    """All 2^k field elements in shortened-form counting order (small k)."""
    if k.k > 20:
        raise ValueError("enumeration is for desk-scale fields only")
    for v in range(1 << k.k):
        yield extend(FieldElementShort(k, BitVector.from_int(v, k.k)))
