"""Brute-force measurement of universality and leftover-hash claims.

Everything here is an oracle: small instances, exhaustive enumeration,
exact rational arithmetic.  Collision parameters are measured as

    delta       = 2^m     max_{x != 0} Pr[f_R(x) = 0]
    delta_dual  = 2^(n-m) max_{x != 0} Pr[f_R_dual(x) = 0]

with the probability taken over the (possibly non-uniform) seed.  Seed
distributions carry exact dyadic weights so the maxima are reported as
exact fractions, never floats.

The leftover measurement computes E_R || P_{f_R(A)} - U_m ||_1 for flat
sources, again exactly, and pairs it with the theoretical bound implied
by the family's proven universality parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .bitlinalg import BitVector
from .families import FamilySpec, dual, generator_matrix, proven_delta_claims
from .security import (
    bound_dual_classical,
    bound_universal_classical,
    penalty_nonuniform,
)

__all__ = [
    "SeedDistribution",
    "JointDistribution",
    "DeltaMeasurement",
    "LeftoverReport",
    "NoProvenBoundError",
    "measure_delta_universal",
    "measure_delta_dual",
    "h_min",
    "h_min_cond",
    "d1_prime",
    "d2",
    "flat_source",
    "FlatSource",
    "empirical_leftover",
    "theoretical_epsilon",
    "EXHAUSTIVE_N_CAP",
]

EXHAUSTIVE_N_CAP = 24


class NoProvenBoundError(ValueError):
    """The library makes no universality claim for this family."""


# ---------------------------------------------------------------------------
# Seed distributions (exact dyadic weights)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeedDistribution:
    """Distribution over d-bit seeds: P(r) = weights[r] / 2^denom_log2.

    Weights are exact integers; arbitrary dyadic rationals are enough
    for every measurement in this package and keep all results exact.
    """

    d: int
    weights: Optional[tuple[int, ...]]  # None means uniform
    denom_log2: int

    @classmethod
    def uniform(cls, d: int) -> "SeedDistribution":
        return cls(d=d, weights=None, denom_log2=d)

    @classmethod
    def point_mass(cls, d: int, r: int = 0) -> "SeedDistribution":
        w = [0] * (1 << d)
        w[r] = 1
        return cls(d=d, weights=tuple(w), denom_log2=0)

    @classmethod
    def restricted_uniform(cls, d: int, h: int) -> "SeedDistribution":
        """Uniform on the first 2^h seeds: min-entropy exactly h <= d."""
        if not (0 <= h <= d):
            raise ValueError(f"need 0 <= h <= d, got h={h} d={d}")
        w = [0] * (1 << d)
        for r in range(1 << h):
            w[r] = 1
        return cls(d=d, weights=tuple(w), denom_log2=h)

    @classmethod
    def from_fractions(cls, d: int, probs: Iterable[Fraction]) -> "SeedDistribution":
        probs = [Fraction(p) for p in probs]
        if len(probs) != 1 << d:
            raise ValueError(f"need 2^{d} probabilities")
        if sum(probs) != 1:
            raise ValueError("probabilities must sum to exactly 1")
        denom = 1
        for p in probs:
            denom = denom * p.denominator // math.gcd(denom, p.denominator)
        q = denom.bit_length() - 1
        if denom != 1 << q:
            raise ValueError("seed probabilities must be dyadic rationals")
        return cls(
            d=d,
            weights=tuple(int(p * denom) for p in probs),
            denom_log2=q,
        )

    def __post_init__(self):
        if self.weights is not None:
            if len(self.weights) != 1 << self.d:
                raise ValueError("weight table must cover all seeds")
            if sum(self.weights) != 1 << self.denom_log2:
                raise ValueError("weights must sum to the denominator")

    def support(self) -> list[tuple[int, int]]:
        """(seed value, integer weight) pairs with nonzero weight."""
        if self.weights is None:
            return [(r, 1) for r in range(1 << self.d)]
        return [(r, w) for r, w in enumerate(self.weights) if w]

    def prob(self, r: int) -> Fraction:
        if self.weights is None:
            return Fraction(1, 1 << self.d)
        return Fraction(self.weights[r], 1 << self.denom_log2)

    @property
    def min_entropy(self) -> float:
        max_w = 1 if self.weights is None else max(self.weights)
        return self.denom_log2 - math.log2(max_w)


# ---------------------------------------------------------------------------
# Classical distribution metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JointDistribution:
    """Explicit P_{A,E} table; rows indexed by a, columns by e."""

    probs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("joint distribution must be a 2-d table")
        if (arr < 0).any():
            raise ValueError("probabilities must be nonnegative")
        if abs(float(arr.sum()) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 within 1e-12")
        object.__setattr__(self, "probs", arr)

    @property
    def a_size(self) -> int:
        return self.probs.shape[0]

    @property
    def e_size(self) -> int:
        return self.probs.shape[1]

    def marginal_e(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    @classmethod
    def product(cls, p_a, p_e) -> "JointDistribution":
        return cls(np.outer(np.asarray(p_a, float), np.asarray(p_e, float)))


def h_min(probs) -> float:
    """-log2 of the largest outcome probability."""
    arr = np.asarray(probs, dtype=np.float64)
    top = float(arr.max(initial=0.0))
    if top <= 0:
        raise ValueError("distribution has no mass")
    return -math.log2(top)


def h_min_cond(joint: JointDistribution) -> float:
    """Conditional min-entropy -log2 sum_e max_a P(a, e)."""
    total = float(joint.probs.max(axis=0).sum())
    if total <= 0:
        raise ValueError("distribution has no mass")
    return -math.log2(total)


def d1_prime(joint: JointDistribution) -> float:
    """L1 distance between P_{A,E} and (uniform over A) x P_E."""
    ideal = np.outer(
        np.full(joint.a_size, 1.0 / joint.a_size), joint.marginal_e()
    )
    return float(np.abs(joint.probs - ideal).sum())


def d2(joint: JointDistribution, q_e) -> float:
    """Collision-distance functional sum (P - U x P_E)^2 / Q_E.

    Requires supp(P_E) inside supp(Q_E); checks the Cauchy-Schwarz
    relation d1' <= sqrt(d2 |A|) before returning.
    """
    q = np.asarray(q_e, dtype=np.float64)
    if q.shape != (joint.e_size,):
        raise ValueError("Q_E has wrong shape")
    p_e = joint.marginal_e()
    bad = (q <= 0) & (p_e > 0)
    if bad.any():
        raise ValueError("supp(P_E) must be contained in supp(Q_E)")
    ideal = np.outer(np.full(joint.a_size, 1.0 / joint.a_size), p_e)
    diff2 = (joint.probs - ideal) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(q > 0, diff2 / q, 0.0)
    value = float(terms.sum())
    assert d1_prime(joint) <= math.sqrt(max(value, 0.0) * joint.a_size) + 1e-9
    return value


# ---------------------------------------------------------------------------
# Sources
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlatSource:
    """Uniform on a 2^t-element subset of {0,1}^n: min-entropy exactly t."""

    n: int
    t: int
    support: tuple[int, ...]

    def probs(self) -> np.ndarray:
        arr = np.zeros(1 << self.n)
        arr[list(self.support)] = 2.0**-self.t
        return arr


def flat_source(n: int, t: int, support_select: int = 0) -> FlatSource:
    """Pseudo-randomly positioned flat source; deterministic in the seed."""
    if not (0 <= t <= n):
        raise ValueError(f"need 0 <= t <= n, got t={t} n={n}")
    if n > EXHAUSTIVE_N_CAP:
        raise ValueError(f"flat sources are desk-scale only (n <= {EXHAUSTIVE_N_CAP})")
    if t == n:
        support = np.arange(1 << n, dtype=np.int64)
    else:
        rng = np.random.default_rng(support_select)
        support = rng.choice(1 << n, size=1 << t, replace=False)
    return FlatSource(n=n, t=t, support=tuple(int(v) for v in np.sort(support)))


# ---------------------------------------------------------------------------
# Exhaustive family measurements
# ---------------------------------------------------------------------------


def _seed_vector(spec: FamilySpec, r: int) -> BitVector:
    return BitVector.from_int(r, spec.d)


def _columns_as_ints(spec: FamilySpec, r: int) -> np.ndarray:
    """Column j of the generator as an m-bit integer (output of e_j)."""
    g = generator_matrix(spec, _seed_vector(spec, r))
    weights = (1 << np.arange(spec.m, dtype=np.uint64)).reshape(-1, 1)
    return (g.entries.astype(np.uint64) * weights).sum(axis=0)


def _outputs_over_all_inputs(spec: FamilySpec, r: int) -> np.ndarray:
    """f_r(x) for every x in {0,1}^n, int-encoded, by linear doubling."""
    cols = _columns_as_ints(spec, r)
    out = np.zeros(1 << spec.n, dtype=np.uint64)
    size = 1
    for j in range(spec.n):
        out[size : 2 * size] = out[:size] ^ cols[j]
        size *= 2
    return out


@dataclass(frozen=True)
class DeltaMeasurement:
    delta: Fraction
    argmax_x: int
    n: int
    m: int
    seed_min_entropy: float
    exact: bool = True
    seed_sample: Optional[int] = None

    @property
    def as_float(self) -> float:
        return float(self.delta)


def measure_delta_universal(
    spec: FamilySpec,
    seed_dist: Optional[SeedDistribution] = None,
    seed_sample: Optional[int] = None,
    rng_seed: int = 2024,
) -> DeltaMeasurement:
    """Exact 2^m max_{x != 0} Pr[x in Ker f_R] over the given seed law.

    When the seed space is too large to enumerate, pass ``seed_sample``
    to estimate over that many drawn seeds; the result is then flagged
    ``exact=False``.  Note the max over x of sampled frequencies is
    biased upward, so a sampled value above the claim is not a
    counterexample; only the exact mode proves violations.
    """
    if spec.n > EXHAUSTIVE_N_CAP:
        raise ValueError(f"exhaustive measurement capped at n <= {EXHAUSTIVE_N_CAP}")
    if seed_dist is None:
        seed_dist = SeedDistribution.uniform(spec.d)
    if seed_dist.d != spec.d:
        raise ValueError(
            f"seed distribution is over {seed_dist.d} bits, family needs {spec.d}"
        )
    if seed_sample is None:
        pairs = seed_dist.support()
        denom_log2 = seed_dist.denom_log2
    else:
        rng = np.random.default_rng(rng_seed)
        if seed_dist.weights is None:
            drawn = rng.integers(0, 1 << spec.d, size=seed_sample)
        else:
            seeds = [r for r, _ in seed_dist.support()]
            probs = [float(seed_dist.prob(r)) for r in seeds]
            drawn = np.asarray(seeds, dtype=np.int64)[
                rng.choice(len(seeds), size=seed_sample, p=probs)
            ]
        counts: dict[int, int] = {}
        for r in drawn:
            counts[int(r)] = counts.get(int(r), 0) + 1
        pairs = sorted(counts.items())
        if seed_sample & (seed_sample - 1):
            raise ValueError("seed_sample must be a power of two (exact weights)")
        denom_log2 = seed_sample.bit_length() - 1
    acc = np.zeros(1 << spec.n, dtype=np.int64)
    for r, w in pairs:
        acc += w * (_outputs_over_all_inputs(spec, r) == 0)
    acc[0] = -1  # exclude x = 0
    x_star = int(acc.argmax())
    delta = Fraction(int(acc[x_star]) << spec.m, 1 << denom_log2)
    return DeltaMeasurement(
        delta=delta,
        argmax_x=x_star,
        n=spec.n,
        m=spec.m,
        seed_min_entropy=seed_dist.min_entropy,
        exact=seed_sample is None,
        seed_sample=seed_sample,
    )


def measure_delta_dual(
    spec: FamilySpec,
    seed_dist: Optional[SeedDistribution] = None,
    seed_sample: Optional[int] = None,
    rng_seed: int = 2024,
) -> DeltaMeasurement:
    """delta of the dual family, i.e. 2^(n-m) max Pr[x in (Ker f_R)^perp]."""
    return measure_delta_universal(dual(spec), seed_dist, seed_sample, rng_seed)


# ---------------------------------------------------------------------------
# Leftover-hash measurement
# ---------------------------------------------------------------------------


def theoretical_epsilon_log2(spec: FamilySpec, t: float) -> tuple[float, str, float]:
    """(log2 epsilon, route, delta) implied by the family's proven claims."""
    from .security import bound_dual_classical_log2, bound_universal_classical_log2

    claims = proven_delta_claims(spec)
    if claims["route"] in ("dual", "dual-dual-concat") and claims["dual"] is not None:
        return (
            bound_dual_classical_log2(claims["dual"], spec.m, t),
            claims["route"],
            claims["dual"],
        )
    if claims["route"] == "universal" and claims["universal"] is not None:
        return (
            bound_universal_classical_log2(claims["universal"], spec.m, t),
            "universal",
            claims["universal"],
        )
    raise NoProvenBoundError(f"no proven universality parameter for {spec}")


def theoretical_epsilon(spec: FamilySpec, t: float) -> tuple[float, str, float]:
    """(epsilon, route, delta); see :func:`theoretical_epsilon_log2`."""
    log2_eps, route, delta = theoretical_epsilon_log2(spec, t)
    if route == "universal":
        return bound_universal_classical(delta, spec.m, t), route, delta
    return bound_dual_classical(delta, spec.m, t), route, delta


@dataclass(frozen=True)
class LeftoverReport:
    measured: Fraction
    bound: float
    bound_penalized: float
    route: str
    delta: float
    t: int
    d: int
    seed_min_entropy: float

    @property
    def ok(self) -> bool:
        return float(self.measured) <= self.bound_penalized * (1 + 1e-12)

    @property
    def ok_at_uniform_bound(self) -> bool:
        return float(self.measured) <= self.bound * (1 + 1e-12)


def empirical_leftover(
    spec: FamilySpec,
    seed_dist: Optional[SeedDistribution],
    source: FlatSource,
    trials: Optional[int] = None,
    rng_seed: int = 2024,
) -> LeftoverReport:
    """E_R || P_{f_R(A)} - U_m ||_1 for a flat source, paired with the bound.

    Exhaustive (trials=None) is exact: every seed in the support, the full
    source support, integer arithmetic.  Sampled mode draws ``trials``
    seeds with the recorded generator seed and returns the sample mean as
    a fraction with the empirical denominator.
    """
    if source.n != spec.n:
        raise ValueError(f"source is over {source.n} bits, family needs {spec.n}")
    if seed_dist is None:
        seed_dist = SeedDistribution.uniform(spec.d)
    if seed_dist.d != spec.d:
        raise ValueError("seed distribution does not match the family seed length")
    support = np.asarray(source.support, dtype=np.uint64)
    t, m = source.t, spec.m

    def d1_numerator(r: int) -> int:
        cols = _columns_as_ints(spec, r)
        out = np.zeros(support.size, dtype=np.uint64)
        for j in range(spec.n):
            bit = (support >> np.uint64(j)) & np.uint64(1)
            out ^= np.where(bit.astype(bool), cols[j], np.uint64(0))
        counts = np.bincount(out.astype(np.int64), minlength=1 << m)
        # || P - U ||_1 = sum_b |counts_b 2^m - 2^t| / 2^(t+m)
        return int(np.abs(counts.astype(object) * (1 << m) - (1 << t)).sum())

    if trials is None:
        total = 0
        for r, w in seed_dist.support():
            total += w * d1_numerator(r)
        measured = Fraction(total, 1 << (seed_dist.denom_log2 + t + m))
    else:
        rng = np.random.default_rng(rng_seed)
        seeds = [r for r, _ in seed_dist.support()]
        probs = [float(seed_dist.prob(r)) for r in seeds]
        picks = rng.choice(len(seeds), size=trials, p=probs)
        total = sum(d1_numerator(seeds[int(i)]) for i in picks)
        measured = Fraction(total, trials * (1 << (t + m)))

    eps, route, delta = theoretical_epsilon(spec, t)
    h = seed_dist.min_entropy
    penalized = penalty_nonuniform(eps, spec.d, h, route="collision")
    return LeftoverReport(
        measured=measured,
        bound=eps,
        bound_penalized=penalized,
        route=route,
        delta=delta,
        t=t,
        d=spec.d,
        seed_min_entropy=h,
    )
