"""Exact arithmetic for every security bound and seed-length formula.

Everything is computed in the log2 domain so that security levels like
2**(-beta * n) at n = 10**6 neither underflow nor lose precision; the
linear value is materialized only on output.  Each public function also
has a ``*_log2`` twin returning log2(epsilon) directly, and the test
suite re-derives every formula in plain linear arithmetic at moderate
parameters, requiring agreement to 12 significant digits.

Quantum-side bounds are scalar formulas in (delta, m, t, eta) only; no
density-matrix computation happens anywhere in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

__all__ = [
    "ExtractorBound",
    "RegimeParams",
    "ComparisonRow",
    "bound_universal_classical",
    "bound_dual_classical",
    "bound_universal_quantum",
    "bound_concat_classical",
    "bound_concat_quantum",
    "bound_dual_dual_concat",
    "g_bounds",
    "f4_bound",
    "penalty_nonuniform",
    "seed_lower_bound_dual",
    "extractor_seed_lower_bound",
    "dual_delta_conversion",
    "comparison_table",
    "t3_fixed_point",
    "t4_fixed_point",
    "minimize_eta",
]

_LOG2_NEG_INF = float("-inf")


def _log2(x: float) -> float:
    return math.log2(x) if x > 0 else _LOG2_NEG_INF

def _exp2(x: float) -> float:
    try:
        return 2.0**x
    except OverflowError:
        return math.inf


def _log2_add(a: float, b: float) -> float:
    """log2(2^a + 2^b) without leaving the log domain."""
    if a == _LOG2_NEG_INF:
        return b
    if b == _LOG2_NEG_INF:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log2(1.0 + _exp2(lo - hi))


def _log2_sum(terms) -> float:
    acc = _LOG2_NEG_INF
    for t in terms:
        acc = _log2_add(acc, t)
    return acc


def _require_delta(delta: float, name: str = "delta"):
    if delta < 1.0:
        raise ValueError(f"{name} must be >= 1, got {delta}")


# ---------------------------------------------------------------------------
# Single-stage bounds
# ---------------------------------------------------------------------------


def bound_universal_classical_log2(delta: float, m: float, t: float) -> float:
    _require_delta(delta)
    return 0.5 * _log2_add(_log2(delta - 1.0), m - t)


def bound_universal_classical(delta: float, m: float, t: float) -> float:
    """sqrt(delta - 1 + 2^(m-t)): the universal-family route."""
    return _exp2(bound_universal_classical_log2(delta, m, t))


def bound_dual_classical_log2(delta: float, m: float, t: float) -> float:
    _require_delta(delta)
    return 0.5 * _log2(delta) + (m - t) / 2.0


def bound_dual_classical(delta: float, m: float, t: float) -> float:
    """sqrt(delta) * 2^((m-t)/2): the dual-family route.

    Unlike the universal route this stays meaningful for delta >= 2.
    """
    return _exp2(bound_dual_classical_log2(delta, m, t))


def _universal_quantum_log2_at(delta: float, m: float, t: float, eta: float) -> float:
    if eta <= 0:
        raise ValueError(f"eta must be > 0, got {eta}")
    # 2*eta + sqrt(delta - 1 + (1 + 2/eta^2) * 2^(m-t))
    inner = _log2_add(
        _log2(delta - 1.0),
        _log2_add(0.0, _log2(2.0) - 2.0 * _log2(eta)) + (m - t),
    )
    return _log2_add(_log2(2.0 * eta), 0.5 * inner)


def minimize_eta(objective_log2, lo_log2: float, hi_log2: float, rel_tol: float = 1e-9):
    """Golden-section minimum of a unimodal objective over log2(eta).

    The bracket is expanded adaptively until the minimum is interior.
    Returns (eta, objective_log2(eta)).
    """
    phi = (math.sqrt(5.0) - 1.0) / 2.0

    def f(le):
        return objective_log2(_exp2(le))

    for _ in range(100):  # expand until the minimum is not at an edge
        probe = [lo_log2 + (hi_log2 - lo_log2) * i / 8 for i in range(9)]
        vals = [f(p) for p in probe]
        best = vals.index(min(vals))
        if best == 0:
            lo_log2 -= hi_log2 - lo_log2
        elif best == 8:
            hi_log2 += hi_log2 - lo_log2
        else:
            break
    a, b = lo_log2, hi_log2
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > rel_tol * max(1.0, abs(a), abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    le = (a + b) / 2.0
    return _exp2(le), f(le)


def bound_universal_quantum_log2(
    delta: float, m: float, t: float, eta: Optional[float] = None
) -> float:
    _require_delta(delta)
    if eta is not None:
        return _universal_quantum_log2_at(delta, m, t, eta)
    # The optimum sits near 2^((m-t)/4); bracket around it and expand.
    center = (m - t) / 4.0
    _, val = minimize_eta(
        lambda e: _universal_quantum_log2_at(delta, m, t, e),
        min(center, 0.0) - 8.0,
        0.0,
    )
    return val


def bound_universal_quantum(
    delta: float, m: float, t: float, eta: Optional[float] = None
) -> float:
    """2*eta + sqrt(delta - 1 + (1 + 2/eta^2) 2^(m-t)); minimized over
    eta > 0 when eta is not supplied."""
    return _exp2(bound_universal_quantum_log2(delta, m, t, eta))


# ---------------------------------------------------------------------------
# Concatenation bounds
# ---------------------------------------------------------------------------


def bound_concat_classical_log2(
    delta: float, delta_prime: float, m: float, l: float, t: float
) -> float:
    _require_delta(delta)
    _require_delta(delta_prime, "delta_prime")
    if m > l:
        raise ValueError(f"need m <= l, got m={m} l={l}")
    # kept as a sum of halves so the delta = 1 case reduces to the
    # single-stage dual route bit-for-bit
    inner = _log2_add(m - t, (m - l) + _log2(delta - 1.0))
    return 0.5 * _log2(delta_prime) + 0.5 * inner


def bound_concat_classical(
    delta: float, delta_prime: float, m: float, l: float, t: float
) -> float:
    """First stage delta-almost universal into l bits, second stage
    delta'-almost dual universal down to m bits:
    sqrt(delta' (2^(m-t) + 2^(m-l) (delta-1)))."""
    return _exp2(bound_concat_classical_log2(delta, delta_prime, m, l, t))


def bound_concat_quantum_log2(
    delta: float, delta_prime: float, m: float, l: float, t: float, eta: float
) -> float:
    _require_delta(delta)
    _require_delta(delta_prime, "delta_prime")
    if eta <= 0:
        raise ValueError(f"eta must be > 0, got {eta}")
    term_t = _log2_add(_log2(2.0) - 2.0 * _log2(eta), 0.0) + (m - t)
    term_l = (m - l) + _log2(delta - 1.0) + _log2(1.0 + eta)
    root = 0.5 * (_log2(delta_prime) + _log2_add(term_t, term_l))
    return _log2_add(root, _log2(2.0 * eta))


def bound_concat_quantum(
    delta: float, delta_prime: float, m: float, l: float, t: float, eta: float
) -> float:
    """sqrt(delta' ((2 eta^-2 + 1) 2^(m-t) + 2^(m-l)(delta-1)(1+eta))) + 2 eta."""
    return _exp2(bound_concat_quantum_log2(delta, delta_prime, m, l, t, eta))


def bound_dual_dual_concat_log2(
    delta: float, delta_prime: float, m: float, t: float
) -> float:
    _require_delta(delta)
    _require_delta(delta_prime, "delta_prime")
    return 0.5 * (_log2(delta) + _log2(delta_prime)) + (m - t) / 2.0


def bound_dual_dual_concat(
    delta: float, delta_prime: float, m: float, t: float
) -> float:
    """Two dual-universal stages compose to sqrt(delta delta') 2^((m-t)/2),
    identical to the single-stage dual route at delta*delta'."""
    return _exp2(bound_dual_dual_concat_log2(delta, delta_prime, m, t))


# ---------------------------------------------------------------------------
# Two-stage f2 compressions
# ---------------------------------------------------------------------------


def _ceil_ratio(a: float, b: float) -> int:
    if b <= 0:
        raise ValueError("ratio denominator must be positive")
    return int(math.ceil(a / b))


def g_bounds_log2(
    n: float, l: float, m: float, t: float, eta: Optional[float] = None
) -> tuple[float, float]:
    if not (1 <= m < l < n):
        raise ValueError(f"need 1 <= m < l < n, got m={m} l={l} n={n}")
    dp = _ceil_ratio(m, n - m)
    dl = _ceil_ratio(l, n - l)
    eps_c = 0.5 * (
        _log2(dp) + _log2_add(m - t, (m - l) + _log2(dl - 1.0))
    )

    def quantum_at(e: float) -> float:
        term_t = _log2_add(0.0, -2.0 * _log2(e)) + (m - t)  # (1 + eta^-2) 2^(m-t)
        term_l = _log2(1.0 + e) + (m - l) + _log2(dl - 1.0)
        return _log2_add(0.5 * (_log2(dp) + _log2_add(term_t, term_l)),
                         _log2(2.0 * e))

    if eta is not None:
        if eta <= 0:
            raise ValueError(f"eta must be > 0, got {eta}")
        eps_q = quantum_at(eta)
    else:
        center = (m - t) / 4.0
        _, eps_q = minimize_eta(quantum_at, min(center, 0.0) - 8.0, 0.0)
    return eps_c, eps_q


def g_bounds(
    n: float, l: float, m: float, t: float, eta: Optional[float] = None
) -> tuple[float, float]:
    """(classical, quantum) extractor errors of the two-stage family:

    eps_c = sqrt(ceil(m/(n-m)) (2^(m-t) + 2^(m-l) (ceil(l/(n-l)) - 1)))
    eps_q = sqrt(ceil(m/(n-m)) ((1+eta^-2) 2^(m-t)
                                + (1+eta) 2^(m-l) (ceil(l/(n-l)) - 1))) + 2 eta
    """
    c, q = g_bounds_log2(n, l, m, t, eta)
    return _exp2(c), _exp2(q)


def f4_bound_log2(n: float, m: float, t: float) -> float:
    # m = t is allowed: the formula is then >= 2, i.e. vacuously true
    if not (1 <= m <= t < n):
        raise ValueError(f"need 1 <= m <= t < n, got m={m} t={t} n={n}")
    q = (m - t) / 4.0
    dp = _ceil_ratio(m, n - m)
    cl = _ceil_ratio(m + t, 2.0 * n - m - t)
    # 2^((m-t)/2) - 2^((m-t)/4) + (1 + 2^((m-t)/4)) * cl   (all terms >= 0
    # because cl >= 1; group as 2^((m-t)/2) + cl + 2^((m-t)/4) (cl - 1))
    inner = _log2_sum(
        [2.0 * q, _log2(float(cl)), q + _log2(cl - 1.0)]
    )
    return _log2_add(q + 0.5 * (_log2(dp) + inner), q + 1.0)


def f4_bound(n: float, m: float, t: float) -> float:
    """Quantum error at the seed-minimizing choices l = (m+t)/2 and
    eta = 2^((m-t)/4); equals the two-stage quantum bound there."""
    return _exp2(f4_bound_log2(n, m, t))


# ---------------------------------------------------------------------------
# Seed penalties and lower bounds
# ---------------------------------------------------------------------------


def penalty_nonuniform(
    epsilon: float, d: int, h: float, route: str = "collision"
) -> float:
    """Degraded error when the d-bit seed has only min-entropy h.

    route "direct": epsilon * 2^(d-h), valid for any extractor.
    route "collision": epsilon * 2^((d-h)/2), valid when the base bound
    was derived through the collision functional d2, as are all bounds
    in this package.
    """
    if h > d:
        raise ValueError(f"seed min-entropy h={h} cannot exceed d={d}")
    if route == "direct":
        return epsilon * _exp2(float(d) - h)
    if route == "collision":
        return epsilon * _exp2((float(d) - h) / 2.0)
    raise ValueError(f"unknown route {route!r}")


def seed_lower_bound_dual(n: float, m: float, delta: float) -> float:
    """No delta-almost dual universal family can use seeds with
    min-entropy below n - m - log2(delta)."""
    _require_delta(delta)
    return n - m - _log2(delta)


def extractor_seed_lower_bound(n: float, m: float, t: float, epsilon: float) -> float:
    """-log2(eps) - max(t - n + m, 0) lower-bounds H_min of any seed."""
    if not (0 < epsilon <= 1):
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    return extractor_seed_lower_bound_from_log2(n, m, t, _log2(epsilon))


def extractor_seed_lower_bound_from_log2(
    n: float, m: float, t: float, log2_epsilon: float
) -> float:
    return -log2_epsilon - max(t - n + m, 0.0)


def dual_delta_conversion(delta: float, n: float, m: float) -> float:
    """Universality parameter of the dual of a delta-almost universal
    family: 2 (1 - 2^-m delta) + (delta - 1) 2^(n-m).

    Raises when the expression is negative (no valid family exists with
    such parameters)."""
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    value = 2.0 * (1.0 - _exp2(-m) * delta) + (delta - 1.0) * _exp2(n - m)
    if value < 0:
        raise ValueError(
            f"conversion of delta={delta} at n={n} m={m} is negative; "
            "not a valid universality parameter"
        )
    return value


# ---------------------------------------------------------------------------
# Bound records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtractorBound:
    """A computed bound with the formula that produced it."""

    formula_id: str
    n: Optional[int] = None
    m: Optional[int] = None
    t: Optional[float] = None
    d: Optional[int] = None
    h: Optional[float] = None
    delta: float = 1.0
    delta_prime: Optional[float] = None
    eta: Optional[float] = None
    epsilon: float = 0.0
    log2_epsilon: float = _LOG2_NEG_INF
    notes: str = ""

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.delta < 1:
            raise ValueError("delta must be >= 1")
        if self.d is not None and self.h is not None and self.h > self.d:
            raise ValueError("h must be <= d")
        for name in ("n", "m", "d"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be nonnegative")


# ---------------------------------------------------------------------------
# Fixed points for the seed-minimized families
# ---------------------------------------------------------------------------

FIXED_POINT_MAX_ITER = 1000
FIXED_POINT_TOL_BITS = 2.0**-20


def t3_fixed_point(n: float, m: float, log2_epsilon: float):
    """Solve t = m - 2 log2(eps) + log2(ceil(m/(n-m))) + log2(ceil(t/(n-t)))
    by iteration from t = m.  Returns (t3, iterations)."""

    def rhs(t: float) -> float:
        if t >= n:
            raise ValueError(
                f"required entropy t={t} reached the input length n={n}; "
                "regime infeasible"
            )
        return (
            m
            - 2.0 * log2_epsilon
            + _log2(_ceil_ratio(m, n - m))
            + _log2(_ceil_ratio(t, n - t))
        )

    t = float(m)
    for i in range(1, FIXED_POINT_MAX_ITER + 1):
        new = rhs(t)
        if abs(new - t) < FIXED_POINT_TOL_BITS:
            return new, i
        t = new
    raise RuntimeError("t3 fixed point did not converge")


def t4_fixed_point(n: float, m: float, log2_epsilon: float):
    """Solve the quantum seed-minimized entropy requirement
    t = m - 4 log2(eps) + 4 log2(sqrt(ceil(m/(n-m)) (2^((m-t)/2)
    - 2^((m-t)/4) + (1 + 2^((m-t)/4)) ceil((m+t)/(2n-m-t)))) + 2)."""

    dp = _ceil_ratio(m, n - m)

    def rhs(t: float) -> float:
        if m + t >= 2 * n:
            raise ValueError("regime infeasible: (m+t)/2 reached n")
        q = (m - t) / 4.0
        cl = _ceil_ratio(m + t, 2.0 * n - m - t)
        inner_log2 = _log2_sum([2.0 * q, _log2(float(cl)), q + _log2(cl - 1.0)])
        root_plus_2 = _log2_add(0.5 * (_log2(dp) + inner_log2), 1.0)
        return m - 4.0 * log2_epsilon + 4.0 * root_plus_2

    t = float(m)
    for i in range(1, FIXED_POINT_MAX_ITER + 1):
        new = rhs(t)
        if abs(new - t) < FIXED_POINT_TOL_BITS:
            return new, i
        t = new
    raise RuntimeError("t4 fixed point did not converge")


# ---------------------------------------------------------------------------
# Scheme comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegimeParams:
    """Asymptotic regime: output m = alpha n, error 2^(-beta n^gamma)."""

    alpha: float
    beta: float
    gamma: float
    n: int

    def __post_init__(self):
        if not (0 < self.alpha < 1):
            raise ValueError("alpha must be in (0, 1)")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if not (0 < self.gamma <= 1):
            raise ValueError("gamma must be in (0, 1]")

    @property
    def m(self) -> int:
        return round(self.alpha * self.n)

    @property
    def log2_epsilon(self) -> float:
        return -self.beta * float(self.n) ** self.gamma


@dataclass(frozen=True)
class ComparisonRow:
    scheme: str
    complexity: str
    h_bits: float
    t_classical_bits: Optional[float]
    t_quantum_bits: Optional[float]
    h_formula: str
    t_formula: str
    h_exact: bool  # False when an O(.) placeholder was dropped
    t_exact: bool
    iterations: int = 0


def comparison_table(regime: RegimeParams) -> list[ComparisonRow]:
    """Seed length h and required source entropy t for each scheme.

    Values are leading-order: unspecified O(1)/o(1) terms are set to
    zero and the corresponding formula string keeps the marker, with
    ``h_exact``/``t_exact`` False.  Explicit ceil terms are kept exactly.
    """
    n, m = float(regime.n), float(regime.m)
    le = regime.log2_epsilon
    rows = []

    # single-stage blockwise families: seed n-m
    t0 = m - 2.0 * le + 2.0 * _log2(_ceil_ratio(m, n - m))
    rows.append(
        ComparisonRow(
            scheme="f_F",
            complexity="O(n log n)",
            h_bits=n - m,
            t_classical_bits=t0,
            t_quantum_bits=t0,
            h_formula="n - m",
            t_formula="m - 2 log2(eps) + 2 log2(ceil(m/(n-m)))",
            h_exact=True,
            t_exact=True,
        )
    )

    t3, it3 = t3_fixed_point(n, m, le)
    rows.append(
        ComparisonRow(
            scheme="f_F3",
            complexity="O(n log n)",
            h_bits=2.0 * t3 - m,
            t_classical_bits=t3,
            t_quantum_bits=None,
            h_formula="2 t3 - m",
            t_formula="t3 = m - 2 log2(eps) + log2(ceil(m/(n-m)))"
            " + log2(ceil(t3/(n-t3)))",
            h_exact=True,
            t_exact=True,
            iterations=it3,
        )
    )

    t4, it4 = t4_fixed_point(n, m, le)
    rows.append(
        ComparisonRow(
            scheme="f_F4",
            complexity="O(n log n)",
            h_bits=t4,
            t_classical_bits=None,
            t_quantum_bits=t4,
            h_formula="t4",
            t_formula="t4 = m - 4 log2(eps) + 4 log2(sqrt(...) + 2)",
            h_exact=True,
            t_exact=True,
            iterations=it4,
        )
    )

    rows.append(
        ComparisonRow(
            scheme="modified-toeplitz",
            complexity="O(n log n)",
            h_bits=n - 1.0,
            t_classical_bits=m - 2.0 * le,
            t_quantum_bits=m - 2.0 * le,
            h_formula="n - 1",
            t_formula="m - 2 log2(eps)",
            h_exact=True,
            t_exact=True,
        )
    )

    h_tssr = 2.0 * math.ceil(m + _log2(n / m) - 2.0 * le + 3.0)
    rows.append(
        ComparisonRow(
            scheme="TSSR",
            complexity="O(n log n)",
            h_bits=h_tssr,
            t_classical_bits=m - 2.0 * le,
            t_quantum_bits=m - 4.0 * le,
            h_formula="2 ceil(m + log2(n/m) - 2 log2(eps) + 3)",
            t_formula="m - 2 log2(eps) + O(1) / m - 4 log2(eps) + O(1)",
            h_exact=True,
            t_exact=False,
        )
    )

    h_pair = 4.0 * m - 4.0 * le + 2.0 * _log2(n) + 2.0 * _log2(m) + 1.0
    rows.append(
        ComparisonRow(
            scheme="pairwise",
            complexity="poly(n)",
            h_bits=h_pair,
            t_classical_bits=m - 2.0 * le,
            t_quantum_bits=m - 4.0 * le,
            h_formula="(1+o(1)) (4m - 4 log2(eps) + 2 log2(n) + 2 log2(m) + 1)",
            t_formula="m - 2 log2(eps) + O(1) / m - 4 log2(eps) + O(1)",
            h_exact=False,
            t_exact=False,
        )
    )

    h_trev = (_log2(n) - le) ** 2 * _log2(m)
    rows.append(
        ComparisonRow(
            scheme="trevisan",
            complexity="poly(n)",
            h_bits=h_trev,
            t_classical_bits=None,
            t_quantum_bits=m - 4.0 * le,
            h_formula="O(log2(n/eps)^2 log2(m))",
            t_formula="m - 4 log2(eps) + O(1)",
            h_exact=False,
            t_exact=False,
        )
    )
    return rows
