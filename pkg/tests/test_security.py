import math

import numpy as np
import pytest

from pahash.security import (
    ExtractorBound,
    RegimeParams,
    bound_concat_classical,
    bound_concat_quantum,
    bound_dual_classical,
    bound_dual_dual_concat,
    bound_universal_classical,
    bound_universal_quantum,
    comparison_table,
    dual_delta_conversion,
    extractor_seed_lower_bound,
    f4_bound,
    g_bounds,
    penalty_nonuniform,
    seed_lower_bound_dual,
    t3_fixed_point,
    t4_fixed_point,
)


def rel_close(a, b, digits=12):
    if a == b:
        return True
    return abs(a - b) <= 10.0 ** (-digits) * max(abs(a), abs(b))


class TestUniversalClassical:
    def test_delta_one_m_eq_t(self):
        assert bound_universal_classical(1.0, 10, 10) == 1.0

    def test_delta_one_gap(self):
        assert rel_close(bound_universal_classical(1.0, 10, 30), 2.0**-10)

    def test_delta_two(self):
        expect = math.sqrt(1.0 + 2.0**-20)
        assert rel_close(bound_universal_classical(2.0, 10, 30), expect)

    def test_rejects_delta_below_one(self):
        with pytest.raises(ValueError):
            bound_universal_classical(0.5, 4, 8)

    def test_log_vs_linear_12_digits(self):
        for delta in (1.0, 1.5, 3.0):
            for gap in (0, -5, -40):
                linear = math.sqrt(delta - 1.0 + 2.0**gap)
                assert rel_close(bound_universal_classical(delta, 10, 10 - gap), linear)


class TestDualClassical:
    def test_examples(self):
        assert bound_dual_classical(1.0, 10, 10) == 1.0
        assert rel_close(bound_dual_classical(4.0, 0, 24), 2.0**-11)
        assert rel_close(bound_dual_classical(2.0, 10, 30), math.sqrt(2) * 2.0**-10)

    def test_meaningful_for_large_delta(self):
        # the dual route still gives small error at delta = 8
        assert bound_dual_classical(8.0, 10, 60) < 2.0**-23

    def test_log_vs_linear_12_digits(self):
        for delta in (1.0, 2.0, 6.0):
            for gap in (-1, -17, -50):
                linear = math.sqrt(delta) * 2.0 ** (gap / 2.0)
                assert rel_close(bound_dual_classical(delta, 20, 20 - gap), linear)

    def test_astronomical_exponents_stay_finite_in_log(self):
        from pahash.security import bound_dual_classical_log2

        val = bound_dual_classical_log2(2.0, 10**6, 3 * 10**6)
        assert val == pytest.approx(0.5 - 10**6)


class TestUniversalQuantum:
    def test_fixed_eta_floor(self):
        # residual 2*eta survives even with unlimited entropy
        assert bound_universal_quantum(1.0, 0, 2000, eta=1.0) == pytest.approx(2.0)

    def test_fixed_eta_formula(self):
        got = bound_universal_quantum(1.0, 10, 30, eta=0.5)
        expect = 1.0 + math.sqrt((1.0 + 8.0) * 2.0**-20)
        assert rel_close(got, expect)

    def test_minimized_matches_dense_grid(self):
        m, t = 0, 40
        auto = bound_universal_quantum(1.0, m, t)
        grid = min(
            bound_universal_quantum(1.0, m, t, eta=2.0**e)
            for e in np.linspace(-30, 2, 20001)
        )
        # the solver may only beat the grid, never lose to it materially
        assert auto <= grid * (1 + 1e-9)
        assert abs(auto - grid) <= 1e-6 * grid

    def test_quarter_exponent_scaling(self):
        # at eta = 2^((m-t)/4) the value scales as (2 + sqrt(2)) 2^((m-t)/4)
        m, t = 0, 80
        eta = 2.0 ** ((m - t) / 4)
        got = bound_universal_quantum(1.0, m, t, eta=eta)
        assert abs(got / eta - (2.0 + math.sqrt(2.0))) < 1e-5


class TestConcatBounds:
    def test_delta_one_reduces_to_dual_route(self):
        for dp in (1.0, 2.0, 7.0):
            for m, l, t in [(4, 8, 24), (2, 6, 10)]:
                assert bound_concat_classical(1.0, dp, m, l, t) == (
                    bound_dual_classical(dp, m, t)
                )

    def test_large_l_limit(self):
        got = bound_concat_classical(3.0, 1.0, 4, 4000, 24)
        assert rel_close(got, math.sqrt(2.0**-20), digits=9)

    def test_worked_example_12_digits(self):
        got = bound_concat_classical(3.0, 2.0, 4, 8, 24)
        expect = math.sqrt(2.0 * (2.0**-20 + 2.0**-4 * 2.0))
        assert rel_close(got, expect)

    def test_m_greater_l_rejected(self):
        with pytest.raises(ValueError):
            bound_concat_classical(1.0, 1.0, 8, 4, 20)

    def test_quantum_example(self):
        got = bound_concat_quantum(1.0, 1.0, 10, 20, 30, eta=1.0)
        expect = math.sqrt(3.0) * 2.0**-10 + 2.0
        assert rel_close(got, expect)

    def test_quantum_eta_grid_finite(self):
        vals = [
            bound_concat_quantum(2.0, 3.0, 4, 8, 30, eta=2.0**e)
            for e in np.linspace(-12, 2, 57)
        ]
        assert all(np.isfinite(vals)) and all(v > 0 for v in vals)

    def test_dual_dual(self):
        assert bound_dual_dual_concat(1.0, 1.0, 12, 12) == 1.0
        assert rel_close(
            bound_dual_dual_concat(2.0, 2.0, 4, 24), 2.0 * 2.0**-10
        )
        # algebraic identity with the single-stage dual route
        for d, dp in [(2.0, 3.0), (1.0, 5.0)]:
            assert bound_dual_dual_concat(d, dp, 6, 20) == pytest.approx(
                bound_dual_classical(d * dp, 6, 20), rel=1e-14
            )


class TestGBounds:
    def test_worked_example(self):
        eps_c, _ = g_bounds(8, 6, 4, 6, eta=1.0)
        assert rel_close(eps_c, math.sqrt(3.0) / 2.0)

    def test_l_equals_t_closed_form(self):
        for n, m, t in [(8, 4, 6), (16, 6, 12), (24, 8, 18)]:
            eps_c, _ = g_bounds(n, t, m, t, eta=1.0)
            expect = (
                math.sqrt(math.ceil(m / (n - m)) * math.ceil(t / (n - t)))
                * 2.0 ** ((m - t) / 2)
            )
            assert rel_close(eps_c, expect)

    def test_small_l_recovers_plain_dual(self):
        # with l <= n/2 the second term vanishes
        eps_c, _ = g_bounds(8, 4, 2, 7, eta=1.0)
        assert rel_close(eps_c, bound_dual_classical(1.0, 2, 7))

    def test_param_order_enforced(self):
        with pytest.raises(ValueError):
            g_bounds(8, 4, 6, 5)

    def test_quantum_minimized_below_any_eta(self):
        _, auto = g_bounds(64, 48, 16, 40)
        for e in (-10, -6, -3, -1, 0):
            _, at = g_bounds(64, 48, 16, 40, eta=2.0**e)
            assert auto <= at * (1 + 1e-9)


class TestF4Bound:
    def test_vacuous_at_m_equal_t(self):
        assert f4_bound(16, 4, 4) >= 2.0

    def test_moderate_value_12_digits(self):
        n, m, t = 160, 8, 48
        got = f4_bound(n, m, t)
        q = 2.0 ** ((m - t) / 4)
        cl = math.ceil((m + t) / (2 * n - m - t))
        dp = math.ceil(m / (n - m))
        expect = q * math.sqrt(
            dp * (2.0 ** ((m - t) / 2) - q + (1 + q) * cl)
        ) + 2 * q
        assert rel_close(got, expect)

    def test_degenerate_m_rejected(self):
        with pytest.raises(ValueError):
            f4_bound(160, 0, 40)

    def test_equals_two_stage_quantum_at_substitution(self):
        for n, m, t in [(40, 8, 24), (64, 16, 40), (100, 10, 50)]:
            l = (m + t) / 2
            eta = 2.0 ** ((m - t) / 4)
            _, eps_q = g_bounds(n, l, m, t, eta=eta)
            assert rel_close(f4_bound(n, m, t), eps_q)


class TestPenalty:
    def test_no_penalty_at_full_entropy(self):
        assert penalty_nonuniform(0.25, 16, 16, "direct") == 0.25
        assert penalty_nonuniform(0.25, 16, 16, "collision") == 0.25

    def test_two_bit_deficit(self):
        assert penalty_nonuniform(0.1, 10, 8, "collision") == pytest.approx(0.2)
        assert penalty_nonuniform(0.1, 10, 8, "direct") == pytest.approx(0.4)

    def test_h_above_d_rejected(self):
        with pytest.raises(ValueError):
            penalty_nonuniform(0.1, 10, 11, "direct")


class TestLowerBounds:
    def test_dual_seed_bound(self):
        assert seed_lower_bound_dual(2 * 7, 7, 1.0) == 7.0
        assert seed_lower_bound_dual(20, 5, 2.0) == 14.0
        assert seed_lower_bound_dual(4, 2, 1.0) == 2.0

    def test_extractor_seed_bound(self):
        assert extractor_seed_lower_bound(10, 4, 5, 1.0) == 0.0
        assert extractor_seed_lower_bound(10, 4, 6, 2.0**-30) == 30.0
        # t above n-m eats into the bound
        assert extractor_seed_lower_bound(10, 4, 8, 2.0**-30) == 28.0

    def test_attainment_regime(self):
        # gamma = 1, alpha + 2 beta <= 1: requirement beta*n stays below
        # the seed length (1-alpha)*n actually used
        from pahash.security import extractor_seed_lower_bound_from_log2

        for alpha, beta in [(0.5, 0.25), (0.6, 0.2), (0.25, 0.375)]:
            for n in (10**3, 10**6):
                m = alpha * n
                t = m + 2 * beta * n
                assert t <= n
                need = extractor_seed_lower_bound_from_log2(n, m, t, -beta * n)
                assert need <= (1 - alpha) * n + 1e-9

    def test_epsilon_range(self):
        with pytest.raises(ValueError):
            extractor_seed_lower_bound(10, 4, 5, 0.0)
        with pytest.raises(ValueError):
            extractor_seed_lower_bound(10, 4, 5, 1.5)


class TestDualDeltaConversion:
    def test_delta_one(self):
        for m in (1, 4, 9):
            assert dual_delta_conversion(1.0, 12, m) == pytest.approx(
                2.0 * (1.0 - 2.0**-m)
            )

    def test_m_equals_n_minus_one(self):
        m = 7
        assert dual_delta_conversion(1.0, m + 1, m) == pytest.approx(2.0 - 2.0 ** (1 - m))

    def test_negative_flagged(self):
        with pytest.raises(ValueError):
            dual_delta_conversion(0.0, 10, 4)


class TestMonotonicity:
    def test_nonincreasing_in_t(self):
        grids = np.linspace(10, 60, 26)
        for f in (
            lambda t: bound_universal_classical(2.0, 8, t),
            lambda t: bound_dual_classical(3.0, 8, t),
            lambda t: bound_concat_classical(2.0, 2.0, 8, 16, t),
            lambda t: bound_universal_quantum(1.5, 8, t, eta=0.1),
        ):
            vals = [f(t) for t in grids]
            assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_nondecreasing_in_m_and_deltas(self):
        for m in range(1, 12):
            assert bound_dual_classical(2.0, m, 30) <= bound_dual_classical(
                2.0, m + 1, 30
            )
        for d in np.linspace(1, 8, 15):
            assert bound_universal_classical(d, 4, 20) <= bound_universal_classical(
                d + 0.5, 4, 20
            )
            assert bound_concat_classical(d, 2.0, 4, 8, 20) <= (
                bound_concat_classical(d + 0.5, 2.0, 4, 8, 20)
            )


class TestExtractorBoundRecord:
    def test_validation(self):
        b = ExtractorBound(formula_id="dual", m=4, t=10, epsilon=0.5, delta=1.0)
        assert b.epsilon == 0.5
        with pytest.raises(ValueError):
            ExtractorBound(formula_id="x", epsilon=-1.0)
        with pytest.raises(ValueError):
            ExtractorBound(formula_id="x", delta=0.5)
        with pytest.raises(ValueError):
            ExtractorBound(formula_id="x", d=4, h=5.0)


class TestFixedPoints:
    def test_t3_converges_fast_at_scale(self):
        t3, iters = t3_fixed_point(10**6, 5 * 10**5, -64.0)
        assert iters <= 20
        # residual below one bit
        n, m = 10**6, 5 * 10**5
        rhs = (
            m
            + 128.0
            + math.log2(math.ceil(m / (n - m)))
            + math.log2(math.ceil(t3 / (n - t3)))
        )
        assert abs(rhs - t3) < 1.0

    def test_t4_converges_fast_at_scale(self):
        t4, iters = t4_fixed_point(10**6, 5 * 10**5, -64.0)
        assert iters <= 20
        assert t4 > 5 * 10**5

    def test_t3_contraction_numeric(self):
        # successive iterates shrink geometrically
        n, m, le = 10**6, 5 * 10**5, -64.0
        from pahash.security import FIXED_POINT_TOL_BITS

        def rhs(t):
            return (
                m
                - 2 * le
                + math.log2(math.ceil(m / (n - m)))
                + math.log2(math.ceil(t / (n - t)))
            )

        t = float(m)
        deltas = []
        for _ in range(6):
            new = rhs(t)
            deltas.append(abs(new - t))
            t = new
        assert deltas[2] <= deltas[1] or deltas[2] < FIXED_POINT_TOL_BITS

    def test_t3_infeasible_regime_raises(self):
        with pytest.raises(ValueError):
            t3_fixed_point(100, 50, -10**4)


class TestComparisonTable:
    def regime(self, alpha=0.5, beta=0.1, gamma=1.0, n=10**6):
        # keep alpha + 4 beta < 1 so the fixed-point schemes stay feasible
        return RegimeParams(alpha=alpha, beta=beta, gamma=gamma, n=n)

    def test_seven_rows(self):
        rows = comparison_table(self.regime())
        assert len(rows) == 7
        assert [r.scheme for r in rows] == [
            "f_F",
            "f_F3",
            "f_F4",
            "modified-toeplitz",
            "TSSR",
            "pairwise",
            "trevisan",
        ]

    def test_h0_exact(self):
        for alpha in (0.25, 0.5, 0.75):
            for n in (10**4, 10**6):
                rows = comparison_table(self.regime(alpha=alpha, n=n))
                assert rows[0].h_bits == (1 - alpha) * n

    def test_t0_leading_terms(self):
        for alpha, beta, gamma, n in [
            (0.5, 0.1, 1.0, 10**6),
            (0.75, 0.05, 0.75, 10**4),
            (0.25, 0.5, 0.6, 10**8),
        ]:
            reg = self.regime(alpha, beta, gamma, n)
            rows = comparison_table(reg)
            m = reg.m
            ceil_term = 2 * math.log2(math.ceil(m / (n - m)))
            expect = m + 2 * beta * n**gamma + ceil_term
            assert rel_close(rows[0].t_classical_bits, expect)

    def test_h3_h4_leading_terms(self):
        reg = self.regime(0.5, 0.1, 1.0, 10**6)
        rows = comparison_table(reg)
        n, m = reg.n, reg.m
        lead = reg.alpha * n + 4 * reg.beta * n**reg.gamma
        t3 = rows[1].t_classical_bits
        resid3 = 2 * (
            math.log2(math.ceil(m / (n - m))) + math.log2(math.ceil(t3 / (n - t3)))
        )
        assert rel_close(rows[1].h_bits, lead + resid3)
        # f_F4: h = t4 and t4 = lead + 4 log2(sqrt(...) + 2)
        assert rows[2].h_bits == rows[2].t_quantum_bits
        assert abs(rows[2].h_bits - lead) < 40  # O(1) residual only

    def test_tssr_pairwise_leading_terms(self):
        reg = self.regime(0.5, 0.1, 1.0, 10**6)
        rows = comparison_table(reg)
        n, m = reg.n, reg.m
        lead_tssr = 2 * reg.alpha * n + 4 * reg.beta * n
        inside = m + math.log2(n / m) + 2 * reg.beta * n + 3
        assert rows[4].h_bits == 2 * math.ceil(inside)
        assert 0 <= rows[4].h_bits - lead_tssr <= 2 * math.log2(n / m) + 8
        lead_pair = 4 * reg.alpha * n + 4 * reg.beta * n
        resid = 2 * math.log2(n) + 2 * math.log2(m) + 1
        assert rel_close(rows[5].h_bits, lead_pair + resid)
        assert not rows[5].h_exact

    def test_constant_epsilon_column_structure(self):
        # with log2(eps) held fixed, every scheme's t is alpha*n + O(1)
        alpha, c = 0.5, 64.0
        for n in (10**4, 10**5, 10**6):
            reg = RegimeParams(alpha=alpha, beta=c / n, gamma=1.0, n=n)
            assert reg.log2_epsilon == -c
            for row in comparison_table(reg):
                for t in (row.t_classical_bits, row.t_quantum_bits):
                    if t is not None:
                        assert abs(t - alpha * n) < 300  # bounded, not growing

    def test_trevisan_marked_inexact(self):
        rows = comparison_table(self.regime())
        assert not rows[6].h_exact
        assert rows[6].t_classical_bits is None

    def test_regime_validation(self):
        with pytest.raises(ValueError):
            RegimeParams(alpha=1.5, beta=0.1, gamma=1.0, n=100)
        with pytest.raises(ValueError):
            RegimeParams(alpha=0.5, beta=0.1, gamma=1.5, n=100)
