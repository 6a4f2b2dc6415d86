import math

import numpy as np
import pytest

from entqkd import (ConfigurationError, Custom, FixedN, KernelArgs, Poisson,
                    ZetaSpec, g_custom, g_custom_km, g_mu, g_mu_km, g_n, g_nkm)
from entqkd.gfunctions import g_km_table, poisson_weights

ZINF = ZetaSpec(math.inf)
Z0 = ZetaSpec(0.0)
Z1 = ZetaSpec(1.0)

ARGS_GRID = [
    KernelArgs(0.3, 0.2, 0.25, 0.15),
    KernelArgs(0.66825, 0.225, 0.66825, 0.225),
    KernelArgs(0.75, 0.25, 0.75, 0.25),
    KernelArgs(0.1, 0.0, 0.5, 0.3),
]


def hyp2f1_poly(a, b, c, x):
    """Independent oracle: terminating Gauss series, summed term by term.

    b is a non-positive integer here, so the series is a polynomial that
    terminates before the denominator Pochhammer can vanish.
    """
    total = 1.0
    term = 1.0
    j = 0
    while b + j != 0:
        term *= (a + j) * (b + j) / ((c + j) * (j + 1.0)) * x
        total += term
        j += 1
    return total


def case_i_via_2f1(n, k, m, args):
    t = n - k - m
    pref = (math.factorial(n - k)
            / ((n + 1) * math.factorial(m) * math.factorial(t))
            * args.x ** k * args.y ** t * args.z ** m)
    return pref * hyp2f1_poly(k + 1, k + m - n, k - n, args.w / args.y)


class TestGnkm:
    def test_vacuum_is_one(self, xi_table):
        for spec in (Z0, Z1, ZINF):
            assert g_nkm(spec, 0, 0, 0, ARGS_GRID[0], xi_table) == 1.0

    def test_km_exceeding_n_is_zero(self, xi_table):
        for spec in (Z0, Z1, ZINF):
            assert g_nkm(spec, 2, 2, 1, ARGS_GRID[0], xi_table) == 0.0

    def test_case_ii_hand_value(self, xi_table):
        # 2^-2 * 2!/(0! 0! 2!) * (0.5 + 0.5)^2 = 0.25
        args = KernelArgs(0.5, 0.5, 0.5, 0.5)
        assert g_nkm(ZINF, 2, 0, 0, args, xi_table) == pytest.approx(0.25, abs=1e-15)

    def test_n_above_cap_rejected(self, xi_table):
        with pytest.raises(ConfigurationError):
            g_nkm(Z1, 33, 0, 0, ARGS_GRID[0], xi_table)

    @pytest.mark.parametrize("args", ARGS_GRID[:2])
    def test_case_i_matches_2f1_oracle(self, xi_table, args):
        for n in range(1, 11):
            for k in range(min(3, n) + 1):
                for m in range(min(3, n - k) + 1):
                    got = g_nkm(Z0, n, k, m, args, xi_table)
                    want = case_i_via_2f1(n, k, m, args)
                    assert got == pytest.approx(want, rel=1e-9)

    @pytest.mark.parametrize("zeta", [0.0, 0.5, 1.0, 10.0, math.inf])
    @pytest.mark.parametrize("args", ARGS_GRID)
    def test_sum_over_km_equals_g_n(self, xi_table, zeta, args):
        spec = ZetaSpec(zeta)
        for n in range(9):
            total = math.fsum(g_nkm(spec, n, k, m, args, xi_table)
                              for k in range(n + 1) for m in range(n - k + 1))
            want = g_n(spec, n, args, xi_table)
            assert total == pytest.approx(want, rel=1e-10)


class TestGn:
    @pytest.mark.parametrize("zeta", [0.0, 0.1, 1.0, 10.0, 1000.0, math.inf])
    @pytest.mark.parametrize("vsq", [0.0, 0.25, 0.5])
    def test_normalization(self, xi_table, zeta, vsq):
        # alpha = beta = 1 gives w + x = y + z = 1 and unit norm for every n
        args = KernelArgs(1.0 - vsq, vsq, 1.0 - vsq, vsq)
        spec = ZetaSpec(zeta)
        for n in range(17):
            assert g_n(spec, n, args, xi_table) == pytest.approx(1.0, abs=1e-10)

    def test_case_i_hand_value(self, xi_table):
        # ((y+z)^4 - 0) / (4 (y+z)) with y+z = 1: 0.25
        args = KernelArgs(0.0, 0.0, 0.5, 0.5)
        assert g_n(Z0, 3, args, xi_table) == pytest.approx(0.25, rel=1e-15)

    def test_case_ii_hand_value(self, xi_table):
        args = KernelArgs(0.25, 0.25, 0.25, 0.25)
        assert g_n(ZINF, 1, args, xi_table) == pytest.approx(0.5, rel=1e-15)

    def test_degenerate_direction_continuous(self, xi_table):
        # y+z - w-x crossing 0 must not disturb the value
        base = KernelArgs(0.4, 0.4, 0.4, 0.4)
        bumped = KernelArgs(0.4, 0.4 + 2e-12, 0.4, 0.4)
        for n in (1, 3, 8):
            a = g_n(Z0, n, bumped, xi_table)
            b = g_n(Z0, n, base, xi_table)
            assert abs(a - b) <= 1e-8

    def test_general_matches_case_i_at_tiny_zeta(self, xi_table):
        spec = ZetaSpec(1e-8)
        for args in ARGS_GRID:
            for n in range(13):
                got = g_n(spec, n, args, xi_table)
                want = g_n(Z0, n, args, xi_table)
                assert got == pytest.approx(want, rel=1e-6)

    def test_general_approaches_case_ii_pointwise(self, xi_table):
        """At zeta = 1e8 the general path tracks the extreme-entanglement
        closed form to 1e-4 only for small n; the gap then grows with the
        (n-1)! kappa_n partition term, so the limit is pointwise in n and
        not uniform.  Normalized argument directions (w+x = y+z = 1) stay
        exact for every n."""
        spec = ZetaSpec(1e8)
        for args in ARGS_GRID:
            for n in range(8):
                got = g_n(spec, n, args, xi_table)
                want = g_n(ZINF, n, args, xi_table)
                assert got == pytest.approx(want, rel=1e-4)
        gaps = [abs(g_n(spec, n, ARGS_GRID[3], xi_table)
                    / g_n(ZINF, n, ARGS_GRID[3], xi_table) - 1.0)
                for n in (8, 10, 12)]
        assert gaps[2] > gaps[1] > gaps[0] > 5e-5
        for n in range(4, 17):
            args = KernelArgs(0.75, 0.25, 0.75, 0.25)
            assert g_n(spec, n, args, xi_table) == pytest.approx(
                g_n(ZINF, n, args, xi_table), rel=1e-12)


class TestGmu:
    @pytest.mark.parametrize("zeta", [0.0, 1.0, math.inf])
    def test_mu_zero_is_one(self, xi_table, zeta):
        for args in ARGS_GRID:
            assert g_mu(ZetaSpec(zeta), 0.0, args, xi_table) == 1.0

    def test_case_i_degenerate_closed_form(self, xi_table):
        # w+x = y+z = s gives exp(-mu (1 - s))
        args = KernelArgs(0.3, 0.2, 0.1, 0.4)
        for mu in (0.01, 0.4, 2.0):
            assert g_mu(Z0, mu, args, xi_table) == pytest.approx(
                math.exp(-mu * 0.5), rel=1e-13)

    def test_case_ii_unit_when_args_saturate(self, xi_table):
        args = KernelArgs(0.5, 0.5, 0.5, 0.5)
        assert g_mu(ZINF, 1.0, args, xi_table) == pytest.approx(1.0, rel=1e-15)

    def test_case_i_seam_continuous(self, xi_table):
        base = KernelArgs(0.4, 0.4, 0.4, 0.4)
        bumped = KernelArgs(0.4, 0.4 + 2e-12, 0.4, 0.4)
        for mu in (0.01, 1.0):
            a = g_mu(Z0, mu, bumped, xi_table)
            b = g_mu(Z0, mu, base, xi_table)
            assert abs(a - b) <= 1e-8

    def test_general_matches_poisson_sum_of_case_i(self, xi_table):
        # zeta = 1e-8 sits on the general path; compare with the closed form
        spec = ZetaSpec(1e-8)
        for args in ARGS_GRID:
            got = g_mu(spec, 0.5, args, xi_table)
            want = g_mu(Z0, 0.5, args, xi_table)
            assert got == pytest.approx(want, rel=1e-6)


class TestGmuKm:
    def test_no_tap_kills_counts(self, xi_table):
        args = KernelArgs(0.7, 0.0, 0.6, 0.0)
        for spec in (Z0, Z1, ZINF):
            assert g_mu_km(spec, 0.5, 1, 0, args, xi_table) == 0.0
            assert g_mu_km(spec, 0.5, 0, 2, args, xi_table) == 0.0

    def test_case_ii_k0_m0(self, xi_table):
        args = ARGS_GRID[0]
        for mu in (0.2, 1.0):
            want = math.exp(-0.5 * mu * (2.0 - args.w - args.y))
            assert g_mu_km(ZINF, mu, 0, 0, args, xi_table) == pytest.approx(
                want, rel=1e-15)

    @pytest.mark.parametrize("zeta", [0.0, 1.0, math.inf])
    def test_marginalization(self, xi_table, zeta):
        spec = ZetaSpec(zeta)
        args = ARGS_GRID[0]
        mu = 2.0
        kmax = int(16 + 3 * mu)
        total = math.fsum(g_mu_km(spec, mu, k, m, args, xi_table)
                          for k in range(kmax + 1) for m in range(kmax - k + 1))
        want = g_mu(spec, mu, args, xi_table)
        assert total == pytest.approx(want, rel=1e-8)


class TestCustom:
    def test_weight_validation(self):
        with pytest.raises(ValueError):
            Custom(())
        with pytest.raises(ValueError):
            Custom((0.5, -0.1, 0.6))
        with pytest.raises(ValueError):
            Custom((0.5, 0.4))

    def test_length_exceeding_cap(self, xi_table):
        weights = tuple([0.0] * 33 + [1.0])
        with pytest.raises(ConfigurationError):
            g_custom(Custom(weights), Z1, ARGS_GRID[0], xi_table)

    def test_delta_reproduces_fixed_n(self, xi_table):
        dist = Custom((0.0, 0.0, 0.0, 1.0))
        args = ARGS_GRID[0]
        for spec in (Z0, Z1, ZINF):
            assert g_custom(dist, spec, args, xi_table) == \
                g_n(spec, 3, args, xi_table)
            assert g_custom_km(dist, spec, 1, 1, args, xi_table) == \
                g_nkm(spec, 3, 1, 1, args, xi_table)

    def test_truncated_poisson_matches_g_mu(self, xi_table):
        mu = 0.8
        w = poisson_weights(mu, 18)
        w[-1] += 1.0 - w.sum()  # renormalize the tail into the last bin
        dist = Custom(tuple(w))
        got = g_custom(dist, Z1, ARGS_GRID[0], xi_table)
        want = g_mu(Z1, mu, ARGS_GRID[0], xi_table)
        assert got == pytest.approx(want, rel=1e-8)

    def test_uniform_two_level_normalized(self, xi_table):
        dist = Custom((0.5, 0.5))
        args = KernelArgs(0.75, 0.25, 0.75, 0.25)
        for spec in (Z0, Z1, ZINF):
            assert g_custom(dist, spec, args, xi_table) == pytest.approx(
                1.0, abs=1e-12)


class TestKmTable:
    @pytest.mark.parametrize("zeta", [0.0, 1.0, 10.0, math.inf])
    def test_matches_per_point_poisson(self, xi_table, zeta):
        spec = ZetaSpec(zeta)
        args = ARGS_GRID[0]
        mu = 0.6
        n_top = int(3 * mu + 16)
        table = g_km_table(spec, poisson_weights(mu, n_top), args, xi_table, 6)
        for k in range(7):
            for m in range(7 - k):
                want = g_mu_km(spec, mu, k, m, args, xi_table)
                assert table[k, m] == pytest.approx(want, rel=1e-11, abs=1e-300)

    def test_matches_per_point_fixed_n(self, xi_table):
        args = ARGS_GRID[0]
        weights = np.zeros(6)
        weights[5] = 1.0
        table = g_km_table(Z1, weights, args, xi_table, 5)
        for k in range(6):
            for m in range(6 - k):
                want = g_nkm(Z1, 5, k, m, args, xi_table)
                assert table[k, m] == pytest.approx(want, rel=1e-11, abs=1e-300)


class TestKernelArgs:
    def test_bounds_enforced(self):
        with pytest.raises(ValueError):
            KernelArgs(-0.1, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            KernelArgs(0.0, 1.1, 0.0, 0.0)


class TestPoisson:
    def test_weights_sum_to_one(self):
        w = poisson_weights(2.0, 40)
        assert math.fsum(w) == pytest.approx(1.0, abs=1e-12)

    def test_negative_mu_rejected(self):
        with pytest.raises(ValueError):
            Poisson(-0.1)
        with pytest.raises(ValueError):
            FixedN(-1)

    def test_truncation_past_cap_warns(self, parts):
        from entqkd import compute_xi, enumerate_partitions
        xi_small = compute_xi([Z1], 4, enumerate_partitions(4))
        with pytest.warns(RuntimeWarning, match="tail"):
            g_mu(Z1, 10.0, ARGS_GRID[0], xi_small)
