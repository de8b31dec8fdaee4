import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kickspec.equidistribution import (
    SequenceSpec,
    classical_exponent,
    conjectured_exponent,
    discrepancy_exact,
    discrepancy_oracle,
    discrepancy_scaling_fit,
    erdos_turan_bound,
    sequence_points,
    weyl_sum,
)
from kickspec.errors import OracleSizeError
from kickspec.rationals import RationalApprox, golden_ratio

GOLDEN = golden_ratio(200)
unit_points = st.lists(
    st.floats(min_value=0.0, max_value=1.0, exclude_max=True,
              allow_nan=False),
    min_size=1, max_size=120)


def spec(j, beta):
    return SequenceSpec(j=j, beta=beta)


class TestSequencePoints:
    def test_rational_rotation(self):
        pts = sequence_points(spec(1, RationalApprox(1, 3)), 4)
        assert pts == pytest.approx([1 / 3, 2 / 3, 0.0, 1 / 3], abs=1e-15)

    def test_squares_mod_four(self):
        pts = sequence_points(spec(2, RationalApprox(1, 4)), 4)
        assert pts == pytest.approx([0.25, 0.0, 0.25, 0.0], abs=1e-15)

    def test_golden_rotation_values(self):
        pts = sequence_points(spec(1, GOLDEN), 3)
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        assert pts == pytest.approx([phi, (2 * phi) % 1.0, (3 * phi) % 1.0],
                                    abs=1e-12)

    def test_deterministic(self):
        s = spec(2, GOLDEN)
        assert (sequence_points(s, 2000) == sequence_points(s, 2000)).all()

    def test_prefix_stability(self):
        s = spec(3, GOLDEN)
        assert (sequence_points(s, 50) == sequence_points(s, 200)[:50]).all()


class TestWeylSum:
    def test_zero_beta_sums_to_n(self):
        s = weyl_sum(spec(1, RationalApprox(0, 1)), 1, 100)
        assert s.value == pytest.approx(100.0 + 0.0j)
        assert s.modulus == pytest.approx(100.0)

    def test_alternating_squares_cancel(self):
        s = weyl_sum(spec(2, RationalApprox(1, 2)), 1, 4)
        assert abs(s.value) < 1e-12

    def test_golden_rotation_stays_logarithmic(self):
        s = weyl_sum(spec(1, GOLDEN), 1, 10**4)
        assert s.modulus <= 3.0 * math.log(10**4)

    @given(st.integers(1, 3), st.integers(1, 4), st.integers(1, 300),
           st.fractions(min_value=0, max_value=1, max_denominator=997))
    @settings(max_examples=60, deadline=None)
    def test_modulus_never_exceeds_term_count(self, j, h, n, beta):
        s = weyl_sum(spec(j, RationalApprox.from_fraction(beta)), h, n)
        assert s.modulus <= n * (1 + 1e-12)

    def test_matches_brute_force_phases(self):
        sp = spec(2, RationalApprox(3, 7))
        s = weyl_sum(sp, 2, 50)
        brute = sum(np.exp(2j * np.pi * ((2 * 3 * n**2) % 7) / 7)
                    for n in range(1, 51))
        assert s.value == pytest.approx(brute, abs=1e-10)


class TestExponents:
    def test_classical_values(self):
        assert classical_exponent(2) == pytest.approx(1 / (3 * math.log(24)))
        assert classical_exponent(3) == pytest.approx(1 / (12 * math.log(72)))
        assert classical_exponent(10) == pytest.approx(
            1 / (243 * math.log(1080)))

    def test_classical_rejects_linear(self):
        with pytest.raises(ValueError):
            classical_exponent(1)

    def test_conjectured(self):
        assert conjectured_exponent(1, 0.0) == 0.0
        assert conjectured_exponent(2, 0.01) == pytest.approx(0.51)
        assert conjectured_exponent(4, 0.05) == pytest.approx(0.80)


class TestDiscrepancy:
    def test_single_point(self):
        assert discrepancy_exact([0.5]).d_n == 1.0
        assert discrepancy_oracle([0.5]) == 1.0

    def test_two_points(self):
        assert discrepancy_exact([0.25, 0.75]).d_n == 0.5
        assert discrepancy_oracle([0.25, 0.75]) == 0.5
        assert discrepancy_exact([0.0, 0.5]).d_n == 0.5
        assert discrepancy_oracle([0.0, 0.5]) == 0.5

    def test_equally_spaced_grid(self):
        # i/N floats are not exactly the lattice rationals; both routes must
        # still agree bit-for-bit on the exact value for the actual floats
        pts = np.arange(10) / 10
        d = discrepancy_exact(pts).d_n
        assert d == discrepancy_oracle(pts)
        assert d == pytest.approx(0.1, abs=1e-15)

    def test_all_equal_points(self):
        pts = [0.3] * 7
        assert discrepancy_exact(pts).d_n == 1.0
        assert discrepancy_oracle(pts) == 1.0

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            discrepancy_exact([0.2, 1.0])
        with pytest.raises(ValueError):
            discrepancy_exact([])
        with pytest.raises(ValueError):
            discrepancy_exact([-0.1])

    def test_oracle_size_cap(self):
        with pytest.raises(OracleSizeError):
            discrepancy_oracle(np.linspace(0, 0.999, 2001))

    @given(unit_points)
    @settings(max_examples=120, deadline=None)
    def test_oracle_equality(self, pts):
        assert discrepancy_exact(pts).d_n == discrepancy_oracle(pts)

    @given(unit_points)
    @settings(max_examples=60, deadline=None)
    def test_range_bounds(self, pts):
        d = discrepancy_exact(pts).d_n
        assert 1.0 / len(pts) <= d + 1e-15
        assert d <= 1.0

    def test_lattice_and_offgrid_mixture(self):
        rng = np.random.default_rng(42)
        for _ in range(25):
            n = int(rng.integers(1, 300))
            pts = rng.random(n)  # k / 2**53 lattice values
            assert discrepancy_exact(pts).d_n == discrepancy_oracle(pts)
            offgrid = np.nextafter(pts, 1.0)
            offgrid = offgrid[offgrid < 1.0]
            if offgrid.size:
                assert discrepancy_exact(offgrid).d_n == \
                    discrepancy_oracle(offgrid)

    def test_offgrid_dense_ties(self):
        # i/n grids sit off the 2**-53 lattice and tie almost everywhere;
        # this exercises the rational fallback end to end
        pts = (np.arange(300) / 300 + 1e-5) % 1.0
        assert discrepancy_exact(pts).d_n == discrepancy_oracle(pts)


class TestErdosTuran:
    def test_all_zeros(self):
        bound = erdos_turan_bound([0.0] * 10, 1)
        assert bound == pytest.approx(3.0 + 4.0 / math.pi)
        assert bound >= discrepancy_exact([0.0] * 10).d_n

    def test_grid_bound_above_exact(self):
        pts = np.arange(100) / 100
        bound = erdos_turan_bound(pts, 10)
        assert bound >= discrepancy_exact(pts).d_n >= 0.01 - 1e-12

    @given(unit_points, st.integers(1, 40))
    @settings(max_examples=80, deadline=None)
    def test_dominates_discrepancy(self, pts, m):
        assert erdos_turan_bound(pts, m) >= discrepancy_exact(pts).d_n

    def test_m_validation(self):
        with pytest.raises(ValueError):
            erdos_turan_bound([0.5], 0)


class TestScalingFit:
    def test_golden_linear_decay(self):
        fit = discrepancy_scaling_fit(spec(1, GOLDEN),
                                      [100, 1000, 10_000, 100_000])
        assert -1.1 <= fit.slope <= -0.8
        assert fit.reference_slope == -1.0
        assert [n for n, _ in fit.table] == [100, 1000, 10_000, 100_000]

    def test_rational_beta_plateaus(self):
        fit = discrepancy_scaling_fit(spec(1, RationalApprox(1, 3)),
                                      [100, 1000, 10_000, 100_000])
        assert abs(fit.slope) < 0.05
        assert all(d >= 0.3 for _, d in fit.table)

    def test_square_sequence_lower_bound(self):
        sizes = [1000, 3163, 10_000, 31_623, 100_000]
        fit = discrepancy_scaling_fit(spec(2, GOLDEN), sizes)
        assert fit.slope <= -0.25
        for n, d in fit.table:
            assert d >= 0.5 * n ** (-0.5 - 0.1)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            discrepancy_scaling_fit(spec(1, GOLDEN), [100, 200, 400])
        with pytest.raises(ValueError):
            discrepancy_scaling_fit(spec(1, GOLDEN), [100, 200, 400, 800])
