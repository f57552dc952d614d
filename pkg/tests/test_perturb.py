"""Tests for the Rayleigh-Schrodinger expansion in powers of the nome.

The interaction coefficients have an exact divisor-sum oracle (the Fourier
expansion of the shifted pair potential), so extraction is checked exactly;
matrix elements are checked against band vanishing, hermiticity, and the
hand-computed N=2 first- and second-order shifts; the assembled series is
cross-validated order by order against the Bethe-Ansatz continuation
eigenvalue, which is computed by entirely different machinery.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from cmbethe.errors import AccuracyError, DegeneracyError, DomainError
from cmbethe.perturb import (
    EnergySeries,
    PotentialSeries,
    band_distance,
    bethe_crosscheck,
    exact_interaction,
    matrix_element,
    potential_coeffs,
    reachable_partitions,
    rs_series,
    unperturbed_energy,
)

H = Fraction(1, 2)
LAM_N2 = (H, -H)                      # the N=2, l=1 fundamental state
SERIES_N2 = potential_coeffs(2, 1, 2)
V1 = SERIES_N2.vk(1)
V2 = SERIES_N2.vk(2)


def partitions_of(total, N):
    """Integer partitions of ``total`` into at most N parts, padded to N."""
    import itertools
    return sorted({tuple(sorted(p, reverse=True))
                   for p in itertools.product(range(total + 1), repeat=N)
                   if sum(p) == total}, reverse=True)


class TestPotentialCoeffs:
    """Cauchy/DFT extraction of the interaction coefficients."""

    def test_divisor_oracle_exact(self):
        # The shifted pair potential has the Lambert expansion
        # -8 pi^2 Sum_m p^m Sum_{d | m} d cos(2 pi d s), so the extracted
        # order-k, harmonic-d coefficient is -8 pi^2 l(l+1) d when d | k,
        # else 0.
        for N, l, K in [(2, 1, 4), (3, 2, 3)]:
            series = potential_coeffs(N, l, K)
            scale = 8 * math.pi ** 2 * l * (l + 1) * K
            for k in range(1, K + 1):
                row = series.coeffs[k - 1]
                assert len(row) == k + 1
                for d in range(k + 1):
                    exact = (-8 * math.pi ** 2 * l * (l + 1) * d
                             if d > 0 and k % d == 0 else 0.0)
                    assert abs(row[d] - exact) < 1e-9 * scale, (
                        f"N={N} l={l} c[{k}][{d}] = {row[d]} vs {exact}")

    def test_coefficients_real_and_even(self):
        # V_k is a pure cosine sum: real on real x, even in each difference
        xs = np.linspace(0.07, 0.93, 9)
        for k in (1, 2):
            vk = SERIES_N2.vk(k)
            vals = np.array([vk(np.array([x, 0.0])) for x in xs])
            flipped = np.array([vk(np.array([-x, 0.0])) for x in xs])
            assert np.max(np.abs(vals.imag)) == 0.0
            assert np.max(np.abs(vals - flipped)) < 1e-12 * np.max(
                np.abs(vals))

    def test_reconstruction_order(self):
        # |Sum_{k<=K} p^k V_k - exact| = O(p^{K+1}): halving p divides the
        # residual by about 2^{K+1}
        x = np.array([0.31, 0.74])
        for K, lo, hi in [(2, 6.0, 10.0), (3, 12.0, 20.0)]:
            series = potential_coeffs(2, 1, K)

            def resid(p):
                return abs(series.reconstruct(p, x)
                           - exact_interaction(x, p, 1))

            ratio = resid(0.05) / resid(0.025)
            assert lo < ratio < hi, f"K={K}: residual ratio {ratio}"

    def test_extraction_residual_recorded(self):
        assert SERIES_N2.extraction_residual < 1e-9

    def test_band_limited_shape(self):
        # order k carries harmonics d <= k only
        series = potential_coeffs(2, 1, 4)
        for k in range(1, 5):
            assert len(series.coeffs[k - 1]) == k + 1

    def test_order_guard(self):
        with pytest.raises(DomainError):
            potential_coeffs(2, 1, 9)

    def test_tight_tolerance_flagged(self):
        with pytest.raises(AccuracyError):
            potential_coeffs(2, 1, 4, residual_tol=1e-16)

    def test_high_order_needs_larger_circle(self):
        # at K=8 the r^{-k} round-off amplification on the default circle
        # exceeds the residual budget; a larger radius restores it
        with pytest.raises(AccuracyError):
            potential_coeffs(2, 1, 8)
        series = potential_coeffs(2, 1, 8, radius=0.28)
        assert series.extraction_residual < 1e-9


class TestBandDistance:
    """Half the l1 distance between sorted offset vectors."""

    def test_examples(self):
        assert band_distance(LAM_N2, LAM_N2) == 0
        assert band_distance((Fraction(3, 2), -Fraction(3, 2)), LAM_N2) == 1
        assert band_distance((Fraction(9, 2), -Fraction(9, 2)), LAM_N2) == 4
        assert band_distance((1, 1), (2, 0)) == 1

    def test_periodicity_class_guard(self):
        with pytest.raises(DomainError):
            band_distance((1, 0), LAM_N2)

    def test_unequal_totals_guard(self):
        with pytest.raises(DomainError):
            band_distance((2, 0), (1, 0))


class TestMatrixElement:
    """Normalized <psi_mu, V_k psi_lam> by torus quadrature."""

    def test_band_vanishing(self):
        mu = (Fraction(9, 2), -Fraction(9, 2))
        v = matrix_element(mu, LAM_N2, V1, H, 2)
        assert abs(v) < 1e-10, f"beyond-band element {v}"

    def test_hermiticity(self):
        mu = (Fraction(3, 2), -Fraction(3, 2))
        a = matrix_element(mu, LAM_N2, V1, H, 2)
        b = matrix_element(LAM_N2, mu, V1, H, 2)
        assert abs(a - b) < 1e-10 * max(1.0, abs(a)), f"{a} vs {b}"

    def test_diagonal_is_first_order_shift(self):
        diag = matrix_element(LAM_N2, LAM_N2, V1, H, 2)
        series = rs_series(LAM_N2, 2, 1, 1, series=SERIES_N2)
        assert abs(diag - series.coefficients[1]) < 1e-10 * abs(diag)

    def test_first_order_shift_value(self):
        # hand integral: <cos 2 pi (x1 - x2)> against |Delta^2 J|^2 gives
        # E1 = 4 pi^2 for the fundamental N=2 state
        diag = matrix_element(LAM_N2, LAM_N2, V1, H, 2)
        assert abs(diag - 4 * math.pi ** 2) < 1e-10, (
            f"{diag} vs {4 * math.pi ** 2}")

    def test_under_resolved_quadrature_flagged(self):
        with pytest.raises(AccuracyError):
            matrix_element(LAM_N2, LAM_N2, V1, H, 2, quad_n=4)

    def test_symmetry_sector_closure(self):
        # elements connect equal-total states within the band only;
        # exhaustive over N=2 integer partitions of degree <= 6
        pool = [lam for tot in range(7) for lam in partitions_of(tot, 2)]
        for k in (1, 2):
            vk = SERIES_N2.vk(k)
            for mu in pool:
                for lam in pool:
                    if sum(mu) != sum(lam):
                        continue  # guarded separately; integral is 0
                    v = matrix_element(mu, lam, vk, H, 2)
                    if band_distance(mu, lam) > k:
                        assert abs(v) < 1e-10, (
                            f"k={k}: {mu},{lam} beyond band: {v}")


class TestReachable:
    """The coupled basis from the band structure."""

    def test_budget_one(self):
        assert set(reachable_partitions(LAM_N2, 1)) == {
            LAM_N2, (Fraction(3, 2), -Fraction(3, 2))}

    def test_budget_two(self):
        assert set(reachable_partitions(LAM_N2, 2)) == {
            LAM_N2, (Fraction(3, 2), -Fraction(3, 2)),
            (Fraction(5, 2), -Fraction(5, 2))}

    def test_members_share_class_and_total(self):
        for mu in reachable_partitions((2, 1, 0), 2):
            assert sum(mu) == 3
            assert band_distance(mu, (2, 1, 0)) <= 2


class TestRsSeries:
    """The Rayleigh-Schrodinger recursion."""

    def test_k0_is_unperturbed(self):
        series = rs_series(LAM_N2, 2, 1, 0)
        assert series.coefficients == (unperturbed_energy(LAM_N2, 2, 1),)
        assert abs(series.coefficients[0] - 9 * math.pi ** 2) < 1e-9

    def test_unperturbed_includes_center_of_mass(self):
        # E0 = 2 pi^2 (xi, xi) with xi = lam + (l+1) rho, also off the
        # traceless hyperplane
        assert abs(unperturbed_energy((2, 0), 2, 1)
                   - 20 * math.pi ** 2) < 1e-9

    def test_first_order_value(self):
        series = rs_series(LAM_N2, 2, 1, 1, series=SERIES_N2)
        assert abs(series.coefficients[1] - 4 * math.pi ** 2) < 1e-9

    def test_second_order_matches_hand_formula(self):
        # E2 = <lam|V2|lam> - |<mu|V1|lam>|^2 / (16 pi^2), mu the one
        # band-1 neighbor with E0 gap -16 pi^2
        series = rs_series(LAM_N2, 2, 1, 2, series=SERIES_N2)
        mu = (Fraction(3, 2), -Fraction(3, 2))
        off = matrix_element(mu, LAM_N2, V1, H, 2)
        diag2 = matrix_element(LAM_N2, LAM_N2, V2, H, 2)
        hand = diag2 - off ** 2 / (16 * math.pi ** 2)
        assert abs(series.coefficients[2] - hand) < 1e-8 * abs(hand), (
            f"{series.coefficients[2]} vs {hand}")

    def test_coefficients_real_floats(self):
        series = rs_series(LAM_N2, 2, 1, 2, series=SERIES_N2)
        assert all(isinstance(c, float) for c in series.coefficients)

    def test_degenerate_level_refused(self):
        # (4,1,1) and (3,3,0) share the unperturbed level at N=3, l=1 and
        # sit two bands apart: K=3 reaches the collision, K=2 does not
        with pytest.raises(DegeneracyError):
            rs_series((4, 1, 1), 3, 1, 3)
        series = rs_series((4, 1, 1), 3, 1, 2)
        assert len(series.coefficients) == 3

    def test_series_compatibility_guard(self):
        with pytest.raises(DomainError):
            rs_series((1, 0, -1), 3, 1, 2, series=SERIES_N2)

    def test_report_shape(self):
        series = rs_series(LAM_N2, 2, 1, 2, series=SERIES_N2)
        rep = series.report()
        assert rep["lambda"] == [0.5, -0.5]
        assert rep["K"] == 2
        assert len(rep["E"]) == 3
        rep2 = series.report(crosscheck={"p": 0.01})
        assert rep2["crosscheck"] == {"p": 0.01}

    def test_partial_sum_horner(self):
        series = rs_series(LAM_N2, 2, 1, 2, series=SERIES_N2)
        e0_, e1, e2 = series.coefficients
        p = 0.01
        assert abs(series.partial_sum(p)
                   - (e0_ + p * e1 + p * p * e2)) < 1e-12 * abs(e0_)


class TestCrossValidation:
    """The series against the Bethe-Ansatz continuation eigenvalue."""

    def test_gap_scales_as_p_cubed(self):
        series = rs_series(LAM_N2, 2, 1, 2, series=SERIES_N2)
        gaps = [bethe_crosscheck(series, p)["gap"] for p in (1e-2, 1e-3)]
        slope = math.log10(gaps[0] / gaps[1])
        assert slope >= 2.7, f"gaps {gaps}, slope {slope}"

    def test_finite_difference_reproduces_orders(self):
        # Richardson-extrapolated finite differences of E_BA(p) recover
        # E1 to 1% and E2 to 5%
        series = rs_series(LAM_N2, 2, 1, 2, series=SERIES_N2)
        e0_, e1, e2 = series.coefficients
        p = 1e-3
        ba = {q: bethe_crosscheck(series, q)["E_BA"]
              for q in (p, p / 2)}

        def f(q):
            return (ba[q] - e0_) / q

        e1_fd = 2 * f(p / 2) - f(p)
        assert abs(e1_fd - e1) < 0.01 * abs(e1), f"{e1_fd} vs {e1}"

        def g(q):
            return (ba[q] - e0_ - q * e1) / q ** 2

        e2_fd = 2 * g(p / 2) - g(p)
        assert abs(e2_fd - e2) < 0.05 * abs(e2), f"{e2_fd} vs {e2}"

    def test_crosscheck_record_fields(self):
        series = rs_series(LAM_N2, 2, 1, 1, series=SERIES_N2)
        rec = bethe_crosscheck(series, 1e-3)
        assert set(rec) == {"p", "E_BA", "partial_sum", "gap"}
        assert rec["gap"] == abs(rec["E_BA"] - rec["partial_sum"])

    def test_center_of_mass_consistency(self):
        # a non-traceless label: the continuation sees only the traceless
        # part, the series sees the full state; the crosscheck reconciles
        # them exactly, so the gap stays at the p^{K+1} scale
        series = rs_series((2, 0), 2, 1, 1)
        rec = bethe_crosscheck(series, 1e-2)
        assert rec["gap"] < 0.1, f"center-of-mass mismatch: {rec}"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
