"""Tests for the A_{N-1} weight bookkeeping and the Bethe index sets.

Covers exact-rational weight construction, lattice membership, the
admissibility gate, the lambda -> xi shift, Jack-type energies, the two
eigenvalue-limit candidates, and the combinatorial invariants of the
index data (block structure, |W| multinomial, fiber sizes, |F_w|).
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from cmbethe.errors import DomainError, ResourceError
from cmbethe.weights import (
    BetheIndexing,
    Weight,
    admissible,
    build_indexing,
    e0,
    jack_energy,
    lambda_coords,
    lambda_to_xi,
    pairing,
    root_system,
    target_eigenvalue,
    w_count,
    weight_from_lambda_coords,
)


class TestWeight:
    """Construction, tracelessness, exactness, lattice membership."""

    def test_canonicalized_traceless(self):
        w = Weight([1, 2, 3])
        assert abs(w.coords.sum()) < 1e-15
        assert np.allclose(w.coords, [-1.0, 0.0, 1.0])

    def test_exact_fractions_kept(self):
        w = Weight([1, 0])
        assert w.exact == (Fraction(1, 2), Fraction(-1, 2))

    def test_float_input_stays_float(self):
        w = Weight([0.3, -0.3])
        assert w.exact is None
        assert np.allclose(w.coords, [0.3, -0.3])

    def test_in_P_requires_integer_root_pairings(self):
        assert Weight([1, 0]).in_P            # differences are integers
        assert Weight([Fraction(3, 2), Fraction(-3, 2)]).in_P
        assert not Weight([0.25, -0.25]).in_P

    def test_in_P_plus_requires_dominance(self):
        assert Weight([2, 1, 0]).in_P_plus    # decreasing coordinates
        assert not Weight([0, 1, 2]).in_P_plus
        assert Weight([0, 0, 0]).in_P_plus

    def test_equality_and_hash(self):
        assert Weight([1, 0]) == Weight([Fraction(1, 2), Fraction(-1, 2)])
        assert len({Weight([1, 0]), Weight([1, 0])}) == 1


class TestRootSystem:
    """Simple roots, fundamental weights, rho_bar and their dualities."""

    def test_m_formula(self):
        for N, l in ((2, 1), (2, 3), (3, 1), (3, 2), (4, 1)):
            rs = root_system(N, l)
            assert rs.m == l * N * (N - 1) // 2, f"m({N},{l}) = {rs.m}"

    def test_fundamental_weights_dual_to_simple_roots(self):
        for N in (2, 3, 4, 5):
            rs = root_system(N, 1)
            for i in range(N - 1):
                for j in range(N - 1):
                    val = float(rs.fundamental_weights[i] @ rs.simple_roots[j])
                    expected = 1.0 if i == j else 0.0
                    assert abs(val - expected) < 1e-14, \
                        f"(Lambda_{i+1}, alpha_{j+1}) = {val} for N={N}"

    def test_rho_bar_is_sum_of_fundamental_weights(self):
        for N in (2, 3, 4):
            rs = root_system(N, 1)
            total = rs.fundamental_weights.sum(axis=0)
            assert np.allclose(rs.rho_bar.coords, total), f"rho_bar for N={N}"

    def test_rho_bar_norm(self):
        """(rho_bar, rho_bar) = N(N^2-1)/12."""
        for N in (2, 3, 4, 5, 6):
            rs = root_system(N, 1)
            val = pairing(rs.rho_bar, rs.rho_bar)
            expected = N * (N * N - 1) / 12.0
            assert abs(val - expected) < 1e-12, f"|rho_bar|^2 for N={N}: {val}"

    def test_positive_root_count(self):
        rs = root_system(4, 1)
        assert len(rs.positive_roots) == 6

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            root_system(1, 1)
        with pytest.raises(DomainError):
            root_system(3, 0)


class TestWeightMaps:
    """lambda-coordinates, the (l+1) rho_bar shift, and the admissibility gate."""

    def test_weight_from_lambda_coords_roundtrip(self):
        w = weight_from_lambda_coords([2, 5], 3)
        assert np.allclose(lambda_coords(w), [2.0, 5.0])
        assert w.exact is not None

    def test_three_lambda_one_for_n_two(self):
        w = weight_from_lambda_coords([3], 2)
        assert w.exact == (Fraction(3, 2), Fraction(-3, 2))

    def test_lambda_to_xi_is_shift_by_l_plus_one_rho(self):
        rs = root_system(2, 1)
        lam = weight_from_lambda_coords([1], 2)
        xi = lambda_to_xi(lam, rs)
        assert xi.exact == (Fraction(3, 2), Fraction(-3, 2))

    def test_lambda_to_xi_rejects_non_dominant(self):
        rs = root_system(3, 1)
        bad = Weight([0, 1, 2])
        with pytest.raises(DomainError):
            lambda_to_xi(bad, rs)

    def test_xi_from_dominant_lambda_is_always_admissible(self):
        """The shift by (l+1) rho_bar pushes every root pairing past l."""
        for N, l in ((2, 1), (2, 4), (3, 1), (3, 2), (4, 2)):
            rs = root_system(N, l)
            lam = weight_from_lambda_coords([1] * (N - 1), N)
            xi = lambda_to_xi(lam, rs)
            assert admissible(xi, rs), f"xi for N={N}, l={l} not admissible"

    def test_admissibility_examples(self):
        rs = root_system(2, 1)
        assert admissible(weight_from_lambda_coords([3], 2), rs)
        assert not admissible(weight_from_lambda_coords([1], 2), rs)   # pairing 1 <= l
        assert not admissible(weight_from_lambda_coords([0], 2), rs)   # on a wall
        assert not admissible(Weight([0.3, -0.3]), rs)                 # not in P
        rs31 = root_system(3, 1)
        assert admissible(weight_from_lambda_coords([3, 3], 3), rs31)
        # pairing with the highest root alpha_1 + alpha_2 equals 1 + 1 <= l
        assert not admissible(weight_from_lambda_coords([1, 1], 3), rs31)

    def test_admissible_checks_all_roots_not_just_simple(self):
        rs = root_system(3, 2)
        # simple pairings 3 and 3 exceed l = 2, but the highest-root pairing
        # is 6 > 2 as well, so this one passes ...
        assert admissible(weight_from_lambda_coords([3, 3], 3), rs)
        # ... while simple pairings 3, -1 fail already in P^+ terms; use
        # (2, 3): highest-root pairing 5 > 2, simple 2 <= 2 fails.
        assert not admissible(weight_from_lambda_coords([2, 3], 3), rs)


class TestEnergies:
    """Jack-type energies and the eigenvalue-limit candidates."""

    def test_jack_energy_exact_fraction(self):
        val = jack_energy([2, 0], Fraction(1, 2))
        assert val == 8 and isinstance(val, Fraction)

    def test_jack_energy_float(self):
        val = jack_energy([2, 0], 0.5)
        assert abs(val - 8.0) < 1e-14

    def test_jack_energy_shift_identity(self):
        """E_lam^[alpha] = |lam + rho/alpha|^2 - |rho|^2/alpha^2 for traceless lam."""
        rng = np.random.default_rng(3)
        for N in (2, 3, 4):
            rs = root_system(N, 1)
            lam = Weight(np.sort(rng.integers(0, 6, size=N))[::-1].astype(float))
            alpha = 0.5 + rng.random()
            direct = jack_energy(lam, alpha)
            shifted = lam.coords + rs.rho_bar.coords / alpha
            via_norm = float(shifted @ shifted) - pairing(rs.rho_bar, rs.rho_bar) / alpha ** 2
            assert abs(direct - via_norm) < 1e-10, f"N={N}: {direct} vs {via_norm}"

    def test_e0_value(self):
        assert abs(e0(2, 1) - 4 * math.pi ** 2) < 1e-12
        assert abs(e0(3, 1) - 16 * math.pi ** 2) < 1e-11

    def test_target_eigenvalue_matches_xi_norm(self):
        """The variant without the extra constant equals 2 pi^2 (xi, xi)."""
        for N, l, ms in ((2, 1, [1]), (2, 2, [3]), (3, 1, [1, 2]), (4, 1, [1, 1, 1])):
            rs = root_system(N, l)
            lam = weight_from_lambda_coords(ms, N)
            xi = lambda_to_xi(lam, rs)
            te = target_eigenvalue(lam, N, l)
            expected = 2 * math.pi ** 2 * pairing(xi, xi)
            assert abs(te.without_term - expected) < 1e-9, \
                f"N={N}, l={l}: {te.without_term} vs {expected}"

    def test_target_eigenvalue_variant_gap(self):
        lam = weight_from_lambda_coords([1], 2)
        te = target_eigenvalue(lam, 2, 1)
        gap = math.pi ** 2 / 6.0 * 2 * 1 * 1 * 2
        assert abs(te.with_term - te.without_term - gap) < 1e-12

    def test_target_eigenvalue_requires_dominant(self):
        with pytest.raises(DomainError):
            target_eigenvalue(Weight([0, 1, 2]), 3, 1)


class TestIndexing:
    """The color map c, blocks V_i, and the W / F_w enumerations."""

    def test_blocks_partition_and_color(self):
        bi = build_indexing(3, 2)
        assert bi.m == 6
        assert bi.p_bounds == (0, 4, 6)
        assert [list(v) for v in bi.V] == [[1, 2, 3, 4], [5, 6]]
        assert bi.c == (1, 1, 1, 1, 2, 2)

    def test_block_sizes(self):
        for N, l in ((2, 1), (3, 1), (3, 2), (4, 1), (4, 2)):
            bi = build_indexing(N, l)
            for i, blk in enumerate(bi.V, start=1):
                assert len(blk) == (N - i) * l, f"|V_{i}| for N={N}, l={l}"

    def test_w_count_formula_matches_enumeration(self):
        for N, l in ((2, 1), (2, 3), (3, 1), (3, 2), (4, 1), (4, 2)):
            bi = build_indexing(N, l)
            assert len(bi.W_maps) == w_count(N, l), f"|W| for N={N}, l={l}"

    def test_w_maps_have_exact_fibers(self):
        bi = build_indexing(3, 2)
        for w in bi.W_maps:
            for i, blk in enumerate(bi.V, start=1):
                labels = [w[k - 1] for k in blk]
                for j in range(i, 3):
                    assert labels.count(j) == 2, f"fiber of {j} in V_{i} for {w}"

    def test_n3_l1_explicit(self):
        bi = build_indexing(3, 1)
        assert bi.W_maps == ((1, 2, 2), (2, 1, 2))
        assert bi.Fw_maps == (((0, 0, 2),), ((0, 0, 1),))

    def test_f_maps_color_compatible_and_injective(self):
        bi = build_indexing(4, 2)
        for w, f_list in zip(bi.W_maps, bi.Fw_maps):
            expected_count = math.prod(
                math.factorial(bi.l) ** (bi.N - 1 - i) for i in range(1, bi.N - 1))
            assert len(f_list) == expected_count
            for f in f_list[:3]:
                for i in range(2, bi.N):
                    block = bi.V[i - 1]
                    images = [f[k - 1] for k in block]
                    assert len(set(images)) == len(images), "f not injective"
                    for k in block:
                        tgt = f[k - 1]
                        assert tgt in bi.V[i - 2], "f image leaves previous block"
                        assert w[k - 1] == w[tgt - 1], "w(x) != w(f(x))"
                for k in bi.V[0]:
                    assert f[k - 1] == 0, "first block must map to t_0"

    def test_first_block_convention_for_n2(self):
        bi = build_indexing(2, 3)
        assert bi.W_maps == ((1, 1, 1),)
        assert bi.Fw_maps == (((0, 0, 0),),)

    def test_pair_coupling_matrix(self):
        bi = build_indexing(3, 1)
        expected = np.array([[2.0, 2.0, -1.0],
                             [2.0, 2.0, -1.0],
                             [-1.0, -1.0, 2.0]])
        assert np.array_equal(bi.pair_coupling, expected)

    def test_resource_guard(self):
        assert w_count(5, 3) > 10 ** 6
        with pytest.raises(ResourceError):
            build_indexing(5, 3)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
