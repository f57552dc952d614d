"""Tests for the master functions: log-gradients, Hessians, the eigenvalue
functional, and the trigonometric degeneration.

The hand-derivable N=2 and N=3 (l=1) closed-form values anchor the sign and
exponent conventions; finite differences validate every derivative; the
chain rule between the elliptic and trigonometric gradients is verified to
vanish linearly in p.
"""

import cmath
import math

import numpy as np
import pytest

from cmbethe.elliptic import Nome
from cmbethe.errors import ConvergenceError, DomainError, MembershipError
from cmbethe.master import (
    CriticalReport,
    EllipticPoint,
    S_dtau,
    TrigPoint,
    eigenvalue_elliptic,
    hessian_tau,
    hessian_tri,
    log_phi_tau_grad,
    log_phi_tri_grad,
    make_report,
    membership_F,
    newton_polish_tau,
)
from cmbethe.weights import build_indexing, root_system, weight_from_lambda_coords

RS21 = root_system(2, 1)
IDX21 = build_indexing(2, 1)
XI_3L1 = weight_from_lambda_coords([3], 2)

RS31 = root_system(3, 1)
IDX31 = build_indexing(3, 1)
XI_33 = weight_from_lambda_coords([3, 3], 3)


def n3_closed_point(m1, m2):
    """The N=3, l=1 closed-form critical point (T_1, T_2, T_3)."""
    t3 = (m1 + m2 - 1) * (m2 - 1) / ((m1 + m2 + 1) * (m2 + 1))
    a = (m1 + m2 + 1) * (m1 + 1)
    b = 2 * (-m1 * m1 - m1 * m2 + 2)
    c = (m1 + m2 - 1) * (m1 - 1)
    disc = cmath.sqrt(b * b - 4 * a * c)
    return np.array([(-b + disc) / (2 * a), (-b - disc) / (2 * a), t3])


class TestTrigGradient:
    """The Bethe equations in the T variables."""

    def test_n2_critical_point_has_zero_gradient(self):
        g = log_phi_tri_grad(TrigPoint([0.5]), XI_3L1, RS21, IDX21)
        assert abs(g[0]) == 0.0, f"grad at T=1/2: {g}"

    def test_n2_off_critical_value(self):
        g = log_phi_tri_grad(TrigPoint([1.0 / 3.0]), XI_3L1, RS21, IDX21)
        assert abs(g[0] - (-3.0)) < 1e-12, f"grad at T=1/3: {g} vs -3"

    def test_n3_closed_form_point_is_critical(self):
        T = n3_closed_point(3, 3)
        assert abs(T[2] - 5.0 / 14.0) < 1e-14
        g = log_phi_tri_grad(TrigPoint(T), XI_33, RS31, IDX31)
        assert np.linalg.norm(g) < 1e-12, f"grad at N=3 closed form: {g}"

    def test_finite_difference_consistency(self):
        rng = np.random.default_rng(11)
        h = 1e-6
        for _ in range(10):
            T = 0.3 + rng.random(3) + 0.5j * (rng.random(3) - 0.5)
            grad = log_phi_tri_grad(TrigPoint(T), XI_33, RS31, IDX31)
            for i in range(3):
                for direction in (1.0, 1.0j):
                    Tp, Tm = T.copy(), T.copy()
                    Tp[i] += h * direction
                    Tm[i] -= h * direction
                    fd = (_log_phi_tri_value(Tp) - _log_phi_tri_value(Tm)) / (2 * h * direction)
                    rel = abs(grad[i] - fd) / max(1.0, abs(grad[i]))
                    assert rel < 1e-6, f"FD mismatch at i={i}: {grad[i]} vs {fd}"

    def test_singular_configurations_raise_membership_error(self):
        with pytest.raises(MembershipError):
            log_phi_tri_grad(TrigPoint([1.0]), XI_3L1, RS21, IDX21)
        with pytest.raises(MembershipError):
            log_phi_tri_grad(TrigPoint([0.0]), XI_3L1, RS21, IDX21)
        with pytest.raises(MembershipError):
            # coupled collision T_1 = T_3 (colors 1 and 2 are adjacent)
            log_phi_tri_grad(TrigPoint([0.4, 0.7, 0.4]), XI_33, RS31, IDX31)

    def test_size_validation(self):
        with pytest.raises(DomainError):
            log_phi_tri_grad(TrigPoint([0.5, 0.5]), XI_3L1, RS21, IDX21)


def _log_phi_tri_value(T):
    """Direct log Phi_tri for the N=3, l=1 test weight (FD reference)."""
    m1, m2 = 3.0, 3.0
    a = np.array([m1 - 1, m1 - 1, m2 - 1])
    val = -(a * np.log(T)).sum()
    val -= 1 * 3 * (np.log(1 - T[0]) + np.log(1 - T[1]))
    val += 2 * np.log(T[0] - T[1])
    val -= np.log(T[0] - T[2]) + np.log(T[1] - T[2])
    return val


class TestTrigHessian:
    """Hessian of -log Phi_tri and its closed-form determinants."""

    def test_n2_l1_determinant_is_minus_sixteen(self):
        H, det = hessian_tri(TrigPoint([0.5]), XI_3L1, RS21, IDX21)
        assert abs(det - (-16.0)) < 1e-12, f"det = {det}"

    def test_n2_l2_determinant_closed_form(self):
        """l=2, m1=4: critical T are the roots of z^2 - (4/5)z + 1/5; the
        determinant closed form l! prod (-m1-j-1)^3/((-m1+1+j)(-2l+j)) = 750."""
        xi = weight_from_lambda_coords([4], 2)
        rs, idx = root_system(2, 2), build_indexing(2, 2)
        roots = np.roots([1.0, -4.0 / 5.0, 1.0 / 5.0])
        g = log_phi_tri_grad(TrigPoint(roots), xi, rs, idx)
        assert np.linalg.norm(g) < 1e-12, f"closed-form roots not critical: {g}"
        _, det = hessian_tri(TrigPoint(roots), xi, rs, idx)
        assert abs(det - 750.0) < 1e-9 * 750.0, f"det = {det} vs 750"

    def test_symmetry_exact(self):
        rng = np.random.default_rng(5)
        T = 0.3 + rng.random(3) + 0.4j * rng.random(3)
        H, _ = hessian_tri(TrigPoint(T), XI_33, RS31, IDX31)
        assert np.array_equal(H, H.T), "hessian_tri not exactly symmetric"

    def test_matches_gradient_finite_differences(self):
        rng = np.random.default_rng(13)
        T = 0.3 + rng.random(3) + 0.3j * rng.random(3)
        H, _ = hessian_tri(TrigPoint(T), XI_33, RS31, IDX31)
        h = 1e-6
        for j in range(3):
            Tp, Tm = T.copy(), T.copy()
            Tp[j] += h
            Tm[j] -= h
            fd_col = (log_phi_tri_grad(TrigPoint(Tp), XI_33, RS31, IDX31)
                      - log_phi_tri_grad(TrigPoint(Tm), XI_33, RS31, IDX31)) / (2 * h)
            # H is the Hessian of -log Phi; the gradient is of +log Phi
            err = np.abs(H[:, j] + fd_col).max()
            assert err < 1e-5, f"Hessian column {j} vs FD: err={err}"


class TestEllipticGradient:
    """The elliptic Bethe equations and the trigonometric degeneration."""

    def test_continuation_seed_is_critical_at_p_zero(self):
        t_half = cmath.log(2) / (2j * math.pi)
        pt = EllipticPoint([t_half], Nome(p=0.0))
        g = log_phi_tau_grad(pt, XI_3L1, RS21, IDX21)
        assert abs(g[0]) < 1e-14, f"grad at p=0 seed: {g}"

    def test_finite_difference_consistency(self):
        nm = Nome(p=0.08)
        rng = np.random.default_rng(17)
        h = 1e-6
        for _ in range(5):
            t = 0.1 + 0.3 * rng.random(3) - 0.25j * rng.random(3)
            grad = log_phi_tau_grad(EllipticPoint(t, nm), XI_33, RS31, IDX31)
            for i in range(3):
                tp, tm = t.copy(), t.copy()
                tp[i] += h
                tm[i] -= h
                fd = (_log_phi_tau_value(tp, nm) - _log_phi_tau_value(tm, nm)) / (2 * h)
                rel = abs(grad[i] - fd) / max(1.0, abs(grad[i]))
                assert rel < 1e-6, f"FD mismatch at i={i}: {grad[i]} vs {fd}"

    def test_degeneration_to_trig_gradient_is_linear_in_p(self):
        """At fixed t, the elliptic gradient approaches
        (-2 pi i T_i) * d log Phi_tri/dT_i with T = exp(-2 pi i t), linearly in p."""
        t = np.array([0.1 - 0.22j])
        T = np.exp(-2j * math.pi * t)
        image = (-2j * math.pi * T) * log_phi_tri_grad(TrigPoint(T), XI_3L1, RS21, IDX21)
        gaps = []
        for p in (1e-4, 1e-6, 1e-8):
            g = log_phi_tau_grad(EllipticPoint(t, Nome(p=p)), XI_3L1, RS21, IDX21)
            gaps.append(abs((g - image)[0]))
        assert gaps[0] < 1e-2
        assert abs(gaps[0] / gaps[1] - 100.0) < 5.0, f"not linear in p: {gaps}"
        assert abs(gaps[1] / gaps[2] - 100.0) < 5.0, f"not linear in p: {gaps}"

    def test_degeneration_n3(self):
        t = np.array([0.21 - 0.1j, 0.52 - 0.05j, 0.33 - 0.3j])
        T = np.exp(-2j * math.pi * t)
        image = (-2j * math.pi * T) * log_phi_tri_grad(TrigPoint(T), XI_33, RS31, IDX31)
        g8 = log_phi_tau_grad(EllipticPoint(t, Nome(p=1e-8)), XI_33, RS31, IDX31)
        assert np.abs(g8 - image).max() < 1e-6, f"degeneration gap: {np.abs(g8 - image).max()}"

    def test_theta_zero_coincidence_raises_membership_error(self):
        nm = Nome(p=0.1)
        with pytest.raises(MembershipError):
            log_phi_tau_grad(EllipticPoint([0.0], nm), XI_3L1, RS21, IDX21)
        with pytest.raises(MembershipError):
            log_phi_tau_grad(EllipticPoint([0.3, 0.3, 0.8], nm), XI_33, RS31, IDX31)


def _log_phi_tau_value(t, nm):
    """Direct log Phi_tau for the N=3, l=1 test weight (FD reference).

    xi = 3 Lambda_1 + 3 Lambda_2 has traceless coordinates (3, 0, -3)."""
    from cmbethe.elliptic import theta
    xi = np.array([3.0, 0.0, -3.0])
    alpha = {1: np.array([1.0, -1.0, 0.0]), 2: np.array([0.0, 1.0, -1.0])}
    colors = (1, 1, 2)
    val = 2j * math.pi * sum(float(xi @ alpha[c]) * ti for c, ti in zip(colors, t))
    K = {(0, 1): 2.0, (0, 2): -1.0, (1, 2): -1.0}
    for (i, j), k in K.items():
        val += k * cmath.log(theta(t[i] - t[j], nm).value)
    val -= 1 * 3 * (cmath.log(theta(t[0], nm).value) + cmath.log(theta(t[1], nm).value))
    return val


class TestEllipticHessian:
    def test_symmetry_exact(self):
        nm = Nome(p=0.09)
        rng = np.random.default_rng(23)
        t = 0.1 + 0.3 * rng.random(3) - 0.2j * rng.random(3)
        H, _ = hessian_tau(EllipticPoint(t, nm), XI_33, RS31, IDX31)
        assert np.array_equal(H, H.T), "hessian_tau not exactly symmetric"

    def test_matches_gradient_finite_differences(self):
        nm = Nome(p=0.09)
        rng = np.random.default_rng(29)
        t = 0.1 + 0.3 * rng.random(3) - 0.2j * rng.random(3)
        H, _ = hessian_tau(EllipticPoint(t, nm), XI_33, RS31, IDX31)
        h = 1e-6
        for j in range(3):
            tp, tm = t.copy(), t.copy()
            tp[j] += h
            tm[j] -= h
            fd_col = (log_phi_tau_grad(EllipticPoint(tp, nm), XI_33, RS31, IDX31)
                      - log_phi_tau_grad(EllipticPoint(tm, nm), XI_33, RS31, IDX31)) / (2 * h)
            err = np.abs(H[:, j] + fd_col).max()
            assert err < 1e-5, f"Hessian column {j} vs FD: err={err}"

    def test_trig_limit_matches_transformed_trig_hessian(self):
        """At p=0 and a critical point, the t-Hessian is the T-Hessian
        transformed by dT/dt = -2 pi i T (no gradient cross term)."""
        t_half = cmath.log(2) / (2j * math.pi)
        H_t, _ = hessian_tau(EllipticPoint([t_half], Nome(p=0.0)), XI_3L1, RS21, IDX21)
        H_T, _ = hessian_tri(TrigPoint([0.5]), XI_3L1, RS21, IDX21)
        jac = -2j * math.pi * 0.5
        assert abs(H_t[0, 0] - jac * jac * H_T[0, 0]) < 1e-10, \
            f"{H_t[0, 0]} vs {jac * jac * H_T[0, 0]}"


class TestNewtonPolish:
    def test_polishes_seed_at_small_nome(self):
        t_half = cmath.log(2) / (2j * math.pi)
        nm = Nome(p=1e-3)
        t = newton_polish_tau(np.array([t_half], dtype=complex), XI_3L1, RS21, IDX21, nm)
        g = log_phi_tau_grad(EllipticPoint(t, nm), XI_3L1, RS21, IDX21)
        assert np.linalg.norm(g) < 1e-12
        assert abs(t[0] - t_half) < 1e-2, "polished point wandered far from seed"

    def test_unreachable_tolerance_raises(self):
        nm = Nome(p=0.1)
        bad_seed = np.array([0.45 + 0.0j])   # real t: no critical point nearby
        with pytest.raises(ConvergenceError):
            newton_polish_tau(bad_seed, XI_3L1, RS21, IDX21, nm, max_iter=3)


class TestSdtauAndEigenvalue:
    """The eigenvalue functional and its two derivative modes."""

    def _critical_at(self, p):
        t_half = cmath.log(2) / (2j * math.pi)
        nm = Nome(p=p)
        t = newton_polish_tau(np.array([t_half], dtype=complex), XI_3L1, RS21, IDX21, nm)
        return EllipticPoint(t, nm)

    def test_requires_critical_point(self):
        nm = Nome(p=0.01)
        with pytest.raises(DomainError):
            S_dtau(EllipticPoint([0.3 - 0.2j], nm), XI_3L1, RS21, IDX21)

    def test_invalid_mode_rejected(self):
        pt = self._critical_at(1e-3)
        with pytest.raises(DomainError):
            S_dtau(pt, XI_3L1, RS21, IDX21, mode="sideways")

    def test_zero_at_p_zero(self):
        t_half = cmath.log(2) / (2j * math.pi)
        pt = EllipticPoint([t_half], Nome(p=0.0))
        assert S_dtau(pt, XI_3L1, RS21, IDX21, "partial") == 0
        assert S_dtau(pt, XI_3L1, RS21, IDX21, "total") == 0

    def test_partial_mode_scales_linearly_in_p(self):
        s6 = S_dtau(self._critical_at(1e-6), XI_3L1, RS21, IDX21, "partial")
        s8 = S_dtau(self._critical_at(1e-8), XI_3L1, RS21, IDX21, "partial")
        ratio = abs(s6) / abs(s8)
        assert abs(ratio - 100.0) < 5.0, f"|S_dtau| ratio across decades: {ratio}"

    def test_eigenvalue_assembly_near_trig_limit(self):
        pt = self._critical_at(1e-6)
        E = eigenvalue_elliptic(pt, XI_3L1, RS21, IDX21, "partial")
        target = 9 * math.pi ** 2
        assert abs(E - target) < 1e-3 * target, f"E = {E} vs 9 pi^2 = {target}"

    def test_eigenvalue_real_for_admissible_weight(self):
        pt = self._critical_at(1e-3)
        for mode in ("partial", "total"):
            E = eigenvalue_elliptic(pt, XI_3L1, RS21, IDX21, mode)
            assert abs(E.imag) < 1e-6 * abs(E), f"Im E in {mode} mode: {E}"

    def test_mode_discrepancy_identity(self):
        """total - partial = Sum_i (dS/dt_i)(dt_i/dtau) with
        dS/dt_i = -2 pi i (xi, alpha_c(i)) at a critical point."""
        pt = self._critical_at(1e-3)
        nm, t = pt.nome, pt.t
        sp = S_dtau(pt, XI_3L1, RS21, IDX21, "partial")
        st = S_dtau(pt, XI_3L1, RS21, IDX21, "total")
        tau = nm.tau
        d = 1e-4 * abs(tau)
        u = tau / abs(tau)
        t_p = newton_polish_tau(t, XI_3L1, RS21, IDX21, Nome(tau=tau + d * u))
        t_m = newton_polish_tau(t, XI_3L1, RS21, IDX21, Nome(tau=tau - d * u))
        dt_dtau = (t_p - t_m) / (2 * d * u)
        predicted = np.sum(-2j * math.pi * 3.0 * dt_dtau)   # (xi, alpha_1) = 3
        assert abs((st - sp) - predicted) < 1e-8, \
            f"discrepancy {st - sp} vs predicted {predicted}"

    def test_modes_differ_at_order_p(self):
        sp = S_dtau(self._critical_at(1e-2), XI_3L1, RS21, IDX21, "partial")
        st = S_dtau(self._critical_at(1e-2), XI_3L1, RS21, IDX21, "total")
        assert abs(sp - st) > 1e-4, "modes indistinguishable at p=1e-2"


class TestMembershipAndReport:
    def test_trig_membership_examples(self):
        assert membership_F(TrigPoint([0.5]), XI_3L1, RS21, IDX21)
        assert not membership_F(TrigPoint([1.0]), XI_3L1, RS21, IDX21)
        assert not membership_F(TrigPoint([0.0]), XI_3L1, RS21, IDX21)
        assert membership_F(TrigPoint(n3_closed_point(3, 3)), XI_33, RS31, IDX31)
        assert not membership_F(TrigPoint([0.4, 0.4, 0.7]), XI_33, RS31, IDX31)

    def test_elliptic_membership(self):
        nm = Nome(p=0.05)
        assert membership_F(EllipticPoint([0.3 - 0.2j], nm), XI_3L1, RS21, IDX21)
        assert not membership_F(EllipticPoint([0.0], nm), XI_3L1, RS21, IDX21)

    def test_report_fields(self):
        rep = make_report(TrigPoint([0.5]), XI_3L1, RS21, IDX21)
        assert isinstance(rep, CriticalReport)
        assert rep.grad_norm == 0.0
        assert abs(rep.hessian_det - (-16.0)) < 1e-12
        assert rep.in_F

    def test_report_elliptic(self):
        t_half = cmath.log(2) / (2j * math.pi)
        nm = Nome(p=1e-3)
        t = newton_polish_tau(np.array([t_half], dtype=complex), XI_3L1, RS21, IDX21, nm)
        rep = make_report(EllipticPoint(t, nm), XI_3L1, RS21, IDX21)
        assert rep.grad_norm < 1e-12
        assert rep.in_F
        assert abs(rep.hessian_det) > 1.0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
