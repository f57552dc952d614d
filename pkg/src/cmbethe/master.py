"""Master functions of the Bethe ansatz, their log-gradients and Hessians.

The trigonometric master function, in the variables T_i = exp(-2 pi i t_i):

    log Phi_tri(T) = Sum_j [-(xi - rho_bar, alpha_c(j))] log T_j
                     - l N Sum_{c(j)=1} log(1 - T_j)
                     + 2 Sum_{c(i)=c(j), i<j} log(T_i - T_j)
                     - Sum_{|c(i)-c(j)|=1, i<j} log(T_i - T_j),

and the elliptic master function, in the t variables at nome p:

    log Phi_tau(t) = 2 pi i (xi, Sum_j t_j alpha_c(j)) + S(t; tau),
    S(t; tau) = Sum_{i<j} (alpha_c(i), alpha_c(j)) log theta(t_i - t_j)
                - l N Sum_{c(i)=1} log theta(t_i).

Critical points of Phi (zeros of the log-gradient) are the Bethe roots.  The
Hessian convention is the Hessian matrix of MINUS log Phi (the non-degeneracy
certificate is its determinant); only log-derivatives are ever evaluated, so
no branch of log is needed anywhere except in the small centered-difference
ratios of ``S_dtau(mode="total")``, which are all near 1.

The eigenvalue functional at an elliptic Bethe root:

    E = 2 pi^2 (xi, xi) - 2 pi i * dS/dtau,

with dS/dtau either partial (fixed t, term-wise theta tau-derivatives) or
total (along the critical branch t(tau), by one Newton-corrected continuation
step and centered differencing).  At p = 0 both reduce to 2 pi^2 (xi, xi).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .elliptic import Nome, log_theta_d1, log_theta_d2, log_theta_dtau, theta
from .errors import (ConvergenceError, DomainError, MembershipError,
                     PoleError)
from .weights import BetheIndexing, RootSystemData, Weight, pairing

_TWO_PI_I = 2j * math.pi
_EVAL_GUARD = 1e-13       # evaluation-time singularity guard
_MEMBERSHIP_TOL = 1e-9    # factor-magnitude threshold of the F predicate


@dataclass
class TrigPoint:
    """A point in the T variables, T_i = exp(-2 pi i t_i)."""

    T: np.ndarray

    def __post_init__(self):
        self.T = np.atleast_1d(np.asarray(self.T, dtype=complex))
        if not np.all(np.isfinite(self.T)):
            raise DomainError("TrigPoint coordinates must be finite")

    @property
    def m(self) -> int:
        return len(self.T)

    def to_t(self) -> np.ndarray:
        """Principal-branch t coordinates, t = log T / (-2 pi i)."""
        return np.log(self.T) / (-_TWO_PI_I)


@dataclass
class EllipticPoint:
    """A point in the t variables together with its nome."""

    t: np.ndarray
    nome: Nome

    def __post_init__(self):
        self.t = np.atleast_1d(np.asarray(self.t, dtype=complex))
        if not np.all(np.isfinite(self.t)):
            raise DomainError("EllipticPoint coordinates must be finite")

    @property
    def m(self) -> int:
        return len(self.t)

    def to_T(self) -> np.ndarray:
        return np.exp(-_TWO_PI_I * self.t)


Point = Union[TrigPoint, EllipticPoint]


@dataclass(frozen=True)
class CriticalReport:
    """Certificate data for a candidate critical point."""

    point: Point
    grad_norm: float
    hessian_det: complex
    in_F: bool


def _check_sizes(point_len: int, xi: Weight, rs: RootSystemData,
                 idx: BetheIndexing) -> None:
    if idx.N != rs.N or idx.l != rs.l:
        raise DomainError(f"indexing is for (N,l)=({idx.N},{idx.l}), "
                          f"root system for ({rs.N},{rs.l})")
    if point_len != idx.m:
        raise DomainError(f"point has {point_len} coordinates, expected m={idx.m}")
    if xi.N != rs.N:
        raise DomainError(f"weight has N={xi.N}, root system has N={rs.N}")


def _xi_alpha(xi: Weight) -> np.ndarray:
    """(xi, alpha_a) for the simple roots, i.e. consecutive coordinate drops."""
    return -np.diff(xi.coords)


def _per_index_exponents(xi: Weight, idx: BetheIndexing) -> tuple[np.ndarray, np.ndarray]:
    """b_k = (xi, alpha_c(k)) and a_k = (xi - rho_bar, alpha_c(k)) = b_k - 1."""
    xa = _xi_alpha(xi)
    b = np.array([xa[c - 1] for c in idx.c], dtype=complex)
    return b, b - 1.0


def _first_color_mask(idx: BetheIndexing) -> np.ndarray:
    return np.array([c == 1 for c in idx.c])


# ---------------------------------------------------------------------------
# trigonometric side


def _as_T(point: TrigPoint | np.ndarray) -> np.ndarray:
    return point.T if isinstance(point, TrigPoint) else \
        np.atleast_1d(np.asarray(point, dtype=complex))


def _guard_trig(T: np.ndarray, idx: BetheIndexing, K: np.ndarray) -> None:
    mask1 = _first_color_mask(idx)
    if np.any(np.abs(T) < _EVAL_GUARD):
        raise MembershipError("a T coordinate vanishes (log T factor singular)")
    if np.any(np.abs(1.0 - T[mask1]) < _EVAL_GUARD):
        raise MembershipError("a first-color T coordinate hits 1 ((1-T) factor vanishes)")
    D = T[:, None] - T[None, :]
    coupled = (K != 0) & ~np.eye(idx.m, dtype=bool)
    if np.any(np.abs(D[coupled]) < _EVAL_GUARD):
        raise MembershipError("coupled T coordinates collide ((T_i - T_j) factor vanishes)")


def log_phi_tri_grad(point: TrigPoint | np.ndarray, xi: Weight,
                     rs: RootSystemData, idx: BetheIndexing) -> np.ndarray:
    """The gradient d log Phi_tri / dT_i; zero exactly at Bethe roots."""
    T = _as_T(point)
    _check_sizes(len(T), xi, rs, idx)
    K = idx.pair_coupling
    _guard_trig(T, idx, K)
    _, a = _per_index_exponents(xi, idx)
    mask1 = _first_color_mask(idx)

    grad = -a / T
    grad[mask1] += rs.l * rs.N / (1.0 - T[mask1])
    D = T[:, None] - T[None, :]
    off = ~np.eye(idx.m, dtype=bool)
    contrib = np.zeros_like(D)
    sel = off & (K != 0)
    contrib[sel] = K[sel] / D[sel]
    grad += contrib.sum(axis=1)
    return grad


def hessian_tri(point: TrigPoint | np.ndarray, xi: Weight, rs: RootSystemData,
                idx: BetheIndexing) -> tuple[np.ndarray, complex]:
    """Hessian matrix of -log Phi_tri in the T variables, and its determinant."""
    T = _as_T(point)
    _check_sizes(len(T), xi, rs, idx)
    K = idx.pair_coupling
    _guard_trig(T, idx, K)
    _, a = _per_index_exponents(xi, idx)
    mask1 = _first_color_mask(idx)

    D = T[:, None] - T[None, :]
    off = ~np.eye(idx.m, dtype=bool)
    inv_D2 = np.zeros_like(D)
    sel = off & (K != 0)
    inv_D2[sel] = K[sel] / D[sel] ** 2

    H = -inv_D2.copy()                       # off-diagonal of -log Phi
    diag = -a / T ** 2 + inv_D2.sum(axis=1)  # diagonal of -log Phi
    diag[mask1] -= rs.l * rs.N / (1.0 - T[mask1]) ** 2
    H[np.arange(idx.m), np.arange(idx.m)] = diag
    return H, complex(np.linalg.det(H))


# ---------------------------------------------------------------------------
# elliptic side


def _pair_eval(fn, t: np.ndarray, nome: Nome, K: np.ndarray) -> np.ndarray:
    """Evaluate fn on the coupled off-diagonal differences t_i - t_j,
    returning the full m x m matrix with zeros elsewhere."""
    m = len(t)
    D = t[:, None] - t[None, :]
    sel = (K != 0) & ~np.eye(m, dtype=bool)
    out = np.zeros_like(D)
    if np.any(sel):
        out[sel] = fn(D[sel], nome)
    return out


def log_phi_tau_grad(pt: EllipticPoint, xi: Weight, rs: RootSystemData,
                     idx: BetheIndexing) -> np.ndarray:
    """The gradient d log Phi_tau / dt_i; zero exactly at elliptic Bethe roots."""
    _check_sizes(pt.m, xi, rs, idx)
    t, nome = pt.t, pt.nome
    K = idx.pair_coupling
    b, _ = _per_index_exponents(xi, idx)
    mask1 = _first_color_mask(idx)
    try:
        zmat = _pair_eval(log_theta_d1, t, nome, K)
        grad = _TWO_PI_I * b + (K * zmat).sum(axis=1)
        if np.any(mask1):
            grad[mask1] -= rs.l * rs.N * np.atleast_1d(
                log_theta_d1(t[mask1], nome))
    except PoleError as exc:
        raise MembershipError(f"theta factor vanishes: {exc}") from exc
    return grad


def hessian_tau(pt: EllipticPoint, xi: Weight, rs: RootSystemData,
                idx: BetheIndexing) -> tuple[np.ndarray, complex]:
    """Hessian matrix of -log Phi_tau in the t variables, and its determinant."""
    _check_sizes(pt.m, xi, rs, idx)
    t, nome = pt.t, pt.nome
    K = idx.pair_coupling
    mask1 = _first_color_mask(idx)
    try:
        wmat = _pair_eval(log_theta_d2, t, nome, K)
        Kw = K * wmat
        H = Kw.copy()                      # off-diagonal of -log Phi_tau
        diag = -Kw.sum(axis=1)
        if np.any(mask1):
            diag[mask1] += rs.l * rs.N * np.atleast_1d(log_theta_d2(t[mask1], nome))
        H[np.arange(idx.m), np.arange(idx.m)] = diag
    except PoleError as exc:
        raise MembershipError(f"theta factor vanishes: {exc}") from exc
    return H, complex(np.linalg.det(H))


def newton_polish_tau(t: np.ndarray, xi: Weight, rs: RootSystemData,
                       idx: BetheIndexing, nome: Nome,
                       tol: float = 1e-12, max_iter: int = 30) -> np.ndarray:
    """Newton-correct an elliptic critical point at a (nearby) nome."""
    t = t.astype(complex).copy()
    for _ in range(max_iter):
        pt = EllipticPoint(t=t, nome=nome)
        g = log_phi_tau_grad(pt, xi, rs, idx)
        if np.linalg.norm(g) < tol:
            return t
        H, _ = hessian_tau(pt, xi, rs, idx)
        # Jacobian of the gradient is the Hessian of +log Phi = -H
        step = np.linalg.solve(-H, -g)
        t = t + step
    raise ConvergenceError(
        f"Newton correction did not reach |grad| < {tol} in {max_iter} iterations")


def _S_partial_dtau(t: np.ndarray, nome: Nome, rs: RootSystemData,
                    idx: BetheIndexing) -> complex:
    """dS/dtau at fixed t, term-wise theta tau-derivatives."""
    K = idx.pair_coupling
    mask1 = _first_color_mask(idx)
    total = 0j
    for i in range(idx.m):
        for j in range(i + 1, idx.m):
            if K[i, j] != 0:
                total += K[i, j] * log_theta_dtau(t[i] - t[j], nome)
    if np.any(mask1):
        total -= rs.l * rs.N * np.sum(np.atleast_1d(
            log_theta_dtau(t[mask1], nome)))
    return complex(total)


def _S_difference(t_new: np.ndarray, nome_new: Nome, t_old: np.ndarray,
                  nome_old: Nome, rs: RootSystemData, idx: BetheIndexing) -> complex:
    """S(t_new; tau_new) - S(t_old; tau_old), via term-wise principal logs of
    theta ratios (each ratio is near 1 for small parameter steps)."""
    K = idx.pair_coupling
    mask1 = _first_color_mask(idx)
    total = 0j
    for i in range(idx.m):
        for j in range(i + 1, idx.m):
            if K[i, j] != 0:
                num = theta(t_new[i] - t_new[j], nome_new).value
                den = theta(t_old[i] - t_old[j], nome_old).value
                total += K[i, j] * cmath.log(num / den)
    for i in np.nonzero(mask1)[0]:
        num = theta(t_new[i], nome_new).value
        den = theta(t_old[i], nome_old).value
        total -= rs.l * rs.N * cmath.log(num / den)
    return total


def S_dtau(pt: EllipticPoint, xi: Weight, rs: RootSystemData, idx: BetheIndexing,
           mode: str = "partial", *, crit_tol: float = 1e-8,
           fd_scale: float = 1e-4) -> complex:
    """dS/dtau at an elliptic Bethe root.

    mode="partial": derivative at fixed t (term-wise theta tau-derivatives).
    mode="total": derivative along the critical branch t(tau), by one
    Newton-corrected continuation step on either side and centered
    differencing.  At a critical point the two differ by
    Sum_i (dS/dt_i)(dt_i/dtau) with dS/dt_i = -2 pi i (xi, alpha_c(i)).

    The point must satisfy the Bethe equations to ``crit_tol``.
    """
    if mode not in ("partial", "total"):
        raise DomainError(f"mode must be 'partial' or 'total', got {mode!r}")
    _check_sizes(pt.m, xi, rs, idx)
    g = log_phi_tau_grad(pt, xi, rs, idx)
    gnorm = float(np.linalg.norm(g))
    if gnorm > crit_tol:
        raise DomainError(
            f"S_dtau requires a Bethe critical point: |grad| = {gnorm:.3e} "
            f"> {crit_tol:.1e}")
    t, nome = pt.t, pt.nome
    if nome.p == 0:
        return 0j
    if mode == "partial":
        return _S_partial_dtau(t, nome, rs, idx)

    tau = nome.tau
    direction = tau / abs(tau)
    delta = fd_scale * max(1.0, abs(tau))
    step = delta * direction
    nome_plus = Nome(tau=tau + step, series_tolerance=nome.series_tolerance)
    nome_minus = Nome(tau=tau - step, series_tolerance=nome.series_tolerance)
    t_plus = newton_polish_tau(t, xi, rs, idx, nome_plus)
    t_minus = newton_polish_tau(t, xi, rs, idx, nome_minus)
    dS_plus = _S_difference(t_plus, nome_plus, t, nome, rs, idx)
    dS_minus = _S_difference(t_minus, nome_minus, t, nome, rs, idx)
    return (dS_plus - dS_minus) / (2.0 * step)


def eigenvalue_elliptic(pt: EllipticPoint, xi: Weight, rs: RootSystemData,
                        idx: BetheIndexing, mode: str = "partial") -> complex:
    """The Bethe eigenvalue E = 2 pi^2 (xi, xi) - 2 pi i dS/dtau."""
    base = 2.0 * math.pi ** 2 * pairing(xi, xi)
    return base - _TWO_PI_I * S_dtau(pt, xi, rs, idx, mode=mode)


# ---------------------------------------------------------------------------
# membership and reports


def membership_F(point: Point, xi: Weight, rs: RootSystemData,
                 idx: BetheIndexing, threshold: float = _MEMBERSHIP_TOL) -> bool:
    """True iff every factor of Phi is finite and non-zero at the point
    (all factor magnitudes above ``threshold``)."""
    _check_sizes(point.m, xi, rs, idx)
    K = idx.pair_coupling
    mask1 = _first_color_mask(idx)
    coupled = (K != 0) & ~np.eye(idx.m, dtype=bool)
    if isinstance(point, TrigPoint):
        T = point.T
        if not np.all(np.isfinite(T)):
            return False
        if np.any(np.abs(T) <= threshold):
            return False
        if np.any(np.abs(1.0 - T[mask1]) <= threshold):
            return False
        D = T[:, None] - T[None, :]
        return not np.any(np.abs(D[coupled]) <= threshold)
    t, nome = point.t, point.nome
    if not np.all(np.isfinite(t)):
        return False
    if np.any(mask1):
        vals = np.abs(np.atleast_1d(theta(t[mask1], nome).value))
        if np.any(vals <= threshold):
            return False
    D = t[:, None] - t[None, :]
    if np.any(coupled):
        vals = np.abs(theta(D[coupled], nome).value)
        if np.any(vals <= threshold):
            return False
    return True


def make_report(point: Point, xi: Weight, rs: RootSystemData,
                idx: BetheIndexing) -> CriticalReport:
    """Assemble the CriticalReport (gradient norm, Hessian determinant of
    -log Phi, membership) for a trigonometric or elliptic point."""
    in_f = membership_F(point, xi, rs, idx)
    if isinstance(point, TrigPoint):
        grad = log_phi_tri_grad(point, xi, rs, idx)
        _, det = hessian_tri(point, xi, rs, idx)
    else:
        grad = log_phi_tau_grad(point, xi, rs, idx)
        _, det = hessian_tau(point, xi, rs, idx)
    return CriticalReport(point=point, grad_norm=float(np.linalg.norm(grad)),
                          hessian_det=det, in_F=in_f)
