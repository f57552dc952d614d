"""Critical points of the master functions and continuation in the nome.

Closed forms:

  * N=2, any l: the critical T multiset is the root set of the degree-l
    polynomial Sum_i (-1)^i sigma_i z^(l-i) with elementary symmetric values
    sigma_i = C(l,i) prod_{j=1..i} (-m1+1+l-j)/(-m1-j); the discriminant
    delta = prod (T_i-T_j)^2 and the Hessian determinant have product
    closed forms (functions ``delta_closed_form_n2``, ``hess_closed_form_n2``).
  * N=3, l=1: T_3 = (m1+m2-1)(m2-1)/((m1+m2+1)(m2+1)); (T_1, T_2) solve
    (m1+m2+1)(m1+1) X^2 + 2(-m1^2-m1m2+2) X + (m1+m2-1)(m1-1) = 0.
    The product identities T1T2 and (1-T1)(1-T2) match their displays
    exactly; the displayed prod (T_i-T_j)^2 is uniformly -8 x the direct
    product and the displayed Hessian is -1 x the direct determinant (both
    constant factors are exposed by ``n3_closed_form_displays`` and recorded
    by the tests).

Generic search: damped Newton on the trigonometric Bethe equations from
closed forms or randomized annulus seeds, accepting only points in F_{N,l}
with non-degenerate Hessian and non-vanishing symmetrized Bethe vector.

Continuation: from a non-degenerate trigonometric point, the nome is
advanced along a geometric-then-linear schedule (first step 1e-6, x10 per
step until within a decade of the target, then ``steps`` linear steps),
Newton-correcting the elliptic Bethe root at every step and halving the
step on failure down to ``min_step``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Optional

import numpy as np

from .elliptic import Nome
from .errors import (ConvergenceError, DegeneracyError, DomainError,
                     MembershipError)
from .master import (CriticalReport, EllipticPoint, TrigPoint, hessian_tau,
                     hessian_tri, log_phi_tri_grad, make_report,
                     membership_F, newton_polish_tau)
from .weights import (BetheIndexing, RootSystemData, Weight, admissible,
                      lambda_coords, root_system, build_indexing)

NEWTON_TOL = 1e-12
P_MAX = 0.3
MIN_STEP = 1e-12
FIRST_STEP = 1e-6
HESS_DEGENERACY_TOL = 1e-9


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# N = 2 closed forms


def sigma_closed_form(m1: float, l: int) -> list:
    """Elementary symmetric values sigma_i of the N=2 critical T multiset,
    exact Fractions for integer m1."""
    if l < 1:
        raise DomainError(f"need l >= 1, got {l}")
    m1_int = isinstance(m1, (int, np.integer)) or (isinstance(m1, float) and m1 == int(m1))
    if m1_int and int(m1) != 0 and abs(int(m1)) <= l:
        raise DomainError(
            f"degenerate parameter m1={m1}: sigma numerators/denominators vanish "
            f"for |m1| in 1..l (l={l})")
    out = []
    if m1_int:
        m = Fraction(int(m1))
        for i in range(1, l + 1):
            val = Fraction(math.comb(l, i))
            for j in range(1, i + 1):
                val *= Fraction(-m + 1 + l - j, 1) / (-m - j)
            out.append(val)
    else:
        for i in range(1, l + 1):
            val = float(math.comb(l, i))
            for j in range(1, i + 1):
                denom = -m1 - j
                if denom == 0:
                    raise DomainError(f"degenerate parameter m1={m1}")
                val *= (-m1 + 1 + l - j) / denom
            out.append(val)
    return out


def delta_closed_form_n2(m1: float, l: int) -> float:
    """delta = prod_{i<j} (T_i - T_j)^2 at the N=2 critical point."""
    val = 1.0
    for j in range(l):
        num = (j + 1) ** (j + 1) * (-m1 + 1 + j) ** j * (-2 * l + j) ** j
        den = (-m1 - j - 1) ** (2 * l - j - 2)
        if den == 0:
            raise DomainError(f"degenerate parameter m1={m1}")
        val *= num / den
    return val


def hess_closed_form_n2(m1: float, l: int) -> float:
    """Determinant of the Hessian of -log Phi_tri at the N=2 critical point."""
    val = float(math.factorial(l))
    for j in range(l):
        den = (-m1 + 1 + j) * (-2 * l + j)
        if den == 0:
            raise DomainError(f"degenerate parameter m1={m1}")
        val *= (-m1 - j - 1) ** 3 / den
    return val


def delta_direct(T: TrigPoint | np.ndarray) -> complex:
    """prod_{i<j} (T_i - T_j)^2 evaluated directly."""
    arr = T.T if isinstance(T, TrigPoint) else np.asarray(T, dtype=complex)
    val = 1.0 + 0j
    for i in range(len(arr)):
        for j in range(i + 1, len(arr)):
            val *= (arr[i] - arr[j]) ** 2
    return complex(val)


def closed_form_n2(m1: float, l: int) -> tuple[TrigPoint, CriticalReport]:
    """The unique N=2 critical point: companion-matrix roots of the sigma
    polynomial, Newton-polished to |grad| < 1e-12."""
    sigmas = [float(s) for s in sigma_closed_form(m1, l)]
    coeffs = [1.0] + [(-1.0) ** i * s for i, s in enumerate(sigmas, start=1)]
    roots = np.roots(coeffs)
    rs = root_system(2, l)
    idx = build_indexing(2, l)
    xi = Weight([m1 / 2.0, -m1 / 2.0]) if not float(m1).is_integer() \
        else Weight([Fraction(int(m1), 2), Fraction(-int(m1), 2)])
    report = newton_trig(TrigPoint(roots), xi, rs, idx)
    return report.point, report


def closed_form_n3_l1(m1: float, m2: float) -> list[tuple[TrigPoint, CriticalReport]]:
    """The N=3, l=1 closed-form critical points, both orderings (T1,T2,T3)
    and (T2,T1,T3) — or one if the quadratic has a double root."""
    for name, v in (("m1", m1), ("m2", m2), ("m1+m2", m1 + m2)):
        if v in (0, 1, -1):
            raise DomainError(f"excluded parameter: {name} = {v} is in {{0, +1, -1}}")
    t3 = (m1 + m2 - 1) * (m2 - 1) / ((m1 + m2 + 1) * (m2 + 1))
    a = (m1 + m2 + 1) * (m1 + 1)
    b = 2.0 * (-m1 * m1 - m1 * m2 + 2.0)
    c = (m1 + m2 - 1) * (m1 - 1)
    disc = cmath.sqrt(complex(b * b - 4 * a * c))
    r1 = (-b + disc) / (2 * a)
    r2 = (-b - disc) / (2 * a)
    rs = root_system(3, 1)
    idx = build_indexing(3, 1)
    xi = Weight([2 * m1 / 3.0 + m2 / 3.0, -m1 / 3.0 + m2 / 3.0, -m1 / 3.0 - 2 * m2 / 3.0])
    orderings = [np.array([r1, r2, t3])]
    if abs(r1 - r2) > 1e-14:
        orderings.append(np.array([r2, r1, t3]))
    out = []
    for T in orderings:
        point = TrigPoint(T)
        out.append((point, make_report(point, xi, rs, idx)))
    return out


def n3_closed_form_displays(m1: float, m2: float) -> dict:
    """The published N=3, l=1 product/Hessian values, with the constant
    factors relating them to the direct quantities:

        prod (T_i-T_j)^2  (direct) = prod_sq_factor   * prod_sq_display
        det Hess(-log Phi) (direct) = hessian_factor  * hessian_display
    """
    prod_sq_display = (2 * (m1 + m2 - 1) ** 2 * (2 * m1 * m1 + 2 * m1 * m2 - m2 * m2 - 3) ** 3
                       / ((m1 + 1) ** 4 * (m2 + 1) ** 4 * (m1 + m2 + 1) ** 6))
    hessian_display = ((m1 + 1) ** 3 * (m2 + 1) ** 3 * (m1 + m2 + 1) ** 5
                       / (6.0 * (m1 - 1) * (m2 - 1) * (m1 + m2 - 1) ** 3))
    return {
        "T1T2": (m1 + m2 - 1) * (m1 - 1) / ((m1 + m2 + 1) * (m1 + 1)),
        "one_minus_T1_one_minus_T2": 6.0 / ((m1 + m2 + 1) * (m1 + 1)),
        "prod_sq_display": prod_sq_display,
        "prod_sq_factor": -8.0,
        "hessian_display": hessian_display,
        "hessian_factor": -1.0,
    }


# ---------------------------------------------------------------------------
# Newton search


def newton_trig(seed: TrigPoint, xi: Weight, rs: RootSystemData,
                idx: BetheIndexing, tol: float = NEWTON_TOL,
                max_iter: int = 100) -> CriticalReport:
    """Damped Newton iteration on the trigonometric Bethe equations.

    Converged iff |grad| < tol; raises ConvergenceError after max_iter,
    MembershipError if an iterate leaves F_{N,l}.
    """
    T = seed.T.astype(complex).copy()
    if not membership_F(TrigPoint(T), xi, rs, idx):
        raise MembershipError("seed is outside F (some factor of Phi vanishes)")
    g = log_phi_tri_grad(TrigPoint(T), xi, rs, idx)
    gnorm = float(np.linalg.norm(g))
    for _ in range(max_iter):
        if gnorm < tol:
            return make_report(TrigPoint(T), xi, rs, idx)
        H, _ = hessian_tri(TrigPoint(T), xi, rs, idx)
        # Jacobian of the gradient is the Hessian of +log Phi = -H
        try:
            full_step = np.linalg.solve(-H, -g)
        except np.linalg.LinAlgError as exc:
            raise DegeneracyError(f"singular Hessian during Newton: {exc}") from exc
        lam = 1.0
        while lam > 2 ** -24:
            T_new = T + lam * full_step
            try:
                g_new = log_phi_tri_grad(TrigPoint(T_new), xi, rs, idx)
            except MembershipError:
                lam /= 2
                continue
            gnorm_new = float(np.linalg.norm(g_new))
            if gnorm_new < (1 - 0.25 * lam) * gnorm:
                break
            lam /= 2
        else:
            raise ConvergenceError(
                f"Newton line search stalled at |grad| = {gnorm:.3e}")
        T, g, gnorm = T_new, g_new, gnorm_new
        if not membership_F(TrigPoint(T), xi, rs, idx):
            raise MembershipError(
                "Newton iterate left F (a factor of Phi fell below threshold)")
    raise ConvergenceError(
        f"Newton did not reach |grad| < {tol} in {max_iter} iterations "
        f"(final |grad| = {gnorm:.3e})")


def _search_permutations(N: int) -> list[tuple[int, ...]]:
    """Permutation search order: identity, full reversal, then lexicographic."""
    ident = tuple(range(N))
    rev = tuple(reversed(ident))
    rest = sorted(p for p in permutations(range(N)) if p not in (ident, rev))
    return [ident, rev] + rest


def find_admissible_critical_point(
        xi_dominant: Weight, rs: RootSystemData, idx: BetheIndexing,
        n_seeds: int = 200, seed: int = 1234,
) -> tuple[tuple[int, ...], CriticalReport]:
    """Search for a non-degenerate critical point over Weyl images of xi.

    Permutations sigma of the epsilon-coordinates are tried in the order
    identity, reversal, lexicographic; for each, closed forms when available,
    else damped Newton from randomized annulus seeds (0.05 < |T| < 5, away
    from 0 and 1, fixed RNG seed).  A point is accepted iff it lies in
    F_{N,l}, its Hessian determinant is non-degenerate, and the symmetrized
    Bethe vector does not vanish.  Exhaustion raises ConvergenceError
    (an inconclusive search, not a refutation).
    """
    if not admissible(xi_dominant, rs):
        raise DomainError(f"weight {xi_dominant!r} fails the admissibility gate")
    from .states import sym_omega_tri_nonvanishing   # deferred: states imports master

    N, l = rs.N, rs.l
    rng = np.random.default_rng(seed)
    failures: list[str] = []
    for sigma in _search_permutations(N):
        xi_s = Weight(np.asarray(xi_dominant.coords)[list(sigma)])
        candidates: list[CriticalReport] = []
        ms = lambda_coords(xi_s)
        try:
            if N == 2:
                _, rep = closed_form_n2(float(ms[0]), l)
                candidates.append(rep)
            elif N == 3 and l == 1:
                for _, rep in closed_form_n3_l1(float(ms[0]), float(ms[1])):
                    candidates.append(rep)
        except (DomainError, ConvergenceError, MembershipError, DegeneracyError) as exc:
            failures.append(f"sigma={sigma} closed form: {exc}")
        if not candidates:
            for k in range(n_seeds):
                r = 0.05 * (5.0 / 0.05) ** rng.random(idx.m)
                if k % 2 == 0:
                    T0 = r * np.exp(2j * math.pi * rng.random(idx.m))
                else:
                    T0 = r * np.where(rng.random(idx.m) < 0.5, 1.0, -1.0) + 0j
                if np.any(np.abs(T0) < 0.05) or np.any(np.abs(T0 - 1.0) < 0.05):
                    continue
                try:
                    candidates.append(newton_trig(TrigPoint(T0), xi_s, rs, idx))
                except (ConvergenceError, MembershipError, DegeneracyError):
                    continue
                if candidates:
                    break
        for rep in candidates:
            scale = max(1.0, float(np.abs(np.diag(
                hessian_tri(rep.point, xi_s, rs, idx)[0])).prod()))
            if not rep.in_F:
                failures.append(f"sigma={sigma}: point left F")
                continue
            if abs(rep.hessian_det) <= HESS_DEGENERACY_TOL * scale:
                failures.append(f"sigma={sigma}: degenerate Hessian {rep.hessian_det}")
                continue
            if not sym_omega_tri_nonvanishing(rep.point, xi_s, rs, idx):
                failures.append(f"sigma={sigma}: Sym omega_tri vanishes")
                continue
            return sigma, rep
    raise ConvergenceError(
        "search exhausted without an accepted critical point (inconclusive; "
        "does not refute existence): " + "; ".join(failures[:6]))


# ---------------------------------------------------------------------------
# continuation in the nome


@dataclass
class PathStep:
    p: complex
    point: EllipticPoint
    report: CriticalReport
    eigenvalue: Optional[complex] = None


@dataclass
class ContinuationPath:
    """A continuation record: accepted (p_k, point, report) triples from the
    trigonometric seed (p=0) to the target nome, plus the step policy."""

    steps: list[PathStep]
    target_p: complex
    first_step: float = FIRST_STEP
    linear_steps: int = 10
    min_step: float = MIN_STEP
    newton_tol: float = NEWTON_TOL

    @property
    def endpoint(self) -> PathStep:
        return self.steps[-1]

    def to_jsonl(self) -> str:
        """One JSON object per accepted step:
        {p, t, grad_norm, hess_det, eigenvalue?} (17 significant digits)."""
        lines = []
        for s in self.steps:
            t_list = ", ".join(
                f"[{_fmt17(z.real)}, {_fmt17(z.imag)}]" for z in s.point.t)
            parts = [
                f'"p": [{_fmt17(s.p.real)}, {_fmt17(s.p.imag)}]',
                f'"t": [{t_list}]',
                f'"grad_norm": {_fmt17(s.report.grad_norm)}',
                f'"hess_det": [{_fmt17(s.report.hessian_det.real)}, '
                f'{_fmt17(s.report.hessian_det.imag)}]',
            ]
            if s.eigenvalue is not None:
                parts.append(
                    f'"eigenvalue": [{_fmt17(s.eigenvalue.real)}, '
                    f'{_fmt17(s.eigenvalue.imag)}]')
            lines.append("{" + ", ".join(parts) + "}")
        return "\n".join(lines) + "\n"


def _schedule(target: complex, first_step: float, linear_steps: int) -> list[complex]:
    """Geometric magnitudes from first_step by x10 until within one decade of
    |target|, then linear_steps equal steps to the target, along its ray."""
    mag = abs(target)
    if mag == 0:
        return []
    ray = target / mag
    mags: list[float] = []
    s = first_step
    while s < (mag / 10.0) * (1 + 1e-9):
        mags.append(s)
        s *= 10.0
    last = mags[-1] if mags else 0.0
    for k in range(1, linear_steps + 1):
        mags.append(last + (mag - last) * k / linear_steps)
    return [m * ray for m in mags]


def continue_nome(trig: CriticalReport, xi: Weight, rs: RootSystemData,
                  idx: BetheIndexing, target_p: complex, steps: int = 10,
                  *, p_max: float = P_MAX, first_step: float = FIRST_STEP,
                  min_step: float = MIN_STEP, newton_tol: float = NEWTON_TOL,
                  eigenvalue_mode: Optional[str] = None) -> ContinuationPath:
    """Continue a non-degenerate trigonometric critical point to target_p.

    The seed (p=0) enters the path as the elliptic point t = log T/(-2 pi i)
    (principal branch).  Each advance Newton-corrects the elliptic Bethe
    root; on failure the step is halved down to min_step; a Hessian
    determinant below threshold raises DegeneracyError; every accepted point
    satisfies grad_norm < newton_tol and membership in F.
    """
    if not isinstance(trig.point, TrigPoint):
        raise DomainError("continuation starts from a trigonometric report")
    if steps < 1:
        raise DomainError(f"need steps >= 1, got {steps}")
    if abs(target_p) > p_max:
        raise DomainError(f"|target_p| = {abs(target_p)} exceeds p_max = {p_max}")
    if not trig.in_F:
        raise DomainError("trigonometric seed is outside F")
    if abs(trig.hessian_det) <= HESS_DEGENERACY_TOL:
        raise DegeneracyError(
            f"trigonometric seed has degenerate Hessian: {trig.hessian_det}")
    if trig.grad_norm > newton_tol:
        raise DomainError(
            f"trigonometric seed is not a Bethe root: |grad| = {trig.grad_norm:.2e}")

    t0 = trig.point.to_t()
    nome0 = Nome(p=0.0)
    pt0 = EllipticPoint(t0, nome0)
    rep0 = make_report(pt0, xi, rs, idx)
    ev0 = None
    if eigenvalue_mode is not None:
        from .master import eigenvalue_elliptic
        ev0 = eigenvalue_elliptic(pt0, xi, rs, idx, mode=eigenvalue_mode)
    path = ContinuationPath(steps=[PathStep(0j, pt0, rep0, ev0)],
                            target_p=complex(target_p), first_step=first_step,
                            linear_steps=steps, min_step=min_step,
                            newton_tol=newton_tol)
    pending = _schedule(complex(target_p), first_step, steps)
    t_prev: Optional[np.ndarray] = None
    p_prev = 0j
    t_good = t0.astype(complex)
    p_good = 0j
    while pending:
        p_try = pending[0]
        if abs(p_try - p_good) < min_step:
            err = ConvergenceError(
                f"continuation stalled at p = {p_good} (step below "
                f"min_step = {min_step}); last good point retained in path")
            err.path = path
            raise err
        # linear predictor from the two previous accepted points
        if t_prev is not None and p_good != p_prev:
            t_seed = t_good + (t_good - t_prev) * ((p_try - p_good) / (p_good - p_prev))
        else:
            t_seed = t_good.copy()
        nome_try = Nome(p=p_try)
        try:
            t_new = newton_polish_tau(t_seed, xi, rs, idx, nome_try,
                                      tol=newton_tol)
            pt_new = EllipticPoint(t_new, nome_try)
            rep = make_report(pt_new, xi, rs, idx)
            if not rep.in_F:
                raise MembershipError("corrected point left F")
        except (ConvergenceError, MembershipError):
            pending.insert(0, p_good + (p_try - p_good) / 2.0)
            continue
        H, det = hessian_tau(pt_new, xi, rs, idx)
        scale = max(1.0, float(np.abs(np.diag(H)).prod()))
        if abs(det) <= HESS_DEGENERACY_TOL * scale:
            err = DegeneracyError(
                f"Hessian degenerated along the path at p = {p_try}: det = {det}")
            err.path = path
            raise err
        ev = None
        if eigenvalue_mode is not None:
            from .master import eigenvalue_elliptic
            ev = eigenvalue_elliptic(pt_new, xi, rs, idx, mode=eigenvalue_mode)
        path.steps.append(PathStep(p_try, pt_new, rep, ev))
        t_prev, p_prev = t_good, p_good
        t_good, p_good = t_new, p_try
        pending.pop(0)
    return path
