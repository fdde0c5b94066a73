"""Boundary and interior analysis of self-maps: radial limits, horosphere
bounds, the b/c/p coefficients of strong nonexpansivity, Jacobians and
spectral radii.
"""

from dataclasses import dataclass, field

import numpy as np

from .ball import (
    EPS_ID,
    GeometryError,
    check_ball_point,
    check_boundary_point,
    dhoro,
    norm_sq,
    sigma,
)
from .maps import SelfMap
from .siegel import cayley, s_height, t_form

ETA_RAD = 1e-6
ETA_K = 1e-3
EPS_BFP = 1e-6
EPS_JAC = 1e-6
R_EXPONENTS = range(3, 37)


class RadialLimitError(ArithmeticError):
    """A radial limit failed to converge or two routes to it disagreed."""


def radial_schedule():
    """Radii ``r_j = 1 - 2**-j`` for ``j = 3..36``."""
    return np.array([1.0 - 2.0**-j for j in R_EXPONENTS])


def _radial_values(F, tau, func):
    """Yield ``(1 - r, func(F(r tau)))`` along the schedule, stopping at the
    first radius where ``F`` cannot be evaluated."""
    for r in radial_schedule():
        try:
            w = F(r * tau)
        except GeometryError:
            return
        yield 1.0 - r, func(w)


def richardson_limit(pairs, eta=ETA_RAD, max_order=8):
    """Limit as ``h -> 0`` of ``q(h) = q0 + q1*h + q2*h^2 + ...``.

    ``pairs`` yields ``(h, q(h))`` with ``h`` halving each step.  A
    Richardson table eliminating powers of ``h`` up to ``max_order`` is
    built row by row; iteration stops once successive diagonal entries agree
    to near machine precision or start diverging from roundoff.  The
    estimate with the smallest successive change is returned, provided that
    change is within ``eta`` relative; otherwise ``RadialLimitError``.
    """
    prev_row = None
    prev_diag = best = None
    best_err = np.inf
    for _, q in pairs:
        row = [q]
        if prev_row is not None:
            for i in range(1, min(len(prev_row), max_order) + 1):
                row.append(row[i - 1] + (row[i - 1] - prev_row[i - 1]) / (2.0**i - 1.0))
        diag = row[-1]
        if prev_diag is not None:
            err = abs(diag - prev_diag)
            if err < best_err:
                best, best_err = diag, err
            scale = max(abs(diag), 1e-300)
            if err <= 1e-14 * scale or (best_err < eta * scale and err > 1e3 * best_err):
                break
        prev_row, prev_diag = row, diag
    if best is None or not np.isfinite(best_err) or best_err > eta * max(abs(best), 1e-300):
        raise RadialLimitError("extrapolation did not converge along the radial schedule")
    return best


def radial_fixed_point_check(F: SelfMap, tau):
    """Tail supremum of ``||F(r tau) - tau||`` along the radial schedule.

    ``tau`` counts as a boundary fixed point when this is below ``EPS_BFP``.
    """
    tau = check_boundary_point(tau)
    dist = [float(np.linalg.norm(v - tau)) for _, v in _radial_values(F, tau, lambda w: w)]
    if not dist:
        raise RadialLimitError("map could not be evaluated along the radius")
    tail = dist[-max(1, len(dist) // 4):]
    return max(tail)


def _quotients(F, tau, func):
    for h, v in _radial_values(F, tau, func):
        yield h, v / h


def radial_derivative_routes(F: SelfMap, tau, eta=ETA_RAD):
    """Extrapolated ``(1 - <F(r tau),tau>)/(1-r)`` (complex) and
    ``(1 - ||F(r tau)||)/(1-r)``."""
    tau = check_boundary_point(tau)
    direct = richardson_limit(_quotients(F, tau, lambda w: 1.0 - np.vdot(tau, w)), eta)
    normal = richardson_limit(_quotients(F, tau, lambda w: 1.0 - np.linalg.norm(w)), eta)
    return direct, normal


def radial_derivative(F: SelfMap, tau, eta=ETA_RAD, check_fixed=True):
    """Radial derivative at a boundary fixed point ``tau``.

    Extrapolates ``(1 - <F(r tau), tau>)/(1 - r)`` and cross-checks it
    against ``(1 - ||F(r tau)||)/(1 - r)``; raises ``RadialLimitError`` when
    either fails to converge or the two disagree by more than ``eta``
    (relative).
    """
    tau = check_boundary_point(tau)
    if check_fixed:
        gap = radial_fixed_point_check(F, tau)
        if gap > EPS_BFP:
            raise RadialLimitError(f"tau is not a boundary fixed point (gap {gap:.3e})")
    direct, normal = radial_derivative_routes(F, tau, eta)
    beta = direct.real
    if abs(direct.imag) > eta * max(abs(beta), 1.0):
        raise RadialLimitError(f"radial quotient has imaginary limit {direct.imag:.3e}")
    if beta <= 0 or abs(beta - normal) > eta * abs(beta):
        raise RadialLimitError(f"radial derivative routes disagree: {beta!r} vs {normal!r}")
    return float(beta)


def is_boundary_regular_fixed_point(F: SelfMap, tau):
    try:
        radial_derivative(F, tau)
    except RadialLimitError:
        return False
    return True


@dataclass(frozen=True)
class HorosphereBound:
    value: float
    diverged: bool


def boundary_directions(rng, dim, count, tau=None):
    """Random unit vectors, with ``tau`` and ``-tau`` first when given."""
    v = rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))
    v /= np.linalg.norm(v, axis=1)[:, None]
    if tau is not None:
        v = np.vstack([tau, -tau, v])
    return v


def horosphere_bound(F: SelfMap, tau, samples, directions=None, growth_slope=0.25):
    """Sampled ``sup d(F(z), tau)``.

    ``samples`` is a stack of interior points.  Each of ``directions`` is
    additionally probed along the radial schedule; when ``log d`` grows with
    slope above ``growth_slope`` in ``log(1/(1-r))`` over the last radii the
    bound is flagged as divergent.
    """
    tau = check_boundary_point(tau)
    samples = check_ball_point(samples)
    best = float(np.max(dhoro(F(samples), tau))) if samples.size else 0.0
    diverged = False
    if directions is not None:
        radii = radial_schedule()
        for u in np.atleast_2d(directions):
            hs, ds = [], []
            for r in radii:
                try:
                    d = float(dhoro(F(r * u), tau))
                except GeometryError:
                    break
                hs.append(1.0 - r)
                ds.append(d)
            if not ds:
                continue
            best = max(best, max(ds))
            if len(ds) >= 8:
                slope = np.polyfit(-np.log(hs[-8:]), np.log(ds[-8:]), 1)[0]
                diverged = diverged or slope > growth_slope
    return HorosphereBound(best, diverged)


def bcp_coefficients(F: SelfMap, z, w, tau, m):
    """Coefficients ``(b, c, p)`` of the strong nonexpansivity inequality.

    With ``a = 1/m``, ``x = C(F(z))`` and ``y = C(F(w))``::

        b = 4a (S(x) + S(y) - a) / |T(x,y)|^2
        c = 4a (Re T(x,y) - a) / |T(x,y)|^2
        p = (b - sigma(z,w) c) / (1 - sigma(z,w))

    ``m`` must bound ``d(F(.), tau)`` on the ball and ``z != w``.
    """
    if not m > 0:
        raise GeometryError("horosphere bound m must be positive")
    tau = check_boundary_point(tau)
    z, w = check_ball_point(z), check_ball_point(w)
    a = 1.0 / m
    x, y = cayley(F(z), tau), cayley(F(w), tau)
    t = t_form(x, y, tau)
    t2 = np.abs(t) ** 2
    if np.any(t2 < 1e-28):
        raise GeometryError("T(C(F(z)), C(F(w))) vanishes")
    b = 4.0 * a * (s_height(x, tau) + s_height(y, tau) - a) / t2
    c = 4.0 * a * (t.real - a) / t2
    s = sigma(z, w)
    if np.any(1.0 - s <= 0):
        raise GeometryError("p_F is undefined on the diagonal z = w")
    p = (b - s * c) / (1.0 - s)
    return b, c, p


def k_limit(F: SelfMap, z, tau, m, eta=ETA_RAD):
    """``lim_{r->1} p_F(z, r tau) / (1 - r)``, extrapolated along the radial schedule."""
    tau = check_boundary_point(tau)
    z = check_ball_point(z)
    if z.ndim != 1:
        raise GeometryError("k_limit takes a single point")

    def pairs():
        for r in radial_schedule():
            try:
                _, _, p = bcp_coefficients(F, z, r * tau, tau, m)
            except GeometryError:
                return
            yield 1.0 - r, float(p) / (1.0 - r)

    return richardson_limit(pairs(), eta)


@dataclass
class Check:
    """Outcome of an inequality sweep; truthy when it passed.

    ``worst_slack`` is the minimum of (right side - left side) over the
    sweep, so negative values beyond the tolerance are violations.
    """

    passed: bool
    worst_slack: float
    message: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.passed)

    def __bool__(self):
        return self.passed


def strong_nonexpansivity_check(F: SelfMap, z, w, tau, m, tol=EPS_ID):
    """Check ``sigma(Fz,Fw) >= (1-p) sigma(z,w) + p`` and
    ``sigma(z,w) <= sigma(Fz,Fw) <= b/c``, plus ``0 < b <= c < 1`` and ``0 <= p <= 1``."""
    b, c, p = bcp_coefficients(F, z, w, tau, m)
    s = sigma(z, w)
    sf = sigma(F(z), F(w))
    slacks = {
        "b_positive": np.min(b),
        "b_le_c": np.min(c - b),
        "c_lt_1": np.min(1.0 - c),
        "p_ge_0": np.min(p),
        "p_le_1": np.min(1.0 - p),
        "schwarz_pick": np.min(sf - s),
        "upper_b_over_c": np.min(b / c - sf),
        "strong": np.min(sf - ((1.0 - p) * s + p)),
    }
    strict = {"b_positive": np.all(b > 0), "c_lt_1": np.all(c < 1)}
    bad = [k for k, v in slacks.items() if v < -tol] + [k for k, ok in strict.items() if not ok]
    worst = float(min(slacks.values()))
    return Check(not bad, worst, "violated: " + ", ".join(bad) if bad else "", {k: float(v) for k, v in slacks.items()})


def jacobian(F: SelfMap, zeta, step=None):
    """Complex Jacobian of a holomorphic ``F`` at ``zeta``.

    Central differences along each real and imaginary coordinate direction,
    averaged (``dF/dz_j = D_re`` and ``= -i D_im`` for holomorphic maps),
    with one Richardson step from ``h`` to ``h/2``.
    """
    zeta = check_ball_point(zeta)
    n = zeta.shape[0]
    h = 1e-5 * max(1.0, float(np.linalg.norm(zeta))) if step is None else step
    if np.linalg.norm(zeta) + h > 1.0:
        raise GeometryError("Jacobian step reaches the boundary")

    def central(hh):
        basis = np.eye(n, dtype=complex)
        pts = np.concatenate([zeta + hh * basis, zeta - hh * basis,
                              zeta + 1j * hh * basis, zeta - 1j * hh * basis])
        vals = F(pts)
        d_re = (vals[:n] - vals[n:2 * n]) / (2 * hh)
        d_im = (vals[2 * n:3 * n] - vals[3 * n:]) / (2 * hh)
        return (0.5 * (d_re - 1j * d_im)).T

    j1, j2 = central(h), central(h / 2)
    return (4.0 * j2 - j1) / 3.0


@dataclass(frozen=True)
class SpectrumSummary:
    jacobian: np.ndarray
    spectral_radius: float
    contraction_margin: float
    operator_norm: float
    converged: bool


def operator_norm(A, tol=1e-13, max_iter=10_000, seed=0):
    """Largest singular value by power iteration on ``A* A``."""
    A = np.asarray(A, dtype=complex)
    G = A.conj().T @ A
    rng = np.random.default_rng(seed)
    v = rng.normal(size=A.shape[1]) + 1j * rng.normal(size=A.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        u = G @ v
        nu = np.linalg.norm(u)
        if nu == 0:
            return 0.0
        new = float(np.vdot(v, u).real)
        v = u / nu
        if abs(new - lam) <= tol * max(new, 1e-300):
            lam = new
            break
        lam = new
    return float(np.sqrt(max(lam, 0.0)))


def spectral_radius(A, tol=1e-12, max_squarings=64):
    """``lim ||A^(2^k)||^(1/2^k)`` by repeated squaring with rescaling.

    Returns ``(radius, converged)``; when the sequence has not settled the
    last estimate is still an upper bound on the radius.
    """
    A = np.asarray(A, dtype=complex)
    X = A.copy()
    log_scale = 0.0
    estimate = np.linalg.norm(A, 2)
    for k in range(1, max_squarings + 1):
        nx = np.linalg.norm(X, 2)
        if nx == 0:
            return 0.0, True
        X = X / nx
        log_scale = 2.0 * (log_scale + np.log(nx))
        X = X @ X
        nx2 = np.linalg.norm(X, 2)
        if nx2 == 0:
            return 0.0, True
        new = float(np.exp((log_scale + np.log(nx2)) / 2.0**k))
        if abs(new - estimate) <= tol * max(new, 1e-300):
            return new, True
        estimate = new
    return float(estimate), False


def spectrum_summary(A):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise GeometryError("spectrum_summary needs a square matrix")
    radius, ok = spectral_radius(A)
    return SpectrumSummary(
        jacobian=A,
        spectral_radius=radius,
        contraction_margin=1.0 - radius,
        operator_norm=operator_norm(A),
        converged=ok,
    )
