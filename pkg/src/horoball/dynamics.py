"""Iteration of self-maps, convergence-rate bounds and the interior/boundary
classification of their dynamics."""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import analysis, sampling
from .analysis import Check, RadialLimitError
from .ball import (
    GeometryError,
    check_ball_point,
    check_boundary_point,
    dhoro,
    norm_sq,
    rho,
)
from .maps import SelfMap, horosphere_certificate, sink_certificate
from .siegel import cayley_inv

EPS_FIX = 1e-11
EPS_SINK = 1e-8
EPS_RATE = 1e-7
EPS_BOUNDARY = 1e-10
DELTA_EH = 1e-3
N_MAX = 10_000


@dataclass
class IterationTrace:
    """Orbit ``z_0, F(z_0), ..., F^N(z_0)`` with per-step diagnostics.

    ``rho_steps[n]`` is ``rho(z_{n-1}, z_n)`` (zero for ``n = 0``) and
    ``d_to_tau`` is None unless a boundary point was supplied.
    """

    start: np.ndarray
    iterates: np.ndarray
    norms: np.ndarray
    rho_steps: np.ndarray
    d_to_tau: np.ndarray = None
    tau: np.ndarray = None
    stop_reason: str = "n_max"

    @property
    def steps(self):
        return len(self.iterates) - 1

    def to_csv(self, alpha=None):
        """CSV text with columns ``n, re_1, im_1, ..., re_d, im_d, norm,
        d_to_tau, rho_step, alpha_bound``; missing values are ``nan``."""
        dim = self.iterates.shape[1]
        header = ["n"]
        for i in range(1, dim + 1):
            header += [f"re_{i}", f"im_{i}"]
        header += ["norm", "d_to_tau", "rho_step", "alpha_bound"]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for n, z in enumerate(self.iterates):
            row = [str(n)]
            for c in z:
                row += [fmt(c.real), fmt(c.imag)]
            d = self.d_to_tau[n] if self.d_to_tau is not None else np.nan
            al = alpha[n] if alpha is not None else np.nan
            row += [fmt(self.norms[n]), fmt(d), fmt(self.rho_steps[n]), fmt(al)]
            writer.writerow(row)
        return buf.getvalue()


def fmt(x):
    return f"{float(x):.17g}"


def iterate(F: SelfMap, z0, n_max=N_MAX, tau=None, eps_fix=EPS_FIX, eps_sink=EPS_SINK):
    """Iterate ``F`` from ``z0``.

    Stops after ``n_max`` steps, when a step moves less than ``eps_fix``
    (stop_reason ``"fixed"``), when ``d(z_n, tau) <= eps_sink`` (``"sink"``)
    or when ``1 - ||z_n|| <= EPS_BOUNDARY`` (``"boundary"``), beyond which
    binary64 cannot resolve the orbit.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    z = check_ball_point(z0)
    if z.ndim != 1:
        raise GeometryError("iterate takes a single starting point")
    if tau is not None:
        tau = check_boundary_point(tau)
    orbit = [z]
    reason = "n_max"
    for _ in range(n_max):
        nxt = F(z)
        orbit.append(nxt)
        if np.linalg.norm(nxt - z) <= eps_fix:
            reason = "fixed"
            break
        z = nxt
        if tau is not None and dhoro(z, tau) <= eps_sink:
            reason = "sink"
            break
        if 1.0 - np.linalg.norm(z) <= EPS_BOUNDARY:
            reason = "boundary"
            break
    pts = np.array(orbit)
    steps = np.zeros(len(pts))
    if len(pts) > 1:
        steps[1:] = rho(pts[:-1], pts[1:])
    return IterationTrace(
        start=pts[0],
        iterates=pts,
        norms=np.linalg.norm(pts, axis=1),
        rho_steps=steps,
        d_to_tau=dhoro(pts, tau) if tau is not None else None,
        tau=tau,
        stop_reason=reason,
    )


def iterate_many(F: SelfMap, starts, n_max=N_MAX, eps_fix=EPS_FIX):
    """Advance a stack of starting points together.

    Returns ``(finals, settled)`` where ``settled`` means every orbit made a
    step shorter than ``eps_fix``.  Orbits that reach ``1 - EPS_BOUNDARY``
    are frozen there.
    """
    z = check_ball_point(np.atleast_2d(starts)).copy()
    active = np.ones(len(z), dtype=bool)
    done = np.zeros(len(z), dtype=bool)
    for _ in range(n_max):
        if not active.any():
            break
        nxt = F(z[active])
        step = np.linalg.norm(nxt - z[active], axis=1)
        idx = np.flatnonzero(active)
        z[idx] = nxt
        done[idx[step <= eps_fix]] = True
        active[idx[step <= eps_fix]] = False
        active[idx[1.0 - np.linalg.norm(nxt, axis=1) <= EPS_BOUNDARY]] = False
    return z, bool(done.all())


@dataclass(frozen=True)
class RateParams:
    """Inputs of the convergence-rate bound: radial derivative ``beta`` at the
    sink point, the limit ``k`` and the starting value ``d0 = d(z, tau)``."""

    beta: float
    k: float
    d0: float

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            raise ValueError("beta must lie in (0, 1]")
        if not self.k > 0:
            raise ValueError("k must be positive")
        if not self.d0 > 0:
            raise ValueError("d0 must be positive")


def rate_bound(p: RateParams, n):
    """Factor ``alpha`` with ``d(F^n z, tau) <= alpha * d(z, tau)``.

    Iterating ``1/d' >= (k/2 + 1/d) / beta`` gives

        beta = 1:  alpha = 2 / (2 + n k d0)
        beta < 1:  alpha = 2 (1-beta) beta^n / (2 (1-beta) + (1-beta^n) k d0)
    """
    n = np.asarray(n, dtype=float)
    if p.beta == 1.0:
        return 2.0 / (2.0 + n * p.k * p.d0)
    bn = p.beta**n
    return 2.0 * (1.0 - p.beta) * bn / (2.0 * (1.0 - p.beta) + (1.0 - bn) * p.k * p.d0)


@dataclass
class RateReport:
    ratios: np.ndarray
    alpha: np.ndarray
    worst_slack: float
    passed: bool

    def __post_init__(self):
        self.passed = bool(self.passed)

    def __bool__(self):
        return self.passed


def verify_rate(trace: IterationTrace, p: RateParams, tol=EPS_RATE):
    """Compare ``d_to_tau[n]`` with ``alpha(n) * d0`` along a trace.

    ``tol`` is relative to ``d0``.
    """
    if trace.d_to_tau is None:
        raise ValueError("trace was recorded without tau")
    n = np.arange(len(trace.d_to_tau))
    alpha = rate_bound(p, n)
    bound = alpha * p.d0
    ratios = trace.d_to_tau / bound
    slack = (bound - trace.d_to_tau) / p.d0
    worst = float(np.min(slack))
    return RateReport(ratios, alpha, worst, worst >= -tol)


def rate_params_for(trace: IterationTrace, beta, k):
    return RateParams(beta=beta, k=k, d0=float(trace.d_to_tau[0]))


def step_inequality_check(F: SelfMap, z, tau, beta, k, tol=EPS_RATE):
    """``1/d(F(z),tau) >= (k/2 + 1/d(z,tau)) / beta`` on a stack of points.

    Slack is measured relative to the right-hand side.
    """
    tau = check_boundary_point(tau)
    lhs = 1.0 / dhoro(F(z), tau)
    rhs = (0.5 * k + 1.0 / dhoro(z, tau)) / beta
    slack = (lhs - rhs) / rhs
    worst = float(np.min(slack))
    return Check(worst >= -tol, worst)


def julia_check(F: SelfMap, z, eta, L, tol=EPS_RATE):
    """``d(F(z), eta) <= L d(z, eta)``, slack relative to the right side."""
    eta = check_boundary_point(eta)
    rhs = L * dhoro(z, eta)
    slack = (rhs - dhoro(F(z), eta)) / rhs
    worst = float(np.min(slack))
    return Check(worst >= -tol, worst)


def sample_horosphere(rng, tau, level, count, spread=4.0):
    """Random points with ``d(z, tau) < level``.

    Built in Siegel coordinates: heights ``S > 1/level`` (log-uniform over
    ``spread`` decades), random imaginary axial part and transverse
    component, mapped back by the inverse Cayley transform.
    """
    tau = check_boundary_point(tau)
    n = tau.shape[0]
    s = (1.0 / level) * 10 ** rng.uniform(1e-9, spread, size=count)
    q = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    q -= np.sum(q * tau.conj(), axis=1)[:, None] * tau
    q *= rng.uniform(0, 3, size=count)[:, None]
    lam = s + norm_sq(q) + 1j * rng.normal(scale=3.0, size=count)
    x = lam[:, None] * tau + q
    z = cayley_inv(x, tau)
    keep = (np.linalg.norm(z, axis=1) < 1 - 1e-11) & (dhoro_safe(z, tau) < level)
    return z[keep]


def dhoro_safe(z, tau):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.abs(1.0 - z @ tau.conj()) ** 2 / (1.0 - norm_sq(z))


def sink_invariance_check(F: SelfMap, tau, levels, rng, count=1000, tol=EPS_RATE):
    """Each horosphere ``E(tau, k)`` in ``levels`` is mapped into itself.

    Violations beyond ``tol * k`` fail; ``details`` keeps the worst witness
    per level.
    """
    tau = check_boundary_point(tau)
    worst = np.inf
    details = {}
    ok = True
    for level in levels:
        z = sample_horosphere(rng, tau, level, count)
        dz = dhoro(F(z), tau)
        slack = (level - dz) / level
        i = int(np.argmin(slack))
        details[float(level)] = {"slack": float(slack[i]), "witness": z[i]}
        worst = min(worst, float(slack[i]))
        ok = ok and slack[i] >= -tol
    return Check(ok, worst, "" if ok else "horosphere not invariant", details)


def midpoint_inequality_check(F: SelfMap, z, tau, tol=EPS_RATE):
    """``d(F(z), tau) <= d((z + F(z))/2, tau)``, slack relative to the right side."""
    tau = check_boundary_point(tau)
    fz = F(z)
    rhs = dhoro(0.5 * (z + fz), tau)
    slack = (rhs - dhoro(fz, tau)) / rhs
    worst = float(np.min(slack))
    return Check(worst >= -tol, worst)


def boundary_uniqueness_check(F: SelfMap, tau, m, candidates):
    """Only ``tau`` among ``candidates`` (plus ``tau`` itself) may be a
    boundary regular fixed point of a map with ``d(F(.), tau) < m``.

    Returns a Check whose ``details`` map each candidate index to whether it
    is a boundary regular fixed point; index ``-1`` is ``tau``.
    """
    if not m > 0:
        raise ValueError("m must be positive")
    tau = check_boundary_point(tau)
    details = {-1: analysis.is_boundary_regular_fixed_point(F, tau)}
    ok = details[-1]
    for i, eta in enumerate(np.atleast_2d(candidates)):
        eta = check_boundary_point(eta)
        if np.linalg.norm(eta - tau) <= 1e-9:
            continue
        details[i] = analysis.is_boundary_regular_fixed_point(F, eta)
        ok = ok and not details[i]
    return Check(ok, 0.0, "" if ok else "unexpected boundary regular fixed point", details)


# --- classification -------------------------------------------------------


@dataclass(frozen=True)
class InteriorFixedPoint:
    zeta: np.ndarray
    spectrum: analysis.SpectrumSummary
    starts_agreement: float
    earle_hamilton: bool
    contraction_q: float = None
    outcome = "interior"


@dataclass(frozen=True)
class SinkConvergence:
    tau: np.ndarray
    beta: float
    k: float
    m: float
    m_certified: bool
    outcome = "sink"


@dataclass(frozen=True)
class Undetermined:
    diagnostic: str
    outcome = "undetermined"


@dataclass
class ClassifyConfig:
    """Settings for :func:`classify`.

    Given ``starts`` are padded with seeded random points up to ``n_starts``.
    """

    starts: np.ndarray = None
    n_max: int = N_MAX
    tau: np.ndarray = None
    m: float = None
    seed: int = 0
    n_starts: int = 8
    boundary_samples: int = 1000
    delta_eh: float = DELTA_EH
    eps_fix: float = EPS_FIX
    sink_radius: float = 1e-2
    extra: dict = field(default_factory=dict)


def _map_dim(F, config):
    if F.dim is not None:
        return F.dim
    for v in (config.starts, config.tau):
        if v is not None:
            return np.atleast_2d(v).shape[-1]
    raise ValueError("cannot infer the dimension of the map")


PROFILE_STEPS = 1000


def inverse_distance_growth(F: SelfMap, starts, tau, n_steps, sink_radius):
    """Per orbit, the rise of ``1/d(z_n, tau)`` over the last quarter of
    ``n_steps`` divided by its rise over the first quarter.

    Returns None if ``1/d`` fails to increase strictly at some step or an
    orbit reaches the sphere away from ``tau``.  Orbits that come within
    ``sink_radius`` of ``tau`` stop being tracked and count as growing.
    """
    z = check_ball_point(np.atleast_2d(starts)).copy()
    inv = np.full((n_steps + 1, len(z)), np.nan)
    inv[0] = 1.0 / dhoro(z, tau)
    live = np.ones(len(z), dtype=bool)
    for n in range(1, n_steps + 1):
        if not live.any():
            break
        z[live] = F(z[live])
        inv[n, live] = 1.0 / dhoro(z[live], tau)
        if np.any(inv[n, live] <= inv[n - 1, live]):
            return None
        edge = live & (1.0 - np.linalg.norm(z, axis=1) <= sink_radius)
        if np.any(np.abs(1.0 - z[edge] @ tau.conj()) > sink_radius):
            return None
        live &= ~edge
    q = max(1, n_steps // 4)
    ratios = np.ones(len(z))
    for j in np.flatnonzero(live):
        first = inv[q, j] - inv[0, j]
        last = inv[n_steps, j] - inv[n_steps - q, j]
        ratios[j] = last / first
    return ratios


def contraction_factor(F: SelfMap, points):
    """Largest observed ``rho(F z, F w) / rho(z, w)`` over consecutive pairs."""
    z, w = points[:-1], points[1:]
    r0 = rho(z, w)
    keep = r0 > 1e-8
    return float(np.max(rho(F(z[keep]), F(w[keep])) / r0[keep]))


def classify(F: SelfMap, config: ClassifyConfig = None):
    """Sort the dynamics of ``F`` into an interior fixed point, convergence
    to a boundary sink point, or Undetermined.

    An image bounded away from the sphere (sampled ``sup ||F(z)||`` below
    ``1 - delta_eh``) is treated as a strict contraction and iterated to its
    unique fixed point.  Otherwise every start is iterated: agreeing
    interior limits give an interior fixed point, orbits running to the
    sphere near a common direction give a sink point with measured radial
    derivative and ``k``.  Sink convergence is numerical evidence, not a
    proof that ``F`` has no interior fixed point.
    """
    config = config or ClassifyConfig()
    rng = np.random.default_rng(config.seed)
    dim = _map_dim(F, config)
    given = np.empty((0, dim), dtype=complex) if config.starts is None else np.atleast_2d(config.starts)
    pad = max(0, config.n_starts - len(given))
    starts = check_ball_point(np.vstack([given, sampling.ball_points(rng, dim, pad)]))

    cert = sink_certificate(F)
    tau = config.tau if config.tau is not None else (cert.tau if cert is not None else None)
    # random directions rarely come near the one boundary point an image
    # may touch, so a candidate tau is always probed
    probe = analysis.boundary_directions(rng, dim, config.boundary_samples, tau) * (1.0 - 1e-6)
    n_edge = len(probe)
    probe = np.vstack([probe, sampling.ball_points(rng, dim, config.boundary_samples)])
    image_radius = float(np.max(np.linalg.norm(F(probe), axis=1)))
    strictly_inside = image_radius <= 1.0 - config.delta_eh

    finals, settled = iterate_many(F, starts, config.n_max, config.eps_fix)
    norms = np.linalg.norm(finals, axis=1)

    if settled and np.max(norms) < 1.0 - config.sink_radius:
        spread = float(np.max(np.linalg.norm(finals - finals[0], axis=1)))
        if spread <= 10 * config.eps_fix:
            zeta = finals[0]
            spectrum = analysis.spectrum_summary(analysis.jacobian(F, zeta))
            q = contraction_factor(F, probe[n_edge:]) if strictly_inside else None
            return InteriorFixedPoint(zeta, spectrum, spread, strictly_inside, q)
        return Undetermined(f"interior limits disagree (spread {spread:.3e})")
    if np.min(norms) >= 1.0 - config.sink_radius:
        directions = finals / norms[:, None]
        if tau is None:
            tau = directions[0]
        tau = check_boundary_point(tau)
        gap = float(np.max(np.abs(1.0 - finals @ tau.conj())))
        if gap > config.sink_radius:
            return Undetermined(f"orbits approach the sphere away from tau (|1 - <z_n, tau>| up to {gap:.3e})")
    elif tau is not None:
        # slow (parabolic) approach: 1/d(z_n, tau) must rise on every orbit
        # without levelling off, as it would near an interior limit
        tau = check_boundary_point(tau)
        growth = inverse_distance_growth(F, starts, tau, min(config.n_max, PROFILE_STEPS), config.sink_radius)
        if growth is None or np.min(growth) < 0.25:
            return Undetermined(
                f"orbits neither settle nor approach the sphere (min final norm {np.min(norms):.6f})"
            )
    else:
        return Undetermined(
            f"orbits neither settle nor approach the sphere (min final norm {np.min(norms):.6f})"
        )
    try:
        beta = analysis.radial_derivative(F, tau)
    except RadialLimitError as exc:
        return Undetermined(f"orbits approach {tau} but radial derivative failed: {exc}")
    m = config.m if config.m is not None else horosphere_certificate(F, tau)
    certified = m is not None
    if m is None:
        hb = analysis.horosphere_bound(
            F, tau, probe, analysis.boundary_directions(rng, dim, 16, tau)
        )
        if hb.diverged:
            return Undetermined("no horosphere bound: d(F(z), tau) grows toward the boundary")
        m = hb.value
    try:
        k = analysis.k_limit(F, starts[0], tau, m)
    except (RadialLimitError, GeometryError) as exc:
        return Undetermined(f"k limit failed: {exc}")
    return SinkConvergence(tau, beta, float(k), float(m), certified)


def classification_to_dict(c):
    def vec(v):
        return [[float(x.real), float(x.imag)] for x in v]

    if isinstance(c, InteriorFixedPoint):
        return {
            "outcome": c.outcome,
            "zeta": vec(c.zeta),
            "spectral_radius": c.spectrum.spectral_radius,
            "operator_norm": c.spectrum.operator_norm,
            "starts_agreement": c.starts_agreement,
            "earle_hamilton": c.earle_hamilton,
        }
    if isinstance(c, SinkConvergence):
        return {
            "outcome": c.outcome,
            "tau": vec(c.tau),
            "beta": c.beta,
            "k": c.k,
            "m": c.m,
            "m_certified": c.m_certified,
        }
    return {"outcome": c.outcome, "diagnostic": c.diagnostic}
