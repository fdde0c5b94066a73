"""Seeded invariant suites behind ``horoball verify``.

Each invariant reduces to a residual array where values above the
tolerance count as failures: absolute errors for identities, negated
slack for inequalities.  Reports contain no timings so that a fixed seed
gives byte-identical output.
"""

from dataclasses import dataclass

import numpy as np

from . import analysis, dynamics, sampling
from .ball import (
    EPS_ID,
    dhoro,
    inner,
    mobius,
    norm_sq,
    rho,
    rho_from_sigma,
    sigma,
)
from .maps import MobiusAuto, SiegelAffine, sink_certificate
from .siegel import (
    cayley,
    cayley_inv,
    horoshift,
    s_height,
    s_height_expanded,
    sigma_via_siegel,
    t_form,
    t_form_expanded,
)

SUITES = ("geometry", "siegel", "nonexpansive", "rates")
N_IDENTITY = 10_000
N_PAIRS = 1000
GRID_B = (1.0, 2.0, 4.0)
GRID_A = (0.25, 1.0, 2.0)
EPS_ROUNDTRIP = 1e-10
EPS_K = 1e-3
SINK_LEVELS = (0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class InvariantResult:
    suite: str
    name: str
    dim: int
    samples: int
    failures: int
    worst: float
    tol: float

    @property
    def passed(self):
        return self.failures == 0


def _result(suite, name, dim, residual, tol):
    r = np.atleast_1d(np.asarray(residual, dtype=float))
    bad = ~np.isfinite(r) | (r > tol)
    return InvariantResult(suite, name, dim, r.size, int(bad.sum()), float(np.nanmax(r)), tol)


def _rng(seed, suite, dim):
    return np.random.default_rng([seed, SUITES.index(suite), dim])


def siegel_grid(tau):
    return [SiegelAffine(B, a, tau) for B in GRID_B for a in GRID_A]


# --- geometry -------------------------------------------------------------


def geometry_suite(seed, dim):
    rng = _rng(seed, "geometry", dim)
    z, w, u, a = (sampling.ball_points(rng, dim, N_IDENTITY) for _ in range(4))
    s = sigma(z, w)
    out = []
    add = lambda name, res, tol=EPS_ID: out.append(_result("geometry", name, dim, res, tol))
    add("sigma in (0,1]", np.maximum(-s, s - 1.0))
    add("sigma(z,z) = 1", np.abs(sigma(z, z) - 1.0))
    add("tanh^2 rho = 1 - sigma", np.abs(np.tanh(rho(z, w)) ** 2 - (1.0 - s)))
    add("sigma = 1 - |m_-z(w)|^2", np.abs(s - (1.0 - norm_sq(mobius(-z, w)))))
    add("rho closed forms agree", np.abs(rho(z, w) - rho_from_sigma(z, w)))
    add("rho symmetric", np.abs(rho(z, w) - rho(w, z)))
    add("rho triangle inequality", rho(z, u) - rho(z, w) - rho(w, u))
    add("Mobius isometry", np.abs(rho(mobius(a, z), mobius(a, w)) - rho(z, w)))
    add("m_a(0) = a", np.linalg.norm(mobius(a, np.zeros_like(a)) - a, axis=1))
    add("m_-z(z) = 0", np.linalg.norm(mobius(-z, z), axis=1))
    add("d(0, w) = 1", np.abs(dhoro(np.zeros_like(w), w) - 1.0))
    add("d(z, z) = 1 - |z|^2", np.abs(dhoro(z, z) - (1.0 - norm_sq(z))))
    # d is not symmetric: at least one sampled pair must witness it
    asym = np.abs(dhoro(z, w) - dhoro(w, z))
    add("d asymmetric (witness)", [0.0 if asym.max() > 1e-3 else 1.0], 0.5)
    return out


# --- siegel ---------------------------------------------------------------


def siegel_suite(seed, dim):
    rng = _rng(seed, "siegel", dim)
    tau = sampling.boundary_point(rng, dim)
    z, w = (sampling.ball_points(rng, dim, N_IDENTITY) for _ in range(2))
    x, y = cayley(z, tau), cayley(w, tau)
    shift = rng.uniform(0.0, 5.0, size=N_IDENTITY)
    out = []
    add = lambda name, res, tol=EPS_ID: out.append(_result("siegel", name, dim, res, tol))
    add("S(C(z)) d(z,tau) = 1", np.abs(s_height(x, tau) * dhoro(z, tau) - 1.0))
    add("S stable = S expanded", np.abs(s_height(x, tau) - s_height_expanded(x, tau)) / (1 + norm_sq(x)))
    add("shift: S(x + a tau) = S(x) + a", np.abs(s_height(horoshift(x, shift, tau), tau) - s_height(x, tau) - shift))
    add(
        "T(x-a tau, y-a tau) = T(x,y) - 2a",
        np.abs(t_form(x - shift[:, None] * tau, y - shift[:, None] * tau, tau) - t_form(x, y, tau) + 2 * shift),
    )
    add("sigma via Siegel = sigma", np.abs(sigma_via_siegel(x, y, tau) - sigma(z, w)))
    add("T(x,x) = 2 S(x)", np.abs(t_form_expanded(x, x, tau) - 2 * s_height(x, tau)) / (1 + norm_sq(x)))
    add("T stable = T expanded", np.abs(t_form(x, y, tau) - t_form_expanded(x, y, tau)) / (1 + norm_sq(x) + norm_sq(y)))
    add("C^-1(C(z)) = z", np.linalg.norm(cayley_inv(x, tau) - z, axis=1), EPS_ROUNDTRIP)
    xs = sampling.siegel_points(rng, tau, N_IDENTITY)
    add(
        "C(C^-1(x)) = x",
        np.linalg.norm(cayley(cayley_inv(xs, tau), tau) - xs, axis=1) / (1 + np.linalg.norm(xs, axis=1)),
        EPS_ROUNDTRIP,
    )
    add("C maps into Siegel domain", -s_height(x, tau), 0.0)
    add("horoshift stays in Siegel domain", -s_height(horoshift(xs, shift + 1e-3, tau), tau), 0.0)
    # inequalities over arbitrary vectors of C^n
    gx = sampling.complex_normal(rng, (N_IDENTITY, dim))
    gy = sampling.complex_normal(rng, (N_IDENTITY, dim))
    add("Re T(x,y) >= S(x) + S(y)", s_height(gx, tau) + s_height(gy, tau) - t_form(gx, gy, tau).real)
    diff = gx - gy
    add("|x-y|^2 >= |<x-y,tau>|^2", np.abs(inner(diff, tau)) ** 2 - norm_sq(diff))
    a = rng.uniform(0, 1, size=N_IDENTITY) * np.minimum(s_height(x, tau), s_height(y, tau))
    t = t_form(x, y, tau)
    lhs = np.abs(t) ** 2 - 4 * a * t.real + 4 * a**2
    rhs = (s_height(x, tau) + s_height(y, tau) - 2 * a) ** 2
    add("|T-2a|^2 >= (S(x)+S(y)-2a)^2", (rhs - lhs) / (1 + np.abs(lhs)))
    return out


# --- nonexpansive ---------------------------------------------------------


def nonexpansive_suite(seed, dim):
    rng = _rng(seed, "nonexpansive", dim)
    out = []
    add = lambda name, res, tol=EPS_ID: out.append(_result("nonexpansive", name, dim, res, tol))

    worst = []
    for i in range(N_PAIRS):
        F = sampling.selfmap(rng, dim, kind=sampling.VARIANTS[i % len(sampling.VARIANTS)])
        z, w = sampling.ball_points(rng, dim, 2)
        worst.append(sigma(z, w) - sigma(F(z), F(w)))
    add("Schwarz-Pick over all variants", worst)

    tau = sampling.boundary_point(rng, dim)
    z = sampling.ball_points(rng, dim, N_PAIRS)
    w = sampling.ball_points(rng, dim, N_PAIRS)
    edge = sampling.sphere_points(rng, dim, N_PAIRS, 1.0 - 1e-6)
    probes = analysis.boundary_directions(rng, dim, 8, tau)
    for F in siegel_grid(tau):
        label = f"B={F.B:g},a={F.a:g}"
        hb = analysis.horosphere_bound(F, tau, np.vstack([z, edge]), probes)
        add(f"horosphere bound sup d(F,tau) <= 1/a [{label}]", [hb.value - 1.0 / F.a])
        sx = s_height(cayley(z, tau), tau)
        sf = s_height(cayley(F(z), tau), tau)
        add(f"S(C(F z)) = B S(C z) + a [{label}]", np.abs(sf - (F.B * sx + F.a)) / (1 + np.abs(sf)))
        chk = analysis.strong_nonexpansivity_check(F, z, w, tau, 1.0 / F.a)
        b, c, p = analysis.bcp_coefficients(F, z, w, tau, 1.0 / F.a)
        add(f"0 < b <= c < 1 [{label}]", np.maximum.reduce([-b, b - c, c - 1.0]), 0.0)
        add(f"strong nonexpansivity chain [{label}]", [-chk.worst_slack])
        add(f"p in [0,1] [{label}]", np.maximum(-p, p - 1.0))

        cert = sink_certificate(F)
        beta = analysis.radial_derivative(F, tau)
        direct, normal = analysis.radial_derivative_routes(F, tau)
        add(f"radial derivative = 1/B [{label}]", [abs(beta - 1.0 / F.B)], 1e-6)
        add(f"radial limit routes agree [{label}]", [abs(direct.real - normal) / abs(normal)], 1e-6)
        k1 = analysis.k_limit(F, z[0], tau, cert.m)
        k2 = analysis.k_limit(F, z[1], tau, cert.m)
        add(f"k = 2 beta / m [{label}]", [abs(k1 - 2 * beta / cert.m) / k1], EPS_K)
        add(f"k independent of z [{label}]", [abs(k1 - k2) / k1], EPS_K)
        add(f"m >= 2 beta / k [{label}]", [2 * beta / k1 - cert.m])

    if dim == 1:
        c = 0.5
        auto = MobiusAuto(np.array([c]))
        beta = analysis.radial_derivative(auto, np.array([1.0]))
        add("radial derivative of 1-D automorphism", [abs(beta - (1 - c) / (1 + c))], 1e-6)
    return out


# --- rates ----------------------------------------------------------------


def rates_suite(seed, dim, n_steps=200):
    rng = _rng(seed, "rates", dim)
    out = []
    add = lambda name, res, tol=dynamics.EPS_RATE: out.append(_result("rates", name, dim, res, tol))
    tau = sampling.boundary_point(rng, dim)
    z = sampling.ball_points(rng, dim, N_PAIRS)
    starts = sampling.ball_points(rng, dim, 4)
    for F in siegel_grid(tau):
        label = f"B={F.B:g},a={F.a:g}"
        cert = sink_certificate(F)
        chk = dynamics.step_inequality_check(F, z, tau, cert.beta, cert.k)
        add(f"one-step inequality [{label}]", [-chk.worst_slack])
        add(f"Julia inequality L=1/B [{label}]", [-dynamics.julia_check(F, z, tau, cert.beta).worst_slack])
        add(f"midpoint inequality [{label}]", [-dynamics.midpoint_inequality_check(F, z, tau).worst_slack])
        rate_res, tight_res, mono_res = [], [], []
        for z0 in starts:
            tr = dynamics.iterate(F, z0, n_steps, tau=tau)
            p = dynamics.rate_params_for(tr, cert.beta, cert.k)
            rate_res.append(-dynamics.verify_rate(tr, p).worst_slack)
            mono_res.append(float(np.max(np.diff(tr.d_to_tau))))
            if F.B == 1.0:
                n = np.arange(len(tr.d_to_tau))
                tight_res.append(np.max(np.abs(1.0 / tr.d_to_tau - (1.0 / tr.d_to_tau[0] + n * F.a))))
        add(f"rate bound alpha(n,z) [{label}]", rate_res)
        add(f"strict horosphere descent [{label}]", mono_res, 0.0)
        if tight_res:
            add(f"tight rate for B=1 [{label}]", tight_res, 1e-8)
        inv = dynamics.sink_invariance_check(F, tau, SINK_LEVELS, rng, count=250)
        add(f"sink invariance k in {{0.5,1,2,5}} [{label}]", [-inv.worst_slack])
    return out


SUITE_FUNCS = {
    "geometry": geometry_suite,
    "siegel": siegel_suite,
    "nonexpansive": nonexpansive_suite,
    "rates": rates_suite,
}


def run(suite, seed=42, dims=sampling.DIMS):
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in SUITE_FUNCS:
            raise KeyError(name)
    results = []
    for name in names:
        for dim in dims:
            results.extend(SUITE_FUNCS[name](seed, dim))
    return results


def format_report(results, seed, dims):
    lines = [f"horoball verify seed={seed} dims={','.join(str(d) for d in dims)}"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{status} {r.suite:<12} n={r.dim:<2} {r.name:<48} "
            f"samples={r.samples:<6} failures={r.failures:<5} worst={r.worst:+.3e} tol={r.tol:.0e}"
        )
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} invariants passed")
    return "\n".join(lines) + "\n"
