"""Acceptance criteria 1-12, each checked at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL
line per criterion.
"""

import io
from types import SimpleNamespace

import numpy as np
import pytest

from horoball import analysis, dynamics, sampling
from horoball.ball import dhoro, inner, norm_sq, sigma
from horoball.cli import cmd_verify
from horoball.dynamics import ClassifyConfig, InteriorFixedPoint, SinkConvergence
from horoball.maps import Compose, LinearContraction, MobiusAuto, SiegelAffine, sink_certificate
from horoball.siegel import (
    cayley,
    cayley_inv,
    horoshift,
    s_height,
    sigma_via_siegel,
    t_form,
)

DIMS = (1, 2, 3, 8)
N_ID = 10_000
N_PAIRS = 1000
GRID = [(B, a) for B in (1.0, 2.0, 4.0) for a in (0.25, 1.0, 2.0)]


def report(number, ok, detail):
    print(f"\ncriterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def rng_for(number, dim):
    return np.random.default_rng([1000 + number, dim])


def test_criterion_01_height_times_distance_is_one():
    worst = 0.0
    for dim in DIMS:
        rng = rng_for(1, dim)
        tau = sampling.boundary_point(rng, dim)
        z = sampling.ball_points(rng, dim, N_ID)
        worst = max(worst, np.max(np.abs(s_height(cayley(z, tau), tau) * dhoro(z, tau) - 1.0)))
    report(1, worst <= 1e-9, f"max |S(C(z)) d(z,tau) - 1| = {worst:.3e} (tol 1e-9)")


def test_criterion_02_siegel_algebra():
    err = {"shift": 0.0, "T shift": 0.0, "sigma via Siegel": 0.0, "T(x,x)": 0.0}
    slack = {"Re T >= S+S": np.inf, "|T-2a| bound": np.inf, "axial projection": np.inf}
    for dim in DIMS:
        rng = rng_for(2, dim)
        tau = sampling.boundary_point(rng, dim)
        z, w = sampling.ball_points(rng, dim, N_ID), sampling.ball_points(rng, dim, N_ID)
        x, y = cayley(z, tau), cayley(w, tau)
        a = rng.uniform(0.01, 5.0, size=N_ID)
        sx, sy = s_height(x, tau), s_height(y, tau)
        err["shift"] = max(err["shift"], np.max(np.abs(s_height(horoshift(x, a, tau), tau) - sx - a)))
        shifted = t_form(x - a[:, None] * tau, y - a[:, None] * tau, tau)
        err["T shift"] = max(err["T shift"], np.max(np.abs(shifted - (t_form(x, y, tau) - 2 * a))))
        err["sigma via Siegel"] = max(err["sigma via Siegel"], np.max(np.abs(sigma_via_siegel(x, y, tau) - sigma(z, w))))
        err["T(x,x)"] = max(err["T(x,x)"], np.max(np.abs(t_form(x, x, tau) - 2 * sx)))
        # inequalities over all of C^n
        gx = sampling.complex_normal(rng, (N_ID, dim))
        gy = sampling.complex_normal(rng, (N_ID, dim))
        slack["Re T >= S+S"] = min(slack["Re T >= S+S"], np.min(t_form(gx, gy, tau).real - s_height(gx, tau) - s_height(gy, tau)))
        d = gx - gy
        slack["axial projection"] = min(slack["axial projection"], np.min(norm_sq(d) - np.abs(inner(d, tau)) ** 2))
        b = rng.uniform(0, 1, size=N_ID) * np.minimum(sx, sy)
        t = t_form(x, y, tau)
        lhs = np.abs(t - 2 * b) ** 2
        rhs = (sx + sy - 2 * b) ** 2
        slack["|T-2a| bound"] = min(slack["|T-2a| bound"], np.min((lhs - rhs) / (1 + lhs)))
    ok = all(v <= 1e-9 for v in err.values()) and all(v >= -1e-9 for v in slack.values())
    detail = ", ".join(f"{k} err {v:.2e}" for k, v in err.items())
    detail += "; " + ", ".join(f"{k} slack {v:+.2e}" for k, v in slack.items())
    report(2, ok, detail)


def test_criterion_03_cayley_round_trip():
    e1 = e2 = 0.0
    for dim in DIMS:
        rng = rng_for(3, dim)
        tau = sampling.boundary_point(rng, dim)
        z = sampling.ball_points(rng, dim, N_ID)
        e1 = max(e1, np.max(np.linalg.norm(cayley_inv(cayley(z, tau), tau) - z, axis=1)))
        x = sampling.siegel_points(rng, tau, N_ID)
        back = cayley(cayley_inv(x, tau), tau)
        e2 = max(e2, np.max(np.linalg.norm(back - x, axis=1) / (1 + np.linalg.norm(x, axis=1))))
    report(3, e1 <= 1e-10 and e2 <= 1e-10, f"ball->Siegel->ball {e1:.2e}, Siegel->ball->Siegel {e2:.2e} (tol 1e-10)")


def test_criterion_04_schwarz_pick_all_variants():
    worst = np.inf
    draws = 0
    for dim in DIMS:
        rng = rng_for(4, dim)
        for i in range(N_PAIRS // len(DIMS)):
            F = sampling.selfmap(rng, dim, kind=sampling.VARIANTS[i % len(sampling.VARIANTS)])
            z, w = sampling.ball_points(rng, dim, 2)
            worst = min(worst, sigma(F(z), F(w)) - sigma(z, w))
            draws += 1
    report(4, draws >= 1000 and worst >= -1e-9, f"{draws} draws, min sigma(Fz,Fw) - sigma(z,w) = {worst:+.3e}")


def test_criterion_05_horosphere_condition():
    worst = -np.inf
    for dim in DIMS:
        rng = rng_for(5, dim)
        tau = sampling.boundary_point(rng, dim)
        z = np.vstack([
            sampling.ball_points(rng, dim, N_PAIRS),
            sampling.sphere_points(rng, dim, N_PAIRS, 1 - 1e-6),
        ])
        probes = analysis.boundary_directions(rng, dim, 8, tau)
        for B, a in GRID:
            hb = analysis.horosphere_bound(SiegelAffine(B, a, tau), tau, z, probes)
            worst = max(worst, hb.value - 1.0 / a)
    report(5, worst <= 1e-9, f"max sup d(F z, tau) - 1/a = {worst:+.3e} (tol 1e-9)")


def test_criterion_06_coefficient_chain():
    worst = np.inf
    strict_ok = True
    for dim in DIMS:
        rng = rng_for(6, dim)
        tau = sampling.boundary_point(rng, dim)
        z, w = sampling.ball_points(rng, dim, N_PAIRS), sampling.ball_points(rng, dim, N_PAIRS)
        for B, a in GRID:
            F = SiegelAffine(B, a, tau)
            b, c, p = analysis.bcp_coefficients(F, z, w, tau, 1.0 / a)
            s, sf = sigma(z, w), sigma(F(z), F(w))
            strict_ok &= bool(np.all(b > 0) and np.all(c < 1))
            worst = min(
                worst,
                np.min(c - b),
                np.min(sf - s),
                np.min(b / c - sf),
                np.min(sf - ((1 - p) * s + p)),
                np.min(p),
                np.min(1 - p),
            )
    report(6, strict_ok and worst >= -1e-9, f"0<b, c<1: {strict_ok}; worst chain slack {worst:+.3e} (tol 1e-9)")


def test_criterion_07_k_limit():
    rel_formula = rel_z = 0.0
    t2 = np.inf
    for dim in DIMS:
        rng = rng_for(7, dim)
        tau = sampling.boundary_point(rng, dim)
        z1, z2 = sampling.ball_points(rng, dim, 2)
        for B, a in GRID:
            F = SiegelAffine(B, a, tau)
            m = 1.0 / a
            beta = analysis.radial_derivative(F, tau)
            k1 = analysis.k_limit(F, z1, tau, m)
            k2 = analysis.k_limit(F, z2, tau, m)
            rel_formula = max(rel_formula, abs(k1 - 2 * beta / m) / abs(2 * beta / m))
            rel_z = max(rel_z, abs(k1 - k2) / abs(k1))
            t2 = min(t2, m - 2 * beta / k1)
    ok = rel_formula <= 1e-3 and rel_z <= 1e-3 and t2 >= -1e-9
    report(7, ok, f"k vs 2beta/m rel {rel_formula:.2e}, across z rel {rel_z:.2e}, min m - 2beta/k {t2:+.2e}")


def test_criterion_08_radial_derivative():
    beta_auto = analysis.radial_derivative(MobiusAuto(np.array([0.5])), np.array([1.0]))
    err_auto = abs(beta_auto - 1 / 3)
    err_b = routes = 0.0
    for dim in DIMS:
        tau = sampling.boundary_point(rng_for(8, dim), dim)
        for B in (1.0, 2.0, 4.0):
            F = SiegelAffine(B, 1.0, tau)
            err_b = max(err_b, abs(analysis.radial_derivative(F, tau) - 1 / B))
            direct, normal = analysis.radial_derivative_routes(F, tau)
            routes = max(routes, abs(direct.real - normal) / abs(normal))
    ok = err_auto <= 1e-6 and err_b <= 1e-6 and routes <= 1e-6
    report(8, ok, f"automorphism |beta - 1/3| {err_auto:.2e}, SiegelAffine |beta - 1/B| {err_b:.2e}, routes rel {routes:.2e}")


def test_criterion_09_one_step_and_rate():
    step = rate = np.inf
    tight = 0.0
    for dim in DIMS:
        rng = rng_for(9, dim)
        tau = sampling.boundary_point(rng, dim)
        z = sampling.ball_points(rng, dim, N_PAIRS)
        starts = sampling.ball_points(rng, dim, 4)
        for B, a in GRID:
            F = SiegelAffine(B, a, tau)
            cert = sink_certificate(F)
            step = min(step, dynamics.step_inequality_check(F, z, tau, cert.beta, cert.k).worst_slack)
            for z0 in starts:
                tr = dynamics.iterate(F, z0, 200, tau=tau)
                # the one-step inequality along the orbit itself
                pts = tr.iterates[:-1]
                step = min(step, dynamics.step_inequality_check(F, pts, tau, cert.beta, cert.k).worst_slack)
                rep = dynamics.verify_rate(tr, dynamics.rate_params_for(tr, cert.beta, cert.k))
                rate = min(rate, rep.worst_slack)
                if B == 1.0:
                    n = np.arange(len(tr.d_to_tau))
                    tight = max(tight, np.max(np.abs(1 / tr.d_to_tau - (1 / tr.d_to_tau[0] + n * a))))
    ok = step >= -1e-7 and rate >= -1e-7 and tight <= 1e-8
    report(9, ok, f"one-step slack {step:+.2e}, rate slack {rate:+.2e}, B=1 tightness {tight:.2e} (tol 1e-8)")


def test_criterion_10_classification_dichotomy():
    msgs = []
    ok = True
    for dim in DIMS:
        rng = rng_for(10, dim)
        M = 0.8 * sampling.contraction(rng, dim)
        c = sampling.ball_points(rng, dim, 1, 0.5)[0]
        res = dynamics.classify(Compose((MobiusAuto(c), LinearContraction(M))), ClassifyConfig(seed=dim))
        good = (
            isinstance(res, InteriorFixedPoint)
            and res.starts_agreement <= 1e-10
            and res.spectrum.spectral_radius < 1
        )
        ok &= good
        if isinstance(res, InteriorFixedPoint):
            msgs.append(f"n={dim} interior spread {res.starts_agreement:.1e} r={res.spectrum.spectral_radius:.3f}")
        else:
            msgs.append(f"n={dim} contraction gave {res.outcome}")

        tau = sampling.boundary_point(rng, dim)
        cands = np.vstack([-tau, analysis.boundary_directions(rng, dim, 4)])
        for B, a in GRID:
            F = SiegelAffine(B, a, tau)
            res = dynamics.classify(F, ClassifyConfig(n_max=200, seed=dim))
            sink = isinstance(res, SinkConvergence) and np.linalg.norm(res.tau - tau) <= 1e-9
            inv = dynamics.sink_invariance_check(F, tau, (0.5, 1.0, 2.0, 5.0), rng, count=250)
            uniq = dynamics.boundary_uniqueness_check(F, tau, 1.0 / a, cands)
            if not (sink and inv and uniq):
                ok = False
                msgs.append(f"n={dim} B={B:g} a={a:g}: sink={sink} invariance={bool(inv)} unique={bool(uniq)}")
    msgs.append("SiegelAffine grid: sink at tau, horospheres invariant, other candidates rejected" if ok else "")
    report(10, ok, "; ".join(m for m in msgs if m))


def test_criterion_11_midpoint_inequality():
    worst = np.inf
    for dim in DIMS:
        rng = rng_for(11, dim)
        tau = sampling.boundary_point(rng, dim)
        z = sampling.ball_points(rng, dim, N_PAIRS)
        for B, a in GRID:
            F = SiegelAffine(B, a, tau)
            fz = F(z)
            worst = min(worst, np.min(dhoro(0.5 * (z + fz), tau) - dhoro(fz, tau)))
    report(11, worst >= -1e-7, f"min d(mid, tau) - d(Fz, tau) = {worst:+.3e} (tol 1e-7)")


def test_criterion_12_verify_is_deterministic():
    outputs, codes = [], []
    for _ in range(2):
        buf = io.StringIO()
        codes.append(cmd_verify(SimpleNamespace(suite="all", seed=42, dims="1,2,3,8", out=None), out=buf))
        outputs.append(buf.getvalue().encode())
    same = outputs[0] == outputs[1]
    summary = outputs[0].decode().splitlines()[-1]
    report(12, same and codes == [0, 0], f"byte-identical: {same}, exit codes {codes}, {summary}")
