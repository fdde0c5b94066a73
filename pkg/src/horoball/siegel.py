"""Cayley transform between the ball and the Siegel domain.

For a unit vector ``tau`` the Siegel domain is ``{x : S(x) > 0}`` with
height ``S(x) = Re<x,tau> + |<x,tau>|^2 - ||x||^2``.  Writing
``x = lam*tau + q`` with ``q`` orthogonal to ``tau`` the height reduces to
``Re(lam) - ||q||^2``, which is how it is evaluated here: the expanded form
cancels catastrophically for large ``x``.
"""

from dataclasses import dataclass

import numpy as np

from .ball import (
    EPS_DEN,
    EPS_ID,
    GeometryError,
    as_vector,
    check_ball_point,
    check_boundary_point,
    inner,
    norm_sq,
)


@dataclass(frozen=True)
class HoroContext:
    """Distinguished boundary direction ``tau`` of a Siegel chart."""

    tau: np.ndarray

    def __post_init__(self):
        tau = check_boundary_point(self.tau)
        if tau.ndim != 1:
            raise GeometryError("tau must be a single vector")
        object.__setattr__(self, "tau", tau)

    @property
    def dim(self):
        return self.tau.shape[0]


def _tau(ctx):
    return ctx.tau if isinstance(ctx, HoroContext) else HoroContext(ctx).tau


def split(x, ctx):
    """Return ``(<x,tau>, Q_tau x)``."""
    tau = _tau(ctx)
    x = as_vector(x)
    lam = inner(x, tau)
    return lam, x - lam[..., None] * tau


def s_height(x, ctx):
    lam, q = split(x, ctx)
    return lam.real - norm_sq(q)


def s_height_expanded(x, ctx):
    """Height by the defining expression; only for cross-checks."""
    tau = _tau(ctx)
    lam = inner(x, tau)
    return lam.real + np.abs(lam) ** 2 - norm_sq(x)


def check_siegel_point(x, ctx, strict=False):
    """Validate membership in the Siegel domain.

    Heights down to ``-EPS_ID`` are tolerated unless ``strict``.
    """
    x = as_vector(x)
    s = s_height(x, ctx)
    if strict and np.any(s <= 0):
        raise GeometryError("point is not strictly inside the Siegel domain")
    if np.any(s < -EPS_ID):
        raise GeometryError("point lies outside the Siegel domain")
    return x


def cayley(z, ctx):
    """``C(z) = (z + tau) / (1 - <z, tau>)``, mapping the ball onto the Siegel domain."""
    tau = _tau(ctx)
    z = check_ball_point(z)
    den = 1.0 - inner(z, tau)
    if np.any(np.abs(den) < EPS_DEN):
        raise GeometryError("Cayley denominator vanishes")
    return (z + tau) / den[..., None]


def cayley_inv(x, ctx):
    """Inverse Cayley transform ``z = 2x / (1 + <x,tau>) - tau``.

    Evaluated as ``((v-1)/(v+1)) tau + 2 Q_tau x / (1+v)`` with
    ``v = <x,tau>``, which avoids cancellation when ``x`` is large.
    """
    tau = _tau(ctx)
    x = check_siegel_point(x, tau)
    v, q = split(x, tau)
    den = 1.0 + v
    if np.any(np.abs(den) < EPS_DEN):
        raise GeometryError("inverse Cayley denominator vanishes")
    return ((v - 1.0) / den)[..., None] * tau + 2.0 * q / den[..., None]


def t_form(x, y, ctx):
    """Sesquilinear form ``T(x,y) = <x,tau> + <tau,y> + 2(<x,tau><tau,y> - <x,y>)``.

    Equal to ``<x,tau> + <tau,y> - 2<Q x, Q y>``, which is what is computed.
    """
    lx, qx = split(x, ctx)
    ly, qy = split(y, ctx)
    return lx + np.conj(ly) - 2.0 * inner(qx, qy)


def t_form_expanded(x, y, ctx):
    tau = _tau(ctx)
    xt = inner(x, tau)
    ty = inner(tau, y)
    return xt + ty + 2.0 * (xt * ty - inner(x, y))


def sigma_via_siegel(x, y, ctx):
    """``sigma(C^-1 x, C^-1 y)`` computed as ``4 S(x) S(y) / |T(x,y)|^2``."""
    sx, sy = s_height(x, ctx), s_height(y, ctx)
    if np.any(sx <= 0) or np.any(sy <= 0):
        raise GeometryError("sigma_via_siegel needs points strictly inside the Siegel domain")
    t = np.abs(t_form(x, y, ctx))
    if np.any(t < EPS_DEN):
        raise GeometryError("T(x, y) vanishes")
    return 4.0 * sx * sy / t**2


def horoshift(x, a, ctx):
    """Translate along the Siegel axis: ``x + a*tau`` raises the height by ``a``."""
    if not np.all(np.asarray(a) > 0):
        raise GeometryError("horoshift needs a > 0")
    tau = _tau(ctx)
    x = check_siegel_point(x, tau)
    return x + np.asarray(a, dtype=float)[..., None] * tau
