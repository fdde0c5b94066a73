"""Non-Euclidean geometry of the open unit ball in C^n.

All functions accept single vectors of shape ``(n,)`` or stacks of shape
``(..., n)`` and broadcast over the leading axes.  The inner product is
conjugate-linear in its second argument, ``<z, w> = sum(z_i * conj(w_i))``.
"""

from dataclasses import dataclass

import numpy as np

EPS_UNIT = 1e-9
BALL_MARGIN = 1e-12
EPS_ID = 1e-9
EPS_ID_NEAR_BOUNDARY = 1e-6
EPS_DEN = 1e-14


class GeometryError(ValueError):
    """Raised for points or parameters outside the domain of a formula."""


def as_vector(z):
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        z = z.reshape(1)
    if z.shape[-1] < 1:
        raise GeometryError("vectors need at least one component")
    if not np.all(np.isfinite(z)):
        raise GeometryError("vector has non-finite components")
    return z


def check_ball_point(z):
    """Return ``z`` as a complex array, requiring ``||z|| <= 1 - 1e-12``."""
    z = as_vector(z)
    if np.any(np.linalg.norm(z, axis=-1) > 1.0 - BALL_MARGIN):
        raise GeometryError("point is not inside the open unit ball")
    return z


def check_boundary_point(tau):
    tau = as_vector(tau)
    if np.any(np.abs(np.linalg.norm(tau, axis=-1) - 1.0) > EPS_UNIT):
        raise GeometryError("boundary point must have unit norm")
    return tau


def check_closed_ball_point(w):
    w = as_vector(w)
    if np.any(np.linalg.norm(w, axis=-1) > 1.0 + EPS_UNIT):
        raise GeometryError("point lies outside the closed unit ball")
    return w


def _same_dim(z, w):
    if z.shape[-1] != w.shape[-1]:
        raise GeometryError(f"dimension mismatch: {z.shape[-1]} != {w.shape[-1]}")


def inner(z, w):
    """Hermitian inner product ``<z, w>``, conjugate-linear in ``w``."""
    z, w = as_vector(z), as_vector(w)
    _same_dim(z, w)
    return np.sum(z * np.conj(w), axis=-1)


def norm_sq(z):
    z = np.asarray(z, dtype=complex)
    return np.sum(z.real**2 + z.imag**2, axis=-1)


def project_along(a, z):
    """Split ``z`` into its component along the complex line through ``a``
    and the orthogonal remainder.

    Returns ``(P_a z, Q_a z)``.  For ``a = 0`` the projection is zero.
    """
    a, z = as_vector(a), as_vector(z)
    _same_dim(a, z)
    # unit direction, scaled first so that tiny |a| does not underflow
    scale = np.max(np.abs(a), axis=-1, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    u = a.real / safe + 1j * (a.imag / safe)
    u = u / np.where(scale > 0, np.linalg.norm(u, axis=-1, keepdims=True), 1.0)
    p = inner(z, u)[..., None] * u
    return p, z - p


def mobius(a, z):
    """Ball automorphism ``m_a`` sending 0 to ``a``:

        m_a(z) = (P_a(z + a) + sqrt(1 - |a|^2) Q_a(z + a)) / (1 + <z, a>)
    """
    a, z = check_ball_point(a), check_ball_point(z)
    _same_dim(a, z)
    den = 1.0 + inner(z, a)
    if np.any(np.abs(den) < EPS_DEN):
        raise GeometryError("Mobius denominator vanishes")
    p, q = project_along(a, z + a)
    s = np.sqrt(1.0 - norm_sq(a))
    out = (p + s[..., None] * q) / den[..., None]
    # P_0 is not a ray projection; m_0 is the identity.
    zero = norm_sq(a) == 0
    if np.any(zero):
        out = np.where(zero[..., None], z, out)
    return out


def sigma(z, w):
    """Co-metric ``(1-|z|^2)(1-|w|^2) / |1-<z,w>|^2``, valued in (0, 1]."""
    z, w = check_ball_point(z), check_ball_point(w)
    _same_dim(z, w)
    return (1.0 - norm_sq(z)) * (1.0 - norm_sq(w)) / np.abs(1.0 - inner(z, w)) ** 2


def rho(z, w):
    """Poincare metric ``artanh ||m_{-z}(w)||``."""
    z, w = check_ball_point(z), check_ball_point(w)
    r = np.linalg.norm(mobius(-z, w), axis=-1)
    return np.arctanh(np.minimum(r, 1.0))


def rho_from_sigma(z, w):
    return np.arctanh(np.sqrt(np.clip(1.0 - sigma(z, w), 0.0, 1.0)))


def dhoro(z, w):
    """Horosphere functional ``|1 - <z,w>|^2 / (1 - |z|^2)``.

    ``w`` may lie on the closed ball.  Not symmetric in its arguments.
    """
    z, w = check_ball_point(z), check_closed_ball_point(w)
    _same_dim(z, w)
    return np.abs(1.0 - inner(z, w)) ** 2 / (1.0 - norm_sq(z))


@dataclass(frozen=True)
class HorosphereParams:
    """Sublevel set ``E(center, level) = {z : d(z, center) < level}``."""

    center: np.ndarray
    level: float

    def __post_init__(self):
        center = check_closed_ball_point(self.center)
        if center.ndim != 1:
            raise GeometryError("horosphere center must be a single vector")
        if not self.level > 1.0 - norm_sq(center):
            raise GeometryError("horosphere level must exceed 1 - |center|^2")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "level", float(self.level))


def in_horosphere(z, h: HorosphereParams):
    return dhoro(z, h.center) < h.level
