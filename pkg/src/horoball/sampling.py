"""Seeded generators for points, boundary directions and self-maps."""

import numpy as np

from .ball import norm_sq
from .maps import (
    Compose,
    Constant,
    ConvexCombination,
    Identity,
    LinearContraction,
    MobiusAuto,
    SiegelAffine,
    Unitary,
)

DIMS = (1, 2, 3, 8)


def complex_normal(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def unit_vectors(rng, dim, count):
    v = complex_normal(rng, (count, dim))
    return v / np.linalg.norm(v, axis=1)[:, None]


def boundary_point(rng, dim):
    return unit_vectors(rng, dim, 1)[0]


def ball_points(rng, dim, count, max_norm=0.95):
    """Uniform direction times a radius uniform on ``[0, max_norm]``."""
    return unit_vectors(rng, dim, count) * rng.uniform(0, max_norm, size=count)[:, None]


def sphere_points(rng, dim, count, radius):
    return unit_vectors(rng, dim, count) * radius


def siegel_points(rng, tau, count, max_height=10.0, spread=3.0):
    """Points of the Siegel domain at ``tau`` with heights in ``(0, max_height)``."""
    dim = tau.shape[0]
    s = rng.uniform(0, max_height, size=count) + 1e-6
    q = complex_normal(rng, (count, dim))
    q -= (q @ tau.conj())[:, None] * tau
    q *= rng.uniform(0, spread, size=count)[:, None]
    lam = s + norm_sq(q) + 1j * rng.normal(scale=spread, size=count)
    return lam[:, None] * tau + q


def unitary(rng, dim):
    q, r = np.linalg.qr(complex_normal(rng, (dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def contraction(rng, dim):
    m = complex_normal(rng, (dim, dim))
    return m / (np.linalg.norm(m, 2) * rng.uniform(1.0, 3.0))


LEAVES = ("identity", "constant", "linear", "unitary", "mobius", "siegel_affine")


def selfmap(rng, dim, kind=None, depth=2):
    """Random self-map of the ``dim``-ball; ``kind`` picks the variant."""
    kinds = LEAVES + (("compose", "convex") if depth > 0 else ())
    kind = kind or kinds[rng.integers(len(kinds))]
    if kind == "identity":
        return Identity()
    if kind == "constant":
        return Constant(ball_points(rng, dim, 1, 0.9)[0])
    if kind == "linear":
        return LinearContraction(contraction(rng, dim))
    if kind == "unitary":
        return Unitary(unitary(rng, dim))
    if kind == "mobius":
        return MobiusAuto(ball_points(rng, dim, 1, 0.9)[0])
    if kind == "siegel_affine":
        return SiegelAffine(rng.uniform(1, 4), rng.uniform(0, 2), boundary_point(rng, dim))
    parts = tuple(selfmap(rng, dim, depth=depth - 1) for _ in range(rng.integers(2, 4)))
    if kind == "compose":
        return Compose(parts)
    if kind == "convex":
        w = rng.uniform(0.1, 1.0, size=len(parts))
        w /= w.sum()
        w[-1] = 1.0 - w[:-1].sum()
        return ConvexCombination(tuple(w), parts)
    raise ValueError(f"unknown map kind {kind!r}")


VARIANTS = LEAVES + ("compose", "convex")
