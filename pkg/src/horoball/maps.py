"""Composable holomorphic self-maps of the unit ball.

Every map is an immutable object callable on a point ``(n,)`` or a stack
of points ``(..., n)``.  Maps round-trip through a canonical JSON form:

    {"type": "identity"}
    {"type": "constant", "c": VEC}
    {"type": "linear", "matrix": MAT}
    {"type": "unitary", "matrix": MAT}
    {"type": "mobius", "a": VEC}
    {"type": "compose", "maps": [MAP, ...]}
    {"type": "convex", "weights": [w, ...], "maps": [MAP, ...]}
    {"type": "siegel_affine", "B": B, "a": a, "tau": VEC}

where ``VEC`` is a list of ``[re, im]`` pairs and ``MAT`` a row-major list
of such lists.  ``compose`` applies its maps right to left, so
``compose[f, g](z) = f(g(z))``.
"""

import json
from dataclasses import dataclass

import numpy as np

from .ball import (
    BALL_MARGIN,
    EPS_ID,
    GeometryError,
    as_vector,
    check_ball_point,
    dhoro,
    mobius,
)
from .siegel import HoroContext, cayley, cayley_inv, split


class SelfMap:
    """Base class; subclasses implement ``_apply`` on validated arrays."""

    tag = None

    def __call__(self, z):
        z = check_ball_point(z)
        if self.dim is not None and z.shape[-1] != self.dim:
            raise GeometryError(f"{self.tag} expects dimension {self.dim}, got {z.shape[-1]}")
        out = self._apply(z)
        if not np.all(np.isfinite(out)) or np.any(
            np.linalg.norm(out, axis=-1) > 1.0 - BALL_MARGIN
        ):
            raise GeometryError(f"{self.tag} left the unit ball")
        return out

    @property
    def dim(self):
        return None

    def to_dict(self):
        raise NotImplementedError

    def to_json(self):
        return dumps_canonical(self.to_dict())


def evaluate(F: SelfMap, z):
    return F(z)


def _vec_json(v):
    return [[float(c.real), float(c.imag)] for c in np.asarray(v, dtype=complex)]


def _mat_json(m):
    return [_vec_json(row) for row in np.asarray(m, dtype=complex)]


@dataclass(frozen=True, eq=False)
class Identity(SelfMap):
    tag = "identity"

    def _apply(self, z):
        return z

    def to_dict(self):
        return {"type": self.tag}


@dataclass(frozen=True, eq=False)
class Constant(SelfMap):
    c: np.ndarray
    tag = "constant"

    def __post_init__(self):
        c = check_ball_point(self.c)
        if c.ndim != 1:
            raise GeometryError("constant value must be a single vector")
        object.__setattr__(self, "c", c)

    @property
    def dim(self):
        return self.c.shape[0]

    def _apply(self, z):
        return np.broadcast_to(self.c, z.shape).copy()

    def to_dict(self):
        return {"type": self.tag, "c": _vec_json(self.c)}


def _square(m, name):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise GeometryError(f"{name} matrix must be square")
    if not np.all(np.isfinite(m)):
        raise GeometryError(f"{name} matrix has non-finite entries")
    return m


@dataclass(frozen=True, eq=False)
class LinearContraction(SelfMap):
    """``z -> M z`` with operator norm ``||M|| <= 1``."""

    M: np.ndarray
    tag = "linear"

    def __post_init__(self):
        m = _square(self.M, "linear")
        if np.linalg.norm(m, 2) > 1.0 + EPS_ID:
            raise GeometryError("linear map must have operator norm <= 1")
        object.__setattr__(self, "M", m)

    @property
    def dim(self):
        return self.M.shape[0]

    def _apply(self, z):
        return z @ self.M.T

    def to_dict(self):
        return {"type": self.tag, "matrix": _mat_json(self.M)}


@dataclass(frozen=True, eq=False)
class Unitary(SelfMap):
    U: np.ndarray
    tag = "unitary"

    def __post_init__(self):
        u = _square(self.U, "unitary")
        if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > EPS_ID:
            raise GeometryError("matrix is not unitary")
        object.__setattr__(self, "U", u)

    @property
    def dim(self):
        return self.U.shape[0]

    def _apply(self, z):
        return z @ self.U.T

    def to_dict(self):
        return {"type": self.tag, "matrix": _mat_json(self.U)}


@dataclass(frozen=True, eq=False)
class MobiusAuto(SelfMap):
    a: np.ndarray
    tag = "mobius"

    def __post_init__(self):
        a = check_ball_point(self.a)
        if a.ndim != 1:
            raise GeometryError("Mobius parameter must be a single vector")
        object.__setattr__(self, "a", a)

    @property
    def dim(self):
        return self.a.shape[0]

    def _apply(self, z):
        return mobius(self.a, z)

    def to_dict(self):
        return {"type": self.tag, "a": _vec_json(self.a)}


def _common_dim(maps):
    dims = {m.dim for m in maps if m.dim is not None}
    if len(dims) > 1:
        raise GeometryError(f"maps have inconsistent dimensions {sorted(dims)}")
    return dims.pop() if dims else None


@dataclass(frozen=True, eq=False)
class Compose(SelfMap):
    maps: tuple
    tag = "compose"

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps or not all(isinstance(m, SelfMap) for m in maps):
            raise GeometryError("compose needs a non-empty list of maps")
        object.__setattr__(self, "maps", maps)
        _common_dim(maps)

    @property
    def dim(self):
        return _common_dim(self.maps)

    def _apply(self, z):
        for m in reversed(self.maps):
            z = m(z)
        return z

    def to_dict(self):
        return {"type": self.tag, "maps": [m.to_dict() for m in self.maps]}


@dataclass(frozen=True, eq=False)
class ConvexCombination(SelfMap):
    weights: tuple
    maps: tuple
    tag = "convex"

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        maps = tuple(self.maps)
        if not maps or len(w) != len(maps):
            raise GeometryError("convex combination needs one weight per map")
        if any(x <= 0 for x in w) or abs(sum(w) - 1.0) > EPS_ID:
            raise GeometryError("convex weights must be positive and sum to 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "maps", maps)
        _common_dim(maps)

    @property
    def dim(self):
        return _common_dim(self.maps)

    def _apply(self, z):
        return sum(w * m(z) for w, m in zip(self.weights, self.maps))

    def to_dict(self):
        return {
            "type": self.tag,
            "weights": list(self.weights),
            "maps": [m.to_dict() for m in self.maps],
        }


@dataclass(frozen=True, eq=False)
class SiegelAffine(SelfMap):
    """``F(z) = C^-1(B P_tau C(z) + sqrt(B) Q_tau C(z) + a tau)``.

    The Siegel height transforms as ``S -> B*S + a``, so ``F`` maps the
    ball into the horosphere ``{d(., tau) < 1/a}`` when ``a > 0``.  ``tau``
    is a boundary regular fixed point with radial derivative ``1/B``.
    """

    B: float
    a: float
    tau: np.ndarray
    tag = "siegel_affine"

    def __post_init__(self):
        B, a = float(self.B), float(self.a)
        if not B >= 1.0:
            raise GeometryError("SiegelAffine needs B >= 1")
        if not a >= 0.0:
            raise GeometryError("SiegelAffine needs a >= 0")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "tau", HoroContext(self.tau).tau)

    @property
    def dim(self):
        return self.tau.shape[0]

    def siegel_image(self, x):
        lam, q = split(x, self.tau)
        return (self.B * lam + self.a)[..., None] * self.tau + np.sqrt(self.B) * q

    def _apply(self, z):
        return cayley_inv(self.siegel_image(cayley(z, self.tau)), self.tau)

    def to_dict(self):
        return {"type": self.tag, "B": self.B, "a": self.a, "tau": _vec_json(self.tau)}


# --- certificates ---------------------------------------------------------


@dataclass(frozen=True)
class SinkCertificate:
    """Exact boundary data of a map whose image lies in a horosphere at ``tau``."""

    tau: np.ndarray
    beta: float
    k: float
    m: float


def horosphere_certificate(F: SelfMap, tau, slack=1e-9):
    """Machine-checkable horosphere bound ``m`` with ``d(F(z), tau) < m``, or None."""
    tau = HoroContext(tau).tau
    if isinstance(F, SiegelAffine) and F.a > 0 and np.allclose(F.tau, tau, atol=EPS_ID, rtol=0):
        return 1.0 / F.a
    if isinstance(F, Constant) and F.dim == tau.shape[0]:
        return float(dhoro(F.c, tau)) * (1.0 + slack)
    return None


def sink_certificate(F: SelfMap):
    if isinstance(F, SiegelAffine) and F.a > 0:
        beta = 1.0 / F.B
        return SinkCertificate(tau=F.tau, beta=beta, k=2.0 * beta * F.a, m=1.0 / F.a)
    return None


# --- JSON -----------------------------------------------------------------


def _fmt_float(x):
    x = float(x)
    if not np.isfinite(x):
        raise ValueError("non-finite float in canonical JSON")
    s = f"{x:.17g}"
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps_canonical(obj):
    """JSON with insertion-ordered keys and floats at 17 significant digits."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps_canonical(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps_canonical(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


class MapSpecError(ValueError):
    """Malformed map description; ``field`` names the offending path."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def parse_vector(data, field):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise MapSpecError(field, "expected a list of [re, im] pairs") from None
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
        raise MapSpecError(field, "expected a list of [re, im] pairs")
    return as_vector(arr[:, 0] + 1j * arr[:, 1])


def parse_matrix(data, field):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise MapSpecError(field, "expected a row-major matrix of [re, im] pairs") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise MapSpecError(field, "expected a row-major matrix of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _require(d, key, field):
    if key not in d:
        raise MapSpecError(f"{field}.{key}", "missing")
    return d[key]


def map_from_dict(d, field="map"):
    if not isinstance(d, dict):
        raise MapSpecError(field, "expected an object")
    tag = _require(d, "type", field)
    try:
        if tag == "identity":
            return Identity()
        if tag == "constant":
            return Constant(parse_vector(_require(d, "c", field), f"{field}.c"))
        if tag == "linear":
            return LinearContraction(parse_matrix(_require(d, "matrix", field), f"{field}.matrix"))
        if tag == "unitary":
            return Unitary(parse_matrix(_require(d, "matrix", field), f"{field}.matrix"))
        if tag == "mobius":
            return MobiusAuto(parse_vector(_require(d, "a", field), f"{field}.a"))
        if tag == "compose":
            maps = _require(d, "maps", field)
            if not isinstance(maps, list):
                raise MapSpecError(f"{field}.maps", "expected a list")
            return Compose(tuple(map_from_dict(m, f"{field}.maps[{i}]") for i, m in enumerate(maps)))
        if tag == "convex":
            maps = _require(d, "maps", field)
            weights = _require(d, "weights", field)
            if not isinstance(maps, list) or not isinstance(weights, list):
                raise MapSpecError(field, "weights and maps must be lists")
            return ConvexCombination(
                tuple(weights),
                tuple(map_from_dict(m, f"{field}.maps[{i}]") for i, m in enumerate(maps)),
            )
        if tag == "siegel_affine":
            return SiegelAffine(
                float(_require(d, "B", field)),
                float(_require(d, "a", field)),
                parse_vector(_require(d, "tau", field), f"{field}.tau"),
            )
    except GeometryError as exc:
        raise MapSpecError(field, str(exc)) from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MapSpecError):
            raise
        raise MapSpecError(field, str(exc)) from None
    raise MapSpecError(f"{field}.type", f"unknown map type {tag!r}")


def map_from_json(text):
    return map_from_dict(json.loads(text))
