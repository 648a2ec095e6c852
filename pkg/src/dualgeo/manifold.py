"""Chart-based data model for statistical manifolds and the builtin catalog.

A model lives in one global working chart and carries the metric field and the
lower-index connection symbols of a pair of torsion-free connections that are
dual with respect to the metric:

    d_k g_ij = Gamma_{ki,j} + Gamma*_{kj,i}

Builtins:

    euclidean(n)               flat self-dual, identity metric
    sphere(2, r)               round sphere in spherical chart, self-dual,
                               polar caps excluded (theta in (0.1, pi - 0.1))
    categorical(n)             exponential family over n+1 outcomes in the
                               natural chart; primal symbols vanish there and
                               the dual symbols are the third derivatives of
                               the log-partition ln(1 + sum exp(theta_i))
    gaussian1d                 univariate Gaussian in natural parameters
                               (theta1, theta2), theta2 < 0
    alpha_categorical(n, a)    simplex in mixture coordinates with the Fisher
                               metric and the a-connection pair, a in (-1, 1)

All field evaluators are vectorized: they take an (m, dim) array of chart
points and return stacked tensors. The scalar accessors `metric_at` and
`christoffel_at` wrap the batch forms.

For the dually flat builtins (euclidean, categorical, gaussian1d) the model
carries a closed-form reference divergence. Its orientation is fixed so that
`oracle(p, q)` equals the primal canonical divergence from p to q under this
chart convention; for the categorical family that is

    oracle(p, q) = sum_i q_i * log(q_i / p_i)

over the full probability vectors (see README for the numerical resolution of
this orientation on the Bernoulli family).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import BaseMismatch, InvalidModelSpec, PointOutOfDomain

__all__ = [
    "ConnectionKind",
    "Point",
    "Tangent",
    "ManifoldModel",
    "make_builtin",
    "parse_model_spec",
    "builtin_names",
    "builtin_schemas",
    "mixture_to_natural",
    "natural_to_mixture",
]


class ConnectionKind(enum.Enum):
    """Tag selecting one of the two dual connections."""

    PRIMAL = "primal"
    DUAL = "dual"

    @property
    def dual(self) -> "ConnectionKind":
        return ConnectionKind.DUAL if self is ConnectionKind.PRIMAL else ConnectionKind.PRIMAL


@dataclass(frozen=True, eq=False)
class Point:
    """A chart point: a plain coordinate vector."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", np.atleast_1d(np.asarray(self.coords, dtype=float)))

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def __repr__(self):
        return f"Point({np.array2string(self.coords, separator=', ')})"


@dataclass(frozen=True, eq=False)
class Tangent:
    """A tangent vector: chart-basis components attached to a base point."""

    base: Point
    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "components", np.atleast_1d(np.asarray(self.components, dtype=float))
        )
        if self.components.shape[0] != self.base.dim:
            raise ValueError("tangent components must match the base point dimension")

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def __repr__(self):
        return (
            f"Tangent(base={np.array2string(self.base.coords, separator=', ')}, "
            f"components={np.array2string(self.components, separator=', ')})"
        )


def _as_batch(points) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    return x


@dataclass(frozen=True)
class ManifoldModel:
    """Immutable description of (M, g, primal connection, dual connection).

    metric_fn(X)            (m, n)    -> (m, n, n) symmetric positive definite
    christoffel_fns[kind]   (m, n)    -> (m, n, n, n) lower-index symbols,
                                         symmetric in the first two slots
    domain_fn(X)            (m, n)    -> (m,) bool
    oracle_fn(p, q)         closed-form reference divergence or None
    flat_kinds              connections whose symbols vanish identically in
                            this chart (geodesics are straight lines there)
    safe_box                (n, 2) per-coordinate sampling box comfortably
                            inside the domain, used for seeded sampling
    """

    name: str
    dim: int
    params: tuple
    spec_string: str
    chart: str
    metric_fn: Callable[[np.ndarray], np.ndarray]
    christoffel_fns: dict
    domain_fn: Callable[[np.ndarray], np.ndarray]
    safe_box: np.ndarray
    oracle_fn: Optional[Callable[[np.ndarray, np.ndarray], float]] = None
    flat_kinds: frozenset = frozenset()
    coord_converters: dict = field(default_factory=dict)

    # -- domain ---------------------------------------------------------

    def contains(self, point) -> bool:
        x = np.asarray(point.coords if isinstance(point, Point) else point, dtype=float)
        if x.shape != (self.dim,):
            return False
        return bool(self.domain_fn(x[None, :])[0])

    def contains_batch(self, X: np.ndarray) -> np.ndarray:
        return self.domain_fn(_as_batch(X))

    def require_inside(self, point):
        if not self.contains(point):
            coords = point.coords if isinstance(point, Point) else point
            raise PointOutOfDomain(f"{coords!r} is outside the domain of {self.spec_string}")

    # -- fields ---------------------------------------------------------

    def metric_batch(self, X: np.ndarray) -> np.ndarray:
        return self.metric_fn(_as_batch(X))

    def christoffel_batch(self, X: np.ndarray, kind: ConnectionKind) -> np.ndarray:
        return self.christoffel_fns[kind](_as_batch(X))

    def metric_at(self, p: Point) -> np.ndarray:
        """Metric components g_ij(p)."""
        self.require_inside(p)
        return self.metric_batch(p.coords)[0]

    def christoffel_at(self, p: Point, kind: ConnectionKind) -> np.ndarray:
        """Lower-index connection symbols Gamma_{ij,k}(p) for the chosen kind."""
        self.require_inside(p)
        return self.christoffel_batch(p.coords, kind)[0]

    def inner_product(self, p: Point, u: Tangent, v: Tangent) -> float:
        """Metric pairing of two tangents based at p."""
        if not np.array_equal(u.base.coords, p.coords) or not np.array_equal(
            v.base.coords, p.coords
        ):
            raise BaseMismatch("inner_product requires both tangents to be based at p")
        g = self.metric_at(p)
        return float(u.components @ g @ v.components)

    def is_flat(self, kind: ConnectionKind) -> bool:
        return kind in self.flat_kinds

    def oracle(self, p: Point, q: Point) -> float:
        from .errors import OracleUnavailable

        if self.oracle_fn is None:
            raise OracleUnavailable(f"{self.spec_string} has no closed-form divergence")
        self.require_inside(p)
        self.require_inside(q)
        return float(self.oracle_fn(p.coords, q.coords))

    # -- helpers --------------------------------------------------------

    def point(self, coords) -> Point:
        p = Point(np.asarray(coords, dtype=float))
        if p.dim != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {p.dim}")
        return p

    def tangent(self, base, components) -> Tangent:
        b = base if isinstance(base, Point) else self.point(base)
        return Tangent(b, np.asarray(components, dtype=float))

    def dualized(self) -> "ManifoldModel":
        """The same manifold with the two connections swapped.

        The reference divergence, when present, is reversed accordingly: on a
        dually flat model the canonical divergence of the swapped structure is
        the original one with its arguments exchanged.
        """
        swapped = {
            ConnectionKind.PRIMAL: self.christoffel_fns[ConnectionKind.DUAL],
            ConnectionKind.DUAL: self.christoffel_fns[ConnectionKind.PRIMAL],
        }
        flat = frozenset(k.dual for k in self.flat_kinds)
        oracle = None
        if self.oracle_fn is not None:
            orig = self.oracle_fn
            oracle = lambda p, q: orig(q, p)  # noqa: E731
        return ManifoldModel(
            name=self.name + "*",
            dim=self.dim,
            params=self.params,
            spec_string=self.spec_string + "*",
            chart=self.chart,
            metric_fn=self.metric_fn,
            christoffel_fns=swapped,
            domain_fn=self.domain_fn,
            safe_box=self.safe_box,
            oracle_fn=oracle,
            flat_kinds=flat,
            coord_converters=self.coord_converters,
        )

    def convert_coords(self, coords, system: str) -> np.ndarray:
        """Convert externally supplied coordinates into the working chart."""
        coords = np.asarray(coords, dtype=float)
        if system in ("chart", "default"):
            return coords
        try:
            return self.coord_converters[system](coords)
        except KeyError:
            raise InvalidModelSpec(
                f"{self.spec_string} does not accept '{system}' coordinates"
            ) from None

    def __repr__(self):
        return f"ManifoldModel({self.spec_string})"


# ---------------------------------------------------------------------------
# categorical helpers (natural chart <-> mixture probabilities)
# ---------------------------------------------------------------------------


def natural_to_mixture(theta: np.ndarray) -> np.ndarray:
    """Head probabilities (p_1..p_n) of the categorical natural chart."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    z = np.concatenate([theta, [0.0]])
    z = z - z.max()
    e = np.exp(z)
    return (e / e.sum())[:-1]


def mixture_to_natural(probs_head: np.ndarray) -> np.ndarray:
    """Exact log-ratio chart map; probs_head are the first n probabilities."""
    p = np.atleast_1d(np.asarray(probs_head, dtype=float))
    tail = 1.0 - p.sum()
    if tail <= 0 or np.any(p <= 0):
        raise InvalidModelSpec("mixture coordinates must be strictly positive with sum < 1")
    return np.log(p) - math.log(tail)


def _full_probs_batch(theta: np.ndarray) -> np.ndarray:
    """(m, n) natural coordinates -> (m, n+1) probability vectors, stably."""
    m, n = theta.shape
    z = np.concatenate([theta, np.zeros((m, 1))], axis=1)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _mixture_full_probs(eta: np.ndarray) -> np.ndarray:
    tail = 1.0 - eta.sum(axis=1, keepdims=True)
    return np.concatenate([eta, tail], axis=1)


# ---------------------------------------------------------------------------
# builtin factories
# ---------------------------------------------------------------------------

_MIN_PROB = 1e-3  # simplex margin keeping the Fisher metric well conditioned


def _make_euclidean(n: int) -> ManifoldModel:
    eye = np.eye(n)

    def metric(X):
        return np.broadcast_to(eye, (X.shape[0], n, n)).copy()

    def zero_gamma(X):
        return np.zeros((X.shape[0], n, n, n))

    def domain(X):
        return np.ones(X.shape[0], dtype=bool)

    def oracle(p, q):
        d = q - p
        return 0.5 * float(d @ d)

    return ManifoldModel(
        name="euclidean",
        dim=n,
        params=(n,),
        spec_string=f"euclidean:{n}",
        chart="Cartesian coordinates on R^n",
        metric_fn=metric,
        christoffel_fns={ConnectionKind.PRIMAL: zero_gamma, ConnectionKind.DUAL: zero_gamma},
        domain_fn=domain,
        safe_box=np.array([[-1.0, 1.0]] * n),
        oracle_fn=oracle,
        flat_kinds=frozenset({ConnectionKind.PRIMAL, ConnectionKind.DUAL}),
    )


_SPHERE_CAP = 0.1  # polar exclusion keeping the chart nondegenerate

# Field-evaluation collars: trial geodesic shots may evaluate the fields far
# outside the domain, where a chart would degenerate or blow up. Clipping the
# coordinates entering the field formulas at bounds strictly outside the
# domain keeps those evaluations finite and non-singular without altering any
# in-domain value.
_SPHERE_COLLAR = 0.02
_CAT_THETA_COLLAR = 30.0
_GAUSS_T2_COLLAR = -0.0125
_GAUSS_T1_COLLAR = 100.0
_ALPHA_PROB_COLLAR = 2.5e-4


def _make_sphere(radius: float) -> ManifoldModel:
    r2 = radius * radius

    def theta_of(X):
        return np.clip(X[:, 0], _SPHERE_COLLAR, math.pi - _SPHERE_COLLAR)

    def metric(X):
        m = X.shape[0]
        g = np.zeros((m, 2, 2))
        g[:, 0, 0] = r2
        g[:, 1, 1] = r2 * np.sin(theta_of(X)) ** 2
        return g

    def gamma(X):
        # Levi-Civita symbols of the round metric, lower index form
        m = X.shape[0]
        th = theta_of(X)
        sc = r2 * np.sin(th) * np.cos(th)
        G = np.zeros((m, 2, 2, 2))
        G[:, 0, 1, 1] = sc
        G[:, 1, 0, 1] = sc
        G[:, 1, 1, 0] = -sc
        return G

    def domain(X):
        return (X[:, 0] > _SPHERE_CAP) & (X[:, 0] < math.pi - _SPHERE_CAP)

    return ManifoldModel(
        name="sphere",
        dim=2,
        params=(2, radius),
        spec_string=f"sphere:2:{radius:g}",
        chart="spherical chart (theta, phi), polar caps excluded",
        metric_fn=metric,
        christoffel_fns={ConnectionKind.PRIMAL: gamma, ConnectionKind.DUAL: gamma},
        domain_fn=domain,
        safe_box=np.array([[math.pi / 2 - 0.55, math.pi / 2 + 0.55], [-0.55, 0.55]]),
        oracle_fn=None,
        flat_kinds=frozenset(),
    )


def _categorical_third_derivative(P: np.ndarray) -> np.ndarray:
    """Third derivatives of the log-partition; P holds head probabilities (m, n)."""
    _, n = P.shape
    T = 2.0 * np.einsum("mi,mj,mk->mijk", P, P, P)
    for i in range(n):
        pip = P * P[:, i : i + 1]
        T[:, i, i, :] -= pip
        T[:, i, :, i] -= pip
        T[:, :, i, i] -= pip
        T[:, i, i, i] += P[:, i]
    return T


def _make_categorical(n: int) -> ManifoldModel:
    def head_probs(X):
        return _full_probs_batch(np.clip(X, -_CAT_THETA_COLLAR, _CAT_THETA_COLLAR))[:, :n]

    def metric(X):
        P = head_probs(X)
        return np.einsum("mi,ij->mij", P, np.eye(n)) - np.einsum("mi,mj->mij", P, P)

    def zero_gamma(X):
        return np.zeros((X.shape[0], n, n, n))

    def gamma_star(X):
        return _categorical_third_derivative(head_probs(X))

    def domain(X):
        return _full_probs_batch(X).min(axis=1) >= _MIN_PROB

    def oracle(theta_p, theta_q):
        # reference divergence oriented to match the primal canonical
        # divergence from p to q in this chart (see module docstring)
        pp = _full_probs_batch(theta_p[None, :])[0]
        pq = _full_probs_batch(theta_q[None, :])[0]
        return float(np.sum(pq * (np.log(pq) - np.log(pp))))

    return ManifoldModel(
        name="categorical",
        dim=n,
        params=(n,),
        spec_string=f"categorical:{n}",
        chart="natural (log-ratio) coordinates theta",
        metric_fn=metric,
        christoffel_fns={ConnectionKind.PRIMAL: zero_gamma, ConnectionKind.DUAL: gamma_star},
        domain_fn=domain,
        safe_box=np.array([[-1.5, 1.5]] * n),
        oracle_fn=oracle,
        flat_kinds=frozenset({ConnectionKind.PRIMAL}),
        coord_converters={
            "mixture": lambda c: mixture_to_natural(c),
            "natural": lambda c: np.asarray(c, dtype=float),
        },
    )


# conditioning guards: theta2 bounded away from zero, theta1 bounded
_GAUSS_T2_MAX = -0.025
_GAUSS_T1_MAX = 50.0


def _make_gaussian1d() -> ManifoldModel:
    def chart_of(X):
        t1 = np.clip(X[:, 0], -_GAUSS_T1_COLLAR, _GAUSS_T1_COLLAR)
        t2 = np.clip(X[:, 1], -_GAUSS_T1_COLLAR, _GAUSS_T2_COLLAR)
        return t1, t2

    def metric(X):
        t1, t2 = chart_of(X)
        m = X.shape[0]
        g = np.zeros((m, 2, 2))
        g[:, 0, 0] = -1.0 / (2.0 * t2)
        g[:, 0, 1] = g[:, 1, 0] = t1 / (2.0 * t2 * t2)
        g[:, 1, 1] = -(t1 * t1) / (2.0 * t2**3) + 1.0 / (2.0 * t2 * t2)
        return g

    def zero_gamma(X):
        return np.zeros((X.shape[0], 2, 2, 2))

    def gamma_star(X):
        # third derivatives of the Gaussian log-partition
        t1, t2 = chart_of(X)
        m = X.shape[0]
        T = np.zeros((m, 2, 2, 2))
        t112 = 1.0 / (2.0 * t2 * t2)
        t122 = -t1 / t2**3
        t222 = 1.5 * t1 * t1 / t2**4 - 1.0 / t2**3
        T[:, 0, 0, 1] = T[:, 0, 1, 0] = T[:, 1, 0, 0] = t112
        T[:, 0, 1, 1] = T[:, 1, 0, 1] = T[:, 1, 1, 0] = t122
        T[:, 1, 1, 1] = t222
        return T

    def domain(X):
        return (X[:, 1] < _GAUSS_T2_MAX) & (np.abs(X[:, 0]) < _GAUSS_T1_MAX)

    def moments(theta):
        mu = -theta[0] / (2.0 * theta[1])
        var = -1.0 / (2.0 * theta[1])
        return mu, var

    def oracle(theta_p, theta_q):
        mu_p, var_p = moments(theta_p)
        mu_q, var_q = moments(theta_q)
        return float(
            0.5 * math.log(var_p / var_q)
            + (var_q + (mu_q - mu_p) ** 2) / (2.0 * var_p)
            - 0.5
        )

    return ManifoldModel(
        name="gaussian1d",
        dim=2,
        params=(2,),
        spec_string="gaussian1d:2",
        chart="natural parameters (theta1, theta2), theta2 < 0",
        metric_fn=metric,
        christoffel_fns={ConnectionKind.PRIMAL: zero_gamma, ConnectionKind.DUAL: gamma_star},
        domain_fn=domain,
        safe_box=np.array([[-1.0, 1.0], [-1.0, -0.4]]),
        oracle_fn=oracle,
        flat_kinds=frozenset({ConnectionKind.PRIMAL}),
    )


def _make_alpha_categorical(n: int, alpha: float) -> ManifoldModel:
    def clipped_probs(X):
        eta = np.clip(X, _ALPHA_PROB_COLLAR, None)
        tail = np.clip(1.0 - eta.sum(axis=1, keepdims=True), _ALPHA_PROB_COLLAR, None)
        return eta, tail

    def metric(X):
        eta, tail = clipped_probs(X)
        m = X.shape[0]
        g = np.empty((m, n, n))
        g[:] = (1.0 / tail)[:, :, None]
        idx = np.arange(n)
        g[:, idx, idx] += 1.0 / eta
        return g

    def amari_chentsov(X):
        eta, tail = clipped_probs(X)
        m = X.shape[0]
        T = np.empty((m, n, n, n))
        T[:] = (-1.0 / tail**2)[:, :, None, None]
        idx = np.arange(n)
        T[:, idx, idx, idx] += 1.0 / eta**2
        return T

    def gamma_factory(sign):
        # lower-index a-connection symbols: -(1 + sign * a)/2 times the
        # cubic tensor (the Levi-Civita part is -T/2 on the simplex)
        coeff = -(1.0 + sign * alpha) / 2.0

        def gamma(X):
            return coeff * amari_chentsov(X)

        return gamma

    def domain(X):
        full = np.concatenate([X, 1.0 - X.sum(axis=1, keepdims=True)], axis=1)
        return full.min(axis=1) >= _MIN_PROB

    return ManifoldModel(
        name="alpha_categorical",
        dim=n,
        params=(n, alpha),
        spec_string=f"alpha_categorical:{n}:{alpha:g}",
        chart="mixture coordinates (head probabilities)",
        metric_fn=metric,
        christoffel_fns={
            ConnectionKind.PRIMAL: gamma_factory(+1.0),
            ConnectionKind.DUAL: gamma_factory(-1.0),
        },
        domain_fn=domain,
        safe_box=np.array([[0.3 / n, 0.9 / n]] * n),
        oracle_fn=None,
        flat_kinds=frozenset(),
        coord_converters={
            "mixture": lambda c: np.asarray(c, dtype=float),
            "natural": lambda c: natural_to_mixture(c),
        },
    )


# ---------------------------------------------------------------------------
# catalog front door
# ---------------------------------------------------------------------------

_SCHEMAS = {
    "euclidean": {
        "params": "euclidean:<dim>",
        "chart": "Cartesian coordinates on R^n",
        "domain": "all of R^n",
        "dually_flat": True,
    },
    "sphere": {
        "params": "sphere:2[:radius]   (radius > 0, default 1)",
        "chart": "spherical chart (theta, phi)",
        "domain": f"{_SPHERE_CAP} < theta < pi - {_SPHERE_CAP}",
        "dually_flat": False,
    },
    "categorical": {
        "params": "categorical:<dim>",
        "chart": "natural (log-ratio) coordinates",
        "domain": f"all n+1 outcome probabilities >= {_MIN_PROB}",
        "dually_flat": True,
    },
    "gaussian1d": {
        "params": "gaussian1d[:2]",
        "chart": "natural parameters (theta1, theta2)",
        "domain": f"theta2 < {_GAUSS_T2_MAX}, |theta1| < {_GAUSS_T1_MAX:g}",
        "dually_flat": True,
    },
    "alpha_categorical": {
        "params": "alpha_categorical:<dim>:<alpha>   (alpha in (-1, 1))",
        "chart": "mixture coordinates (head probabilities)",
        "domain": f"all n+1 probabilities >= {_MIN_PROB}",
        "dually_flat": False,
    },
}


def builtin_names() -> list:
    return list(_SCHEMAS)


def builtin_schemas() -> dict:
    return {k: dict(v) for k, v in _SCHEMAS.items()}


def make_builtin(name: str, params: Sequence[float]) -> ManifoldModel:
    """Construct a catalog model; raises InvalidModelSpec on bad input."""
    params = list(params)

    def dim_param(default=None):
        if not params:
            if default is None:
                raise InvalidModelSpec(f"{name} requires a dimension parameter")
            return default
        d = params[0]
        if d != int(d) or int(d) < 1:
            raise InvalidModelSpec(f"dimension must be a positive integer, got {d!r}")
        return int(d)

    if name == "euclidean":
        n = dim_param()
        if len(params) > 1:
            raise InvalidModelSpec("euclidean takes a single dimension parameter")
        return _make_euclidean(n)

    if name == "sphere":
        n = dim_param(default=2)
        if n != 2:
            raise InvalidModelSpec("only the 2-sphere is supported")
        radius = float(params[1]) if len(params) > 1 else 1.0
        if radius <= 0:
            raise InvalidModelSpec("sphere radius must be positive")
        if len(params) > 2:
            raise InvalidModelSpec("sphere takes (dim, radius)")
        return _make_sphere(radius)

    if name == "categorical":
        n = dim_param()
        if len(params) > 1:
            raise InvalidModelSpec("categorical takes a single dimension parameter")
        return _make_categorical(n)

    if name == "gaussian1d":
        n = dim_param(default=2)
        if n != 2 or len(params) > 1:
            raise InvalidModelSpec("gaussian1d is two-dimensional")
        return _make_gaussian1d()

    if name == "alpha_categorical":
        n = dim_param()
        if len(params) < 2:
            raise InvalidModelSpec("alpha_categorical requires (dim, alpha)")
        alpha = float(params[1])
        if not (-1.0 < alpha < 1.0):
            raise InvalidModelSpec(f"alpha must lie in (-1, 1), got {alpha}")
        if len(params) > 2:
            raise InvalidModelSpec("alpha_categorical takes (dim, alpha)")
        return _make_alpha_categorical(n, alpha)

    raise InvalidModelSpec(f"unknown builtin {name!r}; known: {', '.join(_SCHEMAS)}")


def parse_model_spec(spec) -> ManifoldModel:
    """Parse 'name:dim[:param...]' strings or {'name':..., 'params': [...]} dicts."""
    if isinstance(spec, dict):
        try:
            return make_builtin(spec["name"], spec.get("params", []))
        except KeyError:
            raise InvalidModelSpec("model object requires a 'name' field") from None
    if not isinstance(spec, str) or not spec:
        raise InvalidModelSpec(f"bad model spec: {spec!r}")
    parts = spec.split(":")
    name, raw = parts[0], parts[1:]
    try:
        params = [float(tok) for tok in raw]
    except ValueError:
        raise InvalidModelSpec(f"non-numeric parameter in model spec {spec!r}") from None
    return make_builtin(name, params)
