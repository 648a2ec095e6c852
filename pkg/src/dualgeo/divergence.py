"""The divergence family: geodesic-integral divergences, their duals, and gradients.

Implemented functionals, for a pair (p, q) joined by unique geodesics of both
connections:

    ay_divergence            integral of t * |sigma_dot|^2 along the primal
                             geodesic from p to q
    canonical_divergence     integral of <Pi_t, sigma_dot> along the primal
                             geodesic, where Pi_t is the primal-transport of
                             the primal log vector along the dual geodesic
    dual_canonical_divergence   the same construction with the connections
                             swapped
    pseudo_norm              metric pairing at p of the two log vectors
    path_functional          both line integrals of (Pi, Pi*) against an
                             arbitrary path's velocity; their sum is
                             path-independent and equals the pseudo-norm
    divergence_gradient      Riemannian gradient in the second slot by central
                             finite differences
    oracle_divergence        closed-form reference value on models that carry one

All quadratures are fixed-order Gauss-Legendre on [0, 1]; each node requires
its own two-point solve, so nodes are batched and solved as stacked systems.
Pairs closer than the near-diagonal guard are answered by the second-order
quadratic form directly, since shooting Jacobians degenerate at the diagonal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import DEFAULT_CONFIG, ToleranceConfig
from .errors import OracleUnavailable, PointOutOfDomain, QuadratureFailure
from .geodesic import (
    BatchedCurves,
    Curve,
    _curves_from_initial,
    _shoot_many,
    _transport_many,
)
from .manifold import ConnectionKind, ManifoldModel, Point, Tangent

__all__ = [
    "DivergenceKind",
    "PathFunctionalResult",
    "PiFieldCache",
    "ay_divergence",
    "canonical_divergence",
    "dual_canonical_divergence",
    "pseudo_norm",
    "pi_field",
    "path_functional",
    "divergence_gradient",
    "oracle_divergence",
    "divergence_value",
]

NEAR_DIAGONAL = 1e-6  # chart distance below which the quadratic form is exact enough


class DivergenceKind(enum.Enum):
    AY = "ay"
    CANONICAL = "canonical"
    CANONICAL_DUAL = "dual"
    PSEUDO_NORM = "pseudonorm"
    ORACLE_KL = "oracle"


@dataclass(frozen=True)
class PathFunctionalResult:
    """Line integrals of the two transported-difference fields along one path."""

    primal_integral: float
    dual_integral: float

    @property
    def sum(self) -> float:
        return self.primal_integral + self.dual_integral


class PiFieldCache:
    """Warm-start state for repeated pi_field calls along one path.

    Holds the previous node's two log solutions; must not be shared across
    concurrent evaluations.
    """

    def __init__(self):
        self.v_primal: Optional[np.ndarray] = None
        self.v_dual: Optional[np.ndarray] = None


def _gauss_legendre(nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return (x + 1.0) / 2.0, w / 2.0


def _check_inside(model: ManifoldModel, X: np.ndarray, label: str):
    ok = model.contains_batch(X)
    if not ok.all():
        raise PointOutOfDomain(
            f"{label} outside the domain of {model.spec_string} "
            f"(first offender: {X[np.argmin(ok)]!r})"
        )


def _quadratic_form(model: ManifoldModel, P, Q, half: bool) -> np.ndarray:
    d = Q - P
    g = model.metric_batch(P)
    vals = np.einsum("mi,mij,mj->m", d, g, d)
    return 0.5 * vals if half else vals


def _metric_pairing(model: ManifoldModel, X, U, V) -> np.ndarray:
    g = model.metric_batch(X)
    return np.einsum("mi,mij,mj->m", U, g, V)


# ---------------------------------------------------------------------------
# transported difference fields
# ---------------------------------------------------------------------------


def _pi_many(
    model: ManifoldModel,
    bases: np.ndarray,
    targets: np.ndarray,
    cfg: ToleranceConfig,
    want_primal: bool = True,
    want_dual: bool = True,
    force_ode: bool = False,
    node_times: Optional[np.ndarray] = None,
    v_init_primal: Optional[np.ndarray] = None,
    v_init_dual: Optional[np.ndarray] = None,
):
    """Batched transported difference vectors at the targets.

    The primal field is the primal-transport, along the dual geodesic from
    base to target, of the primal log vector; the dual field swaps the roles.
    Returns (Pi, PiStar, Vp, Vd); unrequested fields come back as None.
    """
    Pi = PiStar = None
    Vp = Vd = None
    primal_flat = model.is_flat(ConnectionKind.PRIMAL) and not force_ode
    dual_flat = model.is_flat(ConnectionKind.DUAL) and not force_ode
    # the primal log is needed for the primal field itself and, unless the dual
    # connection is flat, as the transport track for the dual field (and dually)
    need_vp = want_primal or (want_dual and not dual_flat)
    need_vd = want_dual or (want_primal and not primal_flat)

    if need_vp:
        Vp, _ = _shoot_many(
            model,
            ConnectionKind.PRIMAL,
            bases,
            targets,
            cfg,
            v_init=v_init_primal,
            force_ode=force_ode,
            node_times=node_times,
        )
    if need_vd:
        Vd, _ = _shoot_many(
            model,
            ConnectionKind.DUAL,
            bases,
            targets,
            cfg,
            v_init=v_init_dual,
            force_ode=force_ode,
            node_times=node_times,
        )
    if want_primal:
        if primal_flat:
            Pi = Vp.copy()
        else:
            dual_curves = _curves_from_initial(
                model, ConnectionKind.DUAL, bases, Vd, cfg, force_ode=force_ode
            )
            Pi = _transport_many(
                model, ConnectionKind.PRIMAL, dual_curves, Vp, cfg, force_ode=force_ode
            )
    if want_dual:
        if dual_flat:
            PiStar = Vd.copy()
        else:
            primal_curves = _curves_from_initial(
                model, ConnectionKind.PRIMAL, bases, Vp, cfg, force_ode=force_ode
            )
            PiStar = _transport_many(
                model, ConnectionKind.DUAL, primal_curves, Vd, cfg, force_ode=force_ode
            )
    return Pi, PiStar, Vp, Vd


def pi_field(
    model: ManifoldModel,
    p: Point,
    gamma: Curve,
    t: float,
    cfg: ToleranceConfig = DEFAULT_CONFIG,
    cache: Optional[PiFieldCache] = None,
):
    """The pair of transported difference vectors at gamma(t), based there.

    A PiFieldCache warm-starts the two shooting solves from the previous
    node's solution when evaluating many nodes along one path.
    """
    model.require_inside(p)
    x = np.atleast_1d(gamma.position(float(t)))
    base = p.coords[None, :]
    target = x[None, :]
    vp0 = None if cache is None or cache.v_primal is None else cache.v_primal[None, :]
    vd0 = None if cache is None or cache.v_dual is None else cache.v_dual[None, :]
    Pi, PiStar, Vp, Vd = _pi_many(
        model,
        base,
        target,
        cfg,
        v_init_primal=vp0,
        v_init_dual=vd0,
        node_times=np.array([t]),
    )
    if cache is not None:
        cache.v_primal = Vp[0].copy()
        cache.v_dual = Vd[0].copy()
    at = Point(x)
    return Tangent(at, Pi[0]), Tangent(at, PiStar[0])


# ---------------------------------------------------------------------------
# batched divergence evaluators
# ---------------------------------------------------------------------------


def _main_curves(model, kind, P, Q, cfg, force_ode=False) -> BatchedCurves:
    V, _ = _shoot_many(model, kind, P, Q, cfg, force_ode=force_ode)
    return _curves_from_initial(model, kind, P, V, cfg, force_ode=force_ode)


def _nodes_of(curves: BatchedCurves, t_nodes: np.ndarray):
    """Positions and velocities of every curve at every quadrature node."""
    xs = np.stack([curves.position_all(t) for t in t_nodes], axis=1)  # (m, k, n)
    vs = np.stack([curves.velocity_all(t) for t in t_nodes], axis=1)
    return xs, vs


def _ay_many(model, P, Q, cfg, force_ode=False) -> np.ndarray:
    m, n = P.shape
    out = np.empty(m)
    guard = np.linalg.norm(Q - P, axis=1) < NEAR_DIAGONAL
    out[guard] = _quadratic_form(model, P[guard], Q[guard], half=True)
    act = ~guard
    if act.any():
        t_nodes, w = _gauss_legendre(cfg.quad_nodes)
        curves = _main_curves(model, ConnectionKind.PRIMAL, P[act], Q[act], cfg, force_ode)
        xs, vs = _nodes_of(curves, t_nodes)
        flat_x = xs.reshape(-1, n)
        speed2 = _metric_pairing(model, flat_x, vs.reshape(-1, n), vs.reshape(-1, n))
        speed2 = speed2.reshape(-1, t_nodes.shape[0])
        if not np.all(np.isfinite(speed2)):
            raise QuadratureFailure("non-finite integrand at a quadrature node")
        out[act] = speed2 @ (w * t_nodes)
    return out


def _canonical_many(model, P, Q, cfg, force_ode=False) -> np.ndarray:
    m, n = P.shape
    out = np.empty(m)
    guard = np.linalg.norm(Q - P, axis=1) < NEAR_DIAGONAL
    out[guard] = _quadratic_form(model, P[guard], Q[guard], half=True)
    act = ~guard
    if act.any():
        t_nodes, w = _gauss_legendre(cfg.quad_nodes)
        k = t_nodes.shape[0]
        Pa, Qa = P[act], Q[act]
        curves = _main_curves(model, ConnectionKind.PRIMAL, Pa, Qa, cfg, force_ode)
        xs, vs = _nodes_of(curves, t_nodes)
        bases = np.repeat(Pa, k, axis=0)
        targets = xs.reshape(-1, n)
        times = np.tile(t_nodes, Pa.shape[0])
        Pi, _, _, _ = _pi_many(
            model,
            bases,
            targets,
            cfg,
            want_primal=True,
            want_dual=False,
            force_ode=force_ode,
            node_times=times,
        )
        integrand = _metric_pairing(model, targets, Pi, vs.reshape(-1, n)).reshape(-1, k)
        if not np.all(np.isfinite(integrand)):
            raise QuadratureFailure("non-finite integrand at a quadrature node")
        out[act] = integrand @ w
    return out


def _pseudo_norm_many(model, P, Q, cfg, force_ode=False) -> np.ndarray:
    m, _ = P.shape
    out = np.empty(m)
    guard = np.linalg.norm(Q - P, axis=1) < NEAR_DIAGONAL
    # the second-order limit of the log pairing carries no 1/2
    out[guard] = _quadratic_form(model, P[guard], Q[guard], half=False)
    act = ~guard
    if act.any():
        Pa, Qa = P[act], Q[act]
        Vp, _ = _shoot_many(model, ConnectionKind.PRIMAL, Pa, Qa, cfg, force_ode=force_ode)
        Vd, _ = _shoot_many(model, ConnectionKind.DUAL, Pa, Qa, cfg, force_ode=force_ode)
        out[act] = _metric_pairing(model, Pa, Vp, Vd)
    return out


def _oracle_many(model, P, Q) -> np.ndarray:
    if model.oracle_fn is None:
        raise OracleUnavailable(f"{model.spec_string} has no closed-form divergence")
    return np.array([model.oracle_fn(p, q) for p, q in zip(P, Q)])


def _divergence_many(
    model: ManifoldModel,
    kind: DivergenceKind,
    P: np.ndarray,
    Q: np.ndarray,
    cfg: ToleranceConfig,
    force_ode: bool = False,
) -> np.ndarray:
    """Vectorized dispatch over pairs; P and Q are (m, n) chart arrays."""
    _check_inside(model, P, "first argument")
    _check_inside(model, Q, "second argument")
    if kind is DivergenceKind.AY:
        return _ay_many(model, P, Q, cfg, force_ode)
    if kind is DivergenceKind.CANONICAL:
        return _canonical_many(model, P, Q, cfg, force_ode)
    if kind is DivergenceKind.CANONICAL_DUAL:
        return _canonical_many(model.dualized(), P, Q, cfg, force_ode)
    if kind is DivergenceKind.PSEUDO_NORM:
        return _pseudo_norm_many(model, P, Q, cfg, force_ode)
    if kind is DivergenceKind.ORACLE_KL:
        return _oracle_many(model, P, Q)
    raise ValueError(f"unknown divergence kind {kind!r}")


# ---------------------------------------------------------------------------
# public scalar operations
# ---------------------------------------------------------------------------


def ay_divergence(
    model: ManifoldModel, p: Point, q: Point, cfg: ToleranceConfig = DEFAULT_CONFIG
) -> float:
    """Time-weighted energy of the primal geodesic from p to q."""
    return float(
        _divergence_many(model, DivergenceKind.AY, p.coords[None], q.coords[None], cfg)[0]
    )


def canonical_divergence(
    model: ManifoldModel,
    p: Point,
    q: Point,
    cfg: ToleranceConfig = DEFAULT_CONFIG,
    force_ode: bool = False,
) -> float:
    """Line integral of the transported-difference field along the primal geodesic."""
    return float(
        _divergence_many(
            model, DivergenceKind.CANONICAL, p.coords[None], q.coords[None], cfg, force_ode
        )[0]
    )


def dual_canonical_divergence(
    model: ManifoldModel,
    p: Point,
    q: Point,
    cfg: ToleranceConfig = DEFAULT_CONFIG,
    force_ode: bool = False,
) -> float:
    """The canonical construction applied to the manifold with connections swapped."""
    return float(
        _divergence_many(
            model, DivergenceKind.CANONICAL_DUAL, p.coords[None], q.coords[None], cfg, force_ode
        )[0]
    )


def pseudo_norm(
    model: ManifoldModel, p: Point, q: Point, cfg: ToleranceConfig = DEFAULT_CONFIG
) -> float:
    """Metric pairing at p of the primal and dual log vectors of q."""
    return float(
        _divergence_many(
            model, DivergenceKind.PSEUDO_NORM, p.coords[None], q.coords[None], cfg
        )[0]
    )


def oracle_divergence(model: ManifoldModel, p: Point, q: Point) -> float:
    """Closed-form reference divergence; OracleUnavailable if the model has none."""
    return model.oracle(p, q)


def _piecewise_nodes(cfg: ToleranceConfig, breaks) -> tuple:
    """Gauss-Legendre nodes split at a curve's smoothness breakpoints."""
    edges = [0.0]
    if breaks is not None:
        edges.extend(float(b) for b in np.sort(np.asarray(breaks)) if 0.0 < b < 1.0)
    edges.append(1.0)
    pieces = len(edges) - 1
    per_piece = max(8, int(np.ceil(cfg.quad_nodes / pieces)))
    x, w = _gauss_legendre(per_piece)
    ts, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        ts.append(a + (b - a) * x)
        ws.append((b - a) * w)
    return np.concatenate(ts), np.concatenate(ws)


def path_functional(
    model: ManifoldModel,
    p: Point,
    gamma: Curve,
    cfg: ToleranceConfig = DEFAULT_CONFIG,
    force_ode: bool = False,
) -> PathFunctionalResult:
    """Both line integrals of the transported-difference fields along gamma.

    Their sum depends only on the endpoints and equals the pseudo-norm of
    (p, gamma(1)); the integrals are taken against gamma's own velocity.
    """
    model.require_inside(p)
    n = p.dim
    t_nodes, w = _piecewise_nodes(cfg, gamma.breaks)
    xs = np.atleast_2d(gamma.position(t_nodes))
    vs = np.atleast_2d(gamma.velocity(t_nodes))
    _check_inside(model, xs, "path node")
    bases = np.repeat(p.coords[None, :], t_nodes.shape[0], axis=0)
    Pi, PiStar, _, _ = _pi_many(
        model, bases, xs, cfg, force_ode=force_ode, node_times=t_nodes
    )
    primal = float(_metric_pairing(model, xs, Pi, vs) @ w)
    dual = float(_metric_pairing(model, xs, PiStar, vs) @ w)
    return PathFunctionalResult(primal_integral=primal, dual_integral=dual)


def _gradient_many(
    model: ManifoldModel,
    which: DivergenceKind,
    P: np.ndarray,
    Q: np.ndarray,
    cfg: ToleranceConfig,
) -> np.ndarray:
    """Riemannian gradients in the second slot for m pairs, one batched call."""
    m, n = Q.shape
    h = cfg.fd_step
    stencil = np.repeat(Q[:, None, :], 2 * n, axis=1)
    for j in range(n):
        stencil[:, 2 * j, j] += h
        stencil[:, 2 * j + 1, j] -= h
    bases = np.repeat(P, 2 * n, axis=0)
    vals = _divergence_many(model, which, bases, stencil.reshape(-1, n), cfg)
    vals = vals.reshape(m, 2 * n)
    cov = (vals[:, 0::2] - vals[:, 1::2]) / (2.0 * h)
    g = model.metric_batch(Q)
    return np.linalg.solve(g, cov[..., None])[..., 0]


def divergence_gradient(
    model: ManifoldModel,
    which: DivergenceKind,
    p: Point,
    q: Point,
    cfg: ToleranceConfig = DEFAULT_CONFIG,
) -> Tangent:
    """Riemannian gradient at q of x -> divergence(p, x).

    Central finite differences of step cfg.fd_step in the chart, with the
    inverse metric applied to the coordinate gradient; all stencil
    evaluations run as one batch.
    """
    model.require_inside(p)
    model.require_inside(q)
    grads = _gradient_many(model, which, p.coords[None, :], q.coords[None, :], cfg)
    return Tangent(q, grads[0])


def divergence_value(
    model: ManifoldModel,
    kind: DivergenceKind,
    p: Point,
    q: Point,
    cfg: ToleranceConfig = DEFAULT_CONFIG,
) -> float:
    """Uniform scalar entry point used by the command line front end."""
    return float(
        _divergence_many(model, kind, p.coords[None], q.coords[None], cfg)[0]
    )
