"""Model catalog: metric/connection fields, domains, chart conversions."""

import numpy as np
import pytest

from dualgeo import (
    BaseMismatch,
    ConnectionKind,
    InvalidModelSpec,
    Point,
    PointOutOfDomain,
    builtin_names,
    make_builtin,
    mixture_to_natural,
    natural_to_mixture,
    parse_model_spec,
    sample_points,
)

ALL = ["euclidean", "sphere", "categorical", "gaussian1d", "alpha_categorical"]


def test_catalog_has_five_builtins():
    assert sorted(builtin_names()) == sorted(ALL)


@pytest.mark.parametrize("name", ALL)
def test_metric_symmetric_positive_definite(models, rng, name):
    model = models[name]
    X = sample_points(model, 100, rng)
    g = model.metric_batch(X)
    assert np.abs(g - np.swapaxes(g, 1, 2)).max() < 1e-15
    assert np.linalg.eigvalsh(g).min() > 0.0


@pytest.mark.parametrize("name", ALL)
def test_connection_duality_relation(models, rng, name):
    # d_k g_ij must equal Gamma_{ki,j} + Gamma*_{kj,i} (finite differences)
    model = models[name]
    X = sample_points(model, 100, rng)
    h = 1e-5
    Gp = model.christoffel_batch(X, ConnectionKind.PRIMAL)
    Gd = model.christoffel_batch(X, ConnectionKind.DUAL)
    worst = 0.0
    for k in range(model.dim):
        e = np.zeros(model.dim)
        e[k] = h
        dg = (model.metric_batch(X + e) - model.metric_batch(X - e)) / (2 * h)
        resid = dg - (Gp[:, k, :, :] + np.swapaxes(Gd[:, k, :, :], 1, 2))
        worst = max(worst, np.abs(resid).max())
    assert worst <= 1e-6


@pytest.mark.parametrize("name", ALL)
@pytest.mark.parametrize("kind", [ConnectionKind.PRIMAL, ConnectionKind.DUAL])
def test_torsion_free_symbols(models, rng, name, kind):
    model = models[name]
    X = sample_points(model, 50, rng)
    G = model.christoffel_batch(X, kind)
    assert np.array_equal(G, np.swapaxes(G, 1, 2))


@pytest.mark.parametrize("name", ["euclidean", "sphere"])
def test_self_dual_builtins_have_equal_symbols(models, rng, name):
    model = models[name]
    X = sample_points(model, 100, rng)
    Gp = model.christoffel_batch(X, ConnectionKind.PRIMAL)
    Gd = model.christoffel_batch(X, ConnectionKind.DUAL)
    assert np.array_equal(Gp, Gd)


def test_bernoulli_metric_value():
    model = make_builtin("categorical", [1])
    g = model.metric_at(model.point([0.0]))
    assert g.shape == (1, 1)
    assert abs(g[0, 0] - 0.25) < 1e-14


def test_sphere_metric_at_equator(models):
    sp = models["sphere"]
    g = sp.metric_at(sp.point([np.pi / 2, 0.0]))
    assert np.abs(g - np.eye(2)).max() < 1e-14


def test_inner_product_euclidean(models):
    eu = make_builtin("euclidean", [2])
    p = eu.point([0.0, 0.0])
    assert eu.inner_product(p, eu.tangent(p, [1, 0]), eu.tangent(p, [0, 1])) == 0.0
    v = eu.tangent(p, [3, 4])
    assert eu.inner_product(p, v, v) == 25.0


def test_inner_product_bernoulli():
    model = make_builtin("categorical", [1])
    p = model.point([0.0])
    v = model.tangent(p, [2.0])
    assert abs(model.inner_product(p, v, v) - 1.0) < 1e-14


def test_inner_product_base_mismatch(models):
    eu = models["euclidean"]
    p = eu.point([0.0, 0.0, 0.0])
    other = eu.point([1.0, 0.0, 0.0])
    u = eu.tangent(p, [1, 0, 0])
    w = eu.tangent(other, [1, 0, 0])
    with pytest.raises(BaseMismatch):
        eu.inner_product(p, u, w)


def test_point_out_of_domain(models):
    sp = models["sphere"]
    with pytest.raises(PointOutOfDomain):
        sp.metric_at(Point(np.array([0.05, 0.0])))
    ga = models["gaussian1d"]
    with pytest.raises(PointOutOfDomain):
        ga.metric_at(Point(np.array([0.0, 0.5])))


@pytest.mark.parametrize(
    "name,params",
    [
        ("nosuch", [2]),
        ("euclidean", [0]),
        ("euclidean", [2.5]),
        ("sphere", [3]),
        ("sphere", [2, -1.0]),
        ("alpha_categorical", [2]),
        ("alpha_categorical", [2, 1.0]),
        ("alpha_categorical", [2, -1.5]),
        ("gaussian1d", [3]),
    ],
)
def test_make_builtin_rejects_bad_specs(name, params):
    with pytest.raises(InvalidModelSpec):
        make_builtin(name, params)


def test_parse_model_spec_strings():
    m = parse_model_spec("alpha_categorical:2:0.5")
    assert m.name == "alpha_categorical" and m.dim == 2 and m.params[1] == 0.5
    m = parse_model_spec("sphere:2:2.0")
    assert m.params[1] == 2.0
    m = parse_model_spec({"name": "categorical", "params": [3]})
    assert m.dim == 3
    with pytest.raises(InvalidModelSpec):
        parse_model_spec("categorical:two")
    with pytest.raises(InvalidModelSpec):
        parse_model_spec("")
    with pytest.raises(InvalidModelSpec):
        parse_model_spec({"params": [1]})


def test_mixture_natural_round_trip(rng):
    for _ in range(20):
        probs = rng.dirichlet(np.ones(4))
        head = probs[:3]
        theta = mixture_to_natural(head)
        back = natural_to_mixture(theta)
        assert np.abs(back - head).max() < 1e-12


def test_known_conversion():
    theta = mixture_to_natural([0.9])
    assert abs(theta[0] - np.log(9.0)) < 1e-12


def test_dualized_swaps_connections(models, rng):
    model = models["alpha_categorical"]
    dual = model.dualized()
    X = sample_points(model, 10, rng)
    assert np.array_equal(
        model.christoffel_batch(X, ConnectionKind.PRIMAL),
        dual.christoffel_batch(X, ConnectionKind.DUAL),
    )
    assert np.array_equal(
        model.christoffel_batch(X, ConnectionKind.DUAL),
        dual.christoffel_batch(X, ConnectionKind.PRIMAL),
    )
    cat = models["categorical"]
    assert cat.is_flat(ConnectionKind.PRIMAL)
    assert cat.dualized().is_flat(ConnectionKind.DUAL)
    assert not cat.dualized().is_flat(ConnectionKind.PRIMAL)


def test_connection_kind_dual_is_involution():
    assert ConnectionKind.PRIMAL.dual is ConnectionKind.DUAL
    assert ConnectionKind.DUAL.dual is ConnectionKind.PRIMAL


def test_dually_flat_builtins_carry_oracles(models):
    for name in ("euclidean", "categorical", "gaussian1d"):
        assert models[name].oracle_fn is not None
    for name in ("sphere", "alpha_categorical"):
        assert models[name].oracle_fn is None
