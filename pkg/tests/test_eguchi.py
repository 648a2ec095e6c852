"""Structure recovery, curvature tensors, classification, symmetry probing."""

import numpy as np
import pytest

from dualgeo import (
    ConnectionKind,
    DivergenceKind,
    Point,
    StencilOutOfDomain,
    classify_manifold,
    curvature_tensor,
    make_builtin,
    recover_structure,
    sample_points,
    symmetry_probe,
)

P_KIND, D_KIND = ConnectionKind.PRIMAL, ConnectionKind.DUAL


def test_recover_euclidean_identity(models, cfg):
    eu = models["euclidean"]
    rec = recover_structure(eu, DivergenceKind.AY, eu.point([0.1, -0.2, 0.4]), cfg)
    assert np.abs(rec.metric - np.eye(3)).max() < 1e-6
    assert np.abs(rec.gamma).max() < 1e-4
    assert np.abs(rec.gamma_star).max() < 1e-4
    assert rec.first_derivative_residual < 1e-6
    assert rec.mixed_identity_residual < 1e-4


def test_recover_bernoulli_metric(cfg):
    c1 = make_builtin("categorical", [1])
    rec = recover_structure(c1, DivergenceKind.CANONICAL, c1.point([0.0]), cfg)
    assert abs(rec.metric[0, 0] - 0.25) < 1e-4


@pytest.mark.parametrize(
    "name", ["sphere", "categorical", "gaussian1d", "alpha_categorical"]
)
def test_recover_matches_model_fields(models, cfg, rng, name):
    model = models[name]
    for x in sample_points(model, 2, rng, shrink=0.7):
        p = Point(x)
        rec = recover_structure(model, DivergenceKind.CANONICAL, p, cfg)
        g = model.metric_at(p)
        assert np.abs(rec.metric - g).max() <= 1e-4 * np.abs(g).max()
        assert np.abs(rec.gamma - model.christoffel_at(p, P_KIND)).max() <= 1e-3
        assert np.abs(rec.gamma_star - model.christoffel_at(p, D_KIND)).max() <= 1e-3
        assert rec.first_derivative_residual <= 1e-6
        assert rec.mixed_identity_residual <= 1e-4


@pytest.mark.parametrize("name", ["categorical", "gaussian1d"])
def test_recover_from_closed_form_oracle(models, cfg, name):
    # the closed-form reference divergence regenerates the same geometry
    model = models[name]
    p = Point(model.safe_box.mean(axis=1))
    rec = recover_structure(model, DivergenceKind.ORACLE_KL, p, cfg)
    assert np.abs(rec.gamma - model.christoffel_at(p, P_KIND)).max() <= 1e-3
    assert np.abs(rec.gamma_star - model.christoffel_at(p, D_KIND)).max() <= 1e-3


def test_curvature_flat_cases(models, cfg):
    eu = models["euclidean"]
    assert np.abs(curvature_tensor(eu, P_KIND, eu.point([0.0, 0.1, 0.2]), cfg)).max() == 0.0
    cat = models["categorical"]
    p = cat.point([0.3, -0.2])
    assert np.abs(curvature_tensor(cat, P_KIND, p, cfg)).max() == 0.0
    assert np.abs(curvature_tensor(cat, D_KIND, p, cfg)).max() <= 1e-6


def test_curvature_antisymmetry(models, cfg):
    al = models["alpha_categorical"]
    R = curvature_tensor(al, P_KIND, al.point([0.3, 0.35]), cfg)
    assert np.abs(R + np.swapaxes(R, 1, 2)).max() < 1e-12


@pytest.mark.parametrize("radius,expected", [(1.0, 1.0), (2.0, 0.25)])
def test_sphere_sectional_curvature(cfg, radius, expected):
    sp = make_builtin("sphere", [2, radius])
    p = sp.point([1.15, 0.4])
    R = curvature_tensor(sp, P_KIND, p, cfg)
    g = sp.metric_at(p)
    low = np.einsum("lm,mijk->ijkl", g, R)
    K = low[0, 1, 1, 0] / np.linalg.det(g)
    assert abs(K - expected) < 1e-5


def test_classification_verdicts(models, cfg, rng):
    expected = {
        "euclidean": "SelfDual",
        "sphere": "SelfDual",
        "categorical": "DuallyFlat",
        "gaussian1d": "DuallyFlat",
    }
    for name, verdict in expected.items():
        model = models[name]
        pts = [Point(x) for x in sample_points(model, 3, rng, shrink=0.7)]
        rep = classify_manifold(model, pts, cfg)
        assert rep.verdict == verdict, f"{name}: {rep.to_dict()}"
    al = models["alpha_categorical"]
    pts = [Point(x) for x in sample_points(al, 3, rng, shrink=0.7)]
    rep = classify_manifold(al, pts, cfg)
    assert rep.verdict in ("General", "Symmetric")
    d = rep.to_dict()
    assert set(d) >= {
        "self_dual_residual",
        "flatness_residual",
        "covariant_curvature_derivative_residual",
        "sectional_probe_residual",
        "verdict",
    }


def test_classification_requires_points(models, cfg):
    with pytest.raises(ValueError):
        classify_manifold(models["euclidean"], [], cfg)


def test_symmetry_probe_dually_flat_equality(models, cfg, rng):
    cat = make_builtin("categorical", [1])
    p = cat.point([0.0])
    qs = [cat.point([x]) for x in rng.uniform(-1.5, 1.5, 20)]
    res = symmetry_probe(cat, p, qs, cfg)
    assert res.rank_agreement == 1.0
    assert res.orderings_match
    assert res.max_equality_error <= 1e-6
    assert len(res.skipped) == 0
    assert res.pairs.shape == (20, 2)


def test_symmetry_probe_alpha_rank_agreement(models, cfg, rng):
    al = models["alpha_categorical"]
    p = al.point([0.3, 0.34])
    qs = [Point(x) for x in sample_points(al, 30, rng, shrink=0.85)]
    res = symmetry_probe(al, p, qs, cfg)
    assert res.rank_agreement == 1.0
    assert len(res.skipped) <= 6


def test_stencil_out_of_domain(models, cfg):
    al = models["alpha_categorical"]
    edge = al.point([0.003, 0.3])  # valid point, but the stencil pokes outside
    with pytest.raises(StencilOutOfDomain):
        recover_structure(al, DivergenceKind.CANONICAL, edge, cfg)
