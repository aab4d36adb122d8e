from __future__ import annotations

from itertools import product

import pytest
import sympy as sp

from pseudosym.catalog import CATALOG, builtin
from pseudosym.curvature import CurvatureBundle
from pseudosym.symbols import SymbolContext
from pseudosym.tensor import ComponentTensor, MetricSpec, first_bianchi_residual, is_generalized_curvature

from oracle import som_raychaudhuri
from reference import jet_symbol_map, to_sympy


@pytest.fixture(scope="module")
def rt_locals(rt_metric, sympy_rt):
    _, s = sympy_rt
    names = {n: sp.Symbol(n) for n in ("t", "a", "b", "q", "r", "x3", "x4")}
    names.update(jet_symbol_map(rt_metric.ctx, s["f"], (s["x3"], s["x4"])))
    return names


@pytest.fixture(scope="module")
def sympy_sr():
    return som_raychaudhuri()


def _agree(mine: ComponentTensor, theirs: dict, ctx, names) -> None:
    for idx in product(range(mine.dim), repeat=mine.valence):
        diff = to_sympy(mine[idx], ctx, names) - theirs[idx]
        assert sp.simplify(diff) == 0, idx


# independent cross-checks ---------------------------------------------------------

def test_rt_riemann_matches_sympy(rt, rt_metric, sympy_rt, rt_locals):
    _agree(rt.R, sympy_rt[0].R(), rt_metric.ctx, rt_locals)


def test_rt_ricci_and_scalar_match_sympy(rt, rt_metric, sympy_rt, rt_locals):
    geo = sympy_rt[0]
    _agree(rt.S, geo.S(), rt_metric.ctx, rt_locals)
    assert sp.simplify(to_sympy(rt.kappa, rt_metric.ctx, rt_locals) - geo.kappa()) == 0


def test_rt_weyl_matches_sympy(rt, rt_metric, sympy_rt, rt_locals):
    _agree(rt.C, sympy_rt[0].C(), rt_metric.ctx, rt_locals)


def test_sr_curvature_matches_sympy(sr, sr_metric, sympy_sr):
    geo, _ = sympy_sr
    names = {n: sp.Symbol(n) for n in ("t", "r", "z", "phi", "a")}
    _agree(sr.R, geo.R(), sr_metric.ctx, names)
    _agree(sr.S, geo.S(), sr_metric.ctx, names)
    _agree(sr.C, geo.C(), sr_metric.ctx, names)


# derived tensors ----------------------------------------------------------------------

def test_minkowski_is_flat():
    b = CurvatureBundle(builtin("minkowski"))
    for T in (b.R, b.S, b.C, b.W, b.K, b.P):
        assert T.is_zero()
    assert b.kappa.is_zero()


def test_einstein_metric_weyl_equals_concircular():
    ctx = SymbolContext(("x1", "x2", "x3", "x4"), namespace="curvature-einstein", nonzero=("x4",))
    w = ctx.parse("1/x4^2")
    g = ComponentTensor(4, 2, {(i, i): w for i in range(4)}, "symmetric-pair")
    b = CurvatureBundle(MetricSpec(ctx, g, "hyperbolic"))
    assert (b.C - b.W).is_zero()
    assert (b.W - (b.R - b.gg.scale(b.kappa / 24))).is_zero()
    assert b.C.is_zero()


def test_conharmonic_relation(rt):
    n = rt.n
    residual = rt.K - rt.C + rt.gg.scale(rt.kappa / (2 * (n - 2) * (n - 1)))
    assert residual.is_zero()


def test_half_gg_is_G(rt):
    assert (rt.gg - rt.G.scale(2)).is_zero()


@pytest.mark.parametrize("name", ["C", "W", "K"])
def test_derived_tensors_are_curvature_like(rt, name):
    assert is_generalized_curvature(rt.tensor(name))


def test_projective_tensor_not_pair_symmetric(rt, rt_parse):
    P = rt.P
    assert P[0, 1, 1, 0] == rt_parse("2*(3*q - 2*b*r^2)/(3*r^3)")
    assert any(P[i, j, k, l] != P[k, l, i, j] for i, j, k, l in P.keys())


# divergence ---------------------------------------------------------------------------

def test_energy_momentum_divergence_free(rt_em):
    assert rt_em.div.is_zero()


def test_weyl_divergence_nonzero(rt):
    assert not rt.div("C").is_zero()


def test_metric_divergence_zero(rt):
    assert rt.div("g").is_zero()


def test_riemann_divergence_nonzero(rt):
    assert not rt.div("R").is_zero()


# Bianchi identities --------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(CATALOG))
def test_bianchi_identities(name):
    b = CurvatureBundle(builtin(name))
    assert first_bianchi_residual(b.R) is None
    dR = b.nabla("R")
    n = b.n
    for i, j, k, l, m in product(range(n), repeat=5):
        assert (dR[i, j, k, l, m] + dR[i, j, l, m, k] + dR[i, j, m, k, l]).is_zero()


# bookkeeping ---------------------------------------------------------------------------

def test_low_dimension_rejected():
    ctx = SymbolContext(("u", "v"), namespace="curvature-2d", nonzero=("u",))
    g = ComponentTensor(2, 2, {(0, 0): ctx.expr(1), (1, 1): ctx.parse("u^2")}, "symmetric-pair")
    b = CurvatureBundle(MetricSpec(ctx, g, "plane-polar"))
    assert b.R.is_zero()
    for name in ("C", "W", "K", "P"):
        with pytest.raises(ValueError):
            b.tensor(name)


def test_materialization_is_lazy():
    b = CurvatureBundle(builtin("som-raychaudhuri"))
    assert b.materialized == []
    _ = b.S
    assert "R" in b.materialized and "S" in b.materialized and "C" not in b.materialized
    b.q("g", "R")
    assert "Q(g,R)" in b.materialized


def test_register_extra_tensor(sr):
    with pytest.raises(KeyError):
        sr.register("R", sr.S)
    with pytest.raises(KeyError):
        sr.tensor("nonexistent")
