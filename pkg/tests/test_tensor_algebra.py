from __future__ import annotations

from itertools import product

import pytest
import sympy as sp
from hypothesis import given, settings

from pseudosym.catalog import CATALOG, builtin
from pseudosym.curvature import CurvatureBundle
from pseudosym.expr import ZERO, Expr
from pseudosym.symbols import JetSpec, SymbolContext
from pseudosym.tensor import (
    ComponentTensor,
    DegenerateMetricError,
    MetricSpec,
    SymmetryError,
    check_symmetry,
    christoffel,
    compose,
    covariant_derivative,
    determinant,
    is_generalized_curvature,
    kulkarni_nomizu,
    linear_combination,
    metric_contract,
    trace,
)

from oracle import robinson_trautman
from strategies import symmetric_tensors

PROPERTY = settings(max_examples=100, derandomize=True, deadline=None)


def diag_metric(ctx: SymbolContext, entries, name="diag") -> MetricSpec:
    n = len(entries)
    rows = [[ctx.expr(entries[i]) if i == j else ZERO for j in range(n)] for i in range(n)]
    return MetricSpec(ctx, ComponentTensor.from_matrix(rows, symmetry="symmetric-pair"), name)


@pytest.fixture(scope="module")
def hyperbolic():
    ctx = SymbolContext(("x1", "x2", "x3", "x4"), namespace="tensor-hyperbolic", nonzero=("x4",))
    w = "1/x4^2"
    return diag_metric(ctx, [w, w, w, w], "hyperbolic")


@pytest.fixture(scope="module")
def sphere():
    ctx = SymbolContext(
        ("th", "ph"),
        jets=[JetSpec("s", ("th",), {"th": "c"}), JetSpec("c", ("th",), {"th": "-s"})],
        namespace="tensor-sphere",
        nonzero=("s",),
    )
    return diag_metric(ctx, [1, "s^2"], "2-sphere")


# inverse metric ----------------------------------------------------------------

def test_minkowski_inverse():
    m = builtin("minkowski")
    for i, j in product(range(4), repeat=2):
        assert m.ginv[i, j] == m.g[i, j]


def test_rt_inverse_blocks(rt_metric):
    P = rt_metric.ctx.parse
    gi = rt_metric.ginv
    assert gi[0, 0].is_zero()
    assert gi[0, 1] == 1 and gi[1, 0] == 1
    assert gi[1, 1] == P("2*(a - 2*b*r - q/r)")
    assert gi[2, 2] == P("-f^2/r^2") and gi[3, 3] == P("-f^2/r^2")
    assert determinant(rt_metric.g.matrix()) == P("-r^4/f^4")


def test_degenerate_metric_rejected():
    ctx = SymbolContext(("u", "v"), namespace="tensor-degenerate")
    m = diag_metric(ctx, [1, 0])
    with pytest.raises(DegenerateMetricError):
        _ = m.ginv


def test_asymmetric_metric_rejected():
    ctx = SymbolContext(("u", "v"), namespace="tensor-asym")
    rows = [[Expr.const(1), ctx["u"]], [ZERO, Expr.const(1)]]
    with pytest.raises(SymmetryError):
        MetricSpec(ctx, ComponentTensor.from_matrix(rows))


# Kulkarni-Nomizu ------------------------------------------------------------------

def test_kn_identity_2d():
    one = Expr.const(1)
    g = ComponentTensor(2, 2, {(0, 0): one, (1, 1): one}, "symmetric-pair")
    gg = kulkarni_nomizu(g, g)
    assert gg[0, 1, 1, 0] == 2
    assert gg[0, 1, 0, 1] == -2


def test_kn_rt_half_gg_against_sympy(rt):
    geo, _ = robinson_trautman()
    gs = geo.g

    def half_kn(a, b, c, d):
        return (gs[a, d] * gs[b, c] * 2 - gs[a, c] * gs[b, d] * 2) / 2

    assert sp.simplify(half_kn(0, 1, 0, 1)) == 1
    assert rt.G[0, 1, 0, 1] == 1
    for idx in [(0, 1, 0, 1), (0, 2, 0, 2), (2, 3, 2, 3), (1, 2, 1, 2), (0, 3, 1, 3)]:
        expected = sp.simplify(half_kn(*idx))
        assert sp.simplify(sp.sympify(str(rt.G[idx]).replace("^", "**"), locals=_rt_locals()) - expected) == 0


def _rt_locals():
    x3, x4 = sp.symbols("x3 x4")
    names = {n: sp.Symbol(n) for n in ("a", "b", "q", "r", "t", "x3", "x4")}
    names["f"] = sp.Function("f")(x3, x4)
    return names


def test_kn_rejects_asymmetric():
    one = Expr.const(1)
    A = ComponentTensor(2, 2, {(0, 1): one})
    with pytest.raises(SymmetryError):
        kulkarni_nomizu(A, A)


@PROPERTY
@given(symmetric_tensors(), symmetric_tensors())
def test_kn_commutes(A, E):
    assert (kulkarni_nomizu(A, E) - kulkarni_nomizu(E, A)).is_zero()


# covariant derivative ------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(CATALOG))
def test_metric_is_parallel(name):
    m = builtin(name)
    assert covariant_derivative(m.g, m, christoffel(m)).is_zero()


def test_rt_component_derivatives(rt, rt_parse):
    assert rt.nabla("R")[0, 1, 0, 1, 1] == rt_parse("6*q/r^4")
    assert rt.nabla("S")[0, 1, 1] == rt_parse("4*b/r^2")


def test_leibniz_for_kn(sr):
    ctx = sr.metric.ctx
    r = ctx["r"]
    E = ComponentTensor(4, 2, {(0, 0): r, (1, 1): Expr.const(1), (2, 2): r * r, (3, 3): Expr.const(1)}, "symmetric-pair")
    A = sr.S
    lhs = sr.nabla_of(kulkarni_nomizu(A, E))
    dA, dE = sr.nabla_of(A), sr.nabla_of(E)
    for l in range(4):
        sA = ComponentTensor(4, 2, {k[:2]: v for k, v in dA.items() if k[2] == l}, "symmetric-pair")
        sE = ComponentTensor(4, 2, {k[:2]: v for k, v in dE.items() if k[2] == l}, "symmetric-pair")
        rhs = kulkarni_nomizu(sA, E) + kulkarni_nomizu(A, sE)
        for idx in product(range(4), repeat=4):
            assert lhs[idx + (l,)] == rhs[idx]


# contractions ----------------------------------------------------------------------------

def test_ricci_by_contraction(rt, rt_parse):
    S = metric_contract(rt.R, (0, 3), rt.ginv)
    assert S[0, 1] == rt_parse("-4*b/r")
    assert (S - rt.S).is_zero()


def test_trace_of_metric():
    for name in ("minkowski", "robinson-trautman-jet", "som-raychaudhuri"):
        m = builtin(name)
        assert trace(m.g, m.ginv) == 4


def test_bad_contraction_slots(rt):
    with pytest.raises(IndexError):
        metric_contract(rt.S, (0, 0), rt.ginv)
    with pytest.raises(IndexError):
        metric_contract(rt.S, (0, 2), rt.ginv)


def test_einstein_ricci_square(hyperbolic):
    b = CurvatureBundle(hyperbolic)
    n = hyperbolic.dim
    assert (b.S - b.g.scale(b.kappa / n)).is_zero()
    # the Ricci contraction convention makes constant negative curvature give kappa > 0
    assert b.kappa == 12
    S2 = compose(b.S, b.S, b.ginv)
    assert (S2 - b.g.scale((b.kappa / n) ** 2)).is_zero()


# Christoffel symbols -----------------------------------------------------------------------

def test_minkowski_christoffel_vanishes():
    assert not any(christoffel(builtin("minkowski")).values())


def test_rt_christoffel(rt_metric):
    gam = christoffel(rt_metric)
    r = rt_metric.ctx["r"]
    assert gam[2, 1, 2] == 1 / r
    assert gam[2, 2, 1] == 1 / r


def test_sphere_christoffel(sphere):
    gam = christoffel(sphere)
    s, c = sphere.ctx["s"], sphere.ctx["c"]
    assert gam[0, 1, 1] == -(s * c)
    assert gam[1, 0, 1] == c / s
    assert gam.get((0, 0, 0), ZERO).is_zero()


def test_sphere_curvature(sphere):
    b = CurvatureBundle(sphere)
    assert b.R[0, 1, 0, 1] == sphere.ctx["s"] ** 2
    assert b.kappa == -2
    with pytest.raises(ValueError):
        _ = b.C


# symmetry validator ----------------------------------------------------------------------

def test_linear_combinations_keep_symmetry(rt):
    ctx = rt.metric.ctx
    T = linear_combination([ctx["a"], ctx["r"] * 3, Expr.const(-1)], [rt.R, rt.gg, rt.gS])
    check_symmetry(T, "generalized-curvature")


def test_validator_finds_bianchi_violation():
    one = Expr.const(1)
    comps = {}
    for (i, j, k, l), s in [((0, 1, 0, 2), 1)]:
        for idx, sign in (((i, j, k, l), s), ((j, i, k, l), -s), ((i, j, l, k), -s), ((j, i, l, k), s)):
            comps[idx] = one * sign
            comps[idx[2:] + idx[:2]] = one * sign
    T = ComponentTensor(3, 4, comps)
    assert is_generalized_curvature(T)
    bad = {(0, 1, 2, 3): one, (1, 0, 2, 3): -one, (0, 1, 3, 2): -one, (1, 0, 3, 2): one,
           (2, 3, 0, 1): one, (3, 2, 0, 1): -one, (2, 3, 1, 0): -one, (3, 2, 1, 0): one}
    with pytest.raises(SymmetryError, match="Bianchi"):
        check_symmetry(ComponentTensor(4, 4, bad), "generalized-curvature")


def test_component_tensor_index_checks():
    with pytest.raises(IndexError):
        ComponentTensor(2, 2, {(0, 2): Expr.const(1)})
    with pytest.raises(ValueError):
        ComponentTensor(2, 2, {}, symmetry="bogus")
