from __future__ import annotations

from itertools import product

import pytest
import sympy as sp

from pseudosym.catalog import builtin
from pseudosym.curvature import CurvatureBundle
from pseudosym.expr import Expr
from pseudosym.operators import dot, q
from pseudosym.tensor import ComponentTensor, kulkarni_nomizu

from oracle import som_raychaudhuri
from reference import to_sympy


@pytest.fixture(scope="module")
def sympy_sr():
    return som_raychaudhuri()


@pytest.fixture(scope="module")
def sr_names():
    return {n: sp.Symbol(n) for n in ("t", "r", "z", "phi", "a")}


def test_curvature_annihilates_metric(rt, sr):
    for b in (rt, sr):
        for D in ("R", "C"):
            assert b.dot(D, "g").is_zero()


def test_flat_curvature_acts_trivially():
    b = CurvatureBundle(builtin("minkowski"))
    one = Expr.const(1)
    H = ComponentTensor(4, 3, {(0, 1, 2): one, (3, 3, 1): one * 5})
    assert dot(b.R, H, b.ginv).is_zero()


def test_rt_sample_components(rt, rt_parse):
    assert rt.dot("R", "R")[0, 1, 0, 2, 1, 2] == rt_parse("-(2*b*r^2 - 3*q)*(2*b*r^2 - q)/(f^2*r^4)")
    assert rt.q("g", "R")[0, 1, 0, 2, 1, 2] == rt_parse("(2*b*r^2 - 3*q)/(f^2*r)")
    assert rt.q("S", "R")[0, 1, 1, 2, 0, 2] == rt_parse("(4*a*q + 8*b^2*r^3 - 20*b*q*r - 2*q*F)/(f^2*r^3)")


def test_q_of_metric_with_itself_vanishes(rt):
    assert q(rt.g, rt.g).is_zero()


def test_operators_are_linear(sr):
    ctx = sr.metric.ctx
    c = ctx.parse("a*r + 1")
    H1, H2 = sr.S, sr.g.scale(ctx["r"])
    for op in (lambda H: dot(sr.R, H, sr.ginv), lambda H: q(sr.S, H)):
        assert (op(H1 + H2.scale(c)) - op(H1) - op(H2).scale(c)).is_zero()


def test_last_two_slots_antisymmetric(sr):
    for T in (sr.dot("R", "S"), sr.q("g", "C"), sr.q("S", "R")):
        n, k = T.dim, T.valence
        for idx in T.keys():
            swapped = idx[: k - 2] + (idx[k - 1], idx[k - 2])
            assert T[swapped] == -T[idx]


def test_kn_of_metric_is_annihilated(sr):
    assert dot(sr.R, sr.gg, sr.ginv).is_zero()


def test_q_rejects_asymmetric(sr):
    one = Expr.const(1)
    A = ComponentTensor(4, 2, {(0, 1): one})
    with pytest.raises(ValueError):
        q(A, sr.R)


def test_dot_needs_valence_four(sr):
    with pytest.raises(ValueError):
        dot(sr.S, sr.S, sr.ginv)


# independent cross-checks on Som-Raychaudhuri ----------------------------------------------

def _agree(mine, theirs, ctx, names):
    for idx, v in theirs.items():
        assert sp.simplify(to_sympy(mine[idx], ctx, names) - v) == 0, idx


def test_dot_on_ricci_matches_sympy(sr, sr_metric, sympy_sr, sr_names):
    geo, _ = sympy_sr
    _agree(sr.dot("R", "S"), geo.dot(geo.R(), geo.S(), 2), sr_metric.ctx, sr_names)


def test_q_on_ricci_matches_sympy(sr, sr_metric, sympy_sr, sr_names):
    geo, _ = sympy_sr
    _agree(sr.q("g", "S"), geo.q(geo.g, geo.S(), 2), sr_metric.ctx, sr_names)


def test_weyl_operators_match_sympy_on_slices(sr, sr_metric, sympy_sr, sr_names):
    geo, _ = sympy_sr
    C = geo.C()
    CC, QgC = geo.dot(C, C, 4), geo.q(geo.g, C, 4)
    picks = {k: v for k, v in CC.items() if k[4:] in ((0, 3), (1, 3), (0, 1))}
    _agree(sr.dot("C", "C"), picks, sr_metric.ctx, sr_names)
    _agree(sr.q("g", "C"), {k: QgC[k] for k in picks}, sr_metric.ctx, sr_names)
