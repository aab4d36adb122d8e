"""Energy-momentum tensor of the Einstein field equations.

    T = c^4 / (8 pi G) [S - (kappa/2 - Lambda) g]

``c``, ``G``, ``Lambda`` and ``pi`` are opaque constant symbols added to the
metric's context.  For Robinson-Trautman metrics the derivative classes of T
are tied to the parameter condition ``b = 0 and F = 2a``; that condition is
checked on the given metric and, separately, on a jet context in which
F = 2a is imposed through the derivative rules of the profile (conditional
identity checking without an ideal-membership engine).
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import f_invariant, rt_context, rt_metric
from .classify import (
    Sampler,
    Verdict,
    Witness,
    codazzi_tensor,
    cyclic_tensor,
    proportionality,
    vanishing,
)
from .curvature import CurvatureBundle
from .expr import Expr
from .symbols import SymbolContext
from .tensor import ComponentTensor, MetricSpec, check_symmetry

EM_CONSTANTS = ("c", "G", "Lambda", "pi")


@dataclass
class EMTensor:
    T: ComponentTensor
    c: Expr
    G: Expr
    Lambda: Expr
    pi: Expr
    ctx: SymbolContext
    bundle: CurvatureBundle

    def __post_init__(self):
        check_symmetry(self.T, "symmetric-pair")

    @property
    def nabla(self) -> ComponentTensor:
        return self.bundle.nabla("T")

    @property
    def div(self) -> ComponentTensor:
        return self.bundle.div("T")


def em_context(metric: MetricSpec) -> SymbolContext:
    """The metric's candidate context plus the physical constants c, G, Lambda, pi."""
    base = metric.candidates.get("context", metric.ctx)
    missing = tuple(n for n in EM_CONSTANTS if n not in base)
    return base.extended(missing) if missing else base


def energy_momentum(bundle: CurvatureBundle, Lambda=None, c=None, G=None) -> EMTensor:
    """Build T for ``bundle`` and register it there under the name ``T``.

    Omitted constants stay symbolic.
    """
    ctx = em_context(bundle.metric)
    c = ctx["c"] if c is None else ctx.expr(c)
    G = ctx["G"] if G is None else ctx.expr(G)
    Lam = ctx["Lambda"] if Lambda is None else ctx.expr(Lambda)
    pi = ctx["pi"]
    factor = c**4 / (pi * G * 8)
    shift = bundle.kappa / 2 - Lam
    T = (bundle.S - bundle.g.scale(shift)).scale(factor)
    T = ComponentTensor(T.dim, 2, dict(T.items()), "symmetric-pair", name="T")
    bundle.register("T", T, replace=True)
    return EMTensor(T, c, G, Lam, pi, ctx, bundle)


def constrained_rt_context(jet_depth: int = 5, namespace: str = "robinson-trautman-constrained") -> SymbolContext:
    """Jet context for f with f3^2 + f4^2 - f (f33 + f44) = 2a imposed.

    The x3-derivative of every jet carrying exactly one x3 index is rewritten
    through d3 f3 = (f3^2 + f4^2 - 2a)/f - f44, so f33 and its descendants
    never appear.
    """
    ctx = rt_context(jet_depth, namespace=namespace)
    reduced = ctx.parse("(f3^2 + f4^2 - 2*a)/f - f44")
    for name in ctx.names("jet"):
        suffix = name[1:]
        if suffix.count("3") != 1 or not suffix.startswith("3"):
            continue
        k = len(suffix) - 1

        def rule(k=k):
            e = reduced
            for _ in range(k):
                e = ctx.diff(e, "x4")
            return e

        ctx.set_rule(name, "x3", rule)
    return ctx


def constrained_rt_metric(jet_depth: int = 5) -> MetricSpec:
    """RT with b = 0 and F = 2a imposed; a, q and the profile stay free."""
    ctx = constrained_rt_context(jet_depth)
    m = rt_metric(ctx, ctx["f"], {ctx.vid("b"): ctx.expr(0)}, "robinson-trautman-constrained")
    F = f_invariant(ctx, ctx["f"])
    if F != ctx["a"] * 2:
        raise ArithmeticError("constraint not realized by the jet rules")
    return m


def em_conditions(em: EMTensor, bundle: CurvatureBundle | None = None, sampler: Sampler | None = None) -> list[Verdict]:
    """Derivative classes of T, div T, pseudosymmetry of T and the RT parameter condition."""
    bundle = bundle or em.bundle
    sampler = sampler or Sampler(None)
    nT = bundle.nabla("T")
    out = [
        vanishing(bundle.div("T"), "energy-momentum-divergence-free", "div T = 0"),
        vanishing(nT, "energy-momentum-parallel", "nabla T = 0"),
        vanishing(codazzi_tensor(nT), "energy-momentum-codazzi", "T_ij,k - T_ik,j = 0"),
        vanishing(cyclic_tensor(nT), "energy-momentum-cyclic-parallel", "T_ij,k + T_jk,i + T_ki,j = 0"),
    ]
    v = proportionality(bundle.dot("R", "T"), bundle.q("g", "T"), identity="R.T = L Q(g,T)", sampler=sampler)
    v.name = "energy-momentum-pseudosymmetric"
    out.append(v)
    out.append(rt_parameter_condition(bundle.metric, out[1]))
    return out


def rt_parameter_condition(metric: MetricSpec, parallel: Verdict) -> Verdict:
    """b = 0 and F = 2a for an RT metric, cross-checked against nabla T = 0."""
    name = "rt-parameter-condition"
    identity = "b = 0 and F = 2a"
    params = metric.candidates.get("rt-parameters")
    if params is None:
        return Verdict(name, "vacuous", note="not a Robinson-Trautman metric", identity=identity)
    b, F, a = params["b"], params["F"], params["a"]
    wits = [Witness((), e, label) for e, label in ((b, "b"), (F - a * 2, "F - 2a")) if e]
    holds = not wits
    if holds != (parallel.status == "holds"):
        return Verdict(name, "error", note="parameter condition and nabla T = 0 disagree", flags=["error"],
                       identity=identity, witnesses=wits)
    if holds:
        return Verdict(name, "holds", identity=identity, note="agrees with nabla T = 0")
    return Verdict(name, "fails", witnesses=wits, identity=identity, note="agrees with nabla T != 0")


def constrained_equivalence(jet_depth: int = 5) -> Verdict:
    """On RT with b = 0 and F = 2a imposed, nabla T vanishes identically."""
    m = constrained_rt_metric(jet_depth)
    em = energy_momentum(CurvatureBundle(m))
    return vanishing(em.nabla, "rt-constrained-parallel", "b = 0, F = 2a  implies  nabla T = 0")
