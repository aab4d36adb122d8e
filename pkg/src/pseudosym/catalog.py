"""Built-in metrics.

Each builder returns a :class:`MetricSpec` whose ``candidates`` dict holds
the explicit data that the classifier verifies rather than searches for
(quasi-Einstein 1-forms, compatibility test tensors).  Parameters default to
opaque symbols; pass numbers or expression strings in ``params`` to
specialize them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .expr import ZERO, Expr
from .symbols import JetSpec, SymbolContext
from .tensor import ComponentTensor, MetricSpec

RT_COORDS = ("t", "r", "x3", "x4")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: Callable[[Mapping[str, object]], MetricSpec]
    assumptions: tuple[str, ...]
    doc: str


def _metric(ctx: SymbolContext, rows, name: str, assumptions=(), candidates=None) -> MetricSpec:
    g = ComponentTensor.from_matrix(rows, symmetry="symmetric-pair", name="g")
    return MetricSpec(ctx, g, name, tuple(assumptions), dict(candidates or {}))


def _specialize(ctx: SymbolContext, params: Mapping[str, object], names) -> dict[int, Expr]:
    unknown = set(params) - set(names) - {"f", "jet_depth"}
    if unknown:
        raise ValueError(f"unknown parameters {sorted(unknown)}")
    return {ctx.vid(k): ctx.expr(v) for k, v in params.items() if k in names}


def rt_context(jet_depth: int = 4, *, concrete: bool = False, namespace: str = "robinson-trautman",
               extra: tuple[str, ...] = ()) -> SymbolContext:
    jets = [JetSpec("E", ("x3", "x4"), {"x3": "E", "x4": "E"})] if concrete else [JetSpec("f", ("x3", "x4"))]
    return SymbolContext(
        RT_COORDS,
        ("a", "b", "q") + extra,
        jets=jets,
        namespace=namespace,
        jet_depth=jet_depth,
        nonzero=("r",) if concrete else ("r", "f"),
    )


def f_invariant(ctx: SymbolContext, f: Expr) -> Expr:
    """F = f3^2 + f4^2 - f (f33 + f44) for an arbitrary profile f."""
    f3, f4 = ctx.diff(f, "x3"), ctx.diff(f, "x4")
    return f3 * f3 + f4 * f4 - f * (ctx.diff(f3, "x3") + ctx.diff(f4, "x4"))


def rt_metric(ctx: SymbolContext, f: Expr, values: Mapping[int, Expr] | None = None, name: str = "robinson-trautman") -> MetricSpec:
    """The Robinson-Trautman line element for profile ``f``, with RT candidates attached."""
    values = dict(values or {})
    sub = (lambda e: e.substitute(values)) if values else (lambda e: e)
    a, b, q = (sub(ctx[s]) for s in ("a", "b", "q"))
    r = ctx["r"]
    gtt = (a - b * r * 2 - q / r) * -2
    g33 = -(r * r) / (f * f)
    rows = [
        [gtt, Expr.const(1), ZERO, ZERO],
        [Expr.const(1), ZERO, ZERO, ZERO],
        [ZERO, ZERO, g33, ZERO],
        [ZERO, ZERO, ZERO, g33],
    ]
    m = _metric(ctx, rows, name, ("r != 0", "f != 0"))
    m.candidates.update(rt_candidates(ctx, f, a, b, q))
    return m


def rt_candidates(ctx: SymbolContext, f: Expr, a: Expr, b: Expr, q: Expr) -> dict:
    """Explicit quasi-Einstein data and compatibility test tensors for RT.

    The generalized quasi-Einstein data (Chaki form) is stated with the
    1-form roles arranged so that ``S = alpha g + beta Pi(x)Pi + gamma
    (Pi(x)Phi + Phi(x)Pi)`` holds; ``phi1`` is a free nonzero scalar.
    """
    r = ctx["r"]
    F = f_invariant(ctx, f)
    ext = ctx.extended(("phi1", "t11", "t12", "t22", "t33", "t34", "t44", "t1", "t2", "t3", "t4"))
    phi1 = ext["phi1"]
    z = ZERO
    w = F - a * 2 + b * r * 4  # -2a + 4br + F
    cands: dict = {"context": ext, "rt-parameters": {"a": a, "b": b, "F": F}}
    cands["chaki"] = {
        "alpha": -(F - a * 2 + b * r * 8) / (r * r),
        "beta": b * w * 4 / (phi1 * phi1 * r),
        "gamma": w,
        "Pi": [phi1, z, z, z],
        "Phi": [(q - a * r) / (phi1 * r**3), 1 / (phi1 * r * r), z, z],
        "nonzero": ["phi1"],
    }
    cands["de-ghosh"] = {
        "alpha": b * -4 / r,
        "beta": w / (r * r),
        "gamma": w / (r * r),
        "Pi": [z, z, r / f, z],
        "Phi": [z, z, z, r / f],
    }
    cands["pseudo-quasi"] = {
        "alpha": -F / (r * r * 2),
        "beta": (a - b * r * 6) * -4 / (r * r),
        "gamma": Expr.const(1),
        "Pi": [z, z, z, r / f],
    }
    t = {k: ext[k] for k in ("t11", "t12", "t22", "t33", "t34", "t44")}
    block = ComponentTensor.from_matrix(
        [
            [t["t11"], t["t12"], z, z],
            [t["t12"], t["t22"], z, z],
            [z, z, t["t33"], t["t34"]],
            [z, z, t["t34"], t["t44"]],
        ],
        symmetry="symmetric-pair",
        name="block",
    )
    cands["compatible-tensors"] = {"block": block}
    cands["compatible-forms"] = {
        f"axis{i + 1}": [ext[f"t{i + 1}"] if j == i else z for j in range(4)] for i in range(4)
    }
    if w:
        cands["expected"] = {"roter-type": roter_readings(F, a, b, q, r)}
    return cands


def roter_readings(F: Expr, a: Expr, b: Expr, q: Expr, r: Expr) -> dict[str, list[Expr]]:
    """Reference Roter coefficients for RT, literal reading first.

    The g^g coefficient carries a sign mark in front of its first fraction
    that can be read as nothing or as a minus; the second reading takes it
    as a minus sign.
    """
    w = F - a * 2 + b * r * 4
    N1 = r * (a * r * 2 - q * 6 - F * r) / (w * w * 2)
    N2 = (a * b * r * r * 4 + a * q * 6 + b * b * r**3 * 8 - F * (b * r * r * 2 + q * 3) - b * q * r * 36) / (r * w * w)
    inner = b * r * 4 * (a * q * 6 + b * b * r**3 * 8 - b * q * r * 24 - q * F * 3) / (w * w)
    return {"S^S": [N1], "g^S": [N2], "g^g": [-(inner + q) / r**3, -(q - inner) / r**3]}


def robinson_trautman_jet(params: Mapping[str, object] = {}) -> MetricSpec:
    if "f" in params:
        raise ValueError("the jet metric keeps f abstract; use robinson-trautman-concrete")
    ctx = rt_context(int(params.get("jet_depth", 4)))
    values = _specialize(ctx, params, ("a", "b", "q"))
    return rt_metric(ctx, ctx["f"], values, "robinson-trautman-jet")


def robinson_trautman_concrete(params: Mapping[str, object] = {}) -> MetricSpec:
    """RT with an explicit profile built from E (dE/dx3 = dE/dx4 = E).

    The default profile ``E`` is e^{x3 + x4}.
    """
    ctx = rt_context(int(params.get("jet_depth", 4)), concrete=True, namespace="robinson-trautman-concrete")
    f = ctx.expr(params.get("f", "E"))
    if not f:
        raise ValueError("profile f must not vanish identically")
    values = _specialize(ctx, params, ("a", "b", "q"))
    return rt_metric(ctx, f, values, "robinson-trautman-concrete")


def schwarzschild_like(params: Mapping[str, object] = {}) -> MetricSpec:
    """RT with b = 0 and f = 1 - a (x3^2 + x4^2)/2, for which F = 2a."""
    ctx = SymbolContext(RT_COORDS, ("a", "b", "q"), namespace="schwarzschild-like", nonzero=("r",))
    values = _specialize(ctx, params, ("a", "q"))
    values[ctx.vid("b")] = ZERO
    f = ctx.parse("1 - a*(x3^2 + x4^2)/2")
    if values:
        f = f.substitute(values)
    return rt_metric(ctx, f, values, "schwarzschild-like")


def som_raychaudhuri(params: Mapping[str, object] = {}) -> MetricSpec:
    ctx = SymbolContext(("t", "r", "z", "phi"), ("a",), namespace="som-raychaudhuri", nonzero=("r",))
    values = _specialize(ctx, params, ("a",))
    P = lambda s: ctx.parse(s).substitute(values) if values else ctx.parse(s)
    z, one = ZERO, Expr.const(1)
    gtp = P("a*r^2")
    rows = [
        [one, z, z, gtp],
        [z, -one, z, z],
        [z, z, -one, z],
        [gtp, z, z, P("-(r^2 - a^2*r^4)")],
    ]
    return _metric(ctx, rows, "som-raychaudhuri", ("r != 0",))


def minkowski(params: Mapping[str, object] = {}) -> MetricSpec:
    if set(params) - {"jet_depth"}:
        raise ValueError("minkowski takes no parameters")
    ctx = SymbolContext(("t", "x", "y", "z"), namespace="minkowski")
    one, z = Expr.const(1), ZERO
    rows = [[one, z, z, z], [z, -one, z, z], [z, z, -one, z], [z, z, z, -one]]
    return _metric(ctx, rows, "minkowski")


CATALOG: dict[str, CatalogEntry] = {
    e.name: e
    for e in (
        CatalogEntry("robinson-trautman-jet", robinson_trautman_jet, ("r != 0", "f != 0"),
                     "ds^2 = -2(a - 2br - q/r) dt^2 + 2 dt dr - r^2/f^2 (dx3^2 + dx4^2), f = f(x3, x4) abstract"),
        CatalogEntry("robinson-trautman-concrete", robinson_trautman_concrete, ("r != 0",),
                     "Robinson-Trautman with an explicit profile f (default e^{x3+x4})"),
        CatalogEntry("schwarzschild-like", schwarzschild_like, ("r != 0",),
                     "Robinson-Trautman with b = 0 and f = 1 - a(x3^2+x4^2)/2 (F = 2a)"),
        CatalogEntry("som-raychaudhuri", som_raychaudhuri, ("r != 0",),
                     "ds^2 = dt^2 - (r^2 - a^2 r^4) dphi^2 - dr^2 - dz^2 + 2 a r^2 dphi dt"),
        CatalogEntry("minkowski", minkowski, (), "diag(1, -1, -1, -1)"),
    )
}


def builtin(name: str, params: Mapping[str, object] | None = None) -> MetricSpec:
    try:
        entry = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown builtin metric {name!r}; known: {', '.join(CATALOG)}") from None
    return entry.builder(dict(params or {}))
