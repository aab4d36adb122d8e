"""The curvature family of a metric.

Conventions: ``R_{ijkl} = g(R(e_i, e_j) e_l, e_k)`` with
``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``, i.e. the last two slots are
swapped relative to the common ``g(R(X,Y)Z, W)``.  The Ricci tensor contracts
slots 1 and 4, ``S_{jk} = g^{il} R_{ijkl}``, so S and the scalar curvature
carry the opposite sign to the usual ones as well.  This is the convention
under which the Robinson-Trautman tables come out with ``R_{1212} = -2q/r^3``.  Covariant
derivatives put the derivative slot last (``R_{1212,2}``).
"""

from __future__ import annotations

from functools import cached_property
from itertools import combinations

from .expr import ZERO, Expr, expr_sum
from . import operators
from .tensor import (
    ComponentTensor,
    MetricSpec,
    christoffel,
    compose,
    covariant_derivative,
    kulkarni_nomizu,
    metric_contract,
    trace,
)

# names accepted by CurvatureBundle.tensor()
CURVATURE_NAMES = ("g", "R", "S", "S2", "C", "W", "K", "G", "P")


def riemann(m: MetricSpec, gam) -> ComponentTensor:
    n = m.dim
    by_mi: dict[tuple[int, int], list[tuple[int, Expr]]] = {}
    for (a, b, c), v in gam.items():
        by_mi.setdefault((a, b), []).append((c, v))
    # R^m_{k i j} for i < j
    up = {}
    for i, j in combinations(range(n), 2):
        for mm in range(n):
            for k in range(n):
                terms = []
                x = gam.get((mm, j, k))
                if x is not None:
                    terms.append(m.diff(x, i))
                x = gam.get((mm, i, k))
                if x is not None:
                    terms.append(-m.diff(x, j))
                for lam, v in by_mi.get((mm, i), ()):
                    w = gam.get((lam, j, k))
                    if w is not None:
                        terms.append(v * w)
                for lam, v in by_mi.get((mm, j), ()):
                    w = gam.get((lam, i, k))
                    if w is not None:
                        terms.append(-(v * w))
                val = expr_sum(terms)
                if val:
                    up[mm, k, i, j] = val
    comps = {}
    for i, j in combinations(range(n), 2):
        for k in range(n):
            for l in range(n):
                v = expr_sum(m.g[k, mm] * up[mm, l, i, j] for mm in range(n) if m.g[k, mm] and (mm, l, i, j) in up)
                if v:
                    comps[i, j, k, l] = v
                    comps[j, i, k, l] = -v
    return ComponentTensor(n, 4, comps, "generalized-curvature", name="R")


class CurvatureBundle:
    """Lazily materialized curvature tensors of one metric.

    Every attribute is computed on first access and cached; ``materialized``
    lists what has been computed so far.
    """

    def __init__(self, metric: MetricSpec):
        self.metric = metric
        self.n = metric.dim
        self._nabla: dict[str, ComponentTensor] = {}
        self._div: dict[str, ComponentTensor] = {}
        self._ops: dict[tuple[str, str, str], ComponentTensor] = {}
        self._extra: dict[str, ComponentTensor] = {}

    @property
    def g(self) -> ComponentTensor:
        return self.metric.g

    @property
    def ginv(self) -> ComponentTensor:
        return self.metric.ginv

    @cached_property
    def gamma(self):
        return christoffel(self.metric)

    @cached_property
    def R(self) -> ComponentTensor:
        return riemann(self.metric, self.gamma)

    @cached_property
    def S(self) -> ComponentTensor:
        S = metric_contract(self.R, (0, 3), self.ginv)
        return ComponentTensor(self.n, 2, dict(S.items()), "symmetric-pair", name="S")

    @cached_property
    def kappa(self) -> Expr:
        return trace(self.S, self.ginv)

    @cached_property
    def S2(self) -> ComponentTensor:
        T = compose(self.S, self.S, self.ginv)
        return ComponentTensor(self.n, 2, dict(T.items()), "symmetric-pair", name="S2")

    @cached_property
    def gg(self) -> ComponentTensor:
        return kulkarni_nomizu(self.g, self.g)

    @cached_property
    def gS(self) -> ComponentTensor:
        return kulkarni_nomizu(self.g, self.S)

    @cached_property
    def SS(self) -> ComponentTensor:
        return kulkarni_nomizu(self.S, self.S)

    def _require_dim(self):
        if self.n < 3:
            raise ValueError("C, W, K and P need dimension >= 3")

    @cached_property
    def C(self) -> ComponentTensor:
        """Weyl conformal curvature tensor."""
        self._require_dim()
        n = self.n
        T = self.R - self.gS.scale(Expr.const(1) / (n - 2)) + self.gg.scale(self.kappa / (2 * (n - 2) * (n - 1)))
        return _named(T, "C", "generalized-curvature")

    @cached_property
    def W(self) -> ComponentTensor:
        """Concircular curvature tensor."""
        self._require_dim()
        n = self.n
        return _named(self.R - self.gg.scale(self.kappa / (2 * n * (n - 1))), "W", "generalized-curvature")

    @cached_property
    def K(self) -> ComponentTensor:
        """Conharmonic curvature tensor."""
        self._require_dim()
        return _named(self.R - self.gS.scale(Expr.const(1) / (self.n - 2)), "K", "generalized-curvature")

    @cached_property
    def G(self) -> ComponentTensor:
        """Gaussian curvature tensor, half of g wedge g."""
        return _named(self.gg.scale(Expr.const(1) / 2), "G", "generalized-curvature")

    @cached_property
    def P(self) -> ComponentTensor:
        """Projective curvature tensor.

        P_{abcd} = R_{abcd} - (g_ad S_bc - g_bd S_ac) / (n - 1)
        """
        self._require_dim()
        n = self.n
        g, S = self.g, self.S
        comps = dict(self.R.items())
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(n):
                        t = []
                        if g[a, d] and S[b, c]:
                            t.append(g[a, d] * S[b, c])
                        if g[b, d] and S[a, c]:
                            t.append(-(g[b, d] * S[a, c]))
                        if t:
                            corr = expr_sum(t) / (n - 1)
                            comps[a, b, c, d] = comps.get((a, b, c, d), ZERO) - corr
        return ComponentTensor(n, 4, comps, "projective-like", name="P")

    def register(self, name: str, T: ComponentTensor, replace: bool = False) -> None:
        """Make an extra tensor (e.g. an energy-momentum tensor) addressable by name."""
        if name in CURVATURE_NAMES or name == "g" or (name in self._extra and not replace):
            raise KeyError(f"tensor name {name!r} already in use")
        self._extra[name] = T
        self._nabla.pop(name, None)
        self._div.pop(name, None)
        for key in [k for k in self._ops if name in k[1:]]:
            del self._ops[key]

    def tensor(self, name: str) -> ComponentTensor:
        if name == "g":
            return self.g
        if name in self._extra:
            return self._extra[name]
        if name not in CURVATURE_NAMES:
            raise KeyError(f"unknown curvature tensor {name!r}")
        return getattr(self, name)

    def nabla(self, name: str) -> ComponentTensor:
        """Covariant derivative of a named tensor (cached)."""
        if name not in self._nabla:
            T = self.tensor(name)
            self._nabla[name] = covariant_derivative(T, self.metric, self.gamma)
        return self._nabla[name]

    def nabla_of(self, T: ComponentTensor) -> ComponentTensor:
        return covariant_derivative(T, self.metric, self.gamma)

    def dot(self, D: str, H: str) -> ComponentTensor:
        """D.H for named tensors (cached)."""
        key = ("dot", D, H)
        if key not in self._ops:
            self._ops[key] = operators.dot(self.tensor(D), self.tensor(H), self.ginv)
        return self._ops[key]

    def q(self, A: str, H: str) -> ComponentTensor:
        """Q(A, H) for named tensors (cached)."""
        key = ("q", A, H)
        if key not in self._ops:
            self._ops[key] = operators.q(self.tensor(A), self.tensor(H))
        return self._ops[key]

    def div(self, name: str) -> ComponentTensor:
        if name not in self._div:
            self._div[name] = divergence(self.nabla(name), self.ginv)
        return self._div[name]

    @property
    def materialized(self) -> list[str]:
        names = [k for k in ("gamma", "R", "S", "kappa", "S2", "C", "W", "K", "G", "P") if k in self.__dict__]
        names += [f"nabla {k}" for k in self._nabla]
        names += [f"div {k}" for k in self._div]
        names += [f"{D}.{H}" if op == "dot" else f"Q({D},{H})" for op, D, H in self._ops]
        return names


def _named(T: ComponentTensor, name: str, symmetry: str) -> ComponentTensor:
    return ComponentTensor(T.dim, T.valence, dict(T.items()), symmetry, name=name)


def divergence(nablaD: ComponentTensor, ginv: ComponentTensor) -> ComponentTensor:
    """Contract the derivative slot of nabla D with slot 1 of D."""
    return metric_contract(nablaD, (0, nablaD.valence - 1), ginv)
