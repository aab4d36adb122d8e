"""Symbol contexts, jet tables and differentiation."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .expr import ONE, ZERO, EvaluationError, Expr, expr_sum
from .poly import ONE_POLY, REGISTRY, Poly

KINDS = ("coordinate", "parameter", "jet", "constant")


class JetDepthError(ValueError):
    """A derivative beyond the materialized jet depth was requested."""


class ContextError(ValueError):
    pass


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str
    vid: int
    depends_on: frozenset = frozenset()

    @property
    def expr(self) -> Expr:
        return Expr.var(self.vid)


@dataclass(frozen=True)
class JetSpec:
    """An abstract function of some coordinates.

    Without ``rules`` the derivatives ``f3, f4, f33, f34, ...`` are generated
    up to the context's jet depth (labels are the 1-based chart positions, or
    ``labels`` if given).  With ``rules`` the jet is closed under
    differentiation by the given expressions, e.g. ``{"x3": "E", "x4": "E"}``
    for an exponential.
    """

    name: str
    depends_on: tuple[str, ...]
    rules: Mapping[str, str] | None = None


class SymbolContext:
    """Frozen registry of the symbols an expression may use.

    ``namespace`` keeps same-named symbols of different metrics apart.
    """

    def __init__(
        self,
        coordinates: Iterable[str],
        parameters: Iterable[str] = (),
        constants: Iterable[str] = (),
        jets: Iterable[JetSpec] = (),
        *,
        namespace: str = "",
        jet_depth: int = 4,
        nonzero: Iterable[str] = (),
        labels: Mapping[str, str] | None = None,
    ):
        self.namespace = namespace
        self.jet_depth = jet_depth
        self.coordinates: tuple[str, ...] = tuple(coordinates)
        if len(set(self.coordinates)) != len(self.coordinates):
            raise ContextError("coordinates must be pairwise distinct")
        self.labels = dict(labels or {})
        for i, c in enumerate(self.coordinates):
            self.labels.setdefault(c, str(i + 1))
        self.symbols: dict[str, Symbol] = {}
        self._by_vid: dict[int, Symbol] = {}
        for c in self.coordinates:
            self._add(c, "coordinate", frozenset([c]))
        for p in parameters:
            self._add(p, "parameter")
        for c in constants:
            self._add(c, "constant")
        # (vid, coordinate) -> Expr, or a thunk producing one
        self._rules: dict[tuple[int, str], Expr | Callable[[], Expr]] = {}
        # jet vid -> order; used for depth errors
        self._jet_order: dict[int, int] = {}
        self.jet_specs = tuple(jets)
        for spec in self.jet_specs:
            self._add_jet(spec)
        self.nonzero = tuple(nonzero)
        self._deps_cache: dict[str, tuple[int, ...]] = {}

    # construction ----------------------------------------------------
    def _add(self, name: str, kind: str, depends_on=frozenset()) -> Symbol:
        if name in self.symbols:
            raise ContextError(f"duplicate symbol {name!r}")
        if not name.isidentifier():
            raise ContextError(f"invalid symbol name {name!r}")
        sym = Symbol(name, kind, REGISTRY.intern(name, self.namespace), frozenset(depends_on))
        self.symbols[name] = sym
        self._by_vid[sym.vid] = sym
        return sym

    def _add_jet(self, spec: JetSpec):
        for c in spec.depends_on:
            if c not in self.coordinates:
                raise ContextError(f"jet {spec.name!r} depends on unknown coordinate {c!r}")
        deps = tuple(c for c in self.coordinates if c in spec.depends_on)
        if spec.rules is not None:
            base = self._add(spec.name, "jet", deps)
            self._jet_order[base.vid] = 0
            for c, text in spec.rules.items():
                if c not in deps:
                    raise ContextError(f"rule for {spec.name!r} w.r.t. non-dependency {c!r}")
                self._rules[(base.vid, c)] = (lambda t=text: self.parse(t))
            return
        # canonical multi-indices: non-decreasing chart positions
        pos = {c: i for i, c in enumerate(deps)}
        frontier = [()]
        jets: dict[tuple[int, ...], Symbol] = {}
        jets[()] = self._add(spec.name, "jet", deps)
        for depth in range(1, self.jet_depth + 1):
            nxt = []
            for idx in frontier:
                start = idx[-1] if idx else 0
                for j in range(start, len(deps)):
                    new = idx + (j,)
                    name = spec.name + "".join(self.labels[deps[k]] for k in new)
                    jets[new] = self._add(name, "jet", deps)
                    nxt.append(new)
            frontier = nxt
        for idx, sym in jets.items():
            self._jet_order[sym.vid] = len(idx)
            for c in deps:
                new = tuple(sorted(idx + (pos[c],)))
                if new in jets:
                    self._rules[(sym.vid, c)] = jets[new].expr
        for c in self.coordinates:
            if c not in deps:
                for sym in jets.values():
                    self._rules[(sym.vid, c)] = ZERO

    def set_rule(self, name: str, coord: str, rule) -> None:
        """Override a jet derivative rule (Expr or zero-argument callable).

        Only meant for builders that constrain a jet before the context is
        handed out.
        """
        self._rules[(self.vid(name), coord)] = rule

    def extended(self, parameters: Iterable[str] = ()) -> "SymbolContext":
        """Copy with extra parameter symbols (same namespace)."""
        new = object.__new__(SymbolContext)
        new.__dict__.update(self.__dict__)
        new.symbols = dict(self.symbols)
        new._by_vid = dict(self._by_vid)
        new._deps_cache = {}
        for p in parameters:
            new._add(p, "parameter")
        return new

    # lookup ----------------------------------------------------------
    def __contains__(self, name: str) -> bool:
        return name in self.symbols

    def __getitem__(self, name: str) -> Expr:
        try:
            return self.symbols[name].expr
        except KeyError:
            raise ContextError(f"unknown symbol {name!r}") from None

    def symbol(self, name: str) -> Symbol:
        return self.symbols[name]

    def vid(self, name: str) -> int:
        return self.symbols[name].vid

    def by_vid(self, vid: int) -> Symbol | None:
        return self._by_vid.get(vid)

    def names(self, kind: str | None = None) -> list[str]:
        return [s.name for s in self.symbols.values() if kind is None or s.kind == kind]

    def expr(self, value) -> Expr:
        """Coerce a string, number or Expr into an Expr of this context."""
        if isinstance(value, Expr):
            return value
        if isinstance(value, str):
            return self.parse(value)
        return Expr.const(value)

    def parse(self, text: str) -> Expr:
        from .parser import parse_expression

        return parse_expression(text, self)

    # calculus --------------------------------------------------------
    def _dependents(self, coord: str) -> tuple[int, ...]:
        deps = self._deps_cache.get(coord)
        if deps is None:
            deps = tuple(
                s.vid for s in self.symbols.values() if coord in s.depends_on
            )
            self._deps_cache[coord] = deps
        return deps

    def derivative_of_symbol(self, vid: int, coord: str) -> Expr:
        sym = self._by_vid[vid]
        if sym.kind == "coordinate":
            return ONE if sym.name == coord else ZERO
        if sym.kind != "jet" or coord not in sym.depends_on:
            return ZERO
        rule = self._rules.get((vid, coord))
        if rule is None:
            raise JetDepthError(
                f"derivative of {sym.name} w.r.t. {coord} exceeds jet depth {self.jet_depth}"
            )
        if callable(rule):
            rule = rule()
            self._rules[(vid, coord)] = rule
        return rule

    def diff(self, e: Expr, coord: str) -> Expr:
        """Partial derivative of ``e`` with respect to coordinate ``coord``."""
        if coord not in self.coordinates:
            raise ContextError(f"{coord!r} is not a coordinate")
        if not e.num.terms:
            return ZERO
        deps = self._dependents(coord)
        dnum = self._diff_poly(e.num, deps, coord)
        if not e.den:
            return dnum if e.dc == 1 else dnum / e.dc
        # d(N/D) = (N' - N * sum_i m_i A_i'/A_i) / D
        logd = []
        for atom, m in e.den.items():
            da = self._diff_poly(atom, deps, coord)
            if da:
                logd.append(da * m * Expr(ONE_POLY, {atom: 1}))
        inv_den = Expr(ONE_POLY, dict(e.den), e.dc)
        if not logd:
            return dnum * inv_den
        return (dnum - Expr(e.num) * expr_sum(logd)) * inv_den

    def _diff_poly(self, p: Poly, deps, coord: str) -> Expr:
        parts = []
        for vid in deps:
            if p.has_var(vid):
                dv = self.derivative_of_symbol(vid, coord)
                if dv:
                    dp = p.deriv(vid)
                    parts.append(Expr(dp) if dv is ONE else Expr(dp) * dv)
        return expr_sum(parts)

    # points ----------------------------------------------------------
    def point(self, assignment: Mapping[str, object], required: Iterable[int] | None = None) -> dict[int, Fraction]:
        """Exact point from names to numbers; ``required`` defaults to every symbol."""
        unknown = [n for n in assignment if n not in self.symbols]
        if unknown:
            raise ContextError(f"point assigns unknown symbols {unknown}")
        need = set(self._by_vid) if required is None else set(required)
        missing = [s.name for v, s in self._by_vid.items() if v in need and s.name not in assignment]
        if missing:
            raise ContextError(f"point does not assign {missing}")
        return {self.vid(n): Fraction(v) for n, v in assignment.items()}

    def random_point(self, rng: random.Random, bound: int = 9) -> dict[int, Fraction]:
        """Random rational point respecting the nonzero assumptions."""
        for _ in range(100):
            values = {}
            for s in self.symbols.values():
                values[s.vid] = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
            try:
                if all(self.parse(n).evaluate(values) != 0 for n in self.nonzero):
                    return values
            except EvaluationError:
                continue
        raise ContextError("could not sample an admissible point")

    def evaluate(self, e: Expr, assignment: Mapping[str, object]) -> Fraction:
        """Exact value; only the symbols occurring in ``e`` must be assigned."""
        return e.evaluate(self.point(assignment, e.variables()))


def is_identically_zero(e: Expr, ctx: SymbolContext | None = None, trials: int = 0, seed: int = 0) -> bool:
    """Exact zero test on the expanded numerator.

    With ``trials`` > 0 the verdict is cross-checked by exact evaluation at
    random admissible points; a zero verdict with a nonzero sample is an
    internal error.
    """
    zero = not e.num.terms
    if trials and ctx is not None:
        rng = random.Random(seed)
        for _ in range(trials):
            try:
                v = e.evaluate(ctx.random_point(rng))
            except EvaluationError:
                continue
            if zero and v != 0:
                raise AssertionError("zero expression evaluated to nonzero")
    return zero
