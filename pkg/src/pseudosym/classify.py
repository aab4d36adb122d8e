"""Detectors for curvature-restricted structures.

Every detector returns a :class:`Verdict`.  Positive verdicts carrying data
(scalars, coefficients, 1-forms) are re-verified by substituting the data
back into the defining identity before they are emitted; negative verdicts
carry at least one component whose residual is not identically zero.

Index tuples are 0-based chart positions throughout the API; reports print
them 1-based.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Any, Callable, Sequence

from .curvature import CurvatureBundle
from .expr import ONE, ZERO, EvaluationError, Expr, expr_sum
from .linsolve import charpoly, field_roots, rank_by_minors, solve_linear
from .symbols import SymbolContext
from .tensor import ComponentTensor, MetricSpec, compose, determinant, kulkarni_nomizu, linear_combination, outer, sym_outer, trace

STATUSES = ("holds", "fails", "holds-with-data", "vacuous", "error")


class SelfCheckError(AssertionError):
    """Data attached to a positive verdict failed re-verification."""


@dataclass
class Witness:
    index: tuple
    value: Expr
    context: str = ""


@dataclass
class Verdict:
    name: str
    status: str
    data: dict[str, Any] = field(default_factory=dict)
    witnesses: list[Witness] = field(default_factory=list)
    note: str = ""
    flags: list[str] = field(default_factory=list)
    identity: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def positive(self) -> bool:
        return self.status in ("holds", "holds-with-data")


@dataclass
class ClassificationReport:
    metric: str
    verdicts: list[Verdict]
    settings: dict[str, Any]
    timing: float | None = None

    def __getitem__(self, name: str) -> Verdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def names(self) -> list[str]:
        return [v.name for v in self.verdicts]


# ---------------------------------------------------------------------------
# verification helpers


class _Point(dict):
    """Sample point that invents values for symbols outside the context."""

    def __init__(self, base, rng: random.Random):
        super().__init__(base)
        self._rng = rng

    def __missing__(self, vid):
        v = Fraction(self._rng.choice([-1, 1]) * self._rng.randint(1, 9), self._rng.randint(1, 9))
        self[vid] = v
        return v


class Sampler:
    """Exact evaluation of an identity at random admissible points.

    This is a second, independent route to the symbolic zero test: the terms
    are evaluated separately and combined in exact rationals.
    """

    def __init__(self, ctx: SymbolContext | None, trials: int = 0, seed: int = 0):
        self.points = []
        if ctx is None or trials <= 0:
            return
        rng = random.Random(seed)
        for _ in range(trials):
            self.points.append(_Point(ctx.random_point(rng), random.Random(rng.random())))

    def check(self, terms: Sequence[tuple[Expr, ComponentTensor]], label: str = ""):
        keys = set()
        for _, T in terms:
            keys.update(T.keys())
        for p in self.points:
            try:
                coeffs = [c.evaluate(p) for c, _ in terms]
                for idx in keys:
                    total = sum(
                        (c * T[idx].evaluate(p) for c, (_, T) in zip(coeffs, terms) if c and idx in T.keys()),
                        Fraction(0),
                    )
                    if total:
                        raise SelfCheckError(f"{label}: identity fails at a sample point, component {idx}")
            except EvaluationError:
                continue


_NO_SAMPLER = Sampler(None)


def residual(terms: Sequence[tuple[Expr, ComponentTensor]]) -> ComponentTensor:
    return linear_combination([c for c, _ in terms], [T for _, T in terms])


def _first_witness(T: ComponentTensor, context: str = "") -> Witness | None:
    idx = T.first_nonzero()
    return None if idx is None else Witness(idx, T[idx], context)


def _emit(name, terms, data, sampler: Sampler, identity="", note="", flags=None) -> Verdict:
    res = residual(terms)
    if not res.is_zero():
        w = _first_witness(res)
        raise SelfCheckError(f"{name}: data does not satisfy the identity at {w.index}")
    sampler.check(terms, name)
    return Verdict(name, "holds-with-data", data, note=note, flags=list(flags or []), identity=identity)


def vanishing(T: ComponentTensor, name: str, identity: str = "", vacuous: bool = False) -> Verdict:
    """holds iff every component of T is identically zero."""
    if T.is_zero():
        return Verdict(name, "vacuous" if vacuous else "holds", identity=identity)
    return Verdict(name, "fails", witnesses=[_first_witness(T)], identity=identity)


# ---------------------------------------------------------------------------
# linear identities


def proportionality(T1: ComponentTensor, T2: ComponentTensor, name: str = "proportionality",
                    identity: str = "", sampler: Sampler = _NO_SAMPLER) -> Verdict:
    """T1 = L T2 for a scalar function L.

    The pivot is the lexicographically first component with T2 not
    identically zero; the verdict is decided by the full residual.
    """
    if (T1.dim, T1.valence) != (T2.dim, T2.valence):
        raise ValueError("tensor shapes differ")
    if T2.is_zero():
        if T1.is_zero():
            return Verdict(name, "vacuous", note="both sides vanish", identity=identity)
        return Verdict(name, "fails", witnesses=[_first_witness(T1, "right-hand side vanishes")], identity=identity)
    c = T2.first_nonzero()
    L = T1[c] / T2[c]
    res = T1 - T2.scale(L)
    if not res.is_zero():
        return Verdict(name, "fails", witnesses=[_first_witness(res, f"L taken at {c}")], identity=identity)
    note = "" if L.is_constant() else "non-constant type"
    return _emit(name, [(ONE, T1), (-L, T2)], {"L": L}, sampler, identity, note)


def express_in_span(T: ComponentTensor, basis: Sequence[ComponentTensor], labels: Sequence[str] | None = None,
                    name: str = "span", identity: str = "", sampler: Sampler = _NO_SAMPLER) -> Verdict:
    """T = sum_i lambda_i B_i over the function field."""
    if not basis:
        raise ValueError("basis must be nonempty")
    labels = list(labels or [f"c{i + 1}" for i in range(len(basis))])
    if all(B.is_zero() for B in basis):
        if T.is_zero():
            return Verdict(name, "vacuous", note="all tensors vanish", identity=identity)
        return Verdict(name, "fails", witnesses=[_first_witness(T, "basis vanishes")], identity=identity)
    keys = set(T.keys())
    for B in basis:
        keys.update(B.keys())
    eqs = []
    for idx in sorted(keys):
        row = {i: B[idx] for i, B in enumerate(basis) if B[idx]}
        eqs.append((idx, row, T[idx]))
    sol = solve_linear(eqs, len(basis))
    if not sol.consistent:
        return Verdict(name, "fails", witnesses=[Witness(sol.witness, sol.residual, "reduced equation 0 = residual")],
                       identity=identity)
    data = dict(zip(labels, sol.values))
    note = ""
    if sol.free:
        note = "dependent basis; coefficients of " + ", ".join(labels[i] for i in sol.free) + " set to zero"
    terms = [(ONE, T)] + [(-lam, B) for lam, B in zip(sol.values, basis)]
    return _emit(name, terms, data, sampler, identity, note)


# ---------------------------------------------------------------------------
# Ricci structure


def ricci_endomorphism(S: ComponentTensor, ginv: ComponentTensor) -> list[list[Expr]]:
    n = S.dim
    return [[expr_sum(ginv[i, p] * S[p, j] for p in range(n) if ginv[i, p] and S[p, j]) for j in range(n)]
            for i in range(n)]


@dataclass
class RankAnalysis:
    candidates: list[tuple[Expr, int, Any]]
    complete: bool

    @property
    def min_rank(self) -> int | None:
        return min((k for _, k, _ in self.candidates), default=None)


def rank_analysis(S: ComponentTensor, g: ComponentTensor, ginv: ComponentTensor) -> RankAnalysis:
    """rank(S - alpha g) at each eigenvalue alpha of the Ricci endomorphism.

    Only eigenvalues can lower the rank below n, so when every root of the
    characteristic polynomial is found in the field the analysis is complete.
    """
    n = S.dim
    M = ricci_endomorphism(S, ginv)
    hints = [M[i][i] for i in range(n)] + [trace(S, ginv) / n]
    roots, complete = field_roots(charpoly(M), hints)
    out = []
    for alpha in roots:
        rows = [[S[i, j] - alpha * g[i, j] for j in range(n)] for i in range(n)]
        k, wit = rank_by_minors(rows)
        out.append((alpha, k, wit))
    return RankAnalysis(out, complete)


def quasi_einstein_verdict(ra: RankAnalysis, k: int, name: str, S: ComponentTensor, g: ComponentTensor) -> Verdict:
    """rank(S - alpha g) <= k for some alpha in the field."""
    identity = f"rank(S - alpha g) <= {k}"
    flags = [] if ra.complete else ["incomplete"]
    table = [{"alpha": a, "rank": r} for a, r, _ in ra.candidates]
    good = [(a, r) for a, r, _ in ra.candidates if r <= k]
    if good:
        # re-verify: every (r+1)-minor of S - alpha g vanishes
        for a, r in good:
            rows = [[S[i, j] - a * g[i, j] for j in range(S.dim)] for i in range(S.dim)]
            if rank_by_minors(rows)[0] != r:
                raise SelfCheckError(f"{name}: rank re-check failed")
        data = {"alpha": [a for a, _ in good], "rank": min(r for _, r in good), "candidates": table}
        return Verdict(name, "holds-with-data", data, identity=identity, flags=flags)
    wits = []
    for a, r, wit in ra.candidates:
        if wit is not None:
            rows_i, cols_i, minor = wit
            wits.append(Witness(tuple(rows_i) + tuple(cols_i), minor, f"nonzero {r}x{r} minor of S - ({a}) g"))
    note = "" if ra.complete else "characteristic polynomial not split over the field; only field roots examined"
    return Verdict(name, "fails", {"candidates": table}, wits, note=note, flags=flags, identity=identity)


def verify_decomposition(kind: str, S: ComponentTensor, g: ComponentTensor, ginv: ComponentTensor, cand: dict | None,
                         name: str, sampler: Sampler = _NO_SAMPLER) -> Verdict:
    """Check an explicitly supplied quasi-Einstein decomposition.

    kind: ``chaki``        S = alpha g + beta Pi(x)Pi + gamma (Pi(x)Phi + Phi(x)Pi)
          ``de-ghosh``     S = alpha g + beta Pi(x)Pi + gamma Phi(x)Phi
          ``pseudo-quasi`` S = alpha g + beta Pi(x)Pi + gamma E with E trace-free
                           and E(X, Pi#) = 0
    """
    identities = {
        "chaki": "S = alpha g + beta Pi(x)Pi + gamma (Pi(x)Phi + Phi(x)Pi)",
        "de-ghosh": "S = alpha g + beta Pi(x)Pi + gamma Phi(x)Phi",
        "pseudo-quasi": "S = alpha g + beta Pi(x)Pi + gamma E, tr E = 0, E(X, Pi#) = 0",
    }
    identity = identities[kind]
    if not cand:
        return Verdict(name, "vacuous", note="no candidate decomposition supplied", identity=identity)
    alpha, beta, gamma, Pi = cand["alpha"], cand["beta"], cand["gamma"], list(cand["Pi"])
    n = S.dim
    norm = lambda w: expr_sum(ginv[i, j] * w[i] * w[j] for i in range(n) for j in range(n) if ginv[i, j] and w[i] and w[j])
    PiPi = outer(Pi, Pi)
    data = {"alpha": alpha, "beta": beta, "gamma": gamma, "Pi": Pi, "|Pi|^2": norm(Pi)}
    if kind == "pseudo-quasi":
        if not gamma:
            raise ValueError("gamma must be nonzero")
        E = (S - g.scale(alpha) - PiPi.scale(beta)).scale(1 / gamma)
        V = [expr_sum(ginv[i, j] * Pi[j] for j in range(n) if ginv[i, j] and Pi[j]) for i in range(n)]
        EV = ComponentTensor(n, 1, {(i,): expr_sum(E[i, j] * V[j] for j in range(n) if V[j]) for i in range(n)})
        trE = trace(E, ginv)
        if trE:
            return Verdict(name, "fails", data, [Witness((), trE, "trace of E")], identity=identity)
        if not EV.is_zero():
            return Verdict(name, "fails", data, [_first_witness(EV, "E(X, Pi#)")], identity=identity)
        data["E"] = E
        return _emit(name, [(ONE, S), (-alpha, g), (-beta, PiPi), (-gamma, E)], data, sampler, identity)
    Phi = list(cand["Phi"])
    data["Phi"] = Phi
    data["|Phi|^2"] = norm(Phi)
    second = sym_outer(Pi, Phi) if kind == "chaki" else outer(Phi, Phi)
    terms = [(ONE, S), (-alpha, g), (-beta, PiPi), (-gamma, second)]
    res = residual(terms)
    if not res.is_zero():
        return Verdict(name, "fails", data, [_first_witness(res)], identity=identity)
    return _emit(name, terms, data, sampler, identity)


def ricci_powers(S: ComponentTensor, g: ComponentTensor, ginv: ComponentTensor, k: int) -> list[ComponentTensor]:
    """[g, S, S^2, ..., S^k] with S^j the j-fold Ricci endomorphism lowered by g."""
    out = [g, S]
    while len(out) < k + 1:
        out.append(compose(out[-1], S, ginv))
    return out[: k + 1]


def ein_level_verdict(S: ComponentTensor, g: ComponentTensor, ginv: ComponentTensor,
                      sampler: Sampler = _NO_SAMPLER) -> Verdict:
    """Smallest k with g, S, ..., S^k linearly dependent."""
    n = S.dim
    powers = ricci_powers(S, g, ginv, n)
    for k in range(1, n + 1):
        labels = ["g"] + [f"S^{j}" if j > 1 else "S" for j in range(1, k)]
        v = express_in_span(powers[k], powers[:k], labels, "ein-level", sampler=sampler)
        if v.status == "holds-with-data":
            v.data = {"level": k, "coefficients": dict(v.data)}
            v.identity = f"S^{k} in span(g, ..., S^{k - 1})" if k > 1 else "S in span(g)"
            return v
    raise ArithmeticError("Cayley-Hamilton violated: no dependency up to S^n")


def ein_level(S: ComponentTensor, g: ComponentTensor, ginv: ComponentTensor) -> int:
    return ein_level_verdict(S, g, ginv).data["level"]


# ---------------------------------------------------------------------------
# derivative classes of a symmetric (0,2) tensor


def codazzi_tensor(nablaZ: ComponentTensor) -> ComponentTensor:
    """Z_{ij,k} - Z_{ik,j} (derivative slot last)."""
    n = nablaZ.dim
    comps = {}
    for i, j, k in product(range(n), repeat=3):
        v = nablaZ[i, j, k] - nablaZ[i, k, j]
        if v:
            comps[i, j, k] = v
    return ComponentTensor(n, 3, comps, validate=False)


def cyclic_tensor(nablaZ: ComponentTensor) -> ComponentTensor:
    """Z_{ij,k} + Z_{jk,i} + Z_{ki,j}."""
    n = nablaZ.dim
    comps = {}
    for i, j, k in product(range(n), repeat=3):
        v = expr_sum([nablaZ[i, j, k], nablaZ[j, k, i], nablaZ[k, i, j]])
        if v:
            comps[i, j, k] = v
    return ComponentTensor(n, 3, comps, validate=False)


def ricci_derivative_class(nablaZ: ComponentTensor) -> str:
    """One of parallel, Codazzi, cyclic-parallel, none (strongest first)."""
    if nablaZ.is_zero():
        return "parallel"
    if codazzi_tensor(nablaZ).is_zero():
        return "Codazzi"
    if cyclic_tensor(nablaZ).is_zero():
        return "cyclic-parallel"
    return "none"


def derivative_class_verdicts(nablaZ: ComponentTensor, prefix: str) -> list[Verdict]:
    return [
        vanishing(nablaZ, f"{prefix}-parallel", f"nabla {prefix} = 0"),
        vanishing(codazzi_tensor(nablaZ), f"{prefix}-codazzi", "Z_ij,k - Z_ik,j = 0"),
        vanishing(cyclic_tensor(nablaZ), f"{prefix}-cyclic-parallel", "Z_ij,k + Z_jk,i + Z_ki,j = 0"),
    ]


# ---------------------------------------------------------------------------
# compatibility


def compatibility_tensor(E, D: ComponentTensor, ginv: ComponentTensor) -> ComponentTensor:
    """D(eX1, X, X2, X3) + D(eX2, X, X3, X1) + D(eX3, X, X1, X2), e = g^-1 E.

    ``E`` is a symmetric (0,2) tensor or a 1-form (list), the latter standing
    for Pi (x) Pi.
    """
    if isinstance(E, (list, tuple)):
        E = outer(list(E), list(E))
    n = D.dim
    endo = [[expr_sum(ginv[p, q] * E[q, i] for q in range(n) if ginv[p, q] and E[q, i]) for i in range(n)]
            for p in range(n)]
    # A[i, x, a, b] = sum_p e^p_i D[p, x, a, b]
    A: dict[tuple, Expr] = {}
    for (p, x, a, b), v in D.items():
        for i in range(n):
            if endo[p][i]:
                A.setdefault((i, x, a, b), []).append(endo[p][i] * v)
    A = {k: expr_sum(vs) for k, vs in A.items()}
    comps = {}
    for x1, x, x2, x3 in product(range(n), repeat=4):
        v = expr_sum(A[k] for k in ((x1, x, x2, x3), (x2, x, x3, x1), (x3, x, x1, x2)) if k in A)
        if v:
            comps[x1, x, x2, x3] = v
    return ComponentTensor(n, 4, comps, validate=False)


def compatibility_check(E, D: ComponentTensor, ginv: ComponentTensor, name: str = "compatibility") -> Verdict:
    identity = "D(eX1,X,X2,X3) + D(eX2,X,X3,X1) + D(eX3,X,X1,X2) = 0"
    if not isinstance(E, (list, tuple)):
        from .tensor import check_symmetry

        check_symmetry(E, "symmetric-pair")
    if D.is_zero():
        return Verdict(name, "vacuous", note="curvature tensor vanishes", identity=identity)
    return vanishing(compatibility_tensor(E, D, ginv), name, identity)


# ---------------------------------------------------------------------------
# recurrence and weak symmetry


def _one_form(values: Sequence[Expr], offset: int, n: int) -> list[Expr]:
    return list(values[offset : offset + n])


def form_recurrence(D: ComponentTensor, nablaD: ComponentTensor, name: str = "2-forms-recurrent",
                    sampler: Sampler = _NO_SAMPLER) -> Verdict:
    """Recurrence of the curvature 2-forms of D via the cyclic identity

    D_{bcXY,a} + D_{caXY,b} + D_{abXY,c} = Pi_a D_{bcXY} + Pi_b D_{caXY} + Pi_c D_{abXY}.

    D must be antisymmetric in its first two slots, so only a < b < c is
    needed.  Unknown: the 1-form Pi.
    """
    identity = "cyclic_(a,b,c) D_{bcXY,a} = cyclic_(a,b,c) Pi_a D_{bcXY}"
    n = D.dim
    if D.is_zero():
        return Verdict(name, "vacuous", note="tensor vanishes", identity=identity)
    eqs = []
    for a, b, c in combinations(range(n), 3):
        for X, Y in product(range(n), repeat=2):
            cyc = ((a, b, c), (b, c, a), (c, a, b))
            lhs = expr_sum(nablaD[y, z, X, Y, x] for x, y, z in cyc)
            row = {}
            for x, y, z in cyc:
                v = D[y, z, X, Y]
                if v:
                    row[x] = row.get(x, ZERO) + v
            row = {k: v for k, v in row.items() if v}
            if row or lhs:
                eqs.append(((a, b, c, X, Y), row, lhs))
    sol = solve_linear(eqs, n)
    if not sol.consistent:
        return Verdict(name, "fails", witnesses=[Witness(sol.witness, sol.residual, "reduced equation 0 = residual")],
                       identity=identity)
    Pi = sol.values
    note = ""
    if not any(Pi) and sol.null_vectors:
        Pi = sol.null_vectors[0]
        note = "solution not unique; one nonzero member of the solution family shown"
    if not any(Pi) and not nablaD.is_zero():
        # closed 2-forms: only the zero 1-form fits, which is not recurrence
        rows = {label: row for label, row, _ in eqs}
        pick = sol.pivot_labels
        minor = determinant([[rows[lab].get(c, ZERO) for c in range(n)] for lab in pick])
        eqs_txt = "; ".join(",".join(str(i + 1) for i in lab) for lab in pick)
        return Verdict(name, "fails", witnesses=[Witness((), minor, f"coefficient minor of equations {eqs_txt} forces Pi = 0")],
                       note="the cyclic derivative sum vanishes and only Pi = 0 satisfies the identity",
                       flags=["zero-form-only"], identity=identity)
    lhs_T, rhs_T = {}, {}
    for (a, b, c, X, Y), row, lhs in eqs:
        lhs_T[a, b, c, X, Y] = lhs
        rhs_T[a, b, c, X, Y] = expr_sum(v * Pi[k] for k, v in row.items() if Pi[k])
    L = ComponentTensor(n, 5, lhs_T, validate=False)
    R = ComponentTensor(n, 5, rhs_T, validate=False)
    return _emit(name, [(ONE, L), (-ONE, R)], {"Pi": Pi}, sampler, identity, note)


def one_form_recurrence(Z: ComponentTensor, nablaZ: ComponentTensor, name: str = "1-forms-recurrent",
                        sampler: Sampler = _NO_SAMPLER) -> Verdict:
    """Z_{bX,a} - Z_{aX,b} = Pi_a Z_{bX} - Pi_b Z_{aX}."""
    identity = "Z_{bX,a} - Z_{aX,b} = Pi_a Z_{bX} - Pi_b Z_{aX}"
    n = Z.dim
    if Z.is_zero():
        return Verdict(name, "vacuous", note="tensor vanishes", identity=identity)
    eqs = []
    for a, b in combinations(range(n), 2):
        for X in range(n):
            lhs = nablaZ[b, X, a] - nablaZ[a, X, b]
            row = {k: v for k, v in ((a, Z[b, X]), (b, -Z[a, X])) if v}
            if row or lhs:
                eqs.append(((a, b, X), row, lhs))
    sol = solve_linear(eqs, n)
    if not sol.consistent:
        return Verdict(name, "fails", witnesses=[Witness(sol.witness, sol.residual, "reduced equation 0 = residual")],
                       identity=identity)
    Pi = sol.values
    L = ComponentTensor(n, 3, {k: lhs for k, _, lhs in eqs}, validate=False)
    R = ComponentTensor(n, 3, {k: expr_sum(v * Pi[i] for i, v in row.items() if Pi[i]) for k, row, _ in eqs},
                        validate=False)
    return _emit(name, [(ONE, L), (-ONE, R)], {"Pi": Pi}, sampler, identity)


def recurrence_span(nablaD: ComponentTensor, basis: Sequence[ComponentTensor], labels: Sequence[str],
                    name: str, sampler: Sampler = _NO_SAMPLER, identity: str = "") -> Verdict:
    """nabla D = sum_i w_i (x) B_i for unknown 1-forms w_i (1-form slot last)."""
    n = nablaD.dim
    m = len(basis)
    if all(B.is_zero() for B in basis):
        if nablaD.is_zero():
            return Verdict(name, "vacuous", note="all tensors vanish", identity=identity)
        return Verdict(name, "fails", witnesses=[_first_witness(nablaD, "basis vanishes")], identity=identity)
    keys = set()
    for B in basis:
        keys.update(B.keys())
    keys.update(k[:-1] for k in nablaD.keys())
    eqs = []
    for idx in sorted(keys):
        for x in range(n):
            # unknown (i, x) is column i*n + x
            row = {i * n + x: B[idx] for i, B in enumerate(basis) if B[idx]}
            rhs = nablaD[idx + (x,)]
            if row or rhs:
                eqs.append((idx + (x,), row, rhs))
    sol = solve_linear(eqs, m * n)
    if not sol.consistent:
        return Verdict(name, "fails", witnesses=[Witness(sol.witness, sol.residual, "reduced equation 0 = residual")],
                       identity=identity)
    forms = [_one_form(sol.values, i * n, n) for i in range(m)]
    rhs = _forms_times(forms, basis)
    note = "" if not sol.free else "some 1-form components undetermined; set to zero"
    return _emit(name, [(ONE, nablaD), (-ONE, rhs)], dict(zip(labels, forms)), sampler, identity, note)


def _forms_times(forms, basis) -> ComponentTensor:
    n = basis[0].dim
    acc: dict[tuple, list] = {}
    for w, B in zip(forms, basis):
        for idx, v in B.items():
            for x in range(n):
                if w[x]:
                    acc.setdefault(idx + (x,), []).append(w[x] * v)
    return ComponentTensor(n, basis[0].valence + 1, {k: expr_sum(vs) for k, vs in acc.items()}, validate=False)


def weak_symmetry_solve(H: ComponentTensor, nablaH: ComponentTensor, mode: str = "full", name: str = "weakly-symmetric",
                        sampler: Sampler = _NO_SAMPLER) -> Verdict:
    """Weak symmetry of a (0,k) tensor H.

    H_{i1..ik,x} = Pi_x H_{i1..ik} + sum_s Phi^(s)_{i_s} H_{i1..x..ik}
    (x substituted in slot s).

    mode ``full``: independent Pi, Phi^(1..k) (k+1 unknown 1-forms);
    ``reduced``: Pi and one Theta shared by every slot;
    ``chaki``: a single A with Pi = 2A and every Phi^(s) = A.
    """
    n, k = H.dim, H.valence
    identity = {
        "full": "H_{..,x} = Pi_x H + sum_s Phi^(s)_{i_s} H(.. x at s ..)",
        "reduced": "H_{..,x} = Pi_x H + sum_s Theta_{i_s} H(.. x at s ..)",
        "chaki": "H_{..,x} = 2 A_x H + sum_s A_{i_s} H(.. x at s ..)",
    }[mode]
    if H.is_zero():
        return Verdict(name, "vacuous", note="tensor vanishes", identity=identity)
    nforms = {"full": k + 1, "reduced": 2, "chaki": 1}[mode]

    def col(form: int, comp: int) -> int:
        return form * n + comp

    eqs = []
    for idx in product(range(n), repeat=k):
        h = H[idx]
        for x in range(n):
            row: dict[int, Expr] = {}

            def put(c, v):
                if v:
                    row[c] = row[c] + v if c in row else v

            if mode == "chaki":
                put(col(0, x), h * 2 if h else ZERO)
            else:
                put(col(0, x), h)
            for s in range(k):
                v = H[idx[:s] + (x,) + idx[s + 1 :]]
                if not v:
                    continue
                form = {"full": 1 + s, "reduced": 1, "chaki": 0}[mode]
                put(col(form, idx[s]), v)
            row = {c: v for c, v in row.items() if v}
            lhs = nablaH[idx + (x,)]
            if row or lhs:
                eqs.append((idx + (x,), row, lhs))
    sol = solve_linear(eqs, nforms * n)
    if not sol.consistent:
        return Verdict(name, "fails", witnesses=[Witness(sol.witness, sol.residual, "reduced equation 0 = residual")],
                       identity=identity)
    forms = [_one_form(sol.values, f * n, n) for f in range(nforms)]
    rhs = ComponentTensor(
        n, k + 1, {key: expr_sum(v * sol.values[c] for c, v in row.items() if sol.values[c]) for key, row, _ in eqs},
        validate=False,
    )
    labels = {"full": ["Pi"] + [f"Phi{s + 1}" for s in range(k)], "reduced": ["Pi", "Theta"], "chaki": ["A"]}[mode]
    note = "" if not sol.free else "some 1-form components undetermined; set to zero"
    return _emit(name, [(ONE, nablaH), (-ONE, rhs)], dict(zip(labels, forms)), sampler, identity, note)


# ---------------------------------------------------------------------------
# the battery


CURV_WORD = {"R": "", "S": "ricci", "C": "conformally", "W": "concircularly", "P": "projectively", "K": "conharmonically"}
GROUPS = (
    "semisymmetry",
    "pseudosymmetry",
    "ricci-generalized",
    "weyl-pseudosymmetry",
    "mixed",
    "roter",
    "einstein",
    "ein-level",
    "ricci-derivative",
    "compatibility",
    "recurrence",
    "weak-symmetry",
    "divergence",
    "energy-momentum",
)
EM_NAMES = (
    "energy-momentum-divergence-free",
    "energy-momentum-parallel",
    "energy-momentum-codazzi",
    "energy-momentum-cyclic-parallel",
    "energy-momentum-pseudosymmetric",
    "rt-parameter-condition",
)


def _word(H: str, base: str, default: str) -> str:
    w = CURV_WORD[H]
    return f"{w}-{base}" if w else default


@dataclass
class Detector:
    name: str
    group: str
    run: Callable[["_Run"], Verdict]


class _Run:
    def __init__(self, metric: MetricSpec, bundle: CurvatureBundle, sampler: Sampler):
        self.m = metric
        self.B = bundle
        self.sampler = sampler
        self._cache: dict[str, Any] = {}

    def cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def cand(self) -> dict:
        return self.m.candidates

    def kn(self, A: str, E: str) -> ComponentTensor:
        return self.cached(f"kn {A} {E}", lambda: kulkarni_nomizu(self.B.tensor(A), self.B.tensor(E)))

    def energy(self) -> list[Verdict]:
        from .energy import em_conditions, energy_momentum

        return self.cached("energy", lambda: em_conditions(energy_momentum(self.B), sampler=self.sampler))

    def ranks(self) -> RankAnalysis:
        return self.cached("ranks", lambda: rank_analysis(self.B.S, self.B.g, self.B.ginv))


def _detectors() -> list[Detector]:
    dets: list[Detector] = []
    add = lambda name, group, fn: dets.append(Detector(name, group, fn))
    Hs = ("R", "S", "C", "W", "P", "K")

    for H in Hs:
        add(_word(H, "semisymmetric", "semisymmetric"), "semisymmetry",
            lambda r, H=H: vanishing(r.B.dot("R", H), "", f"R.{H} = 0"))
    for H in Hs:
        add(_word(H, "pseudosymmetric", "deszcz-pseudosymmetric"), "pseudosymmetry",
            lambda r, H=H: proportionality(r.B.dot("R", H), r.B.q("g", H), identity=f"R.{H} = L Q(g,{H})",
                                           sampler=r.sampler))
    for H in Hs:
        add("ricci-generalized-pseudosymmetric" + ("" if H == "R" else f"-{H}"), "ricci-generalized",
            lambda r, H=H: proportionality(r.B.dot("R", H), r.B.q("S", H), identity=f"R.{H} = L Q(S,{H})",
                                           sampler=r.sampler))
    for H in Hs:
        nm = {"R": "weyl-pseudosymmetric", "C": "pseudosymmetric-weyl-tensor"}.get(H, f"weyl-pseudosymmetric-{H}")
        add(nm, "weyl-pseudosymmetry",
            lambda r, H=H: proportionality(r.B.dot("C", H), r.B.q("g", H), identity=f"C.{H} = L Q(g,{H})",
                                           sampler=r.sampler))

    add("mixed-rr-qsr-qgc", "mixed", lambda r: express_in_span(
        r.B.dot("R", "R") - r.B.q("S", "R"), [r.B.q("g", "C")], ["Q(g,C)"],
        identity="R.R - Q(S,R) = L Q(g,C)", sampler=r.sampler))
    add("mixed-cr-rc-qgr-qsr", "mixed", lambda r: express_in_span(
        r.B.dot("C", "R") - r.B.dot("R", "C"), [r.B.q("g", "R"), r.B.q("S", "R")], ["Q(g,R)", "Q(S,R)"],
        identity="C.R - R.C = L1 Q(g,R) + L2 Q(S,R)", sampler=r.sampler))
    add("mixed-cr-rc-qgc-qsc", "mixed", lambda r: express_in_span(
        r.B.dot("C", "R") - r.B.dot("R", "C"), [r.B.q("g", "C"), r.B.q("S", "C")], ["Q(g,C)", "Q(S,C)"],
        identity="C.R - R.C = L1 Q(g,C) + L2 Q(S,C)", sampler=r.sampler))

    add("roter-type", "roter", _roter)
    add("generalized-roter-type", "roter", lambda r: express_in_span(
        r.B.R,
        [r.kn("g", "g"), r.kn("g", "S"), r.kn("S", "S"), r.kn("g", "S2"), r.kn("S", "S2"), r.kn("S2", "S2")],
        ["g^g", "g^S", "S^S", "g^S2", "S^S2", "S2^S2"],
        identity="R = L1 g^g + L2 g^S + L3 S^S + L4 g^S2 + L5 S^S2 + L6 S2^S2", sampler=r.sampler))

    add("einstein", "einstein", lambda r: proportionality(r.B.S, r.B.g, identity="S = alpha g", sampler=r.sampler))
    add("quasi-einstein", "einstein", lambda r: quasi_einstein_verdict(r.ranks(), 1, "", r.B.S, r.B.g))
    add("2-quasi-einstein", "einstein", lambda r: quasi_einstein_verdict(r.ranks(), 2, "", r.B.S, r.B.g))
    for kind, nm in (("chaki", "generalized-quasi-einstein-chaki"), ("de-ghosh", "generalized-quasi-einstein-de-ghosh"),
                     ("pseudo-quasi", "pseudo-quasi-einstein")):
        add(nm, "einstein", lambda r, kind=kind: verify_decomposition(
            kind, r.B.S, r.B.g, r.B.ginv, r.cand.get(kind), "", r.sampler))

    add("ein-level", "ein-level", lambda r: ein_level_verdict(r.B.S, r.B.g, r.B.ginv, r.sampler))

    add("ricci-parallel", "ricci-derivative", lambda r: vanishing(r.B.nabla("S"), "", "nabla S = 0"))
    add("ricci-codazzi", "ricci-derivative",
        lambda r: vanishing(codazzi_tensor(r.B.nabla("S")), "", "S_ij,k - S_ik,j = 0"))
    add("ricci-cyclic-parallel", "ricci-derivative",
        lambda r: vanishing(cyclic_tensor(r.B.nabla("S")), "", "S_ij,k + S_jk,i + S_ki,j = 0"))
    add("constant-scalar-curvature", "ricci-derivative", _constant_kappa)

    for D in ("R", "C", "W", "K", "P"):
        add(f"ricci-{D}-compatible", "compatibility",
            lambda r, D=D: compatibility_check(r.B.S, r.B.tensor(D), r.B.ginv))
    for D in ("R", "C", "W", "K"):
        add(f"block-tensor-{D}-compatible", "compatibility", lambda r, D=D: _candidate_compat(r, "tensors", D))
    for D in ("R", "C"):
        add(f"axis-forms-{D}-compatible", "compatibility", lambda r, D=D: _candidate_compat(r, "forms", D))

    sym_names = {"R": "locally-symmetric"}
    for D in ("R", "C", "P", "W", "K"):
        add(sym_names.get(D, _word(D, "symmetric", "")), "recurrence",
            lambda r, D=D: vanishing(r.B.nabla(D), "", f"nabla {D} = 0"))
    for D in ("R", "C", "P", "W", "K"):
        add(_word(D, "recurrent", "recurrent"), "recurrence", lambda r, D=D: recurrence_span(
            r.B.nabla(D), [r.B.tensor(D)], ["Pi"], "", r.sampler, f"nabla {D} = Pi (x) {D}"))
    add("super-generalized-recurrent", "recurrence", lambda r: recurrence_span(
        r.B.nabla("R"), [r.B.R, r.kn("S", "S"), r.kn("g", "S"), r.kn("g", "g")], ["Pi", "Phi", "Psi", "Theta"], "",
        r.sampler, "nabla R = Pi(x)R + Phi(x)S^S + Psi(x)g^S + Theta(x)g^g"))
    add("weakly-generalized-recurrent", "recurrence", lambda r: recurrence_span(
        r.B.nabla("R"), [r.B.R, r.kn("S", "S")], ["Pi", "Phi"], "", r.sampler, "nabla R = Pi(x)R + Phi(x)S^S"))
    add("hyper-generalized-recurrent", "recurrence", lambda r: recurrence_span(
        r.B.nabla("R"), [r.B.R, r.kn("g", "S")], ["Pi", "Psi"], "", r.sampler, "nabla R = Pi(x)R + Psi(x)g^S"))
    for D in ("R", "C", "P", "W", "K"):
        add(f"curvature-2-forms-recurrent-{D}", "recurrence",
            lambda r, D=D: form_recurrence(r.B.tensor(D), r.B.nabla(D), "", r.sampler))
    add("ricci-1-forms-recurrent", "recurrence", lambda r: one_form_recurrence(r.B.S, r.B.nabla("S"), "", r.sampler))

    for D in ("R", "C", "P", "W", "K"):
        mode = "full" if D == "P" else "reduced"
        add(f"weakly-symmetric-{D}", "weak-symmetry",
            lambda r, D=D, mode=mode: weak_symmetry_solve(r.B.tensor(D), r.B.nabla(D), mode, "", r.sampler))
    for D in ("R", "C", "P", "W", "K"):
        add(f"chaki-pseudosymmetric-{D}", "weak-symmetry",
            lambda r, D=D: weak_symmetry_solve(r.B.tensor(D), r.B.nabla(D), "chaki", "", r.sampler))
    add("weakly-ricci-symmetric", "weak-symmetry",
        lambda r: weak_symmetry_solve(r.B.S, r.B.nabla("S"), "full", "", r.sampler))
    add("chaki-pseudo-ricci-symmetric", "weak-symmetry",
        lambda r: weak_symmetry_solve(r.B.S, r.B.nabla("S"), "chaki", "", r.sampler))

    for D in ("R", "C", "P", "W", "K"):
        add(f"div-{D}-vanishes", "divergence", lambda r, D=D: vanishing(r.B.div(D), "", f"div {D} = 0"))
    for i, nm in enumerate(EM_NAMES):
        add(nm, "energy-momentum", lambda r, i=i: r.energy()[i])
    return dets


def _roter(r: _Run) -> Verdict:
    v = express_in_span(r.B.R, [r.kn("S", "S"), r.kn("g", "S"), r.kn("g", "g")], ["S^S", "g^S", "g^g"],
                        identity="R = N1 S^S + N2 g^S + N3 g^g", sampler=r.sampler)
    expected = r.cand.get("expected", {}).get("roter-type")
    if v.status == "holds-with-data" and expected:
        _compare_expected(v, expected)
    return v


def _compare_expected(v: Verdict, expected: dict) -> None:
    """Note coefficients that differ from externally supplied expectations.

    ``expected`` maps a data label to a list of acceptable readings.
    """
    bad = []
    for label, readings in expected.items():
        got = v.data.get(label)
        hits = [i for i, e in enumerate(readings) if got is not None and got == e]
        if not hits:
            bad.append(label)
        elif hits[0] != 0:
            v.flags.append("expected-discrepancy")
            bad.append(f"{label} (matches alternative reading {hits[0] + 1})")
    if bad:
        if "expected-discrepancy" not in v.flags:
            v.flags.append("expected-discrepancy")
        v.note = (v.note + "; " if v.note else "") + "solver value differs from expected: " + ", ".join(bad)


def _constant_kappa(r: _Run) -> Verdict:
    k = r.B.kappa
    n = r.B.n
    comps = {(i,): r.m.diff(k, i) for i in range(n)}
    return vanishing(ComponentTensor(n, 1, comps, validate=False), "", "d kappa = 0")


def _candidate_compat(r: _Run, kind: str, D: str) -> Verdict:
    items = r.cand.get(f"compatible-{kind}", {})
    identity = "D(eX1,X,X2,X3) + cyclic = 0 for every supplied candidate"
    if not items:
        return Verdict("", "vacuous", note="no candidate supplied", identity=identity)
    for cname, E in items.items():
        v = compatibility_check(E, r.B.tensor(D), r.B.ginv)
        if v.status == "fails":
            for w in v.witnesses:
                w.context = f"candidate {cname}"
            return v
        if v.status == "vacuous":
            return v
    return Verdict("", "holds", note="candidates: " + ", ".join(items), identity=identity)


DETECTORS = _detectors()
DETECTOR_NAMES = tuple(d.name for d in DETECTORS)


def select(checks: Sequence[str] | str | None) -> list[Detector]:
    """Resolve ``all``, group names and detector names, in battery order."""
    if checks is None or checks == "all" or (not isinstance(checks, str) and list(checks) == ["all"]):
        return list(DETECTORS)
    if isinstance(checks, str):
        checks = [c.strip() for c in checks.split(",") if c.strip()]
    wanted = set(checks)
    unknown = wanted - set(GROUPS) - set(DETECTOR_NAMES)
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(sorted(unknown))}")
    return [d for d in DETECTORS if d.name in wanted or d.group in wanted]


def full_report(metric: MetricSpec, checks=None, *, trials: int = 8, seed: int = 0,
                bundle: CurvatureBundle | None = None, timing: bool = False) -> ClassificationReport:
    """Run the detector battery in its fixed order.

    A detector that raises becomes an ``error`` verdict; the battery always
    completes.
    """
    start = time.perf_counter()
    bundle = bundle or CurvatureBundle(metric)
    ctx = metric.candidates.get("context", metric.ctx)
    sampler = Sampler(ctx, trials, seed)
    run = _Run(metric, bundle, sampler)
    verdicts = []
    for det in select(checks):
        try:
            v = det.run(run)
            v.name = det.name
        except Exception as exc:  # noqa: BLE001 - reported, never fatal
            v = Verdict(det.name, "error", note=f"{type(exc).__name__}: {exc}", flags=["error"])
        verdicts.append(v)
    settings = {"jet_depth": metric.ctx.jet_depth, "trials": trials, "seed": seed}
    elapsed = time.perf_counter() - start if timing else None
    return ClassificationReport(metric.name, verdicts, settings, elapsed)
