"""Component tensors of valence (0, k) over exact expressions."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Iterable, Mapping

from .expr import ONE, ZERO, Expr, expr_sum
from .symbols import SymbolContext

SYMMETRIES = ("none", "symmetric-pair", "generalized-curvature", "projective-like")


class SymmetryError(ValueError):
    """Declared symmetry does not hold; carries the offending index tuple."""

    def __init__(self, message: str, witness: tuple[int, ...] = ()):
        super().__init__(message + (f" at {witness}" if witness else ""))
        self.witness = witness


class DegenerateMetricError(ValueError):
    pass


class ComponentTensor:
    """Dense valence-(0,k) tensor; absent components are zero.

    Indices are 0-based tuples.  Only nonzero components are stored.
    """

    __slots__ = ("dim", "valence", "_c", "symmetry", "name")

    def __init__(
        self,
        dim: int,
        valence: int,
        components: Mapping[tuple[int, ...], Expr] | None = None,
        symmetry: str = "none",
        name: str = "",
        validate: bool = True,
    ):
        if symmetry not in SYMMETRIES:
            raise ValueError(f"unknown symmetry {symmetry!r}")
        self.dim = dim
        self.valence = valence
        self.symmetry = symmetry
        self.name = name
        self._c: dict[tuple[int, ...], Expr] = {}
        for idx, v in (components or {}).items():
            if len(idx) != valence or any(not 0 <= i < dim for i in idx):
                raise IndexError(f"index {idx} invalid for dim {dim}, valence {valence}")
            if v:
                self._c[tuple(idx)] = v
        if validate and symmetry != "none":
            check_symmetry(self, symmetry)

    @classmethod
    def from_function(cls, dim, valence, fn: Callable[..., Expr], **kw) -> "ComponentTensor":
        return cls(dim, valence, {idx: fn(*idx) for idx in product(range(dim), repeat=valence)}, **kw)

    @classmethod
    def from_matrix(cls, rows, **kw) -> "ComponentTensor":
        n = len(rows)
        comps = {(i, j): rows[i][j] for i in range(n) for j in range(n)}
        return cls(n, 2, comps, **kw)

    def __getitem__(self, idx) -> Expr:
        return self._c.get(idx, ZERO)

    def items(self):
        return self._c.items()

    def keys(self):
        return self._c.keys()

    def __len__(self):
        return len(self._c)

    def indices(self) -> Iterable[tuple[int, ...]]:
        return product(range(self.dim), repeat=self.valence)

    def is_zero(self) -> bool:
        return not self._c

    def first_nonzero(self) -> tuple[int, ...] | None:
        return min(self._c) if self._c else None

    def matrix(self) -> list[list[Expr]]:
        if self.valence != 2:
            raise ValueError("matrix() needs valence 2")
        return [[self[i, j] for j in range(self.dim)] for i in range(self.dim)]

    def _like(self, comps, symmetry=None, name="") -> "ComponentTensor":
        return ComponentTensor(self.dim, self.valence, comps, symmetry or "none", name, validate=False)

    def _check_shape(self, other: "ComponentTensor"):
        if (self.dim, self.valence) != (other.dim, other.valence):
            raise ValueError("tensor shapes differ")

    def __add__(self, other: "ComponentTensor") -> "ComponentTensor":
        self._check_shape(other)
        comps = dict(self._c)
        for k, v in other._c.items():
            comps[k] = comps[k] + v if k in comps else v
        sym = self.symmetry if self.symmetry == other.symmetry else "none"
        return self._like(comps, sym)

    def __neg__(self):
        return self._like({k: -v for k, v in self._c.items()}, self.symmetry)

    def __sub__(self, other: "ComponentTensor") -> "ComponentTensor":
        return self + (-other)

    def scale(self, s) -> "ComponentTensor":
        if not isinstance(s, Expr):
            s = Expr.const(s)
        if s.is_zero():
            return self._like({}, self.symmetry)
        return self._like({k: v * s for k, v in self._c.items()}, self.symmetry)

    __rmul__ = scale

    def __mul__(self, s):
        return self.scale(s)

    def map(self, fn: Callable[[Expr], Expr]) -> "ComponentTensor":
        return self._like({k: fn(v) for k, v in self._c.items()}, self.symmetry)

    def equals(self, other: "ComponentTensor") -> bool:
        return (self - other).is_zero()

    def __repr__(self):
        return f"ComponentTensor({self.name or '?'}, dim={self.dim}, valence={self.valence}, nnz={len(self._c)})"


def linear_combination(coeffs: Iterable[Expr], tensors: Iterable[ComponentTensor]) -> ComponentTensor:
    coeffs = list(coeffs)
    tensors = list(tensors)
    base = tensors[0]
    acc: dict[tuple, list] = {}
    for c, t in zip(coeffs, tensors):
        if not c:
            continue
        for k, v in t.items():
            acc.setdefault(k, []).append(c * v)
    comps = {k: expr_sum(vs) for k, vs in acc.items()}
    syms = {t.symmetry for t in tensors}
    sym = syms.pop() if len(syms) == 1 else "none"
    return ComponentTensor(base.dim, base.valence, comps, sym, validate=False)


def first_bianchi_residual(D: ComponentTensor):
    n = D.dim
    for i, j, k, l in product(range(n), repeat=4):
        r = D[i, j, k, l] + D[j, k, i, l] + D[k, i, j, l]
        if r:
            return (i, j, k, l), r
    return None


def check_symmetry(T: ComponentTensor, symmetry: str) -> None:
    """Raise :class:`SymmetryError` unless ``T`` has the declared symmetry."""
    n = T.dim
    if symmetry == "symmetric-pair":
        if T.valence != 2:
            raise SymmetryError("symmetric-pair needs valence 2")
        for i, j in combinations(range(n), 2):
            if T[i, j] != T[j, i]:
                raise SymmetryError("not symmetric", (i, j))
        return
    if symmetry in ("generalized-curvature", "projective-like"):
        if T.valence != 4:
            raise SymmetryError(f"{symmetry} needs valence 4")
        for i, j, k, l in product(range(n), repeat=4):
            a = T[i, j, k, l]
            if i <= j and (a + T[j, i, k, l]):
                raise SymmetryError("not antisymmetric in slots 1,2", (i, j, k, l))
            if symmetry == "generalized-curvature":
                if k <= l and (a + T[i, j, l, k]):
                    raise SymmetryError("not antisymmetric in slots 3,4", (i, j, k, l))
                if (i, j) < (k, l) and a != T[k, l, i, j]:
                    raise SymmetryError("pair exchange fails", (i, j, k, l))
        bad = first_bianchi_residual(T)
        if bad:
            raise SymmetryError("first Bianchi identity fails", bad[0])
        return
    raise ValueError(f"unknown symmetry {symmetry!r}")


def is_generalized_curvature(T: ComponentTensor) -> bool:
    try:
        check_symmetry(T, "generalized-curvature")
    except SymmetryError:
        return False
    return True


# ---------------------------------------------------------------------------
# metric


@dataclass
class MetricSpec:
    """A chart, lower metric components and the symbol context they live in."""

    ctx: SymbolContext
    g: ComponentTensor
    name: str = "metric"
    assumptions: tuple[str, ...] = ()
    candidates: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.g.valence != 2:
            raise ValueError("metric must be a (0,2) tensor")
        if self.g.dim != len(self.ctx.coordinates):
            raise ValueError("metric dimension does not match the chart")
        check_symmetry(self.g, "symmetric-pair")
        self._ginv = None

    @property
    def dim(self) -> int:
        return self.g.dim

    @property
    def coordinates(self) -> tuple[str, ...]:
        return self.ctx.coordinates

    @property
    def ginv(self) -> ComponentTensor:
        if self._ginv is None:
            self._ginv = inverse_metric(self)
        return self._ginv

    def diff(self, e: Expr, i: int) -> Expr:
        return self.ctx.diff(e, self.ctx.coordinates[i])


def solve_matrix_inverse(rows: list[list[Expr]]) -> list[list[Expr]] | None:
    """Gauss-Jordan inverse over the rational function field; None if singular."""
    n = len(rows)
    a = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv if x else ZERO for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y if y else x for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def inverse_metric(m: MetricSpec) -> ComponentTensor:
    """g^{ij}, verified symbolically against g_{ij}."""
    inv = solve_matrix_inverse(m.g.matrix())
    if inv is None:
        raise DegenerateMetricError(f"metric {m.name!r} is identically degenerate")
    n = m.dim
    for i in range(n):
        for j in range(n):
            s = expr_sum(m.g[i, k] * inv[k][j] for k in range(n) if m.g[i, k] and inv[k][j])
            if s != (ONE if i == j else ZERO):
                raise DegenerateMetricError("inverse check failed")
    return ComponentTensor.from_matrix(inv, symmetry="symmetric-pair", name="ginv")


def determinant(rows: list[list[Expr]]) -> Expr:
    """Exact determinant by fraction-free elimination."""
    n = len(rows)
    if n == 0:
        return ONE
    a = [list(r) for r in rows]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        piv = next((r for r in range(k, n) if a[r][k]), None)
        if piv is None:
            return ZERO
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return a[n - 1][n - 1] * sign


def kulkarni_nomizu(A: ComponentTensor, E: ComponentTensor) -> ComponentTensor:
    """(A wedge E)_{abcd} = A_ad E_bc + A_bc E_ad - A_ac E_bd - A_bd E_ac."""
    for T in (A, E):
        if T.valence != 2:
            raise ValueError("Kulkarni-Nomizu product needs (0,2) tensors")
        check_symmetry(T, "symmetric-pair")
    if A.dim != E.dim:
        raise ValueError("dimension mismatch")
    n = A.dim
    comps = {}
    for a, b in combinations(range(n), 2):
        for c, d in combinations(range(n), 2):
            if (a, b) > (c, d):
                continue
            terms = []
            for x, y in (((a, d), (b, c)), ((b, c), (a, d))):
                if A[x] and E[y]:
                    terms.append(A[x] * E[y])
            for x, y in (((a, c), (b, d)), ((b, d), (a, c))):
                if A[x] and E[y]:
                    terms.append(-(A[x] * E[y]))
            v = expr_sum(terms)
            if v:
                for idx, s in (((a, b, c, d), 1), ((b, a, c, d), -1), ((a, b, d, c), -1), ((b, a, d, c), 1)):
                    comps[idx] = v if s == 1 else -v
                    comps[idx[2:] + idx[:2]] = comps[idx]
    return ComponentTensor(n, 4, comps, "generalized-curvature", name="KN", validate=False)


def christoffel(m: MetricSpec) -> dict[tuple[int, int, int], Expr]:
    """Gamma^k_{ij} = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij), keyed (k, i, j)."""
    n = m.dim
    dg = {}
    for i in range(n):
        for a, b in m.g.keys():
            v = m.diff(m.g[a, b], i)
            if v:
                dg[a, b, i] = v
    lower = {}
    for l in range(n):
        for i in range(n):
            for j in range(i, n):
                terms = [dg.get((j, l, i)), dg.get((i, l, j))]
                if (i, j, l) in dg:
                    terms.append(-dg[i, j, l])
                v = expr_sum(x for x in terms if x is not None)
                if v:
                    lower[l, i, j] = v / 2
    gam = {}
    ginv = m.ginv
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                v = expr_sum(ginv[k, l] * lower[l, i, j] for l in range(n) if ginv[k, l] and (l, i, j) in lower)
                if v:
                    gam[k, i, j] = v
                    gam[k, j, i] = v
    return gam


def covariant_derivative(T: ComponentTensor, m: MetricSpec, gam) -> ComponentTensor:
    """T_{i1..ik;l}, derivative slot last."""
    n, k = T.dim, T.valence
    by_p: dict[int, list[tuple[int, int, Expr]]] = {}
    for (p, l, i), v in gam.items():
        by_p.setdefault(p, []).append((l, i, v))
    acc: dict[tuple, list] = {}
    for idx, v in T.items():
        for l in range(n):
            d = m.diff(v, l)
            if d:
                acc.setdefault(idx + (l,), []).append(d)
    # - sum_s Gamma^p_{l i_s} T_{..p..}: scatter from each nonzero T component
    for idx, v in T.items():
        for s in range(k):
            for l, i, gv in by_p.get(idx[s], ()):
                out = idx[:s] + (i,) + idx[s + 1 :] + (l,)
                acc.setdefault(out, []).append(-(gv * v))
    comps = {key: expr_sum(vs) for key, vs in acc.items()}
    return ComponentTensor(n, k + 1, comps, name=f"nabla {T.name}", validate=False)


def metric_contract(T: ComponentTensor, slots: tuple[int, int], ginv: ComponentTensor) -> ComponentTensor:
    """Contract 0-based ``slots`` of ``T`` with the inverse metric."""
    a, b = slots
    if a == b or not (0 <= a < T.valence and 0 <= b < T.valence):
        raise IndexError(f"invalid contraction slots {slots} for valence {T.valence}")
    if a > b:
        a, b = b, a
    acc: dict[tuple, list] = {}
    for idx, v in T.items():
        gv = ginv[idx[a], idx[b]]
        if gv:
            rest = idx[:a] + idx[a + 1 : b] + idx[b + 1 :]
            acc.setdefault(rest, []).append(gv * v)
    if T.valence == 2:
        return ComponentTensor(T.dim, 0, {(): expr_sum(acc.get((), []))}, validate=False)
    comps = {k: expr_sum(vs) for k, vs in acc.items()}
    return ComponentTensor(T.dim, T.valence - 2, comps, validate=False)


def trace(T: ComponentTensor, ginv: ComponentTensor) -> Expr:
    return metric_contract(T, (0, 1), ginv)[()]


def compose(A: ComponentTensor, B: ComponentTensor, ginv: ComponentTensor) -> ComponentTensor:
    """(A o B)_{ij} = A_{ip} g^{pq} B_{qj}; S o S is the second-level Ricci tensor."""
    n = A.dim
    comps = {}
    for i in range(n):
        for j in range(n):
            comps[i, j] = expr_sum(
                A[i, p] * ginv[p, q] * B[q, j]
                for p in range(n)
                for q in range(n)
                if A[i, p] and ginv[p, q] and B[q, j]
            )
    return ComponentTensor(n, 2, comps, validate=False)


def outer(u: list[Expr], v: list[Expr]) -> ComponentTensor:
    n = len(u)
    return ComponentTensor(n, 2, {(i, j): u[i] * v[j] for i in range(n) for j in range(n)}, validate=False)


def sym_outer(u: list[Expr], v: list[Expr]) -> ComponentTensor:
    """u (x) v + v (x) u."""
    n = len(u)
    return ComponentTensor(
        n, 2, {(i, j): u[i] * v[j] + v[i] * u[j] for i in range(n) for j in range(n)}, validate=False
    )


def one_form_product(w: list[Expr], T: ComponentTensor) -> ComponentTensor:
    """(w (x) T) with the 1-form slot last, matching the comma-derivative convention."""
    comps = {}
    for idx, v in T.items():
        for l, wl in enumerate(w):
            if wl:
                comps[idx + (l,)] = v * wl
    return ComponentTensor(T.dim, T.valence + 1, comps, validate=False)
