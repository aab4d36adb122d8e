"""Linear algebra over the rational function field.

Everything here is exact: a pivot is usable iff its numerator is not the zero
polynomial, so no step depends on sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Sequence

from .expr import ONE, ZERO, Expr, expr_sum
from .tensor import determinant


@dataclass
class LinearSolution:
    """Outcome of :func:`solve_linear`.

    ``values`` is a particular solution with every free unknown set to zero.
    On inconsistency ``values`` is None and ``witness`` is the label of the
    equation that reduced to ``0 = residual`` with a nonzero residual.
    """

    values: list[Expr] | None
    free: list[int] = field(default_factory=list)
    witness: Hashable | None = None
    residual: Expr | None = None
    null_vectors: list[list[Expr]] = field(default_factory=list)
    pivot_labels: list[Hashable] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.values is not None


class _Echelon:
    """Incremental reduced row echelon form; rows are sparse {col: Expr}."""

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.rows: dict[int, tuple[dict[int, Expr], Expr]] = {}

    def reduce(self, row: dict[int, Expr], rhs: Expr):
        row = dict(row)
        for col in sorted(c for c in row if c in self.rows):
            f = row.get(col)
            if not f:
                continue
            prow, prhs = self.rows[col]
            for c, v in prow.items():
                nv = row.get(c, ZERO) - f * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            rhs = rhs - f * prhs
        return {c: v for c, v in row.items() if v}, rhs

    def add(self, row: dict[int, Expr], rhs: Expr) -> Expr | None:
        """Insert an equation; returns the nonzero residual if inconsistent."""
        row, rhs = self.reduce(row, rhs)
        if not row:
            return rhs if rhs else None
        col = min(row)
        inv = row[col].inverse()
        row = {c: v * inv for c, v in row.items()}
        rhs = rhs * inv
        for pc, (prow, prhs) in list(self.rows.items()):
            f = prow.get(col)
            if f:
                new = dict(prow)
                for c, v in row.items():
                    nv = new.get(c, ZERO) - f * v
                    if nv:
                        new[c] = nv
                    else:
                        new.pop(c, None)
                self.rows[pc] = (new, prhs - f * rhs)
        self.rows[col] = (row, rhs)
        return None

    @property
    def rank(self) -> int:
        return len(self.rows)

    def null_vectors(self) -> list[list[Expr]]:
        """A basis of the homogeneous solutions, one vector per free unknown."""
        out = []
        for c in range(self.nvars):
            if c in self.rows:
                continue
            v = [ZERO] * self.nvars
            v[c] = ONE
            for p, (prow, _) in self.rows.items():
                if prow.get(c):
                    v[p] = -prow[c]
            out.append(v)
        return out

    def solution(self) -> tuple[list[Expr], list[int]]:
        values = [ZERO] * self.nvars
        free = [c for c in range(self.nvars) if c not in self.rows]
        for col, (_, rhs) in self.rows.items():
            # free unknowns are zero, so only the right-hand side survives
            values[col] = rhs
        return values, free


def solve_linear(equations: Sequence[tuple[Hashable, dict[int, Expr], Expr]], nvars: int) -> LinearSolution:
    """Solve ``sum_c row[c] * x_c = rhs`` for every ``(label, row, rhs)``.

    The returned particular solution is re-substituted into every equation,
    including those that were redundant during elimination.
    """
    ech = _Echelon(nvars)
    pivots = []
    for label, row, rhs in equations:
        before = ech.rank
        bad = ech.add(row, rhs)
        if bad is not None:
            return LinearSolution(None, witness=label, residual=bad)
        if ech.rank > before:
            pivots.append(label)
    values, free = ech.solution()
    for label, row, rhs in equations:
        res = expr_sum([rhs] + [-(v * values[c]) for c, v in row.items() if values[c]])
        if res:
            raise ArithmeticError(f"elimination residual nonzero at {label}")
    return LinearSolution(values, free, null_vectors=ech.null_vectors(), pivot_labels=pivots)


def matrix_rank(rows: Sequence[Sequence[Expr]]) -> int:
    ech = _Echelon(len(rows[0]) if rows else 0)
    for r in rows:
        ech.add({c: v for c, v in enumerate(r) if v}, ZERO)
    return ech.rank


def rank_by_minors(rows: Sequence[Sequence[Expr]]):
    """Rank as the size of the largest non-vanishing minor.

    Returns ``(rank, witness)`` where ``witness`` is ``(row_indices,
    col_indices, minor)`` for a nonzero minor of maximal size (None for the
    zero matrix).
    """
    n = len(rows)
    m = len(rows[0]) if n else 0
    witness = None
    rank = 0
    for k in range(1, min(n, m) + 1):
        found = None
        for ri in combinations(range(n), k):
            for ci in combinations(range(m), k):
                d = determinant([[rows[i][j] for j in ci] for i in ri])
                if d:
                    found = (ri, ci, d)
                    break
            if found:
                break
        if not found:
            break
        rank, witness = k, found
    return rank, witness


# ---------------------------------------------------------------------------
# univariate polynomials with coefficients in the field, low degree first


def _trim(p: list[Expr]) -> list[Expr]:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def upoly_deriv(p: list[Expr]) -> list[Expr]:
    return _trim([c * k for k, c in enumerate(p)][1:])


def upoly_divmod(p: list[Expr], d: list[Expr]) -> tuple[list[Expr], list[Expr]]:
    p, d = _trim(p), _trim(d)
    if not d:
        raise ZeroDivisionError("polynomial division by zero")
    inv = d[-1].inverse()
    quot = [ZERO] * max(len(p) - len(d) + 1, 0)
    while len(p) >= len(d):
        shift = len(p) - len(d)
        c = p[-1] * inv
        quot[shift] = c
        for k, dk in enumerate(d):
            if dk:
                p[k + shift] = p[k + shift] - c * dk
        p = _trim(p[:-1])
    return quot, p


def upoly_monic(p: list[Expr]) -> list[Expr]:
    p = _trim(p)
    inv = p[-1].inverse()
    return [c * inv for c in p]


def upoly_gcd(p: list[Expr], q: list[Expr]) -> list[Expr]:
    p, q = _trim(p), _trim(q)
    while q:
        p, q = q, upoly_divmod(p, q)[1]
    return upoly_monic(p) if p else []


def upoly_eval(p: list[Expr], x: Expr) -> Expr:
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def charpoly(rows: Sequence[Sequence[Expr]]) -> list[Expr]:
    """det(t I - M) by Faddeev-LeVerrier, coefficients low degree first."""
    n = len(rows)
    M = [list(r) for r in rows]
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    Mk = [[ZERO] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk <- M (Mk + c_{n-k+1} I)
        c_prev = coeffs[n - k + 1]
        A = [[Mk[i][j] + (c_prev if i == j else ZERO) for j in range(n)] for i in range(n)]
        Mk = [[expr_sum(M[i][p] * A[p][j] for p in range(n) if M[i][p] and A[p][j]) for j in range(n)] for i in range(n)]
        tr = expr_sum(Mk[i][i] for i in range(n))
        coeffs[n - k] = -tr / k
    return coeffs


def expr_sqrt(e: Expr) -> Expr | None:
    """Exact square root in the field, if one exists with the obvious sign."""
    if not e:
        return ZERO
    den = e.den_poly()
    root = (e.num * den).sqrt()
    if root is None:
        return None
    return Expr.from_poly(root) / Expr.from_poly(den)


def field_roots(p: list[Expr], hints: Sequence[Expr] = ()) -> tuple[list[Expr], bool]:
    """Distinct roots of ``p`` lying in the field.

    Works on the square-free part: linear and quadratic factors are solved
    directly (the quadratic through an exact discriminant root); higher
    degrees are split by the candidate ``hints``.  The flag is True when
    every root was found.
    """
    p = _trim(p)
    if len(p) <= 1:
        return [], True
    g = upoly_gcd(p, upoly_deriv(p))
    sqf = upoly_divmod(p, g)[0] if len(g) > 1 else p
    sqf = upoly_monic(sqf)
    roots: list[Expr] = []
    for h in hints:
        if len(sqf) <= 3:
            break
        if not upoly_eval(sqf, h) and not any(h == r for r in roots):
            roots.append(h)
            sqf = upoly_divmod(sqf, [-h, ONE])[0]
    complete = True
    if len(sqf) == 2:
        roots.append(-sqf[0])
    elif len(sqf) == 3:
        c, b, _ = sqf
        disc = b * b - c * 4
        s = expr_sqrt(disc)
        if s is None:
            complete = False
        else:
            roots.extend([(-b + s) / 2, (-b - s) / 2])
    elif len(sqf) > 3:
        complete = False
    return roots, complete

