"""Independent sympy implementation of the curvature pipeline.

Written from the textbook component formulas and used only as an oracle in
tests; nothing here is shared with the package.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import sympy as sp


class SympyGeometry:
    def __init__(self, coords, g):
        self.x = list(coords)
        self.n = len(coords)
        self.g = sp.Matrix(g)
        self.ginv = sp.simplify(self.g.inv())

    @lru_cache(maxsize=None)
    def gamma(self, m, i, j):
        n, g, gi, x = self.n, self.g, self.ginv, self.x
        return sp.together(
            sum(gi[m, k] * (sp.diff(g[k, i], x[j]) + sp.diff(g[k, j], x[i]) - sp.diff(g[i, j], x[k])) for k in range(n)) / 2
        )

    def riemann_up(self, m, k, i, j):
        """R^m_{kij} = d_i Gamma^m_{jk} - d_j Gamma^m_{ik} + Gamma Gamma terms."""
        G, x, n = self.gamma, self.x, self.n
        return (
            sp.diff(G(m, j, k), x[i])
            - sp.diff(G(m, i, k), x[j])
            + sum(G(m, i, p) * G(p, j, k) - G(m, j, p) * G(p, i, k) for p in range(n))
        )

    @lru_cache(maxsize=None)
    def R(self):
        n = self.n
        up = {(m, l, i, j): self.riemann_up(m, l, i, j) for m, l, i, j in product(range(n), repeat=4)}
        return {
            (i, j, k, l): sp.simplify(sum(self.g[k, m] * up[m, l, i, j] for m in range(n)))
            for i, j, k, l in product(range(n), repeat=4)
        }

    @lru_cache(maxsize=None)
    def S(self):
        R, gi, n = self.R(), self.ginv, self.n
        return {(j, k): sp.simplify(sum(gi[i, l] * R[i, j, k, l] for i in range(n) for l in range(n)))
                for j, k in product(range(n), repeat=2)}

    @lru_cache(maxsize=None)
    def kappa(self):
        S, gi, n = self.S(), self.ginv, self.n
        return sp.simplify(sum(gi[j, k] * S[j, k] for j in range(n) for k in range(n)))

    @lru_cache(maxsize=None)
    def C(self):
        R, S, g, n, k = self.R(), self.S(), self.g, self.n, self.kappa()
        out = {}
        for i, j, a, l in product(range(n), repeat=4):
            out[i, j, a, l] = sp.simplify(
                R[i, j, a, l]
                - (g[i, l] * S[j, a] + g[j, a] * S[i, l] - g[i, a] * S[j, l] - g[j, l] * S[i, a]) / (n - 2)
                + k * (g[i, l] * g[j, a] - g[i, a] * g[j, l]) / ((n - 1) * (n - 2))
            )
        return out

    def nabla(self, T: dict, valence: int) -> dict:
        """Covariant derivative with the derivative index appended last."""
        G, x, n = self.gamma, self.x, self.n
        out = {}
        for idx in product(range(n), repeat=valence):
            for c in range(n):
                v = sp.diff(T[idx], x[c])
                for s in range(valence):
                    v -= sum(G(p, c, idx[s]) * T[idx[:s] + (p,) + idx[s + 1:]] for p in range(n))
                out[idx + (c,)] = sp.simplify(v)
        return out

    def dot(self, D: dict, H: dict, valence: int) -> dict:
        """(D.H)_{i1..ik j l} = -sum_s g^{pq} D_{j l i_s q} H_{..p..}."""
        n, gi = self.n, self.ginv
        Dup = {(j, l, i, p): sum(D[j, l, i, q] * gi[p, q] for q in range(n)) for j, l, i, p in product(range(n), repeat=4)}
        out = {}
        for idx in product(range(n), repeat=valence):
            for j, l in product(range(n), repeat=2):
                v = 0
                for s in range(valence):
                    v -= sum(Dup[j, l, idx[s], p] * H[idx[:s] + (p,) + idx[s + 1:]] for p in range(n))
                out[idx + (j, l)] = sp.simplify(v)
        return out

    def q(self, A, H: dict, valence: int) -> dict:
        """Q(A,H)_{i1..ik j l} = sum_s A_{j i_s} H_{..l..} - A_{l i_s} H_{..j..}."""
        n = self.n
        out = {}
        for idx in product(range(n), repeat=valence):
            for j, l in product(range(n), repeat=2):
                v = 0
                for s in range(valence):
                    v += A[j, idx[s]] * H[idx[:s] + (l,) + idx[s + 1:]] - A[l, idx[s]] * H[idx[:s] + (j,) + idx[s + 1:]]
                out[idx + (j, l)] = sp.simplify(v)
        return out

    def metric_dict(self):
        return {(i, j): self.g[i, j] for i, j in product(range(self.n), repeat=2)}


def ratio(T1: dict, T2: dict):
    """The scalar L with T1 = L T2, or None if no such scalar exists."""
    L = None
    for k, v in T2.items():
        if sp.simplify(v) != 0:
            L = sp.simplify(T1[k] / v)
            break
    if L is None:
        return None
    if all(sp.simplify(T1[k] - L * T2[k]) == 0 for k in T1):
        return L
    return None


def robinson_trautman():
    t, r, x3, x4, a, b, q = sp.symbols("t r x3 x4 a b q")
    f = sp.Function("f")(x3, x4)
    g = sp.diag(-2 * (a - 2 * b * r - q / r), 0, -(r**2) / f**2, -(r**2) / f**2)
    g[0, 1] = g[1, 0] = 1
    return SympyGeometry((t, r, x3, x4), g), dict(a=a, b=b, q=q, r=r, f=f, x3=x3, x4=x4)


def som_raychaudhuri():
    t, r, z, phi, a = sp.symbols("t r z phi a")
    g = sp.zeros(4)
    g[0, 0] = 1
    g[1, 1] = g[2, 2] = -1
    g[3, 3] = -(r**2 - a**2 * r**4)
    g[0, 3] = g[3, 0] = a * r**2
    return SympyGeometry((t, r, z, phi), g), dict(a=a, r=r)
