"""The curvature operator D.H and the Tachibana operator Q(A, H).

The two new slots (j, l) are appended after the k slots of H:

    (D.H)_{i1..ik j l} = -g^{pq} [D_{j l i1 q} H_{p i2..ik} + ... + D_{j l ik q} H_{i1..p}]
    Q(A,H)_{i1..ik j l} = A_{j i1} H_{l i2..ik} + ... - A_{l i1} H_{j i2..ik} - ...

Q is the derivation induced by the endomorphism
``(X wedge_A Y) Z = A(Y, Z) X - A(X, Z) Y``, i.e.
``Q(A,H)(X1..Xk, X, Y) = A(X, X1) H(Y, X2..) + ... - A(Y, X1) H(X, X2..) - ...``.
"""

from __future__ import annotations

from .expr import expr_sum
from .tensor import ComponentTensor, SymmetryError, check_symmetry


def _raise_last(D: ComponentTensor, ginv: ComponentTensor):
    """D_{j l i}^p = D_{j l i q} g^{pq}, grouped by p, only j < l kept."""
    acc: dict[tuple, list] = {}
    n = D.dim
    for (j, l, i, q), v in D.items():
        if j >= l:
            continue
        for p in range(n):
            gv = ginv[p, q]
            if gv:
                acc.setdefault((p, j, l, i), []).append(gv * v)
    by_p: dict[int, list] = {}
    for (p, j, l, i), vs in acc.items():
        s = expr_sum(vs)
        if s:
            by_p.setdefault(p, []).append((j, l, i, s))
    return by_p


def dot(D: ComponentTensor, H: ComponentTensor, ginv: ComponentTensor) -> ComponentTensor:
    """D.H for a (0,4) tensor D antisymmetric in its first two slots."""
    if D.valence != 4:
        raise ValueError("D must be a (0,4) tensor")
    if H.valence < 1:
        raise ValueError("H must have valence >= 1")
    if D.dim != H.dim:
        raise ValueError("dimension mismatch")
    for (j, l, i, q), v in D.items():
        if D[l, j, i, q] + v:
            raise SymmetryError("D is not antisymmetric in slots 1,2", (j, l, i, q))
    by_p = _raise_last(D, ginv)
    k = H.valence
    acc: dict[tuple, list] = {}
    for idx, hv in H.items():
        for s in range(k):
            for j, l, i, dv in by_p.get(idx[s], ()):
                out = idx[:s] + (i,) + idx[s + 1 :] + (j, l)
                acc.setdefault(out, []).append(dv * hv)
    comps = {}
    for key, vs in acc.items():
        val = -expr_sum(vs)
        if val:
            comps[key] = val
            comps[key[:-2] + (key[-1], key[-2])] = -val
    name = f"{D.name}.{H.name}" if D.name and H.name else ""
    return ComponentTensor(H.dim, k + 2, comps, name=name, validate=False)


def q(A: ComponentTensor, H: ComponentTensor) -> ComponentTensor:
    """Tachibana tensor Q(A, H) for a symmetric (0,2) tensor A."""
    if A.valence != 2:
        raise ValueError("A must be a (0,2) tensor")
    check_symmetry(A, "symmetric-pair")
    if A.dim != H.dim:
        raise ValueError("dimension mismatch")
    n, k = H.dim, H.valence
    rows: dict[int, list] = {}
    for (x, y), v in A.items():
        rows.setdefault(x, []).append((y, v))
    acc: dict[tuple, list] = {}
    for idx, hv in H.items():
        for s in range(k):
            m = idx[s]
            # A_{j i_s} H_{.. l=m ..} lands on (.., i_s=i, .., j, l=m)
            for j in range(n):
                if j == m:
                    continue
                for i, av in rows.get(j, ()):
                    out = idx[:s] + (i,) + idx[s + 1 :] + (j, m)
                    acc.setdefault(out, []).append(av * hv)
    comps = {}
    for key, vs in acc.items():
        val = expr_sum(vs)
        if val:
            comps[key] = val
    # the "- A_{l i_s} H_{..j..}" half is the (j,l)-swap of the first half
    full = dict(comps)
    for key, val in comps.items():
        sw = key[:-2] + (key[-1], key[-2])
        full[sw] = full[sw] - val if sw in full else -val
    full = {k_: v for k_, v in full.items() if v}
    name = f"Q({A.name},{H.name})" if A.name and H.name else ""
    return ComponentTensor(n, k + 2, full, name=name, validate=False)
