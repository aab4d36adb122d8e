"""Sparse multivariate integer polynomials with packed monomials.

A monomial is a single Python int: variable ``v`` owns bits
``[8*v, 8*v + 8)`` and the top bit of every field is a guard bit, so
exponents are limited to 127.  Multiplying monomials is integer addition,
and comparing them as ints is a lex order (highest variable id most
significant), which is what exact division relies on.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import reduce
from math import gcd
from operator import or_

BITS = 8
FIELD = (1 << BITS) - 1
MAX_EXP = (1 << (BITS - 1)) - 1
MAX_VARS = 2048
GUARD = sum(1 << (BITS * i + BITS - 1) for i in range(MAX_VARS))


class ExponentOverflow(ArithmeticError):
    pass


class VarRegistry:
    """Process-wide interning of (namespace, name) pairs to variable ids."""

    def __init__(self):
        self._ids: dict[tuple[str, str], int] = {}
        self.names: list[str] = []
        self._lock = threading.Lock()

    def intern(self, name: str, namespace: str = "") -> int:
        key = (namespace, name)
        vid = self._ids.get(key)
        if vid is not None:
            return vid
        with self._lock:
            vid = self._ids.get(key)
            if vid is None:
                vid = len(self.names)
                if vid >= MAX_VARS:
                    raise RuntimeError("variable registry exhausted")
                self.names.append(name)
                self._ids[key] = vid
        return vid

    def name(self, vid: int) -> str:
        return self.names[vid]


REGISTRY = VarRegistry()


def decode(mono: int) -> tuple[tuple[int, int], ...]:
    out = []
    vid = 0
    while mono:
        e = mono & FIELD
        if e:
            out.append((vid, e))
        mono >>= BITS
        vid += 1
    return tuple(out)


def encode(pairs) -> int:
    mono = 0
    for vid, e in pairs:
        if e < 0 or e > MAX_EXP:
            raise ExponentOverflow(f"exponent {e} out of range")
        mono += e << (BITS * vid)
    return mono


def mono_divides(a: int, b: int) -> bool:
    """True iff monomial ``a`` divides monomial ``b``."""
    d = b - a
    return d >= 0 and not (d & GUARD)


class Poly:
    """Immutable sparse polynomial ``{monomial: int coefficient}``."""

    __slots__ = ("terms", "_hash", "_occ", "_decoded")

    def __init__(self, terms: dict[int, int]):
        self.terms = terms
        self._hash = None
        self._occ = None
        self._decoded = None

    @staticmethod
    def const(c: int) -> "Poly":
        return Poly({0: c}) if c else ZERO_POLY

    @staticmethod
    def var(vid: int, exp: int = 1) -> "Poly":
        return Poly({encode([(vid, exp)]): 1})

    # structure -------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def const_value(self) -> int:
        return self.terms.get(0, 0)

    def occupancy(self) -> int:
        """Bitwise OR of all monomials; field ``v`` is nonzero iff ``v`` occurs."""
        if self._occ is None:
            self._occ = reduce(or_, self.terms, 0)
        return self._occ

    def has_var(self, vid: int) -> bool:
        return bool((self.occupancy() >> (BITS * vid)) & FIELD)

    def variables(self) -> tuple[int, ...]:
        return tuple(v for v, _ in decode(self.occupancy()))

    def decoded(self):
        if self._decoded is None:
            self._decoded = [(c, decode(m)) for m, c in self.terms.items()]
        return self._decoded

    def lead(self) -> int:
        return max(self.terms)

    def content(self) -> int:
        return gcd(*self.terms.values()) if self.terms else 0

    def min_exponent(self, vid: int) -> int:
        sh = BITS * vid
        return min((m >> sh) & FIELD for m in self.terms)

    def degree(self, vid: int) -> int:
        sh = BITS * vid
        return max((m >> sh) & FIELD for m in self.terms)

    # arithmetic ------------------------------------------------------
    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __add__(self, other: "Poly") -> "Poly":
        if len(self.terms) < len(other.terms):
            self, other = other, self
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                del out[m]
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) - c
            if v:
                out[m] = v
            else:
                del out[m]
        return Poly(out)

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self.terms, other.terms
        if not a or not b:
            return ZERO_POLY
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            ((mb, cb),) = b.items()
            if mb == 0:
                return Poly({m: c * cb for m, c in a.items()})
            out = {m + mb: c * cb for m, c in a.items()}
            if any(m & GUARD for m in out):
                raise ExponentOverflow("exponent exceeds 127")
            return Poly(out)
        out: dict[int, int] = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                k = ma + mb
                out[k] = get(k, 0) + ca * cb
        out = {m: c for m, c in out.items() if c}
        if any(m & GUARD for m in out):
            raise ExponentOverflow("exponent exceeds 127")
        return Poly(out)

    def scale(self, c: int) -> "Poly":
        if c == 1:
            return self
        if c == 0:
            return ZERO_POLY
        return Poly({m: v * c for m, v in self.terms.items()})

    def exact_div_int(self, c: int) -> "Poly":
        if c == 1:
            return self
        return Poly({m: v // c for m, v in self.terms.items()})

    def shift_down(self, mono: int) -> "Poly":
        """Divide by a monomial known to divide every term."""
        return Poly({m - mono: c for m, c in self.terms.items()})

    def __pow__(self, k: int) -> "Poly":
        result = ONE_POLY
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def divexact(self, d: "Poly") -> "Poly | None":
        """Quotient if ``d`` divides ``self`` exactly over the integers, else None."""
        if not d.terms:
            raise ZeroDivisionError("division by zero polynomial")
        if not self.terms:
            return ZERO_POLY
        if len(d.terms) == 1:
            ((md, cd),) = d.terms.items()
            out = {}
            for m, c in self.terms.items():
                q, r = divmod(c, cd)
                diff = m - md
                if r or diff < 0 or diff & GUARD:
                    return None
                out[diff] = q
            return Poly(out)
        rem = dict(self.terms)
        dlead = max(d.terms)
        dlc = d.terms[dlead]
        dterms = list(d.terms.items())
        quot: dict[int, int] = {}
        while rem:
            lt = max(rem)
            diff = lt - dlead
            if diff < 0 or diff & GUARD:
                return None
            c, r = divmod(rem[lt], dlc)
            if r:
                return None
            quot[diff] = c
            for m, v in dterms:
                k = m + diff
                nv = rem.get(k, 0) - c * v
                if nv:
                    rem[k] = nv
                else:
                    rem.pop(k, None)
        return Poly(quot)

    def deriv(self, vid: int) -> "Poly":
        sh = BITS * vid
        if not (self.occupancy() >> sh) & FIELD:
            return ZERO_POLY
        unit = 1 << sh
        out: dict[int, int] = {}
        for m, c in self.terms.items():
            e = (m >> sh) & FIELD
            if e:
                k = m - unit
                out[k] = out.get(k, 0) + c * e
        return Poly({m: c for m, c in out.items() if c})

    def evaluate(self, values: dict[int, Fraction]) -> Fraction:
        total = Fraction(0)
        for c, pairs in self.decoded():
            t = Fraction(c)
            for vid, e in pairs:
                t *= values[vid] ** e
            total += t
        return total

    def sqrt(self) -> "Poly | None":
        """Exact square root with positive leading coefficient, or None."""
        if not self.terms:
            return ZERO_POLY
        lt = max(self.terms)
        lc = self.terms[lt]
        if lc < 0 or any(e % 2 for _, e in decode(lt)):
            return None
        rc = _isqrt_exact(lc)
        if rc is None:
            return None
        root = {encode((v, e // 2) for v, e in decode(lt)): rc}
        root_lead = next(iter(root))
        two_lc = 2 * rc
        rem = self - Poly(root) * Poly(root)
        budget = 4 * len(self.terms) + 8
        while rem.terms and budget:
            budget -= 1
            m = max(rem.terms)
            diff = m - root_lead
            if diff < 0 or diff & GUARD:
                return None
            c, r = divmod(rem.terms[m], two_lc)
            if r:
                return None
            t = Poly({diff: c})
            rem = rem - (Poly(root).scale(2) + t) * t
            root[diff] = root.get(diff, 0) + c
        if rem.terms:
            return None
        return Poly({m: c for m, c in root.items() if c})


def _isqrt_exact(n: int) -> int | None:
    from math import isqrt

    if n < 0:
        return None
    s = isqrt(n)
    return s if s * s == n else None


ZERO_POLY = Poly({})
ONE_POLY = Poly({0: 1})
