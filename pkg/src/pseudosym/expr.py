"""Exact rational functions over Q.

An :class:`Expr` is ``num / (dc * prod(atom**mult))`` where ``num`` is an
integer polynomial, ``dc`` a positive integer and each atom a primitive
polynomial with positive leading coefficient.  Denominators are kept in this
factored form, so sums use an LCM over atoms and no multivariate GCD is ever
needed.  After every operation the numerator is trial-divided by the
denominator atoms, which keeps the usual denominators (powers of coordinates,
metric functions, solver pivots) reduced.

The representation is not guaranteed canonical (a composite atom may share a
factor with the numerator), so equality is decided by expanding the
cross-multiplied difference: ``a == b`` iff the numerator of ``a - b`` is the
zero polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from .poly import BITS, FIELD, ONE_POLY, REGISTRY, ZERO_POLY, Poly, decode, encode


class EvaluationError(ZeroDivisionError):
    """The denominator vanishes at the requested point."""


def _is_var_atom(atom: Poly) -> int:
    """Return var id if ``atom`` is a bare variable, else -1."""
    if len(atom.terms) == 1:
        ((m, c),) = atom.terms.items()
        if c == 1:
            pairs = decode(m)
            if len(pairs) == 1 and pairs[0][1] == 1:
                return pairs[0][0]
    return -1


@lru_cache(maxsize=8192)
def _atom_info(atom: Poly) -> int:
    return _is_var_atom(atom)


@lru_cache(maxsize=8192)
def _atom_pow(atom: Poly, k: int) -> Poly:
    return atom**k


def _cancel(num: Poly, den: dict[Poly, int], dc: int):
    """Trial-divide ``num`` by every denominator atom; reduce integer content."""
    if den:
        for atom in list(den):
            mult = den[atom]
            vid = _atom_info(atom)
            if vid >= 0:
                e = min(num.min_exponent(vid), mult)
                if e:
                    num = num.shift_down(e << (BITS * vid))
                    mult -= e
            else:
                while mult:
                    q = num.divexact(atom)
                    if q is None:
                        break
                    num = q
                    mult -= 1
            if mult:
                den[atom] = mult
            else:
                del den[atom]
    if dc != 1:
        g = gcd(num.content(), dc)
        if g != 1:
            num = num.exact_div_int(g)
            dc //= g
    return num, den, dc


def _split_poly(p: Poly, hints=()):
    """Factor a nonzero polynomial into (signed int, {atom: mult}).

    Monomial content becomes variable atoms; the remaining primitive part is
    divided by any ``hints`` atoms that divide it and what is left is a
    single atom.
    """
    c = p.content()
    if c != 1:
        p = p.exact_div_int(c)
    atoms: dict[Poly, int] = {}
    occ_min = None
    for m in p.terms:
        occ_min = m if occ_min is None else _mono_min(occ_min, m)
    if occ_min:
        for vid, e in decode(occ_min):
            atoms[Poly.var(vid)] = e
        p = p.shift_down(occ_min)
    if p.is_const():
        return c * p.const_value(), atoms
    for h in hints:
        if _atom_info(h) >= 0 or len(h.terms) > len(p.terms):
            continue
        while True:
            q = p.divexact(h)
            if q is None:
                break
            atoms[h] = atoms.get(h, 0) + 1
            p = q
            if p.is_const():
                return c * p.const_value(), atoms
    lc = p.terms[max(p.terms)]
    if lc < 0:
        p = -p
        c = -c
    atoms[p] = atoms.get(p, 0) + 1
    return c, atoms


def _mono_min(a: int, b: int) -> int:
    out = 0
    sh = 0
    while a and b:
        ea, eb = a & FIELD, b & FIELD
        out |= min(ea, eb) << sh
        a >>= BITS
        b >>= BITS
        sh += BITS
    return out


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class Expr:
    """Immutable exact rational function."""

    __slots__ = ("num", "den", "dc")

    def __init__(self, num: Poly, den: dict[Poly, int] | None = None, dc: int = 1):
        self.num = num
        self.den = den if den is not None else {}
        self.dc = dc

    # constructors ----------------------------------------------------
    @staticmethod
    def const(value) -> "Expr":
        v = _to_fraction(value)
        if not v:
            return ZERO
        return Expr(Poly.const(v.numerator), {}, v.denominator)

    @staticmethod
    def var(vid: int) -> "Expr":
        return Expr(Poly.var(vid))

    @staticmethod
    def from_poly(p: Poly) -> "Expr":
        return Expr(p) if p.terms else ZERO

    @staticmethod
    def _make(num: Poly, den: dict[Poly, int], dc: int) -> "Expr":
        if not num.terms:
            return ZERO
        num, den, dc = _cancel(num, den, dc)
        return Expr(num, den, dc)

    # predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num.terms

    def __bool__(self):
        return bool(self.num.terms)

    def is_polynomial(self) -> bool:
        return not self.den and self.dc == 1

    def is_constant(self) -> bool:
        return not self.den and self.num.is_const()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("expression is not constant")
        return Fraction(self.num.const_value(), self.dc)

    def variables(self) -> set[int]:
        vs = set(self.num.variables())
        for a in self.den:
            vs.update(a.variables())
        return vs

    def den_poly(self) -> Poly:
        p = Poly.const(self.dc)
        for atom, k in self.den.items():
            p = p * _atom_pow(atom, k)
        return p

    # arithmetic ------------------------------------------------------
    def __neg__(self):
        if not self.num.terms:
            return self
        return Expr(-self.num, self.den, self.dc)

    def __add__(self, other):
        if not isinstance(other, Expr):
            if other == 0:
                return self
            other = Expr.const(other)
        if not other.num.terms:
            return self
        if not self.num.terms:
            return other
        if self.dc == other.dc and self.den == other.den:
            return Expr._make(self.num + other.num, dict(self.den), self.dc)
        return _sum_exprs([self, other])

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Expr):
            other = Expr.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return Expr.const(other) - self

    def __mul__(self, other):
        if not isinstance(other, Expr):
            v = _to_fraction(other)
            if not v or not self.num.terms:
                return ZERO
            if v.denominator == 1 and self.dc == 1:
                return Expr(self.num.scale(v.numerator), self.den, 1)
            other = Expr.const(v)
        if not self.num.terms or not other.num.terms:
            return ZERO
        den = dict(self.den)
        for a, k in other.den.items():
            den[a] = den.get(a, 0) + k
        return Expr._make(self.num * other.num, den, self.dc * other.dc)

    __rmul__ = __mul__

    def inverse(self) -> "Expr":
        if not self.num.terms:
            raise ZeroDivisionError("division by an identically zero expression")
        c, atoms = _split_poly(self.num, tuple(self.den))
        num = self.den_poly()
        if c < 0:
            num = -num
            c = -c
        return Expr._make(num, atoms, c)

    def __truediv__(self, other):
        if not isinstance(other, Expr):
            v = _to_fraction(other)
            if not v:
                raise ZeroDivisionError("division by zero")
            return self * (1 / v)
        if not other.num.terms:
            raise ZeroDivisionError("division by an identically zero expression")
        if not self.num.terms:
            return ZERO
        c, atoms = _split_poly(other.num, tuple(self.den) + tuple(other.den))
        num = self.num * other.den_poly()
        if c < 0:
            num = -num
            c = -c
        den = dict(self.den)
        for a, k in atoms.items():
            den[a] = den.get(a, 0) + k
        return Expr._make(num, den, self.dc * c)

    def __rtruediv__(self, other):
        return Expr.const(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer exponents are supported")
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return ONE
        return Expr(self.num**k, {a: m * k for a, m in self.den.items()}, self.dc**k)

    def __eq__(self, other):
        if not isinstance(other, Expr):
            try:
                other = Expr.const(other)
            except TypeError:
                return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # evaluation ------------------------------------------------------
    def evaluate(self, values: dict[int, Fraction]) -> Fraction:
        """Exact value; ``values`` maps variable id to a rational."""
        d = Fraction(self.dc)
        for atom, k in self.den.items():
            d *= atom.evaluate(values) ** k
        if not d:
            raise EvaluationError("denominator vanishes at this point")
        return self.num.evaluate(values) / d

    def substitute(self, mapping: dict[int, "Expr"]) -> "Expr":
        """Replace variables by expressions."""
        return _subst_poly(self.num, mapping) / (
            _subst_poly(self.den_poly(), mapping)
        )

    # printing --------------------------------------------------------
    def __str__(self):
        return to_string(self)

    def __repr__(self):
        return f"Expr({to_string(self)!r})"


def _subst_poly(p: Poly, mapping: dict[int, Expr]) -> Expr:
    if not any(p.has_var(v) for v in mapping):
        return Expr.from_poly(p)
    terms = []
    for c, pairs in p.decoded():
        t = Expr.const(c)
        rest = []
        for vid, e in pairs:
            if vid in mapping:
                t = t * mapping[vid] ** e
            else:
                rest.append((vid, e))
        if rest:
            t = t * Expr(Poly({encode(rest): 1}))
        terms.append(t)
    return expr_sum(terms)


def _sum_exprs(items: list[Expr]) -> Expr:
    den: dict[Poly, int] = {}
    dc = 1
    for e in items:
        for a, k in e.den.items():
            if den.get(a, 0) < k:
                den[a] = k
        dc = lcm(dc, e.dc)
    num = ZERO_POLY
    for e in items:
        mult = Poly.const(dc // e.dc)
        for a, k in den.items():
            extra = k - e.den.get(a, 0)
            if extra:
                mult = mult * _atom_pow(a, extra)
        num = num + e.num * mult
    return Expr._make(num, den, dc)


def expr_sum(items) -> Expr:
    """Sum with a single common-denominator pass."""
    items = [e if isinstance(e, Expr) else Expr.const(e) for e in items]
    items = [e for e in items if e.num.terms]
    if not items:
        return ZERO
    if len(items) == 1:
        return items[0]
    first = items[0]
    if all(e.dc == first.dc and e.den == first.den for e in items[1:]):
        num = first.num
        for e in items[1:]:
            num = num + e.num
        return Expr._make(num, dict(first.den), first.dc)
    return _sum_exprs(items)


ZERO = Expr(ZERO_POLY)
ONE = Expr(ONE_POLY)


# canonical strings ---------------------------------------------------
def _mono_str(pairs) -> str:
    parts = sorted((REGISTRY.name(v), e) for v, e in pairs)
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in parts)


def _term_key(pairs):
    names = sorted((REGISTRY.name(v), -e) for v, e in pairs)
    return (sum(e for _, e in pairs), names)


def poly_to_string(p: Poly) -> str:
    if not p.terms:
        return "0"
    items = sorted(p.decoded(), key=lambda t: _term_key(t[1]))
    out = []
    for i, (c, pairs) in enumerate(items):
        mono = _mono_str(pairs)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def to_string(e: Expr) -> str:
    """Canonical text: sorted monomials, explicit signs, factored denominator."""
    num = poly_to_string(e.num)
    if not e.den and e.dc == 1:
        return num
    if len(e.num.terms) > 1:
        num = f"({num})"
    factors = []
    if e.dc != 1:
        factors.append(str(e.dc))
    atom_strs = []
    for atom, k in e.den.items():
        s = poly_to_string(atom)
        if len(atom.terms) > 1:
            s = f"({s})"
        atom_strs.append(s if k == 1 else f"{s}^{k}")
    factors.extend(sorted(atom_strs, key=lambda s: (s.startswith("("), s)))
    den = "*".join(factors)
    if len(factors) > 1:
        den = f"({den})"
    return f"{num}/{den}"
