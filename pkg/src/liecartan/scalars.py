"""Scalar coefficient functions with truncated-Taylor (jet) evaluation.

A jet holds the Taylor data of a function at a base point, up to order 3,
as a sparse dict mapping exponent tuples to Taylor coefficients.  All
arithmetic is exact when the coefficients are Fractions; the same code
runs on floats for the non-exact backend.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

MAX_ORDER = 3

Exponent = Tuple[int, ...]


class JetOrderError(ValueError):
    """Requested jet order outside the supported [0, 3] range."""


class MalformedFieldError(ValueError):
    """Invalid polynomial data (negative exponents, bad dimension)."""


def _zero_exp(n: int) -> Exponent:
    return (0,) * n


def _exp_add(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


class Jet:
    """Truncated Taylor expansion at a point: f(p+h) = sum_e terms[e] * h^e.

    ``terms`` maps exponent tuples (len n, total degree <= order) to Taylor
    coefficients.  Derivative values carry the factorial weights, see
    :meth:`deriv`.
    """

    __slots__ = ("n", "order", "base", "terms")

    def __init__(self, n: int, order: int, base: Sequence, terms: Dict[Exponent, object]):
        self.n = n
        self.order = order
        self.base = tuple(base)
        self.terms = {e: c for e, c in terms.items() if c != 0}

    # -- constructors -------------------------------------------------
    @staticmethod
    def constant(value, n: int, order: int, base: Sequence) -> "Jet":
        return Jet(n, order, base, {_zero_exp(n): value} if value != 0 else {})

    # -- ring operations ----------------------------------------------
    def _check(self, other: "Jet"):
        if self.n != other.n:
            raise ValueError("jet dimension mismatch")

    def __add__(self, other: "Jet") -> "Jet":
        self._check(other)
        order = min(self.order, other.order)
        terms = {e: c for e, c in self.terms.items() if sum(e) <= order}
        for e, c in other.terms.items():
            if sum(e) <= order:
                terms[e] = terms.get(e, 0) + c
        return Jet(self.n, order, self.base, terms)

    def __neg__(self) -> "Jet":
        return Jet(self.n, self.order, self.base, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Jet") -> "Jet":
        return self + (-other)

    def scale(self, c) -> "Jet":
        if c == 0:
            return Jet(self.n, self.order, self.base, {})
        return Jet(self.n, self.order, self.base, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other: "Jet") -> "Jet":
        self._check(other)
        order = min(self.order, other.order)
        terms: Dict[Exponent, object] = {}
        for ea, ca in self.terms.items():
            da = sum(ea)
            if da > order:
                continue
            for eb, cb in other.terms.items():
                if da + sum(eb) > order:
                    continue
                e = _exp_add(ea, eb)
                terms[e] = terms.get(e, 0) + ca * cb
        return Jet(self.n, order, self.base, terms)

    def partial(self, k: int) -> "Jet":
        """Jet of the k-th partial derivative (order drops by one)."""
        if self.order == 0:
            raise JetOrderError("jet order budget exhausted")
        terms: Dict[Exponent, object] = {}
        for e, c in self.terms.items():
            if e[k] == 0:
                continue
            de = list(e)
            de[k] -= 1
            terms[tuple(de)] = c * e[k]
        return Jet(self.n, self.order - 1, self.base, terms)

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        return Jet(self.n, order, self.base,
                   {e: c for e, c in self.terms.items() if sum(e) <= order})

    # -- accessors ----------------------------------------------------
    @property
    def value(self):
        return self.terms.get(_zero_exp(self.n), 0)

    def deriv(self, idx: Sequence[int]):
        """Partial derivative value for derivative directions ``idx``."""
        e = [0] * self.n
        for i in idx:
            e[i] += 1
        w = 1
        for m in e:
            w *= math.factorial(m)
        return self.terms.get(tuple(e), 0) * w

    def grad(self) -> list:
        return [self.deriv((i,)) for i in range(self.n)]

    def hessian(self) -> list:
        return [[self.deriv((i, j)) for j in range(self.n)] for i in range(self.n)]

    def third(self) -> list:
        return [[[self.deriv((i, j, k)) for k in range(self.n)]
                 for j in range(self.n)] for i in range(self.n)]

    def max_abs(self):
        return max((abs(c) for c in self.terms.values()), default=0)

    def __repr__(self):
        return f"Jet(n={self.n}, order={self.order}, terms={self.terms})"


class Polynomial:
    """Exact multivariate polynomial; the default ScalarField backend.

    ``terms`` maps exponent tuples to coefficients.  Arithmetic is eager
    (results stay polynomials); jets are computed by Taylor shift.
    """

    __slots__ = ("n", "terms", "_cache")

    def __init__(self, n: int, terms: Dict[Exponent, object]):
        if n < 1:
            raise MalformedFieldError("dimension must be >= 1")
        clean: Dict[Exponent, object] = {}
        for e, c in terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != n:
                raise MalformedFieldError("exponent length does not match dimension")
            if any(x < 0 for x in e):
                raise MalformedFieldError("negative exponent")
            if c != 0:
                clean[e] = clean.get(e, 0) + c
        self.n = n
        self.terms = {e: c for e, c in clean.items() if c != 0}
        self._cache: Dict[tuple, Jet] = {}

    @staticmethod
    def constant(value, n: int) -> "Polynomial":
        return Polynomial(n, {_zero_exp(n): value})

    @staticmethod
    def coordinate(k: int, n: int) -> "Polynomial":
        e = [0] * n
        e[k] = 1
        return Polynomial(n, {tuple(e): 1})

    def __add__(self, other):
        if isinstance(other, Polynomial):
            terms = dict(self.terms)
            for e, c in other.terms.items():
                terms[e] = terms.get(e, 0) + c
            return Polynomial(self.n, terms)
        return NotImplemented

    def __neg__(self):
        return Polynomial(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, Polynomial):
            return self + (-other)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            terms: Dict[Exponent, object] = {}
            for ea, ca in self.terms.items():
                for eb, cb in other.terms.items():
                    e = _exp_add(ea, eb)
                    terms[e] = terms.get(e, 0) + ca * cb
            return Polynomial(self.n, terms)
        return NotImplemented

    def scale(self, c) -> "Polynomial":
        return Polynomial(self.n, {e: c * v for e, v in self.terms.items()})

    def partial_poly(self, k: int) -> "Polynomial":
        terms: Dict[Exponent, object] = {}
        for e, c in self.terms.items():
            if e[k] == 0:
                continue
            de = list(e)
            de[k] -= 1
            terms[tuple(de)] = c * e[k]
        return Polynomial(self.n, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def eval(self, point: Sequence):
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, m in zip(point, e):
                for _ in range(m):
                    v = v * x
            total = total + v
        return total

    def jet(self, point: Sequence, order: int) -> Jet:
        """Taylor data at ``point`` up to ``order`` (exact on rationals)."""
        if order < 0 or order > MAX_ORDER:
            raise JetOrderError(f"jet order {order} outside [0, {MAX_ORDER}]")
        key = (id(point), order)
        hit = self._cache.get(key)
        if hit is not None and hit[0] is point:
            return hit[1]
        n = self.n
        terms: Dict[Exponent, object] = {}
        for e, c in self.terms.items():
            # expand prod_i (p_i + h_i)^{e_i}, truncated at total degree `order`
            partial = {(): c}
            for i, m in enumerate(e):
                p = point[i]
                nxt: Dict[Exponent, object] = {}
                for pe, pc in partial.items():
                    deg = sum(pe)
                    for j in range(m + 1):
                        if deg + j > order:
                            break
                        w = pc * math.comb(m, j)
                        for _ in range(m - j):
                            w = w * p
                        ne = pe + (j,)
                        nxt[ne] = nxt.get(ne, 0) + w
                partial = nxt
            for pe, pc in partial.items():
                full = pe + (0,) * (n - len(pe))
                terms[full] = terms.get(full, 0) + pc
        jet = Jet(n, order, point, terms)
        self._cache[key] = (point, jet)
        return jet

    def substitute(self, replacements: Dict[int, "Polynomial"]) -> "Polynomial":
        """Composition: substitute coordinate k by a polynomial (same arity)."""
        out = Polynomial.constant(0, self.n)
        for e, c in self.terms.items():
            term = Polynomial.constant(c, self.n)
            for i, m in enumerate(e):
                base = replacements.get(i, Polynomial.coordinate(i, self.n))
                for _ in range(m):
                    term = term * base
            out = out + term
        return out

    def __repr__(self):
        return f"Polynomial(n={self.n}, terms={self.terms})"


def poly_field(dim: int, monomials: Iterable[Tuple[Sequence[int], object]]) -> Polynomial:
    """Exact polynomial field from (exponent, coefficient) pairs.

    Duplicate monomials are summed; negative exponents are rejected.
    """
    terms: Dict[Exponent, object] = {}
    for exp, coeff in monomials:
        e = tuple(int(x) for x in exp)
        if len(e) != dim:
            raise MalformedFieldError("exponent length does not match dimension")
        if any(x < 0 for x in e):
            raise MalformedFieldError("negative exponent")
        terms[e] = terms.get(e, 0) + coeff
    return Polynomial(dim, terms)


def jet_at(field, point: Sequence, order: int) -> Jet:
    """Taylor data of a field at a point; orders above 3 are rejected."""
    if order < 0 or order > MAX_ORDER:
        raise JetOrderError(f"jet order {order} outside [0, {MAX_ORDER}]")
    return field.jet(tuple(point), order)


def finite_difference_check(field, point: Sequence, h: float = 1e-4) -> float:
    """Max relative deviation between jet partials and central differences.

    Only first and second derivatives are compared; the divided-difference
    noise floor at third order makes that comparison meaningless.  Used by
    tests as an independent oracle for the jet evaluator.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    p = tuple(float(x) for x in point)
    n = len(p)
    jet = field.jet(p, min(2, MAX_ORDER))

    def at(q):
        return float(field.jet(tuple(q), 0).value)

    worst = 0.0

    def rel(a, b):
        scale = max(abs(a), abs(b), 1.0)
        return abs(a - b) / scale

    for i in range(n):
        up = list(p)
        dn = list(p)
        up[i] += h
        dn[i] -= h
        fd = (at(up) - at(dn)) / (2 * h)
        worst = max(worst, rel(fd, float(jet.deriv((i,)))))
    for i in range(n):
        for j in range(i, n):
            pp = list(p)
            pm = list(p)
            mp = list(p)
            mm = list(p)
            pp[i] += h; pp[j] += h
            pm[i] += h; pm[j] -= h
            mp[i] -= h; mp[j] += h
            mm[i] -= h; mm[j] -= h
            fd = (at(pp) - at(pm) - at(mp) + at(mm)) / (4 * h * h)
            worst = max(worst, rel(fd, float(jet.deriv((i, j)))))
    return worst


def rational(a, b=1) -> Fraction:
    return Fraction(a, b)
