"""Sparse multivariate polynomials and rational functions over exact rationals.

A polynomial is a finite map from monomials to nonzero `Fraction` coefficients.
A monomial is a tuple of ``(variable_id, exponent)`` pairs, sorted by variable
id, with every exponent positive; the empty tuple is the constant monomial.
The variable table is fixed globally (see `VARIABLES`), which keeps monomial
keys comparable across every object in the package without table-merging
bookkeeping.

Rational functions are unreduced pairs numerator/denominator.  No gcd or
factorization is ever computed: equality is decided by cross-multiplication,
and substitution clears binding denominators in a single common-denominator
pass so that composed maps stay in the expected normalized shape.

Everything here is immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import re
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Union

#: Exact rational scalar type used throughout the package.
BigRational = Fraction

#: Fixed global variable order; grlex comparisons read exponents in this order.
VARIABLES: tuple[str, ...] = ("x", "y", "u", "A", "t", "k", "x0", "y0", "w", "v")

_VAR_ID: dict[str, int] = {name: i for i, name in enumerate(VARIABLES)}

Monomial = tuple[tuple[int, int], ...]

CONSTANT_MONOMIAL: Monomial = ()

_ZERO = Fraction(0)
_ONE = Fraction(1)

Scalar = Union[int, Fraction]


def var_id(name: str) -> int:
    """Index of a variable in the global table; unknown names are rejected."""
    try:
        return _VAR_ID[name]
    except KeyError:
        raise ValueError(f"unknown variable: {name!r}") from None


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    """Product of two monomials (exponent-wise sum, merge of sorted pairs)."""
    if not a:
        return b
    if not b:
        return a
    out: list[tuple[int, int]] = []
    i = j = 0
    while i < len(a) and j < len(b):
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def grlex_key(m: Monomial) -> tuple[int, tuple[int, ...]]:
    """Graded-lexicographic sort key: total degree, then the dense exponent
    vector read in the global variable order."""
    vec = [0] * len(VARIABLES)
    for vid, e in m:
        vec[vid] = e
    return (mono_degree(m), tuple(vec))


def mono_text(m: Monomial) -> str:
    """Canonical text of a monomial, e.g. ``A*k^2``; the constant is ``1``.

    Factors are listed alphabetically by variable name (display convention
    only; ordering comparisons always use `grlex_key`).
    """
    if not m:
        return "1"
    parts = []
    for vid, e in sorted(m, key=lambda pair: VARIABLES[pair[0]]):
        name = VARIABLES[vid]
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


class Poly:
    """Immutable sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Scalar] | Iterable[tuple[Monomial, Scalar]] | None = None):
        data: dict[Monomial, Fraction] = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for mono, coeff in items:
                c = Fraction(coeff)
                if c:
                    prev = data.get(mono)
                    if prev is None:
                        data[mono] = c
                    else:
                        s = prev + c
                        if s:
                            data[mono] = s
                        else:
                            del data[mono]
        self._terms = data

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    @classmethod
    def const(cls, value: Scalar) -> "Poly":
        return cls({CONSTANT_MONOMIAL: Fraction(value)})

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((var_id(name), 1),): _ONE})

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        """Read-only view of the canonical term map."""
        return MappingProxyType(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def monomial_count(self) -> int:
        return len(self._terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, _ZERO)

    def degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self._terms:
            return -1
        return max(mono_degree(m) for m in self._terms)

    def degree_in(self, name: str) -> int:
        """Largest exponent of one variable (0 when absent)."""
        vid = var_id(name)
        best = 0
        for m in self._terms:
            for v, e in m:
                if v == vid and e > best:
                    best = e
        return best

    def variables(self) -> tuple[str, ...]:
        """Names of the variables that actually occur, in table order."""
        seen = set()
        for m in self._terms:
            for vid, _ in m:
                seen.add(vid)
        return tuple(VARIABLES[i] for i in sorted(seen))

    def min_coefficient(self) -> tuple[Fraction, Monomial]:
        """Smallest coefficient and its grlex-smallest attaining monomial."""
        if not self._terms:
            raise ValueError("empty polynomial")
        best_c: Fraction | None = None
        for c in self._terms.values():
            if best_c is None or c < best_c:
                best_c = c
        attaining = [m for m, c in self._terms.items() if c == best_c]
        attaining.sort(key=grlex_key)
        assert best_c is not None
        return best_c, attaining[0]

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Poly | Scalar") -> "Poly":
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, _ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        p = Poly.__new__(Poly)
        p._terms = out
        return p

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        p = Poly.__new__(Poly)
        p._terms = {m: -c for m, c in self._terms.items()}
        return p

    def __sub__(self, other: "Poly | Scalar") -> "Poly":
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: "Poly | Scalar") -> "Poly":
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: "Poly | Scalar") -> "Poly":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return Poly.zero()
            p = Poly.__new__(Poly)
            p._terms = {m: c * v for m, v in self._terms.items()}
            return p
        if not isinstance(other, Poly):
            return NotImplemented
        out: dict[Monomial, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = mono_mul(ma, mb)
                s = out.get(m, _ZERO) + ca * cb
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        p = Poly.__new__(Poly)
        p._terms = out
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial exponents must be nonnegative integers")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison / hashing ----------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # -- evaluation / serialization -----------------------------------------

    def evaluate(self, point: Mapping[str, object]):
        """Evaluate at a point mapping variable names to numbers.

        Exact when the point is exact (Fraction/int); float points give float
        results.  Missing variables raise KeyError.
        """
        powers: dict[int, list] = {}
        total = _ZERO
        for m, c in self._terms.items():
            v = c
            for vid, e in m:
                cache = powers.get(vid)
                if cache is None:
                    cache = [1, point[VARIABLES[vid]]]
                    powers[vid] = cache
                while len(cache) <= e:
                    cache.append(cache[-1] * cache[1])
                v = v * cache[e]
            total = total + v
        return total

    def to_text(self) -> str:
        """Canonical serialization: grlex term order, explicit signs."""
        if not self._terms:
            return "0"
        items = sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]))
        pieces: list[str] = []
        for i, (m, c) in enumerate(items):
            mag = -c if c < 0 else c
            if not m:
                body = str(mag)
            elif mag == 1:
                body = mono_text(m)
            else:
                body = f"{mag}*{mono_text(m)}"
            if i == 0:
                pieces.append(f"-{body}" if c < 0 else body)
            else:
                pieces.append(f" - {body}" if c < 0 else f" + {body}")
        return "".join(pieces)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Poly({self.to_text()!r})"


def _as_poly(value) -> "Poly":
    if isinstance(value, Poly):
        return value
    if isinstance(value, (int, Fraction)):
        return Poly.const(value)
    return NotImplemented


class RationalFn:
    """Unreduced quotient of two polynomials; denominator never identically 0.

    Equality is mathematical (cross-multiplied), so instances are unhashable.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly | Scalar, den: Poly | Scalar | None = None):
        n = _as_poly(num)
        d = Poly.const(1) if den is None else _as_poly(den)
        if n is NotImplemented or d is NotImplemented:
            raise TypeError("numerator and denominator must be Poly or exact scalars")
        if d.is_zero:
            raise ZeroDivisionError("denominator vanishes identically")
        self.num = n
        self.den = d

    @classmethod
    def from_poly(cls, p: Poly) -> "RationalFn":
        return cls(p)

    @classmethod
    def const(cls, value: Scalar) -> "RationalFn":
        return cls(Poly.const(value))

    @classmethod
    def var(cls, name: str) -> "RationalFn":
        return cls(Poly.var(name))

    @property
    def is_polynomial(self) -> bool:
        return self.den == Poly.const(1)

    def __add__(self, other: "RationalFn | Poly | Scalar") -> "RationalFn":
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFn(self.num * other.den + other.num * self.den,
                          self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den)

    def __sub__(self, other: "RationalFn | Poly | Scalar") -> "RationalFn":
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFn(self.num * other.den - other.num * self.den,
                          self.den * other.den)

    def __rsub__(self, other: "RationalFn | Poly | Scalar") -> "RationalFn":
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other: "RationalFn | Poly | Scalar") -> "RationalFn":
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RationalFn | Poly | Scalar") -> "RationalFn":
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFn(self.num * other.den, self.den * other.num)

    def __eq__(self, other: object) -> bool:
        rhs = _as_rf(other)
        if rhs is NotImplemented:
            return NotImplemented
        return (self.num * rhs.den - rhs.num * self.den).is_zero

    __hash__ = None  # type: ignore[assignment]

    def evaluate(self, point: Mapping[str, object]):
        den_value = self.den.evaluate(point)
        if den_value == 0:
            raise ZeroDivisionError("denominator zero at evaluation point")
        return self.num.evaluate(point) / den_value

    def to_text(self) -> str:
        if self.is_polynomial:
            return self.num.to_text()
        return f"({self.num.to_text()})/({self.den.to_text()})"

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"RationalFn({self.to_text()!r})"


def _as_rf(value) -> "RationalFn":
    if isinstance(value, RationalFn):
        return value
    if isinstance(value, Poly):
        return RationalFn(value)
    if isinstance(value, (int, Fraction)):
        return RationalFn(Poly.const(value))
    return NotImplemented


# -- operations over the engine ---------------------------------------------


def monomial_count(p: Poly) -> int:
    return p.monomial_count()


def min_coefficient(p: Poly) -> tuple[Fraction, Monomial]:
    return p.min_coefficient()


def rf_equal(a: RationalFn, b: RationalFn) -> bool:
    """Cross-multiplied equality: a/b == c/d iff a*d - c*b == 0."""
    return (a.num * b.den - b.num * a.den).is_zero


def _powers(p: Poly, n: int) -> list[Poly]:
    out = [Poly.const(1)]
    for _ in range(n):
        out.append(out[-1] * p)
    return out


def substitute(target: RationalFn | Poly,
               bindings: Mapping[str, RationalFn | Poly | Scalar]) -> RationalFn:
    """Simultaneously substitute rational functions for variables.

    Binding denominators are cleared once, with a per-variable power equal to
    the larger of the variable's degrees in the target's numerator and
    denominator; the shared clearing factor then cancels between the two, so
    composing maps does not pile up redundant denominator factors.  Bound
    variables absent from the target are ignored; unbound variables pass
    through.  Raises ZeroDivisionError when the substituted denominator is
    identically zero.
    """
    rf = _as_rf(target)
    if rf is NotImplemented:
        raise TypeError("substitution target must be a Poly or RationalFn")
    images: dict[int, RationalFn] = {}
    for name, image in bindings.items():
        coerced = _as_rf(image)
        if coerced is NotImplemented:
            raise TypeError(f"binding for {name!r} must be a Poly, RationalFn or exact scalar")
        images[var_id(name)] = coerced
    emax = {vid: 0 for vid in images}
    for poly in (rf.num, rf.den):
        for mono in poly._terms:
            for vid, e in mono:
                if vid in emax and e > emax[vid]:
                    emax[vid] = e
    images = {vid: img for vid, img in images.items() if emax[vid] > 0}
    if not images:
        return rf
    num_pows = {vid: _powers(img.num, emax[vid]) for vid, img in images.items()}
    den_pows = {vid: _powers(img.den, emax[vid]) for vid, img in images.items()}

    def image_of(poly: Poly) -> Poly:
        out: dict[Monomial, Fraction] = {}
        for mono, coeff in poly._terms.items():
            kept = tuple((vid, e) for vid, e in mono if vid not in images)
            exps = {vid: e for vid, e in mono if vid in images}
            piece = Poly({kept: coeff})
            for vid in images:
                e = exps.get(vid, 0)
                if e:
                    piece = piece * num_pows[vid][e]
                r = emax[vid] - e
                if r:
                    piece = piece * den_pows[vid][r]
            for m, c in piece._terms.items():
                s = out.get(m, _ZERO) + c
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        p = Poly.__new__(Poly)
        p._terms = out
        return p

    num = image_of(rf.num)
    den = image_of(rf.den)
    if den.is_zero:
        raise ZeroDivisionError("denominator vanishes identically")
    return RationalFn(num, den)


# -- parsing ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<rat>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ValueError(f"cannot tokenize polynomial text near {rest[:20]!r}")
        if m.lastgroup == "rat":
            tokens.append(("rat", m.group("rat")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    return tokens


def parse_poly(text: str) -> Poly:
    """Parse polynomial text: identifiers, ``^`` powers, optional ``*``
    (juxtaposition), parentheses, integer and ``a/b`` rational literals."""
    tokens = _tokenize(text)
    pos = 0

    def peek() -> tuple[str, str] | None:
        return tokens[pos] if pos < len(tokens) else None

    def take() -> tuple[str, str]:
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_atom() -> Poly:
        tok = peek()
        if tok is None:
            raise ValueError("unexpected end of polynomial text")
        kind, value = take()
        if kind == "rat":
            return Poly.const(Fraction(value))
        if kind == "name":
            return Poly.var(value)
        if value == "(":
            inner = parse_expr()
            closing = peek()
            if closing is None or closing[1] != ")":
                raise ValueError("unbalanced parenthesis in polynomial text")
            take()
            return inner
        raise ValueError(f"unexpected token {value!r} in polynomial text")

    def parse_factor() -> Poly:
        base = parse_atom()
        tok = peek()
        if tok is not None and tok == ("op", "^"):
            take()
            exp_tok = peek()
            if exp_tok is None or exp_tok[0] != "rat" or "/" in exp_tok[1]:
                raise ValueError("exponent must be a nonnegative integer")
            take()
            base = base ** int(exp_tok[1])
        return base

    def parse_term() -> Poly:
        result = parse_factor()
        while True:
            tok = peek()
            if tok is None:
                break
            kind, value = tok
            if tok == ("op", "*"):
                take()
                result = result * parse_factor()
            elif kind in ("rat", "name") or value == "(":
                result = result * parse_factor()
            else:
                break
        return result

    def parse_expr() -> Poly:
        tok = peek()
        sign = 1
        if tok is not None and tok[0] == "op" and tok[1] in "+-":
            take()
            if tok[1] == "-":
                sign = -1
        total = parse_term() * sign
        while True:
            tok = peek()
            if tok is None or tok[0] != "op" or tok[1] not in "+-":
                break
            take()
            term = parse_term()
            total = total + (term if tok[1] == "+" else -term)
        return total

    result = parse_expr()
    if pos != len(tokens):
        raise ValueError(f"trailing tokens in polynomial text: {tokens[pos:]}")
    return result
