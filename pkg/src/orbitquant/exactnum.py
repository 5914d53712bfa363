"""Exact coefficients: rationals, polynomials in the deformation parameter h,
and rational functions in h used inside the elimination kernel.

Rationals are plain :class:`fractions.Fraction` values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Union

Rational = Fraction
Number = Union[int, Fraction]

#: degree of the zero polynomial
DEG_ZERO = float("-inf")


class ZeroDenominator(ZeroDivisionError):
    pass


class NotPolynomial(ArithmeticError):
    """A rational function in h did not clear to a polynomial."""


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class HPoly:
    """Univariate polynomial in h with rational coefficients.

    Stored densely: ``coeffs[k]`` is the coefficient of ``h**k``, with no
    trailing zeros. Instances are immutable and hashable.
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Number] = ()):
        c = [as_rational(x) for x in coeffs]
        while c and not c[-1]:
            c.pop()
        self.coeffs: tuple = tuple(c)
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: tuple) -> "HPoly":
        # caller guarantees Fraction entries and no trailing zero
        obj = object.__new__(cls)
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def const(cls, q: Number) -> "HPoly":
        q = as_rational(q)
        return cls._raw((q,)) if q else ZERO

    @classmethod
    def monomial(cls, power: int, value: Number = 1) -> "HPoly":
        value = as_rational(value)
        if not value:
            return ZERO
        return cls._raw((Fraction(0),) * power + (value,))

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, Number]]) -> "HPoly":
        acc: dict[int, Fraction] = {}
        for k, v in terms:
            acc[k] = acc.get(k, Fraction(0)) + as_rational(v)
        if not acc:
            return ZERO
        top = max(acc)
        return cls([acc.get(k, 0) for k in range(top + 1)])

    def terms(self) -> Iterator[tuple[int, Fraction]]:
        """Nonzero ``(power, value)`` pairs in increasing power."""
        for k, v in enumerate(self.coeffs):
            if v:
                yield k, v

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else DEG_ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_term(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def leading_coefficient(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, HPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == ((as_rational(other),) if other else ())
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self):
        return f"HPoly({render_hpoly(self)!r})"

    def __str__(self):
        return render_hpoly(self)

    def __neg__(self):
        return HPoly._raw(tuple(-x for x in self.coeffs))

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        if not b:
            return self if a is self.coeffs else other
        c = list(a)
        for k, v in enumerate(b):
            c[k] += v
        while c and not c[-1]:
            c.pop()
        return HPoly._raw(tuple(c))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            return HPoly._raw(tuple(x * other for x in self.coeffs))
        if not isinstance(other, HPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return ZERO
        if len(b) == 1:
            return self * b[0]
        if len(a) == 1:
            return other * a[0]
        c = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    c[i + j] += x * y
        return HPoly._raw(tuple(c))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def scale(self, q: Number) -> "HPoly":
        return self * as_rational(q)

    def shift(self, k: int) -> "HPoly":
        """Multiply by ``h**k``."""
        if not self.coeffs or k == 0:
            return self
        return HPoly._raw((Fraction(0),) * k + self.coeffs)

    def __call__(self, h0: Number) -> Fraction:
        return hpoly_eval(self, h0)

    def divmod(self, other: "HPoly") -> tuple["HPoly", "HPoly"]:
        if not other:
            raise ZeroDenominator("division by the zero polynomial")
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        lc = other.coeffs[-1]
        if len(rem) - 1 < db:
            return ZERO, self
        quot = [Fraction(0)] * (len(rem) - db)
        for k in range(len(rem) - 1, db - 1, -1):
            q = rem[k] / lc
            if q:
                quot[k - db] = q
                for j, y in enumerate(other.coeffs):
                    rem[k - db + j] -= q * y
        while rem and not rem[-1]:
            rem.pop()
        return HPoly(quot), HPoly._raw(tuple(rem))

    def monic(self) -> "HPoly":
        if not self.coeffs:
            return self
        lc = self.coeffs[-1]
        return self if lc == 1 else self * (1 / lc)


def _coerce(x):
    if isinstance(x, HPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return HPoly.const(x)
    return NotImplemented


ZERO = HPoly._raw(())
ONE = HPoly._raw((Fraction(1),))
H = HPoly._raw((Fraction(0), Fraction(1)))


def hpoly_add(a: HPoly, b: HPoly) -> HPoly:
    return a + b


def hpoly_mul(a: HPoly, b: HPoly) -> HPoly:
    return a * b


def hpoly_eval(p: HPoly, h0: Number) -> Fraction:
    """Horner evaluation at ``h = h0``."""
    h0 = as_rational(h0)
    acc = Fraction(0)
    for v in reversed(p.coeffs):
        acc = acc * h0 + v
    return acc


def hpoly_gcd(a: HPoly, b: HPoly) -> HPoly:
    """Monic gcd; gcd(0, 0) = 0."""
    while b:
        a, b = b, a.divmod(b)[1]
    return a.monic()


class HRat:
    """Rational function num/den in h, kept normalized (coprime, den monic)."""

    __slots__ = ("num", "den")

    def __init__(self, num: HPoly, den: HPoly = ONE, *, _normalized=False):
        if not den:
            raise ZeroDenominator("HRat with zero denominator")
        if not _normalized:
            num, den = _normalize_pair(num, den)
        self.num = num
        self.den = den

    @classmethod
    def of(cls, x) -> "HRat":
        if isinstance(x, HRat):
            return x
        return cls(_coerce(x), ONE, _normalized=True)

    def is_polynomial(self) -> bool:
        return self.den.coeffs == ONE.coeffs

    def to_hpoly(self) -> HPoly:
        """Clear to an HPoly; raise :class:`NotPolynomial` if impossible."""
        if not self.is_polynomial():
            raise NotPolynomial(f"({self.num})/({self.den}) is not a polynomial in h")
        return self.num

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, (HPoly, int, Fraction)):
            other = HRat.of(other)
        if not isinstance(other, HRat):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"HRat(({self.num})/({self.den}))"

    def __neg__(self):
        return HRat(-self.num, self.den, _normalized=True)

    def __add__(self, other):
        other = HRat.of(other)
        if self.den.coeffs == other.den.coeffs:
            if len(self.den.coeffs) == 1:
                return HRat(self.num + other.num, ONE, _normalized=True)
            return HRat(self.num + other.num, self.den)
        return HRat(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-HRat.of(other))

    def __mul__(self, other):
        other = HRat.of(other)
        if len(self.den.coeffs) == 1 and len(other.den.coeffs) == 1:
            return HRat(self.num * other.num, ONE, _normalized=True)
        return HRat(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "HRat":
        if not self.num:
            raise ZeroDenominator("inverse of zero")
        return HRat(self.den, self.num)

    def __truediv__(self, other):
        return self * HRat.of(other).inverse()

    def __call__(self, h0: Number) -> Fraction:
        d = hpoly_eval(self.den, h0)
        if not d:
            raise ZeroDenominator(f"denominator {self.den} vanishes at h = {h0}")
        return hpoly_eval(self.num, h0) / d


def _normalize_pair(num: HPoly, den: HPoly) -> tuple[HPoly, HPoly]:
    if not num:
        return ZERO, ONE
    if len(den.coeffs) == 1:
        c = den.coeffs[0]
        return (num if c == 1 else num * (1 / c)), ONE
    g = hpoly_gcd(num, den)
    if g.degree > 0:
        num = num.divmod(g)[0]
        den = den.divmod(g)[0]
    lc = den.coeffs[-1]
    if lc != 1:
        num, den = num * (1 / lc), den * (1 / lc)
    return num, den


def hrat_normalize(r: HRat) -> HRat:
    return HRat(r.num, r.den)


def render_hpoly(p: HPoly, var: str = "h") -> str:
    """Render as e.g. ``1 - 1/4*h^2`` (increasing powers)."""
    if not p:
        return "0"
    parts = []
    for k, v in p.terms():
        parts.append(_render_scaled(v, _power_str(var, k)))
    return join_signed(parts)


def _power_str(var: str, k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return var
    return f"{var}^{k}"


def _render_scaled(v: Fraction, body: str) -> tuple[bool, str]:
    neg = v < 0
    a = -v if neg else v
    if not body:
        return neg, format_rational(a)
    if a == 1:
        return neg, body
    return neg, f"{format_rational(a)}*{body}"


def render_term(v: Fraction, body: str) -> tuple[bool, str]:
    """Sign flag and unsigned text for the term ``v*body``."""
    return _render_scaled(v, body)


def join_signed(parts: list[tuple[bool, str]]) -> str:
    if not parts:
        return "0"
    neg, s = parts[0]
    out = ["-" + s if neg else s]
    for neg, s in parts[1:]:
        out.append(("- " if neg else "+ ") + s)
    return " ".join(out)
