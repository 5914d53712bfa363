"""Commutative polynomials over Q[h] on the dual of a Lie algebra.

Monomials are exponent tuples. :class:`CPoly` maps monomials to
:class:`~orbitquant.exactnum.HPoly` coefficients. The Groebner machinery
works on h-free polynomials only and uses plain ``Fraction`` dicts
internally.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exactnum import ONE, ZERO, HPoly, as_rational, join_signed, render_term

Monomial = tuple


class DimensionMismatch(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class ZeroPolynomial(ValueError):
    pass


class HCoefficientPresent(ValueError):
    pass


class UnitIdeal(ValueError):
    pass


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True if ``a`` divides ``b``."""
    return all(x <= y for x, y in zip(a, b))


def mono_div(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def unit_monomial(n: int) -> Monomial:
    return (0,) * n


def var_monomial(n: int, i: int) -> Monomial:
    return tuple(1 if k == i else 0 for k in range(n))


def monomials_of_degree(n: int, d: int) -> list[Monomial]:
    out = []
    for combo in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def monomials_up_to(n: int, d: int) -> list[Monomial]:
    return [m for k in range(d + 1) for m in monomials_of_degree(n, k)]


@dataclass(frozen=True)
class MonomialOrder:
    """Graded lex: total degree first, ties broken lexicographically along
    ``priority`` (the first variable listed is the largest)."""

    priority: tuple

    @classmethod
    def grlex(cls, n: int, priority: Sequence[int] | None = None) -> "MonomialOrder":
        p = tuple(range(n)) if priority is None else tuple(priority)
        if sorted(p) != list(range(n)):
            raise ValueError(f"priority {p} is not a permutation of 0..{n - 1}")
        return cls(p)

    @property
    def kind(self) -> str:
        return "grlex"

    @property
    def nvars(self) -> int:
        return len(self.priority)

    def key(self, m: Monomial):
        return (sum(m), tuple(m[i] for i in self.priority))


def compare(order: MonomialOrder, a: Monomial, b: Monomial) -> int:
    """-1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    if len(a) != len(b) or len(a) != order.nvars:
        raise DimensionMismatch(f"monomials of length {len(a)} and {len(b)}")
    ka, kb = order.key(a), order.key(b)
    return (ka > kb) - (ka < kb)


class CPoly:
    """Sparse commutative polynomial with HPoly coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms: dict = {}
        if terms:
            for m, c in terms.items():
                if not isinstance(c, HPoly):
                    c = HPoly.const(c)
                if c:
                    self.terms[tuple(m)] = c

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "CPoly":
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, nvars: int) -> "CPoly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> "CPoly":
        c = c if isinstance(c, HPoly) else HPoly.const(c)
        return cls._raw(nvars, {unit_monomial(nvars): c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "CPoly":
        if not 0 <= i < nvars:
            raise IndexOutOfRange(f"variable index {i} outside 0..{nvars - 1}")
        return cls._raw(nvars, {var_monomial(nvars, i): ONE})

    @classmethod
    def monomial(cls, m: Monomial, c=ONE) -> "CPoly":
        return cls(len(m), {m: c})

    def copy(self) -> "CPoly":
        return CPoly._raw(self.nvars, dict(self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, CPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction, HPoly)):
            return self == CPoly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"CPoly({render_cpoly(self)!r})"

    def _check(self, other: "CPoly"):
        if self.nvars != other.nvars:
            raise DimensionMismatch(f"{self.nvars} vs {other.nvars} variables")

    def _lift(self, other):
        if isinstance(other, CPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, HPoly)):
            return CPoly.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            s = t.get(m)
            s = c if s is None else s + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return CPoly._raw(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return CPoly._raw(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, HPoly)):
            return self.scale(other)
        if not isinstance(other, CPoly):
            return NotImplemented
        self._check(other)
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                s = t.get(m)
                p = c1 * c2
                t[m] = p if s is None else s + p
        return CPoly._raw(self.nvars, {m: c for m, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = CPoly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c) -> "CPoly":
        if not isinstance(c, HPoly):
            c = HPoly.const(c)
        if not c:
            return CPoly.zero(self.nvars)
        return CPoly._raw(self.nvars, {m: v * c for m, v in self.terms.items() if v * c})

    def mul_monomial(self, m: Monomial, c=ONE) -> "CPoly":
        return CPoly._raw(self.nvars, {mono_mul(k, m): v * c for k, v in self.terms.items()})

    def degree(self) -> int:
        """Total degree in x; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def homogeneous_part(self, d: int) -> "CPoly":
        return CPoly._raw(self.nvars, {m: c for m, c in self.terms.items() if sum(m) == d})

    def top_part(self) -> "CPoly":
        return self.homogeneous_part(self.degree())

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def is_h_free(self) -> bool:
        return all(c.is_constant() for c in self.terms.values())

    def h_degree(self) -> int:
        return max((len(c.coeffs) - 1 for c in self.terms.values()), default=-1)

    def h_coefficient(self, k: int) -> "CPoly":
        """The h-free polynomial multiplying ``h**k``."""
        t = {}
        for m, c in self.terms.items():
            if k < len(c.coeffs) and c.coeffs[k]:
                t[m] = HPoly.const(c.coeffs[k])
        return CPoly._raw(self.nvars, t)

    def eval_h(self, h0) -> "CPoly":
        h0 = as_rational(h0)
        t = {}
        for m, c in self.terms.items():
            v = c(h0)
            if v:
                t[m] = HPoly.const(v)
        return CPoly._raw(self.nvars, t)

    def divide_by_h(self) -> "CPoly":
        """Exact division by h; raises if some coefficient has a constant term."""
        t = {}
        for m, c in self.terms.items():
            if c.coeffs[0]:
                raise ArithmeticError("polynomial is not divisible by h")
            t[m] = HPoly._raw(c.coeffs[1:])
        return CPoly._raw(self.nvars, t)

    def evaluate(self, point: Sequence) -> HPoly:
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point of length {len(point)} for {self.nvars} variables")
        pt = [as_rational(x) for x in point]
        acc = ZERO
        for m, c in self.terms.items():
            v = Fraction(1)
            for x, e in zip(pt, m):
                if e:
                    v *= x**e
            if v:
                acc = acc + c * v
        return acc

    def derivative(self, i: int) -> "CPoly":
        t: dict = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                mm = m[:i] + (e - 1,) + m[i + 1:]
                t[mm] = t.get(mm, ZERO) + c * e
        return CPoly._raw(self.nvars, {m: c for m, c in t.items() if c})

    def sorted_terms(self, order: MonomialOrder, descending: bool = True):
        return sorted(self.terms.items(), key=lambda mc: order.key(mc[0]), reverse=descending)

    def to_rational(self) -> dict:
        if not self.is_h_free():
            raise HCoefficientPresent("polynomial has coefficients depending on h")
        return {m: c.coeffs[0] for m, c in self.terms.items()}

    @classmethod
    def from_rational(cls, nvars: int, d: dict) -> "CPoly":
        return cls._raw(nvars, {m: HPoly._raw((c,)) for m, c in d.items() if c})


def poisson_bracket(alg, f: CPoly, g: CPoly) -> CPoly:
    """Kirillov bracket sum_{ijk} c_ij^k x_k df/dx_i dg/dx_j."""
    n = alg.dim
    if f.nvars != n or g.nvars != n:
        raise DimensionMismatch(f"polynomials must have {n} variables")
    df = [f.derivative(i) for i in range(n)]
    dg = [g.derivative(j) for j in range(n)]
    out = CPoly.zero(n)
    for (i, j), row in alg.structure_constants.items():
        if not df[i] or not dg[j]:
            continue
        lin = CPoly._raw(n, {var_monomial(n, k): HPoly.const(c) for k, c in row.items()})
        out = out + lin * df[i] * dg[j]
    return out


def coadjoint_action(alg, i: int, f: CPoly) -> CPoly:
    """The derivation ``X_i . f = {x_i, f}``."""
    if not 0 <= i < alg.dim:
        raise IndexOutOfRange(f"basis index {i} outside 0..{alg.dim - 1}")
    n = alg.dim
    out = CPoly.zero(n)
    for j in range(n):
        dfj = f.derivative(j)
        row = alg.structure_constants.get((i, j))
        if not dfj or not row:
            continue
        lin = CPoly._raw(n, {var_monomial(n, k): HPoly.const(c) for k, c in row.items()})
        out = out + lin * dfj
    return out


def leading_term(f: CPoly, order: MonomialOrder) -> tuple[Monomial, HPoly]:
    if not f.terms:
        raise ZeroPolynomial("leading term of the zero polynomial")
    m = max(f.terms, key=order.key)
    return m, f.terms[m]


# -- rational kernel -------------------------------------------------------


def _lm(p: dict, key) -> Monomial:
    return max(p, key=key)


def _rp_add_scaled(p: dict, q: dict, c: Fraction, shift: Monomial) -> None:
    """In place: p -= c * shift * q."""
    for m, v in q.items():
        mm = mono_mul(m, shift)
        s = p.get(mm, 0) - c * v
        if s:
            p[mm] = s
        else:
            p.pop(mm, None)


def _rp_reduce(p: dict, basis: list, lms: list, key, quotients: list | None = None) -> dict:
    """Full reduction of ``p`` by monic ``basis``; returns the remainder."""
    p = dict(p)
    rem: dict = {}
    while p:
        m = max(p, key=key)
        c = p[m]
        for idx, (g, lg) in enumerate(zip(basis, lms)):
            if mono_divides(lg, m):
                shift = mono_div(m, lg)
                _rp_add_scaled(p, g, c, shift)
                if quotients is not None:
                    quotients[idx][shift] = quotients[idx].get(shift, 0) + c
                break
        else:
            rem[m] = c
            del p[m]
    return rem


def _rp_monic(p: dict, key) -> dict:
    lc = p[_lm(p, key)]
    if lc == 1:
        return p
    inv = 1 / lc
    return {m: v * inv for m, v in p.items()}


def _spoly(f: dict, lf: Monomial, g: dict, lg: Monomial) -> dict:
    lcm = mono_lcm(lf, lg)
    out = {}
    _rp_add_scaled(out, f, Fraction(-1), mono_div(lcm, lf))
    _rp_add_scaled(out, g, Fraction(1), mono_div(lcm, lg))
    return out


def _disjoint(a: Monomial, b: Monomial) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


@dataclass(frozen=True, eq=False)
class GroebnerBasis:
    generators: tuple
    order: MonomialOrder
    reduced: bool = True
    _rat: tuple = field(default=(), repr=False)

    @property
    def nvars(self) -> int:
        return self.order.nvars

    @property
    def leading_monomials(self) -> list[Monomial]:
        return [leading_term(g, self.order)[0] for g in self.generators]

    def is_unit(self) -> bool:
        return any(g.degree() == 0 for g in self.generators)

    def __eq__(self, other):
        if not isinstance(other, GroebnerBasis):
            return NotImplemented
        return self.order == other.order and list(self.generators) == list(other.generators)

    def __hash__(self):
        return hash((self.order, tuple(self.generators)))

    def _rational(self):
        if self._rat:
            return self._rat
        rat = [g.to_rational() for g in self.generators]
        lms = [_lm(p, self.order.key) for p in rat]
        object.__setattr__(self, "_rat", (rat, lms))
        return self._rat


def _interreduce(polys: list[dict], key) -> list[dict]:
    polys = [_rp_monic(p, key) for p in polys if p]
    if any(_lm(p, key) == unit_monomial(len(_lm(p, key))) for p in polys):
        n = len(_lm(polys[0], key))
        return [{unit_monomial(n): Fraction(1)}]
    polys.sort(key=lambda p: key(_lm(p, key)))
    minimal: list[dict] = []
    for p in polys:
        lp = _lm(p, key)
        if not any(mono_divides(_lm(q, key), lp) for q in minimal):
            minimal.append(p)
    out = []
    for i, p in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        r = _rp_reduce(p, others, [_lm(q, key) for q in others], key)
        out.append(_rp_monic(r, key))
    out.sort(key=lambda p: key(_lm(p, key)))
    return out


def buchberger(gens: Iterable[CPoly], order: MonomialOrder) -> GroebnerBasis:
    """Reduced Groebner basis via Buchberger's algorithm with the
    Gebauer-Moeller pair criteria and the normal selection strategy."""
    gens = list(gens)
    n = order.nvars
    for g in gens:
        if g.nvars != n:
            raise DimensionMismatch(f"generator has {g.nvars} variables, order has {n}")
        if not g.is_h_free():
            raise HCoefficientPresent(f"generator {g!r} depends on h")
    key = order.key
    polys: list[dict] = []
    lms: list[Monomial] = []
    pairs: list[tuple[int, int]] = []
    unit = False

    def add(f: dict) -> None:
        nonlocal pairs
        lf = _lm(f, key)
        t = len(polys)
        lcms = [mono_lcm(lms[i], lf) for i in range(t)]
        cand = list(range(t))
        kept: list[int] = []
        while cand:
            i = cand.pop(0)
            if _disjoint(lms[i], lf) or not any(
                mono_divides(lcms[j], lcms[i]) for j in cand + kept
            ):
                kept.append(i)
        new = [(i, t) for i in kept if not _disjoint(lms[i], lf)]
        old = []
        for (i, j) in pairs:
            lij = mono_lcm(lms[i], lms[j])
            if mono_divides(lf, lij) and lcms[i] != lij and lcms[j] != lij:
                continue
            old.append((i, j))
        pairs = old + new
        polys.append(f)
        lms.append(lf)

    for g in gens:
        r = _rp_reduce(g.to_rational(), polys, lms, key) if polys else dict(g.to_rational())
        if not r:
            continue
        r = _rp_monic(r, key)
        if _lm(r, key) == unit_monomial(n):
            unit = True
            break
        add(r)

    while pairs and not unit:
        pairs.sort(key=lambda ij: (key(mono_lcm(lms[ij[0]], lms[ij[1]])), ij))
        i, j = pairs.pop(0)
        s = _spoly(polys[i], lms[i], polys[j], lms[j])
        r = _rp_reduce(s, polys, lms, key)
        if not r:
            continue
        r = _rp_monic(r, key)
        if _lm(r, key) == unit_monomial(n):
            unit = True
            break
        add(r)

    if unit:
        final = [{unit_monomial(n): Fraction(1)}]
    else:
        final = _interreduce(polys, key)
    out = tuple(CPoly.from_rational(n, p) for p in final)
    return GroebnerBasis(out, order, True)


def groebner_from_basis(polys: Iterable[CPoly], order: MonomialOrder) -> GroebnerBasis:
    """Wrap polynomials already known to form a Groebner basis (e.g. the empty one)."""
    return GroebnerBasis(tuple(polys), order, True)


def divide(f: CPoly, gb: GroebnerBasis) -> tuple[list[CPoly], CPoly]:
    """Multivariate division of an h-free ``f``: returns ``(quotients, remainder)``
    with ``f = sum q_i g_i + remainder``."""
    rat, lms = gb._rational()
    quot = [dict() for _ in rat]
    rem = _rp_reduce(f.to_rational(), list(rat), list(lms), gb.order.key, quot)
    n = gb.nvars
    qs = [CPoly.from_rational(n, q) for q in quot]
    return qs, CPoly.from_rational(n, rem)


def normal_form(f: CPoly, gb: GroebnerBasis) -> CPoly:
    """Remainder of ``f`` modulo the Groebner basis, h-coefficient by h-coefficient."""
    if f.nvars != gb.nvars:
        raise DimensionMismatch(f"{f.nvars} vs {gb.nvars} variables")
    rat, lms = gb._rational()
    key = gb.order.key
    out: dict = {}
    for k in range(f.h_degree() + 1):
        part = {m: c.coeffs[k] for m, c in f.terms.items() if k < len(c.coeffs) and c.coeffs[k]}
        if not part:
            continue
        for m, v in _rp_reduce(part, list(rat), list(lms), key).items():
            out[m] = out.get(m, ZERO) + HPoly.monomial(k, v)
    return CPoly._raw(f.nvars, {m: c for m, c in out.items() if c})


def is_groebner(gb: GroebnerBasis) -> bool:
    """Direct check that every S-polynomial reduces to zero."""
    rat, lms = gb._rational()
    key = gb.order.key
    for i in range(len(rat)):
        for j in range(i + 1, len(rat)):
            s = _spoly(rat[i], lms[i], rat[j], lms[j])
            if _rp_reduce(s, list(rat), list(lms), key):
                return False
    return True


@dataclass(frozen=True)
class StandardMonomialSet:
    max_degree: int
    monomials: tuple
    order: MonomialOrder

    def __len__(self):
        return len(self.monomials)

    def __contains__(self, m):
        return m in self._set

    @property
    def _set(self):
        s = self.__dict__.get("_cached_set")
        if s is None:
            s = frozenset(self.monomials)
            object.__setattr__(self, "_cached_set", s)
        return s

    def count_by_degree(self) -> list[int]:
        counts = [0] * (self.max_degree + 1)
        for m in self.monomials:
            counts[sum(m)] += 1
        return counts

    def index_words(self) -> list[tuple]:
        """The index set J: each monomial as a nondecreasing index word."""
        return [tuple(i for i, e in enumerate(m) for _ in range(e)) for m in self.monomials]


def standard_monomials(gb: GroebnerBasis, D: int) -> StandardMonomialSet:
    if D < 0:
        raise ValueError("D must be nonnegative")
    lms = gb.leading_monomials
    mons = [m for m in monomials_up_to(gb.nvars, D) if not any(mono_divides(l, m) for l in lms)]
    mons.sort(key=gb.order.key)
    return StandardMonomialSet(D, tuple(mons), gb.order)


def krull_dimension(gb: GroebnerBasis) -> int:
    """Largest set of variables containing the support of no leading monomial."""
    if gb.is_unit():
        raise UnitIdeal("the unit ideal has no dimension")
    n = gb.nvars
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in gb.leading_monomials]
    for size in range(n, -1, -1):
        for S in itertools.combinations(range(n), size):
            s = frozenset(S)
            if not any(sup <= s for sup in supports):
                return size
    return 0


# -- rendering -------------------------------------------------------------


def monomial_str(m: Monomial, names: Sequence[str]) -> str:
    parts = []
    for i, e in enumerate(m):
        if e == 1:
            parts.append(names[i])
        elif e > 1:
            parts.append(f"{names[i]}^{e}")
    return "*".join(parts)


def render_cpoly(f: CPoly, names: Sequence[str] | None = None,
                 order: MonomialOrder | None = None) -> str:
    """Render in increasing monomial order, expanding h-coefficients into
    separate terms, e.g. ``1 + 1/2*h*xH - 1/4*xH^2``."""
    if names is None:
        names = [f"x{i + 1}" for i in range(f.nvars)]
    if order is None:
        order = MonomialOrder.grlex(f.nvars)
    parts = []
    for m, c in f.sorted_terms(order, descending=False):
        mono = monomial_str(m, names)
        for k, v in c.terms():
            hpart = "" if k == 0 else ("h" if k == 1 else f"h^{k}")
            body = "*".join(p for p in (hpart, mono) if p)
            parts.append(render_term(v, body))
    return join_signed(parts)
