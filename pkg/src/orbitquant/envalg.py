"""The h-deformed enveloping algebra U_h in PBW normal form.

Elements are combinations of ordered monomials X_{i1}...X_{ik} with
i1 <= ... <= ik, keyed by exponent tuples so that PBW monomials and
commutative monomials share one index set. The defining relation is

    X_j X_i = X_i X_j + h [X_j, X_i],

so commutators in U_h carry a factor h against the Lie bracket.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .exactnum import H, ONE, HPoly, as_rational
from .liealg import LieAlgebraData
from .polyring import (
    CPoly,
    DimensionMismatch,
    IndexOutOfRange,
    MonomialOrder,
    mono_mul,
    render_cpoly,
    unit_monomial,
)


class ZeroElement(ValueError):
    pass


def word_of(exps: Sequence[int]) -> tuple:
    return tuple(i for i, e in enumerate(exps) for _ in range(e))


def exps_of(word: Iterable[int], n: int) -> tuple:
    e = [0] * n
    for i in word:
        e[i] += 1
    return tuple(e)


class _Tables:
    """Per-algebra memo of sorted-word times letter products."""

    def __init__(self, alg: LieAlgebraData):
        self.alg = alg
        self.sc = alg.structure_constants
        self.letter: dict = {}
        self.weyl: dict = {}
        self.lock = threading.Lock()

    def mul_letter(self, word: tuple, j: int) -> dict:
        if not word or word[-1] <= j:
            return {word + (j,): ONE}
        key = (word, j)
        hit = self.letter.get(key)
        if hit is not None:
            return hit
        k = word[-1]
        head = word[:-1]
        acc: dict = {}
        for u, c in self.mul_letter(head, j).items():
            for v, c2 in self.mul_letter(u, k).items():
                _acc(acc, v, c * c2)
        for m, cc in self.sc.get((k, j), {}).items():
            hc = H * cc
            for u, c in self.mul_letter(head, m).items():
                _acc(acc, u, hc * c)
        acc = {w: c for w, c in acc.items() if c}
        with self.lock:
            self.letter.setdefault(key, acc)
        return acc

    def mul_words(self, a: tuple, b: tuple) -> dict:
        cur = {a: ONE}
        for j in b:
            nxt: dict = {}
            for u, c in cur.items():
                for v, c2 in self.mul_letter(u, j).items():
                    _acc(nxt, v, c * c2)
            cur = {w: c for w, c in nxt.items() if c}
        return cur


def _acc(d: dict, k, c: HPoly) -> None:
    s = d.get(k)
    d[k] = c if s is None else s + c


def _tables(alg: LieAlgebraData) -> _Tables:
    t = alg.__dict__.get("_pbw_tables")
    if t is None:
        t = _Tables(alg)
        object.__setattr__(alg, "_pbw_tables", t)
    return t


class PBWElement:
    """Element of U_h: ``terms`` maps exponent tuples to HPoly coefficients."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: LieAlgebraData, terms: dict | None = None):
        self.alg = alg
        self.terms = {}
        for m, c in (terms or {}).items():
            if not isinstance(c, HPoly):
                c = HPoly.const(c)
            if c:
                if len(m) != alg.dim:
                    raise DimensionMismatch(f"exponent vector of length {len(m)}")
                self.terms[tuple(m)] = c

    @classmethod
    def _raw(cls, alg, terms: dict) -> "PBWElement":
        obj = object.__new__(cls)
        obj.alg = alg
        obj.terms = terms
        return obj

    @classmethod
    def unit(cls, alg, c=ONE) -> "PBWElement":
        c = c if isinstance(c, HPoly) else HPoly.const(c)
        return cls._raw(alg, {unit_monomial(alg.dim): c} if c else {})

    @classmethod
    def generator(cls, alg, i: int) -> "PBWElement":
        if not 0 <= i < alg.dim:
            raise IndexOutOfRange(f"basis index {i} outside 0..{alg.dim - 1}")
        return cls._raw(alg, {exps_of((i,), alg.dim): ONE})

    @classmethod
    def monomial(cls, alg, exps: tuple, c=ONE) -> "PBWElement":
        return cls(alg, {exps: c})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, PBWElement):
            return self.alg is other.alg and self.terms == other.terms
        if isinstance(other, (int, Fraction, HPoly)):
            return self == PBWElement.unit(self.alg, other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"PBWElement({render_pbw(self)!r})"

    def _lift(self, other):
        if isinstance(other, PBWElement):
            if other.alg is not self.alg:
                raise DimensionMismatch("elements of different algebras")
            return other
        if isinstance(other, (int, Fraction, HPoly)):
            return PBWElement.unit(self.alg, other)
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
        return PBWElement._raw(self.alg, t)

    __radd__ = __add__

    def __neg__(self):
        return PBWElement._raw(self.alg, {m: -c for m, c in self.terms.items()})

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
        if isinstance(other, PBWElement):
            return u_mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, HPoly)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "PBWElement":
        c = c if isinstance(c, HPoly) else HPoly.const(c)
        if not c:
            return PBWElement._raw(self.alg, {})
        return PBWElement._raw(self.alg, {m: v * c for m, v in self.terms.items() if v * c})

    def degree(self) -> int:
        """Filtered degree; -1 for zero."""
        return max((sum(m) for m in self.terms), default=-1)

    def homogeneous_part(self, d: int) -> "PBWElement":
        return PBWElement._raw(self.alg, {m: c for m, c in self.terms.items() if sum(m) == d})

    def to_cpoly(self) -> CPoly:
        """Same coefficient table read as a commutative polynomial."""
        return CPoly._raw(self.alg.dim, dict(self.terms))


def pbw_normalize(word: Sequence[int], c, alg: LieAlgebraData,
                  strategy: str = "product") -> PBWElement:
    """Rewrite ``c * X_{w1} ... X_{wk}`` into ordered monomials.

    ``strategy`` selects how inversions are resolved: ``"product"`` folds
    letters into a memoized sorted word; ``"left"`` / ``"right"`` rewrite
    the leftmost / rightmost adjacent inversion first, without memoization.
    """
    c = c if isinstance(c, HPoly) else HPoly.const(c)
    word = tuple(word)
    for i in word:
        if not 0 <= i < alg.dim:
            raise IndexOutOfRange(f"basis index {i} outside 0..{alg.dim - 1}")
    if strategy == "product":
        res = _tables(alg).mul_words((), word)
    elif strategy in ("left", "right"):
        res = _rewrite(word, alg, strategy == "left")
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    n = alg.dim
    out: dict = {}
    for w, v in res.items():
        v = v * c
        if v:
            _acc(out, exps_of(w, n), v)
    return PBWElement._raw(alg, {m: v for m, v in out.items() if v})


def _rewrite(word: tuple, alg: LieAlgebraData, leftmost: bool) -> dict:
    pending = {word: ONE}
    done: dict = {}
    sc = alg.structure_constants
    while pending:
        w, c = pending.popitem()
        if not c:
            continue
        pos = [p for p in range(len(w) - 1) if w[p] > w[p + 1]]
        if not pos:
            _acc(done, w, c)
            continue
        p = pos[0] if leftmost else pos[-1]
        a, b = w[p], w[p + 1]
        _acc(pending, w[:p] + (b, a) + w[p + 2:], c)
        for m, cc in sc.get((a, b), {}).items():
            _acc(pending, w[:p] + (m,) + w[p + 2:], c * H * cc)
    return {w: c for w, c in done.items() if c}


def u_mul(a: PBWElement, b: PBWElement) -> PBWElement:
    if a.alg is not b.alg:
        raise DimensionMismatch("elements of different algebras")
    t = _tables(a.alg)
    n = a.alg.dim
    out: dict = {}
    for ma, ca in a.terms.items():
        wa = word_of(ma)
        for mb, cb in b.terms.items():
            cab = ca * cb
            if not cab:
                continue
            wb = word_of(mb)
            if not wa or not wb or wa[-1] <= wb[0]:
                _acc(out, mono_mul(ma, mb), cab)
                continue
            for w, v in t.mul_words(wa, wb).items():
                _acc(out, exps_of(w, n), v * cab)
    return PBWElement._raw(a.alg, {m: v for m, v in out.items() if v})


def _arrangements(word: tuple) -> Iterator[tuple]:
    """Distinct orderings of a multiset word."""
    counts: dict = {}
    for i in word:
        counts[i] = counts.get(i, 0) + 1
    keys = sorted(counts)
    n = len(word)

    def rec(prefix):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for k in keys:
            if counts[k]:
                counts[k] -= 1
                prefix.append(k)
                yield from rec(prefix)
                prefix.pop()
                counts[k] += 1

    yield from rec([])


def _weyl_monomial(alg: LieAlgebraData, exps: tuple) -> dict:
    t = _tables(alg)
    hit = t.weyl.get(exps)
    if hit is not None:
        return hit
    word = word_of(exps)
    n = alg.dim
    acc: dict = {}
    count = 0
    for arr in _arrangements(word):
        count += 1
        for w, v in t.mul_words((), arr).items():
            _acc(acc, exps_of(w, n), v)
    inv = Fraction(1, count)
    res = {m: v * inv for m, v in acc.items() if v}
    with t.lock:
        t.weyl.setdefault(exps, res)
    return res


def weyl_map(f: CPoly, alg: LieAlgebraData) -> PBWElement:
    """Symmetrization: average of all orderings of each monomial, normalized."""
    if f.nvars != alg.dim:
        raise DimensionMismatch(f"polynomial has {f.nvars} variables, algebra {alg.dim}")
    out: dict = {}
    for m, c in f.terms.items():
        for mm, v in _weyl_monomial(alg, m).items():
            _acc(out, mm, v * c)
    return PBWElement._raw(alg, {m: v for m, v in out.items() if v})


def weyl_map_inverse(u: PBWElement) -> CPoly:
    n = u.alg.dim
    rest = u
    out = CPoly.zero(n)
    while rest:
        top = rest.homogeneous_part(rest.degree()).to_cpoly()
        out = out + top
        rest = rest - weyl_map(top, u.alg)
    return out


def ad_action(alg: LieAlgebraData, i: int, u: PBWElement) -> PBWElement:
    """Commutator X_i u - u X_i."""
    x = PBWElement.generator(alg, i)
    return u_mul(x, u) - u_mul(u, x)


def symbol(u: PBWElement) -> CPoly:
    """Top filtered-degree part with h set to 0."""
    if not u:
        raise ZeroElement("symbol of the zero element")
    return u.homogeneous_part(u.degree()).to_cpoly().eval_h(0)


def evaluate_h(u: PBWElement, h0) -> PBWElement:
    h0 = as_rational(h0)
    t = {}
    for m, c in u.terms.items():
        v = c(h0)
        if v:
            t[m] = HPoly.const(v)
    return PBWElement._raw(u.alg, t)


def sorted_word_lift(f: CPoly, alg: LieAlgebraData) -> PBWElement:
    """x_{i1}...x_{ik} -> X_{i1}...X_{ik} with indices in basis order."""
    if f.nvars != alg.dim:
        raise DimensionMismatch(f"polynomial has {f.nvars} variables, algebra {alg.dim}")
    return PBWElement._raw(alg, dict(f.terms))


def render_pbw(u: PBWElement, order: MonomialOrder | None = None) -> str:
    return render_cpoly(u.to_cpoly(), u.alg.pbw_names, order)
