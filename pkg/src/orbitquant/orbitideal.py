"""Coadjoint orbits of sl(n) given by eigenvalue multisets, their ideals,
and equivariance certificates for the generators."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactnum import as_rational, format_rational
from .liealg import (
    LieAlgebraData,
    generic_matrix,
    invariants,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_zero,
    poly_mat_mul,
    poly_mat_trace,
)
from .polyring import (
    CPoly,
    DimensionMismatch,
    MonomialOrder,
    buchberger,
    coadjoint_action,
    normal_form,
)


class OrbitError(ValueError):
    pass


class TraceNotZero(OrbitError):
    pass


class DuplicateEigenvalue(OrbitError):
    pass


class MultiplicityMismatch(OrbitError):
    pass


class NotRegular(OrbitError):
    pass


class NotEquivariant(OrbitError):
    pass


class RepresentationFailure(AssertionError):
    pass


@dataclass(frozen=True, eq=False)
class OrbitSpec:
    algebra: LieAlgebraData
    eigenvalues: tuple  # ((Fraction value, int multiplicity), ...)

    @property
    def n(self) -> int:
        return self.algebra.n_rank_matrix

    def is_regular(self) -> bool:
        return all(m == 1 for _, m in self.eigenvalues)

    @property
    def distinct_values(self) -> list[Fraction]:
        return [v for v, _ in self.eigenvalues]

    def representative_matrix(self):
        """diag(a_1, ..., a_n) with eigenvalues in decreasing order."""
        diag = []
        for v, m in sorted(self.eigenvalues, key=lambda vm: vm[0], reverse=True):
            diag.extend([v] * m)
        out = mat_zero(self.n)
        for i, v in enumerate(diag):
            out[i][i] = v
        return out

    @property
    def representative(self) -> list[Fraction]:
        """Coordinates x_j = tr(A X_j) of the diagonal representative A."""
        return self.algebra.dual_coords(self.representative_matrix())

    def expected_dimension(self) -> int:
        """dim G - dim stabilizer = n^2 - sum of squared multiplicities."""
        return self.n**2 - sum(m * m for _, m in self.eigenvalues)

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra.name,
            "eigs": [{"value": format_rational(v), "mult": m} for v, m in self.eigenvalues],
        }

    def describe(self) -> str:
        return ",".join(f"{format_rational(v)}:{m}" for v, m in self.eigenvalues)

    def __eq__(self, other):
        if not isinstance(other, OrbitSpec):
            return NotImplemented
        return self.algebra.name == other.algebra.name and self.eigenvalues == other.eigenvalues

    def __hash__(self):
        return hash((self.algebra.name, self.eigenvalues))


def orbit_from_eigs(alg: LieAlgebraData, eigs: Sequence) -> OrbitSpec:
    """``eigs`` is a list of ``(value, multiplicity)`` pairs."""
    pairs = []
    for item in eigs:
        if isinstance(item, (tuple, list)):
            v, m = item
        else:
            v, m = item, 1
        m = int(m)
        if m < 1:
            raise MultiplicityMismatch(f"multiplicity {m} must be positive")
        pairs.append((as_rational(v), m))
    values = [v for v, _ in pairs]
    if len(set(values)) != len(values):
        dup = next(v for v in values if values.count(v) > 1)
        raise DuplicateEigenvalue(f"eigenvalue {format_rational(dup)} listed twice")
    total = sum(m for _, m in pairs)
    if total != alg.n_rank_matrix:
        raise MultiplicityMismatch(
            f"multiplicities sum to {total}, expected {alg.n_rank_matrix}")
    tr = sum(v * m for v, m in pairs)
    if tr != 0:
        raise TraceNotZero(f"weighted eigenvalue sum is {format_rational(tr)}, expected 0")
    return OrbitSpec(alg, tuple(pairs))


def parse_eigs(text: str) -> list[tuple[Fraction, int]]:
    """``"1:2,-2:1"`` or ``"1,0,-1"`` (multiplicity defaults to 1)."""
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            raise ValueError(f"empty eigenvalue entry in {text!r}")
        if ":" in chunk:
            v, m = chunk.split(":", 1)
            out.append((as_rational(v), int(m)))
        else:
            out.append((as_rational(chunk), 1))
    return out


def orbit_from_json(data: dict, algebra_lookup) -> OrbitSpec:
    alg = algebra_lookup(data["algebra"])
    return orbit_from_eigs(alg, [(as_rational(str(e["value"])), int(e.get("mult", 1)))
                                 for e in data["eigs"]])


@dataclass(frozen=True, eq=False)
class IdealPresentation:
    orbit: OrbitSpec
    generators: tuple
    source: str  # "regular-invariant" | "minimal-polynomial"
    entries: tuple = field(default=(), repr=False)

    @property
    def algebra(self) -> LieAlgebraData:
        return self.orbit.algebra

    def max_degree(self) -> int:
        return max((g.degree() for g in self.generators), default=0)


@dataclass(frozen=True)
class EquivarianceCertificate:
    """``T[i][a][b]``: X_i . r_a = sum_b T[i][a][b] r_b."""

    T: tuple


def regular_generators(spec: OrbitSpec) -> IdealPresentation:
    if not spec.is_regular():
        raise NotRegular(f"orbit {spec.describe()} has a repeated eigenvalue")
    lam = spec.representative
    gens = []
    for p in invariants(spec.algebra).generators:
        gens.append(p - p.evaluate(lam))
    return IdealPresentation(spec, tuple(gens), "regular-invariant")


def minimal_polynomial_matrix(spec: OrbitSpec):
    """mu(M(x)) with mu(t) = prod over distinct eigenvalues of (t - a)."""
    alg = spec.algebra
    n = alg.n_rank_matrix
    M = generic_matrix(alg)
    acc = None
    for a in spec.distinct_values:
        factor = [[M[i][j] - (a if i == j else 0) for j in range(n)] for i in range(n)]
        acc = factor if acc is None else poly_mat_mul(acc, factor)
    return acc


def minimalpoly_generators(spec: OrbitSpec, augment: bool = True) -> IdealPresentation:
    """Entries of mu(M(x)).

    ``generators`` keeps the linearly independent entries (first occurrence in
    row-major order); ``entries`` holds all n^2 of them. The entries alone
    vanish on every diagonalizable matrix whose eigenvalues lie in the given
    set, e.g. also at the origin for eigenvalues (1, 0, -1). With ``augment``
    the invariant shifts p_k - p_k(lambda) that are not already in the ideal
    are appended; they are invariant, so equivariance is unaffected.
    """
    mu = minimal_polynomial_matrix(spec)
    entries = tuple(e for row in mu for e in row)
    span = LinearSpan()
    gens = []
    for e in entries:
        if e and span.add(e):
            gens.append(e)
    if augment:
        alg = spec.algebra
        order = MonomialOrder.grlex(alg.dim)
        gb = buchberger(gens, order)
        lam = spec.representative
        for p in invariants(alg).generators:
            shift = p - p.evaluate(lam)
            if normal_form(shift, gb) and span.add(shift):
                gens.append(shift)
                gb = buchberger(gens, order)
    return IdealPresentation(spec, tuple(gens), "minimal-polynomial", entries)


class LinearSpan:
    """Incremental echelon form of h-free polynomials over Q, tracking how
    each echelon row combines the inserted polynomials."""

    def __init__(self):
        self.rows: list[tuple] = []  # (pivot, vec, combo)
        self.size = 0

    def _reduce(self, vec: dict, combo: dict):
        for piv, rv, rc in self.rows:
            c = vec.get(piv)
            if c:
                for m, v in rv.items():
                    s = vec.get(m, 0) - c * v
                    if s:
                        vec[m] = s
                    else:
                        vec.pop(m, None)
                for k, v in rc.items():
                    s = combo.get(k, 0) - c * v
                    if s:
                        combo[k] = s
                    else:
                        combo.pop(k, None)
        return vec, combo

    def add(self, p: CPoly) -> bool:
        vec, combo = self._reduce(dict(p.to_rational()), {self.size: Fraction(1)})
        if not vec:
            return False
        piv = max(vec)
        inv = 1 / vec[piv]
        vec = {m: v * inv for m, v in vec.items()}
        combo = {k: v * inv for k, v in combo.items()}
        # keep rows fully reduced at their pivots
        new_rows = []
        for q, rv, rc in self.rows:
            c = rv.get(piv)
            if c:
                rv = dict(rv)
                rc = dict(rc)
                for m, v in vec.items():
                    s = rv.get(m, 0) - c * v
                    if s:
                        rv[m] = s
                    else:
                        rv.pop(m, None)
                for k, v in combo.items():
                    s = rc.get(k, 0) - c * v
                    if s:
                        rc[k] = s
                    else:
                        rc.pop(k, None)
            new_rows.append((q, rv, rc))
        new_rows.append((piv, vec, combo))
        self.rows = new_rows
        self.size += 1
        return True

    def express(self, p: CPoly) -> list[Fraction] | None:
        """Coefficients of ``p`` in the inserted polynomials, or None."""
        vec = dict(p.to_rational())
        out = [Fraction(0)] * self.size
        for piv, rv, rc in self.rows:
            c = vec.get(piv)
            if c:
                for m, v in rv.items():
                    s = vec.get(m, 0) - c * v
                    if s:
                        vec[m] = s
                    else:
                        vec.pop(m, None)
                for k, v in rc.items():
                    out[k] += c * v
        return None if vec else out


def equivariance_certificate(pres: IdealPresentation) -> EquivarianceCertificate:
    alg = pres.algebra
    span = LinearSpan()
    for g in pres.generators:
        if not span.add(g):
            raise ValueError("presentation generators are linearly dependent")
    Ts = []
    for i in range(alg.dim):
        T = []
        for a, r in enumerate(pres.generators):
            img = coadjoint_action(alg, i, r)
            coeffs = span.express(img)
            if coeffs is None:
                raise NotEquivariant(
                    f"X_{alg.basis_labels[i]} . r_{a} leaves the span of the generators")
            T.append(tuple(coeffs))
        Ts.append(tuple(T))
    cert = EquivarianceCertificate(tuple(Ts))
    bad = representation_defect(alg, cert)
    if bad is not None:
        raise RepresentationFailure(f"certificate fails the bracket identity at {bad}")
    return cert


def representation_defect(alg: LieAlgebraData, cert: EquivarianceCertificate):
    """First pair (i, j) violating T_[i,j] = T_j T_i - T_i T_j, or None.

    With X.r_a = sum_b T[a][b] r_b the matrices compose in reverse, so the
    transposes form the representation.
    """
    Ts = [[list(r) for r in T] for T in cert.T]
    if not Ts or not Ts[0]:
        return None
    l = len(Ts[0])
    for i in range(alg.dim):
        for j in range(alg.dim):
            lhs = [[Fraction(0)] * l for _ in range(l)]
            for k, c in alg.structure_constants.get((i, j), {}).items():
                for a in range(l):
                    for b in range(l):
                        lhs[a][b] += c * Ts[k][a][b]
            rhs_ = mat_mul(Ts[j], Ts[i])
            rhs2 = mat_mul(Ts[i], Ts[j])
            rhs = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(rhs_, rhs2)]
            if lhs != rhs:
                return (i, j)
    return None


def on_orbit(pres: IdealPresentation, point: Sequence) -> bool:
    if len(point) != pres.algebra.dim:
        raise DimensionMismatch(f"point of length {len(point)}, algebra dim {pres.algebra.dim}")
    return all(not g.evaluate(point) for g in pres.generators)


def random_unimodular(n: int, rng: random.Random, steps: int = 6, bound: int = 3):
    """Product of random elementary row operations: integer, determinant 1."""
    g = mat_identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-bound, bound) or 1
        e = mat_identity(n)
        e[i][j] = Fraction(c)
        g = mat_mul(e, g)
    return g


def conjugate_point(spec: OrbitSpec, g) -> list[Fraction]:
    """Coordinates of g A g^-1 for the diagonal representative A."""
    A = spec.representative_matrix()
    return spec.algebra.dual_coords(mat_mul(mat_mul(g, A), mat_inverse(g)))


def trace_of_minimal_polynomial(spec: OrbitSpec) -> CPoly:
    """sum_k mu_k tr(M^k) where mu(t) = sum_k mu_k t^k (p_0 = n, p_1 = 0)."""
    coeffs = [Fraction(1)]
    for a in spec.distinct_values:
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] += c
            nxt[k] -= a * c
        coeffs = nxt
    alg = spec.algebra
    d = alg.dim
    M = generic_matrix(alg)
    out = CPoly.const(d, coeffs[0] * alg.n_rank_matrix)
    P = None
    for k in range(1, len(coeffs)):
        P = M if P is None else poly_mat_mul(P, M)
        if coeffs[k]:
            out = out + poly_mat_trace(P).scale(coeffs[k])
    return out
