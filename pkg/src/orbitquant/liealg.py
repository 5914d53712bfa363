"""sl(n) structure data, brackets, Killing form and invariant polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactnum import HPoly
from .polyring import CPoly, DimensionMismatch, IndexOutOfRange, var_monomial

Matrix = list  # list of rows of Fractions


class InvalidRank(ValueError):
    pass


# -- small exact matrix helpers ---------------------------------------------


def mat_zero(n: int, m: int | None = None) -> Matrix:
    return [[Fraction(0)] * (n if m is None else m) for _ in range(n)]


def mat_identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in a]


def mat_add(a: Matrix, b: Matrix, s=1) -> Matrix:
    return [[x + s * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, s) -> Matrix:
    return [[x * s for x in row] for row in a]


def mat_trace(a: Matrix):
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def mat_commutator(a: Matrix, b: Matrix) -> Matrix:
    return mat_add(mat_mul(a, b), mat_mul(b, a), -1)


def mat_inverse(a: Matrix) -> Matrix:
    """Gauss-Jordan inverse over Q."""
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def mat_rank(rows: list[list[Fraction]]) -> int:
    rows = [list(r) for r in rows if any(r)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(rank + 1, len(rows)):
            if rows[r][col]:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def elementary(n: int, i: int, j: int) -> Matrix:
    m = mat_zero(n)
    m[i][j] = Fraction(1)
    return m


# -- Lie algebra data ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LieAlgebraData:
    """A matrix Lie algebra with a fixed ordered basis.

    ``structure_constants[(i, j)]`` is a dict ``{k: c_ij^k}`` with only
    nonzero entries; pairs with zero bracket are absent.
    """

    name: str
    n_rank_matrix: int
    basis_labels: tuple
    defining_rep: tuple
    structure_constants: dict
    trace_dual: tuple

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @property
    def variables(self) -> list[str]:
        return ["x" + s for s in self.basis_labels]

    @property
    def pbw_names(self) -> list[str]:
        return ["X" + s for s in self.basis_labels]

    def c(self, i: int, j: int, k: int) -> Fraction:
        return self.structure_constants.get((i, j), {}).get(k, Fraction(0))

    def coords_of_matrix(self, m: Matrix) -> list[Fraction]:
        """Coordinates of a traceless matrix in the basis."""
        return _decompose(self.n_rank_matrix, m, self._index)

    def matrix_of_coords(self, v: Sequence) -> Matrix:
        self._check_vec(v)
        out = mat_zero(self.n_rank_matrix)
        for c, b in zip(v, self.defining_rep):
            if c:
                out = mat_add(out, b, Fraction(c))
        return out

    def dual_coords(self, m: Matrix) -> list[Fraction]:
        """Coordinates x_j = tr(m X_j) of the functional attached to ``m``."""
        return [mat_trace(mat_mul(m, b)) for b in self.defining_rep]

    @property
    def _index(self) -> dict:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {lab: i for i, lab in enumerate(self.basis_labels)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def index(self, label: str) -> int:
        return self._index[label]

    def _check_vec(self, v):
        if len(v) != self.dim:
            raise DimensionMismatch(f"vector of length {len(v)}, algebra has dimension {self.dim}")


def _sl_labels(n: int) -> list[tuple[str, tuple]]:
    """Basis order: E_ij (i<j), then E_ij (i>j), both row-major, then H_k."""
    out = []
    upper = [(i, j) for i in range(n) for j in range(n) if i < j]
    lower = [(i, j) for i in range(n) for j in range(n) if i > j]
    if n == 2:
        return [("E", ("e", 0, 1)), ("F", ("e", 1, 0)), ("H", ("h", 0))]
    for i, j in upper + lower:
        out.append((f"E{i + 1}{j + 1}" if n < 10 else f"E{i + 1}_{j + 1}", ("e", i, j)))
    for k in range(n - 1):
        out.append((f"H{k + 1}", ("h", k)))
    return out


def _decompose(n: int, m: Matrix, index: dict | None, kinds=None) -> list[Fraction]:
    if kinds is None:
        kinds = [k for _, k in _sl_labels(n)]
    pos = {k: i for i, k in enumerate(kinds)}
    v = [Fraction(0)] * len(kinds)
    for i in range(n):
        for j in range(n):
            if i != j and m[i][j]:
                v[pos[("e", i, j)]] = Fraction(m[i][j])
    acc = Fraction(0)
    for k in range(n - 1):
        acc += m[k][k]
        v[pos[("h", k)]] = acc
    if acc + m[n - 1][n - 1] != 0:
        raise ValueError("matrix is not traceless")
    return v


def make_sl(n: int) -> LieAlgebraData:
    if not isinstance(n, int) or n < 2:
        raise InvalidRank(f"sl(n) needs n >= 2, got {n}")
    labeled = _sl_labels(n)
    kinds = [k for _, k in labeled]
    mats = []
    for kind in kinds:
        if kind[0] == "e":
            mats.append(elementary(n, kind[1], kind[2]))
        else:
            k = kind[1]
            m = mat_zero(n)
            m[k][k] = Fraction(1)
            m[k + 1][k + 1] = Fraction(-1)
            mats.append(m)
    sc: dict = {}
    for i, a in enumerate(mats):
        for j, b in enumerate(mats):
            v = _decompose(n, mat_commutator(a, b), None, kinds)
            row = {k: c for k, c in enumerate(v) if c}
            if row:
                sc[(i, j)] = row
    # trace-dual basis: E_ij -> E_ji; Cartan part via the inverse Gram matrix
    ncart = n - 1
    gram = [[mat_trace(mat_mul(mats[len(mats) - ncart + a], mats[len(mats) - ncart + b]))
             for b in range(ncart)] for a in range(ncart)]
    ginv = mat_inverse(gram)
    duals = []
    for kind in kinds:
        if kind[0] == "e":
            duals.append(elementary(n, kind[2], kind[1]))
        else:
            a = kind[1]
            d = mat_zero(n)
            for b in range(ncart):
                d = mat_add(d, mats[len(mats) - ncart + b], ginv[a][b])
            duals.append(d)
    name = f"sl{n}"
    return LieAlgebraData(
        name=name,
        n_rank_matrix=n,
        basis_labels=tuple(lab for lab, _ in labeled),
        defining_rep=tuple(mats),
        structure_constants=sc,
        trace_dual=tuple(duals),
    )


def algebra_by_name(name: str) -> LieAlgebraData:
    s = name.strip().lower().replace("(", "").replace(")", "")
    if not s.startswith("sl"):
        raise ValueError(f"unknown algebra {name!r}; only sl(n) is supported")
    try:
        n = int(s[2:])
    except ValueError:
        raise ValueError(f"unknown algebra {name!r}") from None
    return make_sl(n)


def bracket(alg: LieAlgebraData, x: Sequence, y: Sequence) -> list[Fraction]:
    alg._check_vec(x)
    alg._check_vec(y)
    out = [Fraction(0)] * alg.dim
    for (i, j), row in alg.structure_constants.items():
        if x[i] and y[j]:
            s = Fraction(x[i]) * Fraction(y[j])
            for k, c in row.items():
                out[k] += s * c
    return out


def jacobi_defects(alg: LieAlgebraData) -> list[tuple]:
    """Index triples (i, j, k) where the Jacobi sum of structure constants is nonzero."""
    d = alg.dim
    bad = []
    for i in range(d):
        for j in range(d):
            for k in range(d):
                acc = [Fraction(0)] * d
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    for m, v in alg.structure_constants.get((b, c), {}).items():
                        for q, w in alg.structure_constants.get((a, m), {}).items():
                            acc[q] += v * w
                if any(acc):
                    bad.append((i, j, k))
    return bad


def structure_defects(alg: LieAlgebraData) -> list[tuple]:
    """Pairs (i, j) where [X_i, X_j] in the defining representation differs
    from sum_k c_ij^k X_k."""
    bad = []
    for i, a in enumerate(alg.defining_rep):
        for j, b in enumerate(alg.defining_rep):
            rhs = mat_zero(alg.n_rank_matrix)
            for k, c in alg.structure_constants.get((i, j), {}).items():
                rhs = mat_add(rhs, alg.defining_rep[k], c)
            if mat_commutator(a, b) != rhs:
                bad.append((i, j))
    return bad


def ad_matrix(alg: LieAlgebraData, i: int) -> Matrix:
    """Column j is bracket(e_i, e_j)."""
    if not 0 <= i < alg.dim:
        raise IndexOutOfRange(f"basis index {i} outside 0..{alg.dim - 1}")
    m = mat_zero(alg.dim)
    for j in range(alg.dim):
        for k, c in alg.structure_constants.get((i, j), {}).items():
            m[k][j] = c
    return m


def ad_of_vector(alg: LieAlgebraData, x: Sequence) -> Matrix:
    alg._check_vec(x)
    m = mat_zero(alg.dim)
    for i, xi in enumerate(x):
        if xi:
            m = mat_add(m, ad_matrix(alg, i), Fraction(xi))
    return m


def killing_form(alg: LieAlgebraData, x: Sequence, y: Sequence) -> Fraction:
    return mat_trace(mat_mul(ad_of_vector(alg, x), ad_of_vector(alg, y)))


def unit_vector(alg: LieAlgebraData, i: int) -> list[Fraction]:
    return [Fraction(int(k == i)) for k in range(alg.dim)]


def generic_matrix(alg: LieAlgebraData) -> list[list[CPoly]]:
    """M(x) = sum_i x_i X_i^dual, so that tr(M(x) X_j) = x_j."""
    n, d = alg.n_rank_matrix, alg.dim
    out = [[CPoly.zero(d) for _ in range(n)] for _ in range(n)]
    for i, dual in enumerate(alg.trace_dual):
        mono = var_monomial(d, i)
        for r in range(n):
            for c in range(n):
                if dual[r][c]:
                    out[r][c] = out[r][c] + CPoly._raw(d, {mono: HPoly.const(dual[r][c])})
    return out


def poly_mat_mul(a, b):
    n = len(a)
    d = a[0][0].nvars
    out = [[CPoly.zero(d) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = CPoly.zero(d)
            for k in range(n):
                if a[i][k] and b[k][j]:
                    acc = acc + a[i][k] * b[k][j]
            out[i][j] = acc
    return out


def poly_mat_trace(a) -> CPoly:
    acc = CPoly.zero(a[0][0].nvars)
    for i in range(len(a)):
        acc = acc + a[i][i]
    return acc


@dataclass(frozen=True)
class InvariantSet:
    generators: tuple
    degrees: tuple


def invariants(alg: LieAlgebraData) -> InvariantSet:
    """Power traces p_k = tr(M(x)^k), k = 2..n."""
    M = generic_matrix(alg)
    gens = []
    P = M
    for k in range(2, alg.n_rank_matrix + 1):
        P = poly_mat_mul(P, M)
        gens.append(poly_mat_trace(P))
    return InvariantSet(tuple(gens), tuple(range(2, alg.n_rank_matrix + 1)))


def adjoint_charpoly_invariants(alg: LieAlgebraData) -> list[CPoly]:
    """Coefficients q_i of det(t - ad_{M(x)}) for i = 0..dim-1.

    Computed with the Faddeev-LeVerrier recursion on the symbolic adjoint
    matrix; only sensible for small algebras.
    """
    d = alg.dim
    # coordinates of the dual matrices in the basis
    dual_coords = [alg.coords_of_matrix(m) for m in alg.trace_dual]
    A = [[CPoly.zero(d) for _ in range(d)] for _ in range(d)]
    for i, coords in enumerate(dual_coords):
        ad = ad_of_vector(alg, coords)
        mono = var_monomial(d, i)
        for r in range(d):
            for c in range(d):
                if ad[r][c]:
                    A[r][c] = A[r][c] + CPoly._raw(d, {mono: HPoly.const(ad[r][c])})
    # det(tI - A) = sum_k c_k t^(d-k), c_0 = 1
    coeffs = [CPoly.const(d, 1)]
    Mk = [[CPoly.zero(d) for _ in range(d)] for _ in range(d)]
    ident = [[CPoly.const(d, int(i == j)) for j in range(d)] for i in range(d)]
    for k in range(1, d + 1):
        prev = [[Mk[i][j] + ident[i][j] * coeffs[-1] for j in range(d)] for i in range(d)]
        Mk = poly_mat_mul(A, prev)
        coeffs.append(poly_mat_trace(Mk).scale(Fraction(-1, k)))
    # q_i multiplies t^i
    return [coeffs[d - i] for i in range(d)]
