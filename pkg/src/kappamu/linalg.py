"""Small dense linear algebra over exact scalars (or floats).

Entries may be :class:`~kappamu.exact_scalar.Scalar`, ints, Fractions or
floats.  Pivoting is exact (first non-zero) for exact entries and partial
(largest magnitude, tolerance-aware) as soon as a float shows up.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InconsistentSystem, SingularSystem
from .exact_scalar import is_zero, sign

Vector = tuple


def _div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


def _is_floaty(rows) -> bool:
    return any(isinstance(x, float) for r in rows for x in r)


class Matrix:
    """Immutable rectangular matrix stored as a tuple of row tuples."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(r) for r in rows)
        if not rows:
            raise ValueError("matrix needs at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix rows")
        self.rows = rows

    # -- construction ------------------------------------------------------
    @classmethod
    def identity(cls, n: int, one=1) -> "Matrix":
        return cls([[one if i == j else 0 * one for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, m: int, n: int) -> "Matrix":
        return cls([[0] * n for _ in range(m)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "Matrix":
        return cls(zip(*cols))

    @classmethod
    def outer(cls, u: Sequence, v: Sequence) -> "Matrix":
        return cls([[a * b for b in v] for a in u])

    # -- shape / access ----------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> Vector:
        return self.rows[i]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vector]:
        return [self.col(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Matrix":
        return Matrix(zip(*self.rows))

    def map(self, f) -> "Matrix":
        return Matrix([[f(x) for x in r] for r in self.rows])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix([[self.rows[i][j] for j in cols] for i in rows])

    # -- algebra -----------------------------------------------------------
    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Matrix":
        return self.map(lambda x: -x)

    def __mul__(self, c) -> "Matrix":
        if isinstance(c, Matrix):
            return NotImplemented
        return self.map(lambda x: x * c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return Matrix([[dot(r, c) for c in cols] for r in self.rows])
        v = tuple(other)
        if len(v) != self.ncols:
            raise ValueError(f"shape mismatch {self.shape} @ vector({len(v)})")
        return tuple(dot(r, v) for r in self.rows)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def trace(self):
        return sum((self.rows[i][i] for i in range(min(self.shape))), 0)

    def __pow__(self, n: int) -> "Matrix":
        out = Matrix.identity(self.nrows)
        for _ in range(n):
            out = out @ self
        return out

    # -- predicates --------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def is_zero(self) -> bool:
        return all(is_zero(x) for r in self.rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            is_zero(self.rows[i][j] - self.rows[j][i])
            for i in range(self.nrows)
            for j in range(i)
        )

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix([{body}])"

    # -- elimination -------------------------------------------------------
    def rref(self) -> tuple["Matrix", list[int]]:
        """Reduced row echelon form and pivot columns."""
        rows = [list(r) for r in self.rows]
        floaty = _is_floaty(rows)
        m, n = len(rows), len(rows[0])
        pivots: list[int] = []
        r = 0
        for c in range(n):
            if r == m:
                break
            p = _choose_pivot(rows, r, c, floaty)
            if p is None:
                continue
            rows[r], rows[p] = rows[p], rows[r]
            inv = _div(1, rows[r][c])
            rows[r] = [x * inv if x else x for x in rows[r]]
            rows[r][c] = 1.0 if floaty else 1
            for i in range(m):
                if i != r and not is_zero(rows[i][c]):
                    f = rows[i][c]
                    rows[i] = [a - f * b if b else a for a, b in zip(rows[i], rows[r])]
                    rows[i][c] = 0.0 if floaty else 0
            pivots.append(c)
            r += 1
        if floaty:
            rows = [[0.0 if is_zero(x) else x for x in row] for row in rows]
        return Matrix(rows), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list[Vector]:
        """Basis of the kernel, one vector per free column (free entry = 1)."""
        R, pivots = self.rref()
        n = self.ncols
        one = 1.0 if _is_floaty(self.rows) else 1
        basis = []
        for free in (j for j in range(n) if j not in pivots):
            v = [0 * one] * n
            v[free] = one
            for i, pc in enumerate(pivots):
                v[pc] = -R[i, free]
            basis.append(tuple(v))
        return basis

    def det(self):
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        rows = [list(r) for r in self.rows]
        floaty = _is_floaty(rows)
        n = len(rows)
        out = 1
        for c in range(n):
            p = _choose_pivot(rows, c, c, floaty)
            if p is None:
                return 0.0 if floaty else 0
            if p != c:
                rows[c], rows[p] = rows[p], rows[c]
                out = -out
            out = out * rows[c][c]
            for i in range(c + 1, n):
                if not is_zero(rows[i][c]):
                    f = _div(rows[i][c], rows[c][c])
                    rows[i] = [a - f * b if b else a for a, b in zip(rows[i], rows[c])]
        return out

    def inverse(self) -> "Matrix":
        n = self.nrows
        if not self.is_square():
            raise SingularSystem("inverse of a non-square matrix")
        try:
            return solve_linear(self, Matrix.identity(n))
        except InconsistentSystem:
            raise SingularSystem("matrix is singular") from None

    def leading_minors(self) -> list:
        return [self.submatrix(range(k), range(k)).det() for k in range(1, self.nrows + 1)]

    def is_positive_definite(self) -> bool:
        return self.is_symmetric() and all(sign(m) > 0 for m in self.leading_minors())


def _choose_pivot(rows, r, c, floaty):
    if floaty:
        best, arg = 0.0, None
        for i in range(r, len(rows)):
            a = abs(float(rows[i][c]))
            if a > best and not is_zero(rows[i][c]):
                best, arg = a, i
        return arg
    for i in range(r, len(rows)):
        if not is_zero(rows[i][c]):
            return i
    return None


@dataclass(frozen=True)
class LinearSolution:
    """Particular solution of ``A x = b`` plus a basis of the kernel of A."""

    particular: Matrix
    kernel: list

    @property
    def nullity(self) -> int:
        return len(self.kernel)


def _as_column_block(b) -> Matrix:
    if isinstance(b, Matrix):
        return b
    return Matrix([[x] for x in b])


def solve_system(A: Matrix, b) -> LinearSolution:
    """Solve a (possibly overdetermined) system exactly.

    Raises :class:`InconsistentSystem` if some right-hand side is not in the
    column space of ``A``; otherwise returns a particular solution and the
    kernel of ``A`` so callers can decide what uniqueness means to them.
    """
    B = _as_column_block(b)
    if B.nrows != A.nrows:
        raise ValueError(f"rhs has {B.nrows} rows, matrix has {A.nrows}")
    n, k = A.ncols, B.ncols
    aug = Matrix([ra + rb for ra, rb in zip(A.rows, B.rows)])
    R, pivots = aug.rref()
    if any(p >= n for p in pivots):
        bad = next(i for i, p in enumerate(pivots) if p >= n)
        raise InconsistentSystem(f"system is inconsistent (row {bad} reduces to 0 = nonzero)")
    zero = 0.0 if _is_floaty(aug.rows) else 0
    x = [[zero] * k for _ in range(n)]
    for i, pc in enumerate(pivots):
        for j in range(k):
            x[pc][j] = R[i, n + j]
    return LinearSolution(Matrix(x), A.nullspace())


def solve_linear(A: Matrix, b):
    """Unique exact solution of ``A x = b``.

    ``b`` may be a vector (returns a vector) or a Matrix of right-hand sides.
    Overdetermined systems are accepted when consistent.
    """
    sol = solve_system(A, b)
    if sol.nullity:
        raise SingularSystem(f"solution space has dimension {sol.nullity}")
    if isinstance(b, Matrix):
        return sol.particular
    return sol.particular.col(0)


# -- vectors ------------------------------------------------------------------


def dot(u: Sequence, v: Sequence):
    out = None
    for a, b in zip(u, v):
        if a and b:
            out = a * b if out is None else out + a * b
    if out is None:  # keep the scalar type of the operands
        return u[0] * v[0] * 0 if len(u) else 0
    return out


def vadd(u: Sequence, v: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u: Sequence) -> Vector:
    return tuple(c * a for a in u)


def vzero(n: int) -> Vector:
    return (0,) * n


def basis_vector(n: int, i: int, one=1) -> Vector:
    return tuple(one if j == i else 0 * one for j in range(n))


def vec_is_zero(u: Sequence) -> bool:
    return all(is_zero(a) for a in u)


def combination(coeffs: Sequence, vectors: Sequence[Sequence]) -> Vector:
    n = len(vectors[0])
    out = [0] * n
    for c, v in zip(coeffs, vectors):
        if is_zero(c):
            continue
        for k in range(n):
            out[k] = out[k] + c * v[k]
    return tuple(out)


def in_span(v: Sequence, basis: Sequence[Sequence]) -> bool:
    if not basis:
        return vec_is_zero(v)
    A = Matrix.from_columns(basis)
    return Matrix.from_columns(list(basis) + [v]).rank() == A.rank()


def span_equal(a: Sequence[Sequence], b: Sequence[Sequence]) -> bool:
    if len(a) != len(b):
        return False
    return all(in_span(v, b) for v in a) and all(in_span(v, a) for v in b)


def bilinear(G: Matrix, u: Sequence, v: Sequence):
    return dot(u, G @ v)


def gram(G: Matrix, basis: Sequence[Sequence]) -> Matrix:
    return Matrix([[bilinear(G, u, v) for v in basis] for u in basis])
