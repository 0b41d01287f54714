"""Exact sparse linear algebra over the rationals.

Every other part of the engine reduces to the primitives here: kernels,
column spaces, quotients with explicit projection/section pairs, and exact
linear solves.  All arithmetic is exact; there is no tolerance anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as Q

ZERO = Q(0)
ONE = Q(1)


def rat(x) -> Q:
    """Coerce ints, strings like '3/2', and rationals to the scalar type."""
    if isinstance(x, str):
        return Q(x)
    return Q(x)


def _bitsize(v) -> int:
    # pivot weight: total bit length of numerator and denominator
    return v.numerator.bit_length() + v.denominator.bit_length()


class Matrix:
    """Immutable sparse rational matrix, stored row-wise as {col: value} dicts.

    Zero entries are never stored.  Rows and columns are 0-indexed.
    """

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows=None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative matrix dimension")
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [dict() for _ in range(nrows)]
        self.rows = rows

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zeros(nrows: int, ncols: int) -> "Matrix":
        return Matrix(nrows, ncols)

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix(n, n, [{i: ONE} for i in range(n)])

    @staticmethod
    def from_rows(data) -> "Matrix":
        """Build from a dense list of row lists."""
        nrows = len(data)
        ncols = len(data[0]) if data else 0
        rows = []
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            rows.append({j: rat(v) for j, v in enumerate(r) if rat(v) != 0})
        return Matrix(nrows, ncols, rows)

    @staticmethod
    def from_triplets(nrows: int, ncols: int, triplets) -> "Matrix":
        m = Matrix(nrows, ncols)
        for i, j, v in triplets:
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise ValueError(f"entry ({i},{j}) out of bounds for {nrows}x{ncols}")
            v = rat(v)
            if v != 0:
                m.rows[i][j] = v
        return m

    @staticmethod
    def from_columns(ncols_ambient: int, columns) -> "Matrix":
        """Columns given as sparse dicts or dense lists of length ncols_ambient."""
        m = Matrix(ncols_ambient, len(columns))
        for j, col in enumerate(columns):
            items = col.items() if isinstance(col, dict) else enumerate(col)
            for i, v in items:
                v = rat(v)
                if v != 0:
                    m.rows[i][j] = v
        return m

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)

    def entry(self, i: int, j: int) -> Q:
        return self.rows[i].get(j, ZERO)

    def triplets(self):
        for i in range(self.nrows):
            for j in sorted(self.rows[i]):
                yield i, j, self.rows[i][j]

    def column(self, j: int) -> dict:
        return {i: self.rows[i][j] for i in range(self.nrows) if j in self.rows[i]}

    def columns(self):
        cols = [dict() for _ in range(self.ncols)]
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                cols[j][i] = v
        return cols

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.nrows, self.ncols, tuple(tuple(sorted(r.items())) for r in self.rows)))

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, nnz={sum(len(r) for r in self.rows)})"

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch in add")
        rows = []
        for a, b in zip(self.rows, other.rows):
            r = dict(a)
            for j, v in b.items():
                s = r.get(j, ZERO) + v
                if s == 0:
                    r.pop(j, None)
                else:
                    r[j] = s
            rows.append(r)
        return Matrix(self.nrows, self.ncols, rows)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(Q(-1))

    def __neg__(self) -> "Matrix":
        return self.scale(Q(-1))

    def scale(self, c) -> "Matrix":
        c = rat(c)
        if c == 0:
            return Matrix(self.nrows, self.ncols)
        return Matrix(self.nrows, self.ncols, [{j: c * v for j, v in r.items()} for r in self.rows])

    def __mul__(self, other: "Matrix") -> "Matrix":
        """Matrix product self @ other."""
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch in mul: {self.ncols} vs {other.nrows}")
        rows = []
        orows = other.rows
        for a in self.rows:
            acc: dict = {}
            for k, va in a.items():
                for j, vb in orows[k].items():
                    s = acc.get(j, ZERO) + va * vb
                    if s == 0:
                        acc.pop(j, None)
                    else:
                        acc[j] = s
            rows.append(acc)
        return Matrix(self.nrows, other.ncols, rows)

    def apply(self, vec) -> list:
        """Apply to a dense vector (list of scalars), return dense vector."""
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        out = []
        for r in self.rows:
            s = ZERO
            for j, v in r.items():
                if vec[j] != 0:
                    s += v * vec[j]
            out.append(s)
        return out

    def transpose(self) -> "Matrix":
        rows = [dict() for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                rows[j][i] = v
        return Matrix(self.ncols, self.nrows, rows)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch in hstack")
        off = self.ncols
        rows = [dict(a) for a in self.rows]
        for i, b in enumerate(other.rows):
            for j, v in b.items():
                rows[i][j + off] = v
        return Matrix(self.nrows, self.ncols + other.ncols, rows)

    def take_columns(self, js) -> "Matrix":
        pos = {j: k for k, j in enumerate(js)}
        rows = []
        for r in self.rows:
            rows.append({pos[j]: v for j, v in r.items() if j in pos})
        return Matrix(self.nrows, len(js), rows)

    def take_rows(self, ix) -> "Matrix":
        return Matrix(len(ix), self.ncols, [dict(self.rows[i]) for i in ix])

    # -- elimination core --------------------------------------------------

    def _eliminate(self, block: int | None = None):
        """Full Gauss-Jordan elimination by row operations only.

        Pivots are chosen with the smallest numerator+denominator bit length
        to bound coefficient growth; ties break on the lowest (row, col).
        With `block`, pivots are exhausted among columns < block before any
        later column is eligible (used to quotient by a leading sub-block).
        Returns (rows, pivots) where pivots is a list of (row, col) pairs and
        each pivot column has a single remaining entry.
        """
        rows = [dict(r) for r in self.rows]
        pivots = []
        done = set()
        phases = (block, None) if block is not None else (None,)
        for limit in phases:
            # cached best eligible entry per candidate row: (weight, col)
            best = {}
            for i, r in enumerate(rows):
                if i in done or not r:
                    continue
                cand = [(_bitsize(v), j) for j, v in r.items() if limit is None or j < limit]
                if cand:
                    best[i] = min(cand)
            while best:
                pi = min(best, key=lambda i: (best[i][0], i, best[i][1]))
                pj = best[pi][1]
                piv = rows[pi][pj]
                pitems = list(rows[pi].items())
                for i in range(self.nrows):
                    if i == pi:
                        continue
                    r = rows[i]
                    c = r.get(pj)
                    if c is None:
                        continue
                    f = c / piv
                    for j, v in pitems:
                        s = r.get(j, ZERO) - f * v
                        if s == 0:
                            r.pop(j, None)
                        else:
                            r[j] = s
                    if i in best:
                        cand = [(_bitsize(v), j) for j, v in r.items() if limit is None or j < limit]
                        if cand:
                            best[i] = min(cand)
                        else:
                            del best[i]
                del best[pi]
                done.add(pi)
                pivots.append((pi, pj))
        return rows, pivots

    def rank(self) -> int:
        return len(self._eliminate()[1])

    def kernel(self) -> "Matrix":
        """Basis of the null space; columns are the basis vectors."""
        rows, pivots = self._eliminate()
        pivot_cols = {j for _, j in pivots}
        free = [j for j in range(self.ncols) if j not in pivot_cols]
        basis = []
        for j in free:
            vec = {j: ONE}
            for pi, pj in pivots:
                c = rows[pi].get(j)
                if c is not None:
                    vec[pj] = -c / rows[pi][pj]
            basis.append(vec)
        return Matrix.from_columns(self.ncols, basis)

    def image(self) -> "Matrix":
        """Basis of the column space, as columns of the original matrix."""
        _, pivots = self._eliminate()
        cols = sorted(j for _, j in pivots)
        return self.take_columns(cols)

    def solve_many(self, rhs: "Matrix"):
        """Solve self @ X = rhs for all columns at once; None if unsolvable."""
        if rhs.nrows != self.nrows:
            raise ValueError("rhs row count mismatch")
        aug = self.hstack(rhs)
        rows, pivots = aug._eliminate()
        n = self.ncols
        # pivots in the rhs block mean some column is inconsistent
        piv_by_row = {}
        for pi, pj in pivots:
            if pj >= n:
                return None
            piv_by_row[pi] = pj
        for i in range(self.nrows):
            if i not in piv_by_row and rows[i]:
                # zero left part but nonzero rhs part
                return None
        sol = Matrix(n, rhs.ncols)
        for pi, pj in pivots:
            piv = rows[pi][pj]
            for j, v in rows[pi].items():
                if j >= n:
                    sol.rows[pj][j - n] = v / piv
        return sol

    def solve(self, vec):
        """Solve self @ x = vec for a dense vector; None if unsolvable."""
        rhs = Matrix.from_columns(self.nrows, [list(vec)])
        s = self.solve_many(rhs)
        if s is None:
            return None
        return [s.entry(i, 0) for i in range(self.ncols)]


@dataclass(frozen=True)
class Subspace:
    """A subspace of k^ambient_dim presented by an independent column basis."""

    ambient_dim: int
    basis: Matrix

    def __post_init__(self):
        if self.basis.nrows != self.ambient_dim:
            raise ValueError("basis rows must equal ambient dimension")

    @staticmethod
    def from_span(ambient_dim: int, span: Matrix) -> "Subspace":
        return Subspace(ambient_dim, span.image())

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, Matrix(ambient_dim, 0))

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, Matrix.identity(ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.ncols

    def contains_vector(self, vec) -> bool:
        return self.basis.solve(vec) is not None

    def contains(self, other: "Subspace") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("ambient mismatch")
        return self.basis.solve_many(other.basis) is not None

    def equals(self, other: "Subspace") -> bool:
        return self.dim == other.dim and self.contains(other) and other.contains(self)

    def sum(self, other: "Subspace") -> "Subspace":
        return Subspace.from_span(self.ambient_dim, self.basis.hstack(other.basis))

    def intersect(self, other: "Subspace") -> "Subspace":
        # null space of [U | -V]; the U-part of each kernel vector lands in both
        stacked = self.basis.hstack(other.basis.scale(Q(-1)))
        ker = stacked.kernel()
        u_part = ker.take_rows(range(self.dim))
        return Subspace.from_span(self.ambient_dim, self.basis * u_part)


def kernel(m: Matrix) -> Subspace:
    return Subspace(m.ncols, m.kernel())


def image(m: Matrix) -> Subspace:
    return Subspace(m.nrows, m.image())


def quotient(ambient_dim: int, sub: Subspace):
    """Quotient of k^ambient_dim by a subspace.

    Returns (dim, projection, section) with projection @ section = identity
    on the quotient and kernel(projection) = sub.  The section's columns are
    standard basis vectors completing sub to a basis of the ambient space.
    """
    if sub.ambient_dim != ambient_dim:
        raise ValueError("subspace ambient dimension mismatch")
    ext = sub.basis.hstack(Matrix.identity(ambient_dim))
    _, pivots = ext._eliminate()
    comp_cols = sorted(j - sub.dim for _, j in pivots if j >= sub.dim)
    section = Matrix.from_columns(ambient_dim, [{j: ONE} for j in comp_cols])
    full = sub.basis.hstack(section)
    coords = full.solve_many(Matrix.identity(ambient_dim))
    if coords is None:
        raise ValueError("internal: completed basis is not a basis")
    projection = coords.take_rows(range(sub.dim, sub.dim + len(comp_cols)))
    return len(comp_cols), projection, section


def preimage_solve(m: Matrix, target):
    """A vector x with m @ x = target, or None when no solution exists."""
    if len(target) != m.nrows:
        raise ValueError("target length must equal row count")
    return m.solve(target)


def express_in(basis: Matrix, vecs: Matrix):
    """Coordinates of the columns of vecs in the given column basis, or None."""
    return basis.solve_many(vecs)
