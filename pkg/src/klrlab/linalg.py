"""Exact dense linear algebra over duck-typed fields, plus a small sparse
matrix type used for generator actions.

Field elements only need +, -, *, /, ==, bool (nonzero test). Fraction, Rq
and Rz all qualify.
"""

from __future__ import annotations

from fractions import Fraction


class SMat:
    """Sparse matrix stored column-major: cols[j] = {i: value}."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int, cols=None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols: list[dict] = [dict() for _ in range(ncols)] if cols is None else cols

    @classmethod
    def identity(cls, n: int, one):
        m = cls(n, n)
        for j in range(n):
            m.cols[j][j] = one
        return m

    def set(self, i: int, j: int, v):
        if v:
            self.cols[j][i] = v
        else:
            self.cols[j].pop(i, None)

    def get(self, i: int, j: int, zero=Fraction(0)):
        return self.cols[j].get(i, zero)

    def is_zero(self) -> bool:
        return all(not c for c in self.cols)

    def apply(self, vec: dict):
        """Matrix times sparse column vector {index: value}."""
        out: dict = {}
        for j, v in vec.items():
            if not v:
                continue
            for i, a in self.cols[j].items():
                w = out.get(i)
                w = a * v if w is None else w + a * v
                if w:
                    out[i] = w
                else:
                    out.pop(i, None)
        return out

    def compose(self, other: "SMat") -> "SMat":
        """self @ other."""
        if other.nrows != self.ncols:
            raise ValueError("shape mismatch")
        out = SMat(self.nrows, other.ncols)
        for j in range(other.ncols):
            out.cols[j] = self.apply(other.cols[j])
        return out

    def __add__(self, other: "SMat") -> "SMat":
        out = SMat(self.nrows, self.ncols)
        for j in range(self.ncols):
            col = dict(self.cols[j])
            for i, v in other.cols[j].items():
                w = col.get(i)
                w = v if w is None else w + v
                if w:
                    col[i] = w
                else:
                    col.pop(i, None)
            out.cols[j] = col
        return out

    def __neg__(self) -> "SMat":
        out = SMat(self.nrows, self.ncols)
        for j in range(self.ncols):
            out.cols[j] = {i: -v for i, v in self.cols[j].items()}
        return out

    def __sub__(self, other: "SMat") -> "SMat":
        return self + (-other)

    def scale(self, s) -> "SMat":
        out = SMat(self.nrows, self.ncols)
        if s:
            for j in range(self.ncols):
                out.cols[j] = {i: v * s for i, v in self.cols[j].items()}
        return out

    def map_values(self, f) -> "SMat":
        out = SMat(self.nrows, self.ncols)
        for j in range(self.ncols):
            col = {}
            for i, v in self.cols[j].items():
                w = f(v)
                if w:
                    col[i] = w
            out.cols[j] = col
        return out

    def transpose(self) -> "SMat":
        out = SMat(self.ncols, self.nrows)
        for j in range(self.ncols):
            for i, v in self.cols[j].items():
                out.cols[i][j] = v
        return out

    def to_dense(self, zero=Fraction(0)):
        rows = [[zero] * self.ncols for _ in range(self.nrows)]
        for j in range(self.ncols):
            for i, v in self.cols[j].items():
                rows[i][j] = v
        return rows

    def entries(self):
        for j in range(self.ncols):
            for i, v in self.cols[j].items():
                yield i, j, v

    def __eq__(self, other):
        if not isinstance(other, SMat):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        for j in range(self.ncols):
            a, b = self.cols[j], other.cols[j]
            keys = set(a) | set(b)
            for i in keys:
                va, vb = a.get(i), b.get(i)
                if va is None:
                    if vb:
                        return False
                elif vb is None:
                    if va:
                        return False
                elif va != vb:
                    return False
        return True

    def __hash__(self):
        raise TypeError("SMat is mutable during construction; not hashable")


# ---------------------------------------------------------------------------
# Dense exact elimination
# ---------------------------------------------------------------------------


def _clone(rows):
    return [list(r) for r in rows]


def row_echelon(rows):
    """In-place style row echelon over a field; returns (echelon, pivots).

    pivots is the list of pivot column indices in order.
    """
    m = _clone(rows)
    nr = len(m)
    nc = len(m[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        pivot = None
        for i in range(r, nr):
            if m[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv_head = m[r][c]
        m[r] = [v / inv_head for v in m[r]]
        for i in range(nr):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return m, pivots


def rank(rows) -> int:
    if not rows or not rows[0]:
        return 0
    return len(row_echelon(rows)[1])


def nullspace(rows):
    """Basis of the right kernel, as a list of coordinate lists."""
    if not rows:
        return []
    nc = len(rows[0])
    ech, pivots = row_echelon(rows)
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [None] * nc
        one = None
        # find a field one: derive from any nonzero entry
        for r in ech:
            for v in r:
                if v:
                    one = v / v
                    break
            if one is not None:
                break
        if one is None:
            one = Fraction(1)
        zero = one - one
        for c in range(nc):
            vec[c] = zero
        vec[fcol] = one
        for r_idx, pcol in enumerate(pivots):
            vec[pcol] = -ech[r_idx][fcol]
        basis.append(vec)
    return basis


def column_space_pivots(rows):
    """Indices of a maximal independent set of columns."""
    return row_echelon(rows)[1]


def solve(rows, rhs):
    """Solve A x = b exactly; returns one solution or None if inconsistent.

    rhs may be a single column (list) or a matrix (list of columns).
    """
    single = rhs and not isinstance(rhs[0], list)
    cols = [rhs] if single else rhs
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    aug = [list(rows[i]) + [col[i] for col in cols] for i in range(nr)]
    ech, pivots = row_echelon(aug)
    # pivots in the rhs region mean inconsistency
    if any(p >= nc for p in pivots):
        return None
    sols = []
    one = None
    for r in ech:
        for v in r:
            if v:
                one = v / v
                break
        if one is not None:
            break
    if one is None:
        one = Fraction(1)
    zero = one - one
    for k in range(len(cols)):
        x = [zero] * nc
        for r_idx, pcol in enumerate(pivots):
            x[pcol] = ech[r_idx][nc + k]
        sols.append(x)
    return sols[0] if single else sols


def invert(rows):
    """Exact inverse of a square matrix; None if singular."""
    n = len(rows)
    one = None
    for r in rows:
        for v in r:
            if v:
                one = v / v
                break
        if one is not None:
            break
    if one is None:
        return None
    zero = one - one
    eye = [[one if i == j else zero for i in range(n)] for j in range(n)]
    sols = solve(rows, eye)
    if sols is None:
        return None
    if rank(rows) < n:
        return None
    # sols[j] is the j-th column of the inverse
    return [[sols[j][i] for j in range(n)] for i in range(n)]


def rank_rational(rows) -> int:
    """Fraction-free (Bareiss) rank for rational matrices; faster on Q."""
    if not rows or not rows[0]:
        return 0
    # clear denominators to integers
    m = []
    for r in rows:
        den = 1
        for v in r:
            den = den * v.denominator // _gcd(den, v.denominator)
        m.append([int(v * den) for v in r])
    nr, nc = len(m), len(m[0])
    r = 0
    prev = 1
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, nr):
            for jj in range(c + 1, nc):
                m[i][jj] = (m[i][jj] * m[r][c] - m[i][c] * m[r][jj]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
        if r == nr:
            break
    return r


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a) or 1
