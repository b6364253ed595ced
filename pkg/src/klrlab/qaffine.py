"""Finite-dimensional weight modules for the cyclic type-A quantum loop
algebra: the vector representation, spectral evaluation and twisting,
coproduct tensor products, normalized spectral intertwiners with their
denominator polynomials, fusion of the minuscule modules, and an exact
operator-algebra irreducibility test.

Scalars are Rq = Q(q); spectral computations run over Rz = Q(q)(z) with a
single twist variable z carried by the right-hand tensor factor.  Cartan
actions are never stored: each basis vector records its pairing with every
coroot and the diagonal operators are rebuilt from those integers, so all
weight bookkeeping is exact by construction.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .linalg import SMat, nullspace, row_echelon, solve
from .rings import (
    MPoly,
    Rq,
    Rz,
    ZPoly,
    quantum_integer,
    ratfunc_to_text,
)

Weight = Tuple[int, ...]
Vector = Dict[int, object]


def affine_cartan(N: int) -> Tuple[Tuple[int, ...], ...]:
    """Cartan matrix of the cyclic type-A diagram on nodes 0..N-1."""
    if N < 2:
        raise ValueError("the cyclic diagram needs at least two nodes")
    rows = []
    for i in range(N):
        row = []
        for j in range(N):
            if i == j:
                row.append(2)
            else:
                row.append(-int((i - j) % N == 1) - int((j - i) % N == 1))
        rows.append(tuple(row))
    return tuple(rows)


def _lift(field, value: Rq):
    """Embed an Rq scalar into the requested scalar field."""
    if field is Rq:
        return value
    return Rz(ZPoly.const(value))


class UqAffModule:
    """A weight module with sparse raising and lowering actions.

    ``weights[j]`` lists the coroot pairings of the j-th basis vector for
    the cyclic node index i = 0..N-1 (node 0 is the affine one); the rows
    must sum to zero, which pins the level-zero setting.  ``raising[i]``
    and ``lowering[i]`` are column-sparse action matrices over ``field``
    (Rq, or Rz when a spectral variable is in play).  Instances are treated
    as immutable once constructed.
    """

    __slots__ = ("N", "labels", "weights", "raising", "lowering", "field")

    def __init__(self, N: int, labels: Sequence, weights: Sequence[Weight],
                 raising: Sequence[SMat], lowering: Sequence[SMat],
                 field=Rq):
        if N < 2:
            raise ValueError("rank must be at least two")
        self.N = N
        self.labels = tuple(labels)
        self.weights = tuple(tuple(int(x) for x in w) for w in weights)
        n = len(self.weights)
        if len(self.labels) != n:
            raise ValueError("labels and weights disagree in length")
        for w in self.weights:
            if len(w) != N:
                raise ValueError("each weight needs one entry per node")
            if sum(w) != 0:
                raise ValueError("weights must pair to zero with the center")
        raising = tuple(raising)
        lowering = tuple(lowering)
        if len(raising) != N or len(lowering) != N:
            raise ValueError("one action matrix per node expected")
        for mat in (*raising, *lowering):
            if (mat.nrows, mat.ncols) != (n, n):
                raise ValueError("action matrix shape mismatch")
        self.raising = raising
        self.lowering = lowering
        self.field = field

    def dim(self) -> int:
        return len(self.weights)

    def one(self):
        return self.field.ONE

    def zero(self):
        return self.field.ZERO

    def q_scalar(self, n: int):
        """q^n as an element of the module's scalar field."""
        return _lift(self.field, Rq.q_power(n))

    def cartan_matrix(self, i: int, power: int = 1) -> SMat:
        """Diagonal action of the i-th Cartan operator (or its inverse)."""
        out = SMat(self.dim(), self.dim())
        for j, w in enumerate(self.weights):
            out.set(j, j, self.q_scalar(power * w[i]))
        return out

    def weight_multiset(self) -> Tuple[Weight, ...]:
        return tuple(sorted(self.weights))

    def __repr__(self) -> str:
        ring = "Rq" if self.field is Rq else "Rz"
        return f"UqAffModule(N={self.N}, dim={self.dim()}, {ring})"


# ---------------------------------------------------------------------------
# Leaf modules and the basic constructions
# ---------------------------------------------------------------------------


def vector_rep(N: int) -> UqAffModule:
    """The N-dimensional module on letters u_1..u_N: the raising operator
    at node i moves u_{i+1} to u_i cyclically (u_0 means u_N) and the
    lowering operator moves it back."""
    if N < 2:
        raise ValueError("rank must be at least two")
    weights = []
    for j in range(N):
        weights.append(tuple(
            int((j + 1 - i) % N == 0) - int((j - i) % N == 0)
            for i in range(N)))
    raising = []
    lowering = []
    for i in range(N):
        e = SMat(N, N)
        f = SMat(N, N)
        e.set((i - 1) % N, i, Rq.ONE)
        f.set(i, (i - 1) % N, Rq.ONE)
        raising.append(e)
        lowering.append(f)
    labels = tuple(f"u{k}" for k in range(1, N + 1))
    return UqAffModule(N, labels, weights, raising, lowering)


def trivial_rep(N: int) -> UqAffModule:
    """The one-dimensional module on which every node acts by zero."""
    z = SMat(1, 1)
    return UqAffModule(N, ("1",), ((0,) * N,),
                       tuple(z for _ in range(N)),
                       tuple(z for _ in range(N)))


def zero_rep(N: int) -> UqAffModule:
    """The zero module: empty basis, empty actions."""
    empty = SMat(0, 0)
    return UqAffModule(N, (), (),
                       tuple(empty for _ in range(N)),
                       tuple(empty for _ in range(N)))


def evaluate_at(module: UqAffModule, c: Rq) -> UqAffModule:
    """Rescale the affine-node actions by the unit c (raising by c,
    lowering by 1/c); composing two rescalings multiplies the units."""
    if module.field is not Rq:
        raise TypeError("only Rq modules can be evaluated")
    if not isinstance(c, Rq) or c.is_zero():
        raise ValueError("evaluation parameter must be a nonzero Rq unit")
    raising = list(module.raising)
    lowering = list(module.lowering)
    raising[0] = raising[0].scale(c)
    lowering[0] = lowering[0].scale(Rq.ONE / c)
    return UqAffModule(module.N, module.labels, module.weights,
                       raising, lowering)


def lift_spectral(module: UqAffModule) -> UqAffModule:
    """Re-express an Rq module over Rz without changing any action."""
    if module.field is Rz:
        return module

    def lift(v):
        return _lift(Rz, v)

    return UqAffModule(module.N, module.labels, module.weights,
                       [m.map_values(lift) for m in module.raising],
                       [m.map_values(lift) for m in module.lowering],
                       field=Rz)


def affinization(module: UqAffModule) -> UqAffModule:
    """Attach the spectral variable: over Rz, the affine-node raising
    action is scaled by z and the lowering action by 1/z."""
    base = lift_spectral(module)
    zv = Rz(ZPoly.gen())
    raising = list(base.raising)
    lowering = list(base.lowering)
    raising[0] = raising[0].scale(zv)
    lowering[0] = lowering[0].scale(Rz.ONE / zv)
    return UqAffModule(base.N, base.labels, base.weights,
                       raising, lowering, field=Rz)


def tensor(left: UqAffModule, right: UqAffModule) -> UqAffModule:
    """Tensor product via the coproduct: the raising operator acts as
    e (x) K^{-1} + 1 (x) e and the lowering one as f (x) 1 + K (x) f.
    Basis order is left-major: (a, b) -> a * dim(right) + b."""
    if left.N != right.N:
        raise ValueError("rank mismatch")
    if left.field is not right.field:
        raise TypeError("scalar fields must agree")
    N = left.N
    d1, d2 = left.dim(), right.dim()
    dim = d1 * d2
    weights = tuple(
        tuple(wa[i] + wb[i] for i in range(N))
        for wa in left.weights for wb in right.weights)
    labels = tuple((la, lb) for la in left.labels for lb in right.labels)
    raising = []
    lowering = []
    for i in range(N):
        e = SMat(dim, dim)
        f = SMat(dim, dim)
        e1, f1 = left.raising[i], left.lowering[i]
        e2, f2 = right.raising[i], right.lowering[i]
        for a in range(d1):
            ka = left.q_scalar(left.weights[a][i])
            for b in range(d2):
                j = a * d2 + b
                kb_inv = right.q_scalar(-right.weights[b][i])
                for a2, v in e1.cols[a].items():
                    e.set(a2 * d2 + b, j, v * kb_inv)
                for b2, v in e2.cols[b].items():
                    w = e.get(a * d2 + b2, j, left.zero()) + v
                    e.set(a * d2 + b2, j, w)
                for a2, v in f1.cols[a].items():
                    f.set(a2 * d2 + b, j, v)
                for b2, v in f2.cols[b].items():
                    w = f.get(a * d2 + b2, j, left.zero()) + v * ka
                    f.set(a * d2 + b2, j, w)
        raising.append(e)
        lowering.append(f)
    return UqAffModule(N, labels, weights, raising, lowering,
                       field=left.field)


def tensor_chain(modules: Sequence[UqAffModule]) -> UqAffModule:
    if not modules:
        raise ValueError("empty tensor chain")
    out = modules[0]
    for m in modules[1:]:
        out = tensor(out, m)
    return out


# ---------------------------------------------------------------------------
# Defining relations as matrix identities
# ---------------------------------------------------------------------------


class OperatorRelationReport:
    def __init__(self):
        self.failures: List[Tuple[str, Tuple]] = []
        self.checked = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, name: str, detail: Tuple) -> None:
        self.failures.append((name, detail))

    def __repr__(self) -> str:
        state = "pass" if self.ok else f"fail({len(self.failures)})"
        return f"OperatorRelationReport({state}, checked={self.checked})"


def _q_binom(m: int, r: int) -> Rq:
    num = Rq.ONE
    den = Rq.ONE
    for t in range(1, r + 1):
        num = num * Rq.from_laurent(quantum_integer(m - r + t))
        den = den * Rq.from_laurent(quantum_integer(t))
    return num / den


def _mat_power(mat: SMat, k: int, dim: int, one) -> SMat:
    out = SMat.identity(dim, one)
    for _ in range(k):
        out = mat.compose(out)
    return out


def check_uq_relations(module: UqAffModule) -> OperatorRelationReport:
    """Every defining identity of the cyclic type-A quantum loop algebra,
    verified as an exact matrix equation on the module: weight steps of the
    raising/lowering actions (equivalently their Cartan conjugation), the
    commutator pairing against the Cartan diagonal, and the braid sums for
    every pair of distinct nodes."""
    rep = OperatorRelationReport()
    N = module.N
    n = module.dim()
    cart = affine_cartan(N)
    one = module.one()
    for i in range(N):
        for sign, mat, name in ((1, module.raising[i], "raise"),
                                (-1, module.lowering[i], "lower")):
            for r, c, _v in mat.entries():
                rep.checked += 1
                step = tuple(module.weights[r][t] - module.weights[c][t]
                             for t in range(N))
                if step != tuple(sign * cart[t][i] for t in range(N)):
                    rep.record(f"{name}-weight-step", (i, r, c))
    qden = module.q_scalar(1) - module.q_scalar(-1)
    for i in range(N):
        for j in range(N):
            lhs = (module.raising[i].compose(module.lowering[j])
                   - module.lowering[j].compose(module.raising[i]))
            rhs = SMat(n, n)
            if i == j:
                for k, w in enumerate(module.weights):
                    val = (module.q_scalar(w[i])
                           - module.q_scalar(-w[i])) / qden
                    rhs.set(k, k, val)
            rep.checked += 1
            if lhs != rhs:
                rep.record("pairing", (i, j))
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            m = 1 - cart[i][j]
            for fam, name in ((module.raising, "raise-braid"),
                              (module.lowering, "lower-braid")):
                acc = SMat(n, n)
                for r in range(m + 1):
                    coef = _lift(module.field, _q_binom(m, r))
                    if r % 2:
                        coef = -coef
                    term = _mat_power(fam[i], m - r, n, one).compose(
                        fam[j]).compose(_mat_power(fam[i], r, n, one))
                    acc = acc + term.scale(coef)
                rep.checked += 1
                if not acc.is_zero():
                    rep.record(name, (i, j))
    return rep


# ---------------------------------------------------------------------------
# Pair swaps on the vector representation
# ---------------------------------------------------------------------------


def _cleared_pair_entries(N: int, one, qv, x, xp) -> Dict[Tuple[int, int], List]:
    """Pole-cleared swap on the two-letter basis, generic over the scalar
    ring of the inputs: the diagonal letter pair picks up the clearing
    factor xp - q^2 x, distinct letters keep a stay and a swap term.
    Returns a map column-pair -> [(row-pair, value), ...]."""
    q2 = qv * qv
    out: Dict[Tuple[int, int], List] = {}
    for a in range(N):
        for b in range(N):
            if a == b:
                out[(a, b)] = [((a, b), xp - q2 * x)]
            else:
                out[(a, b)] = [
                    ((a, b), (one - q2) * (xp if a > b else x)),
                    ((b, a), qv * (xp - x)),
                ]
    return out


def _normalized_pair_entries(N: int, x: Rq) -> Dict[Tuple[int, int], List]:
    """Normalized swap for (V at x) against (V carrying z), over Rz; the
    unique denominator is z - q^2 x and equal letters are fixed."""
    zv = Rz(ZPoly.gen())
    qq = _lift(Rz, Rq.q_power(1))
    xl = _lift(Rz, x)
    one = Rz.ONE
    den = zv - qq * qq * xl
    out: Dict[Tuple[int, int], List] = {}
    for a in range(N):
        for b in range(N):
            if a == b:
                out[(a, b)] = [((a, b), one)]
            else:
                stay = (one - qq * qq) * (zv if a > b else xl) / den
                swap = qq * (zv - xl) / den
                out[(a, b)] = [((a, b), stay), ((b, a), swap)]
    return out


def _embedded_pair(N: int, slots: int, slot: int,
                   entries: Dict[Tuple[int, int], List]) -> SMat:
    """Embed a two-letter pair map at the given adjacent slot pair inside
    the full tensor basis of ``slots`` letter factors."""
    if not 0 <= slot <= slots - 2:
        raise ValueError("slot out of range")
    dim = N ** slots
    stride = N ** (slots - slot - 2)
    out = SMat(dim, dim)
    for j in range(dim):
        pair = (j // stride) % (N * N)
        a, b = divmod(pair, N)
        base = j - pair * stride
        for (r1, r2), val in entries[(a, b)]:
            out.set(base + (r1 * N + r2) * stride, j, val)
    return out


def normalized_R_VV(N: int) -> SMat:
    """Spectral intertwiner V (x) V_z -> V_z (x) V normalized to fix the
    repeated-letter lines, with entries in Q(q)(z); the minimal denominator
    is z - q^2."""
    return _embedded_pair(N, 2, 0, _normalized_pair_entries(N, Rq.ONE))


def invert_spectral_variable(value: Rz) -> Rz:
    """The substitution z -> 1/z on a rational function of z."""
    if value.is_zero():
        return value
    depth = max(value.num.degree(), value.den.degree())

    def rev(p: ZPoly) -> ZPoly:
        return ZPoly(tuple(
            p.c[depth - j] if depth - j < len(p.c) else Rq.ZERO
            for j in range(depth + 1)))

    return Rz(rev(value.num), rev(value.den))


def specialize_spectral(matrix: SMat, value: Rq) -> SMat:
    """Evaluate a spectral matrix at z = value; refuses poles."""

    def ev(entry: Rz) -> Rq:
        den = entry.den.eval(value)
        if den.is_zero():
            raise ArithmeticError("spectral specialization hits a pole")
        return entry.num.eval(value) / den

    return matrix.map_values(ev)


# ---------------------------------------------------------------------------
# Solving for intertwiners
# ---------------------------------------------------------------------------


def _vector_weight(module: UqAffModule, vec: Vector) -> Weight:
    wts = {module.weights[k] for k in vec}
    if len(wts) != 1:
        raise ArithmeticError("vector is not weight-homogeneous")
    return wts.pop()


def dominant_extremal_vector(module: UqAffModule) -> Vector:
    """The unique line killed by every non-affine raising operator;
    raises when that line is not one-dimensional."""
    n = module.dim()
    rows: List[List] = []
    zero = module.zero()
    for i in range(1, module.N):
        rows.extend(module.raising[i].to_dense(zero))
    if not rows:
        rows = [[zero] * n]
    basis = nullspace(rows)
    if len(basis) != 1:
        raise ArithmeticError(
            f"extremal line has dimension {len(basis)}, not 1")
    vec = {k: v for k, v in enumerate(basis[0]) if v}
    _vector_weight(module, vec)
    return vec


def _tensor_vector(u: Vector, v: Vector, dim_right: int) -> Vector:
    return {a * dim_right + b: ua * vb
            for a, ua in u.items() for b, vb in v.items()}


def _zpoly_lcm(a: ZPoly, b: ZPoly) -> ZPoly:
    if a.is_zero() or b.is_zero():
        return ZPoly()
    return ((a * b) // a.gcd(b)).monic()


def solve_normalized_R(M1: UqAffModule, M2: UqAffModule) -> Tuple[SMat, ZPoly]:
    """Solve for the intertwiner M1 (x) (M2 carrying z) -> (M2 carrying z)
    (x) M1 over Q(q)(z), normalized to send the product of the two extremal
    vectors to its swap.  The solution is propagated from that extremal
    seed through the raising/lowering actions, verified afterwards on every
    generator, and returned together with the monic lcm of its reduced
    entry denominators."""
    if M1.field is not Rq or M2.field is not Rq:
        raise TypeError("solve expects evaluated (Rq) modules")
    if M1.N != M2.N:
        raise ValueError("rank mismatch")
    u1 = dominant_extremal_vector(M1)
    u2 = dominant_extremal_vector(M2)
    src = tensor(lift_spectral(M1), affinization(M2))
    tgt = tensor(affinization(M2), lift_spectral(M1))
    d1, d2 = M1.dim(), M2.dim()
    n = d1 * d2

    def lift(vec: Vector) -> Vector:
        return {k: _lift(Rz, v) for k, v in vec.items()}

    seed = _tensor_vector(lift(u1), lift(u2), d2)
    seed_img = _tensor_vector(lift(u2), lift(u1), d1)
    top = _vector_weight(src, seed)
    if sum(1 for w in tgt.weights if w == top) != 1:
        raise ArithmeticError("extremal weight is not simple in the target")

    # rows: pivot column -> (vector, forced image); vectors are kept fully
    # reduced against each other, so once all columns are pivots each row
    # is a unit vector and the images are the columns of the solution.
    rows: Dict[int, Tuple[Vector, Vector]] = {}

    def reduce_pair(v: Vector, w: Vector) -> Tuple[Vector, Vector]:
        v = dict(v)
        w = dict(w)
        for p, (rv, ri) in rows.items():
            c = v.get(p)
            if not c:
                continue
            for k, val in rv.items():
                nv = v.get(k, Rz.ZERO) - c * val
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
            for k, val in ri.items():
                nw = w.get(k, Rz.ZERO) - c * val
                if nw:
                    w[k] = nw
                else:
                    w.pop(k, None)
        return v, w

    queue: List[Tuple[Vector, Vector]] = []

    def insert(v: Vector, w: Vector) -> None:
        v, w = reduce_pair(v, w)
        if not v:
            if w:
                raise ArithmeticError(
                    "no intertwiner with the extremal normalization")
            return
        p = min(v)
        c = v[p]
        v = {k: val / c for k, val in v.items()}
        w = {k: val / c for k, val in w.items()}
        for p2, (rv, ri) in list(rows.items()):
            c2 = rv.get(p)
            if not c2:
                continue
            rv2 = dict(rv)
            ri2 = dict(ri)
            for k, val in v.items():
                nv = rv2.get(k, Rz.ZERO) - c2 * val
                if nv:
                    rv2[k] = nv
                else:
                    rv2.pop(k, None)
            for k, val in w.items():
                nw = ri2.get(k, Rz.ZERO) - c2 * val
                if nw:
                    ri2[k] = nw
                else:
                    ri2.pop(k, None)
            rows[p2] = (rv2, ri2)
        rows[p] = (v, w)
        queue.append((v, w))

    insert(seed, seed_img)
    gens = list(zip(list(src.raising) + list(src.lowering),
                    list(tgt.raising) + list(tgt.lowering)))
    while queue:
        v, w = queue.pop()
        for A, B in gens:
            insert(A.apply(v), B.apply(w))
    if len(rows) < n:
        raise ArithmeticError(
            "extremal vector does not generate the spectral tensor product")
    out = SMat(n, n)
    for p, (rv, ri) in rows.items():
        if list(rv) != [p]:
            raise ArithmeticError("row reduction failed to separate pivots")
        out.cols[p] = dict(ri)
    for A, B in gens:
        if out.compose(A) != B.compose(out):
            raise ArithmeticError("propagated map fails to intertwine")
    den = ZPoly.const(Rq.ONE)
    for _r, _c, val in out.entries():
        den = _zpoly_lcm(den, val.den)
    return out, den


def solve_hom(source: UqAffModule, target: UqAffModule) -> List[SMat]:
    """Basis of the intertwiner space target∘X = X∘source over the shared
    scalar field, assembled from the sparse commutation constraints on the
    weight-matched matrix entries."""
    if source.N != target.N or source.field is not target.field:
        raise ValueError("modules are not comparable")
    N = source.N
    unknowns = [(r, c)
                for c in range(source.dim()) for r in range(target.dim())
                if target.weights[r] == source.weights[c]]
    if not unknowns:
        return []
    index = {u: k for k, u in enumerate(unknowns)}
    by_row: Dict[int, List[Tuple[int, int]]] = {}
    by_col: Dict[int, List[Tuple[int, int]]] = {}
    for (r, c), k in index.items():
        by_row.setdefault(r, []).append((c, k))
        by_col.setdefault(c, []).append((r, k))
    zero = source.zero()
    constraints: Dict[Tuple, Dict[int, object]] = {}

    def bump(key, k, val):
        row = constraints.setdefault(key, {})
        acc = row.get(k, zero) + val
        if acc:
            row[k] = acc
        else:
            row.pop(k, None)

    for tag, src_mats, tgt_mats in (("r", source.raising, target.raising),
                                    ("l", source.lowering, target.lowering)):
        for i in range(N):
            for r_out, k_mid, val in tgt_mats[i].entries():
                for c, uk in by_row.get(k_mid, ()):
                    bump((tag, i, r_out, c), uk, val)
            for k_mid, c, val in src_mats[i].entries():
                for r_out, uk in by_col.get(k_mid, ()):
                    bump((tag, i, r_out, c), uk, -val)
    dense = []
    for row in constraints.values():
        if row:
            dense.append([row.get(k, zero) for k in range(len(unknowns))])
    if not dense:
        basis = None
    else:
        basis = nullspace(dense)
    out = []
    if basis is None:
        one = source.one()
        basis = [[one if k == t else zero for k in range(len(unknowns))]
                 for t in range(len(unknowns))]
    for vec in basis:
        mat = SMat(target.dim(), source.dim())
        for (r, c), k in index.items():
            mat.set(r, c, vec[k])
        out.append(mat)
    return out


# ---------------------------------------------------------------------------
# Fusion of minuscule modules
# ---------------------------------------------------------------------------


def _minus_q_exponent(c: Rq) -> int:
    """Write a unit as (-q)^m and return m; rejects anything else."""
    if not isinstance(c, Rq) or c.is_zero():
        raise ValueError("spectral parameter must be a nonzero power of -q")
    num, den = c.num, c.den
    if (sum(1 for v in num.c if v) != 1 or sum(1 for v in den.c if v) != 1):
        raise ValueError("spectral parameter must be a power of -q")
    m = num.degree() - den.degree()
    coeff = num.lc() / den.lc()
    if coeff != (Fraction(1) if m % 2 == 0 else Fraction(-1)):
        raise ValueError("spectral parameter must be a power of -q")
    return m


def span_submodule(parent: UqAffModule,
                   vectors: Sequence[Vector]) -> Tuple[UqAffModule, List[Vector]]:
    """Module structure on the span of the given weight-homogeneous
    vectors; returns (module, inclusion basis).  Raises when the span is
    not stable under every action."""
    n = parent.dim()
    zero = parent.zero()
    dense = [[vec.get(k, zero) for k in range(n)] for vec in vectors if vec]
    if not dense:
        empty = SMat(0, 0)
        mod = UqAffModule(parent.N, (), (),
                          tuple(empty for _ in range(parent.N)),
                          tuple(empty for _ in range(parent.N)),
                          field=parent.field)
        return mod, []
    ech, pivots = row_echelon(dense)
    basis = []
    weights = []
    for t in range(len(pivots)):
        vec = {k: v for k, v in enumerate(ech[t]) if v}
        basis.append(vec)
        weights.append(_vector_weight(parent, vec))
    r = len(basis)
    cols = [[basis[t].get(k, zero) for t in range(r)] for k in range(n)]
    raising = []
    lowering = []
    for fam_parent, fam_out in ((parent.raising, raising),
                                (parent.lowering, lowering)):
        for i in range(parent.N):
            images = [fam_parent[i].apply(b) for b in basis]
            rhs = [[img.get(k, zero) for k in range(n)] for img in images]
            sols = solve(cols, [list(col) for col in rhs])
            if sols is None:
                raise ArithmeticError("span is not stable under the actions")
            mat = SMat(r, r)
            for t, sol in enumerate(sols):
                for s, v in enumerate(sol):
                    if v:
                        mat.set(s, t, v)
            fam_out.append(mat)
    mod = UqAffModule(parent.N, tuple(range(r)), weights,
                      raising, lowering, field=parent.field)
    return mod, basis


def _staircase_swap_matrix(N: int, params: Sequence[Rq]) -> SMat:
    """Composite of adjacent pole-cleared swaps reversing the listed
    spectral parameters, as a matrix over Rq on the full tensor basis.
    The clearing factor may vanish only when the crossed parameters are
    consecutive in the original order."""
    ell = len(params)
    dim = N ** ell
    one = Rq.ONE
    qv = Rq.q_power(1)
    q2 = Rq.q_power(2)
    acc = SMat.identity(dim, one)
    order = list(range(ell))
    for t in range(1, ell):
        for p in range(t, 0, -1):
            oi, oj = order[p - 1], order[p]
            x, xp = params[oi], params[oj]
            if (xp - q2 * x).is_zero() and abs(oi - oj) != 1:
                raise ArithmeticError(
                    "pole clearing collapses a non-consecutive pair")
            step = _embedded_pair(
                N, ell, p - 1, _cleared_pair_entries(N, one, qv, x, xp))
            acc = step.compose(acc)
            order[p - 1], order[p] = oj, oi
    return acc


def fuse_fundamental(ell: int, c: Rq, N: int) -> UqAffModule:
    """Minuscule module of exterior degree ``ell`` at spectral parameter
    ``c`` (a power of -q with the parity of ell - 1), realized as the image
    of the staircase of pole-cleared swaps inside the ell-fold tensor power
    of the vector representation.  Dimension binom(N, ell); degrees 0 and N
    give the trivial module."""
    if N < 2:
        raise ValueError("rank must be at least two")
    if not 0 <= ell <= N:
        raise ValueError("exterior degree out of range")
    m = _minus_q_exponent(c)
    if (m - ell + 1) % 2:
        raise ValueError("parameter parity does not match the degree")
    if ell in (0, N):
        return trivial_rep(N)
    a = (m - ell + 1) // 2
    params = [Rq.q_power(2 * (a + k)) for k in range(ell)]
    base = vector_rep(N)
    target = tensor_chain([evaluate_at(base, x) for x in reversed(params)])
    comp = _staircase_swap_matrix(N, params)
    module, _incl = span_submodule(target, comp.cols)
    if module.dim() != comb(N, ell):
        raise ArithmeticError("fused image has unexpected dimension")
    if Counter(module.weights) - Counter(target.weights):
        raise ArithmeticError("fused weights escape the tensor weights")
    dominant_extremal_vector(module)
    if not burnside_irreducible(module):
        raise ArithmeticError("fused image is not irreducible")
    return module


# ---------------------------------------------------------------------------
# Irreducibility via the operator algebra
# ---------------------------------------------------------------------------


def _spin_dimension(gens: List[SMat], n: int, one, cap: int) -> int:
    """Dimension of the unital algebra spanned by the generators, by
    spinning products against a sparse echelon; stops early at cap."""
    rows: Dict[int, Dict[int, object]] = {}

    def insert(mat: SMat) -> bool:
        flat = {i * n + j: v for i, j, v in mat.entries()}
        while flat:
            p = min(flat)
            row = rows.get(p)
            if row is None:
                break
            c = flat.pop(p)
            for k, v in row.items():
                if k == p:
                    continue
                acc = flat.get(k)
                acc = -c * v if acc is None else acc - c * v
                if acc:
                    flat[k] = acc
                else:
                    flat.pop(k, None)
        if not flat:
            return False
        p = min(flat)
        c = flat[p]
        rows[p] = {k: v / c for k, v in flat.items()}
        return True

    queue = [SMat.identity(n, one)]
    insert(queue[0])
    while queue and len(rows) < cap:
        m = queue.pop()
        for g in gens:
            prod = g.compose(m)
            if insert(prod):
                queue.append(prod)
                if len(rows) == cap:
                    return cap
    return len(rows)


def _generator_matrices(module: UqAffModule) -> List[SMat]:
    gens = list(module.raising) + list(module.lowering)
    for i in range(module.N):
        gens.append(module.cartan_matrix(i, 1))
        gens.append(module.cartan_matrix(i, -1))
    return gens


def _specialized_generators(module: UqAffModule,
                            q0: Fraction) -> Optional[List[SMat]]:
    def ev(val: Rq):
        den = val.den.eval(q0)
        if not den:
            return None
        return val.num.eval(q0) / den

    out = []
    for mat in list(module.raising) + list(module.lowering):
        m2 = SMat(mat.nrows, mat.ncols)
        for r, c, v in mat.entries():
            w = ev(v)
            if w is None:
                return None
            m2.set(r, c, w)
        out.append(m2)
    for i in range(module.N):
        for power in (1, -1):
            m2 = SMat(module.dim(), module.dim())
            for j, w in enumerate(module.weights):
                m2.set(j, j, Fraction(q0) ** (power * w[i]))
            out.append(m2)
    return out


def burnside_irreducible(module: UqAffModule, bound: int = 100) -> bool:
    """Whether the raising, lowering and Cartan operators generate the full
    matrix algebra on the module.  A rational specialization of q screens
    first (full rank there forces full rank generically); only an
    inconclusive screen falls back to the exact field."""
    if module.field is not Rq:
        raise TypeError("evaluate the module before testing irreducibility")
    n = module.dim()
    if n > bound:
        raise ValueError(f"dimension {n} exceeds the bound {bound}")
    if n == 0:
        return False
    if n == 1:
        return True
    cap = n * n
    for q0 in (Fraction(5, 3), Fraction(13, 7), Fraction(9, 2)):
        gens = _specialized_generators(module, q0)
        if gens is None:
            continue
        if _spin_dimension(gens, n, Fraction(1), cap) == cap:
            return True
        break
    return _spin_dimension(_generator_matrices(module), n, Rq.ONE, cap) == cap


# ---------------------------------------------------------------------------
# Symbolic pair-swap identities
# ---------------------------------------------------------------------------


def vv_unitarity_check(N: int) -> bool:
    """Composing the cleared swap with its reverse yields the product of
    the two clearing factors times the identity, as a polynomial identity
    in q and two spectral values."""
    one = MPoly.const(3, 1)
    qv = MPoly.var(3, 0)
    z1 = MPoly.var(3, 1)
    z2 = MPoly.var(3, 2)
    fwd = _embedded_pair(N, 2, 0, _cleared_pair_entries(N, one, qv, z1, z2))
    bwd = _embedded_pair(N, 2, 0, _cleared_pair_entries(N, one, qv, z2, z1))
    scalar = (z2 - qv * qv * z1) * (z1 - qv * qv * z2)
    return bwd.compose(fwd) == SMat.identity(N * N, one).scale(scalar)


def vv_braid_identity_check(N: int) -> bool:
    """The two staircase factorizations of the three-factor reversal agree,
    as polynomial matrix identities in q and three spectral values."""
    one = MPoly.const(4, 1)
    qv = MPoly.var(4, 0)
    z = [MPoly.var(4, 1 + k) for k in range(3)]

    def pair(slot: int, x, xp) -> SMat:
        return _embedded_pair(
            N, 3, slot, _cleared_pair_entries(N, one, qv, x, xp))

    left = pair(0, z[1], z[2]).compose(pair(1, z[0], z[2])).compose(
        pair(0, z[0], z[1]))
    right = pair(1, z[0], z[1]).compose(pair(0, z[0], z[2])).compose(
        pair(1, z[1], z[2]))
    return left == right


# ---------------------------------------------------------------------------
# Threading one spectral strand through a full staircase
# ---------------------------------------------------------------------------


def g_lemma_check(b: int, N: int) -> Dict:
    """Thread a spectral vector strand through the length-N staircase of
    evaluated vector representations ending at parameter q^(2(b-1)), pair
    the staircase against its unique invariant functional, and compare the
    result with the predicted transfer scalar
    q^(N-1) (z - q^(2(b-N))) / (z - q^(2(b-1)))."""
    base = vector_rep(N)
    factors = [evaluate_at(base, Rq.q_power(2 * (b - k)))
               for k in range(N, 0, -1)]
    chain = tensor_chain(factors)
    homs = solve_hom(chain, trivial_rep(N))
    dim_w = chain.dim()
    report: Dict = {"ok": False, "invariant_dimension": len(homs)}
    if len(homs) != 1:
        return report
    phi = homs[0]
    anchor = sum((N - 1 - pos) * N ** (N - 1 - pos) for pos in range(N))
    pivot = phi.get(0, anchor, Rq.ZERO)
    if not pivot:
        return report
    phi = phi.scale(Rq.ONE / pivot)
    phi_vals = {j: _lift(Rz, phi.get(0, j, Rq.ZERO))
                for j in range(dim_w) if phi.cols[j]}

    total = N ** (N + 1)
    comp = SMat.identity(total, Rz.ONE)
    for p in range(N, 0, -1):
        x = Rq.q_power(2 * (b - N + p - 1))
        step = _embedded_pair(N, N + 1, p - 1, _normalized_pair_entries(N, x))
        comp = step.compose(comp)

    stride = N ** N
    lhs = SMat(N, total)
    for j in range(total):
        for i_out, val in comp.cols[j].items():
            a, w = divmod(i_out, stride)
            pv = phi_vals.get(w)
            if pv is None:
                continue
            acc = lhs.get(a, j, Rz.ZERO) + pv * val
            lhs.set(a, j, acc)
    rhs = SMat(N, total)
    zv = Rz(ZPoly.gen())
    g = (_lift(Rz, Rq.q_power(N - 1))
         * (zv - _lift(Rz, Rq.q_power(2 * (b - N))))
         / (zv - _lift(Rz, Rq.q_power(2 * (b - 1)))))
    for j in range(total):
        w0, a0 = divmod(j, N)
        pv = phi_vals.get(w0)
        if pv is None:
            continue
        rhs.set(a0, j, g * pv)
    report["ok"] = lhs == rhs
    report["transfer_scalar"] = ratfunc_to_text(g)
    return report


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def module_to_dict(module: UqAffModule) -> Dict:
    """JSON-ready dump: rank, dimension, weights, and the sparse action
    entries in canonical text."""

    def dump(mats: Sequence[SMat]) -> Dict[str, List]:
        out = {}
        for i, mat in enumerate(mats):
            rows = sorted(((r, c, ratfunc_to_text(v))
                           for r, c, v in mat.entries()),
                          key=lambda t: (t[0], t[1]))
            out[str(i)] = [list(t) for t in rows]
        return out

    return {
        "nodes": module.N,
        "dim": module.dim(),
        "weights": [list(w) for w in module.weights],
        "raising": dump(module.raising),
        "lowering": dump(module.lowering),
    }
