"""Swap homomorphisms between convolution products.

Intertwining operators, the spectral swap matrix over two polynomial
variables, its vanishing order along the variable difference, the
renormalized swap map obtained by dividing that order out and then
specializing both variables to zero, composites of pairwise swaps along a
permutation, and the braid-consistency (Yang-Baxter) check.

Grading convention: a map is stored with its plain homogeneous degree,
``deg f(v) - deg v``.  The renormalized swap map between products with
weights ``beta``, ``gamma`` has plain degree ``-lambda_shift`` where
``lambda_shift = (beta,gamma) - 2<beta,gamma> + 2s``.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Sequence, Tuple

from .lattice import (
    Perm,
    block_swap_perm,
    canonical_word,
    identity_perm,
    left_descents,
    perm_length,
    perm_mult,
    q_factor_kind,
    simple_reflection,
    word_pair_asym,
    word_pair_sym,
)
from .modules import (
    BasisKey,
    ConvolutionModule,
    FlatVec,
    GradedMap,
    KLRModule,
    _flat_add,
    convolution,
    convolution_list,
    spectral_twist,
)
from .rings import MPoly, divide_and_evaluate, vanishing_order


# ---------------------------------------------------------------------------
# Operators and intertwiners
# ---------------------------------------------------------------------------


class Operator:
    """Linear endomorphism of a module, stored by columns.

    Missing columns are zero.  Unlike :class:`~klrlab.modules.GradedMap`
    an operator need not commute with the generator actions, so it can
    hold intertwiners and polynomial multiplications.
    """

    def __init__(self, module: KLRModule, columns: Dict[BasisKey, FlatVec]):
        self.module = module
        self.columns: Dict[BasisKey, FlatVec] = {}
        for key, col in columns.items():
            pruned = {t: c for t, c in col.items() if c}
            if pruned:
                self.columns[key] = pruned

    @classmethod
    def identity(cls, module: KLRModule) -> "Operator":
        return cls(module, {key: module.unit_vector(*key)
                            for key in module.basis_items()})

    def column(self, word, idx) -> FlatVec:
        return dict(self.columns.get((tuple(word), idx), {}))

    def apply(self, vec: FlatVec) -> FlatVec:
        out: FlatVec = {}
        for key, c in vec.items():
            _flat_add(out, self.columns.get(key, {}), c)
        return out

    def compose(self, inner: "Operator") -> "Operator":
        """self after inner; both must live on the same module."""
        if inner.module is not self.module:
            raise ValueError("operators live on different modules")
        cols = {key: self.apply(inner.columns.get(key, {}))
                for key in self.module.basis_items()}
        return Operator(self.module, cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Operator):
            return NotImplemented
        return self.module is other.module and self.columns == other.columns

    def __repr__(self) -> str:
        return f"Operator(dim={self.module.dim()}, nonzero_columns={len(self.columns)})"


def _phi_apply(module: KLRModule, a: int, vec: FlatVec) -> FlatVec:
    """One intertwiner applied to a vector, dispatching on each component
    word: (tau_a (x_a - x_{a+1}) + 1) on repeated letters, tau_a otherwise."""
    out: FlatVec = {}
    for key, c in vec.items():
        word = key[0]
        unit: FlatVec = {key: c}
        if word[a - 1] == word[a]:
            moved = module.apply(("x", a), unit)
            _flat_add(moved, module.apply(("x", a + 1), unit), -1)
            _flat_add(out, module.apply(("tau", a), moved))
            _flat_add(out, unit)
        else:
            _flat_add(out, module.apply(("tau", a), unit))
    return out


def _phi_word(module: KLRModule, letters: Sequence[int], vec: FlatVec) -> FlatVec:
    """Intertwiners along a word, rightmost letter applied first."""
    for a in reversed(letters):
        if not vec:
            break
        vec = _phi_apply(module, a, vec)
    return vec


def intertwiner_phi(a: int, module: KLRModule) -> Operator:
    """The a-th intertwining operator on ``module``.

    Squares to ``Q_{nu_a, nu_{a+1}}(x_a, x_{a+1}) + delta(nu_a = nu_{a+1})``
    on each component, and conjugation by it swaps ``x_a`` with ``x_{a+1}``.
    """
    n = module.strand_count()
    if not 1 <= a < n:
        raise IndexError(f"intertwiner position {a} out of range for {n} strands")
    columns = {key: _phi_apply(module, a, module.unit_vector(*key))
               for key in module.basis_items()}
    return Operator(module, columns)


# ---------------------------------------------------------------------------
# Building swap maps column by column
# ---------------------------------------------------------------------------


def pair_grading_shift(left: KLRModule, right: KLRModule) -> int:
    """(beta,gamma) - 2<beta,gamma> for the modules' weights; 0 if either
    module is zero (a zero module carries no weight data here)."""
    lw, rw = left.words(), right.words()
    if not lw or not rw:
        return 0
    return word_pair_sym(lw[0], rw[0]) - 2 * word_pair_asym(lw[0], rw[0])


def _flat_length(module: KLRModule, key: BasisKey, nfactors: int) -> int:
    if nfactors == 1:
        return 0
    assert isinstance(module, ConvolutionModule)
    w, eta, i, j = module.decode(*key)
    return perm_length(w) + _flat_length(module.left, (eta[: module.m], i),
                                         nfactors - 1)


def _reduction_step(module: KLRModule, key: BasisKey, nfactors: int):
    """A pair (letter, parent key) with ``vector(key) = tau_letter .
    vector(parent)`` exactly, or None when the vector is a pure tensor.

    Walks the left-associated product structure: a nontrivial outer
    shuffle is peeled at its smallest left descent; otherwise the left
    factor is reduced recursively and re-embedded.
    """
    if nfactors == 1:
        return None
    assert isinstance(module, ConvolutionModule)
    w, eta, i, j = module.decode(*key)
    size = module.strand_count()
    if perm_length(w):
        k = left_descents(w)[0]
        parent = module.index_of(perm_mult(simple_reflection(k, size), w),
                                 eta, i, j)
        return k, parent
    m = module.m
    step = _reduction_step(module.left, (eta[:m], i), nfactors - 1)
    if step is None:
        return None
    k, (lword, li) = step
    return k, module.index_of(w, tuple(lword) + eta[m:], li, j)


def _extend_by_linearity(source: KLRModule, target: KLRModule,
                         pure_columns: Dict[BasisKey, FlatVec],
                         nfactors: int) -> Dict[BasisKey, FlatVec]:
    """Extend a map given on pure tensors to the whole shuffle basis using
    one cached generator application per basis vector."""
    items = sorted(source.basis_items(),
                   key=lambda key: _flat_length(source, key, nfactors))
    columns: Dict[BasisKey, FlatVec] = {}
    for key in items:
        step = _reduction_step(source, key, nfactors)
        if step is None:
            columns[key] = dict(pure_columns.get(key, {}))
        else:
            k, parent = step
            columns[key] = target.apply(("tau", k), columns[parent])
    return columns


def _swap_columns(source: ConvolutionModule,
                  target: ConvolutionModule) -> Dict[BasisKey, FlatVec]:
    """Columns of the swap homomorphism conv(M, N) -> conv(N, M) given on
    pure tensors by the intertwiner word of the block transposition."""
    m, n = source.m, source.n
    swap_word = canonical_word(block_swap_perm(n, m))
    pure: Dict[BasisKey, FlatVec] = {}
    for mu in source.left.words():
        for i in range(len(source.left.component_degrees(mu))):
            for nu in source.right.words():
                for j in range(len(source.right.component_degrees(nu))):
                    skey = source.pure_index(mu + nu, i, j)
                    tkey = target.pure_index(nu + mu, j, i)
                    pure[skey] = _phi_word(target, swap_word,
                                           target.unit_vector(*tkey))
    return _extend_by_linearity(source, target, pure, 2)


def swap_map(left: KLRModule, right: KLRModule) -> GradedMap:
    """The unrenormalized swap homomorphism conv(M, N) -> conv(N, M)."""
    if left.zvar_count or right.zvar_count:
        raise ValueError("swap_map expects modules without spectral variables")
    source = convolution(left, right)
    target = convolution(right, left)
    return GradedMap(source, target, -pair_grading_shift(left, right),
                     _swap_columns(source, target))


# ---------------------------------------------------------------------------
# Spectral matrix, vanishing order, renormalization
# ---------------------------------------------------------------------------


class RMatrixData:
    """Matrix of the swap homomorphism after twisting both inputs by
    spectral variables.

    ``matrix[src_key][tgt_key]`` is a polynomial in the two spectral
    variables, with the variable of the left input factor first.  ``s``
    is the vanishing order of the full matrix along ``z' - z`` and
    ``lambda_shift = shift + 2 s`` where ``shift = (beta,gamma) -
    2<beta,gamma>``; the renormalized map has plain degree
    ``-lambda_shift``.
    """

    def __init__(self, source: ConvolutionModule, target: ConvolutionModule,
                 matrix: Dict[BasisKey, Dict[BasisKey, MPoly]], s: int,
                 lambda_shift: int, shift: int, var_names: Tuple[str, str]):
        self.source = source
        self.target = target
        self.matrix = matrix
        self.s = s
        self.lambda_shift = lambda_shift
        self.shift = shift
        self.var_names = var_names

    def __repr__(self) -> str:
        return (f"RMatrixData(s={self.s}, lambda={self.lambda_shift}, "
                f"dim={self.source.dim()})")


def spectral_R(M: KLRModule, N: KLRModule, z: str = "z",
               zp: str = "z'") -> RMatrixData:
    """Full matrix of the swap map between the spectrally twisted products.

    Both inputs must be free of spectral variables; the twists are applied
    here, ``z`` on the left input and ``zp`` on the right one.
    """
    if M.zvar_count or N.zvar_count:
        raise ValueError("spectral_R expects modules without spectral variables")
    if z == zp:
        raise ValueError("the two spectral variable names must differ")
    Mz = spectral_twist(M, z)
    Nzp = spectral_twist(N, zp)
    source = convolution(Mz, Nzp)
    target = convolution(Nzp, Mz)
    columns = _swap_columns(source, target)
    # target coefficients carry (zp, z); store entries in (z, zp) order
    matrix: Dict[BasisKey, Dict[BasisKey, MPoly]] = {}
    for skey, col in columns.items():
        row = {tkey: p.extend_vars(2, (1, 0)) for tkey, p in col.items() if p}
        matrix[skey] = row
    orders = [vanishing_order(p) for col in matrix.values()
              for p in col.values()]
    s = int(min(orders)) if orders else 0
    shift = pair_grading_shift(M, N)
    return RMatrixData(source, target, matrix, s, shift + 2 * s, shift, (z, zp))


class RenormalizedMap(GradedMap):
    """Swap map with the diagonal vanishing order divided out and the
    spectral variables specialized to zero; carries ``s`` and the grading
    shift ``lambda_shift`` (the plain degree is ``-lambda_shift``)."""

    def __init__(self, source, target, degree, columns, s, lambda_shift):
        super().__init__(source, target, degree, columns)
        self.s = s
        self.lambda_shift = lambda_shift


def renormalized_r(M: KLRModule, N: KLRModule) -> RenormalizedMap:
    """The renormalized swap map conv(M, N) -> conv(N, M).

    A zero module on either side yields the zero map with ``s = 0`` and
    ``lambda_shift`` equal to the bare grading shift.
    """
    source = convolution(M, N)
    target = convolution(N, M)
    shift = pair_grading_shift(M, N)
    if M.is_zero() or N.is_zero():
        return RenormalizedMap(source, target, -shift, {}, 0, shift)
    data = spectral_R(M, N)
    columns: Dict[BasisKey, FlatVec] = {}
    for skey, col in data.matrix.items():
        w, eta, i, j = data.source.decode(*skey)
        out: FlatVec = {}
        for tkey, p in col.items():
            c = divide_and_evaluate(p, data.s)
            if c:
                wt, etat, it, jt = data.target.decode(*tkey)
                out[target.index_of(wt, etat, it, jt)] = MPoly.const(0, c)
        if out:
            columns[source.index_of(w, eta, i, j)] = out
    return RenormalizedMap(source, target, -data.lambda_shift, columns,
                           data.s, data.lambda_shift)


def depends_only_on_difference(p: MPoly) -> bool:
    """True when a two-variable polynomial is a polynomial in z' - z."""
    if p.nvars != 2:
        raise ValueError("expected a polynomial in two spectral variables")
    z0 = MPoly.var(2, 0)
    z1 = MPoly.var(2, 1)
    return p.substitute({0: 0}).substitute({1: z1 - z0}) == p


# ---------------------------------------------------------------------------
# Composites along permutations and the braid check
# ---------------------------------------------------------------------------


def _pure_key(module: KLRModule, leaves: Sequence[BasisKey]) -> BasisKey:
    """Basis key of the pure tensor with the given per-factor keys inside a
    left-associated product."""
    if len(leaves) == 1:
        return leaves[0]
    assert isinstance(module, ConvolutionModule)
    lkey = _pure_key(module.left, leaves[:-1])
    rkey = leaves[-1]
    return module.index_of(identity_perm(module.strand_count()),
                           tuple(lkey[0]) + tuple(rkey[0]), lkey[1], rkey[1])


def _embedded_swap(P_src: KLRModule, P_tgt: KLRModule, factors: List[KLRModule],
                   rmap: RenormalizedMap, k: int, offset: int) -> GradedMap:
    """The map swapping factors ``k`` and ``k+1`` (1-based) inside a
    left-associated product, all other factors untouched."""
    pair_src: ConvolutionModule = rmap.source
    pair_tgt: ConvolutionModule = rmap.target
    nfactors = len(factors)
    pure_cols: Dict[BasisKey, FlatVec] = {}
    for leaves in itertools.product(*[list(f.basis_items()) for f in factors]):
        skey = _pure_key(P_src, leaves)
        vkey, wkey = leaves[k - 1], leaves[k]
        pcol = rmap.column(*pair_src.pure_index(
            tuple(vkey[0]) + tuple(wkey[0]), vkey[1], wkey[1]))
        total: FlatVec = {}
        for tkey, c in pcol.items():
            y, kap, i2, j2 = pair_tgt.decode(*tkey)
            new_leaves = (leaves[: k - 1]
                          + ((kap[: pair_tgt.m], i2), (kap[pair_tgt.m:], j2))
                          + leaves[k + 1:])
            pkey = _pure_key(P_tgt, new_leaves)
            word = tuple(a + offset for a in canonical_word(y))
            vec = P_tgt.apply_word(word, P_tgt.unit_vector(*pkey))
            _flat_add(total, vec, c)
        pure_cols[skey] = total
    columns = _extend_by_linearity(P_src, P_tgt, pure_cols, nfactors)
    return GradedMap(P_src, P_tgt, rmap.degree, columns)


def _greedy_max_word(w: Perm) -> Tuple[int, ...]:
    """Reduced word assembled by always peeling the largest left descent."""
    out: List[int] = []
    while perm_length(w):
        k = left_descents(w)[-1]
        out.append(k)
        w = perm_mult(simple_reflection(k, len(w)), w)
    return tuple(out)


def _composite_along(mods: Sequence[KLRModule], letters: Sequence[int],
                     products: Dict[Tuple[int, ...], KLRModule],
                     rcache: Dict[Tuple[int, int], RenormalizedMap]) -> GradedMap:
    t = len(mods)

    def product_for(arr: Tuple[int, ...]) -> KLRModule:
        if arr not in products:
            products[arr] = convolution_list([mods[i] for i in arr])
        return products[arr]

    arrangement = tuple(range(t))
    total = GradedMap.identity(product_for(arrangement))
    for k in reversed(tuple(letters)):
        new_arr = (arrangement[: k - 1]
                   + (arrangement[k], arrangement[k - 1])
                   + arrangement[k + 1:])
        a, b = arrangement[k - 1], arrangement[k]
        if (a, b) not in rcache:
            rcache[(a, b)] = renormalized_r(mods[a], mods[b])
        P_src = product_for(arrangement)
        P_tgt = product_for(new_arr)
        offset = sum(mods[i].strand_count() for i in arrangement[: k - 1])
        stage = _embedded_swap(P_src, P_tgt, [mods[i] for i in arrangement],
                               rcache[(a, b)], k, offset)
        total = stage.compose(total)
        arrangement = new_arr
    return total


def _nonzero_columns(f: GradedMap) -> Dict[BasisKey, FlatVec]:
    return {key: col for key, col in f.columns.items() if col}


def composite_r(modules: Sequence[KLRModule], w: Perm,
                check_words: bool = True) -> GradedMap:
    """Composite of pairwise renormalized swaps along a reduced word of
    ``w``; the result is independent of the reduced word, and by default a
    second word is evaluated to confirm that.

    Plain degree: minus the sum of ``lambda_shift`` over the inversions
    of ``w``.
    """
    mods = list(modules)
    w = tuple(w)
    if sorted(w) != list(range(len(mods))):
        raise ValueError("permutation does not match the number of factors")
    for M in mods:
        if M.is_zero():
            raise ValueError("composite swaps need nonzero factors")
        if M.zvar_count:
            raise ValueError("composite swaps expect modules without "
                             "spectral variables")
    products: Dict[Tuple[int, ...], KLRModule] = {}
    rcache: Dict[Tuple[int, int], RenormalizedMap] = {}
    main_word = canonical_word(w)
    main = _composite_along(mods, main_word, products, rcache)
    if check_words:
        alt = _greedy_max_word(w)
        if alt != main_word:
            other = _composite_along(mods, alt, products, rcache)
            if _nonzero_columns(main) != _nonzero_columns(other):
                raise ArithmeticError(
                    "composite swap differs between reduced words")
    return main


def yang_baxter_check(L: KLRModule, M: KLRModule, N: KLRModule) -> Dict:
    """Compare the two length-three composites of pairwise swaps on
    conv(L, M, N); they must agree as matrices."""
    mods = [L, M, N]
    products: Dict[Tuple[int, ...], KLRModule] = {}
    rcache: Dict[Tuple[int, int], RenormalizedMap] = {}
    lhs = _composite_along(mods, (1, 2, 1), products, rcache)
    rhs = _composite_along(mods, (2, 1, 2), products, rcache)
    cl, cr = _nonzero_columns(lhs), _nonzero_columns(rhs)
    mismatches = [key for key in set(cl) | set(cr)
                  if cl.get(key) != cr.get(key)]
    return {
        "ok": not mismatches,
        "degree": lhs.degree,
        "source_dim": lhs.source.dim(),
        "mismatch_count": len(mismatches),
    }


# ---------------------------------------------------------------------------
# The central square of the swap
# ---------------------------------------------------------------------------


def central_q_operator(product: ConvolutionModule) -> Operator:
    """Multiplication by the product of Q-factors over cross pairs of
    differing letters, one x from each tensor factor; supported on the
    pure-tensor block, where it is well defined."""
    m, n = product.m, product.n
    columns: Dict[BasisKey, FlatVec] = {}
    for mu in product.left.words():
        for i in range(len(product.left.component_degrees(mu))):
            for nu in product.right.words():
                for j in range(len(product.right.component_degrees(nu))):
                    key = product.pure_index(mu + nu, i, j)
                    vec = product.unit_vector(*key)
                    for a in range(1, m + 1):
                        for b in range(1, n + 1):
                            kind = q_factor_kind(mu[a - 1], nu[b - 1])
                            if kind in ("zero", "one"):
                                continue
                            va = product.apply(("x", a), vec)
                            vb = product.apply(("x", m + b), vec)
                            _flat_add(va, vb, -1)
                            vec = va if kind == "u-v" else \
                                {t: -c for t, c in va.items()}
                    columns[key] = vec
    return Operator(product, columns)


def squared_r_central(M: KLRModule, N: KLRModule) -> Operator:
    """Return the central Q-product operator and assert that the two swap
    maps composed act by it on every pure tensor."""
    source = convolution(M, N)
    target = convolution(N, M)
    forth = GradedMap(source, target, -pair_grading_shift(M, N),
                      _swap_columns(source, target))
    back = GradedMap(target, source, -pair_grading_shift(N, M),
                     _swap_columns(target, source))
    composed = back.compose(forth)
    central = central_q_operator(source)
    for key in central.columns.keys() | {
            k for k in composed.columns if _is_pure(source, k)}:
        if not _is_pure(source, key):
            continue
        got = {t: c for t, c in composed.column(*key).items() if c}
        want = central.column(*key)
        if got != want:
            raise ArithmeticError(
                f"squared swap disagrees with the central operator at {key}")
    return central


def _is_pure(product: ConvolutionModule, key: BasisKey) -> bool:
    w, _, _, _ = product.decode(*key)
    return not perm_length(w)
