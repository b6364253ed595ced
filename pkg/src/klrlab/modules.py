"""Graded modules over the quiver Hecke algebra of the infinite linear quiver.

A module is a finite collection of word components (one graded vector
space per word) together with generator actions.  Generators are labelled
``("x", k)`` and ``("tau", k)`` with 1-indexed strand positions; ``("e", w)``
projects onto the ``w`` component.  Vectors are sparse dicts mapping
``(word, basis_index)`` to a polynomial coefficient in the module's
spectral variables (each of degree 2).

Convolution products carry the basis ``tau_w (u (x) v)`` indexed by
two-block shuffles ``w``; generator actions on that basis are computed by
a straightening rewriter (see :class:`ConvolutionModule`).
"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .lattice import (
    Perm,
    Word,
    act_on_word,
    canonical_word,
    identity_perm,
    inversions,
    perm_inverse,
    perm_mult,
    q_factor_kind,
    shuffles,
    simple_reflection,
    sym_form,
)
from .rings import LaurentHalf, MPoly, mpoly_to_text

Gen = Tuple[str, object]
BasisKey = Tuple[Word, int]
FlatVec = Dict[BasisKey, MPoly]

STRAIGHTENING_STEP_LIMIT = 5_000_000


def q_polynomial(i: int, j: int) -> MPoly:
    """Quadratic-relation coefficient Q_{ij}(u, v) as a polynomial in two
    variables (variable 0 is u, variable 1 is v)."""
    kind = q_factor_kind(i, j)
    if kind == "zero":
        return MPoly.zero(2)
    if kind == "one":
        return MPoly.const(2, 1)
    u = MPoly.var(2, 0)
    v = MPoly.var(2, 1)
    return u - v if kind == "u-v" else v - u


def swap_letters(word: Word, k: int) -> Word:
    """The word s_k(w): letters at positions k, k+1 (1-indexed) exchanged."""
    out = list(word)
    out[k - 1], out[k] = out[k], out[k - 1]
    return tuple(out)


def braid_deviation(eta: Word, k: int) -> int:
    """Scalar D with (tau_{k+1} tau_k tau_{k+1} - tau_k tau_{k+1} tau_k) e(eta)
    = D e(eta): +1 when eta_k = eta_{k+2} = eta_{k+1} - 1, -1 when
    eta_k = eta_{k+2} = eta_{k+1} + 1, else 0."""
    a, b, c = eta[k - 1], eta[k], eta[k + 1]
    if a != c:
        return 0
    if b == a + 1:
        return 1
    if b == a - 1:
        return -1
    return 0


def tau_word_degree(w: Perm, eta: Word) -> int:
    """Degree of tau_w e(eta): sum of -(alpha, alpha) over inversions."""
    return sum(-sym_form(eta[i], eta[j]) for i, j in inversions(w))


def generator_degree(gen: Gen, word: Word) -> int:
    kind = gen[0]
    if kind == "x":
        return 2
    if kind == "tau":
        k = gen[1]
        return -sym_form(word[k - 1], word[k])
    if kind == "e":
        return 0
    raise ValueError(f"unknown generator {gen!r}")


def _prune_terms(out: Dict[Word, Dict]) -> Dict[Word, Dict]:
    for key in list(out):
        slot = {pk: c for pk, c in out[key].items() if c}
        if slot:
            out[key] = slot
        else:
            del out[key]
    return out


def _flat_add(acc: FlatVec, vec: FlatVec, scale: MPoly | int = 1) -> None:
    for key, c in vec.items():
        s = c * scale if scale != 1 else c
        if not s:
            continue
        cur = acc.get(key)
        new = s if cur is None else cur + s
        if new:
            acc[key] = new
        else:
            acc.pop(key, None)


# ---------------------------------------------------------------------------
# Module interface
# ---------------------------------------------------------------------------

class KLRModule:
    """Common interface: word components with degrees and generator actions."""

    zvar_names: Tuple[str, ...] = ()

    # subclasses implement these three
    def words(self) -> Tuple[Word, ...]:
        raise NotImplementedError

    def component_degrees(self, word: Word) -> Tuple[int, ...]:
        raise NotImplementedError

    def apply_to_basis(self, gen: Gen, word: Word, idx: int) -> FlatVec:
        raise NotImplementedError

    # derived API ----------------------------------------------------------

    @property
    def zvar_count(self) -> int:
        return len(self.zvar_names)

    def strand_count(self) -> int:
        ws = self.words()
        return len(ws[0]) if ws else 0

    def dim(self) -> int:
        return sum(len(self.component_degrees(w)) for w in self.words())

    def is_zero(self) -> bool:
        return self.dim() == 0

    def degree_of(self, word: Word, idx: int) -> int:
        return self.component_degrees(word)[idx]

    def content(self) -> Dict[int, int]:
        ws = self.words()
        return dict(Counter(ws[0])) if ws else {}

    def basis_items(self) -> Iterable[BasisKey]:
        for w in self.words():
            for i in range(len(self.component_degrees(w))):
                yield (w, i)

    def unit_vector(self, word: Word, idx: int) -> FlatVec:
        return {(word, idx): MPoly.const(self.zvar_count, 1)}

    def apply(self, gen: Gen, vec: FlatVec) -> FlatVec:
        if gen[0] == "e":
            target = tuple(gen[1])
            return {k: c for k, c in vec.items() if k[0] == target}
        out: FlatVec = {}
        for (word, idx), c in vec.items():
            col = self.apply_to_basis(gen, word, idx)
            _flat_add(out, col, c)
        return out

    def apply_word(self, letters: Sequence[int], vec: FlatVec) -> FlatVec:
        """Apply tau_{letters[0]} ... tau_{letters[-1]} (rightmost first)."""
        for k in reversed(letters):
            if not vec:
                break
            vec = self.apply(("tau", k), vec)
        return vec

    def z_variable(self, name: str) -> MPoly:
        return MPoly.var(self.zvar_count, self.zvar_names.index(name))


class MatrixKLRModule(KLRModule):
    """Module backed by explicitly stored action columns."""

    def __init__(
        self,
        zvar_names: Sequence[str],
        components: Dict[Word, Sequence[int]],
        actions: Dict[Gen, Dict[BasisKey, FlatVec]],
        strands: Optional[int] = None,
    ):
        self.zvar_names = tuple(zvar_names)
        self._components = {tuple(w): tuple(d) for w, d in components.items()}
        self._words = tuple(sorted(self._components))
        if self._words:
            n = len(self._words[0])
            c0 = Counter(self._words[0])
            for w in self._words:
                if len(w) != n or Counter(w) != c0:
                    raise ValueError("words must share one root content")
            self._strands = n
        else:
            self._strands = 0 if strands is None else strands
        self._actions: Dict[Gen, Dict[BasisKey, FlatVec]] = {}
        for gen, cols in actions.items():
            store: Dict[BasisKey, FlatVec] = {}
            for key, col in cols.items():
                cleaned = {k: v for k, v in col.items() if v}
                if cleaned:
                    store[(tuple(key[0]), key[1])] = cleaned
            self._actions[gen] = store

    def words(self) -> Tuple[Word, ...]:
        return self._words

    def component_degrees(self, word: Word) -> Tuple[int, ...]:
        return self._components.get(tuple(word), ())

    def strand_count(self) -> int:
        return self._strands

    def apply_to_basis(self, gen: Gen, word: Word, idx: int) -> FlatVec:
        return dict(self._actions.get(gen, {}).get((word, idx), {}))


# ---------------------------------------------------------------------------
# Leaf constructors
# ---------------------------------------------------------------------------

def unit_module() -> MatrixKLRModule:
    """The one-dimensional module over the rank-0 algebra (empty word)."""
    return MatrixKLRModule((), {(): (0,)}, {})


def segment_module(a: int, b: int) -> MatrixKLRModule:
    """One-dimensional module on the word (a, a+1, ..., b); the empty
    segment (b = a-1) gives the unit module."""
    if b < a - 1:
        raise ValueError("segment endpoints must satisfy a <= b + 1")
    if b == a - 1:
        return unit_module()
    word = tuple(range(a, b + 1))
    return MatrixKLRModule((), {word: (0,)}, {})


def truncated_twist(a: int, ell: int) -> MatrixKLRModule:
    """Rank-(ell+1) quotient of the affinized one-letter module on word (a):
    x_1 is the degree-2 nilpotent shift with x_1^{ell+1} = 0."""
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    word = (a,)
    degrees = tuple(2 * e for e in range(ell + 1))
    cols: Dict[BasisKey, FlatVec] = {}
    one = MPoly.const(0, 1)
    for e in range(ell):
        cols[(word, e)] = {(word, e + 1): one}
    return MatrixKLRModule((), {word: degrees}, {("x", 1): cols})


def spectral_twist(module: KLRModule, name: str) -> MatrixKLRModule:
    """Same components; every x_k action shifted by a fresh central
    variable of degree 2 (appended last)."""
    if name in module.zvar_names:
        raise ValueError(f"spectral variable {name!r} already present")
    old = module.zvar_count
    new_names = module.zvar_names + (name,)
    total = old + 1
    embed = tuple(range(old))
    zvar = MPoly.var(total, old)

    def ext(p: MPoly) -> MPoly:
        return p.extend_vars(total, embed)

    components = {w: module.component_degrees(w) for w in module.words()}
    actions: Dict[Gen, Dict[BasisKey, FlatVec]] = {}
    n = module.strand_count()
    gens: List[Gen] = [("x", k) for k in range(1, n + 1)]
    gens += [("tau", k) for k in range(1, n)]
    for gen in gens:
        cols: Dict[BasisKey, FlatVec] = {}
        for key in module.basis_items():
            col = module.apply_to_basis(gen, key[0], key[1])
            new_col: FlatVec = {k: ext(v) for k, v in col.items()}
            if gen[0] == "x":
                _flat_add(new_col, {key: zvar})
            if new_col:
                cols[key] = new_col
        if cols:
            actions[gen] = cols
    return MatrixKLRModule(new_names, components, actions,
                           strands=module.strand_count())


def materialize(module: KLRModule) -> MatrixKLRModule:
    """Copy any module into explicit matrix-backed storage."""
    components = {w: module.component_degrees(w) for w in module.words()}
    n = module.strand_count()
    actions: Dict[Gen, Dict[BasisKey, FlatVec]] = {}
    gens: List[Gen] = [("x", k) for k in range(1, n + 1)]
    gens += [("tau", k) for k in range(1, n)]
    for gen in gens:
        cols: Dict[BasisKey, FlatVec] = {}
        for key in module.basis_items():
            col = module.apply_to_basis(gen, key[0], key[1])
            col = {k: v for k, v in col.items() if v}
            if col:
                cols[key] = col
        if cols:
            actions[gen] = cols
    return MatrixKLRModule(module.zvar_names, components, actions,
                           strands=module.strand_count())


def dual(module: KLRModule) -> MatrixKLRModule:
    """Dual module: degrees negated, action blocks transposed (the algebra
    anti-involution fixes all generators)."""
    if module.zvar_count:
        raise ValueError("dual requires a module without spectral variables")
    components = {w: tuple(-d for d in module.component_degrees(w))
                  for w in module.words()}
    n = module.strand_count()
    actions: Dict[Gen, Dict[BasisKey, FlatVec]] = {}
    gens: List[Gen] = [("x", k) for k in range(1, n + 1)]
    gens += [("tau", k) for k in range(1, n)]
    for gen in gens:
        cols: Dict[BasisKey, Dict[BasisKey, MPoly]] = {}
        for key in module.basis_items():
            for tgt, c in module.apply_to_basis(gen, key[0], key[1]).items():
                cols.setdefault(tgt, {})[key] = c
        if cols:
            actions[gen] = cols
    return MatrixKLRModule((), components, actions,
                           strands=module.strand_count())


# ---------------------------------------------------------------------------
# Convolution with lazy straightening
# ---------------------------------------------------------------------------

class ConvolutionModule(KLRModule):
    """Induced product of two modules.

    Basis ``tau_w (u (x) v)`` over minimal-length coset representatives
    ``w`` (increasing on each block).  Generator application rewrites
    ``gen . tau_w`` into canonical terms by peeling canonical reduced
    words; the quadratic relation is used when a length drops and the
    braid deviation contributes the documented correction terms.
    """

    def __init__(self, left: KLRModule, right: KLRModule):
        if set(left.zvar_names) & set(right.zvar_names):
            raise ValueError("spectral variable sets must be disjoint")
        self.left = left
        self.right = right
        self.m = left.strand_count()
        self.n = right.strand_count()
        self.zvar_names = left.zvar_names + right.zvar_names
        total = self.zvar_count
        self._embed_left = tuple(range(left.zvar_count))
        self._embed_right = tuple(range(left.zvar_count, total))
        # basis: per target word, ordered list of (w, eta, i, j)
        basis: Dict[Word, List[Tuple[Perm, Word, int, int]]] = {}
        degrees: Dict[Word, List[int]] = {}
        left_words = sorted(left.words())
        right_words = sorted(right.words())
        for w in shuffles(self.m, self.n):
            for mu in left_words:
                ldeg = left.component_degrees(mu)
                for kappa in right_words:
                    rdeg = right.component_degrees(kappa)
                    eta = mu + kappa
                    theta = act_on_word(w, eta)
                    shift = tau_word_degree(w, eta)
                    blist = basis.setdefault(theta, [])
                    dlist = degrees.setdefault(theta, [])
                    for i in range(len(ldeg)):
                        for j in range(len(rdeg)):
                            blist.append((w, eta, i, j))
                            dlist.append(ldeg[i] + rdeg[j] + shift)
        self._basis = {w: tuple(v) for w, v in basis.items()}
        self._degrees = {w: tuple(v) for w, v in degrees.items()}
        self._words = tuple(sorted(self._basis))
        self._pos = {
            (w, eta, i, j): (theta, t)
            for theta, items in self._basis.items()
            for t, (w, eta, i, j) in enumerate(items)
        }
        self._cache: Dict[Tuple[Gen, Word, int], FlatVec] = {}
        self._steps = 0

    # -- interface ----------------------------------------------------------

    def words(self) -> Tuple[Word, ...]:
        return self._words

    def component_degrees(self, word: Word) -> Tuple[int, ...]:
        return self._degrees.get(tuple(word), ())

    def strand_count(self) -> int:
        return self.m + self.n

    def decode(self, word: Word, idx: int) -> Tuple[Perm, Word, int, int]:
        return self._basis[tuple(word)][idx]

    def index_of(self, w: Perm, eta: Word, i: int, j: int) -> Tuple[Word, int]:
        return self._pos[(w, eta, i, j)]

    def pure_index(self, eta: Word, i: int, j: int) -> Tuple[Word, int]:
        return self.index_of(identity_perm(self.m + self.n), tuple(eta), i, j)

    def apply_to_basis(self, gen: Gen, word: Word, idx: int) -> FlatVec:
        key = (gen, tuple(word), idx)
        hit = self._cache.get(key)
        if hit is not None:
            return dict(hit)
        w, eta, i, j = self.decode(word, idx)
        pairs = {(i, j): MPoly.const(self.zvar_count, 1)}
        self._steps = 0
        if gen[0] == "x":
            terms = self._act_x(gen[1], w, eta, pairs)
        elif gen[0] == "tau":
            terms = self._act_tau(gen[1], w, eta, pairs)
        else:
            raise ValueError(f"unknown generator {gen!r}")
        out: FlatVec = {}
        for (w2, eta2), prs in terms.items():
            for (i2, j2), c in prs.items():
                if not c:
                    continue
                theta, t = self._pos[(w2, eta2, i2, j2)]
                _flat_add(out, {(theta, t): c})
        self._cache[key] = out
        return dict(out)

    # -- straightening engine -----------------------------------------------

    def _tick(self) -> None:
        self._steps += 1
        if self._steps > STRAIGHTENING_STEP_LIMIT:
            raise RuntimeError("straightening step limit exceeded")

    @staticmethod
    def _merge(acc, terms, scale=1) -> None:
        for key, prs in terms.items():
            slot = acc.setdefault(key, {})
            for pk, c in prs.items():
                s = c * scale if scale != 1 else c
                if not s:
                    continue
                cur = slot.get(pk)
                new = s if cur is None else cur + s
                if new:
                    slot[pk] = new
                else:
                    slot.pop(pk, None)
            if not slot:
                acc.pop(key, None)

    def _internal_x(self, p: int, eta: Word, pairs) -> Dict[Word, Dict]:
        """x_p on the pure tensor: routed into the proper factor."""
        out: Dict[Word, Dict] = {}
        mu, kappa = eta[: self.m], eta[self.m:]
        if p <= self.m:
            gen = ("x", p)
            for (i, j), c in pairs.items():
                col = self.left.apply_to_basis(gen, mu, i)
                for (mu2, i2), s in col.items():
                    v = s.extend_vars(self.zvar_count, self._embed_left) * c
                    if not v:
                        continue
                    slot = out.setdefault(mu2 + kappa, {})
                    slot[(i2, j)] = slot.get((i2, j), 0) + v
        else:
            gen = ("x", p - self.m)
            for (i, j), c in pairs.items():
                col = self.right.apply_to_basis(gen, kappa, j)
                for (k2, j2), s in col.items():
                    v = s.extend_vars(self.zvar_count, self._embed_right) * c
                    if not v:
                        continue
                    slot = out.setdefault(mu + k2, {})
                    slot[(i, j2)] = slot.get((i, j2), 0) + v
        return _prune_terms(out)

    def _internal_tau(self, a: int, eta: Word, pairs) -> Dict[Word, Dict]:
        """tau_a on the pure tensor for a strictly inside one block."""
        out: Dict[Word, Dict] = {}
        mu, kappa = eta[: self.m], eta[self.m:]
        if a <= self.m - 1:
            gen = ("tau", a)
            for (i, j), c in pairs.items():
                col = self.left.apply_to_basis(gen, mu, i)
                for (mu2, i2), s in col.items():
                    v = s.extend_vars(self.zvar_count, self._embed_left) * c
                    if not v:
                        continue
                    slot = out.setdefault(mu2 + kappa, {})
                    slot[(i2, j)] = slot.get((i2, j), 0) + v
        elif a >= self.m + 1:
            gen = ("tau", a - self.m)
            for (i, j), c in pairs.items():
                col = self.right.apply_to_basis(gen, kappa, j)
                for (k2, j2), s in col.items():
                    v = s.extend_vars(self.zvar_count, self._embed_right) * c
                    if not v:
                        continue
                    slot = out.setdefault(mu + k2, {})
                    slot[(i, j2)] = slot.get((i, j2), 0) + v
        else:
            raise AssertionError("tau index crosses the block boundary")
        return _prune_terms(out)

    def _act_x(self, p: int, w: Perm, eta: Word, pairs) -> Dict:
        self._tick()
        if not pairs:
            return {}
        total = self.m + self.n
        if w == identity_perm(total):
            return {(w, eta2): prs
                    for eta2, prs in self._internal_x(p, eta, pairs).items()}
        j0 = canonical_word(w)[0]
        w2 = perm_mult(simple_reflection(j0, total), w)
        nu = act_on_word(w2, eta)
        if p == j0:
            p2 = j0 + 1
        elif p == j0 + 1:
            p2 = j0
        else:
            p2 = p
        acc: Dict = {}
        inner = self._act_x(p2, w2, eta, pairs)
        for (w3, eta3), prs in inner.items():
            self._merge(acc, self._act_tau(j0, w3, eta3, prs))
        if nu[j0 - 1] == nu[j0]:
            if p == j0 + 1:
                self._merge(acc, {(w2, eta): pairs})
            elif p == j0:
                self._merge(acc, {(w2, eta): pairs}, -1)
        return acc

    def _act_tau(self, k: int, w: Perm, eta: Word, pairs) -> Dict:
        self._tick()
        if not pairs:
            return {}
        total = self.m + self.n
        inv = perm_inverse(w)
        pos_lo, pos_hi = inv[k - 1], inv[k]
        if pos_lo > pos_hi:
            # length drop: quadratic relation
            w2 = perm_mult(simple_reflection(k, total), w)
            nu = act_on_word(w2, eta)
            kind = q_factor_kind(nu[k - 1], nu[k])
            if kind == "zero":
                return {}
            if kind == "one":
                return {(w2, eta): dict(pairs)}
            acc: Dict = {}
            self._merge(acc, self._act_x(k, w2, eta, pairs),
                        1 if kind == "u-v" else -1)
            self._merge(acc, self._act_x(k + 1, w2, eta, pairs),
                        -1 if kind == "u-v" else 1)
            return acc
        if (pos_lo < self.m) != (pos_hi < self.m):
            # crossing strands from different blocks: exact new basis term
            return {(perm_mult(simple_reflection(k, total), w), eta):
                    dict(pairs)}
        # same block: push the crossing into the tensor factor
        a = pos_lo + 1
        if w == identity_perm(total):
            return {(w, eta2): prs
                    for eta2, prs in self._internal_tau(a, eta, pairs).items()}
        word_v = (k,) + canonical_word(w)
        _, corrections = self._transform_back(word_v, a, eta)
        acc = {(w, eta2): prs
               for eta2, prs in self._internal_tau(a, eta, pairs).items()}
        for sign, u_word in corrections:
            self._merge(acc, self._eval_word(u_word, eta, pairs), sign)
        return acc

    def _eval_word(self, letters: Sequence[int], eta: Word, pairs) -> Dict:
        terms: Dict = {(identity_perm(self.m + self.n), eta): dict(pairs)}
        for k in reversed(letters):
            nxt: Dict = {}
            for (w, eta2), prs in terms.items():
                self._merge(nxt, self._act_tau(k, w, eta2, prs))
            terms = nxt
            if not terms:
                break
        return terms

    def _transform_back(self, word: Tuple[int, ...], a: int, eta: Word):
        """Rewrite the reduced generator word so its last letter is ``a``.

        Returns ``(new_word, corrections)`` with ``corrections`` a list of
        ``(sign, shorter_word)`` contributions, all applied at source
        word ``eta``.
        """
        self._tick()
        b = word[-1]
        if b == a:
            return word, []
        eta_b = swap_letters(eta, b)
        if abs(b - a) >= 2:
            w1, corr1 = self._transform_back(word[:-1], a, eta_b)
            corr = [(s, u + (b,)) for s, u in corr1]
            return w1[:-1] + (b, a), corr
        w1, corr1 = self._transform_back(word[:-1], a, eta_b)
        eta_ab = swap_letters(eta_b, a)
        w2, corr2 = self._transform_back(w1[:-1], b, eta_ab)
        corr = [(s, u + (b,)) for s, u in corr1]
        corr += [(s, u + (a, b)) for s, u in corr2]
        dev = braid_deviation(eta, min(a, b))
        if dev:
            corr.append((dev if b > a else -dev, w2[:-1]))
        return w2[:-1] + (a, b, a), corr


def convolution(left: KLRModule, right: KLRModule) -> ConvolutionModule:
    return ConvolutionModule(left, right)


def convolution_list(mods: Sequence[KLRModule]) -> KLRModule:
    """Left-associated iterated convolution; empty input gives the unit."""
    if not mods:
        return unit_module()
    out = mods[0]
    for m in mods[1:]:
        out = convolution(out, m)
    return out


# ---------------------------------------------------------------------------
# Characters, relation checking, components
# ---------------------------------------------------------------------------

def graded_character(module: KLRModule) -> Dict[Word, LaurentHalf]:
    if module.zvar_count:
        raise ValueError("character requires a module without spectral variables")
    out: Dict[Word, LaurentHalf] = {}
    for w in module.words():
        acc = LaurentHalf.zero()
        for d in module.component_degrees(w):
            acc = acc + LaurentHalf.q_half(2 * d)
        if acc:
            out[w] = acc
    return out


class RelationReport:
    def __init__(self):
        self.failures: List[Tuple[str, Word, Tuple]] = []
        self.checked = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, name: str, word: Word, detail: Tuple) -> None:
        self.failures.append((name, word, detail))

    def __repr__(self) -> str:
        state = "pass" if self.ok else f"fail({len(self.failures)})"
        return f"RelationReport({state}, checked={self.checked})"


def _vec_eq(a: FlatVec, b: FlatVec) -> bool:
    keys = set(a) | set(b)
    zero = None
    for k in keys:
        va, vb = a.get(k), b.get(k)
        if va is None:
            if vb:
                return False
        elif vb is None:
            if va:
                return False
        elif va != vb:
            return False
    return True


def check_module_relations(module: KLRModule) -> RelationReport:
    """Verify every defining relation and grading homogeneity as identities
    on the module; failures become report entries."""
    rep = RelationReport()
    n = module.strand_count()
    for word in module.words():
        dims = len(module.component_degrees(word))
        for t in range(dims):
            v = module.unit_vector(word, t)
            # support and homogeneity of generator columns
            for gen in [("x", k) for k in range(1, n + 1)] + [
                    ("tau", k) for k in range(1, n)]:
                col = module.apply_to_basis(gen, word, t)
                want_word = (word if gen[0] == "x"
                             else swap_letters(word, gen[1]))
                gdeg = generator_degree(gen, word)
                sdeg = module.degree_of(word, t)
                for (w2, i2), c in col.items():
                    rep.checked += 1
                    if w2 != want_word:
                        rep.record("support", word, (gen, t, w2))
                    tdeg = module.degree_of(w2, i2)
                    for ex, _ in c.items():
                        if 2 * sum(ex) != sdeg + gdeg - tdeg:
                            rep.record("homogeneity", word, (gen, t, w2, i2))
                            break
            # x's commute
            for p in range(1, n + 1):
                xp = module.apply(("x", p), v)
                for r in range(p + 1, n + 1):
                    rep.checked += 1
                    lhs = module.apply(("x", r), xp)
                    rhs = module.apply(("x", p), module.apply(("x", r), v))
                    if not _vec_eq(lhs, rhs):
                        rep.record("x-commute", word, (p, r, t))
            for k in range(1, n):
                tau_v = module.apply(("tau", k), v)
                # mixed relation with its correction term
                for p in range(1, n + 1):
                    rep.checked += 1
                    lhs = module.apply(("x", p), tau_v)
                    p2 = k + 1 if p == k else (k if p == k + 1 else p)
                    rhs = module.apply(("tau", k), module.apply(("x", p2), v))
                    if word[k - 1] == word[k]:
                        if p == k + 1:
                            _flat_add(rhs, v)
                        elif p == k:
                            _flat_add(rhs, v, -1)
                    if not _vec_eq(lhs, rhs):
                        rep.record("x-tau", word, (p, k, t))
                # quadratic relation
                rep.checked += 1
                lhs = module.apply(("tau", k), tau_v)
                kind = q_factor_kind(word[k - 1], word[k])
                rhs = {}
                if kind == "one":
                    rhs = dict(v)
                elif kind != "zero":
                    rhs = {}
                    _flat_add(rhs, module.apply(("x", k), v),
                              1 if kind == "u-v" else -1)
                    _flat_add(rhs, module.apply(("x", k + 1), v),
                              -1 if kind == "u-v" else 1)
                if not _vec_eq(lhs, rhs):
                    rep.record("tau-square", word, (k, t))
                # distant crossings commute
                for l in range(k + 2, n):
                    rep.checked += 1
                    lhs = module.apply(("tau", l), tau_v)
                    rhs = module.apply(("tau", k), module.apply(("tau", l), v))
                    if not _vec_eq(lhs, rhs):
                        rep.record("tau-commute", word, (k, l, t))
            # braid deviation
            for k in range(1, n - 1):
                rep.checked += 1
                t1 = module.apply(("tau", k + 1), module.apply(
                    ("tau", k), module.apply(("tau", k + 1), v)))
                t2 = module.apply(("tau", k), module.apply(
                    ("tau", k + 1), module.apply(("tau", k), v)))
                diff = dict(t1)
                _flat_add(diff, t2, -1)
                want: FlatVec = {}
                dev = braid_deviation(word, k)
                if dev:
                    _flat_add(want, v, dev)
                if not _vec_eq(diff, want):
                    rep.record("braid", word, (k, t))
    return rep


class IdempotentComponent:
    """The span of components over words with a prescribed prefix content."""

    def __init__(self, module: KLRModule, words: Sequence[Word]):
        self.module = module
        self.words = tuple(sorted(tuple(w) for w in words))
        self.basis: List[BasisKey] = []
        for w in self.words:
            for i in range(len(module.component_degrees(w))):
                self.basis.append((w, i))
        self._index = {key: t for t, key in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def degrees(self) -> List[int]:
        return [self.module.degree_of(w, i) for w, i in self.basis]

    def operator_columns(self, gen: Gen) -> List[Dict[int, MPoly]]:
        """Matrix columns of a component-preserving generator."""
        cols: List[Dict[int, MPoly]] = []
        for key in self.basis:
            col = self.module.apply_to_basis(gen, key[0], key[1])
            out: Dict[int, MPoly] = {}
            for tgt, c in col.items():
                if not c:
                    continue
                if tgt not in self._index:
                    raise ValueError("generator leaves the component")
                out[self._index[tgt]] = c
            cols.append(out)
        return cols


def restrict_idempotent(module: KLRModule, split) -> IdempotentComponent:
    """Words whose prefix carries the first content of ``split`` (a pair of
    letter-multiplicity maps summing to the module's content)."""
    beta1 = Counter(dict(split[0]))
    beta2 = Counter(dict(split[1]))
    total = Counter(module.content())
    if beta1 + beta2 != total:
        raise ValueError("split does not sum to the module content")
    m1 = sum(beta1.values())
    selected = [w for w in module.words()
                if Counter(w[:m1]) == beta1]
    return IdempotentComponent(module, selected)


# ---------------------------------------------------------------------------
# Graded maps
# ---------------------------------------------------------------------------

class GradedMap:
    """Linear map between modules, stored by columns on basis vectors."""

    def __init__(self, source: KLRModule, target: KLRModule, degree: int,
                 columns: Dict[BasisKey, FlatVec]):
        self.source = source
        self.target = target
        self.degree = degree
        self.columns = {k: {t: c for t, c in col.items() if c}
                        for k, col in columns.items()}

    @classmethod
    def identity(cls, module: KLRModule) -> "GradedMap":
        cols = {key: module.unit_vector(*key) for key in module.basis_items()}
        return cls(module, module, 0, cols)

    def column(self, word: Word, idx: int) -> FlatVec:
        return dict(self.columns.get((tuple(word), idx), {}))

    def apply(self, vec: FlatVec) -> FlatVec:
        out: FlatVec = {}
        for key, c in vec.items():
            _flat_add(out, self.columns.get(key, {}), c)
        return out

    def compose(self, inner: "GradedMap") -> "GradedMap":
        """self after inner."""
        cols = {key: self.apply(col) for key, col in inner.columns.items()}
        return GradedMap(inner.source, self.target,
                         self.degree + inner.degree, cols)

    def scaled(self, c) -> "GradedMap":
        cols = {key: {t: v * c for t, v in col.items()}
                for key, col in self.columns.items()}
        return GradedMap(self.source, self.target, self.degree, cols)

    def is_zero(self) -> bool:
        return all(not col for col in self.columns.values())

    def check(self) -> List[Tuple[str, Tuple]]:
        """Homogeneity plus commutation with every generator on every
        basis vector; returns failures."""
        fails: List[Tuple[str, Tuple]] = []
        n = self.source.strand_count()
        for key in self.source.basis_items():
            col = self.columns.get(key, {})
            sdeg = self.source.degree_of(*key)
            for (w2, i2), c in col.items():
                tdeg = self.target.degree_of(w2, i2)
                for ex, _ in c.items():
                    if 2 * sum(ex) != sdeg + self.degree - tdeg:
                        fails.append(("homogeneity", (key, (w2, i2))))
                        break
        gens: List[Gen] = [("x", k) for k in range(1, n + 1)]
        gens += [("tau", k) for k in range(1, n)]
        for gen in gens:
            for key in self.source.basis_items():
                v = self.source.unit_vector(*key)
                lhs = self.apply(self.source.apply(gen, v))
                rhs = self.target.apply(gen, self.apply(v))
                if not _vec_eq(lhs, rhs):
                    fails.append(("equivariance", (gen, key)))
        return fails

    def basis_order(self) -> List[BasisKey]:
        return list(self.target.basis_items())

    def rank(self) -> int:
        from .linalg import rank as _rank

        order = {key: t for t, key in enumerate(self.target.basis_items())}
        rows = []
        for key in self.source.basis_items():
            col = self.columns.get(key, {})
            row = [Fraction(0)] * len(order)
            for tgt, c in col.items():
                if not c.is_constant():
                    raise ValueError("rank requires constant coefficients")
                row[order[tgt]] = c.constant_term()
            rows.append(row)
        return _rank(rows)


def conv_map(f: GradedMap, g: GradedMap, source: ConvolutionModule,
             target: ConvolutionModule) -> GradedMap:
    """Functorial product map tau_w (u (x) v) -> tau_w (f(u) (x) g(v))."""
    if f.source is not source.left or g.source is not source.right:
        raise ValueError("factor maps do not match the source product")
    if f.target is not target.left or g.target is not target.right:
        raise ValueError("factor maps do not match the target product")
    total = target.zvar_count
    eleft = tuple(range(f.target.zvar_count))
    eright = tuple(range(f.target.zvar_count, total))
    columns: Dict[BasisKey, FlatVec] = {}
    for theta in source.words():
        for t in range(len(source.component_degrees(theta))):
            w, eta, i, j = source.decode(theta, t)
            mu, kappa = eta[: source.m], eta[source.m:]
            out: FlatVec = {}
            for (mu2, i2), c in f.column(mu, i).items():
                cc = c.extend_vars(total, eleft)
                for (k2, j2), d in g.column(kappa, j).items():
                    coeff = cc * d.extend_vars(total, eright)
                    if not coeff:
                        continue
                    key2 = target.index_of(w, mu2 + k2, i2, j2)
                    _flat_add(out, {key2: coeff})
            if out:
                columns[(theta, t)] = out
    return GradedMap(source, target, f.degree + g.degree, columns)


def associativity_iso(left_assoc: ConvolutionModule,
                      right_assoc: ConvolutionModule) -> GradedMap:
    """Degree-0 isomorphism (L . M) . N -> L . (M . N) induced by the
    identity on the underlying induced module."""
    lm = left_assoc.left
    if not isinstance(lm, ConvolutionModule):
        raise ValueError("left argument must have shape (L . M) . N")
    mn = right_assoc.right
    if not isinstance(mn, ConvolutionModule):
        raise ValueError("right argument must have shape L . (M . N)")
    l_str = lm.m
    columns: Dict[BasisKey, FlatVec] = {}
    for theta in left_assoc.words():
        for t in range(len(left_assoc.component_degrees(theta))):
            w, eta, i_lm, j_n = left_assoc.decode(theta, t)
            mu_lm, kappa_n = eta[: lm.m + lm.n], eta[lm.m + lm.n:]
            v, zeta, i_l, j_m = lm.decode(mu_lm, i_lm)
            full = zeta + kappa_n
            _, j_mn = mn.pure_index(zeta[l_str:] + kappa_n, j_m, j_n)
            start_key = right_assoc.index_of(
                identity_perm(right_assoc.m + right_assoc.n), full, i_l, j_mn)
            vec = right_assoc.unit_vector(*start_key)
            word = canonical_word(w) + canonical_word(v)
            vec = right_assoc.apply_word(word, vec)
            if vec:
                columns[(theta, t)] = vec
    return GradedMap(left_assoc, right_assoc, 0, columns)


def solve_module_maps(source: KLRModule, target: KLRModule,
                      degree: int) -> List[GradedMap]:
    """Basis of the space of degree-``degree`` module maps, found by
    solving the commutation constraints over the rationals."""
    if source.zvar_count or target.zvar_count:
        raise ValueError("map solving requires spectral-variable-free modules")
    from .linalg import nullspace

    unknowns: List[Tuple[BasisKey, BasisKey]] = []
    for skey in source.basis_items():
        sdeg = source.degree_of(*skey)
        for i in range(len(target.component_degrees(skey[0]))):
            if target.degree_of(skey[0], i) == sdeg + degree:
                unknowns.append((skey, (skey[0], i)))
    if not unknowns:
        return []
    uindex = {pair: t for t, pair in enumerate(unknowns)}
    n = source.strand_count()
    gens: List[Gen] = [("x", k) for k in range(1, n + 1)]
    gens += [("tau", k) for k in range(1, n)]
    rows: List[List[Fraction]] = []
    tkeys = list(target.basis_items())
    for gen in gens:
        tcols = {key: target.apply_to_basis(gen, *key) for key in tkeys}
        for skey in source.basis_items():
            scol = source.apply_to_basis(gen, *skey)
            coeffs: Dict[Tuple[BasisKey, int], Fraction] = {}
            # f(gen . e_s): sum over u of scol[u] * f_{u, v}
            for ukey, c in scol.items():
                cv = c.constant_term()
                for i in range(len(target.component_degrees(ukey[0]))):
                    pair = (ukey, (ukey[0], i))
                    t = uindex.get(pair)
                    if t is not None:
                        coeffs[(pair[1], t)] = (
                            coeffs.get((pair[1], t), Fraction(0)) + cv)
            # gen . f(e_s): sum over t of f_{s, t} * (gen e_t)
            for i in range(len(target.component_degrees(skey[0]))):
                pair = (skey, (skey[0], i))
                t = uindex.get(pair)
                if t is None:
                    continue
                for vkey, d in tcols[pair[1]].items():
                    dv = d.constant_term()
                    if dv:
                        coeffs[(vkey, t)] = (
                            coeffs.get((vkey, t), Fraction(0)) - dv)
            by_target: Dict[BasisKey, Dict[int, Fraction]] = {}
            for (vkey, t), c in coeffs.items():
                if c:
                    by_target.setdefault(vkey, {})[t] = c
            for vkey, entries in by_target.items():
                row = [Fraction(0)] * len(unknowns)
                for t, c in entries.items():
                    row[t] = c
                rows.append(row)
    basis = nullspace(rows) if rows else [
        [Fraction(1) if i == t else Fraction(0) for i in range(len(unknowns))]
        for t in range(len(unknowns))]
    maps = []
    for sol in basis:
        columns: Dict[BasisKey, FlatVec] = {}
        for t, val in enumerate(sol):
            if not val:
                continue
            skey, tkey = unknowns[t]
            columns.setdefault(skey, {})[tkey] = MPoly.const(0, val)
        maps.append(GradedMap(source, target, degree, columns))
    return maps


def find_isomorphism(source: KLRModule, target: KLRModule, degree: int,
                     attempts: int = 12, seed: int = 0):
    """A degree-``degree`` module isomorphism, or None."""
    import random as _random

    if source.dim() != target.dim():
        return None
    basis = solve_module_maps(source, target, degree)
    for f in basis:
        if f.rank() == source.dim():
            return f
    rng = _random.Random(seed)
    for _ in range(attempts):
        columns: Dict[BasisKey, FlatVec] = {}
        for f in basis:
            c = rng.randint(-4, 4)
            if not c:
                continue
            for skey, col in f.columns.items():
                _flat_add(columns.setdefault(skey, {}),
                          col, MPoly.const(0, c))
        cand = GradedMap(source, target, degree, columns)
        if cand.rank() == source.dim():
            return cand
    return None


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _word_key(word: Word) -> str:
    return ",".join(str(a) for a in word)


def module_to_json(module: KLRModule) -> Dict:
    """Plain-dict serialization: content, words, degrees, sparse actions."""
    n = module.strand_count()
    data = {
        "beta": {str(k): v for k, v in sorted(module.content().items())},
        "spectral": list(module.zvar_names),
        "words": [list(w) for w in module.words()],
        "degrees": {_word_key(w): list(module.component_degrees(w))
                    for w in module.words()},
        "actions": {},
    }
    gens: List[Gen] = [("x", k) for k in range(1, n + 1)]
    gens += [("tau", k) for k in range(1, n)]
    for gen, label in [(g, f"{g[0]}_{g[1]}") for g in gens]:
        block = {}
        for word, idx in module.basis_items():
            col = module.apply_to_basis(gen, word, idx)
            entries = {
                f"{_word_key(w2)}|{i2}": mpoly_to_text(c, module.zvar_names)
                for (w2, i2), c in col.items() if c
            }
            if entries:
                block[f"{_word_key(word)}|{idx}"] = entries
        if block:
            data["actions"][label] = block
    return data
