"""Cartan data, weight-lattice vectors, and permutation combinatorics.

Letters of words are integers (vertices of the doubly infinite linear
quiver).  Permutations are 0-indexed one-line tuples; simple reflections
in reduced words are 1-indexed to match the generator subscripts used by
the algebra layer (``s_k`` swaps positions ``k`` and ``k+1``).
"""
from __future__ import annotations

from collections import Counter
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

Word = Tuple[int, ...]
Perm = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Cartan data for the doubly infinite linear quiver
# ---------------------------------------------------------------------------

def sym_form(i: int, j: int) -> int:
    """Symmetric form (alpha_i, alpha_j): 2 on the diagonal, -1 for
    adjacent vertices, 0 otherwise."""
    if i == j:
        return 2
    if abs(i - j) == 1:
        return -1
    return 0


def asym_pairing(i: int, j: int) -> int:
    """Pairing <alpha_i, alpha_j> = delta_{ij}."""
    return 1 if i == j else 0


def q_factor_kind(i: int, j: int) -> str:
    """Shape of the quadratic relation coefficient Q_{i,j}(u, v).

    Returns one of ``"zero"`` (i = j), ``"u-v"`` (j = i + 1),
    ``"v-u"`` (j = i - 1) or ``"one"`` (vertices not adjacent).
    """
    if i == j:
        return "zero"
    if j == i + 1:
        return "u-v"
    if j == i - 1:
        return "v-u"
    return "one"


def word_pair_sym(mu: Sequence[int], nu: Sequence[int]) -> int:
    """Symmetric form between the letter-content roots of two words."""
    cm, cn = Counter(mu), Counter(nu)
    total = 0
    for i, a in cm.items():
        for d in (-1, 0, 1):
            b = cn.get(i + d)
            if b:
                total += a * b * sym_form(i, i + d)
    return total


def word_pair_asym(mu: Sequence[int], nu: Sequence[int]) -> int:
    """Pairing <. , .> between the letter-content roots of two words."""
    cm, cn = Counter(mu), Counter(nu)
    return sum(a * cn.get(i, 0) for i, a in cm.items())


def beta_of_word(word: Sequence[int]) -> Dict[int, int]:
    """Letter multiplicities of a word (its root content)."""
    return dict(Counter(word))


# ---------------------------------------------------------------------------
# The epsilon lattice and its twisted form
# ---------------------------------------------------------------------------

class EpsVec:
    """Finitely supported integer vector in the basis ``eps_a``, a in Z."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Dict[int, int] | None = None):
        self._c = {a: v for a, v in (coeffs or {}).items() if v}

    @classmethod
    def eps(cls, a: int) -> "EpsVec":
        return cls({a: 1})

    @classmethod
    def alpha(cls, i: int) -> "EpsVec":
        return cls({i: 1, i + 1: -1})

    @classmethod
    def beta_root(cls, a: int, n: int) -> "EpsVec":
        return cls({a: 1, a + n: -1})

    @classmethod
    def gamma_root(cls, a: int, n: int) -> "EpsVec":
        return cls({a + 1: 1, a + n: -1})

    def coeff(self, a: int) -> int:
        return self._c.get(a, 0)

    def items(self) -> List[Tuple[int, int]]:
        return sorted(self._c.items())

    def shift(self, n: int) -> "EpsVec":
        """Image under eps_a -> eps_{a+n}."""
        return EpsVec({a + n: v for a, v in self._c.items()})

    def __add__(self, other: "EpsVec") -> "EpsVec":
        out = dict(self._c)
        for a, v in other._c.items():
            out[a] = out.get(a, 0) + v
        return EpsVec(out)

    def __sub__(self, other: "EpsVec") -> "EpsVec":
        return self + (-other)

    def __neg__(self) -> "EpsVec":
        return EpsVec({a: -v for a, v in self._c.items()})

    def __mul__(self, n: int) -> "EpsVec":
        return EpsVec({a: n * v for a, v in self._c.items()})

    __rmul__ = __mul__

    def dot(self, other: "EpsVec") -> int:
        """Standard form with (eps_a, eps_b) = delta_{ab}."""
        return sum(v * other._c.get(a, 0) for a, v in self._c.items())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EpsVec) and self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def __bool__(self) -> bool:
        return bool(self._c)

    def __repr__(self) -> str:
        if not self._c:
            return "EpsVec(0)"
        terms = []
        for a, v in self.items():
            s = f"eps_{a}" if abs(v) == 1 else f"{abs(v)}*eps_{a}"
            terms.append(("-" if v < 0 else "+", s))
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        rest = "".join(f" {sgn} {s}" for sgn, s in terms[1:])
        return f"EpsVec({head}{rest})"


def b_form(x: EpsVec, y: EpsVec, n: int) -> int:
    """Asymmetric form B(x, y) = -sum_{k>0} (S^k x, y), where S shifts
    eps_a to eps_{a+n}.  Finite because both vectors have finite support."""
    if not x._c or not y._c:
        return 0
    min_x = min(x._c)
    max_y = max(y._c)
    total = 0
    k = 1
    while min_x + k * n <= max_y:
        total -= x.shift(k * n).dot(y)
        k += 1
    return total


def weight_multiplier(a: int, j: int, n: int) -> int:
    """Coefficient of the character through which the a-th central element
    scales the j-th simple root: +1 at j in {a, a+n}, -1 at
    j in {a-1, a+n-1}, 0 otherwise."""
    if j == a or j == a + n:
        return 1
    if j == a - 1 or j == a + n - 1:
        return -1
    return 0


# ---------------------------------------------------------------------------
# Permutations (0-indexed one-line tuples)
# ---------------------------------------------------------------------------

def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def perm_mult(u: Perm, v: Perm) -> Perm:
    """Composite u after v: (u*v)(i) = u(v(i))."""
    return tuple(u[v[i]] for i in range(len(v)))


def perm_inverse(w: Perm) -> Perm:
    out = [0] * len(w)
    for i, wi in enumerate(w):
        out[wi] = i
    return tuple(out)


def simple_reflection(k: int, n: int) -> Perm:
    """s_k as a permutation of {0, ..., n-1}; k is 1-indexed."""
    out = list(range(n))
    out[k - 1], out[k] = out[k], out[k - 1]
    return tuple(out)


def perm_from_word(word: Sequence[int], n: int) -> Perm:
    """Permutation s_{k_1} ... s_{k_l} for a (not necessarily reduced)
    generator word, composing left to right as functions."""
    w = identity_perm(n)
    for k in word:
        w = perm_mult(w, simple_reflection(k, n))
    return w


def perm_length(w: Perm) -> int:
    n = len(w)
    return sum(1 for i in range(n) for j in range(i + 1, n) if w[i] > w[j])


def inversions(w: Perm) -> List[Tuple[int, int]]:
    """Position pairs (i, j), i < j, 0-indexed, with w(i) > w(j)."""
    n = len(w)
    return [(i, j) for i in range(n) for j in range(i + 1, n) if w[i] > w[j]]


def left_descents(w: Perm) -> List[int]:
    """Values k (1-indexed) with the letter k placed after k+1, i.e.
    length(s_k w) < length(w)."""
    inv = perm_inverse(w)
    return [k for k in range(1, len(w)) if inv[k - 1] > inv[k]]


def act_on_word(w: Perm, eta: Sequence[int]) -> Word:
    """Place-permutation action: the letter at position i moves to
    position w(i)."""
    out = [0] * len(eta)
    for i, letter in enumerate(eta):
        out[w[i]] = letter
    return tuple(out)


@lru_cache(maxsize=None)
def canonical_word(w: Perm) -> Tuple[int, ...]:
    """Lexicographically minimal reduced word of w (greedy smallest left
    descent first)."""
    ds = left_descents(w)
    if not ds:
        return ()
    k = ds[0]
    return (k,) + canonical_word(perm_mult(simple_reflection(k, len(w)), w))


def all_reduced_words(w: Perm) -> List[Tuple[int, ...]]:
    """Every reduced word of w (exponential; intended for small cases)."""
    ds = left_descents(w)
    if not ds:
        return [()]
    out: List[Tuple[int, ...]] = []
    n = len(w)
    for k in ds:
        for rest in all_reduced_words(perm_mult(simple_reflection(k, n), w)):
            out.append((k,) + rest)
    return out


def longest_perm(n: int) -> Perm:
    return tuple(range(n - 1, -1, -1))


# -- two-block shuffles ------------------------------------------------------

def block_swap_perm(m: int, n: int) -> Perm:
    """The permutation moving the first m positions past the last n."""
    return tuple(i + n for i in range(m)) + tuple(i - m for i in range(m, m + n))


def is_block_shuffle(w: Perm, m: int) -> bool:
    """True when w is increasing on positions [0, m) and [m, len(w))."""
    n = len(w)
    return all(w[i] < w[i + 1] for i in range(m - 1)) and all(
        w[i] < w[i + 1] for i in range(m, n - 1))


def shuffles(m: int, n: int) -> Iterator[Perm]:
    """Minimal-length left coset representatives for the parabolic
    S_m x S_n inside S_{m+n}, i.e. permutations increasing on each block."""
    from itertools import combinations

    total = m + n
    for image in combinations(range(total), m):
        rest = [p for p in range(total) if p not in set(image)]
        yield tuple(image) + tuple(rest)


def shuffle_count(m: int, n: int) -> int:
    from math import comb

    return comb(m + n, m)
