"""The necklace Lie bialgebra of symplectic derivations.

A derivation of the (completed) tensor algebra annihilating the symplectic
form is identified, via the pairing, with a cyclic invariant: the sum of
all rotations N(w) of a nonempty word w.  The basis consists of N(w) for w
lexicographically minimal among its rotations.  This module implements:

* basis enumeration and the global (weight-major) basis index;
* conversion between cyclic-invariant tensors and necklace coordinates;
* the action of a necklace derivation on tensors (so the bracket can be
  certified against the commutator of actions);
* the bracket in closed splice form,
  [N(x_1..x_m), N(y_1..y_n)] =
      sum_{i,j} (x_i . y_j) N(x_{i+1}..x_{i-1} y_{j+1}..y_{j-1});
* the Schedler cobracket: the double sum splitting a necklace into two
  necklaces along a symplectic pair of its letters;
* the comodule splitting mu of a word into (word, necklace) pairs.

Bracket, cobracket and mu all lower total weight by exactly 2; terms where
a factor would be the empty necklace vanish, since N kills weight 0.

The per-genus :class:`NecklaceContext` caches rotation tables and the
index-level structure constants; everything downstream (complexes,
homology, deformations) goes through it.
"""

from bisect import bisect_left
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from . import words as W
from .errors import GenusMismatch, NotCyclic
from .tensors import Coeff, Tensor, coeff_str, parse_coeff, _prune


def _as_int_if_whole(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


def _euler_phi(n: int) -> int:
    result = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def necklace_count(g: int, m: int) -> int:
    """Number of necklaces of length m over 2g letters (Burnside)."""
    total = 0
    for d in range(1, m + 1):
        if m % d == 0:
            total += _euler_phi(d) * (2 * g) ** (m // d)
    assert total % m == 0
    return total // m


class Necklace:
    """A cyclic word, stored as its lexicographically minimal rotation."""

    __slots__ = ("word",)

    def __init__(self, word: W.WordKey):
        word = tuple(word)
        if not word:
            raise ValueError("necklaces are nonempty")
        self.word = W.canonical_rotation(word)

    @property
    def weight(self) -> int:
        return len(self.word)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Necklace) and self.word == other.word

    def __hash__(self):
        return hash(self.word)

    def __lt__(self, other: "Necklace") -> bool:
        return (self.weight, self.word) < (other.weight, other.word)

    def __repr__(self) -> str:
        return f"N({W.word_name(self.word)})"


class NecklaceContext:
    """Cached combinatorics of the genus-g necklace algebra.

    Basis necklaces carry a stable global index: weight-major, then
    lexicographic on the canonical word.  Structure constants are memoized
    at the index level with plain integer coefficients.
    """

    def __init__(self, g: int):
        if g < 1:
            raise ValueError("genus must be >= 1")
        self.g = g
        self._bases: list[list[W.WordKey]] = [[]]  # weight -> sorted canonical words
        self._offsets: list[int] = [0, 0]  # _offsets[m] = first index of weight m
        self._words_by_index: list[W.WordKey] = []
        self._index_cache: dict[W.WordKey, int] = {}
        self._bracket_memo: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {}
        self._delta_memo: dict[int, tuple[tuple[int, int, int], ...]] = {}
        self._delta_word_memo: dict[W.WordKey, tuple[tuple[W.WordKey, W.WordKey, int], ...]] = {}
        self._rot_first_memo: dict[W.WordKey, dict[int, tuple[W.WordKey, ...]]] = {}

    # -- basis enumeration and indexing --------------------------------

    def basis_words(self, m: int) -> list[W.WordKey]:
        """Sorted canonical words of weight m (m >= 1)."""
        while len(self._bases) <= m:
            mm = len(self._bases)
            seen = {W.canonical_rotation(w) for w in self._all_words(mm)}
            basis = sorted(seen)
            self._bases.append(basis)
            self._offsets.append(self._offsets[-1] + len(basis))
            self._words_by_index.extend(basis)
        return self._bases[m]

    def _all_words(self, m: int):
        from itertools import product

        return product(range(2 * self.g), repeat=m)

    def dim_weight(self, m: int) -> int:
        return len(self.basis_words(m))

    def offset(self, m: int) -> int:
        self.basis_words(m)
        return self._offsets[m]

    def index_of_word(self, word: W.WordKey) -> int:
        """Global index of the canonical word (must already be canonical)."""
        idx = self._index_cache.get(word)
        if idx is None:
            m = len(word)
            basis = self.basis_words(m)
            pos = bisect_left(basis, word)
            assert pos < len(basis) and basis[pos] == word, word
            idx = self._offsets[m] + pos
            self._index_cache[word] = idx
        return idx

    def index_of(self, n: Necklace) -> int:
        return self.index_of_word(n.word)

    def word_at(self, idx: int) -> W.WordKey:
        if idx >= len(self._words_by_index):
            raise IndexError(f"necklace index {idx} not yet enumerated")
        return self._words_by_index[idx]

    def weight_of(self, idx: int) -> int:
        return len(self.word_at(idx))

    def multidegree(self, idx: int) -> tuple[int, ...]:
        return W.multidegree(self.word_at(idx), self.g)

    # -- rotation tables ------------------------------------------------

    def rot_first(self, word: W.WordKey) -> dict[int, tuple[W.WordKey, ...]]:
        """Rotations of a necklace word grouped by first letter: the map
        first_letter -> tails (each rotation with its first letter cut)."""
        table = self._rot_first_memo.get(word)
        if table is None:
            raw: dict[int, list[W.WordKey]] = {}
            for a in range(len(word)):
                raw.setdefault(word[a], []).append(word[a + 1 :] + word[:a])
            table = {x: tuple(tails) for x, tails in raw.items()}
            self._rot_first_memo[word] = table
        return table

    def act_word(self, neck: W.WordKey, word: W.WordKey) -> list[tuple[W.WordKey, int]]:
        """Action of the derivation N(neck) on a word, as (word, coeff)
        pairs: the letter at each position is paired against every
        rotation's first letter and replaced by the rotation's tail."""
        rf = self.rot_first(neck)
        out = []
        for pos, y in enumerate(word):
            tails = rf.get(y ^ 1)
            if not tails:
                continue
            s = 1 if y % 2 == 1 else -1  # pairing of partner(y) with y
            pre, post = word[:pos], word[pos + 1 :]
            for tail in tails:
                out.append((pre + tail + post, s))
        return out

    # -- structure constants on canonical words --------------------------

    def bracket_words(self, wu: W.WordKey, wv: W.WordKey) -> dict[W.WordKey, int]:
        """[N(wu), N(wv)] as a map canonical word -> integer coeff."""
        acc: dict[W.WordKey, int] = {}
        rf_u = self.rot_first(wu)
        rf_v = self.rot_first(wv)
        for x, tails_x in rf_u.items():
            tails_y = rf_v.get(x ^ 1)
            if not tails_y:
                continue
            s = 1 if x % 2 == 0 else -1
            for tx in tails_x:
                for ty in tails_y:
                    splice = tx + ty
                    if not splice:
                        continue
                    k = W.canonical_rotation(splice)
                    c = acc.get(k, 0) + s
                    if c:
                        acc[k] = c
                    else:
                        del acc[k]
        return acc

    def delta_word(self, word: W.WordKey) -> tuple[tuple[W.WordKey, W.WordKey, int], ...]:
        """Schedler cobracket of N(word) in wedge coordinates:
        ((wa, wb, coeff), ...) with wa < wb in the basis order, meaning the
        sum of coeff * (N_a ^ N_b); the raw antisymmetric tensor carries
        coeff on (wa, wb) and -coeff on (wb, wa)."""
        memo = self._delta_word_memo.get(word)
        if memo is not None:
            return memo
        acc: dict[tuple[W.WordKey, W.WordKey], int] = {}
        m = len(word)
        for ii in range(m):
            x = word[ii]
            want = x ^ 1
            s = 1 if x % 2 == 0 else -1
            for jj in range(ii + 1, m):
                if word[jj] != want:
                    continue
                left = word[ii + 1 : jj]
                right = word[jj + 1 :] + word[:ii]
                if not left or not right:
                    continue
                la = W.canonical_rotation(left)
                ra = W.canonical_rotation(right)
                ka, kb = (len(la), la), (len(ra), ra)
                if ka < kb:
                    key, c = (la, ra), s
                elif kb < ka:
                    key, c = (ra, la), -s
                else:
                    continue
                acc[key] = acc.get(key, 0) + c
        memo = tuple(
            (a, b, c)
            for (a, b), c in sorted(
                acc.items(), key=lambda kv: (len(kv[0][0]), kv[0][0], len(kv[0][1]), kv[0][1])
            )
            if c
        )
        if m <= 12:
            self._delta_word_memo[word] = memo
        return memo

    def mu_word(self, word: W.WordKey) -> list[tuple[W.WordKey, W.WordKey, int]]:
        """mu of a basis word: list of (word, canonical necklace, coeff).

        Each symplectic pair of letters at positions i < j is cut out; what
        was between them becomes a necklace, the outside stays a word."""
        out = []
        m = len(word)
        for ii in range(m):
            x = word[ii]
            want = x ^ 1
            s = 1 if x % 2 == 0 else -1
            for jj in range(ii + 1, m):
                if word[jj] != want:
                    continue
                neck = word[ii + 1 : jj]
                if not neck:
                    continue
                rest = word[:ii] + word[jj + 1 :]
                out.append((rest, W.canonical_rotation(neck), s))
        return out

    # -- index-level tables for matrix assembly ---------------------------
    #
    # These are only valid in bounded-weight cells: all outputs are
    # reindexed through index_of_word, so the relevant bases must be small
    # enough to enumerate (cell assembly guarantees that).

    def bracket_idx(self, i: int, j: int) -> tuple[tuple[int, int], ...]:
        """[N_i, N_j] as ((necklace index, integer coeff), ...)."""
        if i > j:
            return tuple((k, -c) for k, c in self.bracket_idx(j, i))
        memo = self._bracket_memo.get((i, j))
        if memo is None:
            words = self.bracket_words(self.word_at(i), self.word_at(j))
            acc = {self.index_of_word(w): c for w, c in words.items()}
            memo = tuple(sorted(acc.items()))
            self._bracket_memo[(i, j)] = memo
        return memo

    def delta_wedge(self, idx: int) -> tuple[tuple[int, int, int], ...]:
        """Index-level form of delta_word."""
        memo = self._delta_memo.get(idx)
        if memo is None:
            memo = tuple(
                (self.index_of_word(wa), self.index_of_word(wb), c)
                for wa, wb, c in self.delta_word(self.word_at(idx))
            )
            self._delta_memo[idx] = memo
        return memo

    def mu_terms(self, word: W.WordKey) -> list[tuple[W.WordKey, int, int]]:
        """Index-level form of mu_word."""
        return [(rest, self.index_of_word(neck), s) for rest, neck, s in self.mu_word(word)]


@lru_cache(maxsize=None)
def algebra(g: int) -> NecklaceContext:
    return NecklaceContext(g)


def necklace_basis(g: int, m: int) -> list[Necklace]:
    """All rotation-minimal necklaces of weight m, sorted; the count is the
    standard necklace-counting number."""
    if m < 1:
        raise ValueError("necklace weight must be >= 1")
    return [Necklace(w) for w in algebra(g).basis_words(m)]


class DerivationElem:
    """Element of the necklace Lie algebra: a finite map Necklace -> coeff,
    stored over canonical words."""

    __slots__ = ("g", "terms")

    def __init__(self, g: int, terms: Mapping[W.WordKey, Coeff] | None = None):
        self.g = g
        clean: dict[W.WordKey, Coeff] = {}
        for w, c in (terms or {}).items():
            if c == 0:
                continue
            W.check_letters(w, g)
            cw = W.canonical_rotation(tuple(w))
            clean[cw] = clean.get(cw, 0) + c
        self.terms = _prune(clean)

    @classmethod
    def zero(cls, g: int) -> "DerivationElem":
        return cls(g)

    @classmethod
    def necklace(cls, g: int, word: W.WordKey, coeff: Coeff = 1) -> "DerivationElem":
        return cls(g, {tuple(word): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def weight_support(self) -> list[int]:
        return sorted({len(w) for w in self.terms})

    def min_weight(self) -> int:
        return min((len(w) for w in self.terms), default=0)

    def component(self, m: int) -> "DerivationElem":
        return DerivationElem(self.g, {w: c for w, c in self.terms.items() if len(w) == m})

    def truncate(self, cutoff: int) -> "DerivationElem":
        return DerivationElem(
            self.g, {w: c for w, c in self.terms.items() if len(w) <= cutoff}
        )

    def _check_genus(self, other: "DerivationElem") -> None:
        if self.g != other.g:
            raise GenusMismatch(f"genus {self.g} != {other.g}")

    def __add__(self, other: "DerivationElem") -> "DerivationElem":
        self._check_genus(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return DerivationElem(self.g, out)

    def __sub__(self, other: "DerivationElem") -> "DerivationElem":
        self._check_genus(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) - c
        return DerivationElem(self.g, out)

    def __neg__(self) -> "DerivationElem":
        return DerivationElem(self.g, {w: -c for w, c in self.terms.items()})

    def scale(self, c: Coeff) -> "DerivationElem":
        if c == 0:
            return DerivationElem(self.g)
        return DerivationElem(self.g, {w: c * v for w, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, DerivationElem)
            and self.g == other.g
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.g, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            bits.append(f"{coeff_str(self.terms[w])}*N({W.word_name(w)})")
        return " + ".join(bits)

    def sorted_terms(self) -> list[tuple[W.WordKey, Coeff]]:
        return [(w, self.terms[w]) for w in sorted(self.terms, key=lambda w: (len(w), w))]

    def to_json_dict(self) -> dict:
        return {
            "g": self.g,
            "terms": [
                {"necklace": W.word_name(w), "coeff": coeff_str(c)}
                for w, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DerivationElem":
        g = int(data["g"])
        terms: dict[W.WordKey, Coeff] = {}
        for item in data["terms"]:
            w = W.parse_word(item["necklace"])
            terms[w] = terms.get(w, 0) + parse_coeff(item["coeff"])
        return cls(g, terms)


class BiDerivationElem:
    """Finite map (Necklace, Necklace) -> coeff: a two-factor derivation
    tensor, e.g. the value of the cobracket."""

    __slots__ = ("g", "terms")

    def __init__(
        self, g: int, terms: Mapping[tuple[W.WordKey, W.WordKey], Coeff] | None = None
    ):
        self.g = g
        clean: dict[tuple[W.WordKey, W.WordKey], Coeff] = {}
        for (u, v), c in (terms or {}).items():
            if c == 0:
                continue
            key = (W.canonical_rotation(tuple(u)), W.canonical_rotation(tuple(v)))
            clean[key] = clean.get(key, 0) + c
        self.terms = _prune(clean)

    def is_zero(self) -> bool:
        return not self.terms

    def swap(self) -> "BiDerivationElem":
        return BiDerivationElem(self.g, {(v, u): c for (u, v), c in self.terms.items()})

    def __add__(self, other: "BiDerivationElem") -> "BiDerivationElem":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BiDerivationElem(self.g, out)

    def __sub__(self, other: "BiDerivationElem") -> "BiDerivationElem":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) - c
        return BiDerivationElem(self.g, out)

    def __neg__(self) -> "BiDerivationElem":
        return BiDerivationElem(self.g, {k: -c for k, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BiDerivationElem)
            and self.g == other.g
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for (u, v) in sorted(self.terms, key=lambda p: (len(p[0]) + len(p[1]), p)):
            c = self.terms[(u, v)]
            bits.append(f"{coeff_str(c)}*N({W.word_name(u)})(x)N({W.word_name(v)})")
        return " + ".join(bits)

    def sorted_terms(self):
        return [
            (k, self.terms[k])
            for k in sorted(self.terms, key=lambda p: (len(p[0]) + len(p[1]), p))
        ]

    def to_json_dict(self) -> dict:
        return {
            "g": self.g,
            "terms": [
                {"left": W.word_name(u), "right": W.word_name(v), "coeff": coeff_str(c)}
                for (u, v), c in self.sorted_terms()
            ],
        }


class TensorDerivElem:
    """Finite map (word, Necklace) -> coeff: the target of mu."""

    __slots__ = ("g", "terms")

    def __init__(
        self, g: int, terms: Mapping[tuple[W.WordKey, W.WordKey], Coeff] | None = None
    ):
        self.g = g
        clean: dict[tuple[W.WordKey, W.WordKey], Coeff] = {}
        for (m, v), c in (terms or {}).items():
            if c == 0:
                continue
            key = (tuple(m), W.canonical_rotation(tuple(v)))
            clean[key] = clean.get(key, 0) + c
        self.terms = _prune(clean)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "TensorDerivElem") -> "TensorDerivElem":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return TensorDerivElem(self.g, out)

    def __sub__(self, other: "TensorDerivElem") -> "TensorDerivElem":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) - c
        return TensorDerivElem(self.g, out)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TensorDerivElem)
            and self.g == other.g
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for (m, v) in sorted(self.terms, key=lambda p: (len(p[0]) + len(p[1]), p)):
            c = self.terms[(m, v)]
            bits.append(
                f"{coeff_str(c)}*({W.word_name(m) or '1'})(x)N({W.word_name(v)})"
            )
        return " + ".join(bits)

    def sorted_terms(self):
        return [
            (k, self.terms[k])
            for k in sorted(self.terms, key=lambda p: (len(p[0]) + len(p[1]), p))
        ]

    def to_json_dict(self) -> dict:
        return {
            "g": self.g,
            "terms": [
                {"word": W.word_name(m), "necklace": W.word_name(v), "coeff": coeff_str(c)}
                for (m, v), c in self.sorted_terms()
            ],
        }


# -- operations ---------------------------------------------------------


def necklace_normal_form(t: Tensor) -> DerivationElem:
    """Express a cyclic-invariant tensor in the necklace basis.

    A word of weight m with r distinct rotations appears in N(w) with
    multiplicity m/r, so the basis coefficient is (tensor coefficient) * r/m.
    Raises NotCyclic if some homogeneous component is not rotation-invariant.
    """
    out: dict[W.WordKey, Coeff] = {}
    seen: set[W.WordKey] = set()
    for w, c in t.terms.items():
        if not w:
            raise NotCyclic("weight-0 component cannot be a cyclic invariant")
        cw = W.canonical_rotation(w)
        if cw in seen:
            continue
        seen.add(cw)
        m = len(cw)
        r = W.rotation_class_size(cw)
        rots = {cw[i:] + cw[:i] for i in range(m)}
        for rot in rots:
            if t.terms.get(rot, 0) != c:
                raise NotCyclic(
                    f"coefficients differ on rotations of {W.word_name(cw)!r}"
                )
        gamma = Fraction(r, m) * c if m != r else c
        out[cw] = _as_int_if_whole(gamma)
    return DerivationElem(t.g, out)


def derivation_tensor(u: DerivationElem) -> Tensor:
    """The cyclic-invariant tensor sum c_w N(w) represented by u."""
    out: dict[W.WordKey, Coeff] = {}
    for w, c in u.terms.items():
        for rot in W.rotations(w):
            out[rot] = out.get(rot, 0) + c
    return Tensor(u.g, out)


def derivation_apply(u: DerivationElem, t: Tensor) -> Tensor:
    """Apply the derivation u to a tensor, extending the action on letters
    by the Leibniz rule.  Output weight is wt(u) + wt(t) - 2 termwise."""
    if u.g != t.g:
        raise GenusMismatch(f"genus {u.g} != {t.g}")
    ctx = algebra(u.g)
    out: dict[W.WordKey, Coeff] = {}
    for nw, cn in u.terms.items():
        for word, cw in t.terms.items():
            c = cn * cw
            for neww, s in ctx.act_word(nw, word):
                out[neww] = out.get(neww, 0) + c * s
    return Tensor(t.g, out)


def module_action(u: DerivationElem, t: Tensor) -> Tensor:
    """The left action of the necklace algebra on the tensor algebra."""
    return derivation_apply(u, t)


def sigma_bar(t: Tensor, u: DerivationElem) -> Tensor:
    """The right-action convention: sigma_bar(m (x) X) = -X m."""
    return -derivation_apply(u, t)


def bracket(u: DerivationElem, v: DerivationElem) -> DerivationElem:
    """Lie bracket in closed splice form; certified against the commutator
    of derivation actions by the verification suite."""
    u._check_genus(v)
    ctx = algebra(u.g)
    acc: dict[W.WordKey, Coeff] = {}
    for wu, cu in u.terms.items():
        for wv, cv in v.terms.items():
            c = cu * cv
            for k, s in ctx.bracket_words(wu, wv).items():
                acc[k] = acc.get(k, 0) + c * s
    return DerivationElem(u.g, acc)


def schedler_delta(u: DerivationElem) -> BiDerivationElem:
    """The cobracket: split each necklace along every symplectic pair of
    letters into an antisymmetrized pair of necklaces."""
    ctx = algebra(u.g)
    acc: dict[tuple[W.WordKey, W.WordKey], Coeff] = {}
    for nw, cn in u.terms.items():
        for wa, wb, s in ctx.delta_word(nw):
            acc[(wa, wb)] = acc.get((wa, wb), 0) + cn * s
            acc[(wb, wa)] = acc.get((wb, wa), 0) - cn * s
    return BiDerivationElem(u.g, acc)


def exp_derivation(u: DerivationElem, t: Tensor, cutoff: int) -> Tensor:
    """exp(D_u) applied to a tensor, truncated at the weight cutoff.

    Components of u must have weight >= 3 so that each application raises
    word weight and the series terminates below the cutoff (weight-2
    components act weight-preservingly and would produce non-rational
    exponentials)."""
    from .errors import MinWeightTooLow

    if not u.is_zero() and u.min_weight() < 3:
        raise MinWeightTooLow("exp of a derivation needs components of weight >= 3")
    acc = t.truncate(cutoff)
    term = t.truncate(cutoff)
    k = 1
    while True:
        term = derivation_apply(u, term).truncate(cutoff).scale(Fraction(1, k))
        if term.is_zero():
            break
        acc = acc + term
        k += 1
    return acc


def mu_alg(t: Tensor) -> TensorDerivElem:
    """The comodule splitting of a tensor: cut out each symplectic pair of
    letter positions i < j; the inside becomes a necklace, the outside a
    word."""
    ctx = algebra(t.g)
    acc: dict[tuple[W.WordKey, W.WordKey], Coeff] = {}
    for word, c in t.terms.items():
        for rest, neck, s in ctx.mu_word(word):
            key = (rest, neck)
            acc[key] = acc.get(key, 0) + c * s
    return TensorDerivElem(t.g, acc)
