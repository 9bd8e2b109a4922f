"""The free tensor algebra over a symplectic vector space, with exact
rational coefficients.

A :class:`Tensor` is a finite linear combination of words in the 2g
letters; a :class:`TruncatedSeries` is a tensor together with a weight
cutoff D and models the quotient of the completed algebra by the ideal of
weight > D.  All arithmetic is exact: coefficients are Python ints or
``fractions.Fraction`` and are never approximated.

Conventions fixed here:

* the pairing is a_i . b_i = +1 (see :func:`words.pairing_sign`); with this
  sign every necklace derivation annihilates the symplectic form, which is
  checked by the test suite;
* series operations silently drop weight > D terms, and mixing two cutoffs
  uses the minimum;
* term maps never store zero coefficients, so equality is map equality.
"""

from fractions import Fraction
from typing import Mapping

from . import words as W
from .errors import GenusMismatch, PrecisionError

Coeff = int | Fraction


def coeff_str(c: Coeff) -> str:
    return str(Fraction(c))


def parse_coeff(text: str) -> Fraction:
    return Fraction(text)


def _prune(terms: dict) -> dict:
    return {k: v for k, v in terms.items() if v != 0}


class Tensor:
    """Sparse element of the free tensor algebra: a finite map word -> coeff."""

    __slots__ = ("g", "terms")

    def __init__(self, g: int, terms: Mapping[W.WordKey, Coeff] | None = None):
        if g < 1:
            raise ValueError("genus must be >= 1")
        self.g = g
        self.terms: dict[W.WordKey, Coeff] = _prune(dict(terms or {}))
        for word in self.terms:
            W.check_letters(word, g)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, g: int) -> "Tensor":
        return cls(g)

    @classmethod
    def unit(cls, g: int) -> "Tensor":
        return cls(g, {(): 1})

    @classmethod
    def word(cls, g: int, word: W.WordKey, coeff: Coeff = 1) -> "Tensor":
        return cls(g, {tuple(word): coeff})

    @classmethod
    def letter(cls, g: int, code: int) -> "Tensor":
        return cls(g, {(code,): 1})

    # -- basic structure ----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def weight_support(self) -> list[int]:
        return sorted({len(w) for w in self.terms})

    def component(self, weight: int) -> "Tensor":
        return Tensor(self.g, {w: c for w, c in self.terms.items() if len(w) == weight})

    def max_weight(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def truncate(self, cutoff: int) -> "Tensor":
        return Tensor(self.g, {w: c for w, c in self.terms.items() if len(w) <= cutoff})

    def coefficient(self, word: W.WordKey) -> Coeff:
        return self.terms.get(tuple(word), 0)

    def _check_genus(self, other: "Tensor") -> None:
        if self.g != other.g:
            raise GenusMismatch(f"genus {self.g} != {other.g}")

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_genus(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return Tensor(self.g, out)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._check_genus(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) - c
        return Tensor(self.g, out)

    def __neg__(self) -> "Tensor":
        return Tensor(self.g, {w: -c for w, c in self.terms.items()})

    def scale(self, c: Coeff) -> "Tensor":
        if c == 0:
            return Tensor(self.g)
        return Tensor(self.g, {w: c * v for w, v in self.terms.items()})

    def __mul__(self, other: "Tensor") -> "Tensor":
        return concat_mul(self, other)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Tensor)
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
            c = self.terms[w]
            name = W.word_name(w) if w else "1"
            bits.append(f"{coeff_str(c)}*{name}")
        return " + ".join(bits)

    # -- serialization ------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "g": self.g,
            "terms": [
                {"word": W.word_name(w), "coeff": coeff_str(self.terms[w])}
                for w in sorted(self.terms, key=lambda w: (len(w), w))
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Tensor":
        g = int(data["g"])
        terms: dict[W.WordKey, Coeff] = {}
        for item in data["terms"]:
            w = W.parse_word(item["word"])
            terms[w] = terms.get(w, 0) + parse_coeff(item["coeff"])
        return cls(g, terms)


def concat_mul(x: Tensor, y: Tensor) -> Tensor:
    """Bilinear extension of word concatenation; weight-additive."""
    x._check_genus(y)
    out: dict[W.WordKey, Coeff] = {}
    for wx, cx in x.terms.items():
        for wy, cy in y.terms.items():
            w = wx + wy
            out[w] = out.get(w, 0) + cx * cy
    return Tensor(x.g, out)


def pairing(x: W.Letter | int, y: W.Letter | int) -> int:
    """Symplectic pairing of two letters, with a_i . b_i = +1."""
    cx = x.code() if isinstance(x, W.Letter) else x
    cy = y.code() if isinstance(y, W.Letter) else y
    return W.pairing_sign(cx, cy)


def omega(g: int) -> Tensor:
    """The symplectic form: sum of a_i b_i - b_i a_i over i = 1..g."""
    terms: dict[W.WordKey, Coeff] = {}
    for i in range(g):
        terms[(2 * i, 2 * i + 1)] = 1
        terms[(2 * i + 1, 2 * i)] = -1
    return Tensor(g, terms)


def cyclicize(t: Tensor) -> Tensor:
    """The cyclic symmetrizer N: sum of all rotations of each word, with
    the weight-0 component killed."""
    out: dict[W.WordKey, Coeff] = {}
    for w, c in t.terms.items():
        if not w:
            continue
        for r in W.rotations(w):
            out[r] = out.get(r, 0) + c
    return Tensor(t.g, out)


class PairTensor:
    """Finite map (word, word) -> coeff; the two-factor analogue of Tensor."""

    __slots__ = ("g", "terms")

    def __init__(self, g: int, terms: Mapping[tuple[W.WordKey, W.WordKey], Coeff] | None = None):
        self.g = g
        self.terms: dict[tuple[W.WordKey, W.WordKey], Coeff] = _prune(dict(terms or {}))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PairTensor)
            and self.g == other.g
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        bits = []
        for (u, v) in sorted(self.terms, key=lambda p: (len(p[0]) + len(p[1]), p)):
            c = self.terms[(u, v)]
            bits.append(
                f"{coeff_str(c)}*({W.word_name(u) or '1'} (x) {W.word_name(v) or '1'})"
            )
        return " + ".join(bits) if bits else "0"

    def to_json_dict(self) -> dict:
        return {
            "g": self.g,
            "terms": [
                {
                    "left": W.word_name(u),
                    "right": W.word_name(v),
                    "coeff": coeff_str(self.terms[(u, v)]),
                }
                for (u, v) in sorted(
                    self.terms, key=lambda p: (len(p[0]) + len(p[1]), p)
                )
            ],
        }


class TruncatedSeries:
    """A tensor known only modulo weight > cutoff, i.e. an element of the
    completed algebra truncated at weight D."""

    __slots__ = ("tensor", "cutoff")

    def __init__(self, tensor: Tensor, cutoff: int):
        if cutoff < 0:
            raise ValueError("cutoff must be >= 0")
        self.cutoff = cutoff
        self.tensor = tensor.truncate(cutoff)

    @property
    def g(self) -> int:
        return self.tensor.g

    @classmethod
    def unit(cls, g: int, cutoff: int) -> "TruncatedSeries":
        return cls(Tensor.unit(g), cutoff)

    @classmethod
    def from_tensor(cls, t: Tensor, cutoff: int) -> "TruncatedSeries":
        return cls(t, cutoff)

    def _common_cutoff(self, other: "TruncatedSeries") -> int:
        return min(self.cutoff, other.cutoff)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        d = self._common_cutoff(other)
        return TruncatedSeries(self.tensor + other.tensor, d)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        d = self._common_cutoff(other)
        return TruncatedSeries(self.tensor - other.tensor, d)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(-self.tensor, self.cutoff)

    def scale(self, c: Coeff) -> "TruncatedSeries":
        return TruncatedSeries(self.tensor.scale(c), self.cutoff)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self.tensor._check_genus(other.tensor)
        d = self._common_cutoff(other)
        out: dict[W.WordKey, Coeff] = {}
        for wx, cx in self.tensor.terms.items():
            if len(wx) > d:
                continue
            room = d - len(wx)
            for wy, cy in other.tensor.terms.items():
                if len(wy) > room:
                    continue
                w = wx + wy
                out[w] = out.get(w, 0) + cx * cy
        return TruncatedSeries(Tensor(self.g, out), d)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TruncatedSeries)
            and self.cutoff == other.cutoff
            and self.tensor == other.tensor
        )

    def __repr__(self) -> str:
        return f"({self.tensor!r}) mod weight>{self.cutoff}"

    def weight_zero_coeff(self) -> Coeff:
        return self.tensor.coefficient(())

    def to_json_dict(self) -> dict:
        out = self.tensor.to_json_dict()
        out["cutoff"] = self.cutoff
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "TruncatedSeries":
        return cls(Tensor.from_json_dict(data), int(data["cutoff"]))


def exp_series(s: TruncatedSeries) -> TruncatedSeries:
    """exp of a series with zero constant term, modulo the cutoff."""
    if s.weight_zero_coeff() != 0:
        raise PrecisionError("exp requires a series with zero weight-0 part")
    acc = TruncatedSeries.unit(s.g, s.cutoff)
    term = TruncatedSeries.unit(s.g, s.cutoff)
    for k in range(1, s.cutoff + 1):
        term = (term * s).scale(Fraction(1, k))
        if term.tensor.is_zero():
            break
        acc = acc + term
    return acc


def log_series(s: TruncatedSeries) -> TruncatedSeries:
    """log of a series with constant term 1, modulo the cutoff."""
    if s.weight_zero_coeff() != 1:
        raise PrecisionError("log requires a series with weight-0 part equal to 1")
    n = s - TruncatedSeries.unit(s.g, s.cutoff)
    acc = TruncatedSeries(Tensor.zero(s.g), s.cutoff)
    power = TruncatedSeries.unit(s.g, s.cutoff)
    for k in range(1, s.cutoff + 1):
        power = power * n
        if power.tensor.is_zero():
            break
        acc = acc + power.scale(Fraction((-1) ** (k + 1), k))
    return acc


def inverse_series(s: TruncatedSeries) -> TruncatedSeries:
    """Inverse of a series with constant term 1, via the geometric series."""
    if s.weight_zero_coeff() != 1:
        raise PrecisionError("inverse requires a series with weight-0 part equal to 1")
    n = s - TruncatedSeries.unit(s.g, s.cutoff)
    acc = TruncatedSeries.unit(s.g, s.cutoff)
    power = TruncatedSeries.unit(s.g, s.cutoff)
    for k in range(1, s.cutoff + 1):
        power = power * n
        if power.tensor.is_zero():
            break
        acc = acc - power if k % 2 == 1 else acc + power
    return acc


def coproduct(s: TruncatedSeries) -> PairTensor:
    """The algebra-map extension of Delta(X) = X (x) 1 + 1 (x) X on letters,
    applied termwise: each letter of a word is routed left or right."""
    out: dict[tuple[W.WordKey, W.WordKey], Coeff] = {}
    for w, c in s.tensor.terms.items():
        m = len(w)
        for mask in range(1 << m):
            left = tuple(w[i] for i in range(m) if mask >> i & 1)
            right = tuple(w[i] for i in range(m) if not mask >> i & 1)
            key = (left, right)
            out[key] = out.get(key, 0) + c
    return PairTensor(s.g, out)


def outer_square(s: TruncatedSeries) -> PairTensor:
    """s (x) s truncated to total weight <= cutoff."""
    d = s.cutoff
    out: dict[tuple[W.WordKey, W.WordKey], Coeff] = {}
    for wx, cx in s.tensor.terms.items():
        room = d - len(wx)
        for wy, cy in s.tensor.terms.items():
            if len(wy) > room:
                continue
            key = (wx, wy)
            out[key] = out.get(key, 0) + cx * cy
    return PairTensor(s.g, out)


def is_grouplike(s: TruncatedSeries) -> bool:
    """True iff Delta(s) = s (x) s modulo the cutoff."""
    return coproduct(s) == outer_square(s)


def left_bracketing(t: Tensor) -> Tensor:
    """The Dynkin map: x1...xm -> [[...[x1,x2],...],xm], extended linearly.

    By the Dynkin-Specht-Wever criterion a homogeneous weight-m tensor t is
    a Lie element iff left_bracketing(t) == m*t.
    """
    out = Tensor.zero(t.g)
    for w, c in t.terms.items():
        if not w:
            continue
        acc = Tensor.letter(t.g, w[0]).scale(c)
        for x in w[1:]:
            xt = Tensor.letter(t.g, x)
            acc = acc * xt - xt * acc
        out = out + acc
    return out


def is_lie_element(t: Tensor) -> bool:
    """True iff every homogeneous component of t is a Lie element (no
    weight-0 part allowed unless zero)."""
    if t.coefficient(()) != 0:
        return False
    for m in t.weight_support():
        comp = t.component(m)
        if left_bracketing(comp) != comp.scale(m):
            return False
    return True
