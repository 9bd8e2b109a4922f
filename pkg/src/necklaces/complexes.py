"""Weight-graded Chevalley-Eilenberg chain and cochain operators.

Wedge monomials are strictly increasing tuples of global necklace indices
(weight-major order), so a cell (p, w) is the span of all p-tuples of
total weight w.  A monomial with a repeated factor is zero; every emitted
term is re-sorted with the sign of the sorting permutation.  Module cells
pair a plain word with a wedge tuple; the word's length counts toward the
total weight.

Operators, with 1-based signs as usual:

* boundary:  sum_{i<j} (-1)^{i+j} [X_i, X_j] ^ (rest)        (p, w) -> (p-1, w-2)
* sigma(Y):  sum_i X_1 ^ ... ^ [Y, X_i] ^ ... ^ X_p          degree-preserving
* cochain d: sum_i (-1)^i (delta X_i) ^ (rest)               (p, w) -> (p+1, w-2)
* Gamma:     sum_i (-1)^i (X_i m) (x) (rest)
* module boundary:  Gamma + 1 (x) boundary
* module cochain d: mu(m) ^ xi - m (x) d xi

The cobracket and comodule maps are supplied as handles so that deformed
structures can be assembled through the same code path; the handles for
the canonical (Schedler) structure are :class:`AlgCobracket` and
:class:`AlgComodule`.
"""

from bisect import bisect_left
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Protocol, Sequence

from . import words as W
from .errors import GenusMismatch
from .lie import DerivationElem, NecklaceContext, algebra
from .linalg import SparseRationalMatrix
from .tensors import Coeff, coeff_str, parse_coeff, _prune

WedgeKey = tuple[int, ...]
ModKey = tuple[W.WordKey, WedgeKey]


# -- handles ---------------------------------------------------------------


class CobracketHandle(Protocol):
    g: int
    name: str
    max_weight: int | None

    def wedge_terms(self, idx: int) -> Sequence[tuple[int, int, Coeff]]:
        """delta of the basis necklace as ((a, b, coeff), ...) with a < b."""
        ...


class ComoduleHandle(Protocol):
    g: int
    name: str
    max_weight: int | None

    def mu_terms(self, word: W.WordKey) -> Sequence[tuple[W.WordKey, int, Coeff]]:
        """mu of a basis word as ((word, necklace index, coeff), ...)."""
        ...


class AlgCobracket:
    """The canonical necklace cobracket as an assembly handle."""

    max_weight = None
    name = "alg"

    def __init__(self, g: int):
        self.g = g
        self._ctx = algebra(g)

    def wedge_terms(self, idx: int):
        return self._ctx.delta_wedge(idx)


class AlgComodule:
    """The canonical word-splitting comodule map as an assembly handle."""

    max_weight = None
    name = "alg"

    def __init__(self, g: int):
        self.g = g
        self._ctx = algebra(g)

    def mu_terms(self, word: W.WordKey):
        return self._ctx.mu_terms(word)


# -- bases ------------------------------------------------------------------


class WedgeBasis:
    """Ordered basis of the (p, w) cell of the exterior algebra."""

    __slots__ = ("g", "p", "w", "monomials", "position")

    def __init__(self, g: int, p: int, w: int):
        self.g, self.p, self.w = g, p, w
        ctx = algebra(g)
        self.monomials: list[WedgeKey] = list(_wedge_tuples(ctx, p, w))
        self.position: dict[WedgeKey, int] = {
            t: i for i, t in enumerate(self.monomials)
        }

    def dim(self) -> int:
        return len(self.monomials)

    def describe(self, i: int) -> str:
        ctx = algebra(self.g)
        parts = [f"N({W.word_name(ctx.word_at(k))})" for k in self.monomials[i]]
        return "^".join(parts) if parts else "1"

    def __repr__(self) -> str:
        return f"WedgeBasis(g={self.g}, p={self.p}, w={self.w}, dim={self.dim()})"


def _wedge_tuples(ctx: NecklaceContext, p: int, w: int):
    """Strictly increasing index tuples of total weight w, lexicographic."""
    if p == 0:
        if w == 0:
            yield ()
        return
    if w < p:
        return

    def rec(start: int, slots: int, rem: int, prefix: tuple):
        if slots == 0:
            if rem == 0:
                yield prefix
            return
        idx = start
        top = ctx.offset(rem - slots + 2)  # first index of weight > rem-(slots-1)
        while idx < top:
            wt = ctx.weight_of(idx)
            if wt * slots > rem:
                break
            yield from rec(idx + 1, slots - 1, rem - wt, prefix + (idx,))
            idx += 1

    yield from rec(0, p, w, ())


class ModWedgeBasis:
    """Ordered basis of the (p, w) module cell: (word, wedge tuple) pairs
    with len(word) + wedge weight = w."""

    __slots__ = ("g", "p", "w", "monomials", "position")

    def __init__(self, g: int, p: int, w: int):
        self.g, self.p, self.w = g, p, w
        mons: list[ModKey] = []
        for k in range(w + 1):
            sub = wedge_basis(g, p, w - k).monomials
            if not sub:
                continue
            for word in product(range(2 * g), repeat=k):
                for t in sub:
                    mons.append((word, t))
        self.monomials = mons
        self.position = {m: i for i, m in enumerate(mons)}

    def dim(self) -> int:
        return len(self.monomials)

    def describe(self, i: int) -> str:
        word, t = self.monomials[i]
        ctx = algebra(self.g)
        wedge = "^".join(f"N({W.word_name(k2)})" for k2 in map(ctx.word_at, t))
        return f"({W.word_name(word) or '1'})(x)({wedge or '1'})"

    def __repr__(self) -> str:
        return f"ModWedgeBasis(g={self.g}, p={self.p}, w={self.w}, dim={self.dim()})"


@lru_cache(maxsize=None)
def wedge_basis(g: int, p: int, w: int) -> WedgeBasis:
    return WedgeBasis(g, p, w)


@lru_cache(maxsize=None)
def mod_wedge_basis(g: int, p: int, w: int) -> ModWedgeBasis:
    return ModWedgeBasis(g, p, w)


# -- chain vectors ----------------------------------------------------------


class ChainVector:
    """Sparse element of a wedge cell: basis positions -> coefficients."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: WedgeBasis, coeffs: Mapping[int, Coeff] | None = None):
        self.basis = basis
        self.coeffs: dict[int, Coeff] = _prune(dict(coeffs or {}))

    @classmethod
    def from_terms(cls, basis: WedgeBasis, terms: Iterable[tuple[WedgeKey, Coeff]]):
        acc: dict[int, Coeff] = {}
        for t, c in terms:
            i = basis.position[t]
            acc[i] = acc.get(i, 0) + c
        return cls(basis, acc)

    def is_zero(self) -> bool:
        return not self.coeffs

    def cell(self) -> tuple[int, int]:
        return (self.basis.p, self.basis.w)

    def _check(self, other: "ChainVector"):
        if self.basis is not other.basis and (
            self.basis.g != other.basis.g
            or self.basis.p != other.basis.p
            or self.basis.w != other.basis.w
        ):
            raise ValueError("chain vectors live in different cells")

    def __add__(self, other: "ChainVector") -> "ChainVector":
        self._check(other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) + c
        return ChainVector(self.basis, out)

    def __sub__(self, other: "ChainVector") -> "ChainVector":
        self._check(other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) - c
        return ChainVector(self.basis, out)

    def __neg__(self) -> "ChainVector":
        return ChainVector(self.basis, {i: -c for i, c in self.coeffs.items()})

    def scale(self, c: Coeff) -> "ChainVector":
        if c == 0:
            return ChainVector(self.basis)
        return ChainVector(self.basis, {i: c * v for i, v in self.coeffs.items()})

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ChainVector)
            and self.cell() == other.cell()
            and self.basis.g == other.basis.g
            and self.coeffs == other.coeffs
        )

    def terms(self) -> list[tuple[WedgeKey, Coeff]]:
        return [(self.basis.monomials[i], self.coeffs[i]) for i in sorted(self.coeffs)]

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(
            f"{coeff_str(c)}*{self.basis.describe(i)}" for i, c in sorted(self.coeffs.items())
        )

    def to_json_dict(self) -> dict:
        ctx = algebra(self.basis.g)
        return {
            "g": self.basis.g,
            "p": self.basis.p,
            "w": self.basis.w,
            "terms": [
                {
                    "wedge": [W.word_name(ctx.word_at(k)) for k in self.basis.monomials[i]],
                    "coeff": coeff_str(c),
                }
                for i, c in sorted(self.coeffs.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ChainVector":
        g, p, w = int(data["g"]), int(data["p"]), int(data["w"])
        basis = wedge_basis(g, p, w)
        ctx = algebra(g)
        terms = []
        for item in data["terms"]:
            idxs = [ctx.index_of_word(W.canonical_rotation(W.parse_word(s))) for s in item["wedge"]]
            key, sign = _sort_wedge(tuple(idxs))
            if sign == 0:
                continue
            terms.append((key, sign * parse_coeff(item["coeff"])))
        return cls.from_terms(basis, terms)


class ModChainVector:
    """Sparse element of a module cell (word tensor wedge)."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: ModWedgeBasis, coeffs: Mapping[int, Coeff] | None = None):
        self.basis = basis
        self.coeffs: dict[int, Coeff] = _prune(dict(coeffs or {}))

    @classmethod
    def from_terms(cls, basis: ModWedgeBasis, terms: Iterable[tuple[ModKey, Coeff]]):
        acc: dict[int, Coeff] = {}
        for t, c in terms:
            i = basis.position[t]
            acc[i] = acc.get(i, 0) + c
        return cls(basis, acc)

    def is_zero(self) -> bool:
        return not self.coeffs

    def cell(self) -> tuple[int, int]:
        return (self.basis.p, self.basis.w)

    def __add__(self, other: "ModChainVector") -> "ModChainVector":
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) + c
        return ModChainVector(self.basis, out)

    def __sub__(self, other: "ModChainVector") -> "ModChainVector":
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) - c
        return ModChainVector(self.basis, out)

    def scale(self, c: Coeff) -> "ModChainVector":
        if c == 0:
            return ModChainVector(self.basis)
        return ModChainVector(self.basis, {i: c * v for i, v in self.coeffs.items()})

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ModChainVector)
            and self.cell() == other.cell()
            and self.basis.g == other.basis.g
            and self.coeffs == other.coeffs
        )

    def terms(self) -> list[tuple[ModKey, Coeff]]:
        return [(self.basis.monomials[i], self.coeffs[i]) for i in sorted(self.coeffs)]

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(
            f"{coeff_str(c)}*{self.basis.describe(i)}" for i, c in sorted(self.coeffs.items())
        )


# -- sign helpers ------------------------------------------------------------


def _insert1(tup: WedgeKey, k: int):
    """Insert one index into a sorted tuple: (sign, new tuple) or None."""
    pos = bisect_left(tup, k)
    if pos < len(tup) and tup[pos] == k:
        return None
    return (1 if pos % 2 == 0 else -1), tup[:pos] + (k,) + tup[pos:]


def _insert2(tup: WedgeKey, a: int, b: int):
    """Insert two indices a < b: (sign, new tuple) or None on repeats."""
    ia = bisect_left(tup, a)
    if ia < len(tup) and tup[ia] == a:
        return None
    ib = bisect_left(tup, b)
    if ib < len(tup) and tup[ib] == b:
        return None
    sign = 1 if (ia + ib) % 2 == 0 else -1
    first = tup[:ia] + (a,) + tup[ia:]
    return sign, first[: ib + 1] + (b,) + first[ib + 1 :]


def _sort_wedge(idxs: WedgeKey):
    """Sort an arbitrary index tuple: (sorted tuple, permutation sign);
    sign 0 when an index repeats."""
    arr = list(idxs)
    sign = 1
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(arr)):
        if arr[i - 1] == arr[i]:
            return tuple(arr), 0
    return tuple(arr), sign


# -- monomial-level emissions -------------------------------------------------


def boundary_monomial(ctx: NecklaceContext, tup: WedgeKey):
    out = []
    p = len(tup)
    for ii in range(p):
        for jj in range(ii + 1, p):
            terms = ctx.bracket_idx(tup[ii], tup[jj])
            if not terms:
                continue
            rest = tup[:ii] + tup[ii + 1 : jj] + tup[jj + 1 :]
            s0 = -1 if (ii + jj) % 2 == 1 else 1  # (-1)^{i+j} = (-1)^{ii+jj}, 1-based
            for k, c in terms:
                ins = _insert1(rest, k)
                if ins:
                    sgn, newtup = ins
                    out.append((newtup, s0 * sgn * c))
    return out


def sigma_monomial(ctx: NecklaceContext, y_idx: int, tup: WedgeKey):
    out = []
    for ii in range(len(tup)):
        terms = ctx.bracket_idx(y_idx, tup[ii])
        if not terms:
            continue
        rest = tup[:ii] + tup[ii + 1 :]
        si = 1 if ii % 2 == 0 else -1
        for k, c in terms:
            ins = _insert1(rest, k)
            if ins:
                sgn, newtup = ins
                out.append((newtup, si * sgn * c))
    return out


def cochain_monomial(ctx: NecklaceContext, delta: CobracketHandle, tup: WedgeKey):
    out = []
    for ii in range(len(tup)):
        terms = delta.wedge_terms(tup[ii])
        if not terms:
            continue
        rest = tup[:ii] + tup[ii + 1 :]
        s0 = -1 if ii % 2 == 0 else 1  # (-1)^i, 1-based
        for a, b, c in terms:
            ins = _insert2(rest, a, b)
            if ins:
                sgn, newtup = ins
                out.append((newtup, s0 * sgn * c))
    return out


def gamma_monomial(ctx: NecklaceContext, word: W.WordKey, tup: WedgeKey):
    out = []
    for ii in range(len(tup)):
        rest = tup[:ii] + tup[ii + 1 :]
        s0 = -1 if ii % 2 == 0 else 1  # (-1)^i, 1-based
        neck = ctx.word_at(tup[ii])
        for neww, s in ctx.act_word(neck, word):
            out.append(((neww, rest), s0 * s))
    return out


def mod_boundary_monomial(ctx: NecklaceContext, mono: ModKey):
    word, tup = mono
    out = gamma_monomial(ctx, word, tup)
    for newtup, c in boundary_monomial(ctx, tup):
        out.append(((word, newtup), c))
    return out


def mod_cochain_monomial(
    ctx: NecklaceContext, delta: CobracketHandle, mu: ComoduleHandle, mono: ModKey
):
    # d(m (x) xi) = mu(m) ^ xi - m (x) d xi.  The relative minus (constant
    # in p) is forced: the unit-word part of d*boundary + boundary*d reduces
    # to a multiple of the wedge-level anticommutator only when the sign of
    # the m (x) d xi term does not depend on p, and the p = 0, 1 cells pin
    # it to -1 given our splitting conventions.  A p-dependent sign here
    # provably breaks the p = 2 module cells (genus 2, weight 6).
    word, tup = mono
    out = []
    for w2, k, c in mu.mu_terms(word):
        ins = _insert1(tup, k)
        if ins:
            sgn, newtup = ins
            out.append(((w2, newtup), c * sgn))
    for newtup, c in cochain_monomial(ctx, delta, tup):
        out.append(((word, newtup), -c))
    return out


# -- operators on chain vectors ----------------------------------------------


def boundary(x: ChainVector) -> ChainVector:
    """Chevalley-Eilenberg boundary; lands in (p-1, w-2); zero on p = 1."""
    b = x.basis
    if b.p < 1:
        raise ValueError("boundary needs p >= 1")
    ctx = algebra(b.g)
    target = wedge_basis(b.g, b.p - 1, b.w - 2) if b.w >= 2 else wedge_basis(b.g, b.p - 1, 0)
    acc: dict[int, Coeff] = {}
    for i, c in x.coeffs.items():
        for t, s in boundary_monomial(ctx, b.monomials[i]):
            j = target.position[t]
            acc[j] = acc.get(j, 0) + c * s
    return ChainVector(target, acc)


def sigma_wedge(y: DerivationElem, x: ChainVector) -> ChainVector:
    """Diagonal action of a weight-homogeneous derivation on a wedge cell."""
    ws = y.weight_support()
    if len(ws) > 1:
        raise ValueError("sigma_wedge needs a weight-homogeneous derivation")
    b = x.basis
    if y.g != b.g:
        raise GenusMismatch(f"genus {y.g} != {b.g}")
    if not ws:
        return ChainVector(wedge_basis(b.g, b.p, b.w))
    target = wedge_basis(b.g, b.p, max(b.w + ws[0] - 2, 0))
    if x.is_zero():
        return ChainVector(target)
    ctx = algebra(b.g)
    acc: dict[int, Coeff] = {}
    for nw, cy in y.terms.items():
        y_idx = ctx.index_of_word(nw)
        for i, c in x.coeffs.items():
            for t, s in sigma_monomial(ctx, y_idx, b.monomials[i]):
                j = target.position[t]
                acc[j] = acc.get(j, 0) + c * cy * s
    return ChainVector(target, acc)


def cochain_d(x: ChainVector, delta: CobracketHandle) -> ChainVector:
    """Cobracket-induced coboundary; lands in (p+1, w-2); 0 on scalars."""
    b = x.basis
    ctx = algebra(b.g)
    if b.p == 0 or b.w < 2:
        return ChainVector(wedge_basis(b.g, b.p + 1, max(b.w - 2, 0)))
    target = wedge_basis(b.g, b.p + 1, b.w - 2)
    acc: dict[int, Coeff] = {}
    for i, c in x.coeffs.items():
        for t, s in cochain_monomial(ctx, delta, b.monomials[i]):
            j = target.position[t]
            acc[j] = acc.get(j, 0) + c * s
    return ChainVector(target, acc)


def mod_boundary(x: ModChainVector) -> ModChainVector:
    """Module boundary Gamma + 1 (x) boundary; lands in (p-1, w-2)."""
    b = x.basis
    if b.p < 1:
        raise ValueError("module boundary needs p >= 1")
    ctx = algebra(b.g)
    target = mod_wedge_basis(b.g, b.p - 1, b.w - 2) if b.w >= 2 else mod_wedge_basis(b.g, b.p - 1, 0)
    acc: dict[int, Coeff] = {}
    for i, c in x.coeffs.items():
        for t, s in mod_boundary_monomial(ctx, b.monomials[i]):
            j = target.position[t]
            acc[j] = acc.get(j, 0) + c * s
    return ModChainVector(target, acc)


def mod_cochain_d(
    x: ModChainVector, delta: CobracketHandle, mu: ComoduleHandle
) -> ModChainVector:
    """Module coboundary mu(m)^xi + (-1)^p m (x) d xi; lands in (p+1, w-2)."""
    b = x.basis
    ctx = algebra(b.g)
    if b.w < 2:
        return ModChainVector(mod_wedge_basis(b.g, b.p + 1, 0))
    target = mod_wedge_basis(b.g, b.p + 1, b.w - 2)
    acc: dict[int, Coeff] = {}
    for i, c in x.coeffs.items():
        for t, s in mod_cochain_monomial(ctx, delta, mu, b.monomials[i]):
            j = target.position[t]
            acc[j] = acc.get(j, 0) + c * s
    return ModChainVector(target, acc)


def wedge_product(x: ChainVector, y: ChainVector) -> ChainVector:
    """Exterior product of two chain vectors; lands in (p+q, w+v)."""
    bx, by = x.basis, y.basis
    if bx.g != by.g:
        raise GenusMismatch(f"genus {bx.g} != {by.g}")
    target = wedge_basis(bx.g, bx.p + by.p, bx.w + by.w)
    acc: dict[int, Coeff] = {}
    for i, ci in x.coeffs.items():
        ti = bx.monomials[i]
        for j, cj in y.coeffs.items():
            t, s = _sort_wedge(ti + by.monomials[j])
            if s == 0:
                continue
            k = target.position[t]
            v = acc.get(k, 0) + ci * cj * s
            if v:
                acc[k] = v
            elif k in acc:
                del acc[k]
    return ChainVector(target, acc)


# -- matrix assembly -----------------------------------------------------------

_OPS = ("boundary", "cochain_d", "mod_boundary", "mod_cochain_d")


def assemble(
    op: str,
    g: int,
    p: int,
    w: int,
    delta: CobracketHandle | None = None,
    mu: ComoduleHandle | None = None,
) -> SparseRationalMatrix:
    """Matrix of an operator out of the (p, w) cell, in the enumerated
    bases.  Column j is the image of the j-th source monomial."""
    if op not in _OPS:
        raise ValueError(f"unknown operator {op!r}; expected one of {_OPS}")
    module = op.startswith("mod_")
    src = mod_wedge_basis(g, p, w) if module else wedge_basis(g, p, w)
    ctx = algebra(g)
    if op == "boundary":
        tgt = wedge_basis(g, p - 1, w - 2) if p >= 1 and w >= 2 else None
        emit = lambda mono: boundary_monomial(ctx, mono) if p >= 1 else []
    elif op == "cochain_d":
        tgt = wedge_basis(g, p + 1, w - 2) if w >= 2 else None
        if delta is None:
            raise ValueError("cochain_d needs a cobracket handle")
        emit = lambda mono: cochain_monomial(ctx, delta, mono)
    elif op == "mod_boundary":
        tgt = mod_wedge_basis(g, p - 1, w - 2) if p >= 1 and w >= 2 else None
        emit = lambda mono: mod_boundary_monomial(ctx, mono)
    else:
        tgt = mod_wedge_basis(g, p + 1, w - 2) if w >= 2 else None
        if delta is None or mu is None:
            raise ValueError("mod_cochain_d needs cobracket and comodule handles")
        emit = lambda mono: mod_cochain_monomial(ctx, delta, mu, mono)
    if tgt is None or not src.monomials:
        return SparseRationalMatrix(tgt.dim() if tgt else 0, src.dim() if src else 0)
    columns = []
    pos = tgt.position
    for mono in src.monomials:
        col: dict[int, Coeff] = {}
        for t, s in emit(mono):
            j = pos[t]
            col[j] = col.get(j, 0) + s
        columns.append(col)
    return SparseRationalMatrix(tgt.dim(), src.dim(), columns)
