"""Coboundary deformations of the cobracket and the comodule map, and the
verification that they do not move the induced operators on homology.

A deformation element is a 2-vector A with vanishing bracket contraction
(an element of the kernel of Lambda^2 g -> g).  The deformed cobracket is
delta'(X) = delta(X) + sigma(X)(A); it is coskew automatically but its
coJacobi identity is *not* automatic and is checked explicitly.  Since A
is concentrated in one weight, delta' is a sum of two weight-homogeneous
pieces: the base piece of degree -2 and a deformation piece of degree
wt(A) - 2.  The base piece is the original cobracket on the nose, so
comparing induced maps on homology amounts to checking that every
deformation piece induces the zero map - which is what the homotopy
identity

  (boundary . E_A - E_A . boundary + E_{nabla A})(X_1^...^X_p)
      = sum_i (-1)^i sigma(X_i)(A) ^ X_1 ^ ...(i)... ^ X_p

guarantees for A in the kernel: on cycles, the deformation piece is a
boundary.  The comodule deformation mu'(m) = mu(m) + boundary(m (x) B) is
handled the same way on module cells.

Conjugation by exp(ad u) for u of weight >= 3 is evaluated lazily per
element below a weight cutoff; it is a coboundary deformation with
equivalent deformation elements A_k = (1/k!) sigma(u)^{k-1}(delta u).
"""

from fractions import Fraction
from typing import Sequence

from . import complexes as C
from . import words as W
from .errors import ConditionFailed, MinWeightTooLow, NotInN
from .homology import HomologyEngine
from .lie import DerivationElem, algebra, bracket, schedler_delta
from .linalg import SparseRationalMatrix, kernel_basis
from .tensors import Coeff, Tensor


# -- deformation elements -----------------------------------------------------


class DeformationElement:
    """A 2-vector at a fixed weight, with its bracket contraction and the
    flag telling whether it is an admissible deformation direction."""

    def __init__(self, chain: C.ChainVector):
        if chain.basis.p != 2:
            raise ValueError("deformation elements live in the second exterior power")
        self.chain = chain
        self.g = chain.basis.g
        self.weight = chain.basis.w
        self._nabla = nabla_contract_chain(chain)
        self.in_n = self._nabla.is_zero()
        self._sigma_memo: dict[int, tuple[tuple[int, int, Coeff], ...]] = {}

    def nabla(self) -> DerivationElem:
        return self._nabla

    def wedge_pairs(self) -> list[tuple[int, int, Coeff]]:
        out = []
        for i, c in sorted(self.chain.coeffs.items()):
            a, b = self.chain.basis.monomials[i]
            out.append((a, b, c))
        return out

    def sigma_of(self, x_idx: int) -> tuple[tuple[int, int, Coeff], ...]:
        """sigma(N_x)(A) in wedge coordinates ((a, b, coeff), a < b)."""
        memo = self._sigma_memo.get(x_idx)
        if memo is not None:
            return memo
        ctx = algebra(self.g)
        acc: dict[tuple[int, int], Coeff] = {}

        def put(a, b, c):
            if a == b:
                return
            key, cc = ((a, b), c) if a < b else ((b, a), -c)
            v = acc.get(key, 0) + cc
            if v:
                acc[key] = v
            elif key in acc:
                del acc[key]

        for a, b, alpha in self.wedge_pairs():
            for k, c in ctx.bracket_idx(x_idx, a):
                put(k, b, alpha * c)
            for k, c in ctx.bracket_idx(x_idx, b):
                put(a, k, alpha * c)
        memo = tuple((a, b, c) for (a, b), c in sorted(acc.items()))
        self._sigma_memo[x_idx] = memo
        return memo

    def to_json_dict(self) -> dict:
        return self.chain.to_json_dict()

    @classmethod
    def from_json_dict(cls, data: dict) -> "DeformationElement":
        return cls(C.ChainVector.from_json_dict(data))

    def __repr__(self) -> str:
        tag = "in N(g)" if self.in_n else "NOT in N(g)"
        return f"DeformationElement(w={self.weight}, {tag}: {self.chain!r})"


def nabla_contract_chain(x: C.ChainVector) -> DerivationElem:
    """Bracket contraction of a 2-vector, sum over wedge pairs of [a, b]."""
    ctx = algebra(x.basis.g)
    acc: dict = {}
    for i, c in x.coeffs.items():
        a, b = x.basis.monomials[i]
        for k, s in ctx.bracket_idx(a, b):
            w = ctx.word_at(k)
            acc[w] = acc.get(w, 0) + c * s
    return DerivationElem(x.basis.g, acc)


def n_space_basis(g: int, w: int) -> list[C.ChainVector]:
    """Canonical basis of the kernel of the bracket contraction on the
    weight-w part of the second exterior power."""
    if w < 2:
        raise ValueError("the second exterior power needs weight >= 2")
    mat = C.assemble("boundary", g, 2, w)
    basis = C.wedge_basis(g, 2, w)
    return [C.ChainVector(basis, vec) for vec in kernel_basis(mat)]


# -- deformed handles ----------------------------------------------------------


def _as_deformations(defs) -> list[DeformationElement]:
    if isinstance(defs, (C.ChainVector, DeformationElement)):
        defs = [defs]
    out = []
    for d in defs:
        out.append(d if isinstance(d, DeformationElement) else DeformationElement(d))
    return out


class DeformedCobracket:
    """delta' = delta_alg + sum_k sigma(.)(A_k): one homogeneous piece per
    deformation weight, on top of the degree -2 base."""

    def __init__(self, g: int, deformations, name: str = "deformed", require_in_n: bool = True):
        self.g = g
        self.name = name
        self.max_weight = None
        self.base = C.AlgCobracket(g)
        self.deformations = _as_deformations(deformations)
        if require_in_n:
            for d in self.deformations:
                if not d.in_n:
                    raise NotInN(
                        "deformation element has nonzero bracket contraction: "
                        f"{d.nabla()!r}"
                    )

    def wedge_terms(self, idx: int):
        """Base piece only; valid when every deformation is trivial (the
        graded machinery uses pieces() instead)."""
        if self.deformations:
            raise ValueError(
                "deformed cobracket is weight-inhomogeneous; use pieces()"
            )
        return self.base.wedge_terms(idx)

    def pieces(self) -> list[tuple[int, object]]:
        """(weight shift, term function idx -> wedge terms) per piece."""
        out: list[tuple[int, object]] = [(-2, self.base.wedge_terms)]
        for d in self.deformations:
            out.append((d.weight - 2, d.sigma_of))
        return out

    def delta_word(self, nw: W.WordKey) -> dict[tuple[W.WordKey, W.WordKey], Coeff]:
        """Full (inhomogeneous) value on a necklace, word-level wedge map."""
        ctx = algebra(self.g)
        idx = ctx.index_of_word(nw)
        acc: dict = {}
        for _, fn in self.pieces():
            for a, b, c in fn(idx):
                key = (ctx.word_at(a), ctx.word_at(b))
                acc[key] = acc.get(key, 0) + c
        return {k: v for k, v in acc.items() if v != 0}


class DeformedComodule:
    """mu' = mu_alg + boundary(. (x) B) for 2-vectors B."""

    def __init__(self, g: int, deformations, name: str = "deformed"):
        self.g = g
        self.name = name
        self.max_weight = None
        self.base = C.AlgComodule(g)
        self.deformations = _as_deformations(deformations)
        self._ctx = algebra(g)
        # boundary(m (x) B) = Gamma(m (x) B) + m (x) boundary(B), and
        # boundary(B) = -nabla(B)
        self._nablas = [d.nabla() for d in self.deformations]

    def mu_terms(self, word: W.WordKey):
        if self.deformations:
            raise ValueError(
                "deformed comodule is weight-inhomogeneous; use pieces()"
            )
        return self.base.mu_terms(word)

    def piece_terms(self, d_index: int, word: W.WordKey):
        """The mu'(m) - mu(m) contribution of one deformation element."""
        ctx = self._ctx
        d = self.deformations[d_index]
        out = []
        for a, b, beta in d.wedge_pairs():
            # Gamma(m (x) N_a ^ N_b) = -(N_a m) (x) N_b + (N_b m) (x) N_a
            for w2, s in ctx.act_word(ctx.word_at(a), word):
                out.append((w2, b, -beta * s))
            for w2, s in ctx.act_word(ctx.word_at(b), word):
                out.append((w2, a, beta * s))
        for nw, c in self._nablas[d_index].terms.items():
            out.append((word, ctx.index_of_word(nw), -c))
        return out

    def pieces(self) -> list[tuple[int, object]]:
        out: list[tuple[int, object]] = [(-2, self.base.mu_terms)]
        for k, d in enumerate(self.deformations):
            out.append((d.weight - 2, lambda word, k=k: self.piece_terms(k, word)))
        return out

    def mu_word(self, word: W.WordKey) -> dict[tuple[W.WordKey, W.WordKey], Coeff]:
        ctx = self._ctx
        acc: dict = {}
        for _, fn in self.pieces():
            for w2, k, c in fn(word):
                key = (w2, ctx.word_at(k))
                acc[key] = acc.get(key, 0) + c
        return {k: v for k, v in acc.items() if v != 0}


def deform_delta(a, require_cojacobi_weight: int | None = None) -> DeformedCobracket:
    """The cobracket deformed by a kernel 2-vector; raises NotInN otherwise.

    coJacobi for the result is NOT automatic; pass a weight bound to have
    it checked here, or call check_cojacobi explicitly before using the
    handle on homology."""
    defs = _as_deformations(a)
    g = defs[0].g
    handle = DeformedCobracket(g, defs)
    if require_cojacobi_weight is not None and not check_cojacobi(
        handle, require_cojacobi_weight
    ):
        raise ConditionFailed("cojacobi", "deformed cobracket fails coJacobi")
    return handle


def deform_mu(b) -> DeformedComodule:
    defs = _as_deformations(b)
    return DeformedComodule(defs[0].g, defs)


# -- identity checks for deformed structures ----------------------------------


def check_coskew(handle: DeformedCobracket, max_weight: int) -> bool:
    """Coskew holds by construction (wedge coordinates); check it anyway on
    all basis necklaces up to the bound."""
    ctx = algebra(handle.g)
    for m in range(1, max_weight + 1):
        for nw in ctx.basis_words(m):
            for (wa, wb), c in handle.delta_word(nw).items():
                if wa == wb and c != 0:
                    return False
    return True


def check_cojacobi(handle, max_weight: int) -> bool:
    """Cyclic sum of (delta (x) 1) delta = 0 on all basis necklaces up to
    max_weight, for a possibly inhomogeneous cobracket handle."""
    ctx = algebra(handle.g)
    for m in range(1, max_weight + 1):
        for nw in ctx.basis_words(m):
            acc: dict = {}
            # expand the wedge value into the raw two-tensor and apply the
            # handle to the first factor
            for (wa, wb), c in handle.delta_word(nw).items():
                for (u, v), s in (((wa, wb), c), ((wb, wa), -c)):
                    for (u1, u2), c2 in handle.delta_word(u).items():
                        for (x, y), s2 in (((u1, u2), c2), ((u2, u1), -c2)):
                            for trip in ((x, y, v), (y, v, x), (v, x, y)):
                                nv = acc.get(trip, 0) + s * s2
                                if nv:
                                    acc[trip] = nv
                                elif trip in acc:
                                    del acc[trip]
            if acc:
                return False
    return True


def check_coaction(delta_handle, mu_handle, max_weight: int, g: int,
                   sample_words=None) -> bool:
    """(1 (x) delta') mu' + (1 (x) (1 - T))(mu' (x) 1) mu' = 0 on words up
    to the bound (our sign convention; see the verify module)."""
    from itertools import product

    def mu_of(word):
        if isinstance(mu_handle, DeformedComodule):
            return mu_handle.mu_word(word)
        ctx = algebra(g)
        return {(w2, nk): c2 for w2, nk, c2 in ctx.mu_word(word)}

    def delta_of(nw):
        if isinstance(delta_handle, DeformedCobracket):
            return delta_handle.delta_word(nw)
        ctx = algebra(g)
        return {(wa, wb): c for wa, wb, c in ctx.delta_word(nw)}

    words = sample_words
    if words is None:
        words = [()]
        for m in range(1, max_weight + 1):
            words.extend(product(range(2 * g), repeat=m))
    for word in words:
        acc: dict = {}
        mw = mu_of(word)
        for (m1, n1), c in mw.items():
            for (wa, wb), c2 in delta_of(n1).items():
                for key, s in ((((m1, wa, wb)), 1), ((m1, wb, wa), -1)):
                    nv = acc.get(key, 0) + s * c * c2
                    if nv:
                        acc[key] = nv
                    elif key in acc:
                        del acc[key]
        for (m1, n1), c in mw.items():
            for (m2, n2), c2 in mu_of(m1).items():
                for key, s in (((m2, n2, n1), 1), ((m2, n1, n2), -1)):
                    nv = acc.get(key, 0) + s * c * c2
                    if nv:
                        acc[key] = nv
                    elif key in acc:
                        del acc[key]
        if acc:
            return False
    return True


# -- piece assembly -------------------------------------------------------------


def assemble_sigma_piece(a: DeformationElement, p: int, w: int) -> SparseRationalMatrix:
    """Matrix of x -> sum_i (-1)^i sigma(X_i)(A) ^ (rest): the difference
    d(delta') - d(delta) out of cell (p, w), landing in (p+1, w + wt(A) - 2)."""
    g = a.g
    src = C.wedge_basis(g, p, w)
    tgt = C.wedge_basis(g, p + 1, w + a.weight - 2)
    cols = []
    for tup in src.monomials:
        col: dict[int, Coeff] = {}
        for ii in range(len(tup)):
            rest = tup[:ii] + tup[ii + 1 :]
            s0 = -1 if ii % 2 == 0 else 1
            for x, y, c in a.sigma_of(tup[ii]):
                ins = C._insert2(rest, x, y)
                if ins:
                    sgn, newtup = ins
                    j = tgt.position[newtup]
                    v = col.get(j, 0) + s0 * sgn * c
                    if v:
                        col[j] = v
                    elif j in col:
                        del col[j]
        cols.append(col)
    return SparseRationalMatrix(tgt.dim(), src.dim(), cols)


def assemble_wedge_mult(a: DeformationElement, p: int, w: int) -> SparseRationalMatrix:
    """Matrix of E_A: x -> A ^ x from (p, w) to (p+2, w + wt(A))."""
    g = a.g
    src = C.wedge_basis(g, p, w)
    tgt = C.wedge_basis(g, p + 2, w + a.weight)
    cols = []
    for tup in src.monomials:
        col: dict[int, Coeff] = {}
        for x, y, c in a.wedge_pairs():
            ins = C._insert2(tup, x, y)
            if ins:
                sgn, newtup = ins
                j = tgt.position[newtup]
                v = col.get(j, 0) + sgn * c
                if v:
                    col[j] = v
                elif j in col:
                    del col[j]
        cols.append(col)
    return SparseRationalMatrix(tgt.dim(), src.dim(), cols)


def assemble_deriv_mult(g: int, y: DerivationElem, p: int, w: int) -> SparseRationalMatrix:
    """Matrix of x -> Y ^ x for a weight-homogeneous derivation Y."""
    ws = y.weight_support()
    src = C.wedge_basis(g, p, w)
    if not ws:
        return SparseRationalMatrix(C.wedge_basis(g, p + 1, w).dim(), src.dim())
    if len(ws) > 1:
        raise ValueError("need a weight-homogeneous element")
    ctx = algebra(g)
    tgt = C.wedge_basis(g, p + 1, w + ws[0])
    cols = []
    terms = [(ctx.index_of_word(nw), c) for nw, c in y.sorted_terms()]
    for tup in src.monomials:
        col: dict[int, Coeff] = {}
        for k, c in terms:
            ins = C._insert1(tup, k)
            if ins:
                sgn, newtup = ins
                j = tgt.position[newtup]
                v = col.get(j, 0) + sgn * c
                if v:
                    col[j] = v
                elif j in col:
                    del col[j]
        cols.append(col)
    return SparseRationalMatrix(tgt.dim(), src.dim(), cols)


def homotopy_check(a: DeformationElement | C.ChainVector, p: int, w: int) -> bool:
    """The chain-homotopy identity at matrix level on cell (p, w):

    boundary . E_A - E_A . boundary + E_{nabla A} = sigma-sum operator.

    Holds for every 2-vector A (the E_{nabla A} term is what makes it true
    when A is not in the kernel).  Columns are compared by direct emission,
    so the large intermediate cell (p+2, w + wt A) is never materialized."""
    if isinstance(a, C.ChainVector):
        a = DeformationElement(a)
    g = a.g
    ctx = algebra(g)
    src = C.wedge_basis(g, p, w)
    pairs = a.wedge_pairs()
    nabla_terms = [
        (ctx.index_of_word(nw), c) for nw, c in a.nabla().sorted_terms()
    ]

    def put(acc, key, c):
        v = acc.get(key, 0) + c
        if v:
            acc[key] = v
        elif key in acc:
            del acc[key]

    for tup in src.monomials:
        lhs: dict = {}
        # boundary(A ^ x)
        for x, y, alpha in pairs:
            ins = C._insert2(tup, x, y)
            if ins is None:
                continue
            s, t2 = ins
            for t3, c2 in C.boundary_monomial(ctx, t2):
                put(lhs, t3, alpha * s * c2)
        # - A ^ boundary(x)
        if p >= 1:
            for t2, c2 in C.boundary_monomial(ctx, tup):
                for x, y, alpha in pairs:
                    ins = C._insert2(t2, x, y)
                    if ins is None:
                        continue
                    s, t3 = ins
                    put(lhs, t3, -alpha * c2 * s)
        # + (nabla A) ^ x
        for k, c in nabla_terms:
            ins = C._insert1(tup, k)
            if ins is None:
                continue
            s, t3 = ins
            put(lhs, t3, c * s)
        rhs: dict = {}
        for ii in range(len(tup)):
            rest = tup[:ii] + tup[ii + 1 :]
            s0 = -1 if ii % 2 == 0 else 1
            for x, y, c in a.sigma_of(tup[ii]):
                ins = C._insert2(rest, x, y)
                if ins is None:
                    continue
                s, t3 = ins
                put(rhs, t3, s0 * s * c)
        if lhs != rhs:
            return False
    return True


# -- invariance of induced maps --------------------------------------------------


def assemble_mod_piece(
    mu_handle: DeformedComodule, delta_handle: DeformedCobracket,
    d_index: int, p: int, w: int
) -> SparseRationalMatrix:
    """The module-cochain difference piece of one deformation element:
    (mu' - mu)(m) ^ xi - m (x) (d' - d) xi, out of module cell (p, w)."""
    g = mu_handle.g
    a = mu_handle.deformations[d_index]
    src = C.mod_wedge_basis(g, p, w)
    tgt = C.mod_wedge_basis(g, p + 1, w + a.weight - 2)
    ctx = algebra(g)
    ad = delta_handle.deformations[d_index] if d_index < len(delta_handle.deformations) else None
    cols = []
    for word, tup in src.monomials:
        col: dict[int, Coeff] = {}

        def put(key, c):
            j = tgt.position[key]
            v = col.get(j, 0) + c
            if v:
                col[j] = v
            elif j in col:
                del col[j]

        for w2, k, c in mu_handle.piece_terms(d_index, word):
            ins = C._insert1(tup, k)
            if ins:
                sgn, newtup = ins
                put((w2, newtup), c * sgn)
        if ad is not None:
            for ii in range(len(tup)):
                rest = tup[:ii] + tup[ii + 1 :]
                s0 = -1 if ii % 2 == 0 else 1
                for x, y, c in ad.sigma_of(tup[ii]):
                    ins = C._insert2(rest, x, y)
                    if ins:
                        sgn, newtup = ins
                        put((word, newtup), -s0 * sgn * c)
        cols.append(col)
    return SparseRationalMatrix(tgt.dim(), src.dim(), cols)


def assemble_mod_wedge_mult(b: DeformationElement, p: int, w: int) -> SparseRationalMatrix:
    """Matrix of E_B: m (x) xi -> m (x) (B ^ xi) on module cells."""
    g = b.g
    src = C.mod_wedge_basis(g, p, w)
    tgt = C.mod_wedge_basis(g, p + 2, w + b.weight)
    cols = []
    for word, tup in src.monomials:
        col: dict[int, Coeff] = {}
        for x, y, c in b.wedge_pairs():
            ins = C._insert2(tup, x, y)
            if ins:
                sgn, newtup = ins
                j = tgt.position[(word, newtup)]
                v = col.get(j, 0) + sgn * c
                if v:
                    col[j] = v
                elif j in col:
                    del col[j]
        cols.append(col)
    return SparseRationalMatrix(tgt.dim(), src.dim(), cols)


def mod_homotopy_check(
    a: DeformationElement, b: DeformationElement, p: int, w: int
) -> bool:
    """Module-level chain homotopy at matrix level on module cell (p, w):
    the coboundary difference piece built from (A for delta, B for mu)
    equals boundary . E_B - E_B . boundary exactly when sigma(X)(B) =
    -sigma(X)(A) for all X, in particular for B = -A (our conventions; the
    relative sign is pinned the same way as the other module-side
    identities).  Direct column emission, as in homotopy_check."""
    g = a.g
    ctx = algebra(g)
    mu_h = DeformedComodule(g, [b])
    delta_h = DeformedCobracket(g, [a], require_in_n=False)
    src = C.mod_wedge_basis(g, p, w)
    pairs_b = b.wedge_pairs()

    def put(acc, key, c):
        v = acc.get(key, 0) + c
        if v:
            acc[key] = v
        elif key in acc:
            del acc[key]

    for mono in src.monomials:
        word, tup = mono
        lhs: dict = {}
        # mod_boundary(m (x) B ^ xi)
        for x, y, beta in pairs_b:
            ins = C._insert2(tup, x, y)
            if ins is None:
                continue
            s, t2 = ins
            for key2, c2 in C.mod_boundary_monomial(ctx, (word, t2)):
                put(lhs, key2, beta * s * c2)
        # - E_B(mod_boundary(m (x) xi))
        if p >= 1:
            for (w2, t2), c2 in C.mod_boundary_monomial(ctx, mono):
                for x, y, beta in pairs_b:
                    ins = C._insert2(t2, x, y)
                    if ins is None:
                        continue
                    s, t3 = ins
                    put(lhs, (w2, t3), -beta * c2 * s)
        # the deformation piece: (mu'-mu)(m) ^ xi - m (x) (d'-d) xi
        rhs: dict = {}
        for w2, k, c in mu_h.piece_terms(0, word):
            ins = C._insert1(tup, k)
            if ins is None:
                continue
            s, t3 = ins
            put(rhs, (w2, t3), c * s)
        for ii in range(len(tup)):
            rest = tup[:ii] + tup[ii + 1 :]
            s0 = -1 if ii % 2 == 0 else 1
            for x, y, c in a.sigma_of(tup[ii]):
                ins = C._insert2(rest, x, y)
                if ins is None:
                    continue
                s, t3 = ins
                put(rhs, (word, t3), -s0 * s * c)
        if lhs != rhs:
            return False
    return True


def piece_induces_zero(engine: HomologyEngine, piece: SparseRationalMatrix,
                       p: int, w: int, w_target: int) -> bool:
    """True iff the homogeneous operator piece maps every homology class of
    (p, w) into the boundaries of (p+1, w_target)."""
    src = engine.homology(p, w)
    tgt = engine.homology(p + 1, w_target)
    for rep in src.representatives:
        image = piece.matvec(rep.coeffs)
        if engine.boundary_matrix(p + 1, w_target).matvec(image):
            return False
        coords = tgt.class_coordinates(image)
        if any(c != 0 for c in coords):
            return False
    return True


def verify_deformation_invariance(
    a,
    b,
    lie_cells: Sequence[tuple[int, int]],
    mod_cells: Sequence[tuple[int, int]] = (),
    check_weight: int = 6,
    engines: dict | None = None,
    require_cojacobi: bool = True,
    g: int | None = None,
) -> dict:
    """Check the hypotheses of the coboundary-invariance lemmas for the
    pair (A, B) and confirm, cell by cell, that the deformed and
    undeformed coboundaries induce the same maps on homology.

    Raises ConditionFailed when a hypothesis fails: A not in the kernel,
    sigma(X)(A) != sigma(X)(B), coJacobi for delta', or the coaction square
    for mu'.  The returned report lists each verified clause.

    coJacobi for a coboundary deformation is *not* automatic and in fact
    fails for most kernel elements (the suite records the empirical status
    per element).  The single-step comparison [u] -> [du] vs [d'u] is
    well-defined without it, because the difference piece anticommutes
    with the boundary unconditionally; pass require_cojacobi=False to run
    the comparison alone, with the coJacobi/coaction status still reported
    instead of enforced."""
    a_defs = _as_deformations(a)
    b_defs = _as_deformations(b)
    if a_defs:
        g = a_defs[0].g
    elif g is None:
        raise ValueError("pass the genus explicitly for trivial deformations")
    for d in a_defs:
        if not d.in_n:
            raise NotInN(f"A component at weight {d.weight} is not in the kernel")
    delta_handle = DeformedCobracket(g, a_defs)
    mu_handle = DeformedComodule(g, b_defs)
    checks = []

    # (iii), in our sign conventions: sigma(X)(B) = -sigma(X)(A) on basis
    # necklaces up to the bound.  This is the relation under which the
    # module coboundary difference is the commutator of the module boundary
    # with wedging by B (checked at matrix level by mod_homotopy_check), so
    # it is what makes the module induced maps provably agree.
    ctx = algebra(g)
    neg = a_defs is not b_defs and (
        len(a_defs) == len(b_defs)
        and all(
            da.weight == db.weight and da.chain == db.chain.scale(-1)
            for da, db in zip(a_defs, b_defs)
        )
    )
    if not neg:
        def sigma_table(defs, x_idx, sign=1):
            acc: dict = {}
            for d in defs:
                for x, y, c in d.sigma_of(x_idx):
                    key = (d.weight, x, y)
                    acc[key] = acc.get(key, 0) + sign * c
            return {k: v for k, v in acc.items() if v != 0}

        for m in range(1, check_weight + 1):
            for nw in ctx.basis_words(m):
                x_idx = ctx.index_of_word(nw)
                if sigma_table(b_defs, x_idx) != sigma_table(a_defs, x_idx, sign=-1):
                    raise ConditionFailed(
                        "sigma_AB",
                        f"sigma(N({W.word_name(nw)}))(B) != -sigma(...)(A)",
                    )
    checks.append({"name": "sigma_B_is_minus_sigma_A", "ok": True})

    cj = check_cojacobi(delta_handle, check_weight)
    if require_cojacobi and not cj:
        raise ConditionFailed("cojacobi", "deformed cobracket fails coJacobi")
    checks.append({"name": "deformed_cojacobi", "ok": cj})

    ca = check_coaction(delta_handle, mu_handle, min(check_weight, 6), g)
    if require_cojacobi and not ca:
        raise ConditionFailed("coaction", "deformed comodule fails the coaction square")
    checks.append({"name": "deformed_coaction", "ok": ca})

    engines = engines if engines is not None else {}
    lie_engine = engines.setdefault(("lie", g), HomologyEngine(g))
    mod_engine = engines.setdefault(("mod", g), HomologyEngine(g, module=True))

    cells_report = []
    for (p, w) in lie_cells:
        ok = True
        for d in a_defs:
            piece = assemble_sigma_piece(d, p, w)
            ok = ok and piece_induces_zero(lie_engine, piece, p, w, w + d.weight - 2)
        cells_report.append({"kind": "lie", "p": p, "w": w, "induced_maps_equal": ok})
    for (p, w) in mod_cells:
        ok = True
        for k in range(len(a_defs)):
            piece = assemble_mod_piece(mu_handle, delta_handle, k, p, w)
            ok = ok and piece_induces_zero(
                mod_engine, piece, p, w, w + a_defs[k].weight - 2
            )
        cells_report.append({"kind": "module", "p": p, "w": w, "induced_maps_equal": ok})
    all_ok = all(c["induced_maps_equal"] for c in cells_report)
    return {
        "g": g,
        "deformation_weights": [d.weight for d in a_defs],
        "preconditions": checks,
        "cells": cells_report,
        "ok": all_ok,
    }


# -- exp(ad u) conjugation --------------------------------------------------------


def _exp_ad_deriv(u: DerivationElem, v: DerivationElem, cutoff: int) -> DerivationElem:
    """exp(ad u) applied to v, truncated at the weight cutoff."""
    acc = v.truncate(cutoff)
    term = v
    k = 1
    while True:
        term = bracket(u, term).truncate(cutoff).scale(Fraction(1, k))
        if term.is_zero():
            break
        acc = acc + term
        k += 1
    return acc


def _exp_deriv_tensor(u: DerivationElem, t: Tensor, cutoff: int) -> Tensor:
    from .lie import exp_derivation

    return exp_derivation(u, t, cutoff)


class ExpAdCobracket:
    """The conjugated cobracket (e^{ad u} (x) e^{ad u}) delta e^{-ad u},
    evaluated lazily below a weight cutoff."""

    def __init__(self, u: DerivationElem, cutoff: int, name: str = "exp_ad"):
        if u.min_weight() < 3 and not u.is_zero():
            raise MinWeightTooLow("conjugator components must have weight >= 3")
        self.g = u.g
        self.u = u
        self.max_weight = cutoff
        self.name = name

    def delta_word(self, nw: W.WordKey) -> dict[tuple[W.WordKey, W.WordKey], Coeff]:
        """Value on a necklace in wedge normal form (pairs ordered by the
        basis order).

        Output terms are complete only up to total weight cutoff - 2: the
        cobracket lowers weight by 2, so inner terms living exactly at the
        cutoff still contribute there, while anything higher would need
        inner terms we dropped.  Incomplete weights are not returned."""
        g, cutoff = self.g, self.max_weight
        out_bound = cutoff - 2
        z = DerivationElem.necklace(g, nw)
        inner = _exp_ad_deriv(self.u.scale(-1), z, cutoff)
        half = Fraction(1, 2)
        acc: dict = {}
        # the raw conjugated map stays antisymmetric, so folding both raw
        # orders onto ordered pairs at half strength recovers the wedge
        # coefficients exactly
        for (wa, wb), c in schedler_delta(inner).terms.items():
            ua = _exp_ad_deriv(self.u, DerivationElem.necklace(g, wa), cutoff)
            ub = _exp_ad_deriv(self.u, DerivationElem.necklace(g, wb), cutoff)
            for na, ca in ua.terms.items():
                for nb, cb in ub.terms.items():
                    if len(na) + len(nb) > out_bound:
                        continue
                    _wedge_put(acc, na, nb, half * c * ca * cb)
        return {k: v for k, v in acc.items() if v != 0}

    def equivalent_deformations(self) -> list[DeformationElement]:
        """The coboundary elements sum_k (1/k!) sigma(u)^{k-1}(delta u),
        split into weight-homogeneous components and truncated."""
        g, cutoff = self.g, self.max_weight
        # represent Lambda^2 elements as wedge-coefficient maps keyed by
        # necklace-word pairs (a < b in basis order)
        def sigma_u(pairs):
            ctx = algebra(g)
            out: dict = {}
            for (wa, wb), c in pairs.items():
                da = bracket(self.u, DerivationElem.necklace(g, wa))
                db = bracket(self.u, DerivationElem.necklace(g, wb))
                for nk, ck in da.terms.items():
                    _wedge_put(out, nk, wb, c * ck)
                for nk, ck in db.terms.items():
                    _wedge_put(out, wa, nk, c * ck)
            return {k: v for k, v in out.items() if v != 0}

        base: dict = {}
        for (wa, wb), c in schedler_delta(self.u).terms.items():
            if (len(wa), wa) < (len(wb), wb):
                base[(wa, wb)] = base.get((wa, wb), 0) + c
        total = dict(base)
        power = base
        k = 2
        while power:
            power = sigma_u(power)
            power = {
                key: c
                for key, c in power.items()
                if len(key[0]) + len(key[1]) <= cutoff
            }
            if not power:
                break
            f = Fraction(1, _factorial(k))
            for key, c in power.items():
                v = total.get(key, 0) + f * c
                if v:
                    total[key] = v
                elif key in total:
                    del total[key]
            k += 1
        # split by total weight into chain vectors
        ctx = algebra(g)
        by_weight: dict[int, list] = {}
        for (wa, wb), c in total.items():
            wgt = len(wa) + len(wb)
            t, s = C._sort_wedge((ctx.index_of_word(wa), ctx.index_of_word(wb)))
            if s:
                by_weight.setdefault(wgt, []).append((t, s * c))
        out = []
        for wgt in sorted(by_weight):
            chain = C.ChainVector.from_terms(C.wedge_basis(g, 2, wgt), by_weight[wgt])
            if not chain.is_zero():
                out.append(DeformationElement(chain))
        return out


def _wedge_put(acc: dict, wa: W.WordKey, wb: W.WordKey, c: Coeff) -> None:
    ka, kb = (len(wa), wa), (len(wb), wb)
    if ka == kb:
        return
    key, cc = ((wa, wb), c) if ka < kb else ((wb, wa), -c)
    v = acc.get(key, 0) + cc
    if v:
        acc[key] = v
    elif key in acc:
        del acc[key]


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


class ExpAdComodule:
    """The conjugated comodule map (e^{D_u} (x) e^{ad u}) mu e^{-D_u}."""

    def __init__(self, u: DerivationElem, cutoff: int, name: str = "exp_ad"):
        if u.min_weight() < 3 and not u.is_zero():
            raise MinWeightTooLow("conjugator components must have weight >= 3")
        self.g = u.g
        self.u = u
        self.max_weight = cutoff
        self.name = name

    def mu_word(self, word: W.WordKey) -> dict[tuple[W.WordKey, W.WordKey], Coeff]:
        """Complete up to total output weight cutoff - 2, as for the
        conjugated cobracket; incomplete weights are not returned."""
        from .lie import mu_alg

        g, cutoff = self.g, self.max_weight
        out_bound = cutoff - 2
        inner = _exp_deriv_tensor(self.u.scale(-1), Tensor.word(g, word), cutoff)
        acc: dict = {}
        for (m1, n1), c in mu_alg(inner).terms.items():
            um = _exp_deriv_tensor(self.u, Tensor.word(g, m1), cutoff)
            un = _exp_ad_deriv(self.u, DerivationElem.necklace(g, n1), cutoff)
            for w2, c2 in um.terms.items():
                for nk, ck in un.terms.items():
                    if len(w2) + len(nk) > out_bound:
                        continue
                    key = (w2, nk)
                    v = acc.get(key, 0) + c * c2 * ck
                    if v:
                        acc[key] = v
                    elif key in acc:
                        del acc[key]
        return acc


def exp_ad_conjugate(u: DerivationElem, cutoff: int):
    """Conjugate the canonical structure by exp(ad u).

    Returns (cobracket handle, comodule handle, equivalent deformation
    elements); u must have all components of weight >= 3 so every series
    terminates below the cutoff."""
    delta = ExpAdCobracket(u, cutoff)
    mu = ExpAdComodule(u, cutoff)
    return delta, mu, delta.equivalent_deformations()
