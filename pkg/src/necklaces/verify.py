"""Identity checks for the necklace bialgebra and its bimodule.

Each check returns a dict {"name", "ok", "detail"} so the CLI can emit a
machine-readable report; the functions raise nothing on failure.  Random
sampling is driven by an explicit ``random.Random`` so every run is
reproducible from its seed.
"""

import random

from . import words as W
from .lie import (
    BiDerivationElem,
    DerivationElem,
    TensorDerivElem,
    algebra,
    bracket,
    derivation_apply,
    mu_alg,
    necklace_basis,
    schedler_delta,
)
from .tensors import Tensor, omega
from . import complexes as C
from .linalg import int_csc, product_bound_ok


# -- random elements ------------------------------------------------------


def random_derivation(rng: random.Random, g: int, max_weight: int, nterms: int = 3) -> DerivationElem:
    terms = {}
    for _ in range(nterms):
        m = rng.randint(1, max_weight)
        basis = algebra(g).basis_words(m)
        w = basis[rng.randrange(len(basis))]
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        terms[w] = terms.get(w, 0) + c
    return DerivationElem(g, terms)


def random_tensor(rng: random.Random, g: int, max_weight: int, nterms: int = 3) -> Tensor:
    terms = {}
    for _ in range(nterms):
        m = rng.randint(0, max_weight)
        w = tuple(rng.randrange(2 * g) for _ in range(m))
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        terms[w] = terms.get(w, 0) + c
    return Tensor(g, terms)


# -- helpers on two- and three-factor elements ----------------------------


def sigma_on_bideriv(x: DerivationElem, b: BiDerivationElem) -> BiDerivationElem:
    """Diagonal action on a two-factor element: [x, .](x)1 + 1(x)[x, .]."""
    acc: dict = {}
    for (u, v), c in b.terms.items():
        du = DerivationElem.necklace(x.g, u)
        dv = DerivationElem.necklace(x.g, v)
        for w2, c2 in bracket(x, du).terms.items():
            key = (w2, v)
            acc[key] = acc.get(key, 0) + c * c2
        for w2, c2 in bracket(x, dv).terms.items():
            key = (u, w2)
            acc[key] = acc.get(key, 0) + c * c2
    return BiDerivationElem(x.g, acc)


def nabla_contract(b: BiDerivationElem) -> DerivationElem:
    """Bracket contraction of a two-factor element."""
    out = DerivationElem.zero(b.g)
    for (u, v), c in b.terms.items():
        out = out + bracket(
            DerivationElem.necklace(b.g, u), DerivationElem.necklace(b.g, v)
        ).scale(c)
    return out


def cojacobi_defect(u: DerivationElem) -> dict:
    """Cyclic sum of (delta (x) 1) delta as a three-factor term map."""
    acc: dict = {}
    for (a, b), c in schedler_delta(u).terms.items():
        da = schedler_delta(DerivationElem.necklace(u.g, a))
        for (a1, a2), c2 in da.terms.items():
            for trip in ((a1, a2, b), (a2, b, a1), (b, a1, a2)):
                acc[trip] = acc.get(trip, 0) + c * c2
                if acc[trip] == 0:
                    del acc[trip]
    return acc


def compatibility_defect(x: DerivationElem, y: DerivationElem) -> BiDerivationElem:
    """delta[x, y] - sigma(x)(delta y) + sigma(y)(delta x)."""
    return (
        schedler_delta(bracket(x, y))
        - sigma_on_bideriv(x, schedler_delta(y))
        + sigma_on_bideriv(y, schedler_delta(x))
    )


def comodule_defect(t: Tensor) -> dict:
    """(1 (x) delta) mu + (1 (x) (1 - T))(mu (x) 1) mu on a tensor.

    With the a.b = +1 pairing and the literal splitting formulas, the
    coaction square commutes up to this sign: the delta term is the
    *negative* of the antisymmetrized double splitting.  (This is the
    combination that makes dd = 0 on the module complex; the opposite sign
    fails already on weight-6 words at genus 2.)

    Three-factor terms keyed (word, necklace word, necklace word)."""
    acc: dict = {}
    mt = mu_alg(t)
    for (m1, n1), c in mt.terms.items():
        for (a, b), c2 in schedler_delta(DerivationElem.necklace(t.g, n1)).terms.items():
            key = (m1, a, b)
            acc[key] = acc.get(key, 0) + c * c2
            if acc[key] == 0:
                del acc[key]
        for (m2, n2), c2 in mu_alg(Tensor.word(t.g, m1)).terms.items():
            for key, s in (((m2, n2, n1), 1), ((m2, n1, n2), -1)):
                acc[key] = acc.get(key, 0) + s * c * c2
                if acc[key] == 0:
                    del acc[key]
    return acc


def bimodule_compat_defect(t: Tensor, y: DerivationElem) -> TensorDerivElem:
    """sigma(y)(mu(m)) - mu(y m) + (sigma_bar (x) 1)(1 (x) delta)(m (x) y).

    As with the coaction square, the delta term enters with the sign forced
    by our pairing and splitting conventions (the one under which
    d*boundary + boundary*d = 0 holds on the module complex)."""
    g = t.g
    acc: dict = {}
    for (m1, n1), c in mu_alg(t).terms.items():
        ym = derivation_apply(y, Tensor.word(g, m1))
        for w2, c2 in ym.terms.items():
            key = (w2, n1)
            acc[key] = acc.get(key, 0) + c * c2
        for n2, c2 in bracket(y, DerivationElem.necklace(g, n1)).terms.items():
            key = (m1, n2)
            acc[key] = acc.get(key, 0) + c * c2
    first = TensorDerivElem(g, acc)
    second = mu_alg(derivation_apply(y, t))
    acc2: dict = {}
    for (n1, n2), c in schedler_delta(y).terms.items():
        n1m = derivation_apply(DerivationElem.necklace(g, n1), t)
        for w2, c2 in n1m.terms.items():
            key = (w2, n2)
            acc2[key] = acc2.get(key, 0) - c * c2
    third = TensorDerivElem(g, acc2)
    return first - second + third


def sigma_bar_mu(t: Tensor) -> Tensor:
    """Contraction sigma_bar . mu: must vanish identically (involutivity)."""
    g = t.g
    out = Tensor.zero(g)
    for (m1, n1), c in mu_alg(t).terms.items():
        out = out - derivation_apply(
            DerivationElem.necklace(g, n1), Tensor.word(g, m1)
        ).scale(c)
    return out


def commutator_action_mismatch(u: DerivationElem, v: DerivationElem) -> bool:
    """True if the closed-form bracket disagrees with the commutator of
    derivation actions on some basis letter."""
    g = u.g
    uv = bracket(u, v)
    for x in range(2 * g):
        t = Tensor.letter(g, x)
        lhs = derivation_apply(uv, t)
        rhs = derivation_apply(u, derivation_apply(v, t)) - derivation_apply(
            v, derivation_apply(u, t)
        )
        if lhs != rhs:
            return True
    return False


# -- suites ---------------------------------------------------------------


def _check(name: str, ok: bool, detail: str = "") -> dict:
    return {"name": name, "ok": bool(ok), "detail": detail}


def bialgebra_suite(g: int, max_weight: int, seed: int, samples: int = 50) -> dict:
    """Skew, Jacobi, coskew, coJacobi, compatibility and involutivity for
    the necklace bialgebra at genus g.

    Unary identities run over every basis necklace up to max_weight; the
    binary and ternary ones over seeded random pairs/triples.
    """
    rng = random.Random(seed)
    checks = []

    ok = True
    detail = ""
    for _ in range(samples):
        u = random_derivation(rng, g, max_weight)
        v = random_derivation(rng, g, max_weight)
        if (bracket(u, v) + bracket(v, u)).terms:
            ok, detail = False, f"skew fails on {u!r}, {v!r}"
            break
    checks.append(_check("bracket_skew", ok, detail))

    ok, detail = True, ""
    for _ in range(samples):
        u = random_derivation(rng, g, max_weight)
        v = random_derivation(rng, g, max_weight)
        w = random_derivation(rng, g, max_weight)
        jac = bracket(bracket(u, v), w) + bracket(bracket(v, w), u) + bracket(
            bracket(w, u), v
        )
        if jac.terms:
            ok, detail = False, "Jacobi fails"
            break
    checks.append(_check("bracket_jacobi", ok, detail))

    ok, detail = True, ""
    for _ in range(samples):
        u = random_derivation(rng, g, max_weight)
        v = random_derivation(rng, g, max_weight)
        if commutator_action_mismatch(u, v):
            ok, detail = False, "closed form != commutator of actions"
            break
    checks.append(_check("bracket_commutator_oracle", ok, detail))

    om = omega(g)
    ok, detail = True, ""
    for m in range(1, max_weight + 1):
        for n in necklace_basis(g, m):
            if not derivation_apply(DerivationElem(g, {n.word: 1}), om).is_zero():
                ok, detail = False, f"{n!r} does not annihilate omega"
                break
        if not ok:
            break
    checks.append(_check("omega_annihilation", ok, detail))

    ok, detail = True, ""
    for m in range(1, max_weight + 1):
        for n in necklace_basis(g, m):
            d = schedler_delta(DerivationElem(g, {n.word: 1}))
            if (d + d.swap()).terms:
                ok, detail = False, f"coskew fails on {n!r}"
                break
        if not ok:
            break
    checks.append(_check("cobracket_coskew", ok, detail))

    ok, detail = True, ""
    for m in range(1, max_weight + 1):
        for n in necklace_basis(g, m):
            if cojacobi_defect(DerivationElem(g, {n.word: 1})):
                ok, detail = False, f"coJacobi fails on {n!r}"
                break
        if not ok:
            break
    checks.append(_check("cobracket_cojacobi", ok, detail))

    ok, detail = True, ""
    for _ in range(samples):
        x = random_derivation(rng, g, max_weight)
        y = random_derivation(rng, g, max_weight)
        if compatibility_defect(x, y).terms:
            ok, detail = False, "cocycle compatibility fails"
            break
    checks.append(_check("bialgebra_compatibility", ok, detail))

    ok, detail = True, ""
    for m in range(1, max_weight + 1):
        for n in necklace_basis(g, m):
            if not nabla_contract(schedler_delta(DerivationElem(g, {n.word: 1}))).is_zero():
                ok, detail = False, f"involutivity fails on {n!r}"
                break
        if not ok:
            break
    checks.append(_check("involutivity", ok, detail))

    return {
        "suite": "bialgebra",
        "g": g,
        "max_weight": max_weight,
        "seed": seed,
        "checks": checks,
        "ok": all(c["ok"] for c in checks),
    }


def bimodule_suite(g: int, max_weight: int, seed: int, samples: int = 50) -> dict:
    """Module axiom, comodule axiom, bimodule compatibility and
    involutivity for the tensor algebra over the necklace bialgebra."""
    rng = random.Random(seed)
    checks = []

    ok, detail = True, ""
    for _ in range(samples):
        x = random_derivation(rng, g, max_weight)
        y = random_derivation(rng, g, max_weight)
        t = random_tensor(rng, g, max_weight)
        lhs = derivation_apply(bracket(x, y), t)
        rhs = derivation_apply(x, derivation_apply(y, t)) - derivation_apply(
            y, derivation_apply(x, t)
        )
        if lhs != rhs:
            ok, detail = False, "module axiom fails"
            break
    checks.append(_check("module_axiom", ok, detail))

    ok, detail = True, ""
    if g == 1:
        words = [()]
        for m in range(1, max_weight + 1):
            from itertools import product

            words.extend(product(range(2), repeat=m))
        for w in words:
            if comodule_defect(Tensor.word(g, w)):
                ok, detail = False, f"comodule axiom fails on {W.word_name(w)!r}"
                break
    else:
        for _ in range(samples * 4):
            m = rng.randint(0, max_weight)
            w = tuple(rng.randrange(2 * g) for _ in range(m))
            if comodule_defect(Tensor.word(g, w)):
                ok, detail = False, f"comodule axiom fails on {W.word_name(w)!r}"
                break
    checks.append(_check("comodule_axiom", ok, detail))

    ok, detail = True, ""
    for _ in range(samples):
        t = random_tensor(rng, g, max_weight)
        y = random_derivation(rng, g, max_weight)
        if bimodule_compat_defect(t, y).terms:
            ok, detail = False, "bimodule compatibility fails"
            break
    checks.append(_check("bimodule_compatibility", ok, detail))

    ok, detail = True, ""
    for _ in range(samples * 4):
        m = rng.randint(0, max_weight)
        w = tuple(rng.randrange(2 * g) for _ in range(m))
        if not sigma_bar_mu(Tensor.word(g, w)).is_zero():
            ok, detail = False, f"sigma_bar . mu != 0 on {W.word_name(w)!r}"
            break
    checks.append(_check("bimodule_involutivity", ok, detail))

    return {
        "suite": "bimodule",
        "g": g,
        "max_weight": max_weight,
        "seed": seed,
        "checks": checks,
        "ok": all(c["ok"] for c in checks),
    }


def bracket_oracle_sweep(g: int, max_weight_sum: int) -> dict:
    """Certify the closed-form splice bracket against the commutator of
    derivation actions on every basis pair with bounded weight sum, and
    check that every basis necklace annihilates the symplectic form.

    The closed form is also checked to be skew pairwise, so the unordered
    sweep covers ordered pairs."""
    ctx = algebra(g)
    letters = [(y,) for y in range(2 * g)]
    pairs_checked = 0
    ok = True
    detail = ""
    for m in range(1, max_weight_sum):
        for n in range(m, max_weight_sum - m + 1):
            basis_m = ctx.basis_words(m)
            basis_n = ctx.basis_words(n)
            for i, wu in enumerate(basis_m):
                vs = basis_n[i:] if n == m else basis_n
                for wv in vs:
                    cl = ctx.bracket_words(wu, wv)
                    rev = ctx.bracket_words(wv, wu)
                    if {k: -c for k, c in cl.items()} != rev:
                        ok, detail = False, f"skew fails on {wu}, {wv}"
                        break
                    for y in letters:
                        lhs: dict = {}
                        for k, c in cl.items():
                            for w2, s in ctx.act_word(k, y):
                                v = lhs.get(w2, 0) + c * s
                                if v:
                                    lhs[w2] = v
                                elif w2 in lhs:
                                    del lhs[w2]
                        rhs: dict = {}
                        for w1, s1 in ctx.act_word(wv, y):
                            for w2, s2 in ctx.act_word(wu, w1):
                                v = rhs.get(w2, 0) + s1 * s2
                                if v:
                                    rhs[w2] = v
                                elif w2 in rhs:
                                    del rhs[w2]
                        for w1, s1 in ctx.act_word(wu, y):
                            for w2, s2 in ctx.act_word(wv, w1):
                                v = rhs.get(w2, 0) - s1 * s2
                                if v:
                                    rhs[w2] = v
                                elif w2 in rhs:
                                    del rhs[w2]
                        if lhs != rhs:
                            ok, detail = False, f"oracle mismatch on {wu}, {wv}"
                            break
                    pairs_checked += 1
                    if not ok:
                        break
                if not ok:
                    break
            if not ok:
                break
        if not ok:
            break

    om = omega(g)
    omega_ok = True
    max_single = max_weight_sum - 1
    for m in range(1, max_single + 1):
        for nw in ctx.basis_words(m):
            if not derivation_apply(DerivationElem(g, {nw: 1}), om).is_zero():
                omega_ok = False
                detail = f"omega not annihilated by N({W.word_name(nw)})"
                break
        if not omega_ok:
            break
    return {
        "suite": "bracket_oracle",
        "g": g,
        "max_weight_sum": max_weight_sum,
        "pairs_checked": pairs_checked,
        "checks": [
            _check("closed_form_equals_commutator", ok, detail if not ok else ""),
            _check("omega_annihilation", omega_ok, detail if not omega_ok else ""),
        ],
        "ok": ok and omega_ok,
    }


# -- matrix-level identity suites -------------------------------------------
#
# For every cell (p <= pmax, w <= wmax) these verify, as exact matrix
# identities,
#     boundary . boundary = 0,   d . d = 0,   d . boundary + boundary . d = 0
# out of the cell.  Large source cells are streamed in column chunks; the
# products are computed by the certified int64 sparse engine (the operator
# matrices for the canonical handles have small integer entries, and the
# overflow bound is checked before any product is trusted).


def _cell_dims(g: int, p: int, w: int, module: bool) -> int:
    if p < 0 or w < 0:
        return 0
    basis = C.mod_wedge_basis(g, p, w) if module else C.wedge_basis(g, p, w)
    return basis.dim()


def _emit_ops(g: int, module: bool, delta, mu):
    ctx = algebra(g)
    if module:
        return (
            lambda mono: C.mod_boundary_monomial(ctx, mono),
            lambda mono: C.mod_cochain_monomial(ctx, delta, mu, mono),
        )
    return (
        lambda mono: C.boundary_monomial(ctx, mono),
        lambda mono: C.cochain_monomial(ctx, delta, mono),
    )


def _small_csc(g: int, op: str, p: int, w: int, module: bool, delta, mu, cache: dict):
    """Assembled int64 csc of an operator out of a (small) cell."""
    key = (op, p, w)
    if key in cache:
        return cache[key]
    if p < 0 or w < 0:
        cache[key] = None
        return None
    pre = "mod_" if module else ""
    mat = C.assemble(pre + op, g, p, w, delta=delta, mu=mu)
    r, c, v = [], [], []
    for col_idx, col in enumerate(mat.columns):
        for row_idx, val in col.items():
            r.append(row_idx)
            c.append(col_idx)
            v.append(int(val))
    out = int_csc(mat.rows, mat.cols, r, c, v)
    cache[key] = out
    return out


def matrix_identity_suite(
    g: int,
    pmax: int,
    wmax: int,
    module: bool = False,
    chunk_size: int = 40000,
) -> dict:
    """boundary^2 = 0, d^2 = 0 and the anticommutator identity on every
    cell p <= pmax, w <= wmax, as exact matrix identities."""
    delta = C.AlgCobracket(g)
    mu = C.AlgComodule(g)
    ctx = algebra(g)
    emit_b, emit_d = _emit_ops(g, module, delta, mu)
    checks = []

    for w in range(0, wmax + 1):
        small_cache: dict = {}
        for p in range(0, pmax + 1):
            dim = _cell_dims(g, p, w, module)
            if dim == 0:
                continue
            # targets of the streamed operators
            dim_b = _cell_dims(g, p - 1, w - 2, module) if p >= 1 else 0
            dim_d = _cell_dims(g, p + 1, w - 2, module)
            need_bb = p >= 2 and dim_b > 0
            need_dd = dim_d > 0
            need_anti = p >= 1 and (dim_b > 0 or dim_d > 0)
            if not (need_bb or need_dd or need_anti):
                continue

            tgt_b = (
                (C.mod_wedge_basis(g, p - 1, w - 2) if module else C.wedge_basis(g, p - 1, w - 2))
                if dim_b
                else None
            )
            tgt_d = (
                (C.mod_wedge_basis(g, p + 1, w - 2) if module else C.wedge_basis(g, p + 1, w - 2))
                if dim_d
                else None
            )
            s_bb = _small_csc(g, "boundary", p - 1, w - 2, module, delta, mu, small_cache) if need_bb else None
            s_dd = _small_csc(g, "cochain_d", p + 1, w - 2, module, delta, mu, small_cache) if need_dd else None
            s_anti_d = (
                _small_csc(g, "cochain_d", p - 1, w - 2, module, delta, mu, small_cache)
                if need_anti and dim_b
                else None
            )
            s_anti_b = (
                _small_csc(g, "boundary", p + 1, w - 2, module, delta, mu, small_cache)
                if need_anti and dim_d
                else None
            )

            source = (
                C.mod_wedge_basis(g, p, w).monomials
                if module
                else C.wedge_basis(g, p, w).monomials
            )
            ok_bb = ok_dd = ok_anti = True
            for lo in range(0, dim, chunk_size):
                cols = source[lo : lo + chunk_size]
                n = len(cols)
                rb, cb, vb = [], [], []
                rd, cd, vd = [], [], []
                for j, mono in enumerate(cols):
                    if tgt_b is not None:
                        pos = tgt_b.position
                        for t, s in emit_b(mono):
                            rb.append(pos[t])
                            cb.append(j)
                            vb.append(s)
                    if tgt_d is not None:
                        pos = tgt_d.position
                        for t, s in emit_d(mono):
                            rd.append(pos[t])
                            cd.append(j)
                            vd.append(s)
                mb = int_csc(dim_b, n, rb, cb, vb) if tgt_b is not None else None
                md = int_csc(dim_d, n, rd, cd, vd) if tgt_d is not None else None
                if need_bb and mb is not None:
                    assert product_bound_ok(s_bb, mb)
                    z = s_bb @ mb
                    z.eliminate_zeros()
                    ok_bb = ok_bb and z.nnz == 0
                if need_dd and md is not None:
                    assert product_bound_ok(s_dd, md)
                    z = s_dd @ md
                    z.eliminate_zeros()
                    ok_dd = ok_dd and z.nnz == 0
                if need_anti:
                    za = None
                    if s_anti_d is not None and mb is not None:
                        assert product_bound_ok(s_anti_d, mb)
                        za = s_anti_d @ mb
                    if s_anti_b is not None and md is not None:
                        assert product_bound_ok(s_anti_b, md)
                        zb = s_anti_b @ md
                        za = zb if za is None else za + zb
                    if za is not None:
                        za.eliminate_zeros()
                        ok_anti = ok_anti and za.nnz == 0
            if need_bb:
                checks.append(_check(f"boundary2_zero_p{p}_w{w}", ok_bb))
            if need_dd:
                checks.append(_check(f"d2_zero_p{p}_w{w}", ok_dd))
            if need_anti:
                checks.append(_check(f"anticommutator_zero_p{p}_w{w}", ok_anti))
    return {
        "suite": "module_matrix" if module else "ce_matrix",
        "g": g,
        "pmax": pmax,
        "wmax": wmax,
        "checks": checks,
        "ok": all(c["ok"] for c in checks),
    }
