import random
from fractions import Fraction

import pytest

from necklaces.errors import InconsistentExpansions
from necklaces.expansion import (
    Expansion,
    abelianization,
    boundary_word,
    compare_expansions,
    free_reduce,
    group_inverse,
    group_mul,
    group_word_name,
    lie_basis,
    lie_dimension,
    loop_tensor,
    lyndon_words,
    parse_group_word,
    symplectic_expansion,
    symplectic_lie_derivations,
)
from necklaces.lie import DerivationElem, exp_derivation
from necklaces.tensors import (
    TruncatedSeries,
    is_lie_element,
    log_series,
    omega,
)

A1, B1 = 0, 1


class TestGroupWords:
    def test_free_reduction(self):
        assert free_reduce((1, -1)) == ()
        assert free_reduce((1, 2, -2, -1)) == ()
        assert free_reduce((1, 2, -2, 3)) == (1, 3)

    def test_boundary_word(self):
        assert boundary_word(1) == (1, 2, -1, -2)
        assert len(boundary_word(2)) == 8
        for g in (1, 2, 3):
            assert abelianization(boundary_word(g), g) == {}

    def test_parse_and_name(self):
        w = parse_group_word("x1 x2^-1 x1")
        assert w == (1, -2, 1)
        assert group_word_name(w) == "x1 x2^-1 x1"
        assert parse_group_word("1") == ()


class TestEvaluate:
    def test_empty_word(self):
        th = Expansion.naive_exponential(1, 4)
        assert th.evaluate(()) == TruncatedSeries.unit(1, 4)

    def test_inverse_law(self):
        th = Expansion.naive_exponential(2, 5)
        assert th.evaluate((1, -1)) == TruncatedSeries.unit(2, 5)
        s = th.evaluate((3,)) * th.evaluate((-3,))
        assert s == TruncatedSeries.unit(2, 5)

    def test_bch_degree_two(self):
        for g in (1, 2):
            th0 = Expansion.naive_exponential(g, 4)
            lg = log_series(th0.evaluate(boundary_word(g)))
            assert lg.tensor.component(2) == omega(g)
            assert lg.tensor.component(0).is_zero()
            assert lg.tensor.component(1).is_zero()


class TestLieBasis:
    def test_weight1(self):
        assert len(lie_basis(1, 1)) == 2
        assert len(lie_basis(2, 1)) == 4

    def test_witt_dimensions(self):
        for g in (1, 2):
            for n in range(1, 6):
                assert len(lie_basis(g, n)) == lie_dimension(g, n)
        assert lie_dimension(1, 2) == 1
        assert lie_dimension(1, 3) == 2

    def test_elements_are_lie(self):
        for g in (1, 2):
            for n in range(1, 5):
                for h in lie_basis(g, n):
                    assert is_lie_element(h)
                    assert h.weight_support() == [n]

    def test_lyndon_words_count(self):
        # Lyndon words of length n over k letters = Witt number
        assert len(lyndon_words(2, 2)) == 1
        assert len(lyndon_words(2, 3)) == 2
        assert len(lyndon_words(4, 3)) == 20

    def test_linear_independence(self):
        from necklaces.linalg import SparseRationalMatrix, rank

        for g, n in [(1, 4), (1, 5), (2, 3)]:
            basis = lie_basis(g, n)
            keys = sorted({w for h in basis for w in h.terms})
            pos = {k: i for i, k in enumerate(keys)}
            m = SparseRationalMatrix(
                len(keys),
                len(basis),
                [{pos[w]: c for w, c in h.terms.items()} for h in basis],
            )
            assert rank(m) == len(basis)


class TestSolver:
    def test_d2_is_naive(self):
        th = symplectic_expansion(1, 2)
        assert th.is_symplectic()

    def test_g1_d5(self):
        th = symplectic_expansion(1, 5)
        assert th.check_normalization()
        assert th.check_grouplike()
        assert th.check_boundary()

    def test_g2_d4(self):
        th = symplectic_expansion(2, 4)
        assert th.check_normalization()
        assert th.check_grouplike()
        assert th.check_boundary()

    def test_logs_are_lie(self):
        th = symplectic_expansion(1, 5)
        for l in range(2):
            assert is_lie_element(log_series(th.series[l]).tensor)

    def test_deterministic(self):
        a = symplectic_expansion(1, 5)
        b = symplectic_expansion(1, 5)
        assert a.to_json_dict() == b.to_json_dict()

    def test_json_roundtrip(self):
        th = symplectic_expansion(2, 3)
        th2 = Expansion.from_json_dict(th.to_json_dict())
        assert th2.to_json_dict() == th.to_json_dict()
        assert th2.is_symplectic()


class TestCompare:
    def test_identity(self):
        th = symplectic_expansion(1, 4)
        assert compare_expansions(th, th).is_zero()

    def test_no_weight3_perturbations_at_genus_one(self):
        # the bracketing map has zero kernel there, so the smallest valid
        # change-of-expansion derivations at g=1 appear in weight 4
        assert symplectic_lie_derivations(1, 3) == []
        assert len(symplectic_lie_derivations(1, 4)) == 1

    def test_roundtrip_recovers_perturbation(self):
        rng = random.Random(2024)
        for g, cutoff, wgt in [(1, 5, 4), (2, 4, 3)]:
            th = symplectic_expansion(g, cutoff)
            pool = symplectic_lie_derivations(g, wgt)
            v = DerivationElem.zero(g)
            for u0 in pool:
                v = v + u0.scale(rng.choice([-2, -1, 1, 2]))
            assert not v.is_zero() and v.min_weight() >= 3
            pert = Expansion(
                g,
                cutoff,
                {
                    l: TruncatedSeries(
                        exp_derivation(v, th.series[l].tensor, cutoff), cutoff
                    )
                    for l in range(2 * g)
                },
            )
            assert pert.is_symplectic()
            u = compare_expansions(th, pert)
            assert u == v.truncate(cutoff + 1)

    def test_inconsistent_rejected(self):
        th = symplectic_expansion(1, 4)
        bad = Expansion.naive_exponential(1, 4)  # not symplectic at D=4
        with pytest.raises(InconsistentExpansions):
            compare_expansions(th, bad)

    def test_roundtrip_exactness_on_series(self):
        # the recovered derivation reproduces the perturbed expansion on
        # the nose, generator by generator
        g, cutoff = 2, 4
        th = symplectic_expansion(g, cutoff)
        v = symplectic_lie_derivations(g, 4)[2]
        pert = Expansion(
            g,
            cutoff,
            {
                l: TruncatedSeries(
                    exp_derivation(v, th.series[l].tensor, cutoff), cutoff
                )
                for l in range(2 * g)
            },
        )
        u = compare_expansions(th, pert)
        for l in range(2 * g):
            assert (
                exp_derivation(u, th.series[l].tensor, cutoff)
                == pert.series[l].tensor
            )


class TestLoopTensor:
    def test_empty_word(self):
        th = symplectic_expansion(1, 4)
        assert loop_tensor(th, ()).is_zero()

    def test_single_generator_leading_terms(self):
        th = symplectic_expansion(1, 5)
        lt = loop_tensor(th, (1,))
        # -N(exp(a1)) starts with -N(a1) - 1/2 N(a1 a1) - ...
        assert lt.terms[(A1,)] == -1
        assert lt.terms[(A1, A1)] == Fraction(-1, 2)
        assert lt.terms[(A1, A1, A1)] == Fraction(-1, 6)

    def test_conjugation_invariance(self):
        rng = random.Random(5)
        for g, cutoff in [(1, 5), (2, 4)]:
            th = symplectic_expansion(g, cutoff)
            for _ in range(6):
                w = free_reduce(
                    tuple(rng.choice([1, -1, 2, -2, 2 * g, -2 * g]) for _ in range(4))
                )
                h = free_reduce(
                    tuple(rng.choice([1, -1, 2, -2]) for _ in range(3))
                )
                conj = group_mul(group_mul(h, w), group_inverse(h))
                assert loop_tensor(th, w) == loop_tensor(th, conj)
