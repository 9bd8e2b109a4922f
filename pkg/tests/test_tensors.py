import random
from fractions import Fraction

import pytest

from necklaces import (
    GenusMismatch,
    PrecisionError,
    Tensor,
    TruncatedSeries,
    concat_mul,
    coproduct,
    cyclicize,
    exp_series,
    inverse_series,
    is_grouplike,
    is_lie_element,
    log_series,
    omega,
    pairing,
)
from necklaces.words import Letter, parse_word, word_name

A1, B1, A2, B2 = 0, 1, 2, 3


def T(g, *terms):
    return Tensor(g, {w: c for w, c in terms})


def rand_tensor(rng, g, max_w=4, nterms=4):
    terms = {}
    for _ in range(nterms):
        m = rng.randint(0, max_w)
        w = tuple(rng.randrange(2 * g) for _ in range(m))
        terms[w] = terms.get(w, 0) + rng.choice([-2, -1, 1, 2])
    return Tensor(g, terms)


class TestConcat:
    def test_basis_concatenation(self):
        assert Tensor.letter(1, A1) * Tensor.letter(1, B1) == T(1, ((A1, B1), 1))

    def test_unit_law(self):
        rng = random.Random(7)
        one = Tensor.unit(2)
        for _ in range(10):
            t = rand_tensor(rng, 2)
            assert one * t == t
            assert t * one == t

    def test_bilinear_expansion(self):
        x = T(1, ((A1,), 1), ((B1,), 1))
        y = T(1, ((A1,), 1), ((B1,), -1))
        expected = T(1, ((A1, A1), 1), ((A1, B1), -1), ((B1, A1), 1), ((B1, B1), -1))
        assert x * y == expected

    def test_associative(self):
        rng = random.Random(11)
        for _ in range(15):
            x, y, z = (rand_tensor(rng, 2, 3, 3) for _ in range(3))
            assert (x * y) * z == x * (y * z)

    def test_genus_mismatch(self):
        with pytest.raises(GenusMismatch):
            concat_mul(Tensor.letter(1, A1), Tensor.letter(2, A2))


class TestPairing:
    def test_values(self):
        assert pairing(A1, B1) == 1
        assert pairing(B1, A1) == -1
        assert pairing(A1, B2) == 0
        assert pairing(Letter("a", 1), Letter("b", 1)) == 1

    def test_antisymmetric(self):
        for g in (1, 2, 3):
            for x in range(2 * g):
                for y in range(2 * g):
                    assert pairing(x, y) == -pairing(y, x)

    def test_pairing_matrix_determinant_one(self):
        # block-diagonal with 2x2 blocks [[0,1],[-1,0]], determinant 1
        for g in (1, 2, 3):
            n = 2 * g
            m = [[Fraction(pairing(i, j)) for j in range(n)] for i in range(n)]
            det = Fraction(1)
            for col in range(n):
                piv = next(r for r in range(col, n) if m[r][col] != 0)
                if piv != col:
                    m[col], m[piv] = m[piv], m[col]
                    det = -det
                det *= m[col][col]
                inv = 1 / m[col][col]
                for r in range(col + 1, n):
                    f = m[r][col] * inv
                    if f:
                        for cc in range(col, n):
                            m[r][cc] -= f * m[col][cc]
            assert det == 1


class TestOmegaCyclicize:
    def test_omega_g1(self):
        assert omega(1) == T(1, ((A1, B1), 1), ((B1, A1), -1))

    def test_omega_g2(self):
        assert omega(2) == T(
            2, ((A1, B1), 1), ((B1, A1), -1), ((A2, B2), 1), ((B2, A2), -1)
        )

    def test_omega_weight(self):
        for g in (1, 2, 3):
            assert omega(g).weight_support() == [2]

    def test_cyclicize_examples(self):
        assert cyclicize(T(1, ((A1, B1), 1))) == T(1, ((A1, B1), 1), ((B1, A1), 1))
        assert cyclicize(Tensor.unit(1)).is_zero()
        assert cyclicize(T(1, ((A1, A1), 1))) == T(1, ((A1, A1), 2))

    def test_cyclicize_squared_is_weight_times(self):
        rng = random.Random(3)
        for g in (1, 2):
            for m in range(1, 6):
                t = Tensor(
                    g,
                    {
                        tuple(rng.randrange(2 * g) for _ in range(m)): rng.choice([1, 2, -1])
                        for _ in range(4)
                    },
                )
                assert cyclicize(cyclicize(t)) == cyclicize(t).scale(m)


class TestSeries:
    def test_exp_zero(self):
        z = TruncatedSeries(Tensor.zero(1), 4)
        assert exp_series(z) == TruncatedSeries.unit(1, 4)

    def test_log_exp_omega(self):
        for d in (2, 3, 4, 5):
            s = TruncatedSeries(omega(1), d)
            assert log_series(exp_series(s)) == s

    def test_exp_omega_d4(self):
        s = TruncatedSeries(omega(1), 4)
        w = omega(1)
        expected = Tensor.unit(1) + w + (w * w).scale(Fraction(1, 2))
        assert exp_series(s) == TruncatedSeries(expected, 4)

    def test_exp_log_roundtrip_random(self):
        rng = random.Random(5)
        for _ in range(8):
            t = rand_tensor(rng, 2, 4, 4)
            t = t - t.component(0)  # kill weight 0
            s = TruncatedSeries(t, 5)
            assert log_series(exp_series(s)) == s
            u = TruncatedSeries.unit(2, 5) + s
            assert exp_series(log_series(u)) == u

    def test_exp_precondition(self):
        with pytest.raises(PrecisionError):
            exp_series(TruncatedSeries.unit(1, 3))
        with pytest.raises(PrecisionError):
            log_series(TruncatedSeries(Tensor.zero(1), 3))

    def test_inverse(self):
        rng = random.Random(9)
        for _ in range(6):
            t = rand_tensor(rng, 1, 4, 3)
            s = TruncatedSeries.unit(1, 5) + TruncatedSeries(t - t.component(0), 5)
            assert s * inverse_series(s) == TruncatedSeries.unit(1, 5)

    def test_mixed_cutoffs_use_min(self):
        a = TruncatedSeries(omega(1), 5)
        b = TruncatedSeries(omega(1), 3)
        assert (a * b).cutoff == 3


class TestCoproduct:
    def test_letter(self):
        s = TruncatedSeries(Tensor.letter(1, A1), 3)
        cp = coproduct(s)
        assert cp.terms == {((A1,), ()): 1, ((), (A1,)): 1}

    def test_unit(self):
        cp = coproduct(TruncatedSeries.unit(1, 2))
        assert cp.terms == {((), ()): 1}

    def test_word_a1b1(self):
        cp = coproduct(TruncatedSeries(T(1, ((A1, B1), 1)), 4))
        assert cp.terms == {
            ((A1, B1), ()): 1,
            ((A1,), (B1,)): 1,
            ((B1,), (A1,)): 1,
            ((), (A1, B1)): 1,
        }

    def test_grouplike_examples(self):
        assert is_grouplike(exp_series(TruncatedSeries(Tensor.letter(1, A1), 5)))
        assert not is_grouplike(
            TruncatedSeries(Tensor.unit(1) + T(1, ((A1, B1), 1)), 4)
        )
        assert is_grouplike(TruncatedSeries.unit(1, 4))

    def test_exp_of_primitive_grouplike(self):
        rng = random.Random(13)
        for g in (1, 2):
            for d in (3, 4, 5, 6):
                p = Tensor(
                    g,
                    {(rng.randrange(2 * g),): rng.choice([-2, -1, 1, 2]) for _ in range(3)},
                )
                assert is_grouplike(exp_series(TruncatedSeries(p, d)))


class TestLieElements:
    def test_letters_are_lie(self):
        assert is_lie_element(Tensor.letter(2, A2))

    def test_omega_is_lie(self):
        for g in (1, 2):
            assert is_lie_element(omega(g))

    def test_products_are_not(self):
        assert not is_lie_element(T(1, ((A1, A1), 1)))

    def test_brackets_are_lie(self):
        x = Tensor.letter(1, A1)
        y = Tensor.letter(1, B1)
        b = x * y - y * x
        assert is_lie_element(b)
        assert is_lie_element(b * x - x * b + y.scale(3))


class TestJsonAndInvariants:
    def test_roundtrip(self):
        rng = random.Random(21)
        for _ in range(10):
            t = rand_tensor(rng, 2).scale(Fraction(3, 2))
            assert Tensor.from_json_dict(t.to_json_dict()) == t

    def test_json_shape(self):
        t = T(2, ((A1, B2, A1), Fraction(3, 2)))
        assert t.to_json_dict() == {
            "g": 2,
            "terms": [{"word": "a1 b2 a1", "coeff": "3/2"}],
        }

    def test_no_zero_terms_stored(self):
        t = T(1, ((A1,), 1)) - T(1, ((A1,), 1))
        assert t.terms == {}

    def test_word_names(self):
        assert word_name((A1, B2, A1)) == "a1 b2 a1"
        assert parse_word("a1 b2 a1") == (A1, B2, A1)
        assert parse_word("") == ()
