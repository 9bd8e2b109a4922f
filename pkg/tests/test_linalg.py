import random
from fractions import Fraction

from necklaces.linalg import (
    EchelonReducer,
    SparseRationalMatrix,
    column_echelon_int,
    image_basis,
    kernel_basis,
    nullity,
    rank,
    rref,
    solve_columns,
)


def rand_matrix(rng, rows, cols, density=0.2, fractions=False):
    cols_data = []
    for _ in range(cols):
        col = {}
        for r in range(rows):
            if rng.random() < density:
                v = rng.randint(-4, 4)
                if v:
                    col[r] = Fraction(v, rng.randint(1, 3)) if fractions else v
        cols_data.append(col)
    return SparseRationalMatrix(rows, cols, cols_data)


def dense(m):
    return [[m.entry(i, j) for j in range(m.cols)] for i in range(m.rows)]


class TestBasics:
    def test_zero_matrix(self):
        m = SparseRationalMatrix(3, 4)
        assert rank(m) == 0
        assert nullity(m) == 4
        assert len(kernel_basis(m)) == 4
        assert image_basis(m) == []

    def test_identity(self):
        m = SparseRationalMatrix.from_entries(3, 3, [(i, i, 1) for i in range(3)])
        assert rank(m) == 3
        assert kernel_basis(m) == []
        assert len(image_basis(m)) == 3

    def test_matvec_matmul(self):
        rng = random.Random(1)
        a = rand_matrix(rng, 5, 4)
        b = rand_matrix(rng, 4, 3)
        ab = a @ b
        for j in range(3):
            assert ab.column(j) == a.matvec(b.column(j))

    def test_rank_equals_transpose_rank(self):
        rng = random.Random(2)
        for _ in range(10):
            m = rand_matrix(rng, 20, 30, density=0.15, fractions=True)
            assert rank(m) == rank(m.transpose())

    def test_rank_nullity(self):
        rng = random.Random(3)
        for _ in range(10):
            m = rand_matrix(rng, 12, 18, density=0.25)
            assert rank(m) + nullity(m) == m.cols


class TestKernelImage:
    def test_kernel_vectors_annihilate(self):
        rng = random.Random(4)
        for _ in range(10):
            m = rand_matrix(rng, 10, 14, density=0.3, fractions=True)
            for v in kernel_basis(m):
                assert m.matvec(v) == {}

    def test_kernel_dimension(self):
        rng = random.Random(5)
        for _ in range(10):
            m = rand_matrix(rng, 8, 12, density=0.3)
            assert len(kernel_basis(m)) == nullity(m)

    def test_image_spans_columns(self):
        rng = random.Random(6)
        for _ in range(8):
            m = rand_matrix(rng, 9, 7, density=0.4)
            red = EchelonReducer()
            for i, vec in enumerate(image_basis(m)):
                red.insert(vec, i)
            for col in m.columns:
                rem, _ = red.reduce(col)
                assert rem == {}

    def test_echelon_leads_distinct(self):
        rng = random.Random(7)
        m = rand_matrix(rng, 10, 15, density=0.3)
        piv = column_echelon_int(m)
        for lead, vec in piv.items():
            assert min(vec) == lead
            assert vec[lead] > 0


class TestRref:
    def test_rref_identity_part(self):
        rng = random.Random(8)
        for _ in range(6):
            m = rand_matrix(rng, 6, 9, density=0.4, fractions=True)
            pivots, rows = rref(m)
            for k, (p, row) in enumerate(zip(pivots, rows)):
                assert row[p] == 1
                for p2 in pivots:
                    if p2 != p:
                        assert p2 not in row

    def test_rref_row_space_preserved(self):
        # every original row must reduce to zero against the RREF rows
        rng = random.Random(9)
        m = rand_matrix(rng, 6, 9, density=0.4)
        pivots, rows = rref(m)
        red = EchelonReducer()
        for i, row in enumerate(rows):
            red.insert(row, i)
        mt = m.transpose()
        for j in range(mt.cols):
            rem, _ = red.reduce(mt.column(j))
            assert rem == {}


class TestSolve:
    def test_solve_consistent(self):
        rng = random.Random(10)
        for _ in range(10):
            m = rand_matrix(rng, 8, 6, density=0.5)
            x = {j: rng.randint(-3, 3) for j in range(6)}
            b = m.matvec(x)
            sol = solve_columns(m.columns, b)
            assert sol is not None
            got = {}
            for j, c in enumerate(sol):
                for r, v in m.columns[j].items():
                    got[r] = got.get(r, 0) + c * v
            assert {r: v for r, v in got.items() if v != 0} == b

    def test_solve_inconsistent(self):
        m = SparseRationalMatrix.from_entries(2, 1, [(0, 0, 1)])
        assert solve_columns(m.columns, {1: 1}) is None


class TestSerialization:
    def test_json_roundtrip(self):
        rng = random.Random(11)
        m = rand_matrix(rng, 5, 7, density=0.4, fractions=True)
        assert SparseRationalMatrix.from_json_dict(m.to_json_dict()) == m

    def test_json_shape(self):
        m = SparseRationalMatrix.from_entries(2, 2, [(0, 1, Fraction(3, 2))])
        assert m.to_json_dict() == {"rows": 2, "cols": 2, "entries": [[0, 1, "3/2"]]}

    def test_matrixmarket(self):
        m = SparseRationalMatrix.from_entries(2, 2, [(0, 1, Fraction(3, 2)), (1, 0, -1)])
        text = m.to_matrixmarket()
        lines = text.strip().split("\n")
        assert lines[0].startswith("%%MatrixMarket")
        assert lines[1] == "2 2 2"
        assert "1 2 3/2" in lines and "2 1 -1" in lines
