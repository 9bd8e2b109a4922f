"""Exact sparse linear algebra over the rationals.

Matrices are stored column-major as dicts {row: coeff} with int or
Fraction entries.  Rank and image computations use fraction-free integer
column elimination with gcd normalization; reduced row echelon form and
kernel extraction work over Fraction.  Because all our matrices decompose
into blocks with disjoint row/column supports (the multidegree grading),
sparse elimination never mixes blocks, which keeps fill-in local.

No floating point is used anywhere; numpy/scipy enter only through
``int_csc`` as an exact int64 engine for large matrix products, with the
overflow bound checked before trusting a result.
"""

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as _sp

from .tensors import Coeff, coeff_str, parse_coeff

Vec = dict[int, Coeff]


class SparseRationalMatrix:
    """Immutable sparse matrix with exact rational entries, column-major."""

    __slots__ = ("rows", "cols", "columns")

    def __init__(self, rows: int, cols: int, columns: Sequence[Vec] | None = None):
        self.rows = rows
        self.cols = cols
        if columns is None:
            columns = [dict() for _ in range(cols)]
        if len(columns) != cols:
            raise ValueError("column count mismatch")
        self.columns = [
            {r: v for r, v in col.items() if v != 0} for col in columns
        ]
        for col in self.columns:
            for r in col:
                if not 0 <= r < rows:
                    raise ValueError(f"row index {r} out of range")

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[tuple[int, int, Coeff]]):
        columns: list[Vec] = [dict() for _ in range(cols)]
        for i, j, v in entries:
            columns[j][i] = columns[j].get(i, 0) + v
        return cls(rows, cols, columns)

    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)

    def entry(self, i: int, j: int) -> Coeff:
        return self.columns[j].get(i, 0)

    def column(self, j: int) -> Vec:
        return dict(self.columns[j])

    def entries(self) -> list[tuple[int, int, Coeff]]:
        out = [(i, j, v) for j, col in enumerate(self.columns) for i, v in col.items()]
        out.sort(key=lambda e: (e[0], e[1]))
        return out

    def matvec(self, vec: Vec) -> Vec:
        out: Vec = {}
        for j, c in vec.items():
            if c == 0:
                continue
            for i, v in self.columns[j].items():
                out[i] = out.get(i, 0) + c * v
        return {i: v for i, v in out.items() if v != 0}

    def __matmul__(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = [self.matvec(col) for col in other.columns]
        return SparseRationalMatrix(self.rows, other.cols, cols)

    def __add__(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        cols = []
        for a, b in zip(self.columns, other.columns):
            c = dict(a)
            for r, v in b.items():
                c[r] = c.get(r, 0) + v
            cols.append(c)
        return SparseRationalMatrix(self.rows, self.cols, cols)

    def __neg__(self) -> "SparseRationalMatrix":
        return SparseRationalMatrix(
            self.rows, self.cols, [{r: -v for r, v in c.items()} for c in self.columns]
        )

    def __sub__(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        return self + (-other)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SparseRationalMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and all(a == b for a, b in zip(self.columns, other.columns))
        )

    def transpose(self) -> "SparseRationalMatrix":
        cols: list[Vec] = [dict() for _ in range(self.rows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                cols[i][j] = v
        return SparseRationalMatrix(self.cols, self.rows, cols)

    def __repr__(self) -> str:
        return f"SparseRationalMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    # -- export ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[i, j, coeff_str(v)] for i, j, v in self.entries()],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SparseRationalMatrix":
        return cls.from_entries(
            int(data["rows"]),
            int(data["cols"]),
            ((int(i), int(j), parse_coeff(v)) for i, j, v in data["entries"]),
        )

    def to_matrixmarket(self) -> str:
        """MatrixMarket-style coordinate text with exact rational values."""
        lines = [
            "%%MatrixMarket matrix coordinate rational general",
            f"{self.rows} {self.cols} {self.nnz()}",
        ]
        for i, j, v in self.entries():
            lines.append(f"{i + 1} {j + 1} {coeff_str(v)}")
        return "\n".join(lines) + "\n"


# -- integer fast path for big products -----------------------------------

_INT64_SAFE = 2**62


def int_csc(rows: int, cols: int, r: list, c: list, v: list):
    """Exact int64 CSC matrix; values must be (and are checked) small ints."""
    vv = np.array(v, dtype=np.int64)
    if len(vv) and int(np.abs(vv).max()) >= 2**31:
        raise OverflowError("entries too large for the int64 fast path")
    return _sp.coo_matrix(
        (vv, (np.array(r, dtype=np.int64), np.array(c, dtype=np.int64))),
        shape=(rows, cols),
    ).tocsc()


def product_bound_ok(a, b) -> bool:
    """Certify that computing a @ b in int64 cannot overflow: every entry of
    the product is a sum of at most max_col_nnz(b) terms bounded by
    max|a| * max|b|."""
    if a.nnz == 0 or b.nnz == 0:
        return True
    amax = int(np.abs(a.data).max())
    bmax = int(np.abs(b.data).max())
    col_nnz = int(np.diff(b.indptr).max()) if b.shape[1] else 0
    return amax * bmax * max(col_nnz, 1) < _INT64_SAFE // 4


# -- exact elimination ------------------------------------------------------


def _int_scale_column(col: Vec) -> dict[int, int]:
    """Scale a rational column to a primitive integer vector."""
    denom = 1
    for v in col.values():
        if isinstance(v, Fraction):
            denom = denom * v.denominator // gcd(denom, v.denominator)
    out = {}
    g = 0
    for r, v in col.items():
        iv = int(v * denom)
        if iv:
            out[r] = iv
            g = gcd(g, iv)
    if g > 1:
        out = {r: iv // g for r, iv in out.items()}
    return out


def column_echelon_int(matrix: SparseRationalMatrix) -> dict[int, dict[int, int]]:
    """Fraction-free column echelon form of the column space.

    Returns {lead row: primitive integer vector with positive lead}.  The
    set of lead rows determines the rank; the vectors span the image.
    Deterministic given the column order.
    """
    pivots: dict[int, dict[int, int]] = {}
    for col0 in matrix.columns:
        col = _int_scale_column(col0)
        while col:
            lead = min(col)
            piv = pivots.get(lead)
            if piv is None:
                if col[lead] < 0:
                    col = {r: -v for r, v in col.items()}
                pivots[lead] = col
                break
            a, b = piv[lead], col[lead]
            new: dict[int, int] = {}
            for r, v in col.items():
                new[r] = a * v
            for r, v in piv.items():
                nv = new.get(r, 0) - b * v
                if nv:
                    new[r] = nv
                elif r in new:
                    del new[r]
            g = 0
            for v in new.values():
                g = gcd(g, v)
                if g == 1:
                    break
            col = new if g <= 1 else {r: v // g for r, v in new.items()}
    return pivots


def rank(matrix: SparseRationalMatrix) -> int:
    return len(column_echelon_int(matrix))


def nullity(matrix: SparseRationalMatrix) -> int:
    return matrix.cols - rank(matrix)


def rref(matrix: SparseRationalMatrix) -> tuple[list[int], list[Vec]]:
    """Reduced row echelon form over Fraction.

    Returns (pivot column indices, rows of the RREF as sparse dicts); zero
    rows are dropped.  Row order follows ascending pivot column.
    """
    rows: list[Vec] = [dict() for _ in range(matrix.rows)]
    for j, col in enumerate(matrix.columns):
        for i, v in col.items():
            rows[i][j] = Fraction(v)
    pivot_rows: dict[int, Vec] = {}  # pivot col -> normalized row
    for row in rows:
        row = dict(row)
        while row:
            lead = min(row)
            piv = pivot_rows.get(lead)
            if piv is None:
                inv = 1 / row[lead]
                row = {c: v * inv for c, v in row.items()}
                # clear other pivot columns still present in this row; the
                # stored rows contain no pivot column but their own lead,
                # so one pass suffices and cannot disturb the lead
                for pc in [c for c in row if c != lead and c in pivot_rows]:
                    cv = row[pc]
                    for c, v in pivot_rows[pc].items():
                        nv = row.get(c, 0) - cv * v
                        if nv:
                            row[c] = nv
                        elif c in row:
                            del row[c]
                # back-eliminate the new pivot column from existing rows
                for pc, prow in pivot_rows.items():
                    cv = prow.get(lead)
                    if cv:
                        for c, v in row.items():
                            nv = prow.get(c, 0) - cv * v
                            if nv:
                                prow[c] = nv
                            elif c in prow:
                                del prow[c]
                pivot_rows[lead] = row
                break
            cv = row[lead]
            for c, v in piv.items():
                nv = row.get(c, 0) - cv * v
                if nv:
                    row[c] = nv
                elif c in row:
                    del row[c]
    pivots = sorted(pivot_rows)
    return pivots, [pivot_rows[p] for p in pivots]


def kernel_basis(matrix: SparseRationalMatrix) -> list[Vec]:
    """Canonical kernel basis from the RREF: one vector per free column,
    with 1 in the free coordinate, listed in ascending free-column order."""
    pivots, rows = rref(matrix)
    pivot_set = set(pivots)
    basis = []
    for f in range(matrix.cols):
        if f in pivot_set:
            continue
        vec: Vec = {f: Fraction(1)}
        for p, row in zip(pivots, rows):
            v = row.get(f)
            if v:
                vec[p] = -v
        basis.append(vec)
    return basis


def image_basis(matrix: SparseRationalMatrix) -> list[Vec]:
    """Reduced echelon basis of the column space (lead coefficient 1,
    eliminated above and below), sorted by lead row."""
    pivots = column_echelon_int(matrix)
    reducer = EchelonReducer()
    for lead in sorted(pivots):
        reducer.insert(
            {r: Fraction(v) for r, v in pivots[lead].items()},
            tag=("im", lead),
            back_eliminate=True,
        )
    return [dict(vec) for _, vec in reducer.members()]


class EchelonReducer:
    """Maintains tagged vectors in reduced echelon form (distinct lead
    indices, lead coefficient 1) and reduces vectors against them."""

    def __init__(self):
        self._by_lead: dict[int, tuple[Vec, object]] = {}

    def members(self) -> list[tuple[int, Vec]]:
        return [(lead, dict(self._by_lead[lead][0])) for lead in sorted(self._by_lead)]

    def members_with_tags(self) -> list[tuple[object, Vec]]:
        return [
            (self._by_lead[lead][1], dict(self._by_lead[lead][0]))
            for lead in sorted(self._by_lead)
        ]

    def reduce(self, vec: Vec) -> tuple[Vec, dict]:
        """Fully reduce vec; returns (remainder, {tag: coefficient used})."""
        rem = {r: Fraction(v) for r, v in vec.items() if v != 0}
        used: dict = {}
        while rem:
            lead = min(rem)
            entry = self._by_lead.get(lead)
            if entry is None:
                break
            evec, tag = entry
            c = rem[lead]
            used[tag] = used.get(tag, 0) + c
            for r, v in evec.items():
                nv = rem.get(r, 0) - c * v
                if nv:
                    rem[r] = nv
                elif r in rem:
                    del rem[r]
        return rem, used

    def insert(self, vec: Vec, tag, back_eliminate: bool = False) -> bool:
        """Reduce and, if a nonzero remainder survives, normalize it to
        lead 1 and store it under the tag.  Returns True iff the vector
        extended the span.

        With back_eliminate the new vector is also cleared from previously
        stored members (full RREF shape).  That mutates stored members, so
        it must stay off when earlier members' tags carry meaning of their
        own (as in homology class coordinates, where image-tagged members
        must remain exact image vectors)."""
        rem, _ = self.reduce(vec)
        if not rem:
            return False
        lead = min(rem)
        inv = 1 / rem[lead]
        rem = {r: v * inv for r, v in rem.items()}
        if back_eliminate:
            for other, _tag in self._by_lead.values():
                cv = other.get(lead)
                if cv:
                    for r, v in rem.items():
                        nv = other.get(r, 0) - cv * v
                        if nv:
                            other[r] = nv
                        elif r in other:
                            del other[r]
        self._by_lead[lead] = (rem, tag)
        return True


def solve_columns(columns: Sequence[Vec], target: Vec) -> list[Coeff] | None:
    """One exact solution x of sum_j x_j * columns[j] = target, with free
    variables set to 0 (deterministic); None if inconsistent."""
    # lead row -> (stored vector, its expression over the original columns)
    by_lead: dict[int, tuple[Vec, dict[int, Fraction]]] = {}

    def reduce(vec: Vec) -> tuple[Vec, dict[int, Fraction]]:
        rem = {r: Fraction(v) for r, v in vec.items() if v != 0}
        expr: dict[int, Fraction] = {}
        while rem:
            lead = min(rem)
            entry = by_lead.get(lead)
            if entry is None:
                break
            evec, eexpr = entry
            c = rem[lead]
            for r, v in evec.items():
                nv = rem.get(r, 0) - c * v
                if nv:
                    rem[r] = nv
                elif r in rem:
                    del rem[r]
            for j, v in eexpr.items():
                nv = expr.get(j, 0) + c * v
                if nv:
                    expr[j] = nv
                elif j in expr:
                    del expr[j]
        return rem, expr

    for j, col in enumerate(columns):
        rem, expr = reduce(col)  # col = rem + sum expr * columns
        if not rem:
            continue
        lead = min(rem)
        scale = 1 / rem[lead]
        nvec = {r: v * scale for r, v in rem.items()}
        nexpr: dict[int, Fraction] = {j: Fraction(scale)}
        for jj, cc in expr.items():
            nv = nexpr.get(jj, 0) - scale * cc
            if nv:
                nexpr[jj] = nv
            elif jj in nexpr:
                del nexpr[jj]
        for ovec, oexpr in by_lead.values():
            cv = ovec.get(lead)
            if not cv:
                continue
            for r, v in nvec.items():
                nv = ovec.get(r, 0) - cv * v
                if nv:
                    ovec[r] = nv
                elif r in ovec:
                    del ovec[r]
            for jj, cc in nexpr.items():
                nv = oexpr.get(jj, 0) - cv * cc
                if nv:
                    oexpr[jj] = nv
                elif jj in oexpr:
                    del oexpr[jj]
        by_lead[lead] = (nvec, nexpr)

    rem, expr = reduce(target)
    if rem:
        return None
    x: list[Coeff] = [0] * len(columns)
    for j, c in expr.items():
        x[j] = c
    return x
