"""
Exact sparse linear algebra over the rationals.

Matrices are stored as dict-of-dict rows ``{row: {col: Fraction}}`` with
no stored zeros. Gaussian elimination uses Markowitz-style pivoting: the
pivot is taken from a column or row of minimal active count, ties going
to the lowest row and then the lowest column, so pivots and therefore
nullspace bases are reproducible.

Small dense systems (the pairing solve and congruence) go through sympy
DomainMatrix over QQ.
"""

from __future__ import annotations

import heapq
import logging
from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

__all__ = [
    "SparseRationalMatrix",
    "EchelonBasis",
    "solve_dense",
    "congruent_form",
]


class SparseRationalMatrix:
    """Immutable sparse matrix with exact rational entries."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows, cols, data=None):
        self.rows = int(rows)
        self.cols = int(cols)
        clean = {}
        for r, row in (data or {}).items():
            kept = {c: Fraction(v) for c, v in row.items() if v}
            if kept:
                clean[r] = kept
        self._data = clean

    @classmethod
    def from_entries(cls, rows, cols, entries):
        """Build from a mapping ``(row, col) -> value``."""
        data = {}
        for (r, c), v in entries.items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry {(r, c)} outside {rows}x{cols}")
            data.setdefault(r, {})[c] = v
        return cls(rows, cols, data)

    @classmethod
    def from_dense(cls, dense):
        dense = [list(row) for row in dense]
        cols = len(dense[0]) if dense else 0
        return cls(
            len(dense), cols, {r: dict(enumerate(row)) for r, row in enumerate(dense)}
        )

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def nnz(self):
        return sum(len(row) for row in self._data.values())

    def __getitem__(self, index):
        r, c = index
        return self._data.get(r, {}).get(c, Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, SparseRationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __repr__(self):
        return f"SparseRationalMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def entries(self):
        """Mapping ``(row, col) -> Fraction`` of the stored entries."""
        return {(r, c): v for r, row in self._data.items() for c, v in row.items()}

    def row(self, r):
        return dict(self._data.get(r, {}))

    def column(self, c):
        return {r: row[c] for r, row in self._data.items() if c in row}

    def columns(self):
        """All columns as sparse dicts, in column order."""
        out = [dict() for _ in range(self.cols)]
        for r, row in self._data.items():
            for c, v in row.items():
                out[c][r] = v
        return out

    def is_zero(self):
        return not self._data

    def to_dense(self):
        return [
            [self._data.get(r, {}).get(c, Fraction(0)) for c in range(self.cols)]
            for r in range(self.rows)
        ]

    def transpose(self):
        data = {}
        for r, row in self._data.items():
            for c, v in row.items():
                data.setdefault(c, {})[r] = v
        return SparseRationalMatrix(self.cols, self.rows, data)

    def submatrix(self, row_indices, col_indices):
        """
        Restrict to the given rows and columns, renumbered in the order
        they are listed.
        """
        row_pos = {r: i for i, r in enumerate(row_indices)}
        col_pos = {c: j for j, c in enumerate(col_indices)}
        data = {}
        for r, row in self._data.items():
            i = row_pos.get(r)
            if i is None:
                continue
            kept = {col_pos[c]: v for c, v in row.items() if c in col_pos}
            if kept:
                data[i] = kept
        return SparseRationalMatrix(len(row_pos), len(col_pos), data)

    def apply(self, vector):
        """Matrix times a sparse column vector ``{col: value}``."""
        out = {}
        for r, row in self._data.items():
            acc = Fraction(0)
            for c, v in row.items():
                x = vector.get(c)
                if x:
                    acc += v * x
            if acc:
                out[r] = acc
        return out

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        data = {}
        for r, row in self._data.items():
            acc = {}
            for k, v in row.items():
                for c, w in other._data.get(k, {}).items():
                    acc[c] = acc.get(c, 0) + v * w
            data[r] = acc
        return SparseRationalMatrix(self.rows, other.cols, data)

    def __neg__(self):
        return SparseRationalMatrix(
            self.rows,
            self.cols,
            {r: {c: -v for c, v in row.items()} for r, row in self._data.items()},
        )

    def rank(self):
        if self.is_zero():
            return 0
        return len(_eliminate(self._data, self.cols, keep_pivot_rows=False))

    def rref(self):
        """
        Reduced row echelon data: list of ``(pivot_col, row)`` with each
        row normalised to 1 on its pivot and zero on every other pivot
        column, sorted by pivot column.
        """
        pivots = _eliminate(self._data, self.cols, keep_pivot_rows=True)
        return _back_substitute(pivots)

    def nullspace(self):
        """
        Basis of the right nullspace as sparse vectors, one per free
        column in increasing column order.
        """
        reduced = self.rref()
        pivot_cols = {c for c, _ in reduced}
        by_free = {}
        for c, row in reduced:
            for f, v in row.items():
                if f != c:
                    by_free.setdefault(f, {})[c] = -v
        basis = []
        for f in range(self.cols):
            if f in pivot_cols:
                continue
            vec = dict(by_free.get(f, {}))
            vec[f] = Fraction(1)
            basis.append(vec)
        return basis


def _eliminate(data, ncols, keep_pivot_rows):
    """
    Forward Gauss-Jordan elimination with Markowitz pivoting on a copy of
    the dict-of-dict rows. Returns the pivots in the order they were
    chosen as ``(col, row_dict)`` (row dicts only when requested).
    """
    rows = {r: dict(row) for r, row in data.items() if row}
    col_rows = {}
    for r, row in rows.items():
        for c in row:
            col_rows.setdefault(c, set()).add(r)

    row_buckets = {}
    col_buckets = {}

    def _bucket_add(buckets, count, key):
        buckets.setdefault(count, set()).add(key)

    def _bucket_remove(buckets, count, key):
        bucket = buckets.get(count)
        if bucket is not None:
            bucket.discard(key)
            if not bucket:
                del buckets[count]

    for r, row in rows.items():
        _bucket_add(row_buckets, len(row), r)
    for c, members in col_rows.items():
        _bucket_add(col_buckets, len(members), c)

    pivots = []
    while rows:
        min_col = min(col_buckets)
        min_row = min(row_buckets)
        if min_col <= min_row:
            c = min(col_buckets[min_col])
            p = min(col_rows[c], key=lambda r: (len(rows[r]), r))
        else:
            p = min(row_buckets[min_row])
            c = min(rows[p], key=lambda k: (len(col_rows[k]), k))

        prow = rows.pop(p)
        _bucket_remove(row_buckets, len(prow), p)
        for k in prow:
            _bucket_remove(col_buckets, len(col_rows[k]), k)
            col_rows[k].discard(p)

        pv = prow[c]
        for i in sorted(col_rows[c]):
            row = rows[i]
            old_len = len(row)
            factor = row[c] / pv
            for k, v in prow.items():
                nv = row.get(k, 0) - factor * v
                if nv:
                    if k not in row:
                        col_rows.setdefault(k, set()).add(i)
                    row[k] = nv
                elif k in row:
                    del row[k]
                    col_rows[k].discard(i)
            _bucket_remove(row_buckets, old_len, i)
            if row:
                _bucket_add(row_buckets, len(row), i)
            else:
                del rows[i]

        # column counts changed for every column the pivot row touched
        del col_rows[c]
        for k in prow:
            if k == c:
                continue
            members = col_rows.get(k)
            if members:
                _bucket_add(col_buckets, len(members), k)
            elif k in col_rows:
                del col_rows[k]

        pivots.append((c, prow if keep_pivot_rows else None))
    return pivots


def _back_substitute(pivots):
    reduced = {}
    pivot_cols = [c for c, _ in pivots]
    for c, row in reversed(pivots):
        row = dict(row)
        for other in [k for k in row if k != c and k in reduced]:
            x = row.get(other)
            if not x:
                continue
            for k, v in reduced[other].items():
                nv = row.get(k, 0) - x * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        pv = row[c]
        reduced[c] = {k: v / pv for k, v in row.items()}
    return [(c, reduced[c]) for c in sorted(pivot_cols)]


class EchelonBasis:
    """
    Incrementally built echelon basis of a subspace of sparse vectors.

    Each stored vector has leading (smallest) index equal to its pivot
    and value 1 there, so reduction proceeds in increasing index order.
    """

    def __init__(self, vectors=()):
        self._pivots = {}
        for v in vectors:
            self.add(v)

    def __len__(self):
        return len(self._pivots)

    def reduce(self, vector):
        v = {k: Fraction(x) for k, x in vector.items() if x}
        heap = list(v)
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            x = v.get(c)
            if not x or c not in self._pivots:
                continue
            for k, y in self._pivots[c].items():
                nv = v.get(k, 0) - x * y
                if nv:
                    if k not in v:
                        heapq.heappush(heap, k)
                    v[k] = nv
                else:
                    v.pop(k, None)
        return v

    def add(self, vector):
        """Insert `vector`; returns the reduced residual, empty if dependent."""
        v = self.reduce(vector)
        if v:
            lead = min(v)
            x = v[lead]
            self._pivots[lead] = {k: y / x for k, y in v.items()}
        return v

    def contains(self, vector):
        return not self.reduce(vector)


def _qq(x):
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)


def _domain(rows, cols):
    return DomainMatrix([[_qq(x) for x in row] for row in rows], (len(rows), cols), QQ)


def _fractions(M):
    dense = M.to_Matrix()
    return [
        [Fraction(int(dense[i, j].p), int(dense[i, j].q)) for j in range(dense.cols)]
        for i in range(dense.rows)
    ]


def solve_dense(a, b):
    """
    Solve ``a @ x = b`` exactly for small dense systems with several
    right-hand sides.

    Parameters
    ----------
    a : list of lists
        m x n coefficient matrix.
    b : list of lists
        m x r right-hand sides.

    Returns
    -------
    list of lists
        n x r particular solution with free variables set to zero.

    Raises
    ------
    ValueError
        If the system is inconsistent.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    r = len(b[0]) if m else 0
    if not m:
        return []
    augmented = _domain([list(a[i]) + list(b[i]) for i in range(m)], n + r)
    reduced, pivots = augmented.rref()
    if any(c >= n for c in pivots):
        raise ValueError("inconsistent linear system")
    rows = _fractions(reduced)
    x = [[Fraction(0)] * r for _ in range(n)]
    for i, c in enumerate(pivots):
        x[c] = rows[i][n:]
    logging.debug(f"Solved {m}x{n} system with {r} right-hand sides")
    return x


def congruent_form(p, form):
    """Dense ``p^T form p`` over QQ, as nested lists of Fractions."""
    P = _domain(p, len(p[0]) if p else 0)
    M = _domain(form, len(form))
    return _fractions(P.transpose().matmul(M).matmul(P))
