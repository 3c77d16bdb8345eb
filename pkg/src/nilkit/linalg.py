"""Exact linear algebra over Z/n via integer row reduction and Smith form.

Systems arrive as many short integer rows (coefficients are small, mostly
+-1).  The row space is first compressed to at most `ncols` basis rows by
integer row operations (batched against the bulk, exact gcd insertions for
the survivors); the small basis is then put in Smith normal form, which
yields particular solutions, the exact solution lattice and its size,
all modulo n.  No floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .guards import check_guard

_OVERFLOW_LIMIT = 1 << 50


def egcd(a, b):
    """(g, x, y) with g = gcd(a, b) = a*x + b*y."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def modinv(a, n):
    g, x, _ = egcd(a % n, n)
    if g != 1:
        raise ValueError(f"{a} not invertible mod {n}")
    return x % n


class ModularInfeasible(ValueError):
    """The system has no solution mod n; carries a replayable witness."""

    def __init__(self, reason, witness):
        super().__init__(f"{reason}: {witness}")
        self.reason = reason
        self.witness = witness


def _compress_rows(a, b):
    """Integer row reduction of (a | b) to <= ncols echelon rows.

    `b` may be a vector or a matrix of right-hand-side columns; the same row
    operations apply to every column.  Returns (basis, basis_rhs,
    residual_rhs, residual_rows): every input row is an integer combination
    of basis rows plus a coefficient-free residual, whose right-hand sides
    must vanish mod n for consistency.
    """
    a = np.array(a, dtype=np.int64, copy=True)
    b = np.array(b, dtype=np.int64, copy=True)
    squeeze = b.ndim == 1
    if squeeze:
        b = b[:, None]
    nrows, ncols = a.shape
    basis = {}  # pivot col -> (row ndarray, rhs row ndarray)

    def insert(row, rhs):
        row = [int(v) for v in row]
        rhs = rhs.astype(object)
        while True:
            pivots = [j for j, v in enumerate(row) if v]
            if not pivots:
                return rhs
            p = pivots[0]
            if p not in basis:
                if row[p] < 0:
                    row = [-v for v in row]
                    rhs = -rhs
                basis[p] = (np.array(row, dtype=np.int64), rhs)
                return None
            brow, brhs = basis[p]
            g, s, t = egcd(int(brow[p]), row[p])
            new_b = s * brow + t * np.array(row, dtype=np.int64)
            new_brhs = s * brhs + t * rhs
            q1, q2 = int(brow[p]) // g, row[p] // g
            res = [q1 * rv - q2 * int(bv) for rv, bv in zip(row, brow)]
            res_rhs = q1 * rhs - q2 * brhs
            basis[p] = (new_b, new_brhs)
            row, rhs = res, res_rhs

    residual_rhs = []
    residual_rows = []
    pending = np.arange(nrows)
    while pending.size:
        sub_a = a[pending]
        sub_b = b[pending]
        for p in sorted(basis):
            brow, brhs = basis[p]
            q = sub_a[:, p] // int(brow[p])
            nz = q != 0
            if nz.any():
                sub_a[nz] -= q[nz, None] * brow[None, :]
                sub_b[nz] -= q[nz, None] * np.asarray(brhs, dtype=np.int64)[None, :]
        if np.abs(sub_a).max(initial=0) > _OVERFLOW_LIMIT or np.abs(sub_b).max(
            initial=0
        ) > _OVERFLOW_LIMIT:
            raise OverflowError("entry growth during row reduction")
        a[pending] = sub_a
        b[pending] = sub_b
        nonzero = pending[np.any(sub_a != 0, axis=1)]
        if nonzero.size == 0:
            for i in pending:
                residual_rhs.append(b[i] if not squeeze else int(b[i][0]))
                residual_rows.append(int(i))
            break
        i = int(nonzero[0])
        left = insert(a[i], b[i])
        if left is not None:
            residual_rhs.append(left if not squeeze else int(left[0]))
            residual_rows.append(i)
        pending = np.setdiff1d(pending, [i])
    rows = [basis[p] for p in sorted(basis)]
    if rows:
        mat = np.stack([r for r, _ in rows])
        rhs = np.stack([np.asarray(h, dtype=np.int64) for _, h in rows])
    else:
        mat = np.zeros((0, ncols), dtype=np.int64)
        rhs = np.zeros((0, b.shape[1]), dtype=np.int64)
    if squeeze:
        rhs = rhs[:, 0] if rhs.size else np.zeros(0, dtype=np.int64)
        residual_rhs = [int(r) for r in residual_rhs]
    return mat, rhs, residual_rhs, residual_rows


def smith_normal_form(m):
    """(diag, u, v) with u @ m @ v diagonal; u, v unimodular (python ints)."""
    m = [[int(x) for x in row] for row in m]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def row_combine(i, j, s, t, q1, q2):
        # rows i,j <- (s*ri + t*rj, q1*rj - q2*ri); det of transform is 1
        for arr in (m, u):
            ri, rj = arr[i], arr[j]
            arr[i] = [s * x + t * y for x, y in zip(ri, rj)]
            arr[j] = [q1 * y - q2 * x for x, y in zip(ri, rj)]

    def col_combine(i, j, s, t, q1, q2):
        for arr in (m, v):
            for r in arr:
                x, y = r[i], r[j]
                r[i] = s * x + t * y
                r[j] = q1 * y - q2 * x

    def clear_at(k):
        """Alternate row/column clears until (k,k) is the only entry in both.

        Plain subtraction when the pivot divides the entry; a gcd combine
        otherwise, which strictly shrinks |pivot| and forces termination.
        """
        while True:
            for i in range(k + 1, rows):
                if m[i][k]:
                    a, b = m[k][k], m[i][k]
                    if b % a == 0:
                        row_combine(k, i, 1, 0, 1, b // a)
                    else:
                        g, s, t = egcd(a, b)
                        row_combine(k, i, s, t, a // g, b // g)
            for j in range(k + 1, cols):
                if m[k][j]:
                    a, b = m[k][k], m[k][j]
                    if b % a == 0:
                        col_combine(k, j, 1, 0, 1, b // a)
                    else:
                        g, s, t = egcd(a, b)
                        col_combine(k, j, s, t, a // g, b // g)
            if all(m[i][k] == 0 for i in range(k + 1, rows)) and all(
                m[k][j] == 0 for j in range(k + 1, cols)
            ):
                return

    k = 0
    while k < min(rows, cols):
        pivot = None
        for i in range(k, rows):
            for j in range(k, cols):
                if m[i][j]:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        swap_rows(k, pivot[0])
        swap_cols(k, pivot[1])
        clear_at(k)
        k += 1
    rank = k

    # enforce divisibility d_k | d_{k+1}
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            d1, d2 = m[i][i], m[i + 1][i + 1]
            if d1 and d2 % d1 != 0:
                for arr in (m, v):
                    for r in arr:
                        r[i] += r[i + 1]
                clear_at(i)
                changed = True
    diag = [abs(m[i][i]) for i in range(min(rows, cols))]
    for i in range(min(rows, cols)):
        if m[i][i] < 0:
            for r in v:
                r[i] = -r[i]
    return diag, u, v


@dataclass
class ModularSolution:
    """x = particular + sum t_k * kernel_vec_k (mod n), t_k in Z/order_k."""

    n: int
    ncols: int
    particular: np.ndarray
    kernel_vectors: list  # [(np.ndarray, order)]

    def count(self):
        total = 1
        for _, order in self.kernel_vectors:
            total *= order
        return total

    def enumerate(self, limit=None):
        total = self.count()
        if limit is not None and total > limit:
            raise ValueError(f"solution set of size {total} exceeds limit {limit}")
        check_guard("ModularSolution.enumerate", total)
        out = []
        stack = [self.particular % self.n]
        for vec, order in self.kernel_vectors:
            stack = [
                (x + t * vec) % self.n for x in stack for t in range(order)
            ]
        seen = {tuple(int(v) for v in x) for x in stack}
        assert len(seen) == total, "kernel enumeration must be duplicate-free"
        return [np.array(s, dtype=np.int64) for s in sorted(seen)]

    def all_solutions_array(self):
        """(count, ncols) array of all solutions; vectorized, duplicate-free."""
        total = self.count()
        check_guard("ModularSolution.all_solutions_array", total)
        dtype = np.int16 if self.n <= 181 else np.int64  # keep products in range
        out = np.tile(self.particular % self.n, (total, 1)).astype(dtype)
        stride = 1
        idx = np.arange(total)
        for vec, order in self.kernel_vectors:
            t = (idx // stride) % order
            out += t[:, None].astype(dtype) * vec.astype(dtype)[None, :]
            out %= self.n
            stride *= order
        return out


class _ReducedSystem:
    """Compressed row space with its Smith form; solves many right-hand sides."""

    def __init__(self, rows, rhs_matrix, n, ncols):
        self.n = n
        self.ncols = ncols
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, ncols)
        rhs_matrix = np.asarray(rhs_matrix, dtype=np.int64)
        if rhs_matrix.ndim == 1:
            rhs_matrix = rhs_matrix[:, None]
        if rows.shape[0] != rhs_matrix.shape[0]:
            raise ValueError("row/rhs count mismatch")
        self.basis, self.basis_rhs, self.residual_rhs, self.residual_rows = _compress_rows(
            rows, rhs_matrix
        )
        self.rank = self.basis.shape[0]
        if self.rank:
            self.diag, self.u, v = smith_normal_form(self.basis)
            # v is unimodular over Z and may have big entries; everything
            # downstream is linear mod n, so reduce it first
            self.varr = np.array([[int(x) % n for x in row] for row in v], dtype=np.int64)
        else:
            self.diag, self.u = [], []
            self.varr = np.eye(ncols, dtype=np.int64)
        self.kernel = self._kernel()

    def _kernel(self):
        n, ncols = self.n, self.ncols
        kernel = []
        for k in range(ncols):
            s_k = self.diag[k] if k < len(self.diag) else 0
            if s_k == 0:
                kernel.append((self.varr[:, k] % n, n))
            else:
                g = gcd(s_k, n)
                if g > 1:
                    kernel.append(((self.varr[:, k] * (n // g)) % n, g))
        return kernel

    def solve_column(self, col) -> ModularSolution:
        n, ncols = self.n, self.ncols
        for r, i in zip(self.residual_rhs, self.residual_rows):
            val = int(np.asarray(r).reshape(-1)[col])
            if val % n:
                raise ModularInfeasible(
                    "inconsistent equation",
                    {"equation_index": int(i), "residual_rhs": val % n, "modulus": n},
                )
        rhs_col = (
            self.basis_rhs[:, col]
            if self.basis_rhs.ndim == 2
            else self.basis_rhs
        )
        c = [
            sum(self.u[i][j] * int(rhs_col[j]) for j in range(self.rank))
            for i in range(self.rank)
        ]
        y = np.zeros(ncols, dtype=np.int64)
        for k in range(ncols):
            s_k = self.diag[k] if k < len(self.diag) else 0
            c_k = int(c[k]) if k < self.rank else 0
            if s_k == 0:
                if k < self.rank and c_k % n:
                    raise ModularInfeasible(
                        "inconsistent reduced row",
                        {"reduced_row": int(k), "residual_rhs": c_k % n, "modulus": n},
                    )
            else:
                g = gcd(s_k, n)
                if c_k % g:
                    raise ModularInfeasible(
                        "congruence has no solution",
                        {
                            "reduced_row": int(k),
                            "coefficient": int(s_k % n),
                            "residual_rhs": c_k % n,
                            "gcd": g,
                            "modulus": n,
                        },
                    )
                y[k] = (c_k // g * modinv(s_k // g, n // g)) % (n // g)
        particular = self.varr @ y % n
        return ModularSolution(n, ncols, particular, list(self.kernel))


def solve_modular(rows, rhs, n, ncols) -> ModularSolution:
    """Solve rows @ x = rhs (mod n); raises ModularInfeasible with a witness."""
    if n <= 0:
        raise ValueError("modulus must be positive")
    if n == 1:
        return ModularSolution(1, ncols, np.zeros(ncols, dtype=np.int64), [])
    return _ReducedSystem(rows, np.asarray(rhs, dtype=np.int64).reshape(-1), n, ncols).solve_column(0)


def solve_modular_many(rows, rhs_matrix, n, ncols):
    """Solve the same system for every right-hand-side column; the row
    compression and Smith form are shared.  Returns a list of solutions and
    raises ModularInfeasible annotated with the failing column."""
    if n <= 0:
        raise ValueError("modulus must be positive")
    rhs_matrix = np.asarray(rhs_matrix, dtype=np.int64)
    if rhs_matrix.ndim == 1:
        rhs_matrix = rhs_matrix[:, None]
    if n == 1:
        return [
            ModularSolution(1, ncols, np.zeros(ncols, dtype=np.int64), [])
            for _ in range(rhs_matrix.shape[1])
        ]
    system = _ReducedSystem(rows, rhs_matrix, n, ncols)
    out = []
    for col in range(rhs_matrix.shape[1]):
        try:
            out.append(system.solve_column(col))
        except ModularInfeasible as err:
            err.witness["column"] = col
            raise
    return out


def kernel_modular(rows, n, ncols) -> ModularSolution:
    """The solution lattice of rows @ x = 0 (mod n)."""
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, ncols)
    return solve_modular(rows, np.zeros(rows.shape[0], dtype=np.int64), n, ncols)
