"""Integer linear algebra: Smith normal form and cellular cohomology.

Matrices are plain lists of rows of Python ints.  A cell complex is given by
its cellular boundary matrices; ``boundaries[k-1]`` is d_k : C_k -> C_(k-1),
an ``cells[k-1] x cells[k]`` matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from diffchar.errors import PreconditionError

Matrix = list


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix, inner: int | None = None) -> Matrix:
    if inner is None:
        inner = len(b) if b else (len(a[0]) if a else 0)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def transpose(a: Matrix, rows: int | None = None, cols: int | None = None) -> Matrix:
    rows = len(a) if rows is None else rows
    cols = (len(a[0]) if a else 0) if cols is None else cols
    return [[a[i][j] for i in range(rows)] for j in range(cols)]


def determinant(a: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass
class SNFResult:
    U: Matrix
    D: Matrix
    V: Matrix

    def __iter__(self):
        return iter((self.U, self.D, self.V))

    @property
    def diagonal(self) -> list:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)

    @property
    def invariant_factors(self) -> list:
        return [d for d in self.diagonal if d]


def snf(M: Sequence[Sequence[int]], rows: int | None = None, cols: int | None = None) -> SNFResult:
    """Smith normal form: unimodular U, V with U*M*V = D, d_i | d_(i+1), d_i >= 0.

    The pivot is always a nonzero entry of smallest absolute value in the
    remaining block, ties broken by leftmost column then topmost row.
    """
    m = len(M) if rows is None else rows
    n = (len(M[0]) if M else 0) if cols is None else cols
    A = [[int(x) for x in row] for row in M]
    if any(len(r) != n for r in A) or len(A) != m:
        raise PreconditionError("matrix rows have inconsistent lengths")
    U = identity(m)
    V = identity(n)

    def row_op(dst, src, q):  # row dst -= q * row src
        A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def col_op(dst, src, q):  # col dst -= q * col src
        for r in A:
            r[dst] -= q * r[src]
        for r in V:
            r[dst] -= q * r[src]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    for t in range(min(m, n)):
        while True:
            best = None
            for j in range(t, n):
                for i in range(t, m):
                    v = abs(A[i][j])
                    if v and (best is None or v < best[0]):
                        best = (v, i, j)
            if best is None:
                return SNFResult(U, A, V)
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    row_op(i, t, A[i][t] // p)
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    col_op(j, t, A[t][j] // p)
                    dirty = dirty or A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is not None:
                # fold the offending row into the pivot row and redo
                row_op(t, bad, -1)
                continue
            break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return SNFResult(U, A, V)


# -- cell complexes ---------------------------------------------------------------


@dataclass
class CohomologyGroup:
    """A finitely generated group ``F^rank + sum Z/t``.

    ``free`` names the free summand: ``"Z"`` for integer coefficients, ``"Q/Z"``
    for the divisible part with Q/Z coefficients; with Z/m coefficients the
    group is pure torsion.
    """

    rank: int
    torsion: list = field(default_factory=list)
    free: str = "Z"

    def __str__(self):
        parts = []
        if self.rank:
            base = self.free if "/" not in self.free else f"({self.free})"
            parts.append(self.free if self.rank == 1 else f"{base}^{self.rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def order(self) -> int | None:
        if self.rank:
            return None
        return math.prod(self.torsion)

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion), "free": self.free, "text": str(self)}


class CellComplex:
    def __init__(self, boundaries: Sequence[Sequence[Sequence[int]]], cells: Sequence[int] | None = None):
        bds = [[[int(x) for x in row] for row in b] for b in boundaries]
        if cells is None:
            if not bds:
                raise PreconditionError("cell counts are needed for a complex with no boundary maps")
            cells = [len(bds[0])]
            for b in bds:
                if not b or not b[0]:
                    raise PreconditionError("empty boundary matrix; pass cell counts explicitly")
                cells.append(len(b[0]))
        self.cells = [int(c) for c in cells]
        if len(self.cells) != len(bds) + 1:
            raise PreconditionError(f"{len(self.cells)} cell counts need {len(self.cells) - 1} boundary maps")
        for k, b in enumerate(bds, start=1):
            rows, cols = self.cells[k - 1], self.cells[k]
            if len(b) != rows or any(len(r) != cols for r in b):
                if not (rows == 0 or cols == 0):
                    raise PreconditionError(f"d_{k} must be {rows} x {cols}")
                b = [[0] * cols for _ in range(rows)]
                bds[k - 1] = b
        self.boundaries = bds
        for k in range(1, len(bds)):
            prod = matmul(bds[k - 1], bds[k], self.cells[k])
            if any(any(r) for r in prod):
                raise PreconditionError(f"d_{k} o d_{k + 1} is not zero")
        self._snf: dict = {}

    @property
    def dim(self) -> int:
        return len(self.cells) - 1

    def boundary(self, k: int) -> Matrix:
        """d_k as a cells[k-1] x cells[k] matrix (zero outside 1..dim)."""
        if 1 <= k <= self.dim:
            return self.boundaries[k - 1]
        rows = self.cells[k - 1] if 0 <= k - 1 <= self.dim else 0
        cols = self.cells[k] if 0 <= k <= self.dim else 0
        return [[0] * cols for _ in range(rows)]

    def coboundary(self, k: int) -> Matrix:
        """delta^k : C^k -> C^(k+1), the transpose of d_(k+1)."""
        b = self.boundary(k + 1)
        rows = self.cells[k] if 0 <= k <= self.dim else 0
        cols = self.cells[k + 1] if 0 <= k + 1 <= self.dim else 0
        return transpose(b, rows, cols)

    def _coboundary_snf(self, k: int) -> SNFResult:
        if k not in self._snf:
            rows = self.cells[k + 1] if 0 <= k + 1 <= self.dim else 0
            cols = self.cells[k] if 0 <= k <= self.dim else 0
            self._snf[k] = snf(self.coboundary(k), rows, cols)
        return self._snf[k]

    def _integral(self) -> list:
        out = []
        for k in range(self.dim + 1):
            out_k = self._coboundary_snf(k)
            in_k = self._coboundary_snf(k - 1)
            rank = self.cells[k] - out_k.rank - in_k.rank
            torsion = [d for d in in_k.invariant_factors if d > 1]
            out.append((rank, torsion))
        return out

    def cohomology(self, coeff: str | int = "Z") -> list:
        """Cohomology groups H^0 .. H^dim with coefficients Z, Z/m (pass m or "Z/m") or Q/Z."""
        integral = self._integral() + [(0, [])]
        kind, m = _parse_coeff(coeff)
        out = []
        for k in range(self.dim + 1):
            rank, torsion = integral[k]
            next_torsion = integral[k + 1][1]
            if kind == "Z":
                out.append(CohomologyGroup(rank, list(torsion)))
            elif kind == "Q/Z":
                out.append(CohomologyGroup(rank, list(next_torsion), "Q/Z"))
            else:
                tors = [m] * rank + [math.gcd(t, m) for t in torsion] + [math.gcd(t, m) for t in next_torsion]
                out.append(CohomologyGroup(0, sorted(t for t in tors if t > 1), f"Z/{m}"))
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.cells))

    # -- cochains ------------------------------------------------------------------

    def apply_coboundary(self, k: int, cochain: Sequence) -> list:
        d = self.coboundary(k)
        return [sum(Fraction(a) * Fraction(c) for a, c in zip(row, cochain)) for row in d]

    def is_cocycle_qz(self, k: int, cochain: Sequence) -> bool:
        return all(Fraction(v).denominator == 1 for v in self.apply_coboundary(k, cochain))

    def integral_class(self, k: int, z: Sequence[int]) -> "IntegralClass":
        """Coordinates of an integral k-cocycle in H^k(;Z) relative to the SNF basis."""
        z = [int(v) for v in z]
        if any(self.apply_coboundary(k, z)):
            raise PreconditionError("not a cocycle")
        res = self._coboundary_snf(k - 1)
        y = [sum(u * v for u, v in zip(row, z)) for row in res.U]
        diag = res.diagonal
        r = res.rank
        torsion, coords = [], []
        for i in range(r):
            if diag[i] > 1:
                torsion.append(diag[i])
                coords.append(y[i] % diag[i])
        return IntegralClass(k, tuple(torsion), tuple(coords), tuple(y[r:]))

    def bockstein(self, k: int, cochain: Sequence) -> "IntegralClass":
        """Connecting map H^k(;Q/Z) -> H^(k+1)(;Z) of 0 -> Z -> Q -> Q/Z -> 0."""
        if len(cochain) != self.cells[k]:
            raise PreconditionError(f"a {k}-cochain needs {self.cells[k]} entries")
        lift = [Fraction(c) - math.floor(Fraction(c)) for c in cochain]
        image = self.apply_coboundary(k, lift)
        if any(v.denominator != 1 for v in image):
            raise PreconditionError("input is not a Q/Z cocycle")
        return self.integral_class(k + 1, [int(v) for v in image])

    def to_json(self) -> dict:
        return {"cells": list(self.cells), "boundaries": self.boundaries}

    @classmethod
    def from_json(cls, data) -> "CellComplex":
        if isinstance(data, dict):
            return cls(data["boundaries"], data.get("cells"))
        return cls(data)


@dataclass(frozen=True)
class IntegralClass:
    degree: int
    torsion: tuple
    coords: tuple
    free: tuple = ()

    def is_zero(self) -> bool:
        return not any(self.coords) and not any(self.free)

    def is_torsion(self) -> bool:
        return not any(self.free)

    def order(self) -> int | None:
        if not self.is_torsion():
            return None
        return math.lcm(*(t // math.gcd(t, c) for t, c in zip(self.torsion, self.coords)), 1)

    def to_json(self) -> dict:
        return {"degree": self.degree, "torsion": list(self.torsion), "coords": list(self.coords), "free": list(self.free)}


def integral_to_qz(z: Iterable[int], m: int) -> list:
    """The cochain z/m with Q/Z values (reduction mod m followed by 1 -> 1/m)."""
    return [Fraction(int(v), m) - math.floor(Fraction(int(v), m)) for v in z]


def _parse_coeff(coeff) -> tuple:
    if isinstance(coeff, int):
        m = coeff
    else:
        c = str(coeff).replace(" ", "").upper()
        if c == "Z":
            return "Z", 0
        if c in ("Q/Z", "QZ"):
            return "Q/Z", 0
        if c.startswith("Z/"):
            m = int(c[2:])
        else:
            raise PreconditionError(f"unknown coefficients {coeff!r}")
    if m < 1:
        raise PreconditionError(f"modulus must be >= 1, got {m}")
    if m == 1:
        return "Z/m", 1
    return "Z/m", m


def cohomology(c: CellComplex, coeff="Z") -> list:
    return c.cohomology(coeff)


def bockstein(c: CellComplex, k: int, cochain: Sequence) -> IntegralClass:
    return c.bockstein(k, cochain)


# -- standard complexes --------------------------------------------------------------


def rp(n: int) -> CellComplex:
    """Real projective space with one cell per dimension; d_k = 1 + (-1)^k."""
    return CellComplex([[[1 + (-1) ** k]] for k in range(1, n + 1)], [1] * (n + 1))


def lens(n: int, p: int) -> CellComplex:
    """Lens space L^(2n-1)_p with its standard cell structure (d_odd = 0, d_even = p)."""
    dim = 2 * n - 1
    return CellComplex([[[0 if k % 2 else p]] for k in range(1, dim + 1)], [1] * (dim + 1))


def sphere(n: int) -> CellComplex:
    if n == 0:
        return CellComplex([], [2])
    cells = [1] + [0] * (n - 1) + [1]
    return CellComplex([[[0] * cells[k] for _ in range(cells[k - 1])] for k in range(1, n + 1)], cells)


def torus_complex(n: int = 2) -> CellComplex:
    """The n-torus as a product of circles: all boundary maps vanish."""
    cells = [math.comb(n, k) for k in range(n + 1)]
    return CellComplex([[[0] * cells[k] for _ in range(cells[k - 1])] for k in range(1, n + 1)], cells)


STANDARD = {"circle": lambda: sphere(1), "rp2": lambda: rp(2), "rp3": lambda: rp(3), "t2": torus_complex}
