"""Exact linear algebra over Q: echelon forms, subspaces, quotients, flags.

Matrices are lists of lists of fractions.Fraction, vectors are lists.
Subspaces are kept in reduced row echelon form so that equal subspaces
have identical representations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence


class DimensionMismatch(ValueError):
    pass


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def to_matrix(rows) -> list[list[Fraction]]:
    return [[frac(x) for x in row] for row in rows]


def zeros(n: int, m: int) -> list[list[Fraction]]:
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def mat_mul(a, b) -> list[list[Fraction]]:
    if a and b and len(a[0]) != len(b):
        raise DimensionMismatch(f"{len(a[0])} x {len(b)}")
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0))
             for j in range(len(b[0]) if b else 0)] for i in range(len(a))]


def mat_vec(a, v) -> list[Fraction]:
    if a and len(a[0]) != len(v):
        raise DimensionMismatch(f"{len(a[0])} x {len(v)}")
    return [sum((a[i][k] * v[k] for k in range(len(v))), Fraction(0)) for i in range(len(a))]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c, a):
    c = frac(c)
    return [[c * x for x in row] for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def is_zero_matrix(a) -> bool:
    return all(x == 0 for row in a for x in row)


def is_symmetric(a) -> bool:
    n = len(a)
    return all(a[i][j] == a[j][i] for i in range(n) for j in range(n))


def rref(rows) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(map(frac, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    return len(rref(rows)[0])


def det(a) -> Fraction:
    n = len(a)
    m = [list(map(frac, row)) for row in a]
    d = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            d = -d
        d *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def inverse(a) -> list[list[Fraction]]:
    n = len(a)
    aug = [list(map(frac, a[i])) + identity(n)[i] for i in range(n)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix not invertible")
    return [row[n:] for row in red]


def solve(a, b) -> tuple[list[Fraction] | None, list[list[Fraction]]]:
    """Solve a x = b over Q.

    Returns (particular solution with free variables set to 0, kernel basis);
    the particular solution is None if the system is inconsistent.
    """
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    aug = [list(map(frac, a[i])) + [frac(b[i])] for i in range(nrows)]
    red, piv = rref(aug)
    if ncols in piv:
        return None, kernel(a)
    x = [Fraction(0)] * ncols
    for row, c in zip(red, piv):
        x[c] = row[-1]
    return x, kernel(a)


def kernel(a) -> list[list[Fraction]]:
    """Basis of {x : a x = 0}, rows in echelon-normal form."""
    ncols = len(a[0]) if a else 0
    red, piv = rref(a)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, c in zip(red, piv):
            v[c] = -row[f]
        basis.append(v)
    return rref(basis)[0]


@dataclass(frozen=True)
class QSubspace:
    """Subspace of Q^ambient, basis rows in reduced echelon normal form."""

    ambient: int
    basis: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def from_rows(ambient: int, rows) -> "QSubspace":
        for r in rows:
            if len(r) != ambient:
                raise DimensionMismatch(f"row length {len(r)} != ambient {ambient}")
        red, _ = rref(rows)
        return QSubspace(ambient, tuple(tuple(r) for r in red))

    @staticmethod
    def zero(ambient: int) -> "QSubspace":
        return QSubspace(ambient, ())

    @staticmethod
    def full(ambient: int) -> "QSubspace":
        return QSubspace.from_rows(ambient, identity(ambient))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v) -> bool:
        if len(v) != self.ambient:
            raise DimensionMismatch("vector length mismatch")
        rows = [list(r) for r in self.basis]
        return rank(rows + [list(map(frac, v))]) == self.dim

    def contains_space(self, other: "QSubspace") -> bool:
        return all(self.contains(list(r)) for r in other.basis)

    def __le__(self, other: "QSubspace") -> bool:
        return other.contains_space(self)


def image_space(a) -> QSubspace:
    """Column space of a."""
    return QSubspace.from_rows(len(a), transpose(a))


def kernel_space(a) -> QSubspace:
    ncols = len(a[0]) if a else 0
    return QSubspace.from_rows(ncols, kernel(a))


def sum_spaces(u: QSubspace, v: QSubspace) -> QSubspace:
    if u.ambient != v.ambient:
        raise DimensionMismatch("ambient mismatch")
    return QSubspace.from_rows(u.ambient, [list(r) for r in u.basis + v.basis])


def intersect_spaces(u: QSubspace, v: QSubspace) -> QSubspace:
    # U cap V = (U^perp + V^perp)^perp for the standard bilinear form.
    if u.ambient != v.ambient:
        raise DimensionMismatch("ambient mismatch")
    pu = kernel([list(r) for r in u.basis]) if u.dim else identity(u.ambient)
    pv = kernel([list(r) for r in v.basis]) if v.dim else identity(v.ambient)
    return kernel_space(pu + pv)


@dataclass(frozen=True)
class QuotientData:
    """Quotient V/S: representative vectors plus projection/section maps."""

    reps: tuple[tuple[Fraction, ...], ...]
    projection: tuple[tuple[Fraction, ...], ...]  # ambient -> coords in reps
    section: tuple[tuple[Fraction, ...], ...]     # coords in reps -> ambient

    @property
    def dim(self) -> int:
        return len(self.reps)


def quotient_space(v: QSubspace | None, s: QSubspace) -> QuotientData:
    """Quotient of v (or the full ambient space) by the subspace s."""
    ambient = s.ambient
    if v is None:
        v = QSubspace.full(ambient)
    if not v.contains_space(s):
        raise DimensionMismatch("subspace not contained in the space")
    cur = [list(r) for r in s.basis]
    reps = []
    for cand in v.basis:
        if rank(cur + [list(cand)]) > rank(cur):
            reps.append(list(cand))
            cur.append(list(cand))
    # projection solves x = S^T a + R^T b + K^T c and keeps b; K completes
    # the basis so the map is defined on all of Q^ambient (zero off v + s).
    comp = []
    for j in range(ambient):
        e = [Fraction(0)] * ambient
        e[j] = Fraction(1)
        if rank(cur + [e]) > rank(cur):
            comp.append(e)
            cur.append(e)
    cols = [list(r) for r in s.basis] + reps + comp
    minv = inverse(transpose(cols))  # coords rows: (a, b, c)
    lo = s.dim
    proj = [minv[lo + i] for i in range(len(reps))]
    section = transpose(reps) if reps else [[] for _ in range(ambient)]
    return QuotientData(
        tuple(tuple(r) for r in reps),
        tuple(tuple(r) for r in proj),
        tuple(tuple(r) for r in section),
    )


@dataclass(frozen=True)
class Flag:
    """Increasing exhaustive filtration (k, W_k), bottom 0 and top full."""

    ambient: int
    steps: tuple[tuple[int, QSubspace], ...]  # sorted by k

    @staticmethod
    def from_steps(ambient: int, steps: Sequence[tuple[int, QSubspace]]) -> "Flag":
        ordered = tuple(sorted(((k, s) for k, s in steps), key=lambda t: t[0]))
        f = Flag(ambient, ordered)
        f.validate()
        return f

    def validate(self) -> None:
        prev = QSubspace.zero(self.ambient)
        for _, s in self.steps:
            if s.ambient != self.ambient:
                raise DimensionMismatch("flag ambient mismatch")
            if not s.contains_space(prev):
                raise ValueError("flag steps not nested")
            prev = s
        if self.steps and self.steps[-1][1].dim != self.ambient:
            raise ValueError("flag not exhaustive (top is not the full space)")

    def space_at(self, k: int) -> QSubspace:
        out = QSubspace.zero(self.ambient)
        for kk, s in self.steps:
            if kk <= k:
                out = s
            else:
                break
        return out

    @property
    def indices(self) -> list[int]:
        return [k for k, _ in self.steps]

    def graded_dims(self) -> dict[int, int]:
        dims = {}
        prev = 0
        for k, s in self.steps:
            if s.dim > prev:
                dims[k] = s.dim - prev
            prev = s.dim
        return dims

    def graded_quotient(self, k: int) -> QuotientData:
        return quotient_space(self.space_at(k), self.space_at(k - 1))

    def weight_of(self, v) -> int | None:
        for k, s in self.steps:
            if s.contains(v):
                return k
        return None

    def shift(self, delta: int) -> "Flag":
        return Flag(self.ambient, tuple((k + delta, s) for k, s in self.steps))


def preserves(mat, space: QSubspace) -> bool:
    """True when mat maps the subspace into itself."""
    return all(space.contains(mat_vec(mat, list(r))) for r in space.basis)
