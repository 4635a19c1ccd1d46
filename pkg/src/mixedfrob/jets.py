"""Truncated multivariate power series (jets) with exact rational coefficients.

A jet ring has m base variables t_1..t_m truncated at total degree D and
optionally l unfolding variables y_1..y_l truncated at total degree N (the
two degree budgets are independent, matching the order-by-order unfolding
induction).  Jets are immutable once built; all arithmetic stays inside the
truncation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import linalg
from .linalg import frac


class InconsistentTruncation(ValueError):
    pass


class NoSolution(ValueError):
    pass


class NotFlat(ValueError):
    pass


_TERM_CAP = int(os.environ.get("MIXEDFROB_MAX_JET_TERMS", "2000000"))


@dataclass(frozen=True)
class JetRing:
    """Shape of a jet ring: (#t vars, t order, #y vars, y order)."""

    base_vars: int
    base_order: int
    unfold_vars: int = 0
    unfold_order: int = 0

    @property
    def nvars(self) -> int:
        return self.base_vars + self.unfold_vars

    def admits(self, exp: tuple[int, ...]) -> bool:
        m = self.base_vars
        return (sum(exp[:m]) <= self.base_order
                and sum(exp[m:]) <= self.unfold_order)

    def zero_exp(self) -> tuple[int, ...]:
        return (0,) * self.nvars

    def zero(self) -> "Jet":
        return Jet(self, {})

    def const(self, c) -> "Jet":
        c = frac(c)
        return Jet(self, {} if c == 0 else {self.zero_exp(): c})

    def one(self) -> "Jet":
        return self.const(1)

    def var(self, i: int) -> "Jet":
        e = [0] * self.nvars
        e[i] = 1
        return Jet(self, {tuple(e): Fraction(1)})

    def monomial(self, exp: Sequence[int], c=1) -> "Jet":
        exp = tuple(exp)
        c = frac(c)
        if not self.admits(exp) or c == 0:
            return self.zero()
        return Jet(self, {exp: c})

    def extend(self, extra_unfold: int, unfold_order: int) -> "JetRing":
        if self.unfold_vars and unfold_order != self.unfold_order:
            raise InconsistentTruncation("cannot change the y truncation order")
        return JetRing(self.base_vars, self.base_order,
                       self.unfold_vars + extra_unfold, unfold_order)

    def exponents(self) -> list[tuple[int, ...]]:
        """All admissible exponents, sorted by (total degree, lex)."""
        m, d, l, n = self.base_vars, self.base_order, self.unfold_vars, self.unfold_order
        base = _bounded_exps(m, d)
        un = _bounded_exps(l, n)
        out = [b + u for b in base for u in un]
        out.sort(key=lambda e: (sum(e), e))
        return out


def _bounded_exps(nvars: int, order: int) -> list[tuple[int, ...]]:
    if nvars == 0:
        return [()]
    out = []

    def rec(prefix, left):
        if len(prefix) == nvars - 1:
            for v in range(left + 1):
                out.append(tuple(prefix) + (v,))
            return
        for v in range(left + 1):
            rec(prefix + [v], left - v)

    rec([], order)
    return out


class Jet:
    """One element of a jet ring: finite map exponent tuple -> Fraction."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: JetRing, coeffs: dict[tuple[int, ...], Fraction]):
        self.ring = ring
        self.coeffs = coeffs

    # -- constructors ------------------------------------------------
    @staticmethod
    def build(ring: JetRing, terms: Iterable[tuple[Sequence[int], object]]) -> "Jet":
        d: dict[tuple[int, ...], Fraction] = {}
        for exp, c in terms:
            exp = tuple(exp)
            c = frac(c)
            if c == 0 or not ring.admits(exp):
                continue
            d[exp] = d.get(exp, Fraction(0)) + c
            if d[exp] == 0:
                del d[exp]
        return Jet(ring, d)

    # -- basic queries -----------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def at0(self) -> Fraction:
        return self.coeffs.get(self.ring.zero_exp(), Fraction(0))

    def coeff(self, exp: Sequence[int]) -> Fraction:
        return self.coeffs.get(tuple(exp), Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, Jet):
            return self.ring == other.ring and self.coeffs == other.coeffs
        return NotImplemented

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, key=lambda e: (sum(e), e)):
            mono = "*".join(f"x{i}^{p}" for i, p in enumerate(e) if p) or "1"
            parts.append(f"({self.coeffs[e]})*{mono}")
        return " + ".join(parts)

    # -- ring operations ---------------------------------------------
    def _check(self, other: "Jet") -> None:
        if self.ring != other.ring:
            raise InconsistentTruncation(f"{self.ring} != {other.ring}")

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = self.ring.const(other)
        self._check(other)
        d = dict(self.coeffs)
        for e, c in other.coeffs.items():
            v = d.get(e, Fraction(0)) + c
            if v:
                d[e] = v
            elif e in d:
                del d[e]
        return Jet(self.ring, d)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return Jet(self.ring, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, Jet):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = frac(other)
            if c == 0:
                return self.ring.zero()
            return Jet(self.ring, {e: c * v for e, v in self.coeffs.items()})
        self._check(other)
        ring = self.ring
        m = ring.base_vars
        d: dict[tuple[int, ...], Fraction] = {}
        a, b = self.coeffs, other.coeffs
        if len(a) > len(b):
            a, b = b, a
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                if sum(e[:m]) > ring.base_order or sum(e[m:]) > ring.unfold_order:
                    continue
                v = d.get(e, Fraction(0)) + c1 * c2
                if v:
                    d[e] = v
                elif e in d:
                    del d[e]
        if len(d) > _TERM_CAP:
            raise MemoryError("jet term cap exceeded (MIXEDFROB_MAX_JET_TERMS)")
        return Jet(self.ring, d)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        out = self.ring.one()
        p = self
        while n:
            if n & 1:
                out = out * p
            p = p * p if n > 1 else p
            n >>= 1
        return out

    # -- calculus ----------------------------------------------------
    def diff(self, i: int) -> "Jet":
        """Partial derivative; exact on retained coefficients."""
        d = {}
        for e, c in self.coeffs.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            d[tuple(ne)] = c * e[i]
        return Jet(self.ring, d)

    def integrate(self, i: int) -> "Jet":
        """Definite integral from 0 in variable i (term x^k -> x^{k+1}/(k+1))."""
        d = {}
        for e, c in self.coeffs.items():
            ne = list(e)
            ne[i] += 1
            ne = tuple(ne)
            if self.ring.admits(ne):
                d[ne] = c / (e[i] + 1)
        return Jet(self.ring, d)

    # -- truncation management ----------------------------------------
    def truncate(self, base_order: int | None = None,
                 unfold_order: int | None = None) -> "Jet":
        """Drop terms above the given total degrees (same ring)."""
        db = self.ring.base_order if base_order is None else base_order
        du = self.ring.unfold_order if unfold_order is None else unfold_order
        m = self.ring.base_vars
        d = {e: c for e, c in self.coeffs.items()
             if sum(e[:m]) <= db and sum(e[m:]) <= du}
        return Jet(self.ring, d)

    def truncate_var(self, i: int, order: int) -> "Jet":
        d = {e: c for e, c in self.coeffs.items() if e[i] <= order}
        return Jet(self.ring, d)

    def in_ring(self, ring: JetRing) -> "Jet":
        """Recoerce into another ring (same base vars first, y vars appended)."""
        if ring.base_vars < self.ring.base_vars:
            raise InconsistentTruncation("target ring has fewer base variables")
        pad = ring.nvars - self.ring.nvars
        if pad < 0:
            raise InconsistentTruncation("target ring has fewer variables")
        mb = self.ring.base_vars
        extra_base = ring.base_vars - mb
        d = {}
        for e, c in self.coeffs.items():
            ne = e[:mb] + (0,) * extra_base + e[mb:] + (0,) * (ring.nvars - mb - extra_base - len(e[mb:]))
            if ring.admits(ne):
                d[ne] = c
        return Jet(ring, d)

    def set_vars_zero(self, indices: Iterable[int]) -> "Jet":
        idx = set(indices)
        d = {e: c for e, c in self.coeffs.items() if all(e[i] == 0 for i in idx)}
        return Jet(self.ring, d)

    # -- composition ---------------------------------------------------
    def subs(self, values: Sequence["Jet"]) -> "Jet":
        """Substitute values[i] (constant term 0 required) for variable i."""
        if len(values) != self.ring.nvars:
            raise InconsistentTruncation("wrong number of substitution values")
        target = values[0].ring if values else self.ring
        for v in values:
            if v.ring != target:
                raise InconsistentTruncation("substitution values in different rings")
            if v.at0() != 0:
                raise ValueError("substitution requires zero constant term")
        pow_cache: dict[tuple[int, int], Jet] = {}

        def power(i, k):
            if (i, k) not in pow_cache:
                pow_cache[(i, k)] = values[i] ** k if k else target.one()
            return pow_cache[(i, k)]

        out = target.zero()
        for e, c in self.coeffs.items():
            term = target.const(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out


def invert_map(components: Sequence[Jet]) -> list[Jet]:
    """Invert a jet map x = f(t), f(0) = 0, with invertible linear part.

    Returns jets t_i(x) in the same ring shape with f(t(x)) = x within
    truncation.
    """
    n = len(components)
    ring = components[0].ring
    if ring.nvars != n:
        raise InconsistentTruncation("map must be square")
    lin = [[components[i].coeff(tuple(1 if k == j else 0 for k in range(n)))
            for j in range(n)] for i in range(n)]
    lin_inv = linalg.inverse(lin)
    xs = [ring.var(i) for i in range(n)]

    def apply_lin_inv(vec):
        return [sum((lin_inv[i][j] * vec[j] for j in range(n)), ring.zero())
                for i in range(n)]

    # higher-order part N(t) = f(t) - lin.t ; iterate t = lin^{-1}(x - N(t))
    order = ring.base_order + ring.unfold_order
    t = apply_lin_inv(xs)
    for _ in range(order):
        nt = []
        for i in range(n):
            full = components[i].subs(t)
            linpart = sum((lin[i][j] * t[j] for j in range(n)), ring.zero())
            nt.append(full - linpart)
        t = apply_lin_inv([xs[i] - nt[i] for i in range(n)])
    return t


class JetMatrix:
    """Dense matrix with Jet entries."""

    __slots__ = ("ring", "rows")

    def __init__(self, ring: JetRing, rows: list[list[Jet]]):
        self.ring = ring
        self.rows = rows

    # -- constructors ------------------------------------------------
    @staticmethod
    def from_rational(ring: JetRing, rows) -> "JetMatrix":
        return JetMatrix(ring, [[ring.const(x) for x in row] for row in rows])

    @staticmethod
    def zeros(ring: JetRing, n: int, m: int | None = None) -> "JetMatrix":
        m = n if m is None else m
        return JetMatrix(ring, [[ring.zero() for _ in range(m)] for _ in range(n)])

    @staticmethod
    def identity(ring: JetRing, n: int) -> "JetMatrix":
        return JetMatrix(ring, [[ring.one() if i == j else ring.zero()
                                 for j in range(n)] for i in range(n)])

    # -- shape ---------------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def __eq__(self, other):
        if isinstance(other, JetMatrix):
            return self.ring == other.ring and self.rows == other.rows
        return NotImplemented

    def __repr__(self):
        return f"JetMatrix({self.nrows}x{self.ncols} over {self.ring})"

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other: "JetMatrix") -> "JetMatrix":
        return JetMatrix(self.ring, [[a + b for a, b in zip(ra, rb)]
                                     for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other: "JetMatrix") -> "JetMatrix":
        return JetMatrix(self.ring, [[a - b for a, b in zip(ra, rb)]
                                     for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self) -> "JetMatrix":
        return JetMatrix(self.ring, [[-a for a in row] for row in self.rows])

    def scale(self, c) -> "JetMatrix":
        return JetMatrix(self.ring, [[a * c for a in row] for row in self.rows])

    def __matmul__(self, other: "JetMatrix") -> "JetMatrix":
        if self.ncols != other.nrows:
            raise linalg.DimensionMismatch("matmul shape mismatch")
        zero = self.ring.zero()
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = zero
                for k in range(self.ncols):
                    a = self.rows[i][k]
                    b = other.rows[k][j]
                    if a.coeffs and b.coeffs:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return JetMatrix(self.ring, out)

    def comm(self, other: "JetMatrix") -> "JetMatrix":
        return self @ other - other @ self

    def apply(self, vec: list[Jet]) -> list[Jet]:
        zero = self.ring.zero()
        out = []
        for i in range(self.nrows):
            acc = zero
            for k in range(self.ncols):
                a = self.rows[i][k]
                if a.coeffs and vec[k].coeffs:
                    acc = acc + a * vec[k]
            out.append(acc)
        return out

    # -- calculus / truncation ------------------------------------------
    def diff(self, i: int) -> "JetMatrix":
        return self.map(lambda a: a.diff(i))

    def integrate(self, i: int) -> "JetMatrix":
        return self.map(lambda a: a.integrate(i))

    def map(self, f: Callable[[Jet], Jet]) -> "JetMatrix":
        rows = [[f(a) for a in row] for row in self.rows]
        ring = rows[0][0].ring if rows and rows[0] else self.ring
        return JetMatrix(ring, rows)

    def truncate(self, base_order=None, unfold_order=None) -> "JetMatrix":
        return self.map(lambda a: a.truncate(base_order, unfold_order))

    def truncate_var(self, i: int, order: int) -> "JetMatrix":
        return self.map(lambda a: a.truncate_var(i, order))

    def in_ring(self, ring: JetRing) -> "JetMatrix":
        return self.map(lambda a: a.in_ring(ring))

    def set_vars_zero(self, indices) -> "JetMatrix":
        idx = list(indices)
        return self.map(lambda a: a.set_vars_zero(idx))

    def subs(self, values: Sequence[Jet]) -> "JetMatrix":
        return self.map(lambda a: a.subs(values))

    def at0(self) -> list[list[Fraction]]:
        return [[a.at0() for a in row] for row in self.rows]

    def transpose(self) -> "JetMatrix":
        return JetMatrix(self.ring, [list(col) for col in zip(*self.rows)])

    def is_zero(self) -> bool:
        return all(a.is_zero() for row in self.rows for a in row)

    def is_constant(self) -> bool:
        return all(not a.coeffs or set(a.coeffs) == {self.ring.zero_exp()}
                   for row in self.rows for a in row)

    def inv(self) -> "JetMatrix":
        """Inverse of a jet matrix with invertible constant term."""
        a0 = self.at0()
        inv0 = JetMatrix.from_rational(self.ring, linalg.inverse(a0))
        ident = JetMatrix.identity(self.ring, self.nrows)
        x = inv0
        # Newton iteration doubles the correct order each step.
        order = self.ring.base_order + self.ring.unfold_order
        steps = max(1, order.bit_length() + 1)
        for _ in range(steps):
            x = x @ (ident + (ident - self @ x))
            e = ident - self @ x
            if e.is_zero():
                break
        return x


def solve_linear(a: JetMatrix, b: list[Jet]) -> tuple[list[Jet], list[list[Fraction]]]:
    """Solve a x = b over a jet ring, order by order in total degree.

    Returns (particular solution with order-0 free variables set to 0,
    kernel basis of the order-0 matrix).  Raises NoSolution when no
    solution exists at some order (in particular when the order-0 system
    is inconsistent).
    """
    ring = a.ring
    for v in b:
        if v.ring != ring:
            raise InconsistentTruncation("rhs ring differs from matrix ring")
    a0 = a.at0()
    red, piv = linalg.rref(a0)
    ker0 = linalg.kernel(a0)
    ncols = a.ncols
    exps = ring.exponents()
    # coefficient dicts of the solution
    sol: list[dict[tuple[int, ...], Fraction]] = [{} for _ in range(ncols)]

    def sol_jet(j):
        return Jet(ring, dict(sol[j]))

    for e in exps:
        # rhs_e = b_e - sum_{e' < e} A_{e - e'} x_{e'}
        rhs = [bi.coeff(e) for bi in b]
        for i in range(a.nrows):
            acc = Fraction(0)
            for j in range(ncols):
                entry = a.rows[i][j]
                if not entry.coeffs:
                    continue
                for e2, c2 in sol[j].items():
                    diffe = tuple(x - y for x, y in zip(e, e2))
                    if any(x < 0 for x in diffe) or diffe == ring.zero_exp():
                        continue
                    ca = entry.coeffs.get(diffe)
                    if ca is not None:
                        acc += ca * c2
            rhs[i] -= acc
        # solve a0 * x_e = rhs
        xe, _ = linalg.solve(a0, rhs)
        if xe is None:
            deg = sum(e)
            raise NoSolution(f"inconsistent at order {deg} (exponent {e})")
        for j in range(ncols):
            if xe[j]:
                sol[j][e] = xe[j]
    return [sol_jet(j) for j in range(ncols)], ker0


def curvature(mats: Sequence[JetMatrix]) -> list[tuple[int, int, JetMatrix]]:
    """Curvature components of d + sum A_i dx_i, one per variable pair.

    Residuals are valid to one order below the ring truncation (the
    derivative loses the top order); they are truncated accordingly.
    """
    ring = mats[0].ring
    m = ring.base_vars
    out = []
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            f = mats[i].diff(j) - mats[j].diff(i) + mats[i].comm(mats[j])
            db = ring.base_order - (1 if (i < m or j < m) else 0)
            du = ring.unfold_order - (1 if (i >= m or j >= m) else 0)
            out.append((i, j, f.truncate(max(db, 0), max(du, 0))))
    return out


def flat_gauge(mats: Sequence[JetMatrix]) -> JetMatrix:
    """Gauge g with g(0) = I transforming d + sum A_i dx_i into d.

    Solves dg = -A g degree by degree via the Euler identity; raises
    NotFlat when the input connection has nonzero curvature within the
    truncation.
    """
    for i, j, f in curvature(mats):
        if not f.is_zero():
            raise NotFlat(f"curvature in directions ({i},{j}) is nonzero")
    ring = mats[0].ring
    n = mats[0].nrows
    order = ring.base_order + ring.unfold_order
    g = JetMatrix.identity(ring, n)
    # homogeneous recursion: (k+1) g_{k+1} = -[sum_i x_i (A_i g)]_{k+1}
    for k in range(order):
        rad = JetMatrix.zeros(ring, n)
        for i, a in enumerate(mats):
            xi = ring.var(i)
            rad = rad + (a @ g).map(lambda u, xi=xi: u * xi)
        corr = rad.map(lambda u: _homogeneous_part(u, k + 1))
        g = g - corr.scale(Fraction(1, k + 1))
    # verify the defining identity at the retained orders
    for i, a in enumerate(mats):
        res = g.diff(i) + a @ g
        db = ring.base_order - (1 if i < ring.base_vars else 0)
        du = ring.unfold_order - (1 if i >= ring.base_vars else 0)
        if not res.truncate(max(db, 0), max(du, 0)).is_zero():
            raise NotFlat(f"gauge residual nonzero in direction {i}")
    return g


def _homogeneous_part(u: Jet, k: int) -> Jet:
    return Jet(u.ring, {e: c for e, c in u.coeffs.items() if sum(e) == k})
