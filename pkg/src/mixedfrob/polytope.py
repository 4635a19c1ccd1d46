"""Lattice polytope combinatorics for the toric pipeline.

Reflexivity and duality, lattice points of dilates, the face strata of the
cone over {1} x Delta (which index the weight filtration), and the
degree-one generation test for the semigroup ring.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from . import linalg


class NotFullDimensional(ValueError):
    pass


class NotReflexive(ValueError):
    pass


class UnsupportedDimension(ValueError):
    pass


def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(x // g for x in v)


@dataclass(frozen=True)
class Facet:
    """Half-space <x, normal> >= offset, tight on the facet (normal primitive)."""

    normal: tuple[int, ...]
    offset: int


@dataclass(frozen=True)
class LatticePolytope:
    """Full-dimensional lattice polytope given by its vertices."""

    dim: int
    vertices: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_vertices(points: Iterable[Sequence[int]]) -> "LatticePolytope":
        pts = sorted({tuple(int(x) for x in p) for p in points})
        if not pts:
            raise ValueError("no vertices given")
        d = len(pts[0])
        if any(len(p) != d for p in pts):
            raise ValueError("vertex dimensions differ")
        p0 = pts[0]
        diffs = [[p[i] - p0[i] for i in range(d)] for p in pts[1:]]
        if linalg.rank(diffs) != d:
            raise NotFullDimensional(f"points span rank {linalg.rank(diffs)} < {d}")
        poly = LatticePolytope(d, tuple(pts))
        ext = [p for p in pts if _is_extreme(pts, p, poly.facets())]
        if set(ext) != set(pts):
            raise ValueError("vertex list contains non-extreme points")
        return poly

    @staticmethod
    def hull_of(points: Iterable[Sequence[int]]) -> "LatticePolytope":
        """Convex hull: keep only the extreme points of the input."""
        pts = sorted({tuple(int(x) for x in p) for p in points})
        if not pts:
            raise ValueError("no points given")
        d = len(pts[0])
        p0 = pts[0]
        diffs = [[p[i] - p0[i] for i in range(d)] for p in pts[1:]]
        if linalg.rank(diffs) != d:
            raise NotFullDimensional("points do not span the lattice")
        raw = LatticePolytope(d, tuple(pts))
        facets = raw.facets()
        ext = [p for p in pts if _is_extreme(pts, p, facets)]
        return LatticePolytope(d, tuple(sorted(ext)))

    # -- facets --------------------------------------------------------
    def facets(self) -> tuple[Facet, ...]:
        """All facet half-spaces, by exhaustive d-subset enumeration."""
        d = self.dim
        seen: dict[tuple[tuple[int, ...], int], Facet] = {}
        for sub in itertools.combinations(self.vertices, d):
            p0 = sub[0]
            rows = [[p[i] - p0[i] for i in range(d)] for p in sub[1:]]
            ker = linalg.kernel(rows) if rows else linalg.identity(d)
            if len(ker) != 1:
                continue
            den = 1
            for x in ker[0]:
                den = den * x.denominator // gcd(den, x.denominator)
            n = _primitive([int(x * den) for x in ker[0]])
            c = sum(a * b for a, b in zip(n, p0))
            vals = [sum(a * b for a, b in zip(n, p)) for p in self.vertices]
            if all(v >= c for v in vals):
                pass
            elif all(v <= c for v in vals):
                n = tuple(-x for x in n)
                c = -c
            else:
                continue
            seen[(n, c)] = Facet(n, c)
        return tuple(sorted(seen.values(), key=lambda f: (f.normal, f.offset)))

    def contains(self, point: Sequence[Fraction], strict: bool = False) -> bool:
        for f in self.facets():
            v = sum(Fraction(a) * b for a, b in zip(point, f.normal))
            if v < f.offset or (strict and v == f.offset):
                return False
        return True


def _is_extreme(pts, p, facets) -> bool:
    others = [q for q in pts if q != p]
    if not others:
        return True
    # p is a vertex iff it is the unique point where its tight facets meet
    tight = [f for f in facets
             if sum(a * b for a, b in zip(f.normal, p)) == f.offset]
    rows = [list(f.normal) for f in tight]
    return linalg.rank(rows) == len(p)


@dataclass(frozen=True)
class SemigroupDegree:
    """Lattice points of the dilate k*Delta (the degree-k monomials)."""

    degree: int
    points: tuple[tuple[int, ...], ...]


def lattice_points(delta: LatticePolytope, k: int) -> SemigroupDegree:
    """Integer points of k*Delta by bounding-box scan, sorted lex."""
    if k < 0:
        raise ValueError("negative dilate")
    d = delta.dim
    if k == 0:
        return SemigroupDegree(0, ((0,) * d,))
    lo = [k * min(v[i] for v in delta.vertices) for i in range(d)]
    hi = [k * max(v[i] for v in delta.vertices) for i in range(d)]
    facets = delta.facets()
    pts = []
    for cand in itertools.product(*[range(lo[i], hi[i] + 1) for i in range(d)]):
        ok = all(sum(a * b for a, b in zip(f.normal, cand)) >= k * f.offset
                 for f in facets)
        if ok:
            pts.append(cand)
    pts.sort()
    return SemigroupDegree(k, tuple(pts))


def is_reflexive(delta: LatticePolytope) -> bool:
    """True iff 0 is interior and every facet is at lattice distance 1."""
    facets = delta.facets()
    if not all(f.offset < 0 for f in facets):  # 0 strictly inside
        return False
    return all(f.offset == -1 for f in facets)


def dual_polytope(delta: LatticePolytope) -> LatticePolytope:
    """Dual {u : <m, u> >= -1 for all m in Delta}; integral for reflexive input."""
    d = delta.dim
    verts = set()
    vlist = delta.vertices
    for sub in itertools.combinations(range(len(vlist)), d):
        rows = [list(vlist[i]) for i in sub]
        rhs = [-1] * d
        x, _ = linalg.solve(rows, rhs)
        if x is None or linalg.rank(rows) < d:
            continue
        if all(sum(Fraction(a) * b for a, b in zip(v, x)) >= -1 for v in vlist):
            verts.add(tuple(x))
    if not verts:
        raise NotReflexive("dual has no vertices; input likely unbounded dual")
    for v in verts:
        if any(x.denominator != 1 for x in v):
            raise NotReflexive(f"dual vertex {v} is not integral")
    int_verts = [tuple(int(x) for x in v) for v in verts]
    hull = LatticePolytope.from_vertices(_extreme_subset(int_verts))
    return hull


def _extreme_subset(points: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    poly = LatticePolytope(len(points[0]), tuple(sorted(set(points))))
    facets = poly.facets()
    return [p for p in poly.vertices if _is_extreme(poly.vertices, p, facets)]


# -- face strata of the cone over {1} x Delta -------------------------------

def min_face_codim(delta: LatticePolytope, point: tuple[int, ...]) -> int:
    """Codimension in the cone over {1} x Delta of the smallest face
    containing the semigroup element (k, m); the apex has codim d+1.
    """
    d = delta.dim
    k, m = point[0], point[1:]
    if k < 0 or len(m) != d:
        raise ValueError("expected a point (k, m) with m of the lattice rank")
    if k == 0:
        if any(m):
            raise ValueError("degree-0 semigroup element must be the apex")
        return d + 1
    x = [Fraction(c, k) for c in m]
    facets = delta.facets()
    active = [f for f in facets
              if sum(a * b for a, b in zip(f.normal, x)) == f.offset]
    if not any(sum(a * b for a, b in zip(f.normal, x)) >= f.offset for f in facets):
        raise ValueError("point not in the cone")
    for f in facets:
        if sum(a * b for a, b in zip(f.normal, x)) < f.offset:
            raise ValueError("point not in the cone")
    if not active:
        return 0
    face_verts = [v for v in delta.vertices
                  if all(sum(a * b for a, b in zip(f.normal, v)) == f.offset
                         for f in active)]
    if not face_verts:
        raise ValueError("no face contains the point; polytope data inconsistent")
    v0 = face_verts[0]
    rows = [[v[i] - v0[i] for i in range(d)] for v in face_verts[1:]]
    face_dim = linalg.rank(rows) if rows else 0
    return d - face_dim


def in_weight_index_set(delta: LatticePolytope, ell: int, point: tuple[int, ...]) -> bool:
    """Membership of (k, m) in I(ell): on no face of codimension >= ell."""
    return min_face_codim(delta, point) < ell


def weight_index_sets(delta: LatticePolytope, ell: int):
    """Predicate for membership of semigroup elements (k, m) in I(ell)."""
    if not (0 <= ell <= delta.dim + 1):
        raise ValueError("ell out of range")
    return lambda point: in_weight_index_set(delta, ell, point)


def cone_faces(delta: LatticePolytope, ell: int) -> list[frozenset[int]]:
    """Codimension-ell faces of the cone, as sets of tight facet indices
    of Delta (the apex is represented by the full index set at ell = d+1).
    """
    d = delta.dim
    facets = delta.facets()
    if ell == 0:
        return [frozenset()]
    if ell == d + 1:
        return [frozenset(range(len(facets)))]
    out = set()
    for sub in itertools.combinations(range(len(facets)), ell):
        face_verts = [v for v in delta.vertices
                      if all(sum(a * b for a, b in zip(facets[i].normal, v))
                             == facets[i].offset for i in sub)]
        if not face_verts:
            continue
        v0 = face_verts[0]
        rows = [[v[i] - v0[i] for i in range(d)] for v in face_verts[1:]]
        fd = linalg.rank(rows) if rows else 0
        if d - fd == ell:
            tight = frozenset(i for i in range(len(facets))
                              if all(sum(a * b for a, b in zip(facets[i].normal, v))
                                     == facets[i].offset for v in face_verts))
            out.add(tight)
    return sorted(out, key=sorted)


# -- generation in degree one ------------------------------------------------

def degree_one_generates(delta: LatticePolytope, kmax: int = 5) -> tuple[bool, int | None]:
    """Check that every degree-k lattice point (2 <= k <= kmax) is a sum of
    k degree-1 points, via iterated Minkowski sums of the point sets.

    Returns (True, None) or (False, first failing degree).
    """
    if kmax < 2:
        raise ValueError("kmax must be at least 2")
    s1 = set(lattice_points(delta, 1).points)
    cur = set(s1)
    for k in range(2, kmax + 1):
        cur = {tuple(a + b for a, b in zip(p, q)) for p in cur for q in s1}
        target = set(lattice_points(delta, k).points)
        if cur != target:
            if not cur <= target:
                raise AssertionError("Minkowski sum escaped the dilate")
            return False, k
    return True, None


def is_fano_polygon(delta: LatticePolytope) -> bool:
    """Smoothness of the projective toric surface of a reflexive polygon:
    adjacent facet normals of Delta must form a lattice basis.  Only d = 2.
    """
    if delta.dim != 2:
        raise UnsupportedDimension("Fano test implemented for d = 2 only")
    if not is_reflexive(delta):
        return False
    normals = [f.normal for f in delta.facets()]
    # order normals by angle and check adjacent determinants
    import math
    normals.sort(key=lambda n: math.atan2(n[1], n[0]))
    n = len(normals)
    return all(abs(normals[i][0] * normals[(i + 1) % n][1]
                   - normals[i][1] * normals[(i + 1) % n][0]) == 1
               for i in range(n))


# -- file format --------------------------------------------------------------

def read_polytope(text: str) -> LatticePolytope:
    """Parse the polytope file format: first line the rank d, then one
    integer vertex tuple per line; '#' starts a comment.
    """
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise ValueError("empty polytope file")
    d = int(rows[0][0])
    verts = []
    for row in rows[1:]:
        if len(row) != d:
            raise ValueError(f"vertex {row} does not have {d} coordinates")
        verts.append(tuple(int(x) for x in row))
    return LatticePolytope.from_vertices(verts)


def write_polytope(delta: LatticePolytope) -> str:
    lines = [str(delta.dim)]
    lines += [" ".join(str(x) for x in v) for v in delta.vertices]
    return "\n".join(lines) + "\n"
