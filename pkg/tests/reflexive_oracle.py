"""Independent brute-force oracle for two-dimensional reflexive polygons.

Everything here uses plain integer arithmetic and no code from the library
under test: polygon search over small vertex sets, Ehrhart-style point
counts, and unimodular equivalence testing via boundary-cycle matching.
"""

from __future__ import annotations

import itertools
from math import gcd


def cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points):
    """Monotone chain; returns hull vertices counterclockwise."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def edges_of(hull):
    return [(hull[i], hull[(i + 1) % len(hull)]) for i in range(len(hull))]


def is_reflexive_polygon(hull) -> bool:
    """Origin strictly inside and every edge at lattice distance one.

    For a ccw hull the normal (dy, -dx) points outward; the edge line is
    <x, n> = c with the interior on the < c side, so reflexivity is c = 1
    for every edge with n primitive.
    """
    if len(hull) < 3:
        return False
    for a, b in edges_of(hull):
        nx, ny = b[1] - a[1], a[0] - b[0]
        g = gcd(abs(nx), abs(ny))
        if g == 0:
            return False
        nx, ny = nx // g, ny // g
        if nx * a[0] + ny * a[1] != 1:
            return False
    return True


def interior_and_boundary_counts(hull, k=1):
    """Count lattice points of the k-dilate by box scan."""
    xs = [p[0] * k for p in hull]
    ys = [p[1] * k for p in hull]
    total = 0
    pts = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            inside = True
            for a, b in edges_of(hull):
                nx, ny = b[1] - a[1], a[0] - b[0]  # outward for ccw hull
                c = nx * a[0] + ny * a[1]
                if nx * x + ny * y > c * k:
                    inside = False
                    break
            if inside:
                total += 1
                pts.append((x, y))
    return total, pts


def boundary_cycle(hull):
    """All boundary lattice points in counterclockwise cyclic order."""
    cyc = []
    for a, b in edges_of(hull):
        dx, dy = b[0] - a[0], b[1] - a[1]
        g = gcd(abs(dx), abs(dy))
        sx, sy = dx // g, dy // g
        for t in range(g):
            cyc.append((a[0] + sx * t, a[1] + sy * t))
    return cyc


def equivalent(hull1, hull2) -> bool:
    """GL(2,Z)-equivalence of reflexive polygons via boundary alignment.

    Consecutive boundary lattice points of a reflexive polygon form a
    lattice basis, so candidate maps are pinned by aligning one adjacent
    pair with every adjacent pair (both orientations) of the other cycle.
    """
    c1, c2 = boundary_cycle(hull1), boundary_cycle(hull2)
    if len(c1) != len(c2):
        return False
    p0, p1 = c1[0], c1[1]
    det = p0[0] * p1[1] - p0[1] * p1[0]
    if abs(det) != 1:
        return False
    # inverse of the column matrix (p0 | p1)
    inv = [[p1[1] * det, -p1[0] * det], [-p0[1] * det, p0[0] * det]]
    set1 = set(c1)
    n = len(c2)
    for j in range(n):
        for sgn in (1, -1):
            q0, q1 = c2[j], c2[(j + sgn) % n]
            # A maps p0 -> q0, p1 -> q1
            a = [[q0[0] * inv[0][0] + q1[0] * inv[1][0],
                  q0[0] * inv[0][1] + q1[0] * inv[1][1]],
                 [q0[1] * inv[0][0] + q1[1] * inv[1][0],
                  q0[1] * inv[0][1] + q1[1] * inv[1][1]]]
            if abs(a[0][0] * a[1][1] - a[0][1] * a[1][0]) != 1:
                continue
            img = {(a[0][0] * x + a[0][1] * y, a[1][0] * x + a[1][1] * y)
                   for x, y in set1}
            if img == set(c2):
                return True
    return False


def search_reflexive_polygons(box=2, max_vertices=6):
    """All reflexive polygons with vertices in [-box, box]^2, up to
    unimodular equivalence; returns one representative per class.
    """
    pts = [(x, y) for x in range(-box, box + 1) for y in range(-box, box + 1)
           if (x, y) != (0, 0)]
    seen_vertex_sets = set()
    classes: list[list[tuple[int, int]]] = []
    for k in range(3, max_vertices + 1):
        for sub in itertools.combinations(pts, k):
            hull = convex_hull(sub)
            if len(hull) != k or set(hull) != set(sub):
                continue
            key = frozenset(hull)
            if key in seen_vertex_sets:
                continue
            seen_vertex_sets.add(key)
            if not is_reflexive_polygon(hull):
                continue
            if not any(equivalent(hull, rep) for rep in classes):
                classes.append(hull)
    return classes
