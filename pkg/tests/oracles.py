"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import math
from collections import deque

import numpy as np

UNCOVERED, SINGLE, COLLATERAL, INDET = "Uncovered", "SingleCovered", "Collateral", "Indeterminate"
NONCOV, SINGLECOV = "NonCovering", "SingleCovering"


def label_by_definition(points_of_set, n_points, point_order=None, set_order=None):
    """Labeling straight from the class definitions, using plain Python sets.

    Returns ``(point_labels, set_labels)`` as lists of wire names.
    """
    n_sets = len(points_of_set)
    members = [set(s) for s in points_of_set]
    coverers = [set() for _ in range(n_points)]
    for s, pts in enumerate(members):
        for p in pts:
            coverers[p].add(s)
    point_order = list(range(n_points)) if point_order is None else list(point_order)
    set_order = list(range(n_sets)) if set_order is None else list(set_order)

    plab = [None] * n_points
    slab = [None] * n_sets
    for p in range(n_points):
        if not coverers[p]:
            plab[p] = UNCOVERED
    for s in range(n_sets):
        if not members[s]:
            slab[s] = NONCOV

    def active_coverers(p):
        return [s for s in coverers[p] if slab[s] is None]

    changed = True
    while changed:
        changed = False
        # A point with one live coverer is single-covered whichever point is visited first.
        forced = [(p, active_coverers(p)[0]) for p in point_order if plab[p] is None and len(active_coverers(p)) == 1]
        for p, s in forced:
            plab[p] = SINGLE
            slab[s] = SINGLECOV
            changed = True
        for p, s in forced:
            for q in members[s]:
                if plab[q] is None:
                    plab[q] = COLLATERAL
        for s in set_order:
            if slab[s] is None and all(plab[q] is not None for q in members[s]):
                slab[s] = COLLATERAL
                changed = True
    plab = [INDET if v is None else v for v in plab]
    slab = [INDET if v is None else v for v in slab]
    return plab, slab


def bfs_components(points_of_set, sets, points):
    """Components of the bipartite graph restricted to ``sets`` and ``points``."""
    sets, points = set(sets), set(points)
    by_point = {}
    for s in sets:
        for p in points_of_set[s]:
            if p in points:
                by_point.setdefault(p, []).append(s)
    seen = set()
    comps = []
    for start in sorted(sets):
        if start in seen:
            continue
        comp_s, comp_p = {start}, set()
        queue = deque([start])
        seen.add(start)
        while queue:
            s = queue.popleft()
            for p in points_of_set[s]:
                if p in points and p not in comp_p:
                    comp_p.add(p)
                    for t in by_point[p]:
                        if t not in seen:
                            seen.add(t)
                            comp_s.add(t)
                            queue.append(t)
        comps.append((tuple(sorted(comp_s)), tuple(sorted(comp_p))))
    return comps


def min_cover_size(points_of_set, required):
    """Exhaustive minimum number of sets covering ``required``; None if impossible."""
    required = set(required)
    if not required:
        return 0
    masks = []
    index = {p: i for i, p in enumerate(sorted(required))}
    for pts in points_of_set:
        m = 0
        for p in pts:
            if p in index:
                m |= 1 << index[p]
        masks.append(m)
    full = (1 << len(required)) - 1
    n = len(masks)
    best = None
    for subset in range(1 << n):
        k = bin(subset).count("1")
        if best is not None and k >= best:
            continue
        acc = 0
        j, rest = 0, subset
        while rest:
            if rest & 1:
                acc |= masks[j]
            rest >>= 1
            j += 1
        if acc == full:
            best = k
    return best


def disk_square_area(x, y, r, side, nodes=64):
    """Area of the closed disk of radius ``r`` at ``(x, y)`` inside ``[0, side]^2``.

    Gauss-Legendre over the clipped horizontal extent; ``x``/``y`` are arrays.
    """
    t, w = np.polynomial.legendre.leggauss(nodes)
    lo = np.maximum(-r, -x)
    hi = np.minimum(r, side - x)
    half = (hi - lo) / 2
    u = (lo + hi)[..., None] / 2 + half[..., None] * t
    h = np.sqrt(np.maximum(r * r - u * u, 0.0))
    yy = y[..., None]
    length = np.minimum(side, yy + h) - np.maximum(0.0, yy - h)
    return (half[..., None] * w * length).sum(axis=-1)


def expected_uncovered_with_overhang(N, a, A=1.0, grid=400):
    """Expected uncovered fraction when disks are clipped by the square boundary.

    Integrates ``(1 - |D(p) ∩ square| / A)^N`` over the square with the
    midpoint rule.
    """
    side = math.sqrt(A)
    r = math.sqrt(a / math.pi)
    c = (np.arange(grid) + 0.5) / grid * side
    X, Y = np.meshgrid(c, c)
    area = disk_square_area(X, Y, r, side)
    return float(np.mean((1 - area / A) ** N))


def expected_uncovered_no_boundary(N, a, A=1.0):
    return (1 - a / A) ** N
