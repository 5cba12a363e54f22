"""Gromov-hyperbolicity toolkit over abstract distance oracles.

An oracle is any object with a symmetric `dist(x, y)` returning exact
non-negative numbers, and optionally `geodesic(x, y)` returning one vertex
sequence realizing the distance.  All arithmetic is exact: Gromov products
are rationals with denominator at most 2, never floats, so a quadruple scan
is a proof on the scanned set.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations


class GeodesicsUnsupported(RuntimeError):
    """Raised by checks that need actual geodesics from an oracle without them."""


def gromov_product(x, y, z, oracle) -> Fraction:
    """(x | y)_z = (d(x,z) + d(y,z) - d(x,y)) / 2."""
    return Fraction(oracle.dist(x, z) + oracle.dist(y, z) - oracle.dist(x, y), 2)


@dataclass(frozen=True)
class DeltaEstimate:
    """Least delta satisfying the four-point condition on the scanned set."""

    delta: Fraction
    witness: tuple | None
    quadruples_scanned: int
    exhaustive: bool


def estimate_delta(points, oracle, max_quadruples=None, seed=0) -> DeltaEstimate:
    """Four-point hyperbolicity constant of a finite point set.

    delta = max over ordered quadruples (x, y, z, w) of
        min{(x|z)_w, (y|z)_w} - (x|y)_w, clamped at 0.
    Exhaustive below `max_quadruples` role assignments, deterministic seeded
    sampling beyond.
    """
    pts = list(points)
    if len(pts) < 4:
        return DeltaEstimate(Fraction(0), None, 0, True)

    cache = {}

    def d(u, v):
        got = cache.get((u, v))
        if got is None:
            got = oracle.dist(u, v)
            cache[(u, v)] = got
            cache[(v, u)] = got
        return got

    def deficiency(x, y, z, w) -> Fraction:
        xz = Fraction(d(x, w) + d(z, w) - d(x, z), 2)
        yz = Fraction(d(y, w) + d(z, w) - d(y, z), 2)
        xy = Fraction(d(x, w) + d(y, w) - d(x, y), 2)
        return min(xz, yz) - xy

    best = Fraction(0)
    witness = None
    total = 0
    n = len(pts)
    n_assignments = n * (n - 1) * (n - 2) * (n - 3)
    if max_quadruples is None or n_assignments <= max_quadruples:
        for quad in combinations(range(n), 4):
            for x, y, z, w in permutations(quad):
                total += 1
                val = deficiency(pts[x], pts[y], pts[z], pts[w])
                if val > best:
                    best = val
                    witness = (pts[x], pts[y], pts[z], pts[w])
        return DeltaEstimate(best, witness, total, True)

    rng = random.Random(seed)
    for _ in range(max_quadruples):
        idx = rng.sample(range(n), 4)
        total += 1
        val = deficiency(*(pts[i] for i in idx))
        if val > best:
            best = val
            witness = tuple(pts[i] for i in idx)
    return DeltaEstimate(best, witness, total, False)


def point_to_path_distance(z, path, oracle):
    return min(oracle.dist(z, v) for v in path)


def check_gp_geodesic_bound(x, y, z, oracle, delta) -> bool:
    """d(z, [x,y]) - 4*delta <= (x|y)_z <= d(z, [x,y]) for one geodesic [x,y]."""
    geod = getattr(oracle, "geodesic", None)
    if geod is None:
        raise GeodesicsUnsupported("oracle provides no geodesics")
    path = geod(x, y)
    dz = point_to_path_distance(z, path, oracle)
    gp = gromov_product(x, y, z, oracle)
    return dz - 4 * Fraction(delta) <= gp <= dz


@dataclass
class ChainReport:
    """Outcome of the local-to-global check on one chain."""

    chain: list
    A: Fraction
    delta: Fraction
    D: Fraction                  # A + 6*delta
    hypothesis_ok: bool
    conclusion_ok: bool
    geodesic_ok: bool | None     # None when the oracle has no geodesics
    end_distance: int
    sum_gaps: int
    slack: Fraction              # d(x0,xn) - (sum - 2D(n-1)); >= 0 when hypothesis holds
    failures: list = field(default_factory=list)


def check_local_to_global(chain, A, delta, oracle) -> ChainReport:
    """Chain form of the local-to-global principle.

    Hypotheses: every interior Gromov product (x_{i-1} | x_{i+1})_{x_i} <= A
    and every gap d(x_i, x_{i+1}) > 4A + 24*delta.  Conclusions: the
    concatenation loses at most 2D per interior point (D = A + 6*delta), the
    total gap sum is at most twice the end distance, and, when geodesics are
    available, every chain point lies within D of a geodesic between the
    endpoints.
    """
    A = Fraction(A)
    delta = Fraction(delta)
    D = A + 6 * delta
    pts = list(chain)
    n = len(pts) - 1
    if n < 1:
        raise ValueError("chain needs at least one segment")
    failures = []

    gaps = [oracle.dist(pts[i], pts[i + 1]) for i in range(n)]
    hyp = True
    threshold = 4 * A + 24 * delta
    for i, g in enumerate(gaps):
        if g <= threshold:
            hyp = False
            failures.append(f"gap {i} = {g} <= 4A+24delta = {threshold}")
    for i in range(1, n):
        gp = gromov_product(pts[i - 1], pts[i + 1], pts[i], oracle)
        if gp > A:
            hyp = False
            failures.append(f"interior product at {i} = {gp} > A = {A}")

    end = oracle.dist(pts[0], pts[n])
    total = sum(gaps)
    slack = end - (total - 2 * D * (n - 1))
    concl = slack >= 0
    if not concl:
        failures.append(f"lower bound fails by {-slack}")
    if total > 2 * end:
        concl = False
        failures.append(f"gap sum {total} exceeds twice end distance {end}")

    geo_ok = None
    geod = getattr(oracle, "geodesic", None)
    if geod is not None:
        path = geod(pts[0], pts[n])
        geo_ok = True
        for i in range(1, n):
            if point_to_path_distance(pts[i], path, oracle) > D:
                geo_ok = False
                failures.append(f"point {i} farther than D from a geodesic")
        concl = concl and geo_ok

    return ChainReport(pts, A, delta, D, hyp, concl, geo_ok, end, total, slack, failures)


# ---------------------------------------------------------------------------
# Concrete oracles for finite graphs (test models and synthetic instances).


class GraphOracle:
    """BFS metric on an explicit undirected graph given as an adjacency dict."""

    def __init__(self, adjacency: dict):
        self.adj = {u: sorted(vs, key=repr) for u, vs in adjacency.items()}
        self._bfs_cache = {}

    def points(self):
        return list(self.adj)

    def _bfs(self, src):
        got = self._bfs_cache.get(src)
        if got is not None:
            return got
        dist = {src: 0}
        parent = {src: None}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in self.adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
        self._bfs_cache[src] = (dist, parent)
        return dist, parent

    def dist(self, a, b) -> int:
        dist, _ = self._bfs(a)
        if b not in dist:
            raise KeyError(f"{b!r} unreachable from {a!r}")
        return dist[b]

    def geodesic(self, a, b) -> list:
        _, parent = self._bfs(a)
        path = [b]
        while path[-1] != a:
            path.append(parent[path[-1]])
        path.reverse()
        return path


def cycle_oracle(n: int) -> GraphOracle:
    adj = {i: [(i - 1) % n, (i + 1) % n] for i in range(n)}
    return GraphOracle(adj)


def random_tree(n: int, seed: int) -> GraphOracle:
    """Uniform-ish random tree on vertices 0..n-1 (random attachment)."""
    rng = random.Random(seed)
    adj = {0: []}
    for v in range(1, n):
        u = rng.randrange(v)
        adj.setdefault(u, []).append(v)
        adj[v] = [u]
    return GraphOracle(adj)


def tree_path_between(oracle: GraphOracle, a, b) -> list:
    return oracle.geodesic(a, b)


class FareyOracle:
    """Distance oracle adapter for the Farey graph with exact geodesics."""

    def __init__(self):
        from . import farey
        self._farey = farey

    def dist(self, a, b) -> int:
        return self._farey.farey_distance(a, b)

    def geodesic(self, a, b) -> list:
        return self._farey.farey_geodesic(a, b)
