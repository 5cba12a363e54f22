"""Bass-Serre trees of free products, the equivariant orbit map into the
Farey graph, embedding certificates, and free-product injectivity search.

Elements of the abstract free product are alternating normal forms: tuples
of syllables (factor index, element) with consecutive factors distinct and
every element nontrivial in its factor.  Type-2 vertices are labeled by
normal forms, type-1 vertices by cosets (prefix, factor); the vertex for
gH_i drops a trailing i-syllable from g, which makes the label canonical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import farey
from .farey import MappingClass, Slope, act
from .subgroups import MatrixGroup, enumerate_ball


@dataclass(frozen=True)
class FactorSpec:
    """One free-product factor: a torus matrix group with its reducing system.

    `budget` bounds the factor elements enumerated when building coset fans
    and relation searches: word length in the group's generators.
    """

    name: str
    group: MatrixGroup
    boundary: frozenset
    budget: int = 2

    @staticmethod
    def twist(name: str, alpha: Slope, power: int = 1, budget: int = 2) -> "FactorSpec":
        gen = farey.twist_about(alpha, power)
        return FactorSpec(name, MatrixGroup.of(gen), frozenset({alpha}), budget)

    def elements(self) -> list:
        """Nontrivial elements (projectively deduped), deterministic order."""
        ball = enumerate_ball(self.group, self.budget)
        out = []
        seen = set()
        for m in ball.values():
            if m.is_identity(projective=True):
                continue
            key = m.projective_key()
            if key not in seen:
                seen.add(key)
                out.append(m)
        out.sort(key=lambda m: m.projective_key())
        return out


def syllables_mul(factors, word1: tuple, word2: tuple) -> tuple:
    """Concatenate two alternating normal forms, reducing at the seam."""
    left = list(word1)
    right = list(word2)
    while left and right and left[-1][0] == right[0][0]:
        i = left[-1][0]
        prod = left[-1][1].mul(right[0][1])
        left.pop()
        right.pop(0)
        if not prod.is_identity(projective=True):
            left.append((i, prod))
            break
    return tuple(left) + tuple(right)


def syllables_inv(word: tuple) -> tuple:
    return tuple((i, m.inv()) for i, m in reversed(word))


def word_matrix(word: tuple) -> MappingClass:
    out = MappingClass.identity()
    for _, m in word:
        out = out.mul(m)
    return out


def _word_key(word: tuple) -> tuple:
    return tuple((i, m.projective_key()) for i, m in word)


@dataclass(frozen=True)
class Vertex:
    """Tree vertex: kind 2 carries a normal form; kind 1 a coset (prefix, factor)."""

    kind: int
    prefix: tuple          # projective keys, canonical label
    factor: int = -1

    def __repr__(self):
        if self.kind == 2:
            return f"v2({len(self.prefix)} syl)"
        return f"v1({len(self.prefix)} syl; H{self.factor})"


def type2_vertex(word: tuple) -> Vertex:
    return Vertex(2, _word_key(word))

def type1_vertex(word: tuple, i: int) -> Vertex:
    prefix = word[:-1] if word and word[-1][0] == i else word
    return Vertex(1, _word_key(prefix), i)


@dataclass
class TreeBall:
    """Radius-r ball about v(1) in the Bass-Serre tree.

    Coset fans at type-1 vertices are enumerated only up to the per-factor
    budget; `truncated` marks vertices whose fan was cut, never silently.
    """

    factors: list
    radius: int
    adjacency: dict
    distance: dict                 # from the center v(1)
    words: dict                    # type-2 vertex -> normal form (with matrices)
    prefixes: dict                 # type-1 vertex -> prefix normal form
    truncated: set = field(default_factory=set)

    def vertices(self, kind: int | None = None):
        if kind is None:
            return list(self.adjacency)
        return [v for v in self.adjacency if v.kind == kind]

    def type1_pairs(self):
        t1 = self.vertices(1)
        for i in range(len(t1)):
            for j in range(i + 1, len(t1)):
                yield t1[i], t1[j]


def build_ball(factors: list, radius: int) -> TreeBall:
    """Breadth-first ball construction; deterministic for fixed budgets."""
    if not factors:
        raise ValueError("need at least one factor")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    elements = [f.elements() for f in factors]
    infinite = [not _factor_closed(f) for f in factors]

    center = type2_vertex(())
    adjacency = {center: set()}
    distance = {center: 0}
    words = {center: ()}
    prefixes = {}
    truncated = set()
    frontier = [center]

    def connect(u, v):
        adjacency.setdefault(u, set()).add(v)
        adjacency.setdefault(v, set()).add(u)

    for r in range(radius):
        nxt = []
        for u in frontier:
            if distance[u] != r:
                continue
            if u.kind == 2:
                g = words[u]
                for i in range(len(factors)):
                    v = type1_vertex(g, i)
                    fresh = v not in distance
                    if fresh:
                        distance[v] = r + 1
                        prefixes[v] = g[:-1] if g and g[-1][0] == i else g
                        if infinite[i]:
                            truncated.add(v)
                        nxt.append(v)
                    connect(u, v)
            else:
                i = u.factor
                g = prefixes[u]
                mates = [()] + [((i, m),) for m in elements[i]]
                for tail in mates:
                    w = syllables_mul(factors, g, tail)
                    v = type2_vertex(w)
                    fresh = v not in distance
                    if fresh:
                        distance[v] = r + 1
                        words[v] = w
                        nxt.append(v)
                    connect(u, v)
        frontier = nxt
    return TreeBall(list(factors), radius, adjacency, distance, words, prefixes, truncated)


def _factor_closed(f: FactorSpec) -> bool:
    from .subgroups import group_is_finite
    finite, _ = group_is_finite(f.group, f.budget)
    return finite


def tree_distance(ball: TreeBall, v: Vertex, w: Vertex) -> int:
    """Exact free-product tree distance between ball vertices.

    Between elements, d(v(g), v(g')) is twice the syllable length of the
    reduced form of g^{-1} g'.  A coset endpoint saves one tree edge and any
    matching boundary syllable, since the nearest coset representative may
    absorb it: with c the reduced word between the labels,
      d(v(g), v(g'H_j))     = 1 + 2*(syl(c) - [c ends in factor j]),
      d(v(gH_i), v(g'H_j))  = 2 + 2*(syl(c) - [c starts in i] - [c ends in j])
    for distinct cosets (canonical labels make the degenerate single-syllable
    collision impossible).
    """
    if v == w:
        return 0
    a = ball.words[v] if v.kind == 2 else ball.prefixes[v]
    b = ball.words[w] if w.kind == 2 else ball.prefixes[w]
    c = syllables_mul(ball.factors, syllables_inv(a), b)
    if v.kind == 2 and w.kind == 2:
        return 2 * len(c)
    if v.kind == 2:
        drop = 1 if c and c[-1][0] == w.factor else 0
        return 1 + 2 * (len(c) - drop)
    if w.kind == 2:
        drop = 1 if c and c[0][0] == v.factor else 0
        return 1 + 2 * (len(c) - drop)
    drop_front = 1 if c and c[0][0] == v.factor else 0
    drop_back = 1 if c and c[-1][0] == w.factor else 0
    if len(c) == 1 and drop_front and drop_back:
        raise AssertionError("distinct cosets cannot share a canonical label")
    return 2 + 2 * (len(c) - drop_front - drop_back)


def ball_bfs_distance(ball: TreeBall, v: Vertex, w: Vertex) -> int:
    """Path-walk oracle: BFS in the constructed ball."""
    from collections import deque
    if v == w:
        return 0
    dist = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for x in ball.adjacency[u]:
            if x not in dist:
                dist[x] = dist[u] + 1
                if x == w:
                    return dist[x]
                queue.append(x)
    raise KeyError("vertex not reachable inside the ball")


# ---------------------------------------------------------------------------
# The orbit map into the Farey graph.


def phi(ball: TreeBall, base_curve: Slope) -> dict:
    """Vertex labels in the curve graph: v(gH_i) -> g . boundary(H_i) and
    v(g) -> {g . base_curve}."""
    images = {}
    for v in ball.vertices():
        if v.kind == 2:
            m = word_matrix(ball.words[v])
            images[v] = frozenset({act(m, base_curve)})
        else:
            m = word_matrix(ball.prefixes[v])
            images[v] = frozenset(act(m, s) for s in ball.factors[v.factor].boundary)
    return images


def coset_well_defined(ball: TreeBall, v: Vertex) -> bool:
    """Representatives g and g*h (h in the factor) must give one image set."""
    if v.kind != 1:
        raise ValueError("well-definedness is about type-1 vertices")
    f = ball.factors[v.factor]
    m = word_matrix(ball.prefixes[v])
    base = frozenset(act(m, s) for s in f.boundary)
    for h in f.elements():
        mh = m.mul(h)
        if frozenset(act(mh, s) for s in f.boundary) != base:
            return False
    return True


@dataclass
class QiReport:
    pairs: list                   # (d_T, d_S) per type-1 pair
    min_ratio: Fraction | None
    kappa_witness: int | None     # least integer k with d_S >= d_T/k - k on all pairs
    benchmark_ok: bool            # d_S >= d_T/2 - 4 on all pairs
    kappa_given: int | None = None
    kappa_given_ok: bool | None = None
    lower_envelope: dict = field(default_factory=dict)   # d_T -> min d_S
    fit: tuple | None = None      # least-squares (slope, intercept) on the envelope


def qi_certificate(ball: TreeBall, images: dict, kappa: int | None = None,
                   dist_fn=None) -> QiReport:
    """Scan all type-1 pairs of the labeled ball against the affine lower
    bound d_S >= d_T / kappa - kappa, and against the benchmark
    d_S >= d_T/2 - 4 that displacing families achieve."""
    dist_fn = dist_fn or farey.slope_set_distance
    pairs = []
    envelope = {}
    for v, w in ball.type1_pairs():
        dt = tree_distance(ball, v, w)
        ds = dist_fn(images[v], images[w])
        pairs.append((dt, ds))
        if dt not in envelope or ds < envelope[dt]:
            envelope[dt] = ds

    min_ratio = None
    bench = True
    for dt, ds in pairs:
        if dt > 0:
            r = Fraction(ds, dt)
            if min_ratio is None or r < min_ratio:
                min_ratio = r
        if Fraction(ds) < Fraction(dt, 2) - 4:
            bench = False

    kappa_witness = None
    if pairs:
        k = 1
        while True:
            if all(Fraction(ds) >= Fraction(dt, k) - k for dt, ds in pairs):
                kappa_witness = k
                break
            k += 1
            if k > max(dt for dt, _ in pairs) + 1:
                kappa_witness = k
                break

    given_ok = None
    if kappa is not None:
        given_ok = all(Fraction(ds) >= Fraction(dt, kappa) - kappa for dt, ds in pairs)

    fit = None
    if len(envelope) >= 2:
        xs = sorted(envelope)
        n = len(xs)
        sx = sum(xs)
        sy = sum(envelope[x] for x in xs)
        sxx = sum(x * x for x in xs)
        sxy = sum(x * envelope[x] for x in xs)
        den = n * sxx - sx * sx
        if den:
            slope = Fraction(n * sxy - sx * sy, den)
            fit = (slope, Fraction(sy, n) - slope * Fraction(sx, n))

    return QiReport(pairs, min_ratio, kappa_witness, bench, kappa, given_ok,
                    envelope, fit)


# ---------------------------------------------------------------------------
# Relation search and loxodromic scans.


@dataclass
class FreeProductReport:
    no_relation: bool
    witness: tuple | None         # alternating word mapping to +-identity
    budget: int
    words_checked: int


def free_product_check(factors: list, budget: int = 8) -> FreeProductReport:
    """Search alternating normal-form words up to a syllable budget for one
    that maps to the (projective) identity; meet-in-the-middle on matrices.

    Returns the shortest witness found, if any.
    """
    if len(factors) < 2:
        return FreeProductReport(True, None, budget, 0)
    elements = [f.elements() for f in factors]

    # products[k] = list of (matrix, word) for alternating words of k syllables
    # indexed dictionaries keyed by projective matrix entries
    half = (budget + 1) // 2
    by_len = [[((), MappingClass.identity())]]
    for k in range(1, half + 1):
        layer = []
        for word, m in by_len[k - 1]:
            last = word[-1][0] if word else -1
            for i in range(len(factors)):
                if i == last:
                    continue
                for h in elements[i]:
                    layer.append((word + ((i, h),), m.mul(h)))
        by_len.append(layer)

    index = []
    for k in range(half + 1):
        d = {}
        for word, m in by_len[k]:
            d.setdefault(m.projective_key(), []).append(word)
        index.append(d)

    checked = 0
    for total in range(2, budget + 1):
        a = (total + 1) // 2
        b = total - a
        for word, m in by_len[a]:
            checked += 1
            inv_key = m.inv().projective_key()
            for cand in index[b].get(inv_key, ()):
                if not cand and m.is_identity(projective=True):
                    return FreeProductReport(False, word, budget, checked)
                if cand and cand[0][0] != word[-1][0]:
                    return FreeProductReport(False, word + cand, budget, checked)
    return FreeProductReport(True, None, budget, checked)


def cyclically_reduce(word: tuple) -> tuple:
    """Conjugate an alternating normal form until first and last factors differ."""
    w = tuple(word)
    while len(w) >= 2 and w[0][0] == w[-1][0]:
        i = w[0][0]
        merged = w[-1][1].mul(w[0][1])
        w = w[1:-1]
        if not merged.is_identity(projective=True):
            w = ((i, merged),) + w
    return w


@dataclass
class LoxodromicReport:
    checked: int
    all_loxodromic: bool
    traces: list
    skipped: int                 # words conjugate into a factor
    failures: list = field(default_factory=list)


def loxodromic_scan(words: list) -> LoxodromicReport:
    """Every cyclically reduced word of syllable length >= 2 must act as a
    pseudo-Anosov on the torus: |trace| > 2."""
    traces = []
    failures = []
    skipped = 0
    for w in words:
        red = cyclically_reduce(w)
        if len(red) < 2:
            skipped += 1
            continue
        t = word_matrix(red).trace
        traces.append(t)
        if abs(t) <= 2:
            failures.append((red, t))
    return LoxodromicReport(len(traces), not failures, traces, skipped, failures)


def random_alternating_word(factors: list, rng, min_syllables: int = 2,
                            max_syllables: int = 6) -> tuple:
    elements = [f.elements() for f in factors]
    n = rng.randrange(min_syllables, max_syllables + 1)
    word = ()
    last = -1
    for _ in range(n):
        choices = [i for i in range(len(factors)) if i != last]
        i = choices[rng.randrange(len(choices))]
        h = elements[i][rng.randrange(len(elements[i]))]
        word += ((i, h),)
        last = i
    return word
