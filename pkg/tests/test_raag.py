import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rgflab.raag import (AbstractFamily, BOUNDARY_ANNULUS, DISJOINT, NESTED,
                         OVERLAP, PresentationGraph, admissibility_check,
                         components, concat, inverse_word, iota_tau,
                         letters_overlap, normal_form, power_threshold,
                         random_rewrite, rewrite_moves, support_bookkeeping,
                         word)


def random_graph(rng, max_n=6, p=0.5):
    n = rng.randrange(2, max_n + 1)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return PresentationGraph.of(n, edges)


def random_word(rng, n, max_len=10):
    return tuple((rng.randrange(n), rng.choice([-2, -1, 1, 2]))
                 for _ in range(rng.randrange(0, max_len)))


class TestNormalForm:
    def test_zero_syllable(self):
        g = PresentationGraph.of(2, [])
        assert normal_form(g, word((0, 0), (1, 1))) == ((1, 1),)

    def test_merge(self):
        g = PresentationGraph.of(1, [])
        assert normal_form(g, word((0, 1), (0, 2))) == ((0, 3),)

    def test_commuting_order(self):
        g = PresentationGraph.of(2, [(0, 1)])
        assert normal_form(g, word((1, 1), (0, 1))) == ((0, 1), (1, 1))

    def test_non_commuting_stays(self):
        g = PresentationGraph.of(2, [])
        w = word((1, 1), (0, 1))
        assert normal_form(g, w) == w

    def test_hidden_merge_through_commuting_block(self):
        # edges 0-1 and 1-2: the two x1 syllables merge across x2 x0
        g = PresentationGraph.of(3, [(0, 1), (1, 2)])
        nf = normal_form(g, word((1, 1), (2, 1), (0, 1), (1, 1)))
        assert nf == normal_form(g, word((2, 1), (0, 1), (1, 2)))
        assert sum(1 for gen, _ in nf if gen == 1) == 1

    def test_invalid_generator(self):
        g = PresentationGraph.of(2, [])
        with pytest.raises(ValueError):
            normal_form(g, word((5, 1)))

    def test_idempotent_and_inverse(self):
        rng = random.Random(0)
        for _ in range(400):
            g = random_graph(rng)
            w = random_word(rng, g.n)
            nf = normal_form(g, w)
            assert normal_form(g, nf) == nf
            assert normal_form(g, concat(w, inverse_word(w))) == ()

    def test_homomorphism(self):
        rng = random.Random(1)
        for _ in range(300):
            g = random_graph(rng)
            u, v = random_word(rng, g.n, 6), random_word(rng, g.n, 6)
            direct = normal_form(g, concat(u, v))
            via_nf = normal_form(g, concat(normal_form(g, u), normal_form(g, v)))
            assert direct == via_nf

    def test_confluence_random_schedules(self):
        rng = random.Random(2)
        for _ in range(500):
            g = random_graph(rng)
            w = random_word(rng, g.n)
            nf = normal_form(g, w)
            assert random_rewrite(g, w, rng) == nf
            assert random_rewrite(g, w, rng) == nf

    def test_normal_form_admits_no_moves(self):
        rng = random.Random(3)
        for _ in range(200):
            g = random_graph(rng)
            nf = normal_form(g, random_word(rng, g.n))
            assert rewrite_moves(g, nf) == []

    @settings(max_examples=300, deadline=None)
    @given(st.data())
    def test_normal_form_respects_adjacent_ordering(self, data):
        n = data.draw(st.integers(2, 6))
        edges = data.draw(st.sets(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).map(
                lambda p: (min(p), max(p))).filter(lambda p: p[0] != p[1])))
        g = PresentationGraph.of(n, edges)
        w = data.draw(st.lists(
            st.tuples(st.integers(0, n - 1),
                      st.integers(-3, 3).filter(bool)), max_size=10))
        nf = normal_form(g, tuple(w))
        for (g1, e1), (g2, e2) in zip(nf, nf[1:]):
            assert e1 != 0 and g1 != g2
            if g.commute(g1, g2):
                assert g1 < g2


class TestComponents:
    def test_edgeless(self):
        assert components(PresentationGraph.of(3, [])) == [
            frozenset({0}), frozenset({1}), frozenset({2})]

    def test_complete(self):
        g = PresentationGraph.of(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
        assert components(g) == [frozenset(range(4))]

    def test_against_union_find(self):
        rng = random.Random(4)
        for _ in range(300):
            g = random_graph(rng, max_n=8, p=0.3)
            parent = list(range(g.n))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for i, j in g.edges:
                parent[find(i)] = find(j)
            want = {}
            for v in range(g.n):
                want.setdefault(find(v), set()).add(v)
            expected = sorted((frozenset(s) for s in want.values()), key=min)
            assert components(g) == expected


class TestAdmissibility:
    def test_all_disjoint(self):
        fam = AbstractFamily.of(3, {(0, 1): DISJOINT, (0, 2): DISJOINT, (1, 2): DISJOINT})
        assert admissibility_check(fam) == (True, None)

    def test_nested_pair_reported(self):
        fam = AbstractFamily.of(3, {(0, 1): NESTED, (0, 2): DISJOINT, (1, 2): OVERLAP})
        ok, pair = admissibility_check(fam)
        assert not ok and pair == (0, 1)

    def test_boundary_annulus_rejected(self):
        fam = AbstractFamily.of(2, {(0, 1): BOUNDARY_ANNULUS})
        assert admissibility_check(fam)[0] is False

    def test_all_overlapping_torus_style(self):
        fam = AbstractFamily.of(4, {(i, j): OVERLAP for i in range(4) for j in range(i + 1, 4)})
        assert admissibility_check(fam) == (True, None)
        assert fam.realization_graph().edges == frozenset()


class TestSupportBookkeeping:
    def test_single_subword(self):
        g = PresentationGraph.of(3, [(0, 1)])
        bk = support_bookkeeping(g, [[0, 1, 2]], [(0, word((0, 1), (2, 1), (1, -1)))])
        assert bk.sigma == [0]
        assert bk.claim_ok

    def test_two_free_parts(self):
        g = PresentationGraph.of(4, [])
        bk = support_bookkeeping(
            g, [[0, 1], [2, 3]],
            [(0, word((0, 1))), (1, word((2, 2))), (0, word((1, -1)))])
        assert bk.iota == [None, 0, 1]
        assert bk.tau == [1, 2, None]
        assert bk.claim_ok

    def test_alternation_enforced(self):
        g = PresentationGraph.of(2, [])
        with pytest.raises(ValueError):
            support_bookkeeping(g, [[0], [1]],
                                [(0, word((0, 1))), (0, word((0, 1)))])

    def test_cross_edges_rejected(self):
        g = PresentationGraph.of(2, [(0, 1)])
        with pytest.raises(ValueError):
            support_bookkeeping(g, [[0], [1]], [(0, word((0, 1)))])

    def test_randomized_claim_holds(self):
        rng = random.Random(5)
        for _ in range(400):
            # parts = components of a random graph grouped into >= 2 blocks
            n = rng.randrange(3, 7)
            comps = []
            v = 0
            while v < n:
                size = min(n - v, rng.randrange(1, 3))
                comps.append(list(range(v, v + size)))
                v += size
            if len(comps) < 2:
                continue
            edges = []
            for block in comps:
                for i in block:
                    for j in block:
                        if i < j and rng.random() < 0.6:
                            edges.append((i, j))
            g = PresentationGraph.of(n, edges)
            subwords = []
            last = None
            for _ in range(rng.randrange(1, 5)):
                k = rng.choice([i for i in range(len(comps)) if i != last])
                block = comps[k]
                w = tuple((rng.choice(block), rng.choice([-2, -1, 1, 2]))
                          for _ in range(rng.randrange(1, 5)))
                if not normal_form(g, w):
                    continue
                subwords.append((k, w))
                last = k
            if not subwords:
                continue
            bk = support_bookkeeping(g, comps, subwords)
            assert bk.claim_ok, (g.edges, subwords, bk.violations)

    def test_iota_tau_brute_force(self):
        rng = random.Random(6)
        for _ in range(100):
            n = rng.randrange(1, 9)
            table = [[False] * n for _ in range(n)]
            for i in range(n):
                for j in range(i + 1, n):
                    table[i][j] = table[j][i] = rng.random() < 0.5
            iota, tau = iota_tau(table)
            for j in range(n):
                before = [t for t in range(j) if table[j][t]]
                after = [t for t in range(j + 1, n) if table[j][t]]
                assert iota[j] == (max(before) if before else None)
                assert tau[j] == (min(after) if after else None)


class TestPowerThreshold:
    def test_formula(self):
        assert power_threshold(1, 10, 5, 3) == 43

    def test_scaling(self):
        assert power_threshold(2, 10, 5, 3) == Fraction(43, 2)
        assert power_threshold(1, 10, 5, 3) == 2 * power_threshold(2, 10, 5, 3)

    def test_rejects_nonpositive_c(self):
        with pytest.raises(ValueError):
            power_threshold(0, 1, 1, 1)
