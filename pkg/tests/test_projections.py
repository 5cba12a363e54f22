import json
import random

import pytest

from rgflab.farey import INFINITY, EmptyProjectionError, Slope, act, farey_distance, \
    farey_geodesic, twist_about
from rgflab.constructions import slope_at_distance
from rgflab.projections import (Constants, OverlapError, TableSystem, TorusAnnuli,
                                TreeSystem, behrstock_scan, bgit_scan,
                                estimate_constants, general_persistence_check,
                                greedy_overlap_chain, iota_tau_indices,
                                persistence_check, random_slope,
                                sample_overlapping_triples, synthetic_system,
                                twist_pivot_sequence)


@pytest.fixture(scope="module")
def torus():
    return TorusAnnuli()


class TestTorusSystem:
    def test_overlap_is_intersection(self, torus):
        assert torus.overlaps(INFINITY, Slope(0, 1))
        assert not torus.overlaps(INFINITY, INFINITY)

    def test_projection_diameter_at_most_one(self, torus):
        rng = random.Random(0)
        for _ in range(200):
            site, obj = random_slope(rng, 30), random_slope(rng, 30)
            if site == obj:
                continue
            assert torus.proj_diam(site, obj) <= 1

    def test_non_overlapping_boundaries_project_close(self, torus):
        # a single multicurve has projection diameter at most 2 anywhere
        rng = random.Random(1)
        for _ in range(100):
            site = random_slope(rng, 30)
            a = random_slope(rng, 30)
            if a == site:
                continue
            assert torus.proj_dist(site, a, a) <= 2


class TestBehrstock:
    def test_precondition(self, torus):
        with pytest.raises(OverlapError):
            behrstock_scan(torus, [(INFINITY, INFINITY, Slope(0, 1))])

    def test_torus_scan_records_bemp(self, torus):
        rng = random.Random(2)
        triples = sample_overlapping_triples(torus, 500, rng, qmax=200)
        rep = behrstock_scan(torus, triples, B=10)
        assert rep.scanned == 500
        assert not rep.violations
        assert 1 <= rep.B_emp <= 10
        fresh = sample_overlapping_triples(torus, 500, random.Random(3), qmax=200)
        assert not behrstock_scan(torus, fresh, B=rep.B_emp).violations

    def test_synthetic_by_construction(self):
        sys_ = synthetic_system(7, seed=0, threshold=5)
        sites = [s for s in sys_.sites() if s.startswith("Y")]
        triples = [(sites[i], sites[j], sites[k])
                   for i in range(5) for j in range(i + 1, 6) for k in range(j + 1, 7)]
        rep = behrstock_scan(sys_, triples, B=1)
        assert not rep.violations and rep.B_emp == 1


class TestBgit:
    def test_link_geodesic(self, torus):
        rep = bgit_scan(torus, INFINITY, [Slope(0, 1), Slope(1, 1), Slope(2, 1)])
        assert rep.all_project and rep.diameter == 2

    def test_core_fails_to_project(self, torus):
        rep = bgit_scan(torus, Slope(1, 1), [Slope(0, 1), Slope(1, 1), Slope(2, 1)])
        assert not rep.all_project and rep.witness == Slope(1, 1)

    def test_requires_geodesic(self, torus):
        with pytest.raises(ValueError):
            bgit_scan(torus, INFINITY, [Slope(0, 1), Slope(5, 8)])

    def test_large_projection_forces_pit_stop(self, torus):
        # endpoints with annular distance above the empirical geodesic-image
        # bound: every geodesic between them must hit the core
        rng = random.Random(4)
        M_emp = 3
        checked = 0
        for _ in range(60):
            site = random_slope(rng, 50)
            base = random_slope(rng, 50)
            if base == site:
                continue
            far = act(twist_about(site, rng.randrange(6, 40)), base)
            if torus.proj_dist(site, base, far) <= M_emp:
                continue
            checked += 1
            rep = bgit_scan(torus, site, farey_geodesic(base, far))
            assert not rep.all_project and rep.witness == site
        assert checked > 20


class TestPersistence:
    def test_short_sequences_trivial(self, torus):
        rep = persistence_check(torus, [INFINITY, Slope(0, 1)], M=3, B=2)
        assert rep.hypothesis_ok and rep.conclusions_ok

    def test_torus_pivot_sequences(self, torus):
        rng = random.Random(5)
        a0 = Slope(0, 1)
        a1 = slope_at_distance(a0, 3)
        for _ in range(20):
            seq = twist_pivot_sequence(a0, a1, 12, rng.randrange(3, 7), rng)
            rep = persistence_check(torus, seq, M=3, B=2)
            assert rep.hypothesis_ok, rep.failures
            assert rep.conclusions_ok, rep.failures
            assert rep.gaps_at_least_3 and rep.final_distance_ok

    def test_hypothesis_failure_reported(self, torus):
        rep = persistence_check(torus, [INFINITY, Slope(0, 1), INFINITY], M=3, B=2)
        assert not rep.hypothesis_ok
        assert rep.failures

    def test_synthetic_sequence(self):
        sys_ = synthetic_system(8, seed=7, threshold=3)
        sites = [s for s in sys_.sites() if s.startswith("Y")]
        rep = persistence_check(sys_, sites, M=0, B=1)
        assert rep.hypothesis_ok and rep.conclusions_ok


class TestGeneralPersistence:
    def test_all_overlapping_reduces_to_plain(self, torus):
        a0 = Slope(0, 1)
        seq = twist_pivot_sequence(a0, slope_at_distance(a0, 3), 14, 5)
        rep = general_persistence_check(torus, seq, M=3, B=2)
        assert rep.iota == [None, 0, 1, 2, 3]
        assert rep.tau == [1, 2, 3, 4, None]
        assert rep.subsequence == [0, 1, 2, 3, 4]
        assert rep.hypothesis_ok and rep.chained.conclusions_ok

    def test_blocks_are_skipped(self):
        sys_ = synthetic_system(6, seed=9, threshold=7, block_sizes=[0, 2, 0, 0, 2, 0])
        seq = []
        for i in range(6):
            seq.append(f"Y{i}")
            for k in range(2):
                name = f"B{i}.{k}"
                if name in sys_.positions:
                    seq.append(name)
        iota, tau = iota_tau_indices(sys_, seq)
        # brute force against the definition
        for j in range(len(seq)):
            before = [t for t in range(j) if sys_.overlaps(seq[t], seq[j])]
            after = [t for t in range(j + 1, len(seq)) if sys_.overlaps(seq[j], seq[t])]
            assert iota[j] == (max(before) if before else None)
            assert tau[j] == (min(after) if after else None)
        rep = general_persistence_check(sys_, seq, M=0, B=1)
        assert rep.hypothesis_ok, rep.failures
        assert rep.interior_bound_ok and rep.chained.conclusions_ok

    def test_equal_sites_non_overlapping(self, torus):
        seq = [INFINITY, INFINITY]
        iota, tau = iota_tau_indices(torus, seq)
        assert iota == [None, None] and tau == [None, None]

    def test_repeated_torus_sites_handled(self, torus):
        a0 = Slope(0, 1)
        base = twist_pivot_sequence(a0, slope_at_distance(a0, 3), 14, 4)
        seq = [base[0], base[1], base[1], base[2], base[3]]
        rep = general_persistence_check(torus, seq, M=3, B=2)
        assert rep.subsequence == [0, 1, 3, 4]
        assert rep.chained.conclusions_ok

    def test_explicit_subsequence_validated(self, torus):
        seq = [INFINITY, INFINITY]
        with pytest.raises(OverlapError):
            general_persistence_check(torus, seq, M=3, B=2, subsequence=[0, 1])


class TestSyntheticSerialization:
    def test_round_trip(self):
        sys_ = synthetic_system(5, seed=11, threshold=4, decoys=2)
        doc = json.loads(json.dumps(sys_.to_json()))
        table = TableSystem(doc)
        sites = sys_.sites()
        for i, a in enumerate(sites):
            for j, b in enumerate(sites):
                if i != j:
                    assert table.overlaps(i, j) == sys_.overlaps(a, b)
                    assert table.ambient_dist(i, j) == sys_.ambient_dist(a, b)
        rep = persistence_check(table, [sites.index(f"Y{i}") for i in range(5)], M=0, B=1)
        assert rep.hypothesis_ok and rep.conclusions_ok

    def test_table_system_has_no_geodesics(self):
        sys_ = synthetic_system(4, seed=0)
        table = TableSystem(sys_.to_json())
        assert table.ambient_geodesic(0, 1) is None


class TestEstimateConstants:
    def test_torus_constants(self, torus):
        est = estimate_constants(torus, seed=0, n_triples=300, n_geodesics=150, qmax=300)
        assert est.c_emp == 1
        assert est.B_emp >= 1
        assert est.M_emp is not None and est.M_emp >= 2
        assert est.samples["B"][0] >= 1

    def test_synthetic_constants_below_declared(self):
        sys_ = synthetic_system(6, seed=1, threshold=4)
        sites = [s for s in sys_.sites() if s.startswith("Y")]
        triples = [(a, b, c) for a in sites for b in sites for c in sites
                   if len({a, b, c}) == 3][:200]
        rep = behrstock_scan(sys_, triples, B=1)
        assert rep.B_emp <= 1
