"""Smooth-pair scans, exceptional hits, and their resolution."""

import io

import numpy as np
import pytest

import hl_irred.smooth as sm
from hl_irred.errors import NoWitness
from hl_irred.smooth import (
    ScanContext,
    build_scan_context,
    export_csv,
    gpf_sieve,
    resolve_exception,
    scan_smooth_pairs,
    small_k_exceptions,
)


def brute_gpf(m: int) -> int:
    if m < 2:
        return 1
    best, p = 1, 2
    while p * p <= m:
        while m % p == 0:
            best, m = p, m // p
        p += 1
    return max(best, m) if m > 1 else best


class TestGpfSieve:
    def test_matches_brute_force(self):
        g = gpf_sieve(500)
        for m in range(501):
            assert g[m] == brute_gpf(m), m

    def test_rejects_bad_bound(self):
        with pytest.raises(ValueError):
            gpf_sieve(0)


class TestScanSmoothPairs:
    def test_small_frozen(self):
        assert set(scan_smooth_pairs(10, 5)) >= {1, 5}
        assert scan_smooth_pairs(3, 2) == []
        assert scan_smooth_pairs(100, 7) == [1, 3, 5, 21, 45]

    def test_b23_census(self):
        # frozen census: 54 odd m <= 10^6 with P(m(m+4)) <= 23, largest 121121
        ms = scan_smooth_pairs(10**6, 23)
        assert len(ms) == 54
        assert max(ms) == 121121

    def test_reuses_supplied_sieve(self):
        g = gpf_sieve(200)
        assert scan_smooth_pairs(100, 7, g) == [1, 3, 5, 21, 45]

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            scan_smooth_pairs(100, 1)
        with pytest.raises(ValueError):
            scan_smooth_pairs(0, 5)


class TestSmallKExceptions:
    def test_k2_frozen(self, table_1m):
        hits = small_k_exceptions(2, 10**5, table_1m)
        assert [(h.m, h.k, h.alpha, h.n, h.max_prime) for h in hits] == [
            (21, 2, 1, 7, 7),
            (45, 2, 1, 13, 7),
        ]
        assert hits[0].factors == {3: 1, 5: 2, 7: 1}  # 21 * 25 = 3 * 5^2 * 7

    @pytest.mark.parametrize("k", [3, 4, 5, 6])
    def test_k3_to_6_empty(self, table_1m, k):
        assert small_k_exceptions(k, 10**5, table_1m) == []

    def test_m_must_clear_4k(self, table_1m):
        # 4k-smooth pairs at m <= 4k (e.g. m=5 at k=2) are excluded by design
        for h in small_k_exceptions(2, 10**5, table_1m):
            assert h.m > 8

    def test_rejects_bad_k(self, table_1m):
        for k in (1, 7):
            with pytest.raises(ValueError):
                small_k_exceptions(k, 100, table_1m)


class TestResolveException:
    @pytest.mark.parametrize("m,n_want", [(21, 7), (45, 13)])
    def test_frozen_resolutions(self, table_1m, m, n_want):
        cert = resolve_exception(m, 2, table_1m)
        assert cert.n == n_want and cert.k == 2
        assert cert.rule.p == 7
        assert cert.verified_by_phi_oracle

    def test_builds_own_table(self):
        cert = resolve_exception(21, 2)
        assert cert.rule.p == 7

    def test_no_witness_raises(self, table_1m, monkeypatch):
        monkeypatch.setattr(sm, "find_criterion_prime", lambda *a, **k: None)
        with pytest.raises(NoWitness):
            resolve_exception(21, 2, table_1m)


class TestScanContext:
    def test_structure(self, table_1m):
        ctx = build_scan_context(10**5, table_1m)
        assert ctx.horizon == 10**5
        assert ctx.exception_ms(2) == frozenset({21, 45})
        for k in (3, 4, 5, 6):
            assert ctx.exception_ms(k) == frozenset()
        assert ctx.exception_ms(9) == frozenset()  # unscanned k: no exceptions

    def test_shared_sieve_equivalent(self, table_1m):
        g = gpf_sieve(10**4 + 4)
        a = build_scan_context(10**4, table_1m, g)
        b = build_scan_context(10**4, table_1m)
        assert a.hits == b.hits


class TestExportCsv:
    def test_golden_rows(self, table_1m):
        hits = small_k_exceptions(2, 10**5, table_1m)
        buf = io.StringIO()
        export_csv(hits, buf, table_1m)
        assert buf.getvalue().splitlines() == [
            "m,k,alpha,n,max_prime,certificate_prime",
            "21,2,1,7,7,7",
            "45,2,1,13,7,7",
        ]
