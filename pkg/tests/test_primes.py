"""Prime tables: sieve exactness, cache format, gaps, theta, the envelope."""

import math

import numpy as np
import pytest

from hl_irred.errors import (
    CeilingExceedsTable,
    DomainError,
    LimitTooLarge,
    SampleOutOfRange,
)
from hl_irred.primes import (
    RR_COEFF,
    build_table,
    check_rr_envelope,
    corollary_mid_m,
    corollary_small_m,
    load_table,
    max_gap_in_class,
    save_table,
    theta_exact,
)

# (class, ceiling) -> (max gap, witness pair); witnesses frozen from the sieve
GAP_ORACLE = {
    (1, 120): (24, (113, 137)),
    (1, 250): (32, (197, 229)),
    (1, 2400): (60, (1801, 1861)),
    (1, 10**6): (200, (183089, 183289)),
    (3, 120): (20, (83, 103)),
    (3, 250): (20, (83, 103)),
    (3, 2400): (40, (1327, 1367)),
    (3, 10**6): (200, (666203, 666403)),
}


def brute_primes(n):
    flags = [True] * (n + 1)
    flags[0:2] = [False, False]
    for p in range(2, int(n**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = [False] * len(flags[p * p :: p])
    return [i for i, f in enumerate(flags) if f]


class TestBuildTable:
    def test_matches_reference_sieve(self):
        table = build_table(5000)
        assert table.primes_list == brute_primes(5000)

    def test_classes_partition_odd_primes(self, table_small):
        c1 = set(table_small.residue_class(1).tolist())
        c3 = set(table_small.residue_class(3).tolist())
        odd = set(table_small.primes_list) - {2}
        assert c1 | c3 == odd and not (c1 & c3)
        assert all(p % 4 == 1 for p in c1)
        assert all(p % 4 == 3 for p in c3)

    def test_pi_frozen_values(self, table_1m):
        assert table_1m.pi(10**6) == 78498
        assert table_1m.pi(1604) == 252
        assert table_1m.pi(2) == 1
        assert table_1m.pi(1) == 0

    def test_pi_beyond_limit(self, table_small):
        with pytest.raises(SampleOutOfRange):
            table_small.pi(10**4 + 1)

    def test_limit_too_large(self):
        with pytest.raises(LimitTooLarge):
            build_table(10**9 + 1)

    def test_limit_too_small(self):
        with pytest.raises(ValueError):
            build_table(1)


class TestCacheFormat:
    def test_roundtrip(self, table_small, tmp_path):
        path = tmp_path / "t.hlpt"
        save_table(table_small, str(path))
        loaded = load_table(str(path))
        assert loaded.limit == table_small.limit
        assert np.array_equal(loaded.primes, table_small.primes)
        assert np.array_equal(loaded.class1, table_small.class1)

    def test_header_layout(self, tmp_path):
        path = tmp_path / "t.hlpt"
        save_table(build_table(30), str(path))
        raw = path.read_bytes()
        assert raw[:4] == b"HLPT"
        assert int.from_bytes(raw[4:8], "little") == 1
        assert int.from_bytes(raw[8:16], "little") == 30
        # 10 primes below 30, one u64 each
        assert len(raw) == 16 + 8 * 10
        assert int.from_bytes(raw[16:24], "little") == 2

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda b: b"XXXX" + b[4:],  # magic
            lambda b: b[:4] + (9).to_bytes(4, "little") + b[8:],  # version
            lambda b: b[:-3],  # ragged record section
            lambda b: b + (10**9).to_bytes(8, "little"),  # out of range
            lambda b: b[:16] + b[24:32] + b[16:24] + b[32:],  # not ascending
            lambda b: b[:10],  # truncated header
        ],
    )
    def test_rejects_corruption(self, tmp_path, mutate):
        path = tmp_path / "t.hlpt"
        save_table(build_table(30), str(path))
        path.write_bytes(mutate(path.read_bytes()))
        with pytest.raises(ValueError):
            load_table(str(path))


class TestGaps:
    @pytest.mark.parametrize("l,ceiling", sorted(GAP_ORACLE))
    def test_frozen_maxima(self, table_1m, l, ceiling):
        want_gap, want_wit = GAP_ORACLE[(l, ceiling)]
        rep = max_gap_in_class(table_1m, l, ceiling)
        assert rep.max_gap == want_gap
        assert tuple(rep.witness) == want_wit

    def test_bound_verdicts(self, table_1m):
        assert max_gap_in_class(table_1m, 1, 120, bound=24).holds
        assert not max_gap_in_class(table_1m, 1, 120, bound=23).holds

    def test_ceiling_needs_successor(self, table_small):
        with pytest.raises(CeilingExceedsTable):
            max_gap_in_class(table_small, 1, 10**4)

    def test_witness_is_real_gap(self, table_1m):
        rep = max_gap_in_class(table_1m, 3, 10**6)
        lo, hi = rep.witness
        assert hi - lo == rep.max_gap
        assert lo % 4 == hi % 4 == 3
        between = table_1m.primes[(table_1m.primes > lo) & (table_1m.primes < hi)]
        assert not any(p % 4 == 3 for p in between.tolist())


class TestTheta:
    def test_frozen_values(self, table_1m):
        t1 = theta_exact(table_1m, 10**6, 1)
        t3 = theta_exact(table_1m, 10**6, 3)
        assert abs(t1.value - 498333.441922) < 5e-6
        assert abs(t3.value - 500150.039957) < 5e-6
        assert t1.abs_err < 1e-9 * t1.value

    def test_small_sum_exact(self, table_small):
        # theta(10, 4, 1) = log 5; theta(20, 4, 3) = log(3*7*11*19)
        assert abs(theta_exact(table_small, 10, 1).value - math.log(5)) < 1e-12
        want = math.log(3 * 7 * 11 * 19)
        assert abs(theta_exact(table_small, 20, 3).value - want) < 1e-12

    def test_beyond_limit(self, table_small):
        with pytest.raises(SampleOutOfRange):
            theta_exact(table_small, 10**5, 1)


class TestEnvelope:
    def test_frozen_inside(self, table_1m):
        rows = check_rr_envelope(table_1m, 10**6, [10**6])
        assert len(rows) == 2 and all(r.inside for r in rows)
        for r in rows:
            assert r.lower < r.theta < r.upper

    def test_small_nu0_can_fail(self, table_small):
        # at nu0 = 10 the half-width swamps the sum; rows exist either way
        rows = check_rr_envelope(table_small, 10, [10])
        assert len(rows) == 2

    def test_sample_out_of_range(self, table_small):
        with pytest.raises(SampleOutOfRange):
            check_rr_envelope(table_small, 100, [10**5])
        with pytest.raises(SampleOutOfRange):
            check_rr_envelope(table_small, 100, [50])

    def test_envelope_width_shrinks(self, table_1m):
        rows4 = check_rr_envelope(table_1m, 10**4, [10**4])
        rows6 = check_rr_envelope(table_1m, 10**6, [10**6])
        rel4 = (rows4[0].upper - rows4[0].lower) / 10**4
        rel6 = (rows6[0].upper - rows6[0].lower) / 10**6
        assert rel6 < rel4  # half-width 2c/sqrt(nu0) decreases

    def test_constant_is_exact_decimal(self):
        assert RR_COEFF == 1798158 / 10**6 or RR_COEFF.denominator == 10**6 // math.gcd(
            1798158, 10**6
        )


class TestChebyshevBias:
    def test_recorded_desk_scale_magnitude(self, table_1m):
        # recorded actual: max |pi(x,4,3) - pi(x,4,1)| over x <= 10^6 is 157,
        # attained at 997511 (the value 100 sometimes quoted is too small)
        c1 = table_1m.class1[table_1m.class1 <= 10**6]
        c3 = table_1m.class3[table_1m.class3 <= 10**6]
        xs = np.sort(np.concatenate([c1, c3]))
        n1 = np.searchsorted(c1, xs, side="right")
        n3 = np.searchsorted(c3, xs, side="right")
        diff = np.abs(n3 - n1)
        assert int(diff.max()) == 157
        assert int(xs[int(diff.argmax())]) == 997511


class TestCorollaries:
    def test_small_m_regimes(self, table_1m):
        assert corollary_small_m(table_1m, 7, 100)
        assert corollary_small_m(table_1m, 10, 249)
        assert corollary_small_m(table_1m, 20, 2399)
        assert corollary_small_m(table_1m, 60, 10**6)

    def test_small_m_out_of_regime(self, table_1m):
        assert not corollary_small_m(table_1m, 7, 10**6)  # m above the k<8 cap
        assert not corollary_small_m(table_1m, 3, 100)  # k below every regime

    def test_mid_m(self):
        assert corollary_mid_m(2000, 10**6 + 1)
        assert corollary_mid_m(2000, 138 * 4 * 2000)
        assert not corollary_mid_m(2000, 138 * 4 * 2000 + 1)
        assert not corollary_mid_m(2000, 10**6)  # not above the scan horizon
        with pytest.raises(DomainError):
            corollary_mid_m(0, 10**6 + 1)
