"""CLI envelope format, exit codes, determinism, and row shapes."""

import dataclasses
import hashlib
import io
import json
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction

import numpy as np
import pytest

import hl_irred.cli as cli


def run(argv):
    """Invoke main() capturing stdout; returns (exit_code, parsed_doc, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        rc = cli.main(argv)
    text = out.getvalue()
    doc = json.loads(text) if text.strip() else None
    return rc, doc, err.getvalue(), text


class TestJsonable:
    def test_fraction(self):
        assert cli._jsonable(Fraction(3, 2)) == "3/2"

    def test_big_int_boundary(self):
        assert cli._jsonable(2**53 - 1) == 2**53 - 1
        assert cli._jsonable(2**53) == str(2**53)
        assert cli._jsonable(-(2**53)) == str(-(2**53))

    def test_numpy_int(self):
        assert cli._jsonable(np.int64(7)) == 7

    def test_set_sorted(self):
        assert cli._jsonable({3, 1, 2}) == [1, 2, 3]

    def test_dataclass(self):
        @dataclasses.dataclass
        class Row:
            b: int
            a: int

        assert cli._jsonable(Row(b=1, a=2)) == {"b": 1, "a": 2}

    def test_rejects_unknown(self):
        with pytest.raises(TypeError):
            cli._jsonable(object())


class TestEnvelope:
    def test_key_order_and_schema(self):
        rc, doc, _, text = run(["oracle", "--n-max", "1", "--samples", "1"])
        assert rc == 0
        assert list(doc.keys()) == ["command", "config", "results", "schema"]
        assert doc["schema"] == "hl-irred/1"
        assert doc["command"] == "oracle"
        assert text.endswith("}\n")

    def test_out_flag_writes_file(self, tmp_path):
        path = tmp_path / "report.json"
        rc, doc, _, text = run(
            ["verify", "--n-from", "2", "--n-to", "3", "--alpha", "1", "--out", str(path)]
        )
        assert rc == 0
        assert text == ""
        on_disk = json.loads(path.read_text())
        assert on_disk["schema"] == "hl-irred/1"
        assert len(on_disk["results"]) == 2


class TestExitCodes:
    def test_verify_ok(self):
        rc, doc, _, _ = run(["verify", "--n-from", "2", "--n-to", "6", "--alpha", "1"])
        assert rc == 0
        assert all(r["ok"] for r in doc["results"])

    def test_verify_bad_range(self):
        rc, _, err, _ = run(["verify", "--n-from", "0", "--n-to", "5", "--alpha", "1"])
        assert rc == 1
        assert err

    def test_unknown_flag(self):
        rc, _, _, _ = run(["verify", "--bogus"])
        assert rc == 1

    def test_unknown_command(self):
        rc, _, _, _ = run(["frobnicate"])
        assert rc == 1

    def test_smooth_partial_horizon(self):
        # bound 20 sees (2, 21) not yet; expected set not fully covered
        rc, doc, _, _ = run(["smooth", "--bound", "20"])
        assert rc == 3
        assert doc["results"] == []

    def test_smooth_full_at_small_bound(self):
        rc, doc, _, _ = run(["smooth", "--bound", "100"])
        assert rc == 0
        assert [(r["k"], r["m"]) for r in doc["results"]] == [(2, 21), (2, 45)]

    def test_lemma_gaps_small_table_skips(self):
        rc, doc, err, _ = run(["lemma-gaps", "--limit", "3000"])
        assert rc == 0
        skipped = [r for r in doc["results"] if r.get("skipped")]
        verified = [r for r in doc["results"] if not r.get("skipped")]
        assert len(skipped) == 2 and len(verified) == 6
        assert all(r["holds"] for r in verified)
        assert "skipped" in err

    def test_lemma_gaps_limit_too_large(self):
        rc, _, err, _ = run(["lemma-gaps", "--limit", str(10**9 + 1)])
        assert rc == 1
        assert err

    def test_bounds_small_kmax(self):
        rc, doc, _, _ = run(["bounds", "--kmax", "20"])
        assert rc == 0
        assert [r["type"] for r in doc["results"]] == ["l-bound", "l-bound"]
        by_k = {r["k_hi"]: r for r in doc["results"]}
        assert by_k[10]["computed"] == 104 and by_k[10]["holds"]
        assert by_k[20]["computed"] == 245 and by_k[20]["argmax_k"] == 18

    def test_bounds_full_rows(self):
        rc, doc, _, _ = run(["bounds", "--kmax", "401"])
        assert rc == 0
        types = [r["type"] for r in doc["results"]]
        assert types == ["l-bound", "l-bound", "l-bound", "contradiction", "threshold"]
        contra = doc["results"][3]
        assert contra["holds"] and contra["grid_lo"] == 401
        thresh = doc["results"][4]
        assert thresh["holds"] and thresh["v0"] == 138

    def test_oracle_zero_samples(self):
        rc, doc, _, _ = run(["oracle", "--n-max", "5", "--samples", "0"])
        assert rc == 0
        assert doc["results"] == []


class TestVerifyRows:
    def test_certificate_shapes(self):
        rc, doc, _, _ = run(["verify", "--n-from", "4", "--n-to", "4", "--alpha", "3"])
        assert rc == 0
        row = doc["results"][0]
        assert row["n"] == 4 and row["alpha"] == 3 and row["undecided"] == []
        kinds = {c["k"]: c for c in row["certificates"]}
        assert kinds[1]["kind"] == "linear-factor-allowed"
        assert kinds[1]["verified"] is False
        assert kinds[2]["kind"] == "criterion-prime"
        assert kinds[2]["p"] == 11 and kinds[2]["verified"] is True
        assert kinds[2]["trace"]["j0"] == 3

    def test_recheck_flag_annotates(self):
        rc, doc, _, _ = run(
            ["verify", "--n-from", "2", "--n-to", "2", "--alpha", "1", "--recheck"]
        )
        assert rc == 0
        assert doc["config"]["recheck"] is True
        assert all(c["recheck"] for r in doc["results"] for c in r["certificates"])

    def test_alpha_is_required(self):
        rc, _, err, _ = run(["verify", "--n-from", "2", "--n-to", "3"])
        assert rc == 1
        assert "--alpha" in err

    def test_alpha_choices_enforced(self):
        rc, _, _, _ = run(["verify", "--n-from", "2", "--n-to", "3", "--alpha", "2"])
        assert rc == 1

    def test_rows_sorted_and_complete(self):
        rc, doc, _, _ = run(["verify", "--n-from", "2", "--n-to", "40", "--alpha", "1"])
        assert rc == 0
        assert [r["n"] for r in doc["results"]] == list(range(2, 41))
        for r in doc["results"]:
            assert len(r["certificates"]) == r["n"] // 2


class TestDeterminism:
    def digest(self, argv, env=None, monkeypatch=None):
        if env:
            for key, val in env.items():
                monkeypatch.setenv(key, val)
        _, _, _, text = run(argv)
        if env:
            for key in env:
                monkeypatch.delenv(key)
        return hashlib.sha256(text.encode()).hexdigest()

    def test_thread_count_invariant(self, monkeypatch):
        base = ["verify", "--n-from", "2", "--n-to", "30", "--alpha", "3"]
        d1 = self.digest(base + ["--threads", "1"])
        d4 = self.digest(base + ["--threads", "4"])
        denv = self.digest(base, env={"HL_IRRED_THREADS": "2"}, monkeypatch=monkeypatch)
        assert d1 == d4 == denv

    def test_bad_thread_values(self, monkeypatch):
        base = ["verify", "--n-from", "2", "--n-to", "3", "--alpha", "1"]
        rc, _, err, _ = run(base + ["--threads", "0"])
        assert rc == 1 and "threads" in err
        monkeypatch.setenv("HL_IRRED_THREADS", "zero")
        rc, _, err, _ = run(base)
        assert rc == 1 and "HL_IRRED_THREADS" in err


class TestTableCache:
    def test_created_then_reused(self, tmp_path):
        cache = tmp_path / "primes.hlpt"
        argv = ["smooth", "--bound", "100", "--table-cache", str(cache)]
        rc, doc, _, _ = run(argv)
        assert rc == 0 and cache.exists()
        raw = cache.read_bytes()
        assert raw[:4] == b"HLPT"
        stamp = cache.stat().st_mtime_ns
        rc2, doc2, _, _ = run(argv)
        assert rc2 == 0 and doc2 == doc
        assert cache.stat().st_mtime_ns == stamp  # loaded, not rebuilt

    def test_undersized_cache_rebuilt(self, tmp_path):
        from hl_irred.primes import build_table, save_table

        cache = tmp_path / "primes.hlpt"
        save_table(build_table(64), str(cache))
        rc, doc, _, _ = run(["smooth", "--bound", "100", "--table-cache", str(cache)])
        assert rc == 0
        assert [(r["k"], r["m"]) for r in doc["results"]] == [(2, 21), (2, 45)]
