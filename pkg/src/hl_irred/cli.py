"""Batch orchestration and machine-readable certificate reports.

Five subcommands: `verify` runs the per-degree exclusion pipeline over a range
of n, `lemma-gaps` checks the class-gap bounds at their four ceilings,
`bounds` recomputes the L-bound maxima and the large-k contradiction grid,
`smooth` reruns the exceptional-pair scan, and `oracle` cross-validates random
instances against the mod-p factor-degree oracle.

Reports are a single JSON document {"command", "config", "results", "schema"}
with keys in that (alphabetical) order, schema tag "hl-irred/1", sorted keys
inside every row, and no whitespace, so a fixed config yields byte-identical
output. Integers at or above 2^53 are serialized as decimal strings.

Exit codes: 0 success, 1 configuration error, 2 verification mismatch,
3 insufficient horizon. Only this module spawns concurrency (`verify` fans
n-chunks out to processes; merges are ordered by n, so the report does not
depend on the worker count).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields, is_dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bounds import (
    LBoundInput,
    L_bound,
    corollary_threshold_check,
    large_k_contradiction,
    large_k_grid_holds,
)
from .criterion import (
    ExclusionCertificate,
    OmegaGap,
    TermCache,
    Undecided,
    omega_1,
    recheck_certificate,
    verify_theorem,
)
from .errors import CeilingExceedsTable, HlIrredError
from .oracle import FAIL, check_instance, sample_profile
from .primes import SMOOTH_REGIMES, PrimeTable, build_table, load_table, max_gap_in_class, save_table
from .smooth import build_scan_context, resolve_exception, small_k_exceptions
from .windows import APSpec

SCHEMA = "hl-irred/1"
JSON_INT_MAX = 1 << 53  # larger integers become decimal strings

# (ceiling for the lower prime, claimed gap bound), from the regime table
GAP_CHECKS = tuple((cap, bnd) for (_, _, cap, bnd) in SMOOTH_REGIMES)

# (k threshold, claimed maximum of m_max over 7 <= k <= threshold)
L_CLAIMS = ((10, 104), (20, 245), (400, 2353))

LARGE_K_START = 401
LARGE_K_V0 = 138
EXPECTED_EXCEPTIONS = frozenset({(2, 21), (2, 45)})

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_MISMATCH = 2
EXIT_HORIZON = 3


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def _jsonable(x):
    """JSON-safe copy: big ints and Fractions to strings, dataclasses to
    dicts, numpy scalars to Python ints."""
    if isinstance(x, bool) or x is None or isinstance(x, (str, float)):
        return x
    if isinstance(x, np.integer):
        x = int(x)
    if isinstance(x, int):
        return str(x) if abs(x) >= JSON_INT_MAX else x
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if is_dataclass(x):
        return {f.name: _jsonable(getattr(x, f.name)) for f in fields(x)}
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def _emit(command: str, config: dict, results, out: str | None) -> None:
    text = (
        '{"command":' + _dumps(command)
        + ',"config":' + _dumps(config)
        + ',"results":' + _dumps(results)
        + ',"schema":' + _dumps(SCHEMA) + "}\n"
    )
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _get_table(limit: int, cache_path: str | None) -> PrimeTable:
    """Load a cached table when it covers `limit`, else build (and cache)."""
    if cache_path:
        path = Path(cache_path)
        if path.exists():
            table = load_table(path)
            if table.limit >= limit:
                return table
        table = build_table(limit)
        save_table(table, path)
        return table
    return build_table(limit)


def _resolve_threads(flag: int | None) -> int:
    if flag is not None:
        _require(flag >= 1, f"--threads must be >= 1, got {flag}")
        return flag
    env = os.environ.get("HL_IRRED_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"HL_IRRED_THREADS must be an integer, got {env!r}")
        _require(value >= 1, f"HL_IRRED_THREADS must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


# ---- verify -------------------------------------------------------------------


def _cert_obj(cert: ExclusionCertificate) -> dict:
    rule = cert.rule
    obj = {"k": cert.k, "kind": rule.kind, "verified": cert.verified_by_phi_oracle}
    if hasattr(rule, "p"):
        obj["p"] = rule.p
        obj["trace"] = rule.trace
    if isinstance(rule, OmegaGap):
        obj["omega"] = rule.omega
        obj["omega_cap"] = rule.omega_cap
    if hasattr(rule, "scan_limit"):
        obj["scan_limit"] = rule.scan_limit
    return obj


def _verify_row(spec, n, table, ctx, cache, recheck) -> tuple[str, int, bool]:
    """One result row as serialized JSON, plus its undecided count and
    whether every certificate survived the optional recheck."""
    rep = verify_theorem(spec, n, table, ctx, cache)
    certs, undecided = [], []
    recheck_ok = True
    for c in rep.certificates:
        if isinstance(c, Undecided):
            undecided.append({"k": c.k, "kind": c.kind, "reason": c.reason})
            continue
        obj = _cert_obj(c)
        if recheck:
            ok = recheck_certificate(c, table, ctx)
            obj["recheck"] = ok
            recheck_ok = recheck_ok and ok
        certs.append(obj)
    row = {
        "alpha": spec.alpha,
        "certificates": certs,
        "n": n,
        "ok": rep.ok,
        "undecided": undecided,
    }
    return _dumps(row), rep.undecided, recheck_ok


_VERIFY_STATE: dict = {}


def _verify_worker_init(alpha: int, table_limit: int, horizon: int, recheck: bool):
    table = build_table(table_limit)
    spec = APSpec(alpha=alpha, d=4)
    _VERIFY_STATE.update(
        spec=spec,
        table=table,
        ctx=build_scan_context(horizon, table),
        cache=TermCache(spec, table),
        recheck=recheck,
    )


def _verify_worker_chunk(bounds: tuple[int, int]) -> list[tuple[str, int, bool]]:
    lo, hi = bounds
    st = _VERIFY_STATE
    return [
        _verify_row(st["spec"], n, st["table"], st["ctx"], st["cache"], st["recheck"])
        for n in range(lo, hi)
    ]


def cmd_verify(args) -> int:
    _require(1 <= args.n_from <= args.n_to, "need 1 <= --n-from <= --n-to")
    threads = _resolve_threads(args.threads)
    horizon = args.alpha + 4 * args.n_to
    table_limit = max(1024, math.isqrt(horizon + 24) + 1)
    config = {
        "alpha": args.alpha,
        "horizon": horizon,
        "n_from": args.n_from,
        "n_to": args.n_to,
        "recheck": bool(args.recheck),
        "table_limit": table_limit,
    }

    count = args.n_to - args.n_from + 1
    total_undecided = 0
    all_recheck_ok = True

    out_fh = open(args.out, "w") if args.out else sys.stdout
    try:
        out_fh.write('{"command":"verify","config":' + _dumps(config) + ',"results":[')
        first = True

        def write_rows(rows):
            nonlocal first, total_undecided, all_recheck_ok
            for row_json, n_undecided, recheck_ok in rows:
                if not first:
                    out_fh.write(",")
                out_fh.write(row_json)
                first = False
                total_undecided += n_undecided
                all_recheck_ok = all_recheck_ok and recheck_ok

        if threads <= 1 or count < 4:
            table = _get_table(table_limit, args.table_cache)
            spec = APSpec(alpha=args.alpha, d=4)
            ctx = build_scan_context(horizon, table)
            cache = TermCache(spec, table)
            write_rows(
                _verify_row(spec, n, table, ctx, cache, args.recheck)
                for n in range(args.n_from, args.n_to + 1)
            )
        else:
            chunk = max(4, -(-count // (threads * 8)))
            ranges = [
                (lo, min(lo + chunk, args.n_to + 1))
                for lo in range(args.n_from, args.n_to + 1, chunk)
            ]
            with ProcessPoolExecutor(
                max_workers=min(threads, len(ranges)),
                initializer=_verify_worker_init,
                initargs=(args.alpha, table_limit, horizon, args.recheck),
            ) as pool:
                for rows in pool.map(_verify_worker_chunk, ranges):
                    write_rows(rows)

        out_fh.write('],"schema":"' + SCHEMA + '"}\n')
    finally:
        if args.out:
            out_fh.close()

    if total_undecided or not all_recheck_ok:
        return EXIT_MISMATCH
    return EXIT_OK


# ---- lemma-gaps ---------------------------------------------------------------


def cmd_lemma_gaps(args) -> int:
    _require(args.limit >= 2, f"--limit must be >= 2, got {args.limit}")
    table = _get_table(args.limit, args.table_cache)
    results = []
    all_hold = True
    for ceiling, bound in GAP_CHECKS:
        for l in (1, 3):
            if ceiling > table.limit:
                print(
                    f"warning: ceiling {ceiling} above table limit {table.limit};"
                    " skipped",
                    file=sys.stderr,
                )
                results.append(
                    {"bound": bound, "ceiling": ceiling, "residue_class": l, "skipped": True}
                )
                continue
            try:
                rep = max_gap_in_class(table, l, ceiling, bound=bound)
            except CeilingExceedsTable:
                print(
                    f"warning: no successor prime beyond ceiling {ceiling} in class"
                    f" {l}; skipped",
                    file=sys.stderr,
                )
                results.append(
                    {"bound": bound, "ceiling": ceiling, "residue_class": l, "skipped": True}
                )
                continue
            results.append(rep)
            all_hold = all_hold and rep.holds
    _emit("lemma-gaps", {"limit": args.limit}, results, args.out)
    return EXIT_OK if all_hold else EXIT_MISMATCH


# ---- bounds -------------------------------------------------------------------


def cmd_bounds(args) -> int:
    _require(args.kmax >= 7, f"--kmax must be >= 7, got {args.kmax}")
    table = build_table(1024)
    results = []
    mismatch = False

    running_max, argmax_k = 0, None
    claims = [(t, c) for t, c in L_CLAIMS if t <= args.kmax]
    hi = max((t for t, _ in claims), default=0)
    next_claim = 0
    for k in range(7, hi + 1):
        res = L_bound(LBoundInput(k=k, t=omega_1(k, table), prime_cut_index=4, d=4))
        if res.m_max > running_max:
            running_max, argmax_k = res.m_max, k
        while next_claim < len(claims) and claims[next_claim][0] == k:
            threshold, claim = claims[next_claim]
            holds = running_max <= claim
            row = {
                "argmax_k": argmax_k,
                "claim": claim,
                "computed": running_max,
                "holds": holds,
                "k_hi": threshold,
                "k_lo": 7,
                "type": "l-bound",
            }
            if not holds:
                row["offending_k"] = argmax_k
                mismatch = True
            results.append(row)
            next_claim += 1

    if args.kmax >= LARGE_K_START:
        at_start = large_k_contradiction(LARGE_K_START, LARGE_K_V0)
        on_grid = large_k_grid_holds(LARGE_K_V0, LARGE_K_START, args.kmax)
        holds = at_start and on_grid
        results.append(
            {
                "grid_hi": args.kmax,
                "grid_lo": LARGE_K_START,
                "holds": holds,
                "type": "contradiction",
                "v0": LARGE_K_V0,
            }
        )
        mismatch = mismatch or not holds
        thr = corollary_threshold_check(LARGE_K_V0)
        results.append({"holds": thr, "type": "threshold", "v0": LARGE_K_V0})
        mismatch = mismatch or not thr

    config = {"d": 4, "kmax": args.kmax, "prime_cut": [2, 3, 5, 7]}
    _emit("bounds", config, results, args.out)
    return EXIT_MISMATCH if mismatch else EXIT_OK


# ---- smooth -------------------------------------------------------------------


def cmd_smooth(args) -> int:
    _require(args.bound >= 1, f"--bound must be >= 1, got {args.bound}")
    table = _get_table(max(1024, math.isqrt(args.bound + 24) + 1), args.table_cache)
    results = []
    found = set()
    for k in range(2, 7):
        for hit in small_k_exceptions(k, args.bound, table):
            found.add((hit.k, hit.m))
            cert = resolve_exception(hit.m, hit.k, table)
            results.append(
                {
                    "alpha": hit.alpha,
                    "certificate_prime": cert.rule.p,
                    "factors": hit.factors,
                    "k": hit.k,
                    "m": hit.m,
                    "max_prime": hit.max_prime,
                    "n": hit.n,
                }
            )
    _emit("smooth", {"bound": args.bound, "k_range": [2, 6]}, results, args.out)

    expected_here = {(k, m) for (k, m) in EXPECTED_EXCEPTIONS if m <= args.bound}
    if found != expected_here:
        return EXIT_MISMATCH
    if expected_here != EXPECTED_EXCEPTIONS:
        return EXIT_HORIZON
    return EXIT_OK


# ---- oracle -------------------------------------------------------------------


def cmd_oracle(args) -> int:
    _require(args.n_max >= 1, f"--n-max must be >= 1, got {args.n_max}")
    _require(args.samples >= 0, f"--samples must be >= 0, got {args.samples}")
    rng = random.Random(args.seed)
    results = []
    any_fail = False
    if args.samples:
        for n in range(1, args.n_max + 1):
            for alpha in (1, 3):
                spec = APSpec(alpha=alpha, d=4)
                verdicts = [
                    check_instance(spec, n, sample_profile(rng, n))
                    for _ in range(args.samples)
                ]
                any_fail = any_fail or FAIL in verdicts
                results.append(
                    {
                        "alpha": alpha,
                        "inconclusive": sum(v == "INCONCLUSIVE" for v in verdicts),
                        "n": n,
                        "verdicts": verdicts,
                    }
                )
    config = {"n_max": args.n_max, "samples": args.samples, "seed": args.seed}
    _emit("oracle", config, results, args.out)
    return EXIT_MISMATCH if any_fail else EXIT_OK


# ---- entry point --------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hl-irred",
        description="verification pipeline for quartic progression polynomials",
    )
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="per-degree exclusion certificates over n")
    v.add_argument("--n-from", type=int, required=True)
    v.add_argument("--n-to", type=int, required=True)
    v.add_argument("--alpha", type=int, choices=(1, 3), required=True)
    v.add_argument("--recheck", action="store_true", help="re-validate every certificate")
    v.add_argument("--threads", type=int, default=None)
    v.add_argument("--table-cache", default=None)
    v.add_argument("--out", default=None)
    v.set_defaults(run=cmd_verify)

    g = sub.add_parser("lemma-gaps", help="class gap bounds at the four ceilings")
    g.add_argument("--limit", type=int, default=1_001_000)
    g.add_argument("--table-cache", default=None)
    g.add_argument("--out", default=None)
    g.set_defaults(run=cmd_lemma_gaps)

    b = sub.add_parser("bounds", help="L-bound maxima and the large-k contradiction")
    b.add_argument("--kmax", type=int, default=LARGE_K_START)
    b.add_argument("--out", default=None)
    b.set_defaults(run=cmd_bounds)

    s = sub.add_parser("smooth", help="exceptional-pair scan for k = 2..6")
    s.add_argument("--bound", type=int, default=10**6)
    s.add_argument("--table-cache", default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(run=cmd_smooth)

    o = sub.add_parser("oracle", help="random-instance cross-validation")
    o.add_argument("--n-max", type=int, default=25)
    o.add_argument("--samples", type=int, default=20)
    o.add_argument("--seed", type=int, default=1)
    o.add_argument("--out", default=None)
    o.set_defaults(run=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.run(args)
    except (HlIrredError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
