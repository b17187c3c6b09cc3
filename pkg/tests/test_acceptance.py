"""Acceptance checks, one test per criterion.

Each test prints a single ``criterion N ...: PASS|FAIL (details)`` line and
then asserts. Run as a script to get just the lines:

    python3 tests/test_acceptance.py
"""

import json
import sys
import time
from functools import lru_cache

import pytest

from cutpaste.cli import ExperimentConfig, run
from cutpaste.count import (
    closed_point_counts,
    count_locus,
    count_pencil,
    count_pencil_direct,
    count_singular_fibers,
    euler_formulas,
    verdict_equality,
)
from cutpaste.field import field_create
from cutpaste.kernels import projective_size
from cutpaste.kvar import kv_cancellation_derive, kv_generate_relations, replay
from cutpaste.pencil import make_pencil, phi_roundtrip_harness, universal_linear_iso
from cutpaste.replay_check import check_transcript

EQUALITY_CASES = [(7, 3), (11, 3), (11, 4)]
SEED_PAIRS = [(1, 2), (3, 4), (5, 6), (7, 8), (9, 10)]
BLOWUP_CASES = [5, 7]
BLOWUP_SEEDS = [1, 2, 3]
PHI_SAMPLES = 10_000
SKIP_BOUND = 0.05


@lru_cache(maxsize=None)
def pencil(q, m, seed, partner_of=None):
    shared = pencil(q, m, partner_of) if partner_of is not None else None
    return make_pencil(field_create(q), m, seed, shared=shared)


def equality_pairs():
    for q, m in EQUALITY_CASES:
        for s1, s2 in SEED_PAIRS:
            yield q, m, pencil(q, m, s1), pencil(q, m, s2, s1)


def blowup_pencils():
    for q in BLOWUP_CASES:
        for s in BLOWUP_SEEDS:
            yield q, pencil(q, 1, s)


def report(n, name, ok, detail):
    line = f"criterion {n} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    return line


def _emit(capsys, n, name, ok, detail):
    if capsys is None:
        report(n, name, ok, detail)
        return
    with capsys.disabled():
        print()
        report(n, name, ok, detail)


# -- criteria -------------------------------------------------------------------


def criterion_1():
    runs, equal, diffs, worst = 0, 0, [], {1: 0.0, 2: 0.0}
    for q, m, a, b in equality_pairs():
        for k in (1, 2):
            t0 = time.perf_counter()
            res = verdict_equality(a, b, [k])
            worst[k] = max(worst[k], time.perf_counter() - t0)
            (row,) = res["rows"]
            runs += 1
            equal += row["verdict"] == "PASS"
            if row["verdict"] != "PASS":
                diffs.append(f"q={q} m={m} seeds={a.seed},{b.seed} k={k}: {row['count_X']} vs {row['count_Xtilde']}")
    ok = equal == runs and worst[2] < 120
    detail = f"{equal}/{runs} runs with #X = #Xtilde; slowest k=1 {worst[1]:.1f}s, k=2 {worst[2]:.1f}s"
    if diffs:
        detail += "; first mismatches: " + "; ".join(diffs[:3])
    return ok, detail


def criterion_2():
    runs, good, bad = 0, 0, []
    for q, p in blowup_pencils():
        for k in (1, 2):
            Q = q**k
            x = count_pencil(p, k).count
            z = count_locus(p, "Z", k).count
            runs += 1
            if x == projective_size(Q, 3) + Q * z:
                good += 1
            else:
                bad.append(f"q={q} seed={p.seed} k={k}")
    return good == runs, f"{good}/{runs} m=1 counts equal #P3 + q^k #Z" + (f"; failing {bad}" if bad else "")


def _decomposition_ok(p, k):
    Q = p.field.p**k
    x = count_pencil(p, k).count
    x0, s, z = (count_locus(p, loc, k).count for loc in ("X0", "S_inf", "Z"))
    return x == x0 + s + Q * z


def criterion_3():
    pencils = [p for _, p in blowup_pencils()]
    for _, _, a, b in equality_pairs():
        pencils += [a, b]
    runs = good = 0
    for p in pencils:
        for k in (1, 2):
            runs += 1
            good += _decomposition_ok(p, k)
    return good == runs, f"{good}/{runs} pencil-degree pairs satisfy #X = #X0 + #S_inf + q^k #Z"


def criterion_4():
    n = exact = 0
    rates = []
    for q, m, a, b in equality_pairs():
        for p in (a, b):
            st = phi_roundtrip_harness(p, PHI_SAMPLES, seed=p.seed)
            n += 1
            exact += st["roundtrips_ok"] == st["valid"] == st["images_on_chart"] == PHI_SAMPLES
            rates.append((st["skip_rate"], q, m, p.seed, st["skipped_F_zero"], st["skipped_degenerate_lambda"]))
    over = [r for r in rates if r[0] >= SKIP_BOUND]
    ok = exact == n and not over
    lo, hi = min(r[0] for r in rates), max(r[0] for r in rates)
    detail = (f"{exact}/{n} pencils: all {PHI_SAMPLES} samples round-trip and land on the universal equation; "
              f"skip rate range {lo:.3f}..{hi:.3f}, {len(over)}/{n} pencils at or above {SKIP_BOUND}")
    return ok, detail


def criterion_5():
    n = good = 0
    for _, _, a, b in equality_pairs():
        iso = universal_linear_iso(a, b)
        n += 1
        good += iso.identity_holds
    return good == n, f"{good}/{n} pairs: substituted universal equation equals the partner's exactly"


def criterion_6():
    good = 0
    for m in range(1, 11):
        d = kv_cancellation_derive(m)
        concl = replay(d)
        hyps_ok = {str(h) for h in d.hypotheses} == {str(h) for h in kv_generate_relations(m)}
        if hyps_ok and check_transcript(json.loads(d.dumps()), m) and str(concl.lhs) == "[X]" and str(concl.rhs) == "[Xtilde]":
            good += 1
    return good == 10, f"{good}/10 transcripts (m=1..10) validated by both replayers"


def criterion_7():
    parts, ok = [], True
    for q in (5, 7, 11):
        rows = {r["check"]: r for r in run(ExperimentConfig("class-table", q=q))["records"]}
        sc, se, nd = rows["smooth_class_count"], rows["smooth_class_euler"], rows["nodal_class_euler"]
        ok &= sc["outputs"]["count"] == q * q + 7 * q + 1 and sc["verdict"] == "PASS"
        ok &= se["outputs"]["euler"] == 9 and se["verdict"] == "PASS"
        ok &= nd["verdict"] == "WARN" and nd["outputs"]["euler"] == 9 and nd["outputs"]["stated"] == 8
        ok &= "brute_force_split_nodal_count" in nd["outputs"]
        parts.append(f"q={q}: count {sc['outputs']['count']}, nodal brute {nd['outputs']['brute_force_split_nodal_count']}"
                     f" vs class {nd['outputs']['count_realization']}")
    return ok, "; ".join(parts) + "; nodal euler 9 reported as WARN against stated 8"


def criterion_8():
    ok = True
    e1 = euler_formulas(1)
    ok &= e1["chi_X"] == -14 and e1["chi_blowup"] == -14
    for m in range(1, 101):
        e = euler_formulas(m)
        ok &= e["chi_X"] == -32 * m + 18 and e["s"] == 32 * m and e["identity_holds"] and e["chain_consistent"]
    runs, t0, found = 0, time.perf_counter(), []
    for q in (5, 7):
        for m in (1, 2):
            for s in (1, 2):
                p = pencil(q, m, s)
                a = {k: count_singular_fibers(p, k, workers=4).count for k in (1, 2, 3)}
                b = closed_point_counts(a)
                ok &= all(v <= 32 * m for v in a.values())
                ok &= all(float(v).is_integer() and v >= 0 for v in b.values())
                runs += 1
                found.append(sum(d * v for d, v in b.items()))
    el = time.perf_counter() - t0
    ok &= el < 600
    return ok, (f"euler chain holds for m<=100; {runs} pencils with a_k <= 32m and integral b_d >= 0 for k<=3 "
                f"in {el:.0f}s; nodes seen up to degree 3: {min(found)}..{max(found)} (partial check of s = 32m)")


def criterion_9():
    ok = True
    details = []
    for s in (1, 2):
        p = pencil(5, 1, s)
        for k in (1, 2):
            f, d = count_pencil(p, k).count, count_pencil_direct(p, k).count
            ok &= f == d
            details.append(f"{f}={d}")
    laws = 0
    for _, p in blowup_pencils():
        for k in (1, 2):
            Q = p.field.p**k
            z = count_locus(p, "Z", k).count
            ok &= count_locus(p, "Z_times_A1", k).count == Q * z
            ok &= _decomposition_ok(p, k)
            fc = count_pencil(p, k)
            ok &= sum(fc.extra["fiber_counts"]) == fc.count
            laws += 3
    return ok, f"fiberwise = direct at q=5, m=1: {', '.join(details)}; {laws} additivity/product identities checked"


CRITERIA = [
    (1, "main equality #X = #Xtilde", criterion_1),
    (2, "blowup identity for m=1", criterion_2),
    (3, "scissor decomposition", criterion_3),
    (4, "phi round trip and skip rate", criterion_4),
    (5, "universal-family substitution identity", criterion_5),
    (6, "cancellation transcripts", criterion_6),
    (7, "cubic surface class table", criterion_7),
    (8, "Euler arithmetic and singular fibers", criterion_8),
    (9, "counting engine self-consistency", criterion_9),
]


@pytest.mark.parametrize("n,name,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(n, name, fn, capsys):
    ok, detail = fn()
    _emit(capsys, n, name, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, name, fn in CRITERIA:
        ok, detail = fn()
        report(n, name, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
