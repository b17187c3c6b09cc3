import csv
import io
import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cutpaste.budget import Budget, BudgetExceeded
from cutpaste.count import (
    CountResult,
    cell_decomposition,
    closed_point_counts,
    count_locus,
    count_pencil,
    count_pencil_direct,
    count_projective,
    count_singular_fibers,
    count_universal_chart,
    euler_formulas,
    verdict_equality,
    weil_interval,
)
from cutpaste.field import field_create
from cutpaste.kernels import projective_size
from cutpaste.pencil import Pencil, make_pencil, universal_linear_iso
from cutpaste.poly import MPoly, X_BLOCK, poly_random_form

F5, F7 = field_create(5), field_create(7)


@pytest.fixture(scope="module")
def p5():
    return make_pencil(F5, 1, 1)


@pytest.fixture(scope="module")
def pair7():
    a = make_pencil(F7, 3, 1)
    return a, make_pencil(F7, 3, 2, shared=a)


def test_ambient_counts():
    assert count_projective([], F5, nvars=4).count == 156
    assert count_projective([], F5, blocks=[X_BLOCK, (4, 5)], nvars=6).count == 156 * 6


def test_cell_decomposition_is_disjoint_and_complete():
    for Q, dims in [(5, (3,)), (7, (3, 1)), (5, (2, 2))]:
        dec = cell_decomposition(Q, dims)
        assert dec.total == dec.expected_total
        seen = set()
        for cell in dec.cells:
            pts = dec.points(cell)
            assert len(pts) == dec.cell_size(cell)
            for p in map(tuple, pts.tolist()):
                assert p not in seen
                seen.add(p)
        assert len(seen) == dec.expected_total


def test_fiberwise_equals_direct(p5):
    for k in (1, 2):
        assert count_pencil(p5, k).count == count_pencil_direct(p5, k).count


def test_biprojective_count_projective_agrees(p5):
    E = p5.equation()
    assert count_projective([E], F5, blocks=[X_BLOCK, (4, 5)]).count == count_pencil(p5).count


def test_blowup_identity_m1(p5):
    for k in (1, 2):
        Q = 5**k
        z = count_locus(p5, "Z", k).count
        assert count_pencil(p5, k).count == projective_size(Q, 3) + Q * z


def test_beta_zero_pencil_is_a_product():
    # X = {alpha(t) G(x) = 0}: G x P^1, plus all of P^3 over each root of alpha
    base = make_pencil(F7, 2, 3)
    x = [MPoly.var(F7, 2, i) for i in range(2)]
    alpha = x[0] * x[0] + x[1] * x[1]  # -1 is not a square mod 7
    zero_beta = Pencil(F7, 2, 3, base.G, base.F, alpha, MPoly.zero(F7, 2))
    for k, roots in ((1, 0), (2, 2)):
        E = field_create(7, k)
        Q = 7**k
        g = count_projective([base.G], E).count
        assert count_pencil(zero_beta, k).count == (Q + 1) * g + roots * (projective_size(Q, 3) - g)
    assert count_pencil(zero_beta, 1).count == 8 * count_projective([base.G], F7).count


def test_decomposition_and_products(pair7):
    for p in pair7:
        for k in (1, 2):
            Q = 7**k
            x = count_pencil(p, k).count
            parts = [count_locus(p, loc, k).count for loc in ("X0", "S_inf", "Z")]
            assert x == parts[0] + parts[1] + Q * parts[2]
            assert count_locus(p, "Z_times_A1", k).count == Q * parts[2]


def test_fiber_counts_sum_and_smooth_fiber(pair7):
    a, _ = pair7
    res = count_pencil(a)
    assert sum(res.extra["fiber_counts"]) == res.count
    s = count_locus(a, "S_inf").count
    assert s % 7 == 1
    assert count_locus(a, "fiber", t=(0, 1)).count == s
    assert res.extra["fiber_counts"][-1] == s


def test_z_weil_and_monotone(pair7):
    a, _ = pair7
    z7 = count_locus(a, "Z").count
    assert abs(z7 - 8) <= 20 * 7**0.5
    lo, hi = weil_interval(7, 10)
    assert lo <= z7 <= hi
    p = make_pencil(F5, 2, 1)
    assert count_locus(p, "Z", 1).count <= count_locus(p, "Z", 2).count


def test_singular_fibers_closed_points(p5):
    a = {k: count_singular_fibers(p5, k).count for k in (1, 2, 3)}
    assert all(v <= 32 for v in a.values())
    b = closed_point_counts(a)
    assert all(float(v).is_integer() and v >= 0 for v in b.values())


def test_closed_point_counts():
    assert closed_point_counts({1: 2, 2: 6, 3: 5}) == {1: 2, 2: 2, 3: 1}
    with pytest.raises(ValueError):
        closed_point_counts({2: 4})


def test_xprime_removes_the_singular_fibers(pair7):
    a, _ = pair7
    res = count_locus(a, "X_minus_singular_fibers")
    sing = count_singular_fibers(a)
    fibers = count_pencil(a).extra["fiber_counts"]
    assert res.count == count_pencil(a).count - sum(fibers[i] for i in sing.extra["indices"])
    assert res.extra["removed_fibers"] == sing.count


def test_universal_chart_counts(pair7):
    a, b = pair7
    iso = universal_linear_iso(a, b)
    n = count_universal_chart(a).count
    assert n == count_universal_chart(b).count == count_universal_chart(a, iso).count
    # each x off Z leaves one affine condition on (y, lam) with lam-coefficient F(x)
    # or, when F(x) = 0, a nonconstant affine condition on y
    z = count_locus(a, "Z").count
    assert n == (projective_size(7, 3) - z) * 7**3


def test_verdict_guards(pair7):
    a, b = pair7
    same = verdict_equality(a, a, [1])
    assert same["verdict"] == "PASS" and same["applicable"]
    other = make_pencil(F7, 3, 9)
    na = verdict_equality(a, other, [1])
    assert na["verdict"] == "NOT-APPLICABLE" and not na["applicable"]
    uncert = Pencil(F7, 3, 2, b.G, b.F, b.alpha, b.beta)
    assert verdict_equality(a, uncert, [1])["verdict"] == "NOT-APPLICABLE"
    res = verdict_equality(a, b, [1])
    assert res["applicable"] and res["conjectural_rows"][0]["label"].startswith("conjectural")


def test_euler_formulas():
    e1 = euler_formulas(1)
    assert (e1["chi_X"], e1["s"], e1["chi_blowup"]) == (-14, 32, -14)
    e3 = euler_formulas(3)
    assert (e3["chi_X"], e3["s"]) == (-78, 96)
    for m in range(1, 101):
        e = euler_formulas(m)
        assert e["chain_consistent"] and e["identity_holds"]
        assert e["eighteen_minus_s"] == e["chi_X"] == -32 * m + 18
    with pytest.raises(ValueError):
        euler_formulas(0)


def test_count_result_serialization(p5):
    res = count_pencil(p5)
    d = res.to_json()
    assert d["locus"] == "X" and d["q"] == 5 and d["k"] == 1 and d["count"] == res.count
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CountResult.CSV_FIELDS)
    w.writerow(res.csv_row())
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[1][3] == str(res.count)


def test_budget_is_enforced(pair7):
    a, _ = pair7
    with pytest.raises(BudgetExceeded):
        count_locus(a, "Z", 3, budget=Budget(1000))


def test_results_do_not_depend_on_workers():
    p = make_pencil(F7, 2, 5)
    for k in (1, 2):
        one = count_pencil(p, k, workers=1)
        four = count_pencil(p, k, workers=4)
        assert one.count == four.count and one.extra == four.extra


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_scissor_additivity_random_cubic(s1, s2):
    # {f = 0} = {f = 0, g = 0} + {f = 0, g != 0}, checked by brute force
    f = poly_random_form(3, X_BLOCK, F5, s1)
    g = poly_random_form(1, X_BLOCK, F5, s2)
    both = count_projective([f, g], F5).count
    off = 0
    for x in itertools.product(range(5), repeat=4):
        if any(x) and next(v for v in x if v) == 1:
            if f.eval_codes(x) == 0 and g.eval_codes(x) != 0:
                off += 1
    assert count_projective([f], F5).count == both + off
