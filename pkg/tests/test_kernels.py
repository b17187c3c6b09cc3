import itertools

import numpy as np
import pytest

from cutpaste.budget import Budget, BudgetExceeded
from cutpaste.field import field_create
from cutpaste.kernels import (
    ScanCapExceeded,
    projective_points,
    projective_size,
    scan_count,
    scan_dependent_gradients,
    scan_pair_histogram,
    scan_points,
)
from cutpaste.poly import MPoly, X_BLOCK, poly_partial, poly_random_form

F5, F7 = field_create(5), field_create(7)


def _normalized(Q, n):
    for x in itertools.product(range(Q), repeat=n + 1):
        if any(x) and next(v for v in x if v) == 1:
            yield x


def _fermat(fld):
    x = [MPoly.var(fld, 4, i) for i in range(4)]
    return x[0] ** 3 + x[1] ** 3 + x[2] ** 3 + x[3] ** 3


def test_projective_points_are_the_normalized_points():
    for Q, n in [(5, 1), (5, 3), (7, 2)]:
        pts = projective_points(Q, n)
        assert len(pts) == projective_size(Q, n) == (Q ** (n + 1) - 1) // (Q - 1)
        assert sorted(map(tuple, pts.tolist())) == sorted(_normalized(Q, n))


def test_fermat_regression():
    # frozen after the first brute-force run
    assert scan_count(F7, [_fermat(F7)]) == 99
    assert 99 % 7 == 1


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_scan_count_matches_brute_force(seed):
    f = poly_random_form(3, X_BLOCK, F5, seed)
    g = poly_random_form(2, X_BLOCK, F5, seed + 10)
    brute_f = sum(1 for x in _normalized(5, 3) if f.eval_codes(x) == 0)
    brute_fg = sum(1 for x in _normalized(5, 3) if f.eval_codes(x) == 0 and g.eval_codes(x) == 0)
    assert scan_count(F5, [f]) == brute_f
    assert scan_count(F5, [f, g]) == brute_fg
    pts = scan_points(F5, [f, g])
    assert len(pts) == brute_fg
    assert all(f.eval_codes(p) == 0 == g.eval_codes(p) for p in pts.tolist())


def test_extension_scan_matches_brute_force():
    E = field_create(5, 2)
    f = poly_random_form(3, (0, 1, 2), field_create(5), 4, nvars=3).over(E)
    brute = sum(1 for x in _normalized(25, 2) if f.eval_codes(x) == 0)
    assert scan_count(E, [f]) == brute


def test_histogram_matches_brute_force():
    f = poly_random_form(3, X_BLOCK, F5, 7)
    g = poly_random_form(3, X_BLOCK, F5, 8)
    H = scan_pair_histogram(F5, f, g)
    B = np.zeros((5, 5), dtype=np.int64)
    for x in _normalized(5, 3):
        B[f.eval_codes(x), g.eval_codes(x)] += 1
    assert (H == B).all()
    assert H.sum() == projective_size(5, 3)


def test_dependent_gradients():
    f = poly_random_form(3, X_BLOCK, F5, 1)
    g = poly_random_form(3, X_BLOCK, F5, 2)
    ga = [poly_partial(f, i) for i in range(4)]
    gb = [poly_partial(g, i) for i in range(4)]
    got = set(map(tuple, scan_dependent_gradients(F5, ga, gb).tolist()))
    want = set()
    for x in _normalized(5, 3):
        u = [d.eval_codes(x) for d in ga]
        v = [d.eval_codes(x) for d in gb]
        if all(F5.mul(u[i], v[j]) == F5.mul(u[j], v[i]) for i in range(4) for j in range(i + 1, 4)):
            want.add(x)
    assert got == want


def test_results_do_not_depend_on_workers():
    E = field_create(7, 2)
    f = poly_random_form(3, X_BLOCK, F7, 1).over(E)
    g = poly_random_form(3, X_BLOCK, F7, 2).over(E)
    h1 = scan_pair_histogram(E, f, g, workers=1)
    for w in (2, 3, 8):
        assert (scan_pair_histogram(E, f, g, workers=w) == h1).all()
        assert scan_count(E, [f, g], workers=w) == scan_count(E, [f, g], workers=1)
    p1 = scan_points(E, [f, g], workers=1)
    p4 = scan_points(E, [f, g], workers=4)
    assert sorted(map(tuple, p1.tolist())) == sorted(map(tuple, p4.tolist()))


def test_cap_and_budget():
    zero_ish = MPoly.var(F7, 4, 0)
    with pytest.raises(ScanCapExceeded):
        scan_points(F7, [zero_ish], cap=3)
    assert len(scan_points(F7, [zero_ish], cap=3, truncate=True)) <= 3 * 4
    b = Budget(100)
    with pytest.raises(BudgetExceeded):
        scan_count(F7, [zero_ish], budget=b)
    b = Budget(10**6)
    scan_count(F7, [zero_ish, zero_ish], budget=b)
    assert b.used == 2 * projective_size(7, 3)
