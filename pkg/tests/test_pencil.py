import itertools

import numpy as np
import pytest

from cutpaste.count import count_projective
from cutpaste.field import field_create
from cutpaste.pencil import (
    CertificationError,
    Pencil,
    PencilError,
    PhiDomainError,
    UniversalFamily,
    certify_pencil,
    check_smooth,
    make_nodal_cubic,
    make_pencil,
    make_split_nodal_cubic,
    phi_forward,
    phi_inverse,
    phi_roundtrip_harness,
    universal_linear_iso,
    x0_points,
)
from cutpaste.poly import MPoly, X_BLOCK, poly_partial, poly_random_form

F5, F7 = field_create(5), field_create(7)


@pytest.fixture(scope="module")
def pair7():
    a = make_pencil(F7, 3, 1)
    return a, make_pencil(F7, 3, 2, shared=a)


def _brute_singular(F, fld):
    grads = [poly_partial(F, i) for i in range(4)]
    out = []
    for x in itertools.product(range(fld.order), repeat=4):
        if any(x) and next(v for v in x if v) == 1:
            if F.eval_codes(x) == 0 and all(g.eval_codes(x) == 0 for g in grads):
                out.append(x)
    return out


def test_nodal_cubic_has_one_ordinary_node():
    n = make_nodal_cubic(F5, 3)
    assert all(c.passed for c in n.certificates.values())
    assert _brute_singular(n.F, F5) == [(0, 0, 0, 1)]
    assert n.F.eval_codes(n.node) == 0


@pytest.mark.parametrize("q", [5, 7, 11])
def test_split_nodal_cubic_count(q):
    n = make_split_nodal_cubic(field_create(q), 1)
    assert count_projective([n.F], field_create(q)).count == q * q + 6 * q + 1


def test_make_pencil_is_deterministic_and_certified(pair7):
    a, b = pair7
    again = make_pencil(F7, 3, 1)
    assert again.G == a.G and again.alpha == a.alpha and again.beta == a.beta
    assert a.shares_cubics(b) and (a.alpha, a.beta) != (b.alpha, b.beta)
    for p in (a, b):
        assert all(c.passed for c in p.certificates.values())
        assert set(p.certificates) == {
            "p_not_dividing_m", "G_smooth", "total_space_smooth", "fiber_inf_smooth", "singular_fibers_one_point",
        }


def test_pencil_rejects_bad_parameters():
    with pytest.raises(PencilError):
        make_pencil(F7, 7, 1)
    with pytest.raises(PencilError):
        make_pencil(field_create(7, 2), 1, 1)
    with pytest.raises(PencilError):
        make_pencil(F7, 0, 1)


def test_pencil_json_roundtrip(pair7):
    a, _ = pair7
    b = Pencil.from_json(a.to_json())
    assert b.G == a.G and b.F == a.F and b.alpha == a.alpha and b.beta == a.beta
    assert b.certificates.keys() == a.certificates.keys()


def test_equation_bigrading(pair7):
    E = pair7[0].equation()
    assert E.grading == ((X_BLOCK, 3), ((4, 5), 3))


def test_common_root_is_rejected():
    # alpha and beta vanish together at t = [1:2]: the fiber there is all of P^3
    base = make_pencil(F7, 1, 4)
    x = [MPoly.var(F7, 2, i) for i in range(2)]
    root = x[1] - x[0] * 2
    alpha, beta = root * 3, root * 5
    certs = certify_pencil(base.G, base.F, alpha, beta, 1, 1)
    assert not certs["total_space_smooth"].passed
    assert certs["total_space_smooth"].witness is not None


def test_certification_error_when_nothing_passes():
    with pytest.raises(CertificationError):
        make_nodal_cubic(F7, 1, max_retries=0)


def test_check_smooth_routes(pair7):
    a, _ = pair7
    res = check_smooth(a.equation(), F7, K_sing=1)
    assert res.smooth and res.route == "pencil"
    node = check_smooth(a.F, F7, K_sing=1)
    assert not node.smooth and node.witness == ((0, 0, 0, 1),)
    g = check_smooth(a.G, F7, K_sing=1)
    assert g.smooth


def test_check_smooth_generic_route_agrees_with_brute_force():
    # a random (3,1) form is not of pencil shape once it mixes four cubics
    E = poly_random_form(3, X_BLOCK, F5, 9, nvars=6) * MPoly.var(F5, 6, 4)
    E = E + poly_random_form(3, X_BLOCK, F5, 10, nvars=6) * MPoly.var(F5, 6, 5)
    E = E.with_grading(((X_BLOCK, 3), ((4, 5), 1)))
    res = check_smooth(E, F5, K_sing=1)
    grads = [poly_partial(E, i) for i in range(6)]
    brute = []
    for t in ([1, c] for c in range(5)):
        for x in itertools.product(range(5), repeat=4):
            if any(x) and next(v for v in x if v) == 1:
                pt = list(x) + t
                if all(g.eval_codes(pt) == 0 for g in grads):
                    brute.append(pt)
    for x in itertools.product(range(5), repeat=4):
        if any(x) and next(v for v in x if v) == 1:
            pt = list(x) + [0, 1]
            if all(g.eval_codes(pt) == 0 for g in grads):
                brute.append(pt)
    assert res.smooth == (not brute)


def test_tautological_restriction(pair7):
    a, _ = pair7
    assert UniversalFamily.of(a).tautological_restriction() == a.equation()


def test_phi_roundtrip_exhaustive_small():
    p = make_pencil(F5, 2, 3)
    xs, ts = x0_points(p)
    chart = UniversalFamily.of(p).chart_equation()
    rng = np.random.default_rng(1)
    seen = 0
    for i in range(len(xs)):
        x, t = xs[i].tolist(), int(ts[i])
        y, lam = rng.integers(0, 5, size=2).tolist(), int(rng.integers(5))
        try:
            out = phi_forward(p, x, t, y, lam)
        except PhiDomainError:
            assert p.F.eval_codes(x) == 0
            continue
        img = [v.code for v in out[0]] + [v.code for v in out[1]] + [out[2].code]
        assert chart.eval_codes(img) == 0
        try:
            xb, tb, yb, lb = phi_inverse(p, *out)
        except PhiDomainError:
            continue
        assert ([v.code for v in xb], tb.code, [v.code for v in yb], lb.code) == (x, t, y, lam)
        seen += 1
    assert seen > 0


def test_phi_rejects_points_off_x0(pair7):
    a, _ = pair7
    x = [1, 0, 0, 0]
    t = next(c for c in range(7) if a.alpha.eval_codes([1, c]) * a.G.eval_codes(x)
             + a.beta.eval_codes([1, c]) * a.F.eval_codes(x) != 0)
    with pytest.raises(PhiDomainError):
        phi_forward(a, x, t, [0, 0, 0], 0)


def test_phi_over_extension(pair7):
    a, _ = pair7
    st = phi_roundtrip_harness(a, 300, 5, field_create(7, 2))
    assert st["roundtrips_ok"] == st["valid"] == st["images_on_chart"] == 300


def test_harness_is_seeded(pair7):
    a, _ = pair7
    assert phi_roundtrip_harness(a, 200, 3) == phi_roundtrip_harness(a, 200, 3)


def test_universal_linear_iso(pair7):
    a, b = pair7
    iso = universal_linear_iso(a, b)
    assert iso.identity_holds and iso.is_invertible()
    same = universal_linear_iso(a, a)
    assert [list(r) for r in same.matrix] == [[int(i == j) for j in range(3)] for i in range(3)]
    assert set(same.shift) == {0} and set(same.offset) == {0}
    # pointwise check of the substitution on random chart points
    Ua = UniversalFamily.of(a).chart_equation()
    Ub = UniversalFamily.of(b).chart_equation()
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = rng.integers(0, 7, 4).tolist()
        y = rng.integers(0, 7, 3).tolist()
        lam = int(rng.integers(7))
        ty, tl = iso.apply(y, lam)
        assert Ua.eval_codes(x + ty + [tl]) == Ub.eval_codes(x + y + [lam])


def test_iso_needs_shared_cubics(pair7):
    a, _ = pair7
    other = make_pencil(F7, 3, 9)
    with pytest.raises(PencilError):
        universal_linear_iso(a, other)
