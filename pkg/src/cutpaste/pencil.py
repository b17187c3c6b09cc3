"""Pencils of cubic surfaces ``alpha(t) G(x) + beta(t) F(x) = 0`` in P^3 x P^1.

``G`` is a random smooth cubic, ``F`` a cubic with a single ordinary double
point, placed at ``[0:0:0:1]`` by writing ``F = x3 Q(x0,x1,x2) + C(x0,x1,x2)``.
"Generic" choices are replaced by seeded rejection sampling against explicit
certificates, checked over F_{q^k} for ``k <= K_sing``.

Most certificates reduce to one finite set: the points ``x`` of P^3 where
``grad G(x)`` and ``grad F(x)`` are linearly dependent. A member
``a G + b F`` is singular at ``x`` exactly when ``a grad G + b grad F``
vanishes there (the member itself then vanishes by Euler's relation since
``p != 3``), so every singular point of every member lies in that set, and
the set does not depend on ``alpha``, ``beta``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .budget import Budget
from .field import Field, FieldElem, field_create
from .kernels import projective_points, projective_size, scan_dependent_gradients, scan_points
from .poly import MPoly, X_BLOCK, monomials, poly_random_form, seeded_rng

log = logging.getLogger(__name__)

__all__ = [
    "K_SING_DEFAULT",
    "MAX_RETRIES",
    "CertificationError",
    "Certificate",
    "GradientLocus",
    "LinearIso",
    "NodalCubic",
    "Pencil",
    "PencilError",
    "PhiDomainError",
    "SmoothCheck",
    "UniversalFamily",
    "binary_coeffs",
    "check_smooth",
    "gradient_locus",
    "make_nodal_cubic",
    "make_split_nodal_cubic",
    "make_pencil",
    "pencil_map",
    "phi_forward",
    "phi_inverse",
    "phi_roundtrip_harness",
    "universal_linear_iso",
    "x0_points",
]

K_SING_DEFAULT = 2
MAX_RETRIES = 32

# purpose tags of the seed splitting scheme (see poly.seeded_rng)
_SEED_NODAL = 1
_SEED_PENCIL = 2


class PencilError(ValueError):
    pass


class CertificationError(RuntimeError):
    def __init__(self, msg, certificates=None):
        super().__init__(msg)
        self.certificates = certificates or {}


class PhiDomainError(ValueError):
    """Point outside the domain where the map (or its inverse) is defined."""


@dataclass(frozen=True)
class Certificate:
    name: str
    passed: bool
    depth: int = 0
    witness: tuple | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "depth": self.depth,
            "witness": None if self.witness is None else [list(map(int, w)) for w in self.witness],
            "detail": self.detail,
        }


# -- small linear algebra over a field ----------------------------------------


def _rank(rows: list[list[int]], f: Field) -> int:
    rows = [list(r) for r in rows]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = f.inv(rows[rank][col])
        rows[rank] = [f.mul(v, inv) for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                c = rows[i][col]
                rows[i] = [f.sub(a, f.mul(c, b)) for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _normalize_point(pt: Sequence[int], f: Field) -> tuple[int, ...]:
    lead = next(v for v in pt if v)
    inv = f.inv(lead)
    return tuple(f.mul(v, inv) for v in pt)


def ratio_code(a: int, b: int, f: Field) -> int:
    """Code of ``[a:b]`` in P^1: ``b/a`` if ``a != 0``, ``Q`` for ``[0:1]``, ``-1`` for ``(0,0)``."""
    if a:
        return f.div(b, a)
    return f.order if b else -1


# -- binary forms -------------------------------------------------------------


def binary_coeffs(form: MPoly, m: int) -> list[int]:
    """``[c_0, ..., c_m]`` with ``form = sum c_i t0^(m-i) t1^i``."""
    return [form.terms.get((m - i, i), 0) for i in range(m + 1)]


def _binary_form(fld: Field, coeffs: Sequence[int]) -> MPoly:
    m = len(coeffs) - 1
    return MPoly(fld, 2, {(m - i, i): c for i, c in enumerate(coeffs)}, (((0, 1), m),))


def pencil_map(alpha: MPoly, beta: MPoly, ext: Field):
    """Values of ``(alpha, beta)`` on P^1(ext) in cell order: ``(1, c)`` for c in ext, then ``(0, 1)``.

    Returns ``(tpts, avals, bvals, ratios)``.
    """
    tpts = projective_points(ext.order, 1)
    a = alpha.over(ext).eval_many(tpts)
    b = beta.over(ext).eval_many(tpts)
    ratios = np.array([ratio_code(int(x), int(y), ext) for x, y in zip(a, b)], dtype=np.int64)
    return tpts, a, b, ratios


# -- gradient dependency locus --------------------------------------------------


@dataclass(frozen=True)
class GradientLocus:
    """Points of P^3(ext) where grad G and grad F are dependent.

    ``ratios[i]`` is the :func:`ratio_code` of the unique member ``[a:b]``
    singular at ``points[i]`` (``-1`` when both gradients vanish, i.e. the
    point is singular on every member).
    """

    ext: Field
    points: np.ndarray
    ratios: np.ndarray
    grad_g_zero: np.ndarray
    grad_f_zero: np.ndarray

    def singular_ratios(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, r in enumerate(self.ratios.tolist()):
            out.setdefault(r, []).append(i)
        return out


_LOCUS_CACHE: dict[tuple, GradientLocus] = {}


def _gradient(f: MPoly) -> list[MPoly]:
    return [f.partial(i) for i in range(f.nvars)]


def gradient_locus(G: MPoly, F: MPoly, ext: Field, workers: int = 1, budget: Budget | None = None) -> GradientLocus:
    key = (G, F, ext)
    hit = _LOCUS_CACHE.get(key)
    if hit is not None:
        if budget is not None:
            # charged like a fresh scan so that budget use is reproducible
            budget.charge(8 * projective_size(ext.order, 3), "gradient locus (cached)")
        return hit
    gg, gf = _gradient(G), _gradient(F)
    pts = scan_dependent_gradients(ext, gg, gf, workers=workers, budget=budget)
    ratios, gz, fz = [], [], []
    for pt in pts.tolist():
        gv = [d.over(ext).eval_codes(pt) for d in gg]
        fv = [d.over(ext).eval_codes(pt) for d in gf]
        gz.append(not any(gv))
        fz.append(not any(fv))
        r = -1
        for gi, fi in zip(gv, fv):
            if gi or fi:
                # a*gi + b*fi = 0  =>  [a:b] = [fi : -gi]
                r = ratio_code(fi, ext.neg(gi), ext)
                break
        ratios.append(r)
    loc = GradientLocus(
        ext, pts, np.array(ratios, dtype=np.int64), np.array(gz, dtype=bool), np.array(fz, dtype=bool)
    )
    _LOCUS_CACHE[key] = loc
    return loc


# -- nodal cubic ----------------------------------------------------------------


@dataclass(frozen=True)
class NodalCubic:
    F: MPoly
    quadratic: MPoly
    cubic: MPoly
    node: tuple[int, int, int, int]
    seed: int
    certificates: dict = dc_field(default_factory=dict)

    @property
    def field(self) -> Field:
        return self.F.field


def _quadratic_rank(Qf: MPoly) -> int:
    f = Qf.field
    half = f.inv(2)
    M = [[0] * 3 for _ in range(3)]
    for e, c in Qf.terms.items():
        idx = [i for i in range(3) for _ in range(e[i])]
        i, j = idx
        if i == j:
            M[i][i] = c
        else:
            M[i][j] = M[j][i] = f.mul(c, half)
    return _rank(M, f)


def _nodal_certificates(F: MPoly, Qf: MPoly, K_sing: int, workers=1, budget=None) -> dict[str, Certificate]:
    fld = F.field
    node = (0, 0, 0, 1)
    certs = {}
    grad = _gradient(F)
    at_node = [F.eval_codes(node)] + [d.eval_codes(node) for d in grad]
    certs["node_singular"] = Certificate("node_singular", not any(at_node), detail="F and grad F vanish at [0:0:0:1]")
    rk = _quadratic_rank(Qf)
    certs["node_ordinary"] = Certificate("node_ordinary", rk == 3, detail=f"rank of tangent cone quadric = {rk}")
    if rk != 3:
        return certs
    for k in range(1, K_sing + 1):
        ext = field_create(fld.p, k)
        sing = scan_points(ext, grad, workers=workers, budget=budget, cap=1000)
        others = [tuple(p) for p in sing.tolist() if tuple(p) != node]
        if others:
            certs["unique_singular_point"] = Certificate(
                "unique_singular_point", False, k, (others[0],), f"extra singular point over F_{ext.order}"
            )
            return certs
    certs["unique_singular_point"] = Certificate("unique_singular_point", True, K_sing, detail="only the node")
    return certs


def make_nodal_cubic(
    field: Field, seed: int, K_sing: int = K_SING_DEFAULT, max_retries: int = MAX_RETRIES,
    workers: int = 1, budget: Budget | None = None,
) -> NodalCubic:
    """Seeded cubic ``x3 Q + C`` with an ordinary double point at ``[0:0:0:1]`` and no other singularity."""
    if field.k != 1:
        raise PencilError("cubics are drawn over a prime field")
    certs: dict = {}
    for attempt in range(max_retries):
        rng = seeded_rng(seed, _SEED_NODAL, attempt)
        Qf = poly_random_form(2, (0, 1, 2), field, rng, nvars=4)
        Cf = poly_random_form(3, (0, 1, 2), field, rng, nvars=4)
        F = (MPoly.var(field, 4, 3) * Qf + Cf).with_grading(((X_BLOCK, 3),))
        certs = _nodal_certificates(F, Qf, K_sing, workers, budget)
        if all(c.passed for c in certs.values()):
            return NodalCubic(F, Qf, Cf, (0, 0, 0, 1), seed, certs)
        log.debug("nodal cubic attempt %d rejected: %s", attempt, [c.name for c in certs.values() if not c.passed])
    raise CertificationError(f"no certified nodal cubic over F_{field.p} after {max_retries} attempts", certs)


def make_split_nodal_cubic(
    field: Field, seed: int, K_sing: int = K_SING_DEFAULT, max_retries: int = MAX_RETRIES,
    workers: int = 1, budget: Budget | None = None,
) -> NodalCubic:
    """Nodal cubic ``x3 Q + C`` whose six lines through the node are all rational.

    ``Q = x0 x2 - x1^2`` is parametrized by ``[s:t] -> [s^2 : st : t^2]``; ``C``
    restricts to the sextic with six distinct rational roots drawn from
    P^1(F_p), plus a random multiple of ``Q``.
    """
    if field.k != 1:
        raise PencilError("cubics are drawn over a prime field")
    p = field.p
    x = [MPoly.var(field, 4, i) for i in range(4)]
    Qf = x[0] * x[2] - x[1] * x[1]
    # s^a t^(6-a) lifted to a cubic monomial in x0 = s^2, x1 = st, x2 = t^2
    lift = {6: x[0] ** 3, 5: x[0] ** 2 * x[1], 4: x[0] ** 2 * x[2], 3: x[0] * x[1] * x[2],
            2: x[0] * x[2] ** 2, 1: x[1] * x[2] ** 2, 0: x[2] ** 3}
    line = projective_points(p, 1).tolist()
    certs: dict = {}
    for attempt in range(max_retries):
        rng = seeded_rng(seed, _SEED_NODAL, 1000 + attempt)
        roots = [line[i] for i in rng.choice(len(line), size=6, replace=False)]
        sextic = [1]  # coefficients of s^0..s^6 after expanding prod (r1 s - r0 t)
        for r0, r1 in roots:
            nxt = [0] * (len(sextic) + 1)
            for a, c in enumerate(sextic):
                nxt[a + 1] = (nxt[a + 1] + c * r1) % p
                nxt[a] = (nxt[a] - c * r0) % p
            sextic = nxt
        Cf = MPoly.zero(field, 4)
        for a, c in enumerate(sextic):
            if c:
                Cf = Cf + lift[a] * FieldElem(field, c)
        lin = poly_random_form(1, (0, 1, 2), field, rng, nvars=4)
        Cf = Cf + Qf * lin
        F = (x[3] * Qf + Cf).with_grading(((X_BLOCK, 3),))
        certs = _nodal_certificates(F, Qf, K_sing, workers, budget)
        if all(c.passed for c in certs.values()):
            return NodalCubic(F, Qf, Cf, (0, 0, 0, 1), seed, certs)
    raise CertificationError(f"no certified split nodal cubic over F_{p} after {max_retries} attempts", certs)


# -- pencil -------------------------------------------------------------------


@dataclass(frozen=True)
class Pencil:
    field: Field
    m: int
    seed: int
    G: MPoly
    F: MPoly
    alpha: MPoly
    beta: MPoly
    K_sing: int = K_SING_DEFAULT
    certificates: dict = dc_field(default_factory=dict)
    node: tuple = (0, 0, 0, 1)

    @property
    def q(self) -> int:
        return self.field.order

    @property
    def alpha_coeffs(self) -> list[int]:
        return binary_coeffs(self.alpha, self.m)

    @property
    def beta_coeffs(self) -> list[int]:
        return binary_coeffs(self.beta, self.m)

    def equation(self) -> MPoly:
        """The bidegree (3, m) form in ``(x0..x3, t0, t1)``."""
        xs = list(X_BLOCK)
        G6, F6 = self.G.embed(6, xs), self.F.embed(6, xs)
        a6, b6 = self.alpha.embed(6, [4, 5]), self.beta.embed(6, [4, 5])
        return (a6 * G6 + b6 * F6).with_grading(((X_BLOCK, 3), ((4, 5), self.m)))

    def shares_cubics(self, other: "Pencil") -> bool:
        return self.field == other.field and self.G == other.G and self.F == other.F

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "m": self.m,
            "seed": self.seed,
            "K_sing": self.K_sing,
            "G": self.G.to_json(),
            "F": self.F.to_json(),
            "alpha": self.alpha.to_json(),
            "beta": self.beta.to_json(),
            "node": list(self.node),
            "certificates": {k: c.to_json() for k, c in self.certificates.items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "Pencil":
        fd = data["field"]
        fld = field_create(fd["p"], fd["k"])
        m = int(data["m"])
        certs = {
            k: Certificate(
                c["name"], c["passed"], c.get("depth", 0),
                None if c.get("witness") is None else tuple(tuple(w) for w in c["witness"]), c.get("detail", ""),
            )
            for k, c in data.get("certificates", {}).items()
        }
        return cls(
            field=fld,
            m=m,
            seed=int(data["seed"]),
            G=MPoly.from_json(fld, 4, data["G"]),
            F=MPoly.from_json(fld, 4, data["F"]),
            alpha=MPoly.from_json(fld, 2, data["alpha"]),
            beta=MPoly.from_json(fld, 2, data["beta"]),
            K_sing=int(data.get("K_sing", K_SING_DEFAULT)),
            certificates=certs,
            node=tuple(data.get("node", (0, 0, 0, 1))),
        )


def _pencil_singular_points(G, F, alpha, beta, m, ext, workers=1, budget=None) -> list[tuple]:
    """Singular points ``(x, t)`` of ``alpha G + beta F = 0`` over ``ext``, sorted."""
    loc = gradient_locus(G, F, ext, workers, budget)
    tpts, avals, bvals, tr = pencil_map(alpha, beta, ext)
    da = [alpha.partial(j).over(ext) for j in range(2)]
    db = [beta.partial(j).over(ext) for j in range(2)]
    Ge, Fe = G.over(ext), F.over(ext)

    def t_partials_vanish(x, t):
        g, f = Ge.eval_codes(x), Fe.eval_codes(x)
        for j in range(2):
            v = ext.add(ext.mul(da[j].eval_codes(t), g), ext.mul(db[j].eval_codes(t), f))
            if v:
                return False
        return True

    out = []
    for x, r in zip(loc.points.tolist(), loc.ratios.tolist()):
        cand = range(len(tpts)) if r == -1 else np.flatnonzero(tr == r)
        for ti in cand:
            t = tpts[ti].tolist()
            if t_partials_vanish(x, t):
                out.append((tuple(x), tuple(t)))
    # t where alpha and beta vanish together: every x is x-critical
    for ti in np.flatnonzero(tr == -1):
        t = tpts[ti].tolist()
        polys = [
            G.over(ext) * FieldElem(ext, da[j].eval_codes(t)) + F.over(ext) * FieldElem(ext, db[j].eval_codes(t))
            for j in range(2)
        ]
        polys = [p for p in polys if not p.is_zero()] or [MPoly.zero(ext, 4)]
        pts = scan_points(ext, polys, workers=workers, budget=budget, cap=1, truncate=True)
        for x in pts.tolist():
            out.append((tuple(x), tuple(t)))
    return sorted(set(out))


def certify_pencil(
    G: MPoly, F: MPoly, alpha: MPoly, beta: MPoly, m: int, K_sing: int, workers: int = 1,
    budget: Budget | None = None,
) -> dict[str, Certificate]:
    fld = G.field
    certs = {"p_not_dividing_m": Certificate("p_not_dividing_m", m % fld.p != 0, detail=f"p={fld.p}, m={m}")}
    checks = {
        "G_smooth": None,
        "total_space_smooth": None,
        "fiber_inf_smooth": None,
        "singular_fibers_one_point": None,
    }
    for k in range(1, K_sing + 1):
        ext = field_create(fld.p, k)
        loc = gradient_locus(G, F, ext, workers, budget)
        if checks["G_smooth"] is None and loc.grad_g_zero.any():
            bad = loc.points[loc.grad_g_zero][0]
            checks["G_smooth"] = Certificate("G_smooth", False, k, (tuple(bad),), "singular point of G")
        if checks["total_space_smooth"] is None:
            sing = _pencil_singular_points(G, F, alpha, beta, m, ext, workers, budget)
            if sing:
                checks["total_space_smooth"] = Certificate(
                    "total_space_smooth", False, k, sing[0], "all six partials vanish"
                )
        _, avals, bvals, tr = pencil_map(alpha, beta, ext)
        groups = loc.singular_ratios()
        if checks["fiber_inf_smooth"] is None:
            r_inf = int(tr[-1])
            if r_inf == -1 or r_inf in groups or -1 in groups:
                checks["fiber_inf_smooth"] = Certificate("fiber_inf_smooth", False, k, detail="fiber over [0:1] is singular")
        if checks["singular_fibers_one_point"] is None:
            for r in set(tr.tolist()):
                if r in groups and len(groups[r]) > 1:
                    pts = tuple(tuple(loc.points[i]) for i in groups[r])
                    checks["singular_fibers_one_point"] = Certificate(
                        "singular_fibers_one_point", False, k, pts, "fiber with several singular points"
                    )
                    break
    for name, c in checks.items():
        certs[name] = c if c is not None else Certificate(name, True, K_sing)
    return certs


def make_pencil(
    field: Field,
    m: int,
    seed: int,
    shared: Pencil | None = None,
    K_sing: int = K_SING_DEFAULT,
    max_retries: int = MAX_RETRIES,
    workers: int = 1,
    budget: Budget | None = None,
) -> Pencil:
    """Draw and certify a pencil of bidegree (3, m) over the prime field ``field``.

    With ``shared`` the cubics ``G, F`` are reused and only ``alpha, beta``
    are redrawn; this is how the second pencil of a pair is built.
    """
    if field.k != 1:
        raise PencilError("pencils are drawn over a prime field")
    if m < 1:
        raise PencilError("m must be >= 1")
    if m % field.p == 0:
        raise PencilError(f"p={field.p} divides m={m}")
    if shared is not None:
        if shared.field != field:
            raise PencilError("shared pencil lives over a different field")
        F = shared.F
    else:
        F = make_nodal_cubic(field, seed, K_sing, max_retries, workers, budget).F
    certs: dict = {}
    for attempt in range(max_retries):
        rng = seeded_rng(seed, _SEED_PENCIL, attempt)
        G = shared.G if shared is not None else poly_random_form(3, X_BLOCK, field, rng, nvars=4)
        alpha = poly_random_form(m, (0, 1), field, rng, nvars=2)
        beta = poly_random_form(m, (0, 1), field, rng, nvars=2)
        certs = certify_pencil(G, F, alpha, beta, m, K_sing, workers, budget)
        if all(c.passed for c in certs.values()):
            return Pencil(field, m, seed, G, F, alpha, beta, K_sing, certs)
        log.debug("pencil attempt %d rejected: %s", attempt, [c.name for c in certs.values() if not c.passed])
    raise CertificationError(
        f"no certified pencil (q={field.p}, m={m}, seed={seed}) after {max_retries} attempts", certs
    )


# -- generic smoothness check ---------------------------------------------------


@dataclass(frozen=True)
class SmoothCheck:
    smooth: bool
    witness: tuple | None
    q: int
    K_sing: int
    degree_found: int | None = None
    route: str = ""

    def to_json(self) -> dict:
        return {
            "smooth": self.smooth,
            "witness": None if self.witness is None else [list(w) for w in self.witness],
            "q": self.q,
            "K_sing": self.K_sing,
            "degree_found": self.degree_found,
            "route": self.route,
        }


def _split_by_t(E: MPoly, m: int) -> dict[tuple[int, int], MPoly]:
    parts: dict[tuple[int, int], dict] = {}
    for e, c in E.terms.items():
        parts.setdefault((e[4], e[5]), {})[e[:4]] = c
    return {k: MPoly(E.field, 4, v) for k, v in parts.items()}


def _span_basis(polys: list[MPoly]):
    """Basis (at most 2 elements kept) and coordinates of each poly in it, or None if rank > 2."""
    fld = polys[0].field
    monos = monomials(4, X_BLOCK, 3)
    vecs = [[p.terms.get(e, 0) for e in monos] for p in polys]
    basis: list[int] = []
    for i, v in enumerate(vecs):
        if _rank([vecs[j] for j in basis] + [v], fld) > len(basis):
            basis.append(i)
        if len(basis) > 2:
            return None
    coords = []
    for v in vecs:
        # solve v = u*b0 + w*b1 by trying a column where the 2x2 system is invertible
        if len(basis) == 1:
            b0 = vecs[basis[0]]
            col = next(c for c, x in enumerate(b0) if x)
            coords.append((fld.div(v[col], b0[col]), 0))
            continue
        b0, b1 = vecs[basis[0]], vecs[basis[1]]
        sol = None
        for c1 in range(len(monos)):
            for c2 in range(c1 + 1, len(monos)):
                det = fld.sub(fld.mul(b0[c1], b1[c2]), fld.mul(b0[c2], b1[c1]))
                if det:
                    u = fld.div(fld.sub(fld.mul(v[c1], b1[c2]), fld.mul(v[c2], b1[c1])), det)
                    w = fld.div(fld.sub(fld.mul(b0[c1], v[c2]), fld.mul(b0[c2], v[c1])), det)
                    sol = (u, w)
                    break
            if sol:
                break
        coords.append(sol)
    return [polys[i] for i in basis], coords


def check_smooth(equation: MPoly, field: Field, K_sing: int = K_SING_DEFAULT, workers: int = 1,
                 budget: Budget | None = None) -> SmoothCheck:
    """Search for a singular point of a hypersurface over F_{q^k}, ``k <= K_sing``.

    ``equation`` is either a form in ``(x0..x3)`` (a surface in P^3) or a
    bihomogeneous form in ``(x0..x3, t0, t1)`` (a hypersurface in P^3 x P^1).
    Returns the lexicographically smallest witness over the smallest field
    where one exists.
    """
    fld = field
    if equation.nvars == 4:
        for k in range(1, K_sing + 1):
            ext = field_create(fld.p, k)
            pts = scan_points(ext, _gradient(equation), workers=workers, budget=budget, cap=1000)
            if len(pts):
                return SmoothCheck(False, (min(map(tuple, pts.tolist())),), fld.order, K_sing, k, "surface")
        return SmoothCheck(True, None, fld.order, K_sing, None, "surface")
    if equation.nvars != 6:
        raise ValueError("expected 4 (P^3) or 6 (P^3 x P^1) variables")
    m = equation.degree((4, 5))
    parts = _split_by_t(equation, m)
    keys = sorted(parts)
    split = _span_basis([parts[k] for k in keys])
    for k in range(1, K_sing + 1):
        ext = field_create(fld.p, k)
        if split is not None and len(split[0]) == 2:
            (P, R), coords = split
            a = _binary_form(fld, [_coef_at(keys, coords, m, i, 0) for i in range(m + 1)])
            b = _binary_form(fld, [_coef_at(keys, coords, m, i, 1) for i in range(m + 1)])
            sing = _pencil_singular_points(P, R, a, b, m, ext, workers, budget)
            route = "pencil"
        else:
            sing = _generic_singular_points(equation, parts, m, ext, workers, budget)
            route = "per-fiber"
        if sing:
            return SmoothCheck(False, sing[0], fld.order, K_sing, k, route)
    return SmoothCheck(True, None, fld.order, K_sing, None, "pencil" if split and len(split[0]) == 2 else "per-fiber")


def _coef_at(keys, coords, m, i, which):
    key = (m - i, i)
    if key not in keys:
        return 0
    return coords[keys.index(key)][which]


def _generic_singular_points(E, parts, m, ext, workers, budget):
    tpts = projective_points(ext.order, 1)
    dE = [E.partial(j).over(ext) for j in range(6)]
    out = []
    for t in tpts.tolist():
        tm = {key: ext.mul(ext.pow(t[0], key[0]), ext.pow(t[1], key[1])) for key in parts}
        Et = MPoly.zero(ext, 4)
        for key, P in parts.items():
            Et = Et + P.over(ext) * FieldElem(ext, tm[key])
        # all six partials at (x, t) as forms in x
        polys = _gradient(Et) + [_restrict_t(d, t, ext) for d in dE[4:]]
        polys = [p for p in polys if not p.is_zero()] or [MPoly.zero(ext, 4)]
        for x in scan_points(ext, polys, workers=workers, budget=budget, cap=1, truncate=True).tolist():
            out.append((tuple(x), tuple(t)))
    return sorted(set(out))


def _restrict_t(f: MPoly, t, ext) -> MPoly:
    out: dict = {}
    for e, c in f.terms.items():
        v = ext.mul(c, ext.mul(ext.pow(t[0], e[4]), ext.pow(t[1], e[5])))
        out[e[:4]] = ext.add(out.get(e[:4], 0), v)
    return MPoly(ext, 4, out)


# -- universal family -------------------------------------------------------------


@dataclass(frozen=True)
class UniversalFamily:
    """``L_alpha(y) G(x) + (L_beta(y) + lam) F(x) = 0`` in ``(x0..x3, y0..ym, lam)``."""

    pencil: Pencil
    equation: MPoly

    @classmethod
    def of(cls, pencil: Pencil) -> "UniversalFamily":
        fld, m = pencil.field, pencil.m
        n = 4 + m + 2
        xs = list(X_BLOCK)
        G, F = pencil.G.embed(n, xs), pencil.F.embed(n, xs)
        La = MPoly(fld, n, {_unit(n, 4 + i): c for i, c in enumerate(pencil.alpha_coeffs)})
        Lb = MPoly(fld, n, {_unit(n, 4 + i): c for i, c in enumerate(pencil.beta_coeffs)})
        lam = MPoly.var(fld, n, n - 1)
        return cls(pencil, La * G + (Lb + lam) * F)

    @property
    def nvars(self) -> int:
        return self.equation.nvars

    def chart_equation(self) -> MPoly:
        """Equation on the chart ``y0 = 1``, variables ``(x0..x3, y1..ym, lam)``."""
        m = self.pencil.m
        n = 4 + m + 1
        fld = self.pencil.field
        images = [MPoly.var(fld, n, i) for i in range(4)]
        images.append(MPoly.constant(fld, n, 1))
        images += [MPoly.var(fld, n, 4 + i) for i in range(m)]
        images.append(MPoly.var(fld, n, n - 1))
        return self.equation.substitute(images)

    def tautological_restriction(self) -> MPoly:
        """Substitute ``y_i = t0^(m-i) t1^i``, ``lam = 0``; should give the pencil equation."""
        m, fld = self.pencil.m, self.pencil.field
        images = [MPoly.var(fld, 6, i) for i in range(4)]
        t0, t1 = MPoly.var(fld, 6, 4), MPoly.var(fld, 6, 5)
        images += [t0 ** (m - i) * t1**i for i in range(m + 1)]
        images.append(MPoly.zero(fld, 6))
        return self.equation.substitute(images)


def _unit(n: int, i: int) -> tuple[int, ...]:
    e = [0] * n
    e[i] = 1
    return tuple(e)


# -- the map X0 x A^(m+1) -> (universal chart) x A^1 ------------------------------------


def _affine_forms(pencil: Pencil, ext: Field, y: Sequence[int]) -> tuple[int, int]:
    """``(L_alpha(1, y), L_beta(1, y))`` on the chart ``y0 = 1``."""
    a, b = pencil.alpha_coeffs, pencil.beta_coeffs
    la, lb = a[0], b[0]
    for i, yi in enumerate(y, start=1):
        la = ext.add(la, ext.mul(a[i], yi))
        lb = ext.add(lb, ext.mul(b[i], yi))
    return la, lb


def _code(ext: Field, v) -> int:
    # plain ints are element codes here, not prime-field residues
    if isinstance(v, (int, np.integer)):
        if not 0 <= v < ext.order:
            raise ValueError(f"code {v} out of range for F_{ext.order}")
        return int(v)
    return ext.elem(v).code


def _codes(ext: Field, values) -> list[int]:
    return [_code(ext, v) for v in values]


def phi_forward(pencil: Pencil, x, t, y, lam, field: Field | None = None):
    """Image of ``(x, t, y_1..y_m, lam)`` in ``X0 x A^(m+1)``.

    Returns ``(x, y', lam', t, y_1)`` with ``y'_1 = y_1 + t + lam``,
    ``y'_i = y_i + t^i`` (i >= 2) and
    ``lam' = (-b_1 - a_1 r) lam - L_b(y) + b_0 - r (L_a(y) - a_0)``, where
    ``r = G(x)/F(x)``. The image satisfies the universal equation on the
    chart ``y0 = 1``. Raises :class:`PhiDomainError` if ``F(x) = 0`` or
    ``(x, t)`` is not on ``X0``.
    """
    ext = field or pencil.field
    x, y = _codes(ext, x), _codes(ext, y)
    t, lam = _code(ext, t), _code(ext, lam)
    if len(y) != pencil.m:
        raise ValueError(f"expected {pencil.m} y-coordinates")
    g, f = pencil.G.over(ext).eval_codes(x), pencil.F.over(ext).eval_codes(x)
    at = pencil.alpha.over(ext).eval_codes([1, t])
    bt = pencil.beta.over(ext).eval_codes([1, t])
    if ext.add(ext.mul(at, g), ext.mul(bt, f)) != 0 or (g == 0 and f == 0):
        raise PhiDomainError("(x, t) is not a point of X0")
    if f == 0:
        raise PhiDomainError("F(x) = 0: the map is undefined")
    a, b = pencil.alpha_coeffs, pencil.beta_coeffs
    r = ext.div(g, f)
    yp = [ext.add(ext.add(y[0], t), lam)]
    yp += [ext.add(y[i - 1], ext.pow(t, i)) for i in range(2, pencil.m + 1)]
    la, lb = _affine_forms(pencil, ext, y)
    coef = ext.neg(ext.add(b[1], ext.mul(a[1], r)))
    lamp = ext.add(ext.mul(coef, lam), ext.neg(lb))
    lamp = ext.add(lamp, b[0])
    lamp = ext.sub(lamp, ext.mul(r, ext.sub(la, a[0])))
    E = lambda v: FieldElem(ext, v)  # noqa: E731
    return tuple(map(E, x)), tuple(map(E, yp)), E(lamp), E(t), E(y[0])


def phi_inverse(pencil: Pencil, x, yp, lamp, t, z, field: Field | None = None):
    """Inverse of :func:`phi_forward`: returns ``(x, t, y, lam)``.

    For fixed ``(x, t, y_1)`` the forward map is affine in ``(y_2..y_m, lam)``
    with triangular structure, so ``y_i = y'_i - t^i`` and ``lam`` is solved
    from ``lam'``; this needs ``c = -b_1 - a_1 G(x)/F(x) != 0``. The first
    image coordinate must then equal ``y_1 + t + lam``.
    """
    ext = field or pencil.field
    x, yp = _codes(ext, x), _codes(ext, yp)
    lamp, t, z = _code(ext, lamp), _code(ext, t), _code(ext, z)
    g, f = pencil.G.over(ext).eval_codes(x), pencil.F.over(ext).eval_codes(x)
    if f == 0:
        raise PhiDomainError("F(x) = 0: the inverse is undefined")
    a, b = pencil.alpha_coeffs, pencil.beta_coeffs
    r = ext.div(g, f)
    coef = ext.neg(ext.add(b[1], ext.mul(a[1], r)))
    if coef == 0:
        raise PhiDomainError("degenerate lambda-coefficient -b_1 - a_1 G/F = 0")
    y = [z] + [ext.sub(yp[i - 1], ext.pow(t, i)) for i in range(2, pencil.m + 1)]
    la, lb = _affine_forms(pencil, ext, y)
    rhs = ext.add(lamp, lb)
    rhs = ext.sub(rhs, b[0])
    rhs = ext.add(rhs, ext.mul(r, ext.sub(la, a[0])))
    lam = ext.div(rhs, coef)
    if yp[0] != ext.add(ext.add(z, t), lam):
        raise PhiDomainError("point is not in the image: y'_1 != y_1 + t + lam")
    at = pencil.alpha.over(ext).eval_codes([1, t])
    bt = pencil.beta.over(ext).eval_codes([1, t])
    if ext.add(ext.mul(at, g), ext.mul(bt, f)) != 0:
        raise PhiDomainError("recovered (x, t) is not on X0")
    E = lambda v: FieldElem(ext, v)  # noqa: E731
    return tuple(map(E, x)), E(t), tuple(map(E, y)), E(lam)


# -- affine isomorphism between universal charts ------------------------------------------


@dataclass(frozen=True)
class LinearIso:
    """Affine substitution ``y -> T(y)``, ``lam -> lam + s(y)`` on the chart ``y0 = 1``.

    ``T(y)_i = offset[i] + sum_j matrix[i][j] y_j`` and
    ``s(y) = shift[0] + sum_j shift[j+1] y_j``. Substituting into the first
    pencil's chart equation gives the second pencil's chart equation.
    """

    field: Field
    matrix: tuple[tuple[int, ...], ...]
    offset: tuple[int, ...]
    shift: tuple[int, ...]
    pivot: int
    identity_holds: bool
    transcript: dict

    def apply(self, y: Sequence[int], lam: int) -> tuple[list[int], int]:
        f = self.field
        ty = []
        for i, row in enumerate(self.matrix):
            v = self.offset[i]
            for c, yj in zip(row, y):
                v = f.add(v, f.mul(c, yj))
            ty.append(v)
        s = self.shift[0]
        for c, yj in zip(self.shift[1:], y):
            s = f.add(s, f.mul(c, yj))
        return ty, f.add(lam, s)

    def is_invertible(self) -> bool:
        return _rank([list(r) for r in self.matrix], self.field) == len(self.matrix)

    def to_json(self) -> dict:
        return {
            "matrix": [list(r) for r in self.matrix],
            "offset": list(self.offset),
            "shift": list(self.shift),
            "pivot": self.pivot,
            "identity_holds": self.identity_holds,
            "transcript": self.transcript,
        }


def universal_linear_iso(a: Pencil, b: Pencil) -> LinearIso:
    """Affine change of ``(y_1..y_m, lam)`` carrying the chart of ``a``'s universal family to ``b``'s.

    Picks pivot ``j`` with ``alpha_j != 0`` and index ``k`` with
    ``alpha~_k != 0`` (``k = j`` when possible), swaps ``y_j, y_k`` and solves
    ``L_alpha(T y) = L_alpha~(y)`` for ``T(y)_j``; the lambda shift is
    ``L_beta~(y) - L_beta(T y)``. Verified by exact polynomial substitution.
    """
    if not a.shares_cubics(b) or a.m != b.m:
        raise PencilError("pencils must share G, F and m")
    f, m = a.field, a.m
    al, bl = a.alpha_coeffs, a.beta_coeffs
    at, bt = b.alpha_coeffs, b.beta_coeffs
    j = next((i for i in range(1, m + 1) if al[i]), None)
    k0 = next((i for i in range(1, m + 1) if at[i]), None)
    if j is None or k0 is None:
        raise PencilError("L_alpha is constant on the chart y0 = 1; redraw the pencil")
    k = j if at[j] else k0
    # yhat = y with coordinates j, k swapped (1-based indices into y_1..y_m)
    perm = list(range(m))
    perm[j - 1], perm[k - 1] = perm[k - 1], perm[j - 1]
    matrix = [[0] * m for _ in range(m)]
    offset = [0] * m
    inv_aj = f.inv(al[j])
    for i in range(m):
        if i != j - 1:
            matrix[i][perm[i]] = 1
    # T_j = (at_0 - a_0 + sum_i at_i y_i - sum_{i != j} a_i yhat_i) / a_j
    offset[j - 1] = f.mul(f.sub(at[0], al[0]), inv_aj)
    row = [f.mul(at[i + 1], inv_aj) for i in range(m)]
    for i in range(m):
        if i != j - 1:
            src = perm[i]
            row[src] = f.sub(row[src], f.mul(al[i + 1], inv_aj))
    matrix[j - 1] = row
    # shift s(y) = L_bt(y) - L_b(T y), as an affine form in y
    shift = [f.sub(bt[0], bl[0])] + [bt[i + 1] for i in range(m)]
    for i in range(m):
        shift[0] = f.sub(shift[0], f.mul(bl[i + 1], offset[i]))
        for jj in range(m):
            shift[jj + 1] = f.sub(shift[jj + 1], f.mul(bl[i + 1], matrix[i][jj]))

    Ua = UniversalFamily.of(a).chart_equation()
    Ub = UniversalFamily.of(b).chart_equation()
    n = Ua.nvars
    images = [MPoly.var(f, n, i) for i in range(4)]
    for i in range(m):
        img = MPoly.constant(f, n, FieldElem(f, offset[i]))
        for jj in range(m):
            img = img + MPoly.var(f, n, 4 + jj) * FieldElem(f, matrix[i][jj])
        images.append(img)
    lam_img = MPoly.var(f, n, n - 1) + FieldElem(f, shift[0])
    for jj in range(m):
        lam_img = lam_img + MPoly.var(f, n, 4 + jj) * FieldElem(f, shift[jj + 1])
    images.append(lam_img)
    substituted = Ua.substitute(images)
    holds = substituted == Ub
    transcript = {
        "source_chart_equation": Ua.to_json(),
        "target_chart_equation": Ub.to_json(),
        "substituted": substituted.to_json(),
        "terms_compared": len(Ub.terms),
        "identity_holds": holds,
    }
    iso = LinearIso(f, tuple(map(tuple, matrix)), tuple(offset), tuple(shift), j, holds, transcript)
    if not iso.is_invertible():
        raise PencilError("constructed substitution is not invertible")
    return iso


# -- sampling harness for the map --------------------------------------------------------------


def x0_points(pencil: Pencil, field: Field | None = None) -> tuple[np.ndarray, np.ndarray]:
    """All points ``(x, t)`` of ``X0`` over ``field``: normalized x in P^3 and affine t."""
    ext = field or pencil.field
    xs = projective_points(ext.order, 3)
    g = pencil.G.over(ext).eval_many(xs)
    f = pencil.F.over(ext).eval_many(xs)
    tab = ext.tables()
    ts = np.arange(ext.order)
    at = pencil.alpha.over(ext).eval_many(np.stack([np.ones_like(ts), ts], axis=1))
    bt = pencil.beta.over(ext).eval_many(np.stack([np.ones_like(ts), ts], axis=1))
    off_z = ~((g == 0) & (f == 0))
    xi, ti = [], []
    for j in range(len(ts)):
        hit = np.flatnonzero((tab.add[tab.mul[at[j], g], tab.mul[bt[j], f]] == 0) & off_z)
        xi.append(hit)
        ti.append(np.full(len(hit), j))
    xi, ti = np.concatenate(xi), np.concatenate(ti)
    return xs[xi], ts[ti]


def phi_roundtrip_harness(pencil: Pencil, samples: int, seed: int, field: Field | None = None) -> dict:
    """Round-trip ``samples`` uniformly drawn valid points of ``X0 x A^(m+1)``.

    Draws that hit ``F(x) = 0`` or a vanishing lambda-coefficient are
    skipped and counted. Returns counts of draws, skips by reason, exact
    round trips and images satisfying the universal chart equation.
    """
    ext = field or pencil.field
    xs, ts = x0_points(pencil, ext)
    if not len(xs):
        raise PencilError("X0 has no rational points")
    rng = seeded_rng(seed, 3, pencil.seed)
    chart = UniversalFamily.of(pencil).chart_equation().over(ext)
    stats = {"draws": 0, "skipped_F_zero": 0, "skipped_degenerate_lambda": 0, "roundtrips_ok": 0,
             "images_on_chart": 0, "valid": 0, "x0_points": int(len(xs))}
    m = pencil.m
    while stats["valid"] < samples:
        stats["draws"] += 1
        i = int(rng.integers(len(xs)))
        y = rng.integers(0, ext.order, size=m).tolist()
        lam = int(rng.integers(ext.order))
        x, t = xs[i].tolist(), int(ts[i])
        try:
            xo, yp, lamp, to, z = phi_forward(pencil, x, t, y, lam, ext)
        except PhiDomainError:
            stats["skipped_F_zero"] += 1
            continue
        try:
            xb, tb, yb, lamb = phi_inverse(pencil, xo, yp, lamp, to, z, ext)
        except PhiDomainError:
            stats["skipped_degenerate_lambda"] += 1
            continue
        stats["valid"] += 1
        if [v.code for v in xb] == x and tb.code == t and [v.code for v in yb] == y and lamb.code == lam:
            stats["roundtrips_ok"] += 1
        pt = [v.code for v in xo] + [v.code for v in yp] + [lamp.code]
        if chart.eval_codes(pt) == 0:
            stats["images_on_chart"] += 1
    skipped = stats["skipped_F_zero"] + stats["skipped_degenerate_lambda"]
    stats["skip_rate"] = skipped / stats["draws"]
    return stats
