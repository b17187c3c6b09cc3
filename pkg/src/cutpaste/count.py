"""Exact point counts over F_{q^k} for pencils and their pieces.

The canonical strategy is fiberwise. One scan of P^3(F_Q) tabulates the
joint values ``H[g, f] = #{x : G(x) = g, F(x) = f}``. The fiber over ``t``
is ``{a G + b F = 0}`` with ``(a, b) = (alpha(t), beta(t))``, and its count
is the sum of ``H`` over the line ``{(g, f) : a g + b f = 0}``. Independent
routes (direct kernel scans of a single cubic, brute-force biprojective
enumeration) exist for cross-checking.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field
from itertools import product
from math import isqrt
from typing import Sequence

import numpy as np

from .budget import Budget
from .field import Field, FieldElem, field_create
from .kernels import projective_points, projective_size, scan_count, scan_pair_histogram
from .pencil import LinearIso, Pencil, gradient_locus, pencil_map
from .poly import MPoly, poly_is_homogeneous

__all__ = [
    "CellDecomposition",
    "CountResult",
    "LOCI",
    "cell_decomposition",
    "count_projective",
    "count_pencil",
    "count_pencil_direct",
    "count_locus",
    "count_singular_fibers",
    "count_universal_chart",
    "closed_point_counts",
    "verdict_equality",
    "euler_formulas",
    "weil_interval",
]

LOCI = ("X", "X0", "Z", "fiber", "S_inf", "Z_times_A1", "X_minus_singular_fibers")


@dataclass(frozen=True)
class CellDecomposition:
    """Disjoint affine cells of P^{n_1} x ... x P^{n_r} over F_Q.

    A cell is a tuple of leading positions, one per factor; its points have
    that coordinate equal to 1, zeros before it and free entries after.
    """

    Q: int
    dims: tuple[int, ...]
    cells: tuple[tuple[int, ...], ...]

    def cell_size(self, cell: Sequence[int]) -> int:
        size = 1
        for n, lead in zip(self.dims, cell):
            size *= self.Q ** (n - lead)
        return size

    @property
    def total(self) -> int:
        return sum(self.cell_size(c) for c in self.cells)

    @property
    def expected_total(self) -> int:
        out = 1
        for n in self.dims:
            out *= (self.Q ** (n + 1) - 1) // (self.Q - 1)
        return out

    def points(self, cell: Sequence[int]) -> np.ndarray:
        """All points of one cell, coordinates of the factors concatenated."""
        blocks = []
        for n, lead in zip(self.dims, cell):
            free = n - lead
            grid = np.indices((self.Q,) * free).reshape(free, -1).T if free else np.zeros((1, 0), dtype=np.int64)
            b = np.zeros((len(grid), n + 1), dtype=np.int64)
            b[:, lead] = 1
            b[:, lead + 1:] = grid
            blocks.append(b)
        out = blocks[0]
        for b in blocks[1:]:
            out = np.concatenate(
                [np.repeat(out, len(b), axis=0), np.tile(b, (len(out), 1))], axis=1
            )
        return out


def cell_decomposition(Q: int, dims: Sequence[int]) -> CellDecomposition:
    dims = tuple(int(n) for n in dims)
    cells = tuple(product(*[range(n + 1) for n in dims]))
    return CellDecomposition(Q, dims, cells)


@dataclass
class CountResult:
    locus: str
    p: int
    k: int
    count: int
    elapsed: float = 0.0
    evaluations: int = 0
    extra: dict = dc_field(default_factory=dict)

    @property
    def Q(self) -> int:
        return self.p**self.k

    def to_json(self) -> dict:
        return {
            "locus": self.locus,
            "q": self.p,
            "k": self.k,
            "count": int(self.count),
            "elapsed": round(self.elapsed, 6),
            "evaluations": int(self.evaluations),
        }

    CSV_FIELDS = ("locus", "q", "k", "count", "elapsed", "evaluations")

    def csv_row(self) -> list:
        d = self.to_json()
        return [d[f] for f in self.CSV_FIELDS]


def _ext(pencil_or_field, k: int) -> Field:
    f = pencil_or_field.field if isinstance(pencil_or_field, Pencil) else pencil_or_field
    return field_create(f.p, k)


def _charged(budget: Budget | None) -> int:
    return budget.used if budget is not None else 0


# -- generic projective counting ------------------------------------------------------


def count_projective(
    polys: list[MPoly],
    field: Field,
    blocks: Sequence[Sequence[int]] | None = None,
    workers: int = 1,
    budget: Budget | None = None,
    nvars: int | None = None,
) -> CountResult:
    """Common zeros in P^n or in P^3 x P^1 (``blocks=[(0,1,2,3), (4,5)]``).

    Polynomials must be homogeneous in each block. With an empty list the
    ambient space is counted (give ``nvars``).
    """
    t0 = time.perf_counter()
    used0 = _charged(budget)
    nv = polys[0].nvars if polys else int(nvars)
    blocks = [tuple(range(nv))] if blocks is None else [tuple(b) for b in blocks]
    for f in polys:
        degs = tuple((b, f.degree(b) if f.terms else 0) for b in blocks)
        if f.terms and not poly_is_homogeneous(f, degs):
            raise ValueError("polynomial is not homogeneous in the declared blocks")
    Q = field.order
    if not polys:
        n = 1
        for b in blocks:
            n *= projective_size(Q, len(b) - 1)
        if budget is not None:
            budget.charge(n, "ambient count")
        return CountResult("ambient", field.p, field.k, n, time.perf_counter() - t0, n)
    if len(blocks) == 1:
        n = scan_count(field, polys, workers, budget)
    elif len(blocks) == 2 and len(blocks[1]) == 2:
        xb, tb = blocks
        n = 0
        for t in projective_points(Q, 1).tolist():
            restricted = [_fix_vars(f, dict(zip(tb, t)), xb, field) for f in polys]
            restricted = [r for r in restricted if not r.is_zero()]
            if any(r.degree() == 0 for r in restricted):
                continue  # nonzero constant: no zeros on this fiber
            if restricted:
                n += scan_count(field, restricted, workers, budget)
            else:
                n += projective_size(Q, len(xb) - 1)
    else:
        raise ValueError("supported ambients: P^n, or P^n x P^1")
    return CountResult("projective", field.p, field.k, n, time.perf_counter() - t0, _charged(budget) - used0)


def _fix_vars(f: MPoly, values: dict[int, int], keep: Sequence[int], ext: Field) -> MPoly:
    out: dict = {}
    for e, c in f.over(ext).terms.items():
        v = c
        for i, val in values.items():
            if e[i]:
                v = ext.mul(v, ext.pow(val, e[i]))
        key = tuple(e[i] for i in keep)
        out[key] = ext.add(out.get(key, 0), v)
    return MPoly(ext, len(keep), out)


# -- pencils ---------------------------------------------------------------------------------


_HIST_CACHE: dict[tuple, np.ndarray] = {}


def _histogram(pencil: Pencil, ext: Field, workers=1, budget=None) -> np.ndarray:
    key = (pencil.G, pencil.F, ext)
    H = _HIST_CACHE.get(key)
    if H is not None and budget is not None:
        # cache hits are charged like scans so that budget use is reproducible
        budget.charge(2 * projective_size(ext.order, 3), "pair histogram (cached)")
    if H is None:
        H = scan_pair_histogram(ext, pencil.G, pencil.F, workers, budget)
        _HIST_CACHE[key] = H
    return H


def _fiber_counts(pencil: Pencil, ext: Field, workers=1, budget=None):
    """Counts of every fiber over P^1(ext) in cell order, plus ``#Z``."""
    H = _histogram(pencil, ext, workers, budget)
    tab = ext.tables()
    total = int(H.sum())
    mus = np.arange(ext.order)
    tpts, avals, bvals, _ = pencil_map(pencil.alpha, pencil.beta, ext)
    counts = np.empty(len(tpts), dtype=np.int64)
    for i, (a, b) in enumerate(zip(avals.tolist(), bvals.tolist())):
        if a == 0 and b == 0:
            counts[i] = total
        else:
            # zeros of a*g + b*f: (g, f) = mu * (-b, a)
            counts[i] = int(H[tab.mul[mus, tab.neg[b]], tab.mul[mus, a]].sum())
    return tpts, counts, int(H[0, 0])


def count_pencil(pencil: Pencil, k: int = 1, workers: int = 1, budget: Budget | None = None) -> CountResult:
    """``#X(F_{q^k})`` as the sum of fiber counts over P^1(F_{q^k})."""
    t0 = time.perf_counter()
    used0 = _charged(budget)
    ext = _ext(pencil, k)
    tpts, counts, nz = _fiber_counts(pencil, ext, workers, budget)
    return CountResult(
        "X", ext.p, k, int(counts.sum()), time.perf_counter() - t0, _charged(budget) - used0,
        {"fiber_counts": counts.tolist(), "Z": nz},
    )


def count_pencil_direct(pencil: Pencil, k: int = 1, budget: Budget | None = None) -> CountResult:
    """Brute-force count over every point of P^3 x P^1 (cross-check at small sizes)."""
    t0 = time.perf_counter()
    ext = _ext(pencil, k)
    E = pencil.equation().over(ext)
    dec = cell_decomposition(ext.order, (3, 1))
    if budget is not None:
        budget.charge(dec.total, "direct biprojective count")
    n = 0
    for cell in dec.cells:
        pts = dec.points(cell)
        n += int(np.count_nonzero(E.eval_many(pts) == 0))
    return CountResult("X[direct]", ext.p, k, n, time.perf_counter() - t0, dec.total)


def count_locus(
    pencil: Pencil,
    locus: str,
    k: int = 1,
    t: Sequence[int] | None = None,
    workers: int = 1,
    budget: Budget | None = None,
) -> CountResult:
    """Count a named piece of the pencil over F_{q^k}.

    ``X0``: part over ``t0 = 1`` off ``Z``; ``Z``: base curve ``G = F = 0`` in
    P^3; ``fiber``: the cubic over ``t`` (normalized codes over F_{q^k});
    ``S_inf``: fiber over ``[0:1]``; ``Z_times_A1``: ``Z x A^1`` inside the
    chart; ``X_minus_singular_fibers``: ``X`` with singular fibers removed.
    """
    t_start = time.perf_counter()
    used0 = _charged(budget)
    ext = _ext(pencil, k)
    extra: dict = {}
    if locus == "X":
        return count_pencil(pencil, k, workers, budget)
    if locus == "Z":
        n = scan_count(ext, [pencil.G, pencil.F], workers, budget)
    elif locus in ("fiber", "S_inf"):
        tt = (0, 1) if locus == "S_inf" else tuple(int(v) for v in t)
        a = pencil.alpha.over(ext).eval_codes(tt)
        b = pencil.beta.over(ext).eval_codes(tt)
        cubic = pencil.G.over(ext) * FieldElem(ext, a) + pencil.F.over(ext) * FieldElem(ext, b)
        if cubic.is_zero():
            n = projective_size(ext.order, 3)
        else:
            n = scan_count(ext, [cubic], workers, budget)
        extra["t"] = list(tt)
    elif locus == "X0":
        tpts, counts, nz = _fiber_counts(pencil, ext, workers, budget)
        affine = tpts[:, 0] == 1
        n = int(counts[affine].sum()) - nz * int(affine.sum())
    elif locus == "Z_times_A1":
        E = pencil.equation()
        n = 0
        for c in range(ext.order):
            restricted = _fix_vars(E, {4: 1, 5: c}, (0, 1, 2, 3), ext)
            polys = [pencil.G, pencil.F] + ([restricted] if not restricted.is_zero() else [])
            n += scan_count(ext, polys, workers, budget)
    elif locus == "X_minus_singular_fibers":
        tpts, counts, _ = _fiber_counts(pencil, ext, workers, budget)
        sing = count_singular_fibers(pencil, k, workers, budget)
        mask = np.zeros(len(tpts), dtype=bool)
        mask[sing.extra["indices"]] = True
        n = int(counts[~mask].sum())
        extra["removed_fibers"] = int(mask.sum())
    else:
        raise ValueError(f"unknown locus {locus!r}; expected one of {LOCI}")
    return CountResult(locus, ext.p, k, int(n), time.perf_counter() - t_start, _charged(budget) - used0, extra)


def count_singular_fibers(pencil: Pencil, k: int = 1, workers: int = 1, budget: Budget | None = None) -> CountResult:
    """Number of ``t`` in P^1(F_{q^k}) whose fiber has an F_{q^k}-rational singular point.

    A fiber with a single singular point has it defined over the field of
    ``t`` (it is Galois-stable), so for generic pencils this is the number
    of singular fibers over F_{q^k}.
    """
    t0 = time.perf_counter()
    used0 = _charged(budget)
    ext = _ext(pencil, k)
    loc = gradient_locus(pencil.G, pencil.F, ext, workers, budget)
    tpts, _, _, tr = pencil_map(pencil.alpha, pencil.beta, ext)
    S = set(loc.ratios.tolist())
    if -1 in S:
        mask = np.ones(len(tpts), dtype=bool)
    else:
        mask = np.isin(tr, list(S)) | (tr == -1)
    idx = np.flatnonzero(mask)
    return CountResult(
        "singular_fibers", ext.p, k, len(idx), time.perf_counter() - t0, _charged(budget) - used0,
        {"indices": idx.tolist(), "t": tpts[idx].tolist()},
    )


def closed_point_counts(a: dict[int, int]) -> dict[int, float]:
    """Solve ``a_k = sum_{d | k} d b_d`` for ``b_d`` (degree-d closed points)."""
    b: dict[int, float] = {}
    for k in sorted(a):
        missing = [d for d in range(1, k) if k % d == 0 and d not in a]
        if missing:
            raise ValueError(f"a_{k} needs a_d for divisors {missing}")
        rest = a[k] - sum(d * b[d] for d in range(1, k) if k % d == 0)
        b[k] = rest / k
    return b


# -- the universal family chart ----------------------------------------------------------


def count_universal_chart(
    pencil: Pencil, iso: LinearIso | None = None, workers: int = 1, budget: Budget | None = None
) -> CountResult:
    """Brute-force ``#{(x, y_1..y_m, lam) : x not in Z, L_a(1,y) G + (L_b(1,y) + lam) F = 0}`` over F_q.

    With ``iso`` the equation is evaluated at ``(T(y), lam + s(y))`` instead,
    i.e. the pull-back of this chart along the substitution.
    """
    t0 = time.perf_counter()
    used0 = _charged(budget)
    ext = pencil.field
    Q, m = ext.order, pencil.m
    tab = ext.tables()
    H = _histogram(pencil, ext, workers, budget)
    grid = np.indices((Q,) * m).reshape(m, -1).T  # y_1..y_m
    if budget is not None:
        budget.charge(len(grid) * Q * int(np.count_nonzero(H)), "universal chart enumeration")
    lam = np.arange(Q)
    if iso is not None:
        ty = np.zeros_like(grid)
        shift = np.full(len(grid), iso.shift[0])
        for i in range(m):
            col = np.full(len(grid), iso.offset[i])
            for j in range(m):
                col = tab.add[col, tab.mul[iso.matrix[i][j], grid[:, j]]]
            ty[:, i] = col
            shift = tab.add[shift, tab.mul[iso.shift[i + 1], grid[:, i]]]
        ys = ty
    else:
        ys = grid
        shift = np.zeros(len(grid), dtype=np.int64)
    a, b = pencil.alpha_coeffs, pencil.beta_coeffs
    La = np.full(len(grid), a[0])
    Lb = np.full(len(grid), b[0])
    for i in range(m):
        La = tab.add[La, tab.mul[a[i + 1], ys[:, i]]]
        Lb = tab.add[Lb, tab.mul[b[i + 1], ys[:, i]]]
    lam_eff = tab.add[lam[None, :], shift[:, None]]  # (grid, Q)
    total = 0
    for g, f in zip(*np.nonzero(H)):
        if g == 0 and f == 0:
            continue
        val = tab.add[tab.mul[La, g][:, None], tab.mul[tab.add[Lb[:, None], lam_eff], f]]
        total += int(H[g, f]) * int(np.count_nonzero(val == 0))
    return CountResult(
        "universal_chart" + ("[pulled back]" if iso is not None else ""), ext.p, 1, total,
        time.perf_counter() - t0, _charged(budget) - used0,
    )


# -- verdicts ------------------------------------------------------------------------------


def _certified(p: Pencil) -> bool:
    return bool(p.certificates) and all(c.passed for c in p.certificates.values())


def verdict_equality(
    a: Pencil, b: Pencil, ks: Sequence[int], workers: int = 1, budget: Budget | None = None
) -> dict:
    """Compare ``#X(F_{q^k})`` and ``#Xtilde(F_{q^k})`` for each ``k``.

    Returns ``{"applicable", "rows", "verdict", "conjectural_rows"}``. When the
    pencils do not share ``G, F`` or are not certified the verdict is
    ``NOT-APPLICABLE`` and nothing is counted.
    """
    if not (a.shares_cubics(b) and a.m == b.m and _certified(a) and _certified(b)):
        reason = "pencils do not share (G, F) and m" if not a.shares_cubics(b) or a.m != b.m else "certification missing"
        return {"applicable": False, "reason": reason, "rows": [], "verdict": "NOT-APPLICABLE", "conjectural_rows": []}
    rows, conj = [], []
    for k in ks:
        ca = count_pencil(a, k, workers, budget)
        cb = count_pencil(b, k, workers, budget)
        rows.append({
            "k": k, "count_X": ca.count, "count_Xtilde": cb.count,
            "difference": ca.count - cb.count,
            "verdict": "PASS" if ca.count == cb.count else "FAIL",
        })
        xa = count_locus(a, "X_minus_singular_fibers", k, workers=workers, budget=budget)
        xb = count_locus(b, "X_minus_singular_fibers", k, workers=workers, budget=budget)
        conj.append({
            "k": k, "count_Xprime": xa.count, "count_Xtilde_prime": xb.count,
            "equal": xa.count == xb.count,
            "label": "conjectural - unproven",
        })
    verdict = "PASS" if all(r["verdict"] == "PASS" for r in rows) else "FAIL"
    return {"applicable": True, "rows": rows, "verdict": verdict, "conjectural_rows": conj}


def euler_formulas(m: int) -> dict:
    """Euler characteristics of the pencil and its singular-fiber count.

    ``chi(X) = m(-14 - 9(2m-2)) + 9(2m-2)(m-1) = -14m - 9(2m-2) = -32m + 18``,
    ``s = 32m`` and ``chi(Bl_Z P^3) = -14``. Every link of the chain is
    evaluated separately and cross-checked against ``18 - s``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    # chi(P^3) + (chi(P^1) - 1) chi(Z) with Z = (3,3) complete intersection of genus 10
    chi_blowup = 4 + (2 - 1) * (2 - 2 * 10)
    chain = [
        m * (-14 - 9 * (2 * m - 2)) + 9 * (2 * m - 2) * (m - 1),
        -14 * m - 9 * (2 * m - 2),
        -32 * m + 18,
    ]
    s = 32 * m
    chi_X = chain[-1]
    return {
        "m": m,
        "chi_X": chi_X,
        "s": s,
        "chi_blowup": chi_blowup,
        "chain": chain,
        "chain_consistent": len(set(chain)) == 1,
        "eighteen_minus_s": 18 - s,
        "identity_holds": 18 - s == chi_X,
    }


def weil_interval(q: int, genus: int) -> tuple[int, int]:
    """Integer range allowed by the Hasse-Weil bound for a curve of given genus."""
    width = isqrt(4 * genus * genus * q)
    return q + 1 - width, q + 1 + width
