"""Enumeration kernels over P^n(F_Q) using its affine cell decomposition.

P^n is the disjoint union of the cells ``(0,...,0,1,*,...,*)`` with the
leading 1 in position ``j = 0..n``. Inside a cell the free coordinates run
lexicographically; the last coordinate is innermost, so every polynomial is
first reduced to a univariate polynomial in it (coefficients evaluated on
the prefix) and then evaluated by Horner over all Q values.

All field arithmetic goes through the dense tables of
:class:`~cutpaste.field.FieldTables`. Work is split into ``workers`` chunks
of prefix indices; partial results are reduced in chunk order, so results
do not depend on the number of threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .budget import Budget
from .field import Field
from .poly import MPoly

# the system TBB is older than numba supports
numba.config.THREADING_LAYER = "workqueue"

__all__ = [
    "PackedPolys",
    "pack",
    "scan_count",
    "scan_points",
    "scan_pair_histogram",
    "scan_dependent_gradients",
    "projective_size",
    "projective_points",
]

MODE_COUNT = 0
MODE_POINTS = 1
MODE_HIST = 2
MODE_DEP = 3


def projective_size(Q: int, n: int) -> int:
    return sum(Q**i for i in range(n + 1))


@dataclass(frozen=True)
class PackedPolys:
    exps: np.ndarray  # (T, nv)
    coefs: np.ndarray  # (T,)
    ptr: np.ndarray  # (npoly + 1,)
    maxdeg: int
    nv: int

    @property
    def npoly(self) -> int:
        return len(self.ptr) - 1


def pack(polys: list[MPoly], nv: int) -> PackedPolys:
    exps, coefs, ptr = [], [], [0]
    for f in polys:
        if f.nvars != nv:
            raise ValueError("all polynomials must share the variable count")
        for e, c in f.terms.items():
            exps.append(e)
            coefs.append(c)
        ptr.append(len(coefs))
    maxdeg = max([max(e) for e in exps] + [1])
    return PackedPolys(
        exps=np.array(exps, dtype=np.int64).reshape(-1, nv),
        coefs=np.array(coefs, dtype=np.int64),
        ptr=np.array(ptr, dtype=np.int64),
        maxdeg=int(maxdeg),
        nv=nv,
    )


def _power_table(field: Field, maxdeg: int) -> np.ndarray:
    tab = field.tables()
    Q = field.order
    pw = np.zeros((maxdeg + 1, Q), dtype=np.int32)
    pw[0, :] = 1
    for e in range(1, maxdeg + 1):
        pw[e] = tab.mul[pw[e - 1], np.arange(Q)]
    return pw


@njit(cache=True, parallel=True)
def _scan_cell(
    Q, nv, lead, add, sub, mul, pw, exps, coefs, ptr, maxdeg, mode, nchunks, cap,
    counts, hist, pts, npts,
):
    npoly = len(ptr) - 1
    last = nv - 1
    free_last = lead < last
    nprefix_free = last - lead - 1 if free_last else 0
    nprefix = 1
    for _ in range(nprefix_free):
        nprefix *= Q
    for ch in prange(nchunks):
        lo = nprefix * ch // nchunks
        hi = nprefix * (ch + 1) // nchunks
        coord = np.zeros(nv, dtype=np.int64)
        ucoef = np.zeros((npoly, maxdeg + 1), dtype=np.int64)
        vals = np.zeros(npoly, dtype=np.int64)
        for r in range(lo, hi):
            for i in range(nv):
                coord[i] = 0
            coord[lead] = 1
            rr = r
            for i in range(last - 1, lead, -1):
                coord[i] = rr % Q
                rr //= Q
            # univariate coefficients in the last coordinate
            for pi in range(npoly):
                for d in range(maxdeg + 1):
                    ucoef[pi, d] = 0
                for ti in range(ptr[pi], ptr[pi + 1]):
                    v = coefs[ti]
                    for i in range(last):
                        e = exps[ti, i]
                        if e:
                            v = mul[v, pw[e, coord[i]]]
                    el = exps[ti, last]
                    ucoef[pi, el] = add[ucoef[pi, el], v]
            ncq = Q if free_last else 1
            for ci in range(ncq):
                c = ci if free_last else 1
                for pi in range(npoly):
                    acc = ucoef[pi, maxdeg]
                    for d in range(maxdeg - 1, -1, -1):
                        acc = add[mul[acc, c], ucoef[pi, d]]
                    vals[pi] = acc
                if mode == 2:
                    hist[ch, vals[0], vals[1]] += 1
                    continue
                hit = True
                if mode == 3:
                    # rank of the 2 x h matrix (vals[:h]; vals[h:]) is <= 1
                    h = npoly // 2
                    for i in range(h):
                        if not hit:
                            break
                        for j in range(i + 1, h):
                            m1 = mul[vals[i], vals[h + j]]
                            m2 = mul[vals[j], vals[h + i]]
                            if m1 != m2:
                                hit = False
                                break
                else:
                    for pi in range(npoly):
                        if vals[pi] != 0:
                            hit = False
                            break
                if hit:
                    counts[ch] += 1
                    if mode != 0:
                        k = npts[ch]
                        if k < cap:
                            for i in range(last):
                                pts[ch, k, i] = coord[i]
                            pts[ch, k, last] = c
                        npts[ch] = k + 1


class ScanCapExceeded(RuntimeError):
    pass


def _run(field, polys, mode, workers=1, cap=100_000, budget: Budget | None = None, truncate=False):
    if not polys:
        raise ValueError("need at least one polynomial")
    nv = polys[0].nvars
    if budget is not None:
        budget.charge(projective_size(field.order, nv - 1) * len(polys), "projective scan")
    packed = pack([f.over(field) for f in polys], nv)
    tab = field.tables()
    pw = _power_table(field, packed.maxdeg)
    Q = field.order
    nchunks = max(1, int(workers))
    if workers and workers > 1:
        numba.set_num_threads(min(int(workers), numba.config.NUMBA_NUM_THREADS))
    total = 0
    hist_total = np.zeros((Q, Q), dtype=np.int64) if mode == MODE_HIST else None
    points: list[np.ndarray] = []
    for lead in range(nv):
        counts = np.zeros(nchunks, dtype=np.int64)
        hist = np.zeros((nchunks, Q, Q) if mode == MODE_HIST else (1, 1, 1), dtype=np.int64)
        pts = np.zeros((nchunks, cap if mode in (MODE_POINTS, MODE_DEP) else 0, nv), dtype=np.int64)
        npts = np.zeros(nchunks, dtype=np.int64)
        _scan_cell(
            Q, nv, lead, tab.add, tab.sub, tab.mul, pw, packed.exps, packed.coefs,
            packed.ptr, packed.maxdeg, mode, nchunks, pts.shape[1], counts, hist, pts, npts,
        )
        total += int(counts.sum())
        if mode == MODE_HIST:
            hist_total += hist.sum(axis=0)
        if mode in (MODE_POINTS, MODE_DEP):
            if npts.max(initial=0) > cap and not truncate:
                raise ScanCapExceeded(f"more than {cap} points found in one chunk")
            for ch in range(nchunks):
                points.append(pts[ch, : min(npts[ch], cap)])
    if mode == MODE_HIST:
        return hist_total
    if mode in (MODE_POINTS, MODE_DEP):
        out = np.concatenate(points) if points else np.zeros((0, nv), dtype=np.int64)
        return out
    return total


def scan_count(field: Field, polys: list[MPoly], workers: int = 1, budget: Budget | None = None) -> int:
    """Number of points of P^(nv-1)(field) where every polynomial vanishes."""
    return _run(field, polys, MODE_COUNT, workers, budget=budget)


def scan_points(
    field: Field,
    polys: list[MPoly],
    workers: int = 1,
    cap: int = 100_000,
    budget: Budget | None = None,
    truncate: bool = False,
) -> np.ndarray:
    """Normalized common zeros, shape ``(N, nv)``, in cell order.

    More than ``cap`` zeros in one chunk raises :class:`ScanCapExceeded`
    unless ``truncate`` is set, in which case only the first ones are kept.
    """
    return _run(field, polys, MODE_POINTS, workers, cap, budget, truncate)


def scan_pair_histogram(
    field: Field, f: MPoly, g: MPoly, workers: int = 1, budget: Budget | None = None
) -> np.ndarray:
    """``H[a, b]`` = number of normalized points with ``f = a`` and ``g = b``."""
    return _run(field, [f, g], MODE_HIST, workers, budget=budget)


def scan_dependent_gradients(
    field: Field,
    grad_a: list[MPoly],
    grad_b: list[MPoly],
    workers: int = 1,
    cap: int = 100_000,
    budget: Budget | None = None,
) -> np.ndarray:
    """Points where the vectors ``grad_a(x)`` and ``grad_b(x)`` are linearly dependent."""
    if len(grad_a) != len(grad_b):
        raise ValueError("gradient lists must have equal length")
    return _run(field, list(grad_a) + list(grad_b), MODE_DEP, workers, cap, budget)


def projective_points(Q: int, n: int) -> np.ndarray:
    """All normalized points of P^n(F_Q) as codes, in the kernel's cell order."""
    out = []
    for lead in range(n + 1):
        free = n - lead
        grids = np.indices((Q,) * free).reshape(free, -1).T if free else np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((len(grids), n + 1), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = grids
        out.append(block)
    return np.concatenate(out)
