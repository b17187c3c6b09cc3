"""Sparse multivariate polynomials over a :class:`~cutpaste.field.Field`.

Coefficients are stored as field codes keyed by exponent tuples. Terms are
kept in graded-lexicographic order (highest first) for serialization and
printing; equality is on the term dictionaries.

Variable conventions used throughout the package:

* pencil space: ``(x0, x1, x2, x3, t0, t1)``
* universal-family space: ``(x0..x3, y0..ym, lam)``
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

import numpy as np

from .field import Field, FieldElem, FieldError

__all__ = [
    "MPoly",
    "X_BLOCK",
    "T_BLOCK",
    "monomials",
    "poly_eval",
    "poly_partial",
    "poly_random_form",
    "poly_is_homogeneous",
    "seeded_rng",
]

X_BLOCK = (0, 1, 2, 3)
T_BLOCK = (4, 5)

Exps = tuple[int, ...]
Grading = tuple[tuple[tuple[int, ...], int], ...]


def seeded_rng(*keys: int) -> np.random.Generator:
    """Generator derived from a tuple of integer keys.

    This is the package-wide seed splitting scheme: a child stream is
    ``SeedSequence([seed, purpose, attempt, ...])`` fed to PCG64.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(k) for k in keys])))


def monomials(nvars: int, block: Sequence[int], degree: int) -> list[Exps]:
    """Exponent vectors of all degree-``degree`` monomials in ``block`` (grlex, highest first)."""
    out = []
    for combo in combinations_with_replacement(block, degree):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return sorted(set(out), reverse=True)


@dataclass(frozen=True, eq=False)
class MPoly:
    field: Field
    nvars: int
    terms: Mapping[Exps, int]
    grading: Grading | None = None

    def __post_init__(self):
        clean = {}
        for e, c in self.terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != self.nvars:
                raise ValueError(f"exponent {e} does not match nvars={self.nvars}")
            c = int(c.code if isinstance(c, FieldElem) else c)
            if self.field.k == 1:
                c %= self.field.p
            elif not 0 <= c < self.field.order:
                raise ValueError(f"coefficient code {c} out of range for {self.field!r}")
            if c:
                clean[e] = c
        object.__setattr__(self, "terms", clean)
        if self.grading is not None:
            g = tuple((tuple(b), int(d)) for b, d in self.grading)
            object.__setattr__(self, "grading", g)
            if not poly_is_homogeneous(self, g):
                raise ValueError("terms do not match the declared grading")

    # construction

    @classmethod
    def zero(cls, field: Field, nvars: int) -> "MPoly":
        return cls(field, nvars, {})

    @classmethod
    def constant(cls, field: Field, nvars: int, c) -> "MPoly":
        return cls(field, nvars, {(0,) * nvars: field.code(c)})

    @classmethod
    def var(cls, field: Field, nvars: int, i: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(field, nvars, {tuple(e): 1})

    def with_grading(self, grading) -> "MPoly":
        return MPoly(self.field, self.nvars, self.terms, grading)

    def over(self, field: Field) -> "MPoly":
        """The same polynomial viewed over an extension of its prime field."""
        if field == self.field:
            return self
        if self.field.k != 1 or field.p != self.field.p:
            raise FieldError("can only lift prime-field polynomials")
        return MPoly(field, self.nvars, self.terms, self.grading)

    # inspection

    def sorted_terms(self) -> list[tuple[Exps, int]]:
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    def coeff(self, exps: Sequence[int]) -> FieldElem:
        return FieldElem(self.field, self.terms.get(tuple(exps), 0))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, block: Sequence[int] | None = None) -> int:
        if not self.terms:
            return -1
        if block is None:
            return max(sum(e) for e in self.terms)
        return max(sum(e[v] for v in block) for e in self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.field == other.field and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"v{i}^{x}" if x > 1 else f"v{i}" for i, x in enumerate(e) if x)
            cs = str(self.field.to_coeffs(c) if self.field.k > 1 else c)
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)

    # arithmetic

    def _check(self, other: "MPoly"):
        if other.field != self.field or other.nvars != self.nvars:
            raise FieldError("polynomials live in different rings")

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            self._check(other)
            return other
        return MPoly.constant(self.field, self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        f = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = f.add(out.get(e, 0), c)
        return MPoly(f, self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.field, self.nvars, {e: self.field.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = self.field.code(other)
            return MPoly(self.field, self.nvars, {e: self.field.mul(v, c) for e, v in self.terms.items()})
        self._check(other)
        f = self.field
        out: dict[Exps, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = f.add(out.get(e, 0), f.mul(c1, c2))
        return MPoly(f, self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = MPoly.constant(self.field, self.nvars, 1)
        for _ in range(int(n)):
            result = result * self
        return result

    # evaluation / calculus

    def eval(self, point: Sequence) -> FieldElem:
        return poly_eval(self, point)

    def eval_codes(self, point: Sequence[int]) -> int:
        f = self.field
        acc = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = f.mul(v, f.pow(x, k))
            acc = f.add(acc, v)
        return acc

    def eval_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at an ``(N, nvars)`` array of codes."""
        tab = self.field.tables()
        pts = np.asarray(points, dtype=np.int64)
        if pts.ndim != 2 or pts.shape[1] != self.nvars:
            raise ValueError(f"points must have shape (N, {self.nvars})")
        acc = np.zeros(len(pts), dtype=np.int64)
        pow_cache: dict[tuple[int, int], np.ndarray] = {}
        for e, c in self.terms.items():
            v = np.full(len(pts), c, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in pow_cache:
                        pw = np.array([self.field.pow(a, k) for a in range(self.field.order)])
                        pow_cache[key] = pw[pts[:, i]]
                    v = tab.mul[v, pow_cache[key]]
            acc = tab.add[acc, v]
        return acc

    def partial(self, var: int) -> "MPoly":
        return poly_partial(self, var)

    def substitute(self, images: Sequence["MPoly"]) -> "MPoly":
        """Compose: replace variable ``i`` by ``images[i]`` (all in one target ring)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        target = images[0]
        result = MPoly.zero(self.field, target.nvars)
        powers: dict[tuple[int, int], MPoly] = {}
        for e, c in self.terms.items():
            term = MPoly.constant(self.field, target.nvars, FieldElem(self.field, c))
            for i, k in enumerate(e):
                if k:
                    if (i, k) not in powers:
                        powers[(i, k)] = images[i] ** k
                    term = term * powers[(i, k)]
            result = result + term
        return result

    def embed(self, nvars: int, var_map: Sequence[int]) -> "MPoly":
        """Rename variables: old variable ``i`` becomes new variable ``var_map[i]``."""
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                ne[var_map[i]] += k
            out[tuple(ne)] = c
        return MPoly(self.field, nvars, out)

    # serialization

    def to_json(self) -> list[dict]:
        return [{"exps": list(e), "coeff": self.field.to_coeffs(c)} for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, field: Field, nvars: int, data: Iterable[Mapping]) -> "MPoly":
        return cls(field, nvars, {tuple(r["exps"]): field.from_coeffs(r["coeff"]) for r in data})


def poly_eval(f: MPoly, point: Sequence) -> FieldElem:
    """Exact evaluation; ``point`` may hold FieldElems or integer residues."""
    if len(point) != f.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {f.nvars} variables")
    codes = [f.field.elem(x).code for x in point]
    return FieldElem(f.field, f.eval_codes(codes))


def poly_partial(f: MPoly, var: int) -> MPoly:
    if not 0 <= var < f.nvars:
        raise IndexError(f"variable index {var} out of range")
    fld = f.field
    out = {}
    for e, c in f.terms.items():
        k = e[var]
        if k == 0:
            continue
        ne = list(e)
        ne[var] -= 1
        out[tuple(ne)] = fld.mul(c, k % fld.p)
    grading = None
    if f.grading is not None:
        grading = tuple((b, d - 1 if var in b else d) for b, d in f.grading)
        if any(d < 0 for _, d in grading):
            grading = None
    return MPoly(fld, f.nvars, out, grading if out else None)


def poly_is_homogeneous(f: MPoly, block_degrees) -> bool:
    """True iff every term has degree ``d`` in each ``(block, d)`` pair.

    ``block_degrees`` may also be a bare integer, meaning total degree.
    """
    if isinstance(block_degrees, int):
        block_degrees = ((tuple(range(f.nvars)), block_degrees),)
    for e in f.terms:
        for block, d in block_degrees:
            if sum(e[v] for v in block) != d:
                return False
    return True


def poly_random_form(
    degree: int,
    block: Sequence[int],
    field: Field,
    seed: int | np.random.Generator,
    nvars: int | None = None,
) -> MPoly:
    """Homogeneous form of ``degree`` in ``block`` with uniform random coefficients.

    Coefficients are drawn in grlex monomial order from the prime field of
    ``field`` by a PCG64 stream; an integer seed goes through
    :func:`seeded_rng`.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    nvars = max(block) + 1 if nvars is None else nvars
    rng = seed if isinstance(seed, np.random.Generator) else seeded_rng(seed)
    monos = monomials(nvars, block, degree)
    coeffs = rng.integers(0, field.p, size=len(monos))
    return MPoly(field, nvars, dict(zip(monos, coeffs.tolist())), ((tuple(block), degree),))
