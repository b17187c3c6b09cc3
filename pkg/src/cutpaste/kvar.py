"""Symbolic classes in the Grothendieck ring of varieties.

A :class:`KClass` is a canonical integer combination

    c_0 + c_1 L + ... + c_n L^n  +  sum_A  P_A(L) * [A]

where ``L`` is the Lefschetz class and each opaque atom ``[A]`` carries an
integer L-polynomial ``P_A``. Projective-space symbols are expanded on
input (``P(n) = L^n + ... + L + 1``). Two atoms are never multiplied.

The module also builds the relations used in the cancellation argument and
a step-by-step :class:`Derivation` that concludes ``[X] = [Xtilde]`` from
them.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from math import comb
from typing import Mapping

__all__ = [
    "AtomProductError",
    "KClass",
    "L",
    "Relation",
    "Derivation",
    "DerivationError",
    "UnboundAtomError",
    "atom",
    "projective_space",
    "kclass_normalize",
    "kclass_realize",
    "kv_fiber_decomposition",
    "kv_hyperplane_complement",
    "kv_generate_relations",
    "kv_cancellation_derive",
    "replay",
    "SMOOTH_CUBIC_CLASS",
    "NODAL_CUBIC_CLASS",
    "NODAL_CUBIC_EULER_STATED",
    "SMOOTH_CUBIC_EULER_STATED",
]


class AtomProductError(ValueError):
    pass


class UnboundAtomError(KeyError):
    pass


class DerivationError(ValueError):
    pass


LPoly = tuple[int, ...]


def _trim(c) -> LPoly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a: LPoly, b: LPoly, sign: int = 1) -> LPoly:
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + sign * (b[i] if i < len(b) else 0) for i in range(n))


def _pmul(a: LPoly, b: LPoly) -> LPoly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _peval(a: LPoly, x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _pstr(a: LPoly) -> str:
    if not a:
        return "0"
    parts = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if not c:
            continue
        mono = "" if i == 0 else ("L" if i == 1 else f"L^{i}")
        if mono and abs(c) == 1:
            s = mono
        elif mono:
            s = f"{abs(c)}{mono}"
        else:
            s = str(abs(c))
        parts.append(("- " if c < 0 else "+ ") + s)
    out = " ".join(parts)
    return out[2:] if out.startswith("+ ") else "-" + out[2:]


@dataclass(frozen=True)
class KClass:
    lpoly: LPoly = ()
    atoms: Mapping[str, LPoly] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lpoly", _trim(self.lpoly))
        clean = {}
        for name, poly in self.atoms.items():
            poly = _trim(poly)
            if poly:
                clean[name] = poly
        object.__setattr__(self, "atoms", dict(sorted(clean.items())))

    # constructors

    @classmethod
    def integer(cls, n: int) -> "KClass":
        return cls((int(n),))

    # ring operations

    def __add__(self, other):
        other = _coerce(other)
        atoms = dict(self.atoms)
        for name, poly in other.atoms.items():
            atoms[name] = _padd(atoms.get(name, ()), poly)
        return KClass(_padd(self.lpoly, other.lpoly), atoms)

    __radd__ = __add__

    def __neg__(self):
        return KClass(tuple(-c for c in self.lpoly), {k: tuple(-c for c in v) for k, v in self.atoms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if self.atoms and other.atoms:
            raise AtomProductError("atom product unsupported")
        atoms = {}
        for name, poly in self.atoms.items():
            atoms[name] = _pmul(poly, other.lpoly)
        for name, poly in other.atoms.items():
            atoms[name] = _pmul(poly, self.lpoly)
        return KClass(_pmul(self.lpoly, other.lpoly), atoms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not classes")
        result = KClass.integer(1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = KClass.integer(other)
        if not isinstance(other, KClass):
            return NotImplemented
        return self.lpoly == other.lpoly and dict(self.atoms) == dict(other.atoms)

    def __hash__(self):
        return hash((self.lpoly, tuple(self.atoms.items())))

    def is_zero(self) -> bool:
        return not self.lpoly and not self.atoms

    def __str__(self):
        parts = []
        if self.lpoly or not self.atoms:
            parts.append(_pstr(self.lpoly))
        for name, poly in self.atoms.items():
            if poly == (1,):
                parts.append(f"[{name}]")
            elif poly == (-1,):
                parts.append(f"-[{name}]")
            else:
                parts.append(f"({_pstr(poly)})*[{name}]")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"KClass({self})"

    def to_json(self) -> dict:
        return {"L": list(self.lpoly), "atoms": {k: list(v) for k, v in self.atoms.items()}}

    @classmethod
    def from_json(cls, data: Mapping) -> "KClass":
        return cls(tuple(data.get("L", ())), {k: tuple(v) for k, v in data.get("atoms", {}).items()})


def _coerce(x) -> KClass:
    if isinstance(x, KClass):
        return x
    if isinstance(x, int):
        return KClass.integer(x)
    raise TypeError(f"cannot use {type(x).__name__} as a class")


L = KClass((0, 1))


def atom(name: str) -> KClass:
    return KClass((), {name: (1,)})


def projective_space(n: int) -> KClass:
    if n < 0:
        raise ValueError("dimension must be >= 0")
    return KClass((1,) * (n + 1))


# -- expression parser -------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(P\(\s*\d+\s*\))|(L)|(\d+)|(\[[^\]]+\])|([-+*^()]))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected input at {text[pos:]!r}")
        out.append(m.group(m.lastindex).replace(" ", ""))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expect=None):
        tok = self.peek()
        if tok is None or (expect is not None and tok != expect):
            raise ValueError(f"expected {expect or 'a token'}, got {tok!r}")
        self.i += 1
        return tok

    def expr(self) -> KClass:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        acc = self.term() * sign
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> KClass:
        acc = self.power()
        while True:
            tok = self.peek()
            if tok == "*":
                self.take()
                acc = acc * self.power()
            elif tok is not None and tok not in ("+", "-", ")", "^"):
                acc = acc * self.power()  # implicit product, e.g. "6L"
            else:
                return acc

    def power(self) -> KClass:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            n = int(self.take())
            base = base**n
        return base

    def atom(self) -> KClass:
        tok = self.take()
        if tok == "(":
            inner = self.expr()
            self.take(")")
            return inner
        if tok == "L":
            return L
        if tok.startswith("P("):
            return projective_space(int(tok[2:-1]))
        if tok.startswith("["):
            return atom(tok[1:-1].strip())
        if tok.isdigit():
            return KClass.integer(int(tok))
        raise ValueError(f"unexpected token {tok!r}")


def kclass_normalize(expr) -> KClass:
    """Canonical class of ``expr``.

    ``expr`` is a :class:`KClass` (returned as is) or a string such as
    ``"P(2) + 6L"`` or ``"[X]*L^2 - [Xtilde]*(L-1)"``. Raises
    :class:`AtomProductError` on a product of two atoms.
    """
    if isinstance(expr, KClass):
        return expr
    if isinstance(expr, int):
        return KClass.integer(expr)
    p = _Parser(_tokenize(expr))
    out = p.expr()
    if p.peek() is not None:
        raise ValueError(f"trailing input {p.toks[p.i:]}")
    return out


def kclass_realize(c: KClass, measure: str = "count", q: int | None = None, atoms: Mapping[str, int] | None = None) -> int:
    """Integer realization of a class.

    ``measure="count"`` sends L to ``q`` (point counting over F_q);
    ``measure="euler"`` sends L to 1. Every atom of ``c`` must be bound in
    ``atoms``.
    """
    c = kclass_normalize(c)
    if measure == "count":
        if q is None:
            raise ValueError("count realization needs q")
        x = int(q)
    elif measure == "euler":
        x = 1
    else:
        raise ValueError(f"unknown measure {measure!r}")
    atoms = atoms or {}
    total = _peval(c.lpoly, x)
    for name, poly in c.atoms.items():
        if name not in atoms:
            raise UnboundAtomError(name)
        total += _peval(poly, x) * int(atoms[name])
    return total


# class table for cubic surfaces
SMOOTH_CUBIC_CLASS = kclass_normalize("P(2) + 6L")
NODAL_CUBIC_CLASS = kclass_normalize("L^2 + 4L + 2P(1)")
SMOOTH_CUBIC_EULER_STATED = 9
NODAL_CUBIC_EULER_STATED = 8


# -- relations and derivations -----------------------------------------------


@dataclass(frozen=True)
class Relation:
    lhs: KClass
    rhs: KClass
    label: str = ""

    def holds(self) -> bool:
        return self.lhs == self.rhs

    def difference(self) -> KClass:
        return self.lhs - self.rhs

    def __str__(self):
        return f"{self.lhs} = {self.rhs}" + (f"  ({self.label})" if self.label else "")

    def to_json(self) -> dict:
        return {"label": self.label, "lhs": self.lhs.to_json(), "rhs": self.rhs.to_json()}

    @classmethod
    def from_json(cls, data) -> "Relation":
        return cls(KClass.from_json(data["lhs"]), KClass.from_json(data["rhs"]), data.get("label", ""))


def kv_fiber_decomposition(m: int) -> Relation:
    """``[X] = [X0] + [S_inf] + [Z]*L``: the chart decomposition of a pencil.

    ``X0`` is the part over ``t0 = 1`` away from the base curve ``Z``,
    ``S_inf`` the fiber over ``[0:1]``. The relation does not depend on ``m``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    return Relation(atom("X"), atom("X0") + atom("S_inf") + atom("Z") * L, f"fiber-decomposition m={m}")


def kv_hyperplane_complement(m: int, k: int) -> KClass:
    """Class of A^k x (A^1 minus 0)^(m-k), i.e. L^k (L-1)^(m-k)."""
    if not 0 <= k < m:
        raise ValueError(f"need 0 <= k < m, got k={k}, m={m}")
    return L**k * (L - 1) ** (m - k)


def kv_generate_relations(m: int, A: str = "X", B: str = "Xtilde") -> list[Relation]:
    """Hypotheses ``A L^k = B L^k`` (1 <= k <= m+1) and
    ``A L^k (L-1)^(m-k) = B L^k (L-1)^(m-k)`` (0 <= k < m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    a, b = atom(A), atom(B)
    rels = [Relation(a * L**k, b * L**k, f"prop k={k}") for k in range(1, m + 2)]
    for k in range(m):
        h = kv_hyperplane_complement(m, k)
        rels.append(Relation(a * h, b * h, f"cor k={k}"))
    return rels


@dataclass
class Derivation:
    """Replayable transcript.

    Each step is a dict with ``op`` in {"start", "combine", "scale"}:

    * ``start``: take hypothesis ``hyp`` verbatim;
    * ``combine``: previous relation plus ``coef`` times hypothesis ``hyp``;
    * ``scale``: previous relation times the integer ``coef`` (must be +-1).
    """

    hypotheses: list[Relation]
    steps: list[dict]
    conclusion: Relation

    def to_json(self) -> dict:
        return {
            "hypotheses": [h.to_json() for h in self.hypotheses],
            "steps": [
                {**{k: v for k, v in s.items() if k != "result"}, "result": s["result"].to_json()}
                for s in self.steps
            ],
            "conclusion": self.conclusion.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, data) -> "Derivation":
        hyps = [Relation.from_json(h) for h in data["hypotheses"]]
        steps = [{**s, "result": Relation.from_json(s["result"])} for s in data["steps"]]
        return cls(hyps, steps, Relation.from_json(data["conclusion"]))


def kv_cancellation_derive(m: int, A: str = "X", B: str = "Xtilde") -> Derivation:
    """Derive ``A = B`` from the relation set of :func:`kv_generate_relations`.

    Start from ``A (L-1)^m = B (L-1)^m``, whose expansion is
    ``sum_j C(m,j) (-1)^(m-j) L^j``; cancel each ``L^j`` term (j >= 1) with
    the hypothesis ``A L^j = B L^j``; what remains is ``(-1)^m A = (-1)^m B``.
    """
    hyps = kv_generate_relations(m, A, B)
    by_label = {h.label: i for i, h in enumerate(hyps)}
    start = by_label["cor k=0"]
    cur = Relation(hyps[start].lhs, hyps[start].rhs, "expanded (L-1)^m")
    steps = [{"op": "start", "hyp": start, "result": cur}]
    for j in range(m, 0, -1):
        c = comb(m, j) * (-1) ** (m - j)
        h = hyps[by_label[f"prop k={j}"]]
        cur = Relation(cur.lhs - h.lhs * c, cur.rhs - h.rhs * c, f"cancel L^{j}")
        steps.append({"op": "combine", "hyp": by_label[f"prop k={j}"], "coef": -c, "result": cur})
    sign = (-1) ** m
    cur = Relation(cur.lhs * sign, cur.rhs * sign, "normalize sign")
    steps.append({"op": "scale", "coef": sign, "result": cur})
    return Derivation(hyps, steps, Relation(cur.lhs, cur.rhs, f"[{A}] = [{B}]"))


def replay(d: Derivation) -> Relation:
    """Re-run every step with class arithmetic; raise on the first mismatch."""
    cur = None
    for i, s in enumerate(d.steps):
        op = s["op"]
        if op == "start":
            h = d.hypotheses[s["hyp"]]
            new = (h.lhs, h.rhs)
        elif op == "combine":
            if cur is None:
                raise DerivationError(f"step {i}: combine before start")
            h = d.hypotheses[s["hyp"]]
            new = (cur[0] + h.lhs * s["coef"], cur[1] + h.rhs * s["coef"])
        elif op == "scale":
            if cur is None or s["coef"] not in (1, -1):
                raise DerivationError(f"step {i}: invalid scale")
            new = (cur[0] * s["coef"], cur[1] * s["coef"])
        else:
            raise DerivationError(f"step {i}: unknown op {op!r}")
        if (new[0], new[1]) != (s["result"].lhs, s["result"].rhs):
            raise DerivationError(f"step {i}: recorded result does not match replay")
        cur = new
    if cur is None or (cur[0], cur[1]) != (d.conclusion.lhs, d.conclusion.rhs):
        raise DerivationError("conclusion does not match the last step")
    return d.conclusion
