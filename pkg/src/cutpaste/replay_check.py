"""Independent checker for cancellation transcripts.

Works on the JSON form of a derivation only and does all algebra in sympy,
sharing no arithmetic with :mod:`cutpaste.kvar`. The expected hypothesis set
is rebuilt from ``m`` by expanding ``A L^k`` and ``A L^k (L-1)^(m-k)`` in
sympy.
"""

from __future__ import annotations

from typing import Mapping

import sympy as sp

__all__ = ["check_transcript", "TranscriptError"]

Lsym = sp.Symbol("L")


class TranscriptError(ValueError):
    pass


def _to_expr(data: Mapping) -> sp.Expr:
    expr = sum((sp.Integer(c) * Lsym**i for i, c in enumerate(data.get("L", []))), sp.Integer(0))
    for name, poly in data.get("atoms", {}).items():
        a = sp.Symbol(f"[{name}]")
        expr += a * sum((sp.Integer(c) * Lsym**i for i, c in enumerate(poly)), sp.Integer(0))
    return sp.expand(expr)


def _expected_hypotheses(m: int, A: str, B: str) -> set[tuple[sp.Expr, sp.Expr]]:
    a, b = sp.Symbol(f"[{A}]"), sp.Symbol(f"[{B}]")
    out = set()
    for k in range(1, m + 2):
        out.add((sp.expand(a * Lsym**k), sp.expand(b * Lsym**k)))
    for k in range(m):
        w = Lsym**k * (Lsym - 1) ** (m - k)
        out.add((sp.expand(a * w), sp.expand(b * w)))
    return out


def check_transcript(data: Mapping, m: int, A: str = "X", B: str = "Xtilde") -> bool:
    """Validate a derivation transcript; raise :class:`TranscriptError` on failure."""
    hyps = [(_to_expr(h["lhs"]), _to_expr(h["rhs"])) for h in data["hypotheses"]]
    if set(hyps) != _expected_hypotheses(m, A, B) or len(hyps) != 2 * m + 1:
        raise TranscriptError("hypotheses are not the expected relation set")

    cur = None
    for i, step in enumerate(data["steps"]):
        res = (_to_expr(step["result"]["lhs"]), _to_expr(step["result"]["rhs"]))
        op = step["op"]
        if op == "start":
            want = hyps[step["hyp"]]
        elif op == "combine":
            h = hyps[step["hyp"]]
            c = sp.Integer(step["coef"])
            want = (sp.expand(cur[0] + c * h[0]), sp.expand(cur[1] + c * h[1]))
        elif op == "scale":
            c = sp.Integer(step["coef"])
            if c not in (1, -1):
                raise TranscriptError(f"step {i}: scaling by {c} is not invertible over Z")
            want = (sp.expand(c * cur[0]), sp.expand(c * cur[1]))
        else:
            raise TranscriptError(f"step {i}: unknown op {op!r}")
        if sp.expand(want[0] - res[0]) != 0 or sp.expand(want[1] - res[1]) != 0:
            raise TranscriptError(f"step {i} ({op}) does not follow")
        cur = res

    concl = (_to_expr(data["conclusion"]["lhs"]), _to_expr(data["conclusion"]["rhs"]))
    if cur is None or concl != cur:
        raise TranscriptError("conclusion differs from the last step")
    if concl != (sp.Symbol(f"[{A}]"), sp.Symbol(f"[{B}]")):
        raise TranscriptError(f"conclusion is {concl}, not [{A}] = [{B}]")
    return True
