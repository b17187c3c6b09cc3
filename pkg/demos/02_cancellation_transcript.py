"""
Cancelling powers of L symbolically
===================================

Given the relations  [A] L^j = [B] L^j  for 1 <= j <= m  and
[A] (L-1)^m = [B] (L-1)^m, binomial expansion lets every L-power cancel,
leaving [A] = [B]. The derivation is emitted as a transcript that two
independent replayers re-check.
"""

import json

from cutpaste import kclass_normalize, kclass_realize, kv_cancellation_derive, replay
from cutpaste.kvar import kv_generate_relations
from cutpaste.replay_check import TranscriptError, check_transcript

# class arithmetic: P^3 = 1 + L + L^2 + L^3, and atoms stay opaque
c = kclass_normalize("P(3) + [Z]*L")
print(c, "->", kclass_realize(c, q=7, atoms={"Z": 10}), "points over F_7 when #Z = 10")

m = 3
for h in kv_generate_relations(m):
    print(f"{h.label:>10}:  {h.lhs}  =  {h.rhs}")

d = kv_cancellation_derive(m)
for step in d.steps:
    r = step["result"]
    print(f"{step['op']:>8} {step.get('coef', ''):>4}   {r.lhs}  =  {r.rhs}")

print("replayed conclusion:", replay(d))
print("sympy replayer accepts:", check_transcript(json.loads(d.dumps()), m))

# tampering with a single coefficient is caught
bad = json.loads(d.dumps())
bad["steps"][1]["coef"] += 1
try:
    check_transcript(bad, m)
except TranscriptError as exc:
    print("tampered transcript rejected:", exc)
