"""
Counting points on a pencil of cubic surfaces
=============================================

Build two pencils that share the cubics G and F but differ in the binary
forms (alpha, beta), count their total spaces over F_q and F_{q^2}, and
split each count into the pieces X0, S_inf and Z x A^1.
"""

from cutpaste import count_locus, count_pencil, field_create, make_pencil, verdict_equality

q, m = 7, 3
F7 = field_create(q)

# a certified pencil {alpha(t) G(x) + beta(t) F(x) = 0} in P^3 x P^1
X = make_pencil(F7, m, seed=1)
# same G and F, fresh alpha and beta of degree m
Xt = make_pencil(F7, m, seed=2, shared=X)

print("G     =", X.G)
print("alpha =", X.alpha, "   alpha~ =", Xt.alpha)
print("certificates:", {name: c.passed for name, c in X.certificates.items()})

# total-space counts, fiber by fiber over P^1(F_{q^k})
for k in (1, 2):
    a, b = count_pencil(X, k), count_pencil(Xt, k)
    print(f"k={k}:  #X = {a.count:>8}   #Xtilde = {b.count:>8}   difference {a.count - b.count}")

# each count splits as  X0  +  S_inf  +  q^k * #Z
for name, p in (("X", X), ("Xtilde", Xt)):
    parts = {loc: count_locus(p, loc).count for loc in ("X0", "S_inf", "Z")}
    total = parts["X0"] + parts["S_inf"] + q * parts["Z"]
    print(name, parts, "->", total, "==", count_pencil(p).count)

# the pieces coming from G and F alone agree; only X0 moves with alpha, beta
print("Z:", count_locus(X, "Z").count, count_locus(Xt, "Z").count)
print("S_inf:", count_locus(X, "S_inf").count, count_locus(Xt, "S_inf").count)

# the same comparison, packaged with its applicability guards
res = verdict_equality(X, Xt, [1, 2])
for row in res["rows"]:
    print(row)
