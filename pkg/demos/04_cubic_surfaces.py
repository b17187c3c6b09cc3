"""
Classes of smooth and nodal cubic surfaces
==========================================

A split smooth cubic surface has class L^2 + 7L + 1, so q^2 + 7q + 1
points over F_q and Euler number 9. We compare that with a brute-force
count, and do the same for a cubic with a single ordinary node.
"""

from cutpaste import MPoly, count_projective, field_create, kclass_normalize, kclass_realize
from cutpaste.pencil import make_split_nodal_cubic

smooth = kclass_normalize("L^2 + 7L + 1")
nodal_stated = kclass_normalize("L^2 + 4L + 2P(1)")

for q in (5, 7, 11):
    F = field_create(q)
    x = [MPoly.var(F, 4, i) for i in range(4)]
    fermat = x[0] ** 3 + x[1] ** 3 + x[2] ** 3 + x[3] ** 3
    print(f"q={q}: class {kclass_realize(smooth, q=q)}, Fermat cubic {count_projective([fermat], F).count}"
          " (its 27 lines are all rational only when q = 1 mod 3)")

print("Euler numbers:", kclass_realize(smooth, "euler"), kclass_realize(nodal_stated, "euler"))

# Projecting from the node identifies the surface, minus the lines through
# the node, with P^2 minus a conic; the six lines give q^2 + 1 + q * N, where
# N is the number of rational lines. When all six are rational: q^2 + 6q + 1.
for q in (5, 7, 11):
    F = field_create(q)
    n = make_split_nodal_cubic(F, seed=1)
    print(f"q={q}: split nodal cubic has {count_projective([n.F], F).count} points;"
          f" L^2 + 4L + 2P(1) realizes to {kclass_realize(nodal_stated, q=q)}")
