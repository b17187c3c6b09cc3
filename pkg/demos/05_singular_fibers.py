"""
Singular fibers and Euler characteristics
=========================================

A pencil of degree m has s = 32m singular fibers over the algebraic
closure. Over F_{q^k} we only see the rational ones, and Moebius
inversion turns those counts into closed points of each degree.
"""

from cutpaste import count_singular_fibers, euler_formulas, field_create, make_pencil
from cutpaste.count import closed_point_counts

for m in (1, 2, 3, 10):
    e = euler_formulas(m)
    print(f"m={m}: chi(X) = {e['chi_X']}, s = {e['s']}, 18 - s = {e['eighteen_minus_s']}")

X = make_pencil(field_create(5), 1, seed=1)
a = {k: count_singular_fibers(X, k).count for k in (1, 2, 3)}
print("singular fibers over F_5, F_25, F_125:", a)
print("closed points by degree:", closed_point_counts(a))
print("nodes accounted for so far:", sum(d * b for d, b in closed_point_counts(a).items()), "of", 32)
