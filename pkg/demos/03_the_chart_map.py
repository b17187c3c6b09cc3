"""
An explicit chart map and its inverse
=====================================

phi sends a point (x, t) of X0 together with a vector (y, lambda) to a
point of the universal family chart; phi_inverse recovers the input. We
sample both over the prime field and over F_{q^2} and tally where the
formulas are undefined.
"""

from cutpaste import field_create, make_pencil, phi_forward, phi_inverse
from cutpaste.pencil import PhiDomainError, phi_roundtrip_harness, x0_points

F7 = field_create(7)
X = make_pencil(F7, 3, seed=1)

xs, ts = x0_points(X)
print("rational points of X0:", len(xs))



def codes(parts):
    return [[e.code for e in v] if isinstance(v, (list, tuple)) else v.code for v in parts]


# one point by hand
x, t = xs[0].tolist(), int(ts[0])
try:
    image = phi_forward(X, x, t, [1, 2, 3], 4)
    print("phi:", codes(image))
    back = phi_inverse(X, *image)
    print("inverse:", codes(back), "from", (x, t, [1, 2, 3], 4))
except PhiDomainError as exc:
    print("outside the domain:", exc)

# the skip rate shrinks roughly like 1/q^k: the exceptional set is where
# F(x) = 0 or where the lambda-coefficient of the image vanishes
for k in (1, 2):
    st = phi_roundtrip_harness(X, 2000, seed=0, field=field_create(7, k))
    print(f"k={k}: {st['roundtrips_ok']}/{st['valid']} exact, "
          f"{st['images_on_chart']} on the chart, skip rate {st['skip_rate']:.3f}")
