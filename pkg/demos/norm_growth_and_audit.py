# How fast the propagator norm grows, and how many digits a run needs.
#
# ||exp(-iht)|| climbs like exp(2 gamma t) before saturating near the
# eigenvector condition number r^(L-1). That same number sets the working
# precision an eigensolve needs, which the audit helper estimates by
# fitting log10(cond) against small probe sizes and extrapolating.

import math

from skinbench import mpcore, models, gaussdyn
from skinbench.cli import audit_precision

ctx = mpcore.PrecisionContext(50)

# 1. norm growth on a short chain
L = 10
H = models.build(models.ModelSpec("hn", L, J=1.0, gamma=0.8), ctx)
series = gaussdyn.propagator_norm_series(H, 0.25, 12.0, ctx)
print("log ||exp(-iht)||, L = %d, gamma = 0.8" % L)
print("%6s %12s" % ("t", "log norm"))
for t, v in series[::4]:
    print("%6.2f %12.4f" % (float(t), float(v)))
cap = (L - 1) * math.log(3.0)
print("growth rate 2*gamma = 1.6, saturation cap ln(r^(L-1)) = %.2f" % cap)

# 2. precision audit for a larger target
print()
spec = models.ModelSpec("hn", 20, J=1.0, gamma=0.8)
digits, details = audit_precision(spec, [6, 8, 10, 12], 40,
                                  mpcore.PrecisionContext(30))
print("probe fit: slope %.4f decades/site (log10 r = %.4f)" % (
    details["slope"], math.log10(math.sqrt(9.0))))
print("extrapolated decades at L = 40: %d" % details["extrapolated_decades"])
print("recommended working digits: %d" % digits)
