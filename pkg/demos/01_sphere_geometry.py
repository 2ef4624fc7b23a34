# Geometry on the sphere
#
# Everything the regression needs from a manifold: exponential and log maps,
# parallel transport, the adjoint differentials of Exp and the normalizing
# constant of the Riemannian normal law.

import numpy as np

from geomreg import RiemannianNormal, Sphere, normalizing_constant, sample
from geomreg.stats import expected_squared_distance

S = Sphere(3)
north = np.array([0.0, 0.0, 1.0])

# A quarter great circle from the north pole towards +x.
v = np.array([np.pi / 2, 0.0, 0.0])
p = S.exp(north, v)
print("Exp(north, v) =", p.round(12))
print("Log(north, p) =", S.log(north, p).round(12))
print("d(north, p)   =", S.dist(north, p))

# Transport a vector along that geodesic.  The component along the motion
# turns with the curve, the orthogonal one is unchanged on S^2.
w = np.array([0.3, 0.4, 0.0])
print("transported   =", S.transport(north, v, w).round(12))

# Adjoint differentials pull a residual at Exp(mu, v) back to mu.
print("base adjoint  =", S.dexp_base_adjoint(north, v, np.array([0.0, 1.0, 0.0])).round(12))
print("vel. adjoint  =", S.dexp_velocity_adjoint(north, v, np.array([0.0, 1.0, 0.0])).round(12))

# The normalizing constant C(tau) interpolates between the sphere area at
# tau = 0 and the Gaussian constant 2 pi / tau for large tau.
for tau in (0.0, 1.0, 10.0, 100.0, 1e4):
    c = normalizing_constant(S, tau)
    print(f"tau={tau:>8g}  C={c:.6f}  2pi/tau={2 * np.pi / tau if tau else np.inf:.6f}")

# Samples from the Riemannian normal law reproduce E[d^2] = -2 dlogC/dtau.
rng = np.random.default_rng(0)
ys = sample(RiemannianNormal(S, north, 4.0), rng, 50_000)
print("empirical E[d^2] =", np.mean(S.dist(north, ys) ** 2))
print("exact     E[d^2] =", expected_squared_distance(S, 4.0))
