# On flat space the model is ordinary linear regression
#
# Exp is addition and Log is subtraction, so geodesic regression must return
# the least squares solution and BGRM must agree with Bayesian linear
# regression under ARD.

import numpy as np

from geomreg import Dataset, Euclidean, fit, fit_blr_ard, fit_ols

rng = np.random.default_rng(1)
n, d = 80, 3
X = rng.standard_normal((n, 3))
B = np.array([[1.0, -2.0, 0.5], [0.3, 0.0, 1.0], [0.0, 0.0, 0.0]])  # third covariate unused
Y = np.array([2.0, 0.0, -1.0]) + X @ B + 0.2 * rng.standard_normal((n, d))
data = Dataset(X, Y, Euclidean(d))

ols = fit_ols(data)
geo, _ = fit(data, mode="geodesic")
print("max |geodesic - OLS| slopes   :", np.abs(geo.slope_columns() - ols.slopes).max())
print("max |geodesic - OLS| intercept:", np.abs(geo.intercept() - ols.intercept).max())

blr = fit_blr_ard(data)
bg, rep = fit(data, mode="bgrm")
print("BLR active:", blr.active, " BGRM active:", bg.active, " pruned:", rep.pruned_columns)
print("max |bgrm - BLR| slopes:", np.abs(bg.slope_columns() - blr.slopes).max())
print("noise precision: OLS", ols.precision, " BLR", blr.precision, " BGRM", bg.tau)
