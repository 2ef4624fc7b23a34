"""Bayesian geodesic regression on spheres and planar shape spaces."""

from .baselines import (LinearModel, PrincipalBasis, fit_blr_ard, fit_ols, fit_pca,
                        fit_tangent_pga)
from .errors import (ContractError, ConvergenceError, DomainError, GeomRegError,
                     NumericalError, ParseError, ValidationError)
from .evaluation import (EvalReport, compare_models, permutation_pvalue, permutation_test,
                         pvalue_from_replicates, r_squared)
from .manifolds import Euclidean, Manifold, PreshapeSphere, Sphere, make_manifold
from .regression import (MODES, Dataset, FitConfig, FitReport, GeodesicModel,
                         PolynomialBasis, energy, fit, grad_mu, grad_tau, grad_v, predict,
                         prune, update_alphas)
from .shapes import (LandmarkShape, ShapeSet, dataset_to_shapes, from_preshape,
                     generate_pentagons, generate_sphere_dataset, procrustes_align,
                     shapes_to_dataset, to_preshape)
from .stats import (DEFAULT_QUAD, QuadratureConfig, RiemannianNormal, frechet_mean,
                    log_likelihood, log_normalizing_constant, normalizing_constant,
                    normalizing_constant_dtau, sample)

__version__ = "0.1.0"
