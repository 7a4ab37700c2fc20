from models.errors import InputError, UnsupportedError  # noqa: F401
from models.cone_space import (SpaceDescriptor, SpaceKind,  # noqa: F401
                               cone_distance, distance, euclidean_axes,
                               euclidean_origin, make_product_space,
                               pairwise_distances, scale)
from models.measures import (AtomicMeasure, HomogeneousMeasure,  # noqa: F401
                             TailSet, atomic_mass, decompose, is_counting,
                             restrict, tail_mass)
from models.mo_metric import (mo_distance, mo_distance_quadrature,  # noqa: F401
                              mo_integrand, prohorov_bruteforce,
                              prohorov_distance)
from models.prm import (BernoulliKernel, DiscreteKernel,  # noqa: F401
                        MarkedMeasure, NormPower, PrmSpec, ScaleBy, map_prm,
                        mark_prm, marked_mean, sample_prm, sample_prm_annuli,
                        sample_replicates)
from models.laplace import (RampFunction, StepFunction,  # noqa: F401
                            analytic_prm_laplace, empirical_laplace,
                            integrate_against, laplace_continuity_check,
                            laplace_exponent)
from models.regvar import (HeavyTailSampler, RadialLaw,  # noqa: F401
                           ScalingFunction, ScalingMode, empirical_tail_measure,
                           finite_t_mass, homogeneity_ratio, make_scaling,
                           rv_check, sample_vector, scaling_b)
from models.convergence import (ExperimentConfig, TightnessSpec,  # noqa: F401
                                build_empirical_pp, complete_convergence_experiment,
                                count_covariance, finite_n_mean,
                                integral_law_test, poisson_count_test,
                                tightness_diagnostic, tightness_thresholds)
from models.report import ConvergenceReport  # noqa: F401
