"""
Gaussian fields indexed by sets of finite measure, their reproducing kernel
Hilbert spaces, and the concrete models built on them: fractional Brownian
motion, time-changed Brownian motion, graph Laplacians with reversible
chains, and Shannon sampling.
"""

from .measures import (AtomicMeasure, CantorMeasure, DensityMeasure, LebesgueMeasure, Measure,
                       MeasureDomainError, Partition, Region, common_refinement, cumulative,
                       intersection_measure, measure_from_config, measure_of, refine)
from .kernels import (GramMatrix, KernelSpec, NotRepresentableError, SignedMeasureElement, beta_kernel,
                      check_pd, gram, membership_bound, rkhs_norm_sq, signed_measure_eval,
                      signed_measure_norm_sq)
from .field import (FactorizationError, FieldSpec, OrthonormalBasis, PathEnsemble, Polynomial,
                    SimpleFunction, cross_variation, gaussian_ibp_check, ito_integral, kl_sample,
                    moment_identity_check, quadratic_variation, radon_nikodym_check, sample_coupled,
                    sample_field)
from .fbm import (FactorKernel, HurstModel, factor_kernel_eval, factorization_gram, fbm_covariance,
                  filtration_split, paley_wiener_norm, semimartingale_check, simulate_fbm,
                  spectral_covariance)
from .timechange import (TimeChange, diffusion_solve, ito_formula_residual, mc_vs_pde, simulate_tc,
                         tc_covariance, tc_quadratic_variation)
from .graph import (WeightedGraph, adjoint_check, energy_inner, energy_kernel, greens_identity_check,
                    laplacian_apply, markov_kernel, simulate_chain, variance_decomposition_check)
from .shannon import BandlimitedSignal, isometry_check, reconstruct, sample, sinc, sinc_kernel
from .checks import VerificationReport, list_checks, run_checks

__version__ = "0.1.0"
