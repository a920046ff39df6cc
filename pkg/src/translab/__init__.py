"""Completeness of translates of polynomial-times-Gaussian generators on compact intervals."""

from .core import (DecayProbe, Grid, Interval, PolyGaussian, TabulatedGenerator,
                   eval_generator, eval_shift, gaussian_shift_factorization, lp_norm,
                   shift_envelope, sup_norm, superexp_check)
from .lambda_sets import (TranslationSet, blaschke_deficit_sums, classify, moebius_map,
                          reciprocal_partial_sums)
from .completeness import (annihilator_margin, best_approximation, build_dictionary,
                           completeness_sweep)
from .multipoly import MultiPoly
from .reduction import (ReductionProblem, ReductionState, assemble_A, coeff_step,
                        convergence_run, poly_base, poly_step, poly_vs_coeff_consistency,
                        span_representation)

__version__ = "0.1.0"
