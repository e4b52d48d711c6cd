"""Sinh-arcsinh distributions: the SAS family, its two-piece and
skew-symmetric variants, maximum-likelihood fitting with profile-likelihood
intervals, asymmetry measures, Monte Carlo studies and QQ diagnostics."""

from ._validation import InsufficientDataError
from .asymmetry import (CjCurve, MultimodalError, UnimodalDensity, ag_measure, cj_curve,
                        cj_functional, find_mode, unimodal)
from .datasets import Dataset, load_teletraffic_synthetic, read_dataset
from .diagnostics import QqEnvelope, density_overlay, inside_fraction, qq_envelope
from .estimators import (FlexibleDistribution, NormalDistribution, SinhArcsinh,
                         SkewNormal, SkewSymmetricSinhArcsinh, TwoPieceSinhArcsinh)
from .inference import (PROFILE_LEVEL, Family, FitReport, ModelSpec, ProfileInterval,
                        compare_models, fit_ml, format_table, profile_interval)
from .montecarlo import SimCell, SimReport, SimScenario, bias_shrinks, read_scenarios, run_study
from .numerics import (BracketError, ConvergenceError, Interval, OptimizerSettings,
                       find_root, integrate, minimize)
from .sas import (SasParams, SymmetricSasParams, f0_cdf, f0_pdf, f0_quantile, sas_cdf,
                  sas_logpdf, sas_pdf, sas_quantile, sas_sample)
from .skewsym import SsSasParams, sssas_cdf, sssas_logpdf, sssas_pdf, sssas_quantile, sssas_sample
from .twopiece import (EPS, ISF, TWO_SIGMA, Parameterisation, TpSasParams, reparameterise,
                       tpsas_cdf, tpsas_logpdf, tpsas_moment, tpsas_pdf, tpsas_quantile,
                       tpsas_sample)

__version__ = "0.1.0"
