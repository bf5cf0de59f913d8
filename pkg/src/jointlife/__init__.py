"""Joint life insurance pricing and robust risk bounds under copula uncertainty."""

from .bounds import (BoundResult, EpsilonMax, FeasibleRegion, build_region,
                     epsilon_for_family, epsilon_max, es_bounds, mean_bounds,
                     mean_bounds_linear, r_curve, sweep, var_bounds)
from .canonical import (CanonicalForm, build_canonical, direct_risk_oracle,
                        evaluate)
from .contracts import (Contract, PayoffSpec, PriceLinearForm,
                        calibrate_levels, joint_life_annuity,
                        joint_life_insurance, last_survivor_annuity,
                        last_survivor_insurance, payoff_spec,
                        price_linear_form, reversionary_annuity,
                        widows_pension)
from .copulas import (CopulaEvaluator, comonotone, countermonotone, gumbel,
                      gumbel_summaries, independence, kendalls_tau_numeric,
                      survival_transform, tankov_bounds, tau_band_bounds)
from .lp import LinearProgram, LPResult, SolverFailure, solve
from .marginals import GompertzMarginal
from .montecarlo import (EmpiricalMeasures, SimulationConfig,
                         empirical_measures, sample_copula, simulate_payoffs)
from .riskmeasures import (DistortionFunction, distortion_integral, es_measure,
                           h_eval, mean_measure, measures_from_discrete,
                           var_measure)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
