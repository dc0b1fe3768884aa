"""Tranche analytics for pools of bank loans plus a few large renewable-energy loans.

The pool is an infinitely granular bank portfolio on a one-factor Gaussian
copula together with ``n`` equally weighted RE loans.  The package prices
CDO tranches on it, measures their sensitivity to RE spreads (including the
feedback through the banks' own RE exposure) and picks the senior
attachment point and RE weight.
"""
from .config import ScenarioConfig, apply_overrides, dump_config, load_config, parse_config
from .errors import (ApproximationError, BracketError, ConfigError, DomainError, InfeasibleError,
                     LHPPError, NumericalError, ParameterError)
from .instruments import (MarketParams, SurvivalCurve, Tranche, loan_par_spread, loan_price,
                          loan_price_curve, tranche_par_spread, tranche_price, tranche_survival,
                          tranche_survival_curve)
from .loss_model import (PoolParams, attachment_threshold, default_prob, expected_capped_loss,
                         expected_capped_loss_lhplus, expected_loss, hazard_from_pd,
                         loss_exceed_prob, loss_exceed_prob_lhplus)
from .mc_oracle import McEstimate, McSettings
from .merton import (BalanceSheet, CorrelationTriple, EnlargedMoments, enlarge_balance_sheet,
                     enlarged_pd, implied_asset_vol, merton_pd)
from .sensitivities import (SensitivityReport, bank_state, loan_pv01, perturbed_hazard,
                            scenario_pool, tranche_delta_re, tranche_pv01_re)
from .structuring import (StructuringResult, StructuringSpec, el_constraint_gap,
                          optimal_attachment, optimal_weight)
from .sweeps import SweepResult, sweep_n, sweep_w

__version__ = "0.1.0"

__all__ = [
    "ApproximationError",
    "BalanceSheet",
    "BracketError",
    "ConfigError",
    "CorrelationTriple",
    "DomainError",
    "EnlargedMoments",
    "InfeasibleError",
    "LHPPError",
    "MarketParams",
    "McEstimate",
    "McSettings",
    "NumericalError",
    "ParameterError",
    "PoolParams",
    "ScenarioConfig",
    "SensitivityReport",
    "StructuringResult",
    "StructuringSpec",
    "SurvivalCurve",
    "SweepResult",
    "Tranche",
    "apply_overrides",
    "attachment_threshold",
    "bank_state",
    "default_prob",
    "dump_config",
    "el_constraint_gap",
    "enlarge_balance_sheet",
    "enlarged_pd",
    "expected_capped_loss",
    "expected_capped_loss_lhplus",
    "expected_loss",
    "hazard_from_pd",
    "implied_asset_vol",
    "load_config",
    "loan_par_spread",
    "loan_price",
    "loan_price_curve",
    "loan_pv01",
    "loss_exceed_prob",
    "loss_exceed_prob_lhplus",
    "merton_pd",
    "optimal_attachment",
    "optimal_weight",
    "parse_config",
    "perturbed_hazard",
    "scenario_pool",
    "sweep_n",
    "sweep_w",
    "tranche_delta_re",
    "tranche_par_spread",
    "tranche_price",
    "tranche_pv01_re",
    "tranche_survival",
    "tranche_survival_curve",
]
