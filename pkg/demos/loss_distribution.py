"""
Loss distribution of a bank pool with a few large RE loans
==========================================================

The granular bank leg has a smooth loss distribution; every direct RE
default adds a discrete jump of ``N0 (1 - R0)``.  This script tabulates the
tail ``P(L > x)`` for a growing number of RE loans at a fixed total RE
weight and compares one point with a Monte Carlo run.
"""

# %%
# Pool parameters from the bundled example scenario (raw bank PD, no
# balance-sheet enlargement here).
import numpy as np

from lhpp import PoolParams, expected_capped_loss, hazard_from_pd, load_config, loss_exceed_prob
from lhpp.mc_oracle import McSettings, mc_pool_loss

cfg = load_config()
T = cfg.market.maturity
base = PoolParams(
    lambda_bank=hazard_from_pd(cfg.pool.bank_pd_T, T),
    lambda_re=hazard_from_pd(cfg.pool.re_pd_T, T),
    recovery_bank=cfg.pool.recovery_bank,
    recovery_re=cfg.pool.recovery_re,
    rho_bank=cfg.pool.rho_bank,
    rho_re=cfg.pool.rho_re,
    n_re=cfg.pool.n_re,
    w_re=cfg.pool.w_re,
)

# %%
# Tail probabilities.  With a single loan the tail has a visible step at
# the loss of one RE default; with many loans the RE leg starts to look
# granular too.
xs = np.linspace(0.05, 0.45, 9)
print("x      " + "  ".join(f"n={n:<4d}" for n in (1, 3, 9, 30)))
for x in xs:
    row = [loss_exceed_prob(x, T, base.with_(n_re=n)) for n in (1, 3, 9, 30)]
    print(f"{x:.3f}  " + "  ".join(f"{v:.4f}" for v in row))

# %%
# The same quantity from brute-force simulation of the copula.
est = mc_pool_loss([0.3], T, base, McSettings(paths=1_000_000, seed=1))
print(f"\nP(L > 0.3): closed form {loss_exceed_prob(0.3, T, base):.5f}, "
      f"MC {est.exceed[0].mean:.5f} +/- {est.exceed[0].std_error:.5f}")
print(f"E[min(L, 0.3)]: closed form {expected_capped_loss(0.3, T, base):.6f}, "
      f"MC {est.capped[0].mean:.6f} +/- {est.capped[0].std_error:.6f}")
