"""
Balance-sheet enlargement against simulation
============================================

A bank that books an RE loan of face ``F0`` holds assets ``A + F`` against
debt ``D0 + F0``.  The closed-form moments linearise ``ln(A1 + F1)``; this
script compares them with Monte Carlo moments of the same expression and
the first-order bank PD with a simulation of the exact balance sheet.
"""

# %%
from lhpp import (BalanceSheet, CorrelationTriple, enlarge_balance_sheet, enlarged_pd,
                  implied_asset_vol)
from lhpp.mc_oracle import McSettings, mc_enlarged_moments, mc_exact_enlarged_pd

sigma_b = implied_asset_vol(0.199, 0.9, 10.0)
sigma_r = implied_asset_vol(0.2421, 0.9, 10.0)
corr = CorrelationTriple(0.1758, 0.1170, 0.1434)
mc = McSettings(paths=4_000_000, seed=2)

# %%
# Growing RE books: the linearisation stays close to the exact balance
# sheet while the RE weight is small.
print("F0/A0   sigma_bar   (MC var)          rho_bar  (MC)      PD first-order  PD exact (MC)")
for k in (0.0, 0.01, 0.05, 0.2):
    bs = BalanceSheet(0.9, k, sigma_b, sigma_r)
    m = enlarge_balance_sheet(bs, corr)
    est = mc_enlarged_moments(bs, corr, mc, workers=4)
    exact = mc_exact_enlarged_pd(bs, corr, 10.0, mc, workers=4)
    print(f"{k:5.2f}   {m.sigma_bar:.6f}  ({est.var.mean ** 0.5:.6f})   {m.rho_bar:.5f} ({est.rho_ij.mean:.5f})   "
          f"{enlarged_pd(bs, m.sigma_bar, 10.0):.5f}         {exact.mean:.5f} +/- {exact.std_error:.5f}")
