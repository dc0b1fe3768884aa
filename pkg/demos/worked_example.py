"""
Worked example: senior tranche on the bundled scenario
======================================================

Calibrates the bank balance sheet, finds the minimal senior attachment
point that satisfies the AAA expected-loss bound, prices the tranche and
measures its sensitivity to a one basis point widening of the RE spread.
"""

# %%
import math

from lhpp import (MarketParams, Tranche, bank_state, hazard_from_pd, load_config, loan_pv01,
                  optimal_attachment, scenario_pool, tranche_par_spread, tranche_pv01_re)

cfg = load_config()
T = cfg.market.maturity

# %%
# Balance-sheet enlargement: the banks' own RE book raises their volatility
# and correlation slightly, and with it their default probability.
st = bank_state(cfg)
print(f"bank asset vol {st.sigma_bank:.6f}, RE asset vol {st.sigma_re:.6f}")
print(f"enlarged vol {st.moments.sigma_bar:.6f}, bank-bank corr {st.moments.rho_bar:.6f}, "
      f"bank-RE corr {st.moments.rho_bar_bre:.6f}")
print(f"bank PD {cfg.pool.bank_pd_T} -> {st.pd:.6f}")

# %%
# A single RE loan first: its PV01 under a one basis point spread bump.
lam = hazard_from_pd(cfg.pool.re_pd_T, T)
print(f"\nRE loan PV01: {loan_pv01(lam, cfg.pool.recovery_re, MarketParams(0.0, T)) * 1e4:.4f} bp")

# %%
# Senior tranche for nine and for five RE loans.
for n in (9, 5):
    c = cfg.with_pool(n_re=n)
    pool = scenario_pool(c)
    a = optimal_attachment(c.pool.w_re, pool, c.structuring, c.market)
    tr = Tranche(a, 1.0)
    s = tranche_par_spread(tr, pool, c.market)
    rep = tranche_pv01_re(c, tr)
    print(f"n={n}: attachment {a:.4f}, par spread {s * 1e4:.3f} bp, "
          f"PV01_RE {rep.pv01 * 1e4:.4f} bp, delta_RE {rep.delta:.4f}")

# %%
# Correlation stress: all asset correlations at sqrt(0.5).  The senior
# tranche needs far more subordination, and its RE sensitivity shrinks.
r = math.sqrt(0.5)
c = cfg.with_pool(n_re=5, rho_bank=r, rho_re=r, rho_cross=r)
pool = scenario_pool(c)
a = optimal_attachment(c.pool.w_re, pool, c.structuring, c.market)
rep = tranche_pv01_re(c, Tranche(a, 1.0))
print(f"stress: attachment {a:.4f}, PV01_RE {rep.pv01 * 1e4:.4f} bp")
