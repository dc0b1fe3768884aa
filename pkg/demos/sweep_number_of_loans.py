"""
Tranche properties against the number of RE loans
=================================================

Two ways of adding loans: keep the total RE weight fixed (each loan gets
smaller) or keep each loan's weight fixed (the RE share grows).  Writes the
sweep as CSV for external plotting.
"""

# %%
import sys

from lhpp import load_config, sweep_n
from lhpp.sweeps import write_csv

cfg = load_config()
ns = range(1, 31)

# %%
# Fixed total weight: diversification lowers the attachment point while
# the par spread barely moves, since the expected-loss bound pins it.
fixed_total = sweep_n(cfg, ns, mode="fixed-total-w", workers=4)

# %%
# Fixed per-loan weight of 3%: more RE exposure means a higher attachment
# point and a larger RE sensitivity.
fixed_each = sweep_n(cfg, ns, mode="fixed-per-loan-w", per_loan_w=0.03, workers=4)

write_csv([fixed_total, fixed_each], sys.stdout)
