"""
Tranche properties against the RE weight
========================================

Sweeps the total direct RE weight for three RE default probabilities
(the scenario value, 1% and 40%).  Cheap RE credit lowers the attachment
point as the weight grows; expensive RE credit raises it.
"""

# %%
import sys

import numpy as np

from lhpp import load_config, sweep_w
from lhpp.sweeps import write_csv

cfg = load_config()
blocks = sweep_w(cfg, np.linspace(0.0, 1.0, 21), [cfg.pool.re_pd_T, 0.01, 0.40], workers=4)
write_csv(blocks, sys.stdout)

# %%
# Optimal weight under the size constraint alpha* <= alpha_max for each
# scenario, read off the sweep grid.
for b in blocks:
    ok = [r for r in b.rows if r.alpha_star <= cfg.structuring.alpha_max]
    best = min(ok, key=lambda r: r.pv01_re_bp) if ok else None
    print(f"# {b.scenario}: " + ("no feasible weight" if best is None else
          f"largest |PV01_RE| on grid at w={best.axis:.2f} ({best.pv01_re_bp:.4f} bp)"), file=sys.stderr)
