"""Parameter sweeps over the number of RE loans and the RE weight, with CSV/JSON output."""
from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from .config import ScenarioConfig
from .errors import DomainError, InfeasibleError
from .instruments import Tranche
from .sensitivities import scenario_pool, tranche_pv01_re
from .structuring import optimal_attachment

CSV_HEADER = ("axis", "alpha_star", "spread", "delta_re", "pv01_re_bp")
SWEEP_MODES = ("fixed-total-w", "fixed-per-loan-w")


@dataclass(frozen=True)
class SweepRow:
    axis: float
    alpha_star: float
    spread: float
    delta_re: float
    pv01_re_bp: float


@dataclass
class SweepResult:
    """One block of sweep output.

    Attributes:
        axis_name: ``"n_re"`` or ``"w_re"``.
        scenario: free-text label written as a comment line above the block.
        rows: one row per axis value, in axis order.
    """

    axis_name: str
    scenario: str
    rows: list = field(default_factory=list)


def sweep_point(config: ScenarioConfig, n_re: int, w_re: float) -> SweepRow:
    """Senior tranche at its minimal attachment point for one (n, w) pair."""
    axis = math.nan
    pool = scenario_pool(config, n_re=n_re, w_re=w_re)
    try:
        alpha = optimal_attachment(w_re, pool, config.structuring, config.market)
    except InfeasibleError:
        return SweepRow(axis, math.nan, math.nan, math.nan, math.nan)
    rep = tranche_pv01_re(config, Tranche(alpha, 1.0), n_re=n_re, w_re=w_re)
    return SweepRow(axis, alpha, rep.coupon_spread, rep.delta, rep.pv01 * 1e4)


def _run(points, config, workers):
    def job(p):
        axis, n, w = p
        row = sweep_point(config, n, w)
        return SweepRow(float(axis), row.alpha_star, row.spread, row.delta_re, row.pv01_re_bp)

    if workers <= 1:
        return [job(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(job, points))


def sweep_n(config: ScenarioConfig, n_values, mode: str = "fixed-total-w",
            per_loan_w: float = 0.03, workers: int = 1) -> SweepResult:
    """Sweep the number of direct RE loans.

    Args:
        config: base scenario.
        n_values: numbers of loans, each >= 1.
        mode: ``"fixed-total-w"`` keeps ``pool.w_re``; ``"fixed-per-loan-w"``
            sets the total weight to ``n * per_loan_w``.
        per_loan_w: weight per loan in the second mode.
        workers: thread count; output order does not depend on it.
    """
    if mode not in SWEEP_MODES:
        raise DomainError(f"mode must be one of {SWEEP_MODES}")
    points = []
    for n in n_values:
        n = int(n)
        if n < 1:
            raise DomainError("n must be >= 1")
        w = config.pool.w_re if mode == "fixed-total-w" else n * per_loan_w
        if w > 1.0:
            raise DomainError(f"total RE weight {w} exceeds 1 at n={n}")
        points.append((n, n, w))
    label = f"mode={mode} w_re={config.pool.w_re!r}" if mode == "fixed-total-w" \
        else f"mode={mode} per_loan_w={per_loan_w!r}"
    return SweepResult("n_re", label, _run(points, config, workers))


def sweep_w(config: ScenarioConfig, w_values, scenario_pds=None,
            workers: int = 1) -> list[SweepResult]:
    """Sweep the total RE weight, one block per RE default-probability scenario."""
    pds = [config.pool.re_pd_T] if scenario_pds is None else list(scenario_pds)
    out = []
    for pd in pds:
        cfg = config.with_pool(re_pd_T=float(pd))
        points = [(float(w), cfg.pool.n_re, float(w)) for w in w_values]
        out.append(SweepResult("w_re", f"re_pd_T={float(pd)!r}", _run(points, cfg, workers)))
    return out


def _num(v: float) -> str:
    return "%.17g" % v


def write_csv(results, stream=None) -> str:
    """Write sweep blocks as CSV; each block starts with ``# scenario`` and the header."""
    if isinstance(results, SweepResult):
        results = [results]
    buf = io.StringIO()
    for res in results:
        buf.write(f"# scenario {res.axis_name} {res.scenario}\n")
        buf.write(",".join(CSV_HEADER) + "\n")
        for row in res.rows:
            buf.write(",".join(_num(getattr(row, k)) for k in CSV_HEADER) + "\n")
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def read_csv(text: str) -> list[SweepResult]:
    """Inverse of :func:`write_csv`."""
    out = []
    current = None
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("# scenario "):
            axis_name, _, label = line[len("# scenario "):].partition(" ")
            current = SweepResult(axis_name, label)
            out.append(current)
        elif line == ",".join(CSV_HEADER):
            if current is None:
                current = SweepResult("axis", "")
                out.append(current)
        else:
            values = [float(x) for x in line.split(",")]
            if len(values) != len(CSV_HEADER) or current is None:
                raise ValueError(f"malformed sweep row: {line!r}")
            current.rows.append(SweepRow(*values))
    return out


def to_json(results) -> str:
    if isinstance(results, SweepResult):
        results = [results]
    blocks = [{"axis_name": r.axis_name, "scenario": r.scenario,
               "rows": [asdict(row) for row in r.rows]} for r in results]
    return json.dumps(blocks, indent=2, sort_keys=True)
