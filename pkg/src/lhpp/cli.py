"""Command-line front end.

Commands: price, sensitivity, optimize, sweep-n, sweep-w, validate.
Exit codes: 0 success, 1 infeasible, 2 validation failure, 3 config error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .config import ScenarioConfig, apply_overrides, load_config
from .errors import ConfigError, DomainError, InfeasibleError, LHPPError
from .instruments import Tranche, tranche_par_spread, tranche_price, tranche_survival_curve
from .loss_model import expected_capped_loss, loss_exceed_prob
from .mc_oracle import mc_enlarged_moments, mc_exact_enlarged_pd, mc_pool_loss, mc_tranche_survival
from .merton import BalanceSheet, CorrelationTriple
from .sensitivities import BUMP, bank_state, scenario_pool, tranche_pv01_re
from .structuring import optimal_attachment, optimal_weight
from .sweeps import sweep_n, sweep_w, to_json, write_csv

EXIT_OK, EXIT_INFEASIBLE, EXIT_VALIDATION, EXIT_CONFIG = 0, 1, 2, 3
BP = 1e4
VALIDATION_ALPHAS = (0.1, 0.3, 0.5)


def _tranche(config: ScenarioConfig, attach=None, detach=None) -> Tranche:
    if attach is None:
        pool = scenario_pool(config)
        attach = optimal_attachment(config.pool.w_re, pool, config.structuring, config.market)
    return Tranche(float(attach), 1.0 if detach is None else float(detach))


def cmd_price(config: ScenarioConfig, tranche: Tranche | None = None,
              spread: float | None = None) -> dict:
    """Par spread, price at ``spread`` and survival-curve samples of a tranche."""
    tranche = tranche or _tranche(config)
    pool = scenario_pool(config)
    par = tranche_par_spread(tranche, pool, config.market)
    s = par if spread is None else spread
    T = config.market.maturity
    times = np.linspace(0.0, T, int(math.ceil(T)) + 1)
    q = tranche_survival_curve(times, tranche, pool)
    return {
        "attach": tranche.attach,
        "detach": tranche.detach,
        "par_spread": par,
        "par_spread_bp": par * BP,
        "coupon_spread": s,
        "price": tranche_price(tranche, s, pool, config.market),
        "bank_hazard": pool.lambda_bank,
        "re_hazard": pool.lambda_re,
        "bank_rho_enlarged": pool.rho_bank,
        "survival_times": [float(t) for t in times],
        "survival": [float(v) for v in q],
    }


def cmd_sensitivity(config: ScenarioConfig, tranche: Tranche | None = None,
                    bump: float = BUMP) -> dict:
    tranche = tranche or _tranche(config)
    rep = tranche_pv01_re(config, tranche, bump=bump)
    return {
        "attach": tranche.attach,
        "detach": tranche.detach,
        "bump": bump,
        "coupon_spread": rep.coupon_spread,
        "coupon_spread_bp": rep.coupon_spread * BP,
        "base_value": rep.base_value,
        "bumped_value": rep.bumped_value,
        "pv01_re": rep.pv01,
        "pv01_re_bp": rep.pv01 * BP,
        "loan_pv01": rep.loan_pv01,
        "loan_pv01_bp": rep.loan_pv01 * BP,
        "delta_re": rep.delta,
    }


def cmd_optimize(config: ScenarioConfig) -> dict:
    """Optimal direct-RE weight and attachment point.

    Raises:
        InfeasibleError: if no weight meets the size constraint.
    """
    pool = scenario_pool(config)

    def pv01(w, alpha, s):
        return tranche_pv01_re(config, Tranche(alpha, 1.0), s, w_re=w).pv01

    res = optimal_weight(pool, config.structuring, config.market, pv01)
    return {
        "w_star": res.w_star,
        "alpha_star": res.alpha_star,
        "alpha_max": config.structuring.alpha_max,
        "constraint": config.structuring.constraint,
        "spread": res.spread,
        "spread_bp": res.spread * BP,
        "pv01_re": res.pv01_re,
        "pv01_re_bp": res.pv01_re * BP,
        "binding": res.binding,
        "characterization_ok": res.characterization_ok,
    }


def cmd_sweep_n(config: ScenarioConfig, n_values, mode: str = "fixed-total-w",
                per_loan_w: float = 0.03, workers: int = 1):
    return [sweep_n(config, n_values, mode, per_loan_w, workers)]


def cmd_sweep_w(config: ScenarioConfig, w_values, scenario_pds=None, workers: int = 1):
    return sweep_w(config, w_values, scenario_pds, workers)


def _check(name: str, closed: float, est, se_floor: float = 0.0) -> dict:
    z = est.z_score(closed, se_floor)
    return {
        "name": name,
        "closed_form": closed,
        "mc_mean": est.mean,
        "mc_se": est.std_error,
        "z": z,
        "pass": bool(z <= 3.0),
    }


def cmd_validate(config: ScenarioConfig, workers: int = 1) -> dict:
    """Compare every closed form with its Monte Carlo oracle.

    Pool-loss checks use a standard-error floor of ``1 / paths`` so that
    tiny runs with zero sample variance do not fail spuriously.
    """
    mc, T = config.mc, config.market.maturity
    pool = scenario_pool(config)
    floor = 1.0 / mc.paths
    checks = []
    est = mc_pool_loss(VALIDATION_ALPHAS, T, pool, mc, workers)
    for a, e_hit, e_cap in zip(VALIDATION_ALPHAS, est.exceed, est.capped):
        checks.append(_check(f"loss_exceed_prob(alpha={a})", loss_exceed_prob(a, T, pool), e_hit, floor))
        checks.append(_check(f"expected_capped_loss(alpha={a})", expected_capped_loss(a, T, pool),
                             e_cap, floor))
    attach = config.structuring.alpha_max
    if 0.0 <= attach < 1.0:
        tr = Tranche(attach, 1.0)
        q = float(tranche_survival_curve(T, tr, pool)[0])
        checks.append(_check(f"tranche_survival({attach}, 1)", q,
                             mc_tranche_survival(T, attach, 1.0, pool, mc, workers), floor))

    state = bank_state(config)
    report = {"paths": mc.paths, "seed": mc.seed, "chunk": mc.chunk}
    if state.moments is not None:
        bs = BalanceSheet(config.bank.leverage, config.bank.re_loan_weight,
                          state.sigma_bank, state.sigma_re)
        corr = CorrelationTriple(config.pool.rho_bank, config.pool.rho_re, config.pool.cross)
        mom = mc_enlarged_moments(bs, corr, mc, workers)
        m = state.moments
        checks.append(_check("enlarged_variance", m.sigma_bar ** 2, mom.var))
        checks.append(_check("enlarged_rho_bank", m.rho_bar, mom.rho_ij))
        checks.append(_check("enlarged_rho_bank_re", m.rho_bar_bre, mom.rho_bre))
        exact = mc_exact_enlarged_pd(bs, corr, T, mc, workers)
        report["enlarged_pd_first_order"] = state.pd
        report["enlarged_pd_exact_mc"] = exact.mean
        report["enlarged_pd_exact_mc_se"] = exact.std_error
    report["checks"] = checks
    report["all_pass"] = all(c["pass"] for c in checks)
    return report


def _emit(payload, fmt: str, out):
    if fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = ["key,value"]
        for k in sorted(payload):
            v = payload[k]
            if isinstance(v, float):
                v = "%.17g" % v
            elif isinstance(v, (list, dict)):
                v = json.dumps(v, sort_keys=True).replace(",", ";")
            lines.append(f"{k},{v}")
        text = "\n".join(lines) + "\n"
    return _write(text, out)


def _write(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _range(lo: float, hi: float, steps: int) -> list[float]:
    return [float(x) for x in np.linspace(lo, hi, steps)]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lhpp", description="LH++ tranche analytics")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario file (default: bundled example)")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a config field (repeatable)")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--paths", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--chunk", type=int)
    common.add_argument("--workers", type=int, default=1)

    tranche = argparse.ArgumentParser(add_help=False)
    tranche.add_argument("--attach", type=float, help="default: minimal admissible attachment")
    tranche.add_argument("--detach", type=float, default=1.0)

    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("price", parents=[common, tranche], help="tranche par spread and price")
    sp.add_argument("--spread", type=float, help="coupon spread (decimal); default par")
    sp = sub.add_parser("sensitivity", parents=[common, tranche], help="PV01_RE and delta_RE")
    sp.add_argument("--bump", type=float, default=BUMP)
    sub.add_parser("optimize", parents=[common], help="optimal RE weight and attachment")
    sp = sub.add_parser("sweep-n", parents=[common], help="sweep over the number of RE loans")
    sp.add_argument("--n-min", type=int, default=1)
    sp.add_argument("--n-max", type=int, default=30)
    sp.add_argument("--mode", choices=("fixed-total-w", "fixed-per-loan-w"), default="fixed-total-w")
    sp.add_argument("--per-loan-w", type=float, default=0.03)
    sp = sub.add_parser("sweep-w", parents=[common], help="sweep over the RE weight")
    sp.add_argument("--w-min", type=float, default=0.0)
    sp.add_argument("--w-max", type=float, default=1.0)
    sp.add_argument("--w-steps", type=int, default=21)
    sp.add_argument("--scenario-pds", type=_floats, default=None,
                    help="comma-separated RE default probabilities (default: config, 0.01, 0.40)")
    sub.add_parser("validate", parents=[common], help="check closed forms against Monte Carlo")
    return p


def _load(args) -> ScenarioConfig:
    cfg = load_config(args.config)
    if args.set:
        cfg = apply_overrides(cfg, args.set)
    mc = {k: getattr(args, k) for k in ("paths", "seed", "chunk") if getattr(args, k) is not None}
    if mc:
        cfg = apply_overrides(cfg, [f"mc.{k}={v}" for k, v in mc.items()])
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        cmd = args.command
        if cmd in ("sweep-n", "sweep-w"):
            if cmd == "sweep-n":
                res = cmd_sweep_n(cfg, range(args.n_min, args.n_max + 1), args.mode,
                                  args.per_loan_w, args.workers)
            else:
                pds = args.scenario_pds or [cfg.pool.re_pd_T, 0.01, 0.40]
                res = cmd_sweep_w(cfg, _range(args.w_min, args.w_max, args.w_steps), pds,
                                  args.workers)
            _write(to_json(res) + "\n" if args.format == "json" else write_csv(res), args.out)
            return EXIT_OK
        fmt = args.format or "json"
        if cmd == "price":
            tr = _tranche(cfg, args.attach, args.detach)
            _emit(cmd_price(cfg, tr, args.spread), fmt, args.out)
        elif cmd == "sensitivity":
            tr = _tranche(cfg, args.attach, args.detach)
            _emit(cmd_sensitivity(cfg, tr, args.bump), fmt, args.out)
        elif cmd == "optimize":
            _emit(cmd_optimize(cfg), fmt, args.out)
        elif cmd == "validate":
            report = cmd_validate(cfg, args.workers)
            _emit(report, fmt, args.out)
            if not report["all_pass"]:
                return EXIT_VALIDATION
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LHPPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
