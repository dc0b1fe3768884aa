"""Scenario configuration: INI-style sections, validation and round-trip."""
from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, fields, replace
from importlib import resources

from .errors import ConfigError, LHPPError
from .instruments import MarketParams
from .mc_oracle import McSettings
from .merton import CorrelationTriple
from .structuring import CONSTRAINTS, StructuringSpec


@dataclass(frozen=True)
class PoolConfig:
    n_re: int
    w_re: float
    bank_pd_T: float
    re_pd_T: float
    recovery_bank: float
    recovery_re: float
    rho_bank: float
    rho_re: float
    rho_cross: float | None = None

    @property
    def cross(self) -> float:
        """Bank/RE asset correlation, defaulting to ``sqrt(rho_bank rho_re)``."""
        if self.rho_cross is None:
            return math.sqrt(self.rho_bank * self.rho_re)
        return self.rho_cross


@dataclass(frozen=True)
class BankConfig:
    leverage: float
    re_loan_weight: float


@dataclass(frozen=True)
class ReFirmConfig:
    leverage: float = 0.9


@dataclass(frozen=True)
class ScenarioConfig:
    market: MarketParams
    pool: PoolConfig
    bank: BankConfig
    re_firm: ReFirmConfig
    structuring: StructuringSpec
    mc: McSettings

    def with_pool(self, **changes) -> "ScenarioConfig":
        return replace(self, pool=replace(self.pool, **changes))

    def with_section(self, section: str, **changes) -> "ScenarioConfig":
        return replace(self, **{section: replace(getattr(self, section), **changes)})


def _prob_open(v):
    return 0.0 < v < 1.0


def _prob(v):
    return 0.0 <= v <= 1.0


def _frac_open_hi(v):
    return 0.0 <= v < 1.0


# section -> key -> (type, required, check, message)
_SCHEMA = {
    "market": {
        "rate": (float, True, lambda v: -1.0 < v < 1.0, "must lie in (-1, 1)"),
        "maturity": (float, True, lambda v: v > 0.0, "must be positive"),
    },
    "pool": {
        "n_re": (int, True, lambda v: v >= 0, "must be >= 0"),
        "w_re": (float, True, _prob, "must lie in [0, 1]"),
        "bank_pd_T": (float, True, lambda v: 0.0 <= v < 1.0, "must lie in [0, 1)"),
        "re_pd_T": (float, True, lambda v: 0.0 <= v < 1.0, "must lie in [0, 1)"),
        "recovery_bank": (float, True, lambda v: 0.0 <= v < 1.0, "must lie in [0, 1)"),
        "recovery_re": (float, True, lambda v: 0.0 <= v < 1.0, "must lie in [0, 1)"),
        "rho_bank": (float, True, _frac_open_hi, "must lie in [0, 1)"),
        "rho_re": (float, True, _frac_open_hi, "must lie in [0, 1)"),
        "rho_cross": (float, False, _frac_open_hi, "must lie in [0, 1)"),
    },
    "bank": {
        "leverage": (float, True, _prob_open, "must lie in (0, 1)"),
        "re_loan_weight": (float, True, lambda v: 0.0 <= v <= 1.0, "must lie in [0, 1]"),
    },
    "re_firm": {
        "leverage": (float, False, _prob_open, "must lie in (0, 1)"),
    },
    "structuring": {
        "pd_aaa": (float, True, _prob_open, "must lie in (0, 1)"),
        "alpha_max": (float, True, _prob, "must lie in [0, 1]"),
        "constraint": (str, False, lambda v: v in CONSTRAINTS, f"must be one of {CONSTRAINTS}"),
        "w_grid": (int, False, lambda v: v >= 2, "must be >= 2"),
    },
    "mc": {
        "paths": (int, False, lambda v: v >= 1, "must be >= 1"),
        "seed": (int, False, lambda v: 0 <= v < 2**64, "must be a 64-bit unsigned integer"),
        "chunk": (int, False, lambda v: v >= 1, "must be >= 1"),
    },
}


def _convert(kind, raw: str, name: str):
    try:
        if kind is int:
            return int(raw.strip(), 10)
        if kind is float:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        return raw.strip()
    except ValueError:
        raise ConfigError(name, f"cannot parse {raw!r} as {kind.__name__}") from None


def _read_sections(parser: configparser.ConfigParser) -> dict:
    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(section, "unknown section")
    for section, keys in _SCHEMA.items():
        present = parser[section] if parser.has_section(section) else {}
        for key in present:
            if key not in keys:
                raise ConfigError(f"{section}.{key}", "unknown field")
        out = {}
        for key, (kind, required, check, why) in keys.items():
            name = f"{section}.{key}"
            if key not in present:
                if required:
                    raise ConfigError(name, "missing required field")
                continue
            v = _convert(kind, present[key], name)
            if not check(v):
                raise ConfigError(name, f"{v!r} {why}")
            out[key] = v
        values[section] = out
    return values


def _build(values: dict) -> ScenarioConfig:
    pool = values["pool"]
    if pool["n_re"] == 0 and pool["w_re"] > 0.0:
        raise ConfigError("pool.w_re", "must be 0 when n_re = 0")
    try:
        pool_cfg = PoolConfig(**pool)
        # the bank/RE correlation structure must be realisable
        CorrelationTriple(pool_cfg.rho_bank, pool_cfg.rho_re, pool_cfg.cross)
    except LHPPError as exc:
        raise ConfigError("pool.rho_cross", str(exc)) from None
    st = values["structuring"]
    return ScenarioConfig(
        market=MarketParams(**values["market"]),
        pool=pool_cfg,
        bank=BankConfig(**values["bank"]),
        re_firm=ReFirmConfig(**values["re_firm"]),
        structuring=StructuringSpec(**st),
        mc=McSettings(**values["mc"]),
    )


def parse_config(text: str) -> ScenarioConfig:
    """Parse a scenario from INI text.

    Raises:
        ConfigError: naming the offending ``section.field``.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc).splitlines()[0]) from None
    return _build(_read_sections(parser))


def load_config(path=None) -> ScenarioConfig:
    """Load a scenario file; ``None`` loads the bundled example scenario."""
    if path is None:
        text = resources.files("lhpp.data").joinpath("example.ini").read_text()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("<file>", str(exc)) from None
    return parse_config(text)


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def dump_config(cfg: ScenarioConfig) -> str:
    """Serialise a scenario so that ``parse_config(dump_config(c)) == c``."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    for section, keys in _SCHEMA.items():
        obj = getattr(cfg, section)
        parser.add_section(section)
        names = {f.name for f in fields(obj)}
        for key in keys:
            if key not in names:
                continue
            v = getattr(obj, key)
            if v is None:
                continue
            parser.set(section, key, _fmt(v))
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def apply_overrides(cfg: ScenarioConfig, overrides) -> ScenarioConfig:
    """Return ``cfg`` with ``"section.key=value"`` overrides applied and re-validated.

    An empty value removes an optional field (e.g. ``pool.rho_cross=``).
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser.read_string(dump_config(cfg))
    for item in overrides:
        name, sep, value = item.partition("=")
        section, dot, key = name.strip().partition(".")
        if not sep or not dot:
            raise ConfigError(item, "override must look like section.key=value")
        if not parser.has_section(section):
            parser.add_section(section)
        if value.strip() == "":
            parser.remove_option(section, key)
        else:
            parser.set(section, key, value.strip())
    return _build(_read_sections(parser))
