import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lhpp.config import apply_overrides, dump_config, load_config, parse_config
from lhpp.errors import ConfigError


def bundled_text():
    return dump_config(load_config())


def test_bundled_example_values():
    cfg = load_config()
    assert cfg.market.maturity == 10.0 and cfg.market.rate == 0.0
    assert cfg.pool.n_re == 9 and cfg.pool.w_re == 0.1061
    assert (cfg.pool.bank_pd_T, cfg.pool.re_pd_T) == (0.199, 0.2421)
    assert (cfg.pool.rho_bank, cfg.pool.rho_re, cfg.pool.rho_cross) == (0.1758, 0.1170, 0.1434)
    assert cfg.bank.leverage == 0.9 and cfg.bank.re_loan_weight == 0.01
    assert cfg.structuring.pd_aaa == 0.007 and cfg.structuring.constraint == "expected-loss"


def test_round_trip():
    cfg = load_config()
    assert parse_config(dump_config(cfg)) == cfg
    assert dump_config(parse_config(dump_config(cfg))) == dump_config(cfg)


@given(
    n=st.integers(1, 50), w=st.floats(0.0, 1.0), pd=st.floats(0.0, 0.99),
    rb=st.floats(0.0, 0.95), rr=st.floats(0.0, 0.95), rate=st.floats(-0.05, 0.2),
    seed=st.integers(0, 2**64 - 1), constraint=st.sampled_from(["expected-loss", "hitting-prob"]),
)
def test_round_trip_property(n, w, pd, rb, rr, rate, seed, constraint):
    cfg = apply_overrides(load_config(), [
        f"pool.n_re={n}", f"pool.w_re={w!r}", f"pool.re_pd_T={pd!r}", f"pool.rho_bank={rb!r}",
        f"pool.rho_re={rr!r}", "pool.rho_cross=", f"market.rate={rate!r}", f"mc.seed={seed}",
        f"structuring.constraint={constraint}",
    ])
    assert parse_config(dump_config(cfg)) == cfg


def test_cross_correlation_default():
    cfg = apply_overrides(load_config(), ["pool.rho_cross="])
    assert cfg.pool.rho_cross is None
    assert cfg.pool.cross == pytest.approx(math.sqrt(0.1758 * 0.1170))


BAD = [
    ("market.maturity", "0"), ("market.rate", "abc"), ("pool.n_re", "2.5"), ("pool.n_re", "-1"),
    ("pool.w_re", "1.2"), ("pool.bank_pd_T", "1"), ("pool.re_pd_T", "-0.1"),
    ("pool.recovery_bank", "1.0"), ("pool.recovery_re", "nan"), ("pool.rho_bank", "1.2"),
    ("pool.rho_re", "-0.2"), ("pool.rho_cross", "0.99"), ("bank.leverage", "1.0"),
    ("bank.re_loan_weight", "-0.01"), ("re_firm.leverage", "0"), ("structuring.pd_aaa", "0"),
    ("structuring.alpha_max", "2"), ("structuring.constraint", "rating"), ("structuring.w_grid", "1"),
    ("mc.paths", "0"), ("mc.seed", "-3"), ("mc.chunk", "x"),
]


@pytest.mark.parametrize("field,value", BAD)
def test_invalid_field_is_named(field, value):
    with pytest.raises(ConfigError) as exc:
        apply_overrides(load_config(), [f"{field}={value}"])
    assert exc.value.field == field
    assert str(exc.value).startswith(field)


def test_missing_and_unknown_fields():
    text = bundled_text().replace("n_re = 9\n", "")
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.field == "pool.n_re"
    with pytest.raises(ConfigError) as exc:
        parse_config(bundled_text() + "\n[extra]\nx = 1\n")
    assert exc.value.field == "extra"
    with pytest.raises(ConfigError) as exc:
        apply_overrides(load_config(), ["pool.colour=blue"])
    assert exc.value.field == "pool.colour"


def test_zero_loans_need_zero_weight():
    with pytest.raises(ConfigError) as exc:
        apply_overrides(load_config(), ["pool.n_re=0"])
    assert exc.value.field == "pool.w_re"
    cfg = apply_overrides(load_config(), ["pool.n_re=0", "pool.w_re=0"])
    assert cfg.pool.n_re == 0


def test_optional_sections_default():
    text = bundled_text()
    head, _, tail = text.partition("[re_firm]")
    tail = tail[tail.index("[structuring]"):]
    mc_free = (head + tail).split("[mc]")[0]
    cfg = parse_config(mc_free)
    assert cfg.re_firm.leverage == 0.9
    assert cfg.mc.paths == 1_000_000


def test_malformed_file_and_missing_path(tmp_path):
    with pytest.raises(ConfigError):
        parse_config("not an ini file")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")
    path = tmp_path / "s.ini"
    path.write_text(bundled_text())
    assert load_config(path) == load_config()


def test_bad_override_syntax():
    with pytest.raises(ConfigError):
        apply_overrides(load_config(), ["n_re=3"])
