"""Tests for settings layering and the ordered worker pool."""

import json
import threading

import pytest

from otcausal.config import (
    CiOptions,
    FitOptions,
    OrderOptions,
    PcOtConfig,
    Settings,
    flatten_keys,
    load_settings,
)
from otcausal.errors import ConfigError
from otcausal.parallel import map_ordered


def test_defaults():
    settings = load_settings(env={})
    assert settings == Settings()
    assert settings.ci.delta == 2.0
    assert settings.fit.degree == 2
    assert settings.order.huber_widths == (1e-1, 1e-2, 1e-3)


def test_precedence(tmp_path):
    config = tmp_path / "settings.json"
    config.write_text(json.dumps({"seed": 1, "ci": {"delta": 3, "threshold": "variance"}, "fit": {"degree": 3}}))
    env = {"OTCAUSAL_CI_DELTA": "4", "OTCAUSAL_SEED": "2", "OTHER_VAR": "x"}
    settings = load_settings(config, env=env, overrides={"seed": 5, "fit.degree": None})
    assert settings.seed == 5
    assert settings.ci.delta == 4.0
    assert settings.ci.threshold == "variance"
    assert settings.fit.degree == 3


def test_nested_environment_keys():
    env = {"OTCAUSAL_ORDER_FIT_DEGREE": "1", "OTCAUSAL_ORDER_HUBER_WIDTHS": "0.5,0.05", "OTCAUSAL_MAX_LEVEL": "none"}
    settings = load_settings(env=env)
    assert settings.order.fit.degree == 1
    assert settings.order.huber_widths == (0.5, 0.05)
    assert settings.max_level is None


def test_unknown_environment_variable_is_ignored():
    assert load_settings(env={"OTCAUSAL_COLOR": "blue"}) == Settings()


@pytest.mark.parametrize(
    "overrides,message",
    [
        ({"ci.bogus": 1}, "unknown configuration key"),
        ({"fit.degree": "two"}, "invalid value"),
        ({"fit.degree": 1.5}, "invalid value"),
        ({"ci.threshold": "mad"}, "invalid value"),
        ({"ci.delta": -1}, "delta must be positive"),
        ({"workers": 0}, "workers"),
        ({"log_level": "chatty"}, "unknown log level"),
    ],
)
def test_invalid_values(overrides, message):
    with pytest.raises(ConfigError, match=message):
        load_settings(env={}, overrides=overrides)


def test_unreadable_config_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read config file"):
        load_settings(tmp_path / "missing.json", env={})
    path = tmp_path / "list.json"
    path.write_text("[1]")
    with pytest.raises(ConfigError, match="JSON object"):
        load_settings(path, env={})


@pytest.mark.parametrize(
    "factory",
    [
        lambda: FitOptions(degree=-1),
        lambda: FitOptions(tol=0),
        lambda: FitOptions(quadrature_order=0),
        lambda: CiOptions(orders=0),
        lambda: PcOtConfig(fit=FitOptions(degree=0)),
        lambda: PcOtConfig(max_level=-1),
        lambda: OrderOptions(huber_widths=()),
        lambda: OrderOptions(pnl_normalization="none"),
    ],
)
def test_option_validation(factory):
    with pytest.raises(ConfigError):
        factory()


def test_seed_flows_into_run_configs():
    settings = Settings(seed=7, workers=3, max_level=2)
    pc = settings.pc_ot()
    assert (pc.seed, pc.ci.seed, pc.fit.seed, pc.workers, pc.max_level) == (7, 7, 7, 3, 2)
    order = settings.order_options()
    assert (order.fit.seed, order.workers) == (7, 3)


def test_flatten_keys_round_trip():
    flat = flatten_keys(Settings().to_dict())
    assert flat["ci.delta"] == 2.0
    assert load_settings(env={}, overrides=flat) == Settings()


def test_map_ordered_keeps_input_order():
    assert map_ordered(lambda v: v * v, range(10), workers=4) == [v * v for v in range(10)]
    assert map_ordered(str, [], workers=4) == []


def test_map_ordered_runs_inline_with_one_worker():
    seen = []
    map_ordered(lambda v: seen.append(threading.current_thread()), range(3), workers=1)
    assert set(seen) == {threading.main_thread()}


def test_map_ordered_propagates_errors():
    def fail(v):
        if v == 2:
            raise RuntimeError("boom")
        return v

    with pytest.raises(RuntimeError, match="boom"):
        map_ordered(fail, range(4), workers=2)
