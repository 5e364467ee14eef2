"""Tests for rinzelkit.model.params."""

import math

import numpy as np
import pytest

from rinzelkit.errors import ConfigError, DomainError
from rinzelkit.model.params import PARAM_KEYS, FhrParams, State, time_scales


class TestFhrParams:
    def test_paper_set_rates(self, paper_params):
        assert paper_params.eta == pytest.approx(0.1008, abs=1e-15)
        assert paper_params.gamma == 0.5

    def test_paper_set_overrides(self):
        p = FhrParams.paper_set(a=-1.0, D=2.0, k=1.0)
        assert (p.a, p.D, p.k) == (-1.0, 2.0, 1.0)
        assert p.I == 0.3125

    def test_values_coerced_to_float(self):
        p = FhrParams.from_mapping(dict.fromkeys(PARAM_KEYS, 1))
        assert all(type(v) is float for v in p.to_dict().values())

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError, match="a"):
            FhrParams.paper_set(a=math.nan)

    def test_to_dict_key_order(self, paper_params):
        assert tuple(paper_params.to_dict()) == PARAM_KEYS

    def test_frozen(self, paper_params):
        with pytest.raises(AttributeError):
            paper_params.a = 0.0


class TestFromMapping:
    def test_diffusion_defaults_to_one(self, paper_params):
        data = paper_params.to_dict()
        del data["D"]
        assert FhrParams.from_mapping(data).D == 1.0

    def test_typo_is_rejected_not_ignored(self, paper_params):
        data = dict(paper_params.to_dict(), epsilon=0.8)
        with pytest.raises(ConfigError, match="Unknown parameter keys: epsilon"):
            FhrParams.from_mapping(data)

    def test_missing_keys_listed(self, paper_params):
        data = paper_params.to_dict()
        del data["beta"]
        del data["delta"]
        with pytest.raises(ConfigError, match="beta, delta"):
            FhrParams.from_mapping(data)

    def test_non_numeric(self, paper_params):
        data = dict(paper_params.to_dict(), k="three")
        with pytest.raises(ConfigError, match="numbers"):
            FhrParams.from_mapping(data)

    def test_infinite_value_is_domain_error(self, paper_params):
        data = dict(paper_params.to_dict(), I=math.inf)
        with pytest.raises(DomainError):
            FhrParams.from_mapping(data)


class TestState:
    def test_from_array(self):
        s = State.from_array([1, 2, 3])
        assert (s.u, s.w, s.y) == (1.0, 2.0, 3.0)
        assert np.array_equal(s.to_array(), [1.0, 2.0, 3.0])

    def test_wrong_length(self):
        with pytest.raises(DomainError, match="3 components"):
            State.from_array([1.0, 2.0])

    def test_nan_component(self):
        with pytest.raises(DomainError, match="w"):
            State(0.0, math.nan, 0.0)

    def test_from_mapping_checks_keys(self):
        with pytest.raises(ConfigError, match="Missing state keys: y"):
            State.from_mapping({"u": 0.0, "w": 0.0})
        with pytest.raises(ConfigError, match="Unknown state keys: v"):
            State.from_mapping({"u": 0.0, "w": 0.0, "y": 0.0, "v": 1.0})

    def test_norm(self):
        assert State(3.0, 4.0, 0.0).norm() == 5.0


def test_time_scales(paper_params):
    scales = time_scales(paper_params)
    assert scales["w"] == 0.8
    assert scales["y"] == 0.5
    assert scales["eta"] == paper_params.eta
