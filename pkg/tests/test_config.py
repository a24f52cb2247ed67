"""
Tests for the configuration layer: validation, files and dotted overrides.
"""

import numpy as np
import pytest

from hlflock.utils.config.config import ExplicitInitial, SampledInitial
from hlflock.utils.config.loader import apply_overrides, dump_config, load_config, parse_config
from hlflock.utils.core.state import Frame, Hierarchy
from hlflock.utils.errors import ConfigError
from hlflock.utils.extension import get_file_extension, is_config_file
from hlflock.utils.interactions.models import BernoulliFailure
from hlflock.utils.interactions.rng import RngStream


# =============================================================================
# parse_config
# =============================================================================


class TestParseConfig:
    def test_defaults(self, config_data):
        config = parse_config(config_data())
        assert config.model == BernoulliFailure(p=0.5, alpha=0.5)
        assert isinstance(config.initial, SampledInitial)
        assert config.flocking.window == 50
        assert config.ensemble.pairs == [(0, 4), (0, 64), (16, 64)]
        assert config.output.directory == "out"

    def test_dump_and_parse_agree(self, config_data):
        config = parse_config(config_data(k=4, h=0.25, hierarchy={"leaders": {"2": [1], "3": [1, 2], "4": [2]}}))
        assert parse_config(dump_config(config)) == config

    def test_explicit_leaders(self, config_data):
        config = parse_config(config_data(k=3, hierarchy={"leaders": {"2": [1], "3": [1, 2]}}))
        assert config.build_hierarchy() == Hierarchy.from_mapping(3, {2: [1], 3: [1, 2]})

    def test_unknown_key(self, config_data):
        with pytest.raises(ConfigError, match="colour"):
            parse_config(config_data(colour="blue"))

    def test_unknown_nested_key(self, config_data):
        with pytest.raises(ConfigError, match="flocking"):
            parse_config(config_data(flocking={"epsilon": 1e-6, "windows": 3}))

    def test_timestep_too_large(self, config_data):
        with pytest.raises(ConfigError, match="violates"):
            parse_config(config_data(k=3, h=0.6))

    def test_timestep_at_the_limit(self, config_data):
        assert parse_config(config_data(k=5, h=0.25)).h == 0.25

    def test_hierarchy_with_forward_leader(self, config_data):
        with pytest.raises(ConfigError, match="bird 2"):
            parse_config(config_data(k=3, hierarchy={"leaders": {"2": [3], "3": [1]}}))

    def test_hierarchy_with_bird_beyond_flock(self, config_data):
        with pytest.raises(ConfigError, match="bird 7"):
            parse_config(config_data(k=2, hierarchy={"leaders": {"2": [1], "7": [1, 2, 3]}}))

    def test_hierarchy_with_leaders_for_bird_one(self, config_data):
        with pytest.raises(ConfigError, match="bird 1"):
            parse_config(config_data(k=2, hierarchy={"leaders": {"1": [], "2": [1]}}))

    def test_hierarchy_with_silent_bird(self, config_data):
        with pytest.raises(ConfigError, match="empty leader set"):
            parse_config(config_data(k=3, hierarchy={"leaders": {"2": [1]}}))

    def test_hierarchy_needs_one_source(self, config_data):
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config(config_data(hierarchy={"preset": "chain", "leaders": {"2": [1]}}))

    def test_explicit_count_mismatch(self, config_data):
        initial = {"mode": "explicit", "positions": [[0.0, 0.0, 0.0]], "velocities": [[0.0, 0.0, 0.0]]}
        with pytest.raises(ConfigError, match="expected k = 2"):
            parse_config(config_data(initial=initial))

    def test_oversized_cs_kernel(self, config_data):
        with pytest.raises(ConfigError, match="exceeds 1"):
            parse_config(config_data(model={"kind": "deterministic_cs", "K": 2.0, "sigma": 1.0, "beta": 0.5}))

    def test_unknown_model_kind(self, config_data):
        with pytest.raises(ConfigError):
            parse_config(config_data(model={"kind": "telepathy", "p": 0.5}))

    @pytest.mark.parametrize("seed", [-1, 2**64])
    def test_seed_range(self, config_data, seed):
        with pytest.raises(ConfigError, match="seed"):
            parse_config(config_data(seed=seed))


# =============================================================================
# Initial states
# =============================================================================


class TestInitialState:
    def test_explicit_state_is_absolute(self, config_data):
        initial = {
            "mode": "explicit",
            "positions": [[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]],
            "velocities": [[0.5, 0.0, 0.0], [0.0, 0.5, 0.0]],
        }
        config = parse_config(config_data(initial=initial))
        assert isinstance(config.initial, ExplicitInitial)
        state = config.initial_state(RngStream(seed=config.seed))
        assert state.frame is Frame.ABSOLUTE
        np.testing.assert_array_equal(state.x[1], [1.0, 2.0, 3.0])

    def test_sampled_state_lies_in_box_and_ball(self, config_data):
        config = parse_config(config_data(k=6, h=0.2, initial={"mode": "sampled", "box_side": 2.0, "speed": 0.3}))
        state = config.initial_state(RngStream(seed=config.seed))
        assert np.all((state.x >= 0.0) & (state.x < 2.0))
        assert np.all(np.linalg.norm(state.v, axis=1) <= 0.3)

    def test_replicas_sample_different_states(self, config_data):
        config = parse_config(config_data())
        stream = RngStream(seed=config.seed)
        first = config.initial_state(stream)
        second = config.initial_state(stream.for_replica(1))
        assert not np.array_equal(first.x, second.x)


# =============================================================================
# Files
# =============================================================================


class TestLoadConfig:
    def test_reads_json(self, config_data, write_config):
        assert load_config(write_config(config_data())) == parse_config(config_data())

    def test_extension_check(self):
        assert get_file_extension("runs/Flock.JSON") == ".json"
        assert is_config_file("flock.json")
        assert not is_config_file("flock.yaml")

    def test_rejects_other_extensions(self, tmp_path):
        path = tmp_path / "flock.yaml"
        path.write_text("k: 2\n")
        with pytest.raises(ConfigError, match="unsupported"):
            load_config(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(str(tmp_path / "absent.json"))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\"k\": 2,")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(str(path))


# =============================================================================
# apply_overrides
# =============================================================================


class TestApplyOverrides:
    def test_replaces_nested_value(self, config_data):
        config = parse_config(config_data())
        updated = apply_overrides(config, {"model.p": 0.9, "horizon": 10})
        assert updated.model.p == 0.9
        assert updated.horizon == 10
        assert config.model.p == 0.5

    def test_unknown_leaf(self, config_data):
        with pytest.raises(ConfigError, match="model.q"):
            apply_overrides(parse_config(config_data()), {"model.q": 1.0})

    def test_unknown_branch(self, config_data):
        with pytest.raises(ConfigError, match="unknown config path"):
            apply_overrides(parse_config(config_data()), {"k.value": 3})

    def test_result_is_validated(self, config_data):
        with pytest.raises(ConfigError, match="violates"):
            apply_overrides(parse_config(config_data(k=3)), {"h": 0.75})

    def test_no_overrides(self, config_data):
        config = parse_config(config_data())
        assert apply_overrides(config, {}) == config
