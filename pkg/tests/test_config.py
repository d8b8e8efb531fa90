import pytest

from omniwarp.config import (
    AugmentBlock,
    RunConfig,
    config_to_dict,
    load_config,
    model_from_dict,
    save_config,
)
from omniwarp.errors import ConfigError, UnknownPresetError
from omniwarp.geometry import ImageSize
from omniwarp.models import DsParams, EucmParams, PinholeParams

FULL = """\
input:
  cubemap_dir: scenes/room1
camera:
  preset: sim_fisheye_235
  fov_cap_deg: 235.0
augmentation:
  mode: rsa
  s_lo: 0.7
  s_hi: 1.3
  target: [128, 128]
output:
  directory: out
  size: [128, 128]
cache_dir: .cache
seed: 17
"""


def write(tmp_path, text, name="run.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestLoad:
    def test_full_round(self, tmp_path):
        cfg = load_config(write(tmp_path, FULL))
        assert cfg.cubemap_dir == "scenes/room1"
        assert cfg.preset == "sim_fisheye_235"
        assert cfg.fov_cap_deg == 235.0
        assert cfg.augment.mode == "rsa"
        assert cfg.augment.target == ImageSize(128, 128)
        assert cfg.out_dir == "out"
        assert cfg.out_size == ImageSize(128, 128)
        assert cfg.cache_dir == ".cache"
        assert cfg.seed == 17

    def test_inline_model(self, tmp_path):
        text = """\
input:
  equirect: pano.png
camera:
  model:
    family: eucm
    f: 45
    alpha: 0.4
    beta: 2.0
    cx: 64
    cy: 64
    output_scale: 0.9
"""
        cfg = load_config(write(tmp_path, text))
        assert isinstance(cfg.model.params, EucmParams)
        assert cfg.model.output_scale == 0.9
        assert cfg.model.params.f == 45.0

    def test_unknown_key_reports_line(self, tmp_path):
        text = FULL.replace("seed: 17", "sede: 17")
        with pytest.raises(ConfigError, match=r"unknown key 'sede' in config at line 15"):
            load_config(write(tmp_path, text))

    def test_unknown_nested_key_reports_section(self, tmp_path):
        text = FULL.replace("  s_lo: 0.7", "  slo: 0.7")
        with pytest.raises(ConfigError, match=r"unknown key 'slo' in augmentation"):
            load_config(write(tmp_path, text))

    def test_expected_keys_listed(self, tmp_path):
        text = "bogus: 1\ninput:\n  equirect: a.png\n"
        with pytest.raises(ConfigError, match="expected one of: .*cache_dir"):
            load_config(write(tmp_path, text))

    def test_two_sources_rejected(self, tmp_path):
        text = "input:\n  equirect: a.png\n  cubemap_dir: d\n"
        with pytest.raises(ConfigError, match="exactly one input source"):
            load_config(write(tmp_path, text))

    def test_no_source_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="exactly one input source"):
            load_config(write(tmp_path, "seed: 1\n"))

    def test_preset_and_model_rejected(self, tmp_path):
        text = """\
input:
  equirect: a.png
camera:
  preset: param1
  model:
    family: pinhole
    f: 64
    cx: 64
    cy: 64
"""
        with pytest.raises(ConfigError, match="not both"):
            load_config(write(tmp_path, text))

    def test_unknown_preset_propagates(self, tmp_path):
        text = "input:\n  equirect: a.png\ncamera:\n  preset: nope\n"
        with pytest.raises(UnknownPresetError):
            load_config(write(tmp_path, text))

    def test_bad_yaml(self, tmp_path):
        with pytest.raises(ConfigError, match="parse error"):
            load_config(write(tmp_path, "input: [unclosed\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.yaml")

    def test_empty_file(self, tmp_path):
        with pytest.raises(ConfigError, match="empty"):
            load_config(write(tmp_path, ""))

    def test_bad_size_shape(self, tmp_path):
        text = "input:\n  equirect: a.png\noutput:\n  size: [128]\n"
        with pytest.raises(ConfigError, match=r"\[width, height\]"):
            load_config(write(tmp_path, text))

    def test_non_integer_seed(self, tmp_path):
        text = "input:\n  equirect: a.png\nseed: about nine\n"
        with pytest.raises(ConfigError, match="seed must be an integer"):
            load_config(write(tmp_path, text))

    def test_unknown_aug_mode(self, tmp_path):
        text = "input:\n  equirect: a.png\naugmentation:\n  mode: jitter\n"
        with pytest.raises(ConfigError, match="unknown augmentation mode"):
            load_config(write(tmp_path, text))


class TestModelFromDict:
    def test_families(self):
        m = model_from_dict({"family": "pinhole", "f": 64, "cx": 64, "cy": 64})
        assert isinstance(m.params, PinholeParams)
        m = model_from_dict({"family": "ds", "f": 50, "alpha": 0.5, "xi": 0.1,
                             "cx": 64, "cy": 64})
        assert isinstance(m.params, DsParams)

    def test_missing_family(self):
        with pytest.raises(ConfigError, match="family"):
            model_from_dict({"f": 64, "cx": 0, "cy": 0})

    def test_unknown_family(self):
        with pytest.raises(ConfigError, match="unknown model family"):
            model_from_dict({"family": "orthographic", "f": 64, "cx": 0, "cy": 0})

    def test_missing_param_named(self):
        with pytest.raises(ConfigError, match="'beta'"):
            model_from_dict({"family": "eucm", "f": 45, "alpha": 0.4,
                             "cx": 64, "cy": 64})

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown model keys"):
            model_from_dict({"family": "pinhole", "f": 64, "cx": 0, "cy": 0,
                             "skew": 0.1})


class TestSaveRoundTrip:
    def test_round_trip(self, tmp_path):
        cfg = load_config(write(tmp_path, FULL))
        out = tmp_path / "saved.yaml"
        save_config(cfg, out)
        again = load_config(out)
        assert config_to_dict(again) == config_to_dict(cfg)

    def test_save_validates(self, tmp_path):
        cfg = RunConfig()  # no input source
        with pytest.raises(ConfigError):
            save_config(cfg, tmp_path / "bad.yaml")

    def test_inline_model_round_trip(self, tmp_path):
        cfg = RunConfig(equirect="a.png",
                        model=model_from_dict({"family": "eucm", "f": 45,
                                               "alpha": 0.4, "beta": 2.0,
                                               "cx": 64, "cy": 64,
                                               "output_scale": 0.9}),
                        augment=AugmentBlock(mode="fixed", scale=0.95,
                                             target=ImageSize(64, 64)))
        out = tmp_path / "m.yaml"
        save_config(cfg, out)
        again = load_config(out)
        assert again.model == cfg.model
        assert again.augment.target == ImageSize(64, 64)
