"""Weight-file parsing and the extractor version hash."""

import pytest

from parseid.classes import MergedClass
from parseid.config import (
    EngineConfig,
    extractor_version,
    load_weights_file,
    parse_weights_text,
)
from parseid.errors import ConfigError
from parseid.features import ExtractionConfig


def test_parse_empty_text_gives_defaults():
    fw, cw = parse_weights_text("")
    assert fw.as_dict() == {
        "l": 0.13,
        "a": 0.13,
        "b": 0.13,
        "d": 0.31,
        "t_in": 0.15,
        "t_co": 0.15,
    }
    assert cw.total() == 34.0


def test_parse_overrides_and_comments():
    text = """
    # texture matters more here
    feature.t_in = 0.2
    feature.t_co = 0.2
    feature.d = 0.21   # trailing comment
    class.upper_clothes = 10
    class.hat = 1
    """
    fw, cw = parse_weights_text(text)
    assert fw.t_in == 0.2
    assert fw.t_co == 0.2
    assert fw.d == 0.21
    assert fw.l == 0.13  # untouched
    assert cw[MergedClass.UPPER_CLOTHES] == 10.0
    assert cw[MergedClass.HAT] == 1.0
    assert cw[MergedClass.PANTS] == 6.0  # untouched


def test_parse_error_carries_source_and_lineno():
    with pytest.raises(ConfigError, match=r"weights\.conf:2"):
        parse_weights_text("feature.d = 0.31\nnonsense line\n", source="weights.conf")


def test_parse_rejects_unknown_key():
    with pytest.raises(ConfigError, match="unknown weight key 'feature.z'"):
        parse_weights_text("feature.z = 1")
    with pytest.raises(ConfigError, match="unknown weight key 'class.cape'"):
        parse_weights_text("class.cape = 4")


def test_parse_rejects_non_number():
    with pytest.raises(ConfigError, match="not a number: 'lots'"):
        parse_weights_text("feature.d = lots")


def test_parse_validates_final_sum():
    # single override breaks the sum-to-one constraint
    with pytest.raises(ConfigError, match="sum to 1"):
        parse_weights_text("feature.d = 0.9")


def test_load_weights_file(tmp_path):
    path = tmp_path / "w.conf"
    path.write_text("class.pants = 7\n")
    fw, cw = load_weights_file(path)
    assert cw[MergedClass.PANTS] == 7.0
    assert fw.d == 0.31


def test_load_weights_file_error_names_the_file(tmp_path):
    path = tmp_path / "w.conf"
    path.write_text("bogus\n")
    with pytest.raises(ConfigError, match="w.conf:1"):
        load_weights_file(path)


def test_engine_config_validate():
    EngineConfig().validate()
    with pytest.raises(ConfigError, match="k_d"):
        EngineConfig(k_d=0.0).validate()


def test_extractor_version_is_stable():
    assert extractor_version() == extractor_version()
    assert extractor_version() == extractor_version(ExtractionConfig())
    assert len(extractor_version()) == 12
    int(extractor_version(), 16)  # hex digest prefix


def test_extractor_version_tracks_extraction_knobs():
    base = extractor_version()
    assert extractor_version(ExtractionConfig(stretch_l=False)) != base
    assert extractor_version(ExtractionConfig(remove_shadows=True)) != base
    assert extractor_version(ExtractionConfig(min_class_pixels=32)) != base
    assert extractor_version(ExtractionConfig(k_inc=2.0)) != base
    assert extractor_version(ExtractionConfig(over_highlight_fraction=0.02)) != base
