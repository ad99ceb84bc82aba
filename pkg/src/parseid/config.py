"""Engine configuration: extraction knobs plus scoring weights, a flat
key=value file format for overriding them, and the version hash that ties
stored features to the constants that produced them.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .classes import CLASS_BY_KEY, MergedClass
from .color import K_INC, N_BINS, OVER_HIGHLIGHT_FRACTION
from .errors import ConfigError
from .features import ExtractionConfig
from .masks import MIN_CLASS_PIXELS
from .scoring import K_D, ClassWeights, FeatureWeights

_FEATURE_KEYS = {"L": "l", "a": "a", "b": "b", "d": "d", "t_in": "t_in", "t_co": "t_co"}


@dataclass(frozen=True)
class EngineConfig:
    extraction: ExtractionConfig = field(default_factory=ExtractionConfig)
    feature_weights: FeatureWeights = field(default_factory=FeatureWeights)
    class_weights: ClassWeights = field(default_factory=ClassWeights)
    k_d: float = K_D

    def validate(self) -> None:
        self.feature_weights.validate()
        self.class_weights.validate()
        if self.k_d <= 0:
            raise ConfigError("k_d must be positive")


def parse_weights_text(text: str, source: str = "<weights>") -> tuple[FeatureWeights, ClassWeights]:
    """Parse weight overrides from `feature.X = value` / `class.Y = value` lines.

    Unmentioned entries keep their defaults. Feature weights are validated
    to sum to one after overrides apply; `#` starts a comment.
    """
    feature_overrides: dict[str, float] = {}
    class_overrides: dict[MergedClass, float] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw_line!r}")
        key, _, value_text = line.partition("=")
        key = key.strip()
        try:
            value = float(value_text.strip())
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: not a number: {value_text.strip()!r}") from None
        scope, _, name = key.partition(".")
        if scope == "feature" and name in _FEATURE_KEYS:
            feature_overrides[_FEATURE_KEYS[name]] = value
        elif scope == "class" and name in CLASS_BY_KEY:
            class_overrides[CLASS_BY_KEY[name]] = value
        else:
            raise ConfigError(f"{source}:{lineno}: unknown weight key {key!r}")

    feature_weights = replace(FeatureWeights(), **feature_overrides)
    feature_weights.validate()
    class_weights = ClassWeights({**ClassWeights().weights, **class_overrides})
    class_weights.validate()
    return feature_weights, class_weights


def load_weights_file(path: str | Path) -> tuple[FeatureWeights, ClassWeights]:
    path = Path(path)
    return parse_weights_text(path.read_text(), source=str(path))


def extractor_version(config: ExtractionConfig | None = None) -> str:
    """Short hash of every constant that shapes stored feature values.

    Records are comparable only when they agree on this value. Scoring
    knobs (weights, k_d) deliberately stay out: they can be retuned against
    an existing store without re-extracting.
    """
    config = config or ExtractionConfig()
    payload = {
        "n_bins": N_BINS,
        "k_inc": config.k_inc,
        "over_highlight_fraction": config.over_highlight_fraction,
        "min_class_pixels": config.min_class_pixels,
        "stretch_l": config.stretch_l,
        "remove_shadows": config.remove_shadows,
    }
    digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()
    return digest[:12]


# Defaults re-exported for introspection (CLI `inspect`, service metadata).
DEFAULTS = {
    "min_class_pixels": MIN_CLASS_PIXELS,
    "k_inc": K_INC,
    "over_highlight_fraction": OVER_HIGHLIGHT_FRACTION,
    "k_d": K_D,
}
