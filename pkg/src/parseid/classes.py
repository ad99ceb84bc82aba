"""LIP label taxonomy and the merged 15-class scheme used by the engine.

Raw masks carry the 20 LIP labels (0 = background). Semantically close
wearables are merged before feature extraction: dress, coat and jumpsuit
fold into upper clothes, skirt folds into pants. Background is dropped,
leaving 15 retained classes addressed by their LIP ids.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np

# Raw LIP ids: 0 background, 1 hat, 2 hair, 3 glove, 4 sunglasses,
# 5 upper-clothes, 6 dress, 7 coat, 8 socks, 9 pants, 10 jumpsuit,
# 11 scarf, 12 skirt, 13 face, 14 left-arm, 15 right-arm, 16 left-leg,
# 17 right-leg, 18 left-shoe, 19 right-shoe.
N_LIP_LABELS = 20
BACKGROUND = 0


class MergedClass(IntEnum):
    """The 15 retained classes, valued by their LIP id after merging."""

    HAT = 1
    HAIR = 2
    GLOVE = 3
    SUNGLASSES = 4
    UPPER_CLOTHES = 5
    SOCKS = 8
    PANTS = 9
    SCARF = 11
    FACE = 13
    LEFT_ARM = 14
    RIGHT_ARM = 15
    LEFT_LEG = 16
    RIGHT_LEG = 17
    LEFT_SHOE = 18
    RIGHT_SHOE = 19

    @property
    def key(self) -> str:
        """Stable lowercase name used in JSON, config files and the API."""
        return self.name.lower()


ALL_CLASSES: tuple[MergedClass, ...] = tuple(MergedClass)

CLASS_BY_KEY: dict[str, MergedClass] = {c.key: c for c in MergedClass}

# dress(6), coat(7), jumpsuit(10) -> upper clothes(5); skirt(12) -> pants(9)
_MERGES = {6: 5, 7: 5, 10: 5, 12: 9}

# Lookup table raw LIP id -> merged id (background stays 0).
MERGE_TABLE = np.arange(N_LIP_LABELS, dtype=np.uint8)
for _src, _dst in _MERGES.items():
    MERGE_TABLE[_src] = _dst


def merge_labels(raw: np.ndarray) -> np.ndarray:
    """Remap raw LIP labels to merged class ids.

    Idempotent: applying it to an already-merged mask is the identity.
    Values must already be validated to lie in [0, 19].
    """
    return MERGE_TABLE[raw]


def class_key(class_id: int) -> str:
    return MergedClass(class_id).key
