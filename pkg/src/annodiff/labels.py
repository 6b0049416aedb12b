"""The three-level tweet label hierarchy.

Level 1 decides relevance. Level 2 exists only under Relevant and separates
factual from non-factual content. Level 3 exists only under NonFactual and
carries sentiment polarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

RELEVANT = "Relevant"
IRRELEVANT = "Irrelevant"
FACTUAL = "Factual"
NONFACTUAL = "NonFactual"
POSITIVE = "Positive"
NEGATIVE = "Negative"

# extra class available to per-level predictors for tweets that carry no
# label on a given level
NO_LABEL = "NoLabel"

LEVELS = (1, 2, 3)
LEVEL_LABELS: dict[int, tuple[str, str]] = {
    1: (RELEVANT, IRRELEVANT),
    2: (FACTUAL, NONFACTUAL),
    3: (POSITIVE, NEGATIVE),
}

# canonical ordering used wherever tied labels must be sorted before a
# seeded draw, so results do not depend on hash or insertion order
LABEL_ORDER: dict[str, int] = {
    RELEVANT: 0,
    IRRELEVANT: 1,
    FACTUAL: 2,
    NONFACTUAL: 3,
    POSITIVE: 4,
    NEGATIVE: 5,
    NO_LABEL: 6,
}

_PARENT = {FACTUAL: RELEVANT, NONFACTUAL: RELEVANT, POSITIVE: NONFACTUAL, NEGATIVE: NONFACTUAL}


@dataclass(frozen=True)
class LabelPath:
    """A structurally valid assignment of labels along the hierarchy.

    Invariants enforced at construction: a level-2 label is present exactly
    when level 1 is Relevant, and a level-3 label is present exactly when
    level 2 is NonFactual.
    """

    level1: str
    level2: str | None = None
    level3: str | None = None

    def __post_init__(self):
        if self.level1 not in LEVEL_LABELS[1]:
            raise ValueError(f"unknown level-1 label: {self.level1!r}")
        if (self.level2 is not None) != (self.level1 == RELEVANT):
            raise ValueError("a level-2 label is required exactly when level 1 is Relevant")
        if self.level2 is not None and self.level2 not in LEVEL_LABELS[2]:
            raise ValueError(f"unknown level-2 label: {self.level2!r}")
        if (self.level3 is not None) != (self.level2 == NONFACTUAL):
            raise ValueError("a level-3 label is required exactly when level 2 is NonFactual")
        if self.level3 is not None and self.level3 not in LEVEL_LABELS[3]:
            raise ValueError(f"unknown level-3 label: {self.level3!r}")

    def label(self, level: int) -> str | None:
        return (self.level1, self.level2, self.level3)[level - 1]

    def labels(self) -> dict[int, str]:
        """Present labels keyed by level."""
        return {lv: lab for lv, lab in zip(LEVELS, (self.level1, self.level2, self.level3)) if lab is not None}


def label_set(labels: Iterable[str | None]) -> frozenset[str]:
    """Ancestor-closed set of real labels.

    None entries and the NoLabel placeholder are ignored; ancestors of every
    remaining label are added so the set is closed under the hierarchy.
    """
    out: set[str] = set()
    for lab in labels:
        while lab is not None and lab != NO_LABEL:
            out.add(lab)
            lab = _PARENT.get(lab)
    return frozenset(out)
