"""One-stop conversion of raw conditions into a merged hint set.

The CLI and the HTTP service both funnel through ``conditions_to_hints`` so
they produce byte-identical hint JSON for the same inputs.  Providers are
chosen by name through configuration keys; the defaults need no pretrained
weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .conditions import (
    HashEmbeddingProvider,
    IdentityCorrespondenceProvider,
    PatchCorrespondenceProvider,
    Stroke,
    exemplar_to_hints,
    merge_hints,
    parse_color_text,
    strokes_to_hints,
    text_to_hints,
)
from .conditions.exemplar import CONFIDENCE_THRESHOLD
from .core import CellGrid, ColorImage, GrayImage, HintSet


class TextParseError(ValueError):
    """Prompt contained no parseable color/object pair."""


class NoConditionsError(ValueError):
    """At least one condition must be present."""


@dataclass
class ProviderConfig:
    embedding_provider: str = "hash"
    correspondence_provider: str = "patch_ncc"
    exemplar_threshold: float = CONFIDENCE_THRESHOLD
    extra: dict = field(default_factory=dict)

    def make_embedding(self):
        if self.embedding_provider == "hash":
            return HashEmbeddingProvider()
        if self.embedding_provider == "none":
            return None
        raise ValueError(f"unknown embedding provider: {self.embedding_provider!r}")

    def make_correspondence(self, cell_size: int):
        if self.correspondence_provider == "patch_ncc":
            return PatchCorrespondenceProvider(cell_size)
        if self.correspondence_provider == "identity":
            return IdentityCorrespondenceProvider()
        if self.correspondence_provider == "none":
            return None
        raise ValueError(
            f"unknown correspondence provider: {self.correspondence_provider!r}"
        )


def conditions_to_hints(
    gray: GrayImage,
    grid: CellGrid,
    strokes: list[Stroke] | None = None,
    exemplar: ColorImage | None = None,
    text: str | None = None,
    providers: ProviderConfig | None = None,
) -> HintSet:
    """Convert every present condition and merge under the default priority."""
    if not strokes and exemplar is None and not text:
        raise NoConditionsError("no conditions given")
    providers = providers or ProviderConfig()
    sets: list[HintSet] = []
    if strokes:
        sets.append(strokes_to_hints(strokes, grid))
    if text:
        parsed = parse_color_text(text)
        if not parsed.queries:
            raise TextParseError(parsed.diagnostic or "no parseable text condition")
        embedder = providers.make_embedding()
        if embedder is None:
            raise ValueError("text condition given but no embedding provider configured")
        sets.append(text_to_hints(gray, list(parsed.queries), embedder, grid))
    if exemplar is not None:
        matcher = providers.make_correspondence(grid.cell_size)
        if matcher is None:
            raise ValueError(
                "exemplar condition given but no correspondence provider configured"
            )
        sets.append(
            exemplar_to_hints(gray, exemplar, matcher, grid, providers.exemplar_threshold)
        )
    return merge_hints(sets)
