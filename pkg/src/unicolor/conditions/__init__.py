"""Stage 1: convert stroke/exemplar/text conditions into hint points."""

from .exemplar import CONFIDENCE_THRESHOLD, exemplar_to_hints
from .merge import DEFAULT_PRIORITY, merge_hints
from .providers import (
    CorrespondenceProvider,
    CorrespondenceResult,
    EmbeddingProvider,
    HashEmbeddingProvider,
    HintConversionError,
    IdentityCorrespondenceProvider,
    PatchCorrespondenceProvider,
    resize_color,
)
from .strokes import COVERAGE_FACTOR, Stroke, cell_coverage, rasterize_stroke, strokes_to_hints
from .synthesis import (
    hint_colors_for_cells,
    superpixel_image,
    superpixel_labels,
    synthesize_training_hints,
)
from .text import (
    ParseResult,
    TextQuery,
    color_table,
    parse_color_text,
    query_score_map,
    text_to_hints,
    top_cells,
)

__all__ = [
    "CONFIDENCE_THRESHOLD",
    "COVERAGE_FACTOR",
    "CorrespondenceProvider",
    "CorrespondenceResult",
    "DEFAULT_PRIORITY",
    "EmbeddingProvider",
    "HashEmbeddingProvider",
    "HintConversionError",
    "IdentityCorrespondenceProvider",
    "ParseResult",
    "PatchCorrespondenceProvider",
    "Stroke",
    "TextQuery",
    "cell_coverage",
    "color_table",
    "exemplar_to_hints",
    "hint_colors_for_cells",
    "merge_hints",
    "parse_color_text",
    "query_score_map",
    "rasterize_stroke",
    "resize_color",
    "strokes_to_hints",
    "superpixel_image",
    "superpixel_labels",
    "synthesize_training_hints",
    "text_to_hints",
    "top_cells",
]
