"""Dataset ingestion, training orchestration, evaluation and ablations."""

from .ablations import (
    ABLATIONS,
    config_delta,
    dataset_fingerprint,
    run_ablation,
    run_ablation_from_yaml,
    train_transformer_cached,
    train_vqgan_cached,
)
from .dataset import (
    FOUR_COLOR_PALETTE,
    DatasetSpec,
    generate_dataset,
    generate_scene,
    ingest,
    load_split,
    write_dataset,
)
from .evaluate import (
    EvalReport,
    NATIVE_METRICS,
    PLUGGABLE_METRICS,
    cell_mean_colors,
    clear_metric_plugins,
    hint_compliance,
    register_metric_plugin,
    run_eval,
)

__all__ = [
    "ABLATIONS",
    "DatasetSpec",
    "EvalReport",
    "FOUR_COLOR_PALETTE",
    "NATIVE_METRICS",
    "PLUGGABLE_METRICS",
    "cell_mean_colors",
    "clear_metric_plugins",
    "config_delta",
    "dataset_fingerprint",
    "generate_dataset",
    "generate_scene",
    "hint_compliance",
    "ingest",
    "load_split",
    "register_metric_plugin",
    "run_ablation",
    "run_ablation_from_yaml",
    "run_eval",
    "train_transformer_cached",
    "train_vqgan_cached",
    "write_dataset",
]
