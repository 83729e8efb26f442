"""Dual-stream trend/deviation models for multi-step time-series forecasting."""

from carets._core import (
    ConfigError,
    DataError,
    TrainError,
    ForwardResult,
    MinMaxScaler,
    SeriesRecord,
    VariantModel,
    WindowDataset,
    build_windows,
    clamp_log_var,
    cross_validate,
    evaluate,
    evaluate_persistence,
    format_timestamp,
    fuse_carets1,
    fuse_carets2,
    fuse_carets3,
    load_series,
    loss_bce,
    loss_ce_pair,
    loss_de_abs,
    loss_de_directional,
    loss_op,
    make_deviation_targets,
    make_folds,
    make_trend_labels,
    persistence_forecast,
    prepare,
    task_weight,
    total_loss,
    train_model,
    trend_decide,
    trend_sigmoid,
    trend_softmax,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
