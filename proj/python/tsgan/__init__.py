# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The tsgan Authors
"""WGAN-GP augmentation of rainfall/flow windows and flow forecasting."""

from ._core import (
    ConfigError,
    CorruptionError,
    Error,
    FormatError,
    ParseError,
    ShapeError,
    SizeError,
    config_text,
    gradcheck,
    halving_plan,
    jsd,
    kld,
    load_checkpoint,
    load_csv,
    mae,
    make_windows,
    peak_event_metrics,
    run_command,
    synth_catchment,
)

__all__ = [
    "ConfigError",
    "CorruptionError",
    "Error",
    "FormatError",
    "ParseError",
    "ShapeError",
    "SizeError",
    "config_text",
    "gradcheck",
    "halving_plan",
    "jsd",
    "kld",
    "load_checkpoint",
    "load_csv",
    "mae",
    "make_windows",
    "peak_event_metrics",
    "run_command",
    "synth_catchment",
]
