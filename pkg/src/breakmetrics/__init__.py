"""Structural-break unit-root and cointegration toolkit with a replication CLI."""

from .data import BreakDummies, Dataset, TimeSeries, break_dummies, describe, interaction, load_dataset, transform
from .linalg import (
    InformationCriteria,
    LongRunCovariance,
    OlsFit,
    generalized_eigen,
    information_criteria,
    long_run_covariance,
    newey_west_bandwidth,
    ols_fit,
)

__version__ = "0.1.0"

__all__ = [
    "BreakDummies",
    "Dataset",
    "InformationCriteria",
    "LongRunCovariance",
    "OlsFit",
    "TimeSeries",
    "break_dummies",
    "describe",
    "generalized_eigen",
    "information_criteria",
    "interaction",
    "load_dataset",
    "long_run_covariance",
    "newey_west_bandwidth",
    "ols_fit",
    "transform",
]
