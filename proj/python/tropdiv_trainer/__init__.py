"""Training and export helpers for the tropdiv command-line tools."""

from .formats import (
    count_params,
    forward,
    read_csv,
    read_labels,
    read_network,
    write_csv,
    write_labels,
    write_network,
)

__all__ = [
    "count_params",
    "forward",
    "read_csv",
    "read_labels",
    "read_network",
    "write_csv",
    "write_labels",
    "write_network",
]
