"""
Observability module for the graph-state verifier.

Provides record streaming and acceptance statistics.
"""

from .collector import RecordCollector, read_records
from .statistics import clopper_pearson, standard_error

__all__ = ["RecordCollector", "read_records", "clopper_pearson", "standard_error"]
