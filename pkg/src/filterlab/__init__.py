"""Filters on ω: presentations, certificates, pseudointersections, Haar
measure of block-hitting families, filter convergence and the C_p(X, 2)
nowhere-density game."""

__version__ = "0.1.0"

from .partition import BlockPartition
from .verdict import Status, Verdict
from .sets import SetDescription
from .filters import FilterPresentation, filter_member, coideal_member
from .expr import parse_filter, parse_partition, parse_set

__all__ = [
    "BlockPartition", "FilterPresentation", "SetDescription", "Status", "Verdict",
    "coideal_member", "filter_member", "parse_filter", "parse_partition", "parse_set",
]
