"""Covariate adjustment and biasing-path analysis for causal diagrams."""

from .errors import (
    BudgetExceededError,
    CyclicGraphError,
    DagbiasError,
    NotExposureLoopFreeError,
    ParseError,
)
from .graph import (
    MixedGraph,
    Path,
    RoleAssignment,
    ancestor_graph,
    ancestors,
    backdoor_graph,
    descendants,
    do_graph,
    is_exposure_loop_free,
    moralize,
    topological_numbering,
)
from .model import DiagramDocument, SAMPLES, load_sample, parse, serialize

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "CyclicGraphError",
    "DagbiasError",
    "DiagramDocument",
    "MixedGraph",
    "NotExposureLoopFreeError",
    "ParseError",
    "Path",
    "RoleAssignment",
    "SAMPLES",
    "ancestor_graph",
    "ancestors",
    "backdoor_graph",
    "descendants",
    "do_graph",
    "is_exposure_loop_free",
    "load_sample",
    "moralize",
    "parse",
    "serialize",
    "topological_numbering",
    "__version__",
]
