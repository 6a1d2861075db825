"""Reconstructing binary level-1 phylogenetic networks from binets and trinets."""

from .network import (
    Network,
    RootKind,
    SideDecomposition,
    canonical_code,
    displays,
    is_equivalent,
    lsa,
    restrict,
    root_kind,
    side_decomposition,
    tinyfy,
    validate,
)
from .smallnets import SmallNet, SmallNetSet, classify, extract_all, realize, restrict_set
from .binets import solve_binets
from .solver import SearchBudgetExceeded, SolverConfig, solve, solve_supernetwork, solve_tiny
from .io import parse_network, parse_smallnets, serialize_network, serialize_smallnets

__version__ = "0.1.0"
