"""Symbolic partition-function brackets and the structural rewrite rules acting on them."""
from .capmatrix import cap_matrix, check_cap_matrix
from .compat import verify_correspondence_compat, verify_mcf_compat
from .derivation import Derivation, ReplayError, read_derivation, replay
from .geometry import Geometry, GeometryError, parse_geometry
from .prefactors import check_prefactors
from .reduction import reduce_to_cap
from .rules import (RuleError, capped_assemble, comparison_simplify, degenerate, epsilon_split,
                    gwpt_primitive, mcf_gw, mcf_pt, rigidify, split_diagonal, transform_bracket)
from .terms import Atom, Bracket, Expression, parse_bracket, parse_expr

__all__ = [
    "Atom", "Bracket", "Derivation", "Expression", "Geometry", "GeometryError", "ReplayError",
    "RuleError", "cap_matrix", "capped_assemble", "check_cap_matrix", "check_prefactors",
    "comparison_simplify", "degenerate", "epsilon_split", "gwpt_primitive", "mcf_gw", "mcf_pt",
    "parse_bracket", "parse_expr", "parse_geometry", "read_derivation", "reduce_to_cap",
    "replay", "rigidify", "split_diagonal", "transform_bracket", "verify_correspondence_compat",
    "verify_mcf_compat",
]
