"""Conciliations: the order-dual of sheaves on finite topological spaces.

Closed sets of a finite space carry a Brouwer (co-Heyting) algebra; a
conciliation assigns data to closed sets with mediations into larger ones
and glues matching families at intersections. The package checks these
axioms exhaustively, builds the canonical examples and completions, computes
cochain cohomology over exact fields, and tests the lattice-level dualities.
"""

from .conciliation import (PreConciliation, associate, check_conciliation, check_unified,
                           glue, make_constant, make_terminal, make_Z_conciliation, treaty)
from .report import Report, emit_json
from .topology import FiniteSpace, build_space, closure, co_coverings, enumerate_spaces

__all__ = ["FiniteSpace", "PreConciliation", "Report", "associate", "build_space",
           "check_conciliation", "check_unified", "closure", "co_coverings", "emit_json",
           "enumerate_spaces", "glue", "make_Z_conciliation", "make_constant", "make_terminal",
           "treaty"]
