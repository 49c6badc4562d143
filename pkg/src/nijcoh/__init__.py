"""Exact cohomology toolkit for Nijenhuis algebras, bimodules and morphisms."""

from .algebra import (
    AlgebraSpec,
    BimoduleSpec,
    DefectReport,
    MorphismSpec,
    PhiBimoduleSpec,
    check_algebra,
    check_bimodule,
    check_morphism,
    check_nijenhuis_bimodule,
    check_phi_bimodule,
    regular_bimodule,
    regular_phi_bimodule,
)
from .cochains import cohomology_dim
from .exact_linalg import GF, QQ, Matrix
from .morphism import njm_cohomology_dim
from .workspace import Workspace, WorkspaceError, parse_workspace

__version__ = "0.1.0"

__all__ = [
    "AlgebraSpec", "BimoduleSpec", "DefectReport", "MorphismSpec", "PhiBimoduleSpec",
    "check_algebra", "check_bimodule", "check_morphism", "check_nijenhuis_bimodule", "check_phi_bimodule",
    "regular_bimodule", "regular_phi_bimodule", "cohomology_dim", "GF", "QQ", "Matrix",
    "njm_cohomology_dim", "Workspace", "WorkspaceError", "parse_workspace",
]
