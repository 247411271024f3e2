"""The ``.ccs`` text format and the command-line interface."""

from .build import InvalidDeclaration, Workspace, build
from .syntax import (CcsSyntaxError, DeclTypeError, Document, FrontendError, ResolutionError,
                     parse, parse_expression, render, render_expression)

__all__ = ["CcsSyntaxError", "DeclTypeError", "Document", "FrontendError", "InvalidDeclaration",
           "ResolutionError", "Workspace", "build", "parse", "parse_expression", "render",
           "render_expression"]
