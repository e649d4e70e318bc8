"""Exception types shared across the package.

The command line maps these onto exit codes: validation problems exit
with 2, convergence problems with 3, and a failed mathematical check
(a suite reporting violations) with 1.
"""

from __future__ import annotations


class SpecValidationError(ValueError):
    """Invalid input data, with a path into the offending document.

    ``path`` is a dotted/indexed location such as ``pieces[2].c`` so a
    user editing a JSON function spec can find the bad entry directly.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class NonIntegrableError(ValueError):
    """A moment integral does not converge at the origin."""


class ConvergenceError(RuntimeError):
    """An iterative search failed to stabilize within its budget."""
