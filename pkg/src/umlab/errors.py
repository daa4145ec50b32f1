"""Exception types shared across the package.

Everything raised here counts as an input/usage error for the CLI
(exit code 2); negative decisions are ordinary return values, never
exceptions.
"""

from __future__ import annotations


class UmlabError(Exception):
    """Base class for all errors raised by this package."""


class InputError(UmlabError, ValueError):
    """Malformed or invariant-violating input (bad file, bad matrix, ...)."""


class NotUltrametricError(InputError):
    """A matrix that is not an ultrametric where one is required.

    Carries a witness triple (i, j, k) with d[i][k] > max(d[i][j], d[j][k]),
    or None when the matrix is not even a metric.
    """

    def __init__(self, message: str, witness: tuple[int, int, int] | None = None):
        super().__init__(message)
        self.witness = witness


class SizeBoundError(UmlabError):
    """A brute-force oracle refused an input above its size bound."""


class BaseMismatchError(InputError):
    """Two multisets over different base quasi-orders were combined."""
