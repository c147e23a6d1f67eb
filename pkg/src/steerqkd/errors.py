"""Exception types raised by the steerqkd package.

Every exception derives from :class:`SteerQkdError` so callers can catch
package failures with a single handler.  Input-validation problems derive
from :class:`ValidationError`; conditions that only surface numerically at
run time (an annihilating filter, a degenerate simulation) derive from
:class:`NumericalError`.
"""

from __future__ import annotations


class SteerQkdError(Exception):
    """Base class for all steerqkd exceptions."""


class ValidationError(SteerQkdError, ValueError):
    """Bad input: malformed data, out-of-range parameters, broken invariants."""


class NumericalError(SteerQkdError, ArithmeticError):
    """A computation failed for numerical reasons despite valid inputs."""


class InvalidState(ValidationError):
    """A matrix or Bloch-form object violates density-matrix invariants."""


class NotAState(InvalidState):
    """Reconstruction produced a matrix that is not a physical state."""


class InvalidDirection(ValidationError):
    """A measurement direction or triad is not orthonormal within tolerance."""


class BadWeights(ValidationError):
    """Bell-diagonal weights are negative or do not sum to one."""


class BadParam(ValidationError):
    """A family parameter lies outside its admissible range."""


class BadViolation(ValidationError):
    """A steering-violation value lies outside the representable range."""


class BadQber(ValidationError):
    """A quantum bit error rate lies outside [0, 1/2]."""


class BadRange(ValidationError):
    """A scan range is empty, unordered, or names an unknown parameter."""


class ParseError(ValidationError):
    """An input file or command-line argument could not be parsed."""


class FilterAnnihilates(NumericalError):
    """The local filter succeeds with probability too small to normalise."""


class DegenerateConfig(NumericalError):
    """A simulation configuration produced no usable sifted rounds."""
