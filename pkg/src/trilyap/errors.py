"""Exception hierarchy for the trilyap package.

Errors are split into three families: configuration/input problems,
no-solution outcomes of the boundary value search, and verification
failures.  The CLI maps these onto its exit codes (3, 2 and 1).
"""


class TrilyapError(Exception):
    """Base class for all package errors."""


class ConfigError(TrilyapError):
    """Scenario/config is invalid or fails the hypothesis gate."""


class NonPositiveExponent(ConfigError):
    """Power exponent must be > 0."""


class EmptyGrid(ConfigError):
    """A property-check grid contained no points."""


class NonPositiveValue(ConfigError):
    """psi(x) <= 0 encountered where a positive value is required."""


class DegenerateInterval(ConfigError):
    """Interval has non-positive length."""


class ExponentNotPositive(ConfigError):
    """Sup-norm bound needs p - alpha1*alpha2 > 0."""


class ZeroCoefficient(ConfigError):
    """The weight integral vanishes where a positive value is required."""


class DomainExceeded(TrilyapError):
    """Evaluation requested outside the coefficient's domain."""


class IntervalEmpty(TrilyapError):
    """Quadrature over an empty interval."""


class BracketNotFound(TrilyapError):
    """No sign change could be bracketed for an inverse root-find."""


class StepUnderflow(TrilyapError):
    """The adaptive integrator could not proceed at the minimum step."""


class NoSolution(TrilyapError):
    """Base for outcomes where the requested boundary structure does not exist."""


class NoBracket(NoSolution):
    """No sign change of the shooting target over the parameter sweep."""


class InteriorZero(NoSolution):
    """Candidate solution vanishes inside the open interval."""


class NoXi(NoSolution):
    """No interior zero of v3: the (BC1) inflection condition is unattainable."""


class InsufficientZeros(NoSolution):
    """Fewer zeros than the construction requires."""


class TooFewZeros(NoSolution):
    """A zero-sequence operation needs more zeros than were supplied."""


class NoSignChange(TrilyapError):
    """refine_zero bracket does not straddle a sign change."""


class UndefinedAtZero(TrilyapError):
    """Phi weight requested at u = 0 without a declared limit."""


class PhiLimitInfinite(UndefinedAtZero):
    """Phi weight diverges at u = 0 (p < alpha1*alpha2): out of hypothesis."""


class InvariantViolation(TrilyapError):
    """A theorem inequality failed beyond numerical error: solver bug."""


class IoError(TrilyapError):
    """Report emission failed."""
