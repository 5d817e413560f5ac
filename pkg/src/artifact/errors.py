"""Exception hierarchy; each class maps to a CLI exit code."""


class ArtifactError(Exception):
    exit_code = 2


class DomainError(ArtifactError, ValueError):
    """Input outside the mathematical domain of an operation."""

    exit_code = 2


class SingularSection(DomainError):
    """Delta(F, c) = 0: the hyperplane section is singular."""


class SectionDegenerates(DomainError):
    """c vanishes mod p, so c.x = 0 is not a hyperplane over F_p."""


class BadPrime(DomainError):
    """The prime divides 3 F_1...F_m or Delta(F, c)."""


class DataUnavailable(DomainError):
    """Required local data (e.g. a zeta polynomial) was not supplied."""


class ResourceLimit(ArtifactError):
    exit_code = 3


class NumericalFailure(ArtifactError, ArithmeticError):
    exit_code = 4


class DataInconsistent(NumericalFailure):
    """Overdetermined data violates an expected exact relation."""
