"""Exception types shared across the package."""


class FormlabError(Exception):
    """Base class for all errors raised by formlab."""


class DomainError(FormlabError):
    """Operands do not belong to the domain an operation requires
    (mismatched algebras, meshes, degrees of chains/cochains, ...)."""


class ConfigError(FormlabError):
    """A configuration value or file is malformed or unresolvable."""


class DegreeError(FormlabError):
    """A graded action or composition violates the degree bookkeeping
    (source/target parity mismatch)."""


class GeometryError(FormlabError):
    """A defect/charged-operator geometry pairing is not supported."""


class SolverError(FormlabError):
    """The linear solver failed to converge or the source is incompatible."""
