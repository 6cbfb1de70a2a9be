"""Exception types shared across the package.

The split mirrors the CLI exit codes: ContractViolation, ValidationError and
UsageError map to exit 1 (the caller asked for something the library refuses
to do), FormatError and I/O errors map to exit 2 (the data on disk is bad).
"""


class ContractViolation(ValueError):
    """An argument breaks a documented precondition."""


class ValidationError(ContractViolation):
    """A composite object (network, scene, report) is internally inconsistent."""


class FormatError(ValueError):
    """A serialized stream cannot be parsed into a valid object."""


class UsageError(Exception):
    """Bad command-line invocation (unknown flag, missing argument)."""
