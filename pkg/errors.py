from __future__ import annotations

from typing import Optional


class ParameterError(ValueError):
    """Bad input: out-of-range level, unknown letter, non-prime modulus."""


class ResourceLimitError(RuntimeError):
    def __init__(self, message: str, *, k: Optional[int] = None, dim: Optional[int] = None) -> None:
        super().__init__(message)
        self.k = k
        self.dim = dim


class InvariantViolation(RuntimeError):
    """An identity the group theory guarantees failed to hold in our arithmetic."""


EXIT_OK = 0
EXIT_PROPERTY_FAILURE = 1
EXIT_PARAMETER = 2
EXIT_RESOURCE = 3
