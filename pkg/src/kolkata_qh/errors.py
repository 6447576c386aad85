"""Exception hierarchy. Each class maps to a distinct CLI exit status."""


class KolkataError(Exception):
    exit_code = 1


class DomainError(KolkataError, ValueError):
    """Argument outside the mathematical domain of an operation."""

    exit_code = 3


class CapacityError(KolkataError):
    """Input size beyond a brute-force guard (e.g. n_e! enumeration)."""

    exit_code = 4


class IntegrityError(KolkataError):
    """Malformed structured input, such as a non-permutation outcome."""

    exit_code = 5
