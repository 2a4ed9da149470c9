"""Exception types shared across the package."""


class ProtforgeError(Exception):
    """Base class for all package errors."""


class PQRParseError(ProtforgeError):
    """Malformed PQR record; carries the 1-based line number when known."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class EmptyStructureError(ProtforgeError):
    """Input contained no ATOM/HETATM records."""


class DuplicateSerialError(ProtforgeError):
    """Two records share the same atom serial within one structure."""


class EmptySelectionError(ProtforgeError):
    """An atom selection matched nothing; downstream analysis needs >= 1 point."""


class SingularPairError(ProtforgeError):
    """Two point charges coincide, making the Coulomb kernel singular."""

    def __init__(self, i: int, j: int):
        super().__init__(f"atoms at indices {i} and {j} coincide")
        self.pair = (i, j)


class DuplicatePointError(ProtforgeError):
    """A point cloud contains two identical points."""


class CapacityError(ProtforgeError):
    """Simplex enumeration exceeded the configured cap.

    Reduce max_scale or subsample the point cloud.
    """


class BinRangeError(ProtforgeError):
    """A bar endpoint lies outside [0, L_scale]; truncate deaths first."""


class SchemaError(ProtforgeError):
    """A CSV header or cell does not match the expected schema."""


class DuplicateIdError(ProtforgeError):
    """Two rows carry the same structure id."""


class CountMismatchError(ProtforgeError):
    """Per-atom auxiliary data does not match the atom count."""
