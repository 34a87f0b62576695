"""Exception types shared across the package."""


class PervcohError(Exception):
    """Base class."""


class PolySyntaxError(PervcohError, ValueError):
    def __init__(self, message: str, column: int, text: str = ""):
        self.message = message
        self.column = column
        self.text = text
        super().__init__(f"{message} (column {column})")


class NotCohenMacaulay(PervcohError):
    """``Ext_S(R, S)`` is nonzero in more than one degree."""

    def __init__(self, degrees):
        self.degrees = list(degrees)
        super().__init__(f"ring is not Cohen-Macaulay: Ext^j_S(R, S) != 0 for j in {self.degrees}")


class UndeclaredGenericPoint(PervcohError):
    """A support escapes the declared point lattice."""

    def __init__(self, ideal, minimal_points, witness=None):
        self.ideal = ideal
        self.minimal_points = list(minimal_points)
        self.witness = witness
        names = ", ".join(self.minimal_points) or "none"
        msg = f"support V({ideal}) is not covered by declared points (minimal declared: {names})"
        if witness is not None:
            msg += f"; {witness} vanishes on the declared points but not on the support"
        super().__init__(msg)


class PerversityError(PervcohError):
    """Perversity lacks a flag an operation requires."""


class WindowError(PervcohError):
    """A requested degree lies outside a computed window."""


class CertificateFailure(PervcohError):
    """A runtime postcondition check failed; carries the recursion trace."""

    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)


class SpaceError(PervcohError, ValueError):
    """Malformed declared point set."""


class UnsupportedSupport(PervcohError):
    """The support has no generic point on which the truncation step is sound."""
