from typing import Optional


class RailsnipeError(Exception):
    """Root of every domain error raised by railsnipe."""


class NetlistError(RailsnipeError, ValueError):
    """A netlist document or object violates the netlist schema or invariants."""


class NetlistSyntaxError(NetlistError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SchemaError(NetlistError):
    pass


class NetlistReferenceError(NetlistError):
    def __init__(self, message: str, missing_id: str):
        super().__init__(message)
        self.missing_id = missing_id


class DuplicateIdError(NetlistError):
    pass


class ArityError(NetlistError):
    pass


class StructuralError(RailsnipeError):
    """The gate graph contains a combinational cycle."""

    def __init__(self, message: str, cycle: Optional[list] = None):
        super().__init__(message)
        self.cycle = cycle or []


class InputError(RailsnipeError, ValueError):
    """A channel value is not a valid 1-of-N codeword."""


class CapacityError(RailsnipeError):
    """An exhaustive enumeration would exceed its configured cap."""


class DomainError(RailsnipeError, ValueError):
    """A physical quantity is outside its admissible range."""


class SimulationError(RailsnipeError):
    pass


class IllegalStateError(SimulationError):
    """A channel reached a state with more than one rail high."""


class DeadlockError(SimulationError):
    """The handshake never completed, or the event horizon was exceeded."""


class DpaError(RailsnipeError, ValueError):
    pass


class EmptyPartitionError(DpaError):
    pass


class DissymmetryError(RailsnipeError, ValueError):
    pass


class TraceSchemaError(RailsnipeError, ValueError):
    def __init__(self, message: str, column: Optional[str] = None):
        super().__init__(message)
        self.column = column


class PlotError(RailsnipeError, ValueError):
    pass
