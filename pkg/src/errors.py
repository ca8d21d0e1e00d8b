"""Exceptions raised by the patrol toolkit."""


class PatrolError(Exception):
    """Base class for every error the library raises on bad input."""


class DimensionError(PatrolError):
    """A node count or vector length is outside the supported range."""


class ConnectivityError(PatrolError):
    """The graph is not strongly connected."""


class DomainError(PatrolError, ValueError):
    """A numeric argument lies outside its admissible range."""


class StochasticityError(PatrolError):
    """A transition row does not sum to one within tolerance."""


class ConformanceError(PatrolError):
    """A positive transition probability sits on an edge the graph lacks."""

    def __init__(self, edge: tuple[int, int], value: float):
        self.edge = edge
        self.value = value
        super().__init__(
            f"positive probability {value!r} on non-edge ({edge[0]},{edge[1]})"
        )


class IrreducibilityError(PatrolError):
    """The chain is reducible where an irreducible one is required."""


class DanglingNodeError(PatrolError):
    """A node has no outgoing edge."""


class GuardError(PatrolError):
    """An exhaustive computation would exceed its size guard."""


class ApplicabilityError(PatrolError):
    """A closed-form construction does not apply to the given arguments."""


class TopologyError(PatrolError):
    """The graph does not have the topology an operation requires."""


class ConfigError(PatrolError):
    """A solver or sweep configuration field is out of range."""


class FormatError(PatrolError):
    """An input file could not be parsed."""

    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"{path}: {reason}")
