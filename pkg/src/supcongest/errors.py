"""Exception hierarchy shared by all modules."""


class SupCongestError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SupCongestError):
    """A run or scenario is misconfigured (unknown names, bandwidth too small, ...)."""


# -- graph-core ---------------------------------------------------------------


class GraphError(SupCongestError, ValueError):
    pass


class FormatError(GraphError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateEdgeError(FormatError):
    pass


class SelfLoopError(FormatError):
    pass


class OverlapError(GraphError):
    pass


class LengthMismatch(SupCongestError, ValueError):
    pass


# -- engine -------------------------------------------------------------------


class EngineError(SupCongestError):
    """Raised when an algorithm violates the execution model."""


class BandwidthExceeded(EngineError):
    def __init__(self, node, edge, round, bits, bandwidth):
        self.node, self.edge, self.round = node, edge, round
        self.bits, self.bandwidth = bits, bandwidth
        super().__init__(
            f"node {node} sent {bits} bits over {edge} in round {round} (bandwidth {bandwidth})"
        )


class IllegalSend(EngineError):
    def __init__(self, node, edge, round=None):
        self.node, self.edge, self.round = node, edge, round
        super().__init__(f"node {node} may not send over {edge} in this mode")


class NonTermination(EngineError):
    def __init__(self, rounds, missing):
        self.rounds = rounds
        self.missing = tuple(missing)
        super().__init__(f"no output after {rounds} rounds from nodes {list(self.missing)[:10]}")


class OutputInstability(EngineError):
    def __init__(self, node, round, old, new):
        self.node, self.round = node, round
        super().__init__(f"node {node} changed its output in round {round}: {old!r} -> {new!r}")


class MissingAdvice(EngineError):
    pass


class IdSpaceExhausted(EngineError):
    pass


# -- reduction ----------------------------------------------------------------


class CutViolation(EngineError):
    def __init__(self, node, target):
        self.node, self.target = node, target
        super().__init__(f"message {node} -> {target} crosses sides outside the cut")
