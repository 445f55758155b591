"""Exception hierarchy.

Every error carries a short machine-readable ``code`` used by the CLI as the
prefix of its single-line diagnostic.
"""


class GlogError(Exception):
    code = "GLOG_ERROR"


class GraphError(GlogError, ValueError):
    code = "GRAPH_ERROR"


class NegativeWeight(GraphError):
    code = "NEGATIVE_WEIGHT"


class SelfLoop(GraphError):
    code = "SELF_LOOP"


class DuplicateEdge(GraphError):
    code = "DUPLICATE_EDGE"


class IndexOutOfRange(GlogError, IndexError):
    code = "INDEX_OUT_OF_RANGE"


class DisconnectedGraph(GraphError):
    code = "DISCONNECTED_GRAPH"


class DimensionMismatch(GlogError, ValueError):
    code = "DIMENSION_MISMATCH"


class NonPositiveSigma(GlogError, ValueError):
    code = "NON_POSITIVE_SIGMA"


class TooLargeForExactMode(GlogError, ValueError):
    code = "TOO_LARGE_FOR_EXACT_MODE"


class NumericalFailure(GlogError, ArithmeticError):
    code = "NUMERICAL_FAILURE"


class NoConvergence(NumericalFailure):
    code = "NO_CONVERGENCE"


class EmptySeries(GlogError, ValueError):
    code = "EMPTY_SERIES"


class BadK(GlogError, ValueError):
    code = "BAD_K"


class DegenerateData(GlogError, ValueError):
    code = "DEGENERATE_DATA"


class DegenerateInput(GlogError, ValueError):
    code = "DEGENERATE_INPUT"


class DuplicatePoints(GlogError, ValueError):
    code = "DUPLICATE_POINTS"


class MalformedInput(GlogError, ValueError):
    code = "MALFORMED_INPUT"


class ConfigError(GlogError, ValueError):
    code = "INVALID_CONFIG"
