from enum import Enum


class ScalarMode(str, Enum):
    RATIONAL = "rational"
    QUAD = "quad"
    FLOAT = "float"


class VertexKind(str, Enum):
    REGULAR = "Regular"
    CONICAL = "Conical"
    INFINITE_DEGREE = "InfiniteDegree"
    BOUNDARY_TRUNCATED = "BoundaryTruncated"


class ViolationKind(str, Enum):
    NON_INVOLUTIVE = "NonInvolutive"
    FIXED_EDGE = "FixedEdge"
    MISMATCHED_EDGE = "MismatchedEdge"
    DISCONNECTED = "Disconnected"
    NON_SIMPLE = "NonSimple"
    NON_POSITIVE_AREA = "NonPositiveArea"
    BAD_EDGE_INDEX = "BadEdgeIndex"
    UNPAIRED = "Unpaired"


class TraceStatus(str, Enum):
    SINGULAR_HIT = "SingularHit"
    CLOSED = "Closed"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    LEFT_WINDOW = "LeftWindow"


class OrbitStatus(str, Enum):
    COMPLETE = "Complete"
    LEFT_DOMAIN = "LeftDomain"
    TRUNCATED = "Truncated"


class ExpansionStatus(str, Enum):
    TERMINATED = "Terminated"
    EXITS_DOMAIN = "ExitsDomain"
    DEPTH_REACHED = "DepthReached"


class MatrixClass(str, Enum):
    IDENTITY = "Identity"
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"


class HarmonicFamily(str, Enum):
    Z = "Z"
    N = "N"
    MODIFIED_N = "modifiedN"
    TREE = "tree"


class TailKind(str, Enum):
    """调和函数的尾部类型（决定面积是否有限）"""

    GEOMETRIC = "geometric"
    DIVERGENT = "divergent"
    FINITE = "finite"
    UNKNOWN = "unknown"


class CommandEnum(str, Enum):
    BUILD = "build"
    TRACE = "trace"
    IET = "iet"
    CUTSTACK = "cutstack"
    HTV = "htv"
    ROSEN = "rosen"
    ENTROPY = "entropy"
    WINDTREE = "windtree"
