"""Exception hierarchy shared by every module.

Each class carries the CLI exit code it maps to, so the front end never
needs a lookup table of its own.
"""


class LoomError(Exception):
    exit_code = 1
    code = "error"


class InvalidInput(LoomError, ValueError):
    exit_code = 2
    code = "invalid_input"


class LengthMismatch(InvalidInput):
    code = "length_mismatch"


class SumMismatch(InvalidInput):
    code = "sum_mismatch"


class UnsupportedRank(InvalidInput):
    code = "unsupported_rank"


class UnsupportedRange(InvalidInput):
    code = "unsupported_range"


class DegreeTooHigh(InvalidInput):
    code = "degree_too_high"


class DegreeOutOfRange(InvalidInput):
    code = "degree_out_of_range"


class InvalidWeight(InvalidInput):
    code = "invalid_weight"


class NotSpecial(InvalidInput):
    """Input was required to have determinant 1 (or order 0) and does not."""

    code = "not_special"


class EmptyWindow(LoomError, ArithmeticError):
    exit_code = 3
    code = "empty_window"


class PrecisionExhausted(LoomError, ArithmeticError):
    exit_code = 3
    code = "precision_exhausted"


class IndeterminateOrder(PrecisionExhausted):
    code = "indeterminate_order"


class WindowTooSmall(PrecisionExhausted):
    code = "window_too_small"


class UnstableTrace(PrecisionExhausted):
    code = "unstable_trace"


class NotAUnit(LoomError, ArithmeticError):
    exit_code = 4
    code = "not_a_unit"


class NotInvertible(LoomError, ArithmeticError):
    exit_code = 4
    code = "not_invertible"


class NotInBigCell(LoomError, ArithmeticError):
    exit_code = 4
    code = "not_in_big_cell"


class NotInStabilizer(LoomError, ArithmeticError):
    exit_code = 4
    code = "not_in_stabilizer"


class AmbiguousSnap(LoomError, ArithmeticError):
    exit_code = 5
    code = "ambiguous_snap"
