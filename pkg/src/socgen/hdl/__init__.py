from .ast import (
    Shape, bits_for, mask_value, signed_view, wrap,
    Value, Constant, Signal, Unary, Binary, Mux, Slice, Cat, Replicate,
    shape, expr_equal,
    Statement, Assign, If, Case, ClockDomain,
)
from .specials import Special, Memory, MemoryPort, Instance
from .module import Module, Fragment, finalize, FinalizeError
