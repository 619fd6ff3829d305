"""socgen: a Python-embedded hardware description DSL that elaborates to
synthesizable Verilog, plus placement/timing constraint emitters, a
deterministic cycle simulator and a small SoC builder."""

__version__ = "0.1.0"

from .hdl import (
    Shape, bits_for, mask_value, signed_view, wrap,
    Value, Constant, Signal, Unary, Binary, Mux, Slice, Cat, Replicate,
    shape, expr_equal,
    Statement, Assign, If, Case, ClockDomain,
    Special, Memory, MemoryPort, Instance,
    Module, Fragment, finalize, FinalizeError,
)
from .analysis import (
    MultipleDriverError, UnresolvedDomainError,
    collect_drivers, check_single_driver, infer_io_directions,
    lower, LoweredDesign, SyncProcess,
)
from .verilog import RESERVED_WORDS, EmittedModule, emit_expression, emit_verilog
from .sim import CombLoopError, ExpectationError, Simulator, Write, Tick, Expect
from .platform import (Pins, Subsignal, IOStandard, Misc, Platform,
                       make_platform, PLATFORMS)
