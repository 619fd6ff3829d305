"""Clock domain crossing: the classic multi-stage flip-flop synchronizer.

Only 1-bit signals (or buses the caller declares quasi-static) are safe
through this structure; in simulation the output follows the input with
exactly `stages` destination-domain ticks of latency.
"""

from ..hdl.ast import Signal, shape, wrap
from ..hdl.module import Module

__all__ = ["multireg_synchronizer"]


def multireg_synchronizer(src, dst_domain, stages=2):
    """Returns (module, output signal)."""
    if stages < 2:
        raise ValueError("a synchronizer needs at least 2 stages")
    src = wrap(src)
    width, signed = shape(src)
    hint = src.name if isinstance(src, Signal) else "cdc"
    m = Module()
    prev = src
    for k in range(stages):
        stage = Signal("{}_sync{}".format(hint, k), width, signed=signed)
        sync = getattr(m.sync, dst_domain)
        sync += stage.eq(prev)
        prev = stage
    return m, prev
