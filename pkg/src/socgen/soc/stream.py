"""Valid/ready handshaked streams and the data-width converter.

A transfer happens on each cycle where valid and ready are both high; the
producer keeps data stable while valid is high and ready is low.  Width
conversion chunks data least-significant-first, so converting k->m bits
and back is the identity on the byte stream; only integral ratios are
supported.
"""

from ..hdl.ast import Cat, If, Signal
from ..hdl.module import Module

__all__ = ["StreamEndpoint", "stream_width_converter"]


class StreamEndpoint:
    def __init__(self, width, prefix="stream"):
        if width < 1:
            raise ValueError("stream width must be >= 1")
        self.width = width
        self.valid = Signal(prefix + "_valid")
        self.ready = Signal(prefix + "_ready")
        self.data = Signal(prefix + "_data", width)


def stream_width_converter(sink, source_width, prefix="conv"):
    """Convert a stream from the sink's width to source_width.

    The module drives sink.ready and exposes its output as .source.
    The ratio between the two widths must be integral in one direction.
    """
    k = sink.width
    m_w = source_width
    mod = Module()
    source = StreamEndpoint(m_w, prefix + "_source")
    mod.sink = sink
    mod.source = source

    if k == m_w:
        mod.comb += [
            source.valid.eq(sink.valid),
            source.data.eq(sink.data),
            sink.ready.eq(source.ready),
        ]
        return mod

    if k % m_w == 0:
        # wide to narrow: emit ratio chunks per input word, lsb first
        ratio = k // m_w
        buf = Signal(prefix + "_buf", k)
        count = Signal(prefix + "_count", max=ratio + 1)
        mod.comb += [
            sink.ready.eq(count == 0),
            source.valid.eq(count != 0),
            source.data.eq(buf[0:m_w]),
        ]
        mod.sync += If(
            sink.valid & sink.ready,
            buf.eq(sink.data),
            count.eq(ratio),
        ).Elif(
            source.valid & source.ready,
            buf.eq(buf >> m_w),
            count.eq(count - 1),
        )
        return mod

    if m_w % k == 0:
        # narrow to wide: pack ratio chunks per output word, lsb first
        ratio = m_w // k
        buf = Signal(prefix + "_buf", m_w)
        count = Signal(prefix + "_count", max=ratio + 1)
        mod.comb += [
            sink.ready.eq(count != ratio),
            source.valid.eq(count == ratio),
            source.data.eq(buf),
        ]
        if ratio > 1:
            shift_in = Cat(buf[k:m_w], sink.data)
        else:
            shift_in = sink.data
        mod.sync += If(
            sink.valid & sink.ready,
            buf.eq(shift_in),
            count.eq(count + 1),
        ).Elif(
            source.valid & source.ready,
            count.eq(0),
        )
        return mod

    raise ValueError("width ratio {}:{} is not integral".format(k, m_w))
