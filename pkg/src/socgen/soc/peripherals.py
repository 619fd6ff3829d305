"""Desk-scale peripherals: timer, GPIO in/out, an 8N1 UART and an
integrated boot ROM.  Each peripheral exposes its software interface as a
.csrs list (consumed by csr_bank) or, for the ROM, a .bus slave port."""

from ..hdl.ast import Cat, Constant, If, Mux, Signal
from ..hdl.module import Module
from ..hdl.specials import Memory
from .bus import SystemBus
from .csr import CsrRegister

__all__ = ["Timer", "GpioOut", "GpioIn", "Uart", "Rom", "RomOverflowError"]


class Timer(Module):
    """Down-counter.  While en=0 the counter tracks load; while en=1 it
    decrements every cycle and reloads from reload after reaching 0, so
    the value sequence is periodic with period reload+1.  Writing
    update_value latches the live counter into the value register."""

    def __init__(self, width=32):
        load = CsrRegister.storage("load", width)
        reload = CsrRegister.storage("reload", width)
        en = CsrRegister.storage("en", 1)
        update = CsrRegister.storage("update_value", 1)
        counter = Signal("timer_counter", width)
        latch = Signal("timer_value", width)
        value = CsrRegister.status("value", latch)
        self.csrs = [load, reload, en, update, value]
        self.counter = counter

        self.sync += [
            If(en.storage_signal,
                If(counter == 0,
                    counter.eq(reload.storage_signal),
                ).Else(
                    counter.eq(counter - 1),
                ),
            ).Else(
                counter.eq(load.storage_signal),
            ),
            If(update.strobe, latch.eq(counter)),
        ]


class GpioOut(Module):
    """A storage register drives the pads."""

    def __init__(self, pads):
        out = CsrRegister.storage("out", len(pads))
        self.csrs = [out]
        self.comb += pads.eq(out.storage_signal)


class GpioIn(Module):
    """A status register samples the pads."""

    def __init__(self, pads):
        self.csrs = [CsrRegister.status("in", pads)]


class Uart(Module):
    """8N1 serial port at a programmable divisor (system clocks per bit).

    Registers: rxtx (storage; writing transmits the low byte, reads return
    the last written byte), rx (status; last received byte), txfull
    (status; transmitter busy), rxempty (status; no byte received yet) and
    divisor (storage).  Reception is single-buffered without pop-on-read:
    a new byte simply overwrites rx.  Writes to rxtx while txfull are
    dropped.  The divisor must be >= 1.
    """

    def __init__(self, tx_pad, rx_pad, divisor=4):
        rxtx = CsrRegister.storage("rxtx", 8)
        tx_busy = Signal("tx_busy")
        rx_data = Signal("rx_data", 8)
        rx_empty = Signal("rx_empty", reset=1)
        div = CsrRegister.storage("divisor", 16, reset=divisor)
        self.csrs = [
            rxtx,
            CsrRegister.status("rx", rx_data),
            CsrRegister.status("txfull", tx_busy),
            CsrRegister.status("rxempty", rx_empty),
            div,
        ]

        dv = div.storage_signal

        # transmitter: 10-bit frame (start, 8 data lsb-first, stop)
        tx_shift = Signal("tx_shift", 10)
        tx_bits = Signal("tx_bits", max=11)
        tx_phase = Signal("tx_phase", 16)
        self.comb += tx_pad.eq(Mux(tx_busy, tx_shift[0], 1))
        self.sync += If(
            rxtx.strobe & ~tx_busy,
            tx_shift.eq(Cat(Constant(0), rxtx.storage_signal, Constant(1))),
            tx_busy.eq(1),
            tx_bits.eq(10),
            tx_phase.eq(dv - 1),
        ).Elif(
            tx_busy,
            If(tx_phase == 0,
                If(tx_bits == 1,
                    tx_busy.eq(0),
                ).Else(
                    tx_shift.eq(tx_shift >> 1),
                    tx_bits.eq(tx_bits - 1),
                    tx_phase.eq(dv - 1),
                ),
            ).Else(
                tx_phase.eq(tx_phase - 1),
            ),
        )

        # receiver: sample mid-bit, divisor + divisor/2 ticks after the
        # start bit's falling edge, then every divisor ticks
        rx_busy = Signal("rx_busy")
        rx_shift = Signal("rx_shift", 8)
        rx_bits = Signal("rx_bits", max=9)
        rx_phase = Signal("rx_phase", 17)
        self.sync += If(
            ~rx_busy,
            If(rx_pad == 0,
                rx_busy.eq(1),
                rx_bits.eq(0),
                rx_phase.eq(dv + (dv >> 1) - 1),
            ),
        ).Elif(
            rx_phase == 0,
            If(rx_bits == 8,
                # stop bit position: frame complete
                rx_busy.eq(0),
                rx_data.eq(rx_shift),
                rx_empty.eq(0),
            ).Else(
                rx_shift.eq(Cat(rx_shift[1:8], rx_pad)),
                rx_bits.eq(rx_bits + 1),
                rx_phase.eq(dv - 1),
            ),
        ).Else(
            rx_phase.eq(rx_phase - 1),
        )


class RomOverflowError(Exception):
    pass


class Rom(Module):
    """Integrated boot ROM: a bus slave returning little-endian 32-bit
    words of the init bytes.  Writes are acknowledged and ignored."""

    def __init__(self, init=b"", size=0x8000):
        if size <= 0 or size % 4:
            raise ValueError("rom size must be a positive multiple of 4")
        init = bytes(init)
        if len(init) > size:
            raise RomOverflowError(
                "rom init is {} bytes but the rom holds {}".format(len(init), size))
        words = [int.from_bytes(init[i:i + 4].ljust(4, b"\0"), "little")
                 for i in range(0, len(init), 4)]
        self.size = size
        self.depth = size // 4
        mem = Memory("rom", 32, self.depth, words)
        port = mem.get_port(domain="sys")
        self.specials += mem
        self.memory = mem

        bus = SystemBus(prefix="rom_bus")
        self.bus = bus
        self.comb += [
            port.adr.eq(bus.adr[0:port.adr.width]),
            bus.dat_r.eq(port.dat_r),
        ]
        self.sync += bus.ack.eq(bus.cyc & bus.stb & ~bus.ack)
