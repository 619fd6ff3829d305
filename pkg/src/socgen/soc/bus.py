"""Memory-mapped system bus: a single-master, single-outstanding
word-addressed bus (30-bit word address, 32-bit data), an address decoder,
and the bridge onto the CSR register port.

The master asserts cyc/stb with adr (and we/dat_w/sel for writes) and
holds them until ack, which every slave asserts for exactly one cycle.
Accesses that hit no mapped region are acknowledged after one cycle with
read data of all ones, so software sees a recognizable signature instead
of a hung bus.
"""

from dataclasses import dataclass
from functools import reduce

from ..hdl.ast import If, Signal
from ..hdl.module import Module

__all__ = ["SystemBus", "MemoryRegion", "OverlapError", "bus_decoder",
           "bus_to_csr_bridge"]

UNMAPPED_DATA = 0xFFFFFFFF


class OverlapError(Exception):
    pass


class SystemBus:
    """The bus signal bundle.  adr is a word address; byte address = adr*4."""

    def __init__(self, prefix="bus"):
        self.adr = Signal(prefix + "_adr", 30)
        self.dat_w = Signal(prefix + "_dat_w", 32)
        self.dat_r = Signal(prefix + "_dat_r", 32)
        self.sel = Signal(prefix + "_sel", 4)
        self.we = Signal(prefix + "_we")
        self.cyc = Signal(prefix + "_cyc")
        self.stb = Signal(prefix + "_stb")
        self.ack = Signal(prefix + "_ack")

    def master_inputs(self):
        # what a testbench drives when it acts as the bus master
        return (self.adr, self.dat_w, self.sel, self.we, self.cyc, self.stb)

    def signals(self):
        return (self.adr, self.dat_w, self.dat_r, self.sel, self.we,
                self.cyc, self.stb, self.ack)


@dataclass(frozen=True)
class MemoryRegion:
    name: str
    origin: int
    length: int
    kind: str

    def __post_init__(self):
        if self.kind not in ("rom", "ram", "csr"):
            raise ValueError("region kind must be rom, ram or csr")
        if self.origin % 4 or self.length % 4:
            raise ValueError("region origin and length must be multiples of 4")
        if self.length <= 0:
            raise ValueError("region length must be positive")

    @property
    def end(self):
        return self.origin + self.length


def check_regions(regions):
    regions = list(regions)
    for i, a in enumerate(regions):
        for b in regions[i + 1:]:
            if a.origin < b.end and b.origin < a.end:
                raise OverlapError(
                    "memory regions '{}' and '{}' overlap".format(a.name, b.name))


def bus_decoder(bus, slaves):
    """Route bus accesses to slave buses by address region.

    slaves is a list of (MemoryRegion, SystemBus) pairs; regions must not
    overlap.  Slave addresses are rebased so each slave sees word offsets
    from its region origin.  Unmapped accesses are acknowledged after one
    cycle with dat_r = 0xFFFFFFFF.
    """
    check_regions(region for region, _ in slaves)
    m = Module()
    hits = []
    for region, slave in slaves:
        lo = region.origin >> 2
        hi = region.end >> 2
        hit = Signal(region.name + "_hit")
        m.comb += [
            hit.eq((bus.adr >= lo) & (bus.adr < hi)),
            slave.cyc.eq(bus.cyc & hit),
            slave.stb.eq(bus.stb & hit),
            slave.we.eq(bus.we),
            slave.sel.eq(bus.sel),
            slave.dat_w.eq(bus.dat_w),
            slave.adr.eq(bus.adr - lo),
        ]
        hits.append((hit, slave))

    unmapped_ack = Signal("unmapped_ack")
    if hits:
        any_hit = reduce(lambda a, b: a | b, (hit for hit, _ in hits))
    else:
        any_hit = 0
    m.sync += unmapped_ack.eq(bus.cyc & bus.stb & ~(any_hit | unmapped_ack))
    stmts = [bus.dat_r.eq(UNMAPPED_DATA), bus.ack.eq(unmapped_ack)]
    for hit, slave in hits:
        stmts.append(If(hit, bus.dat_r.eq(slave.dat_r), bus.ack.eq(slave.ack)))
    m.comb += stmts
    return m


def bus_to_csr_bridge(bus, csr_port):
    """One bus word transaction becomes one CSR word access with one cycle
    of ack latency.  Byte selects are ignored: the CSR window is
    full-word only."""
    m = Module()
    adr_width = csr_port.adr.width
    m.comb += [
        csr_port.adr.eq(bus.adr[0:adr_width]),
        csr_port.dat_w.eq(bus.dat_w),
        csr_port.we.eq(bus.cyc & bus.stb & bus.we & ~bus.ack),
    ]
    m.sync += [
        bus.ack.eq(bus.cyc & bus.stb & ~bus.ack),
        bus.dat_r.eq(csr_port.dat_r),
    ]
    return m
