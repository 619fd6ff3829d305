"""Control/status registers and the auto-generated register bank.

A bank allocates one data-width word per register chunk, sequentially from
its base word address in declaration order.  Registers wider than the data
width span ceil(size/dw) consecutive words with the most significant chunk
at the lowest address.  Storage registers are written by the bus and read
back; status registers present a live expression and ignore writes.  Every
register owns a write strobe that pulses for one cycle after a bus write
to its last (least significant) word.
"""

from ..hdl.ast import Case, If, Signal, Slice, shape
from ..hdl.module import Module

__all__ = ["CsrRegister", "CsrPort", "csr_bank"]

CSR_ADDRESS_WIDTH = 14  # word addresses inside one 64 KiB CSR window


class CsrRegister:
    """One software-visible register.  Use the storage()/status() factories."""

    def __init__(self, name, size, mode, storage=None, status=None, strobe=None):
        if size < 1:
            raise ValueError("register size must be >= 1 bit")
        if mode not in ("rw", "ro"):
            raise ValueError("mode must be 'rw' or 'ro'")
        self.name = name
        self.size = size
        self.mode = mode
        self.storage_signal = storage
        self.status_value = status
        self.strobe = strobe

    @classmethod
    def storage(cls, name, size, reset=0):
        sig = Signal(name, size, reset=reset)
        strobe = Signal(name + "_strobe")
        return cls(name, size, "rw", storage=sig, strobe=strobe)

    @classmethod
    def status(cls, name, value):
        strobe = Signal(name + "_strobe")
        return cls(name, shape(value).width, "ro", status=value, strobe=strobe)

    def words(self, data_width=32):
        return (self.size + data_width - 1) // data_width

    def read_value(self):
        return self.storage_signal if self.mode == "rw" else self.status_value


class CsrPort:
    """Word-granular register access port: adr/dat_w/we in, dat_r out.
    An idle bank drives dat_r to 0, so several banks' read data can be
    OR-combined onto one master."""

    def __init__(self, prefix="csr", data_width=32, adr_width=CSR_ADDRESS_WIDTH):
        self.adr = Signal(prefix + "_adr", adr_width)
        self.dat_w = Signal(prefix + "_dat_w", data_width)
        self.dat_r = Signal(prefix + "_dat_r", data_width)
        self.we = Signal(prefix + "_we")
        self.data_width = data_width


def csr_bank(registers, base_word_address=0, data_width=32, port=None):
    """Build the register bank module for an ordered list of CsrRegisters.

    The module's .port is its CsrPort and .word_map lists
    (register, first word address, word count) in allocation order.
    """
    registers = list(registers)
    names = [reg.name for reg in registers]
    for name in names:
        if names.count(name) > 1:
            raise ValueError("duplicate register name {!r}".format(name))

    m = Module()
    if port is None:
        port = CsrPort(data_width=data_width)
    m.port = port
    m.registers = registers

    word = base_word_address
    word_map = []
    read_arms = []
    for reg in registers:
        nwords = reg.words(data_width)
        word_map.append((reg, word, nwords))
        value = reg.read_value()
        for i in range(nwords):
            lo = (nwords - 1 - i) * data_width
            hi = min(reg.size, lo + data_width)
            if lo == 0 and hi == shape(value).width:
                chunk = value
            else:
                chunk = Slice(value, lo, hi)
            read_arms.append((word + i, [port.dat_r.eq(chunk)]))
            if reg.mode == "rw":
                m.sync += If(
                    port.we & (port.adr == word + i),
                    Slice(reg.storage_signal, lo, hi).eq(
                        Slice(port.dat_w, 0, hi - lo)),
                )
        m.sync += reg.strobe.eq(port.we & (port.adr == word + nwords - 1))
        word += nwords
    m.word_map = word_map

    if read_arms:
        m.comb += Case(port.adr, read_arms, default=[])
    return m
