"""SoC assembly: clock/reset binding, bus, decoder, CSR bridge, selected
peripherals at fixed addresses, and the exported CSR map.

Address map: the integrated ROM (when present) lives at 0x0000_0000 and
the CSR window at 0x8200_0000 (64 KiB).  Each peripheral owns 0x800 bytes
of CSR space in instantiation order; registers are allocated one 32-bit
word at a time in declaration order.

The SoC has no CPU: the system bus master port is exposed at the design
boundary so a testbench (or the simulator stimulus) drives it directly.
"""

from dataclasses import dataclass
from functools import reduce

from ..hdl.ast import Cat, ClockDomain
from ..hdl.module import Module
from .bus import MemoryRegion, SystemBus, bus_decoder, bus_to_csr_bridge
from .csr import CsrPort, csr_bank
from .peripherals import GpioIn, GpioOut, Rom, Timer, Uart

__all__ = ["SocConfig", "SocMap", "soc_build", "emit_csr_map", "parse_csr_map"]

ROM_BASE = 0x0000_0000
CSR_BASE = 0x8200_0000
CSR_WINDOW = 0x1_0000
CSR_STRIDE = 0x800  # bytes of CSR space per peripheral


@dataclass(eq=False)
class SocConfig:
    with_timer: bool = True
    with_uart: bool = True
    with_gpio: bool = True
    rom_init: bytes = b""
    rom_size: int = 0x8000
    sys_clk_freq: float = 100e6
    uart_divisor: int = 4


@dataclass(frozen=True)
class SocMap:
    """Everything software needs to know: memory regions, per-peripheral
    CSR bases, and every register's absolute address."""
    regions: tuple      # MemoryRegion
    peripherals: tuple  # (name, base byte address)
    registers: tuple    # (name, byte address, word count, "rw"/"ro")


def soc_build(platform, config=None):
    """Assemble the SoC on a platform; returns (module, SocMap).

    The platform's default clock pad becomes clock domain "sys"; the
    domain reset is left undriven so it lowers to a sys_rst input port.
    """
    if config is None:
        config = SocConfig()
    if config.sys_clk_freq <= 0:
        raise ValueError("sys_clk_freq must be positive")

    m = Module()
    clk = platform.request(platform.default_clk_name)
    platform.add_period_constraint(clk, platform.default_clk_period)
    cd_sys = ClockDomain("sys", clk=clk)
    m.clock_domains += cd_sys
    m.sys_rst = cd_sys.rst

    bus = SystemBus()
    m.bus = bus

    slaves = []
    regions = []
    if config.rom_size:
        rom = Rom(config.rom_init, config.rom_size)
        m.submodules.rom = rom
        rom_region = MemoryRegion("rom", ROM_BASE, config.rom_size, "rom")
        slaves.append((rom_region, rom.bus))
        regions.append(rom_region)
        m.rom = rom

    peripherals = []
    if config.with_timer:
        peripherals.append(("timer", Timer()))
    if config.with_uart:
        serial = platform.request("serial")
        m.serial = serial
        peripherals.append(("uart", Uart(serial.tx, serial.rx,
                                         divisor=config.uart_divisor)))
    if config.with_gpio:
        leds = [platform.request("user_led", i)
                for i in platform.available_indices("user_led")]
        switches = [platform.request("user_sw", i)
                    for i in platform.available_indices("user_sw")]
        m.leds = leds
        m.switches = switches
        if leds:
            peripherals.append(("gpio_out", GpioOut(Cat(*leds))))
        if switches:
            peripherals.append(("gpio_in", GpioIn(Cat(*switches))))

    map_peripherals = []
    map_registers = []
    if peripherals:
        csr_region = MemoryRegion("csr", CSR_BASE, CSR_WINDOW, "csr")
        regions.append(csr_region)
        csr_bus = SystemBus(prefix="csr_bus")
        bridge_port = CsrPort(prefix="csr_master")
        m.submodules.csr_bridge = bus_to_csr_bridge(csr_bus, bridge_port)
        slaves.append((csr_region, csr_bus))
        m.csr_bus = csr_bus
        m.csr_port = bridge_port

        read_datas = []
        for i, (pname, periph) in enumerate(peripherals):
            base_word = i * (CSR_STRIDE // 4)
            base_addr = CSR_BASE + i * CSR_STRIDE
            bank_port = CsrPort(prefix=pname + "_csr")
            bank = csr_bank(periph.csrs, base_word, port=bank_port)
            setattr(m.submodules, pname, periph)
            setattr(m.submodules, pname + "_bank", bank)
            m.comb += [
                bank_port.adr.eq(bridge_port.adr),
                bank_port.dat_w.eq(bridge_port.dat_w),
                bank_port.we.eq(bridge_port.we),
            ]
            read_datas.append(bank_port.dat_r)
            map_peripherals.append((pname, base_addr))
            for reg, word, nwords in bank.word_map:
                map_registers.append((
                    "{}_{}".format(pname, reg.name),
                    CSR_BASE + word * 4, nwords, reg.mode))
        m.comb += bridge_port.dat_r.eq(
            reduce(lambda a, b: a | b, read_datas))

    m.submodules.decoder = bus_decoder(bus, slaves)

    socmap = SocMap(regions=tuple(regions),
                    peripherals=tuple(map_peripherals),
                    registers=tuple(map_registers))
    return m, socmap


def emit_csr_map(socmap):
    """Render the CSR map as CSV text (LF line endings):
    memory_region lines, then csr_base lines, then csr_register lines."""
    lines = []
    for r in socmap.regions:
        lines.append("memory_region,{},0x{:08x},{},{}".format(
            r.name, r.origin, r.length, r.kind))
    for name, base in socmap.peripherals:
        lines.append("csr_base,{},0x{:08x},,".format(name, base))
    for name, addr, words, mode in socmap.registers:
        lines.append("csr_register,{},0x{:08x},{},{}".format(
            name, addr, words, mode))
    return "".join(line + "\n" for line in lines)


def parse_csr_map(text):
    """Parse emit_csr_map output back into a SocMap."""
    regions = []
    peripherals = []
    registers = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split(",")
        kind = fields[0]
        if kind == "memory_region":
            _, name, origin, length, rkind = fields
            regions.append(MemoryRegion(name, int(origin, 16), int(length), rkind))
        elif kind == "csr_base":
            _, name, base, _, _ = fields
            peripherals.append((name, int(base, 16)))
        elif kind == "csr_register":
            _, name, addr, words, mode = fields
            if mode not in ("rw", "ro"):
                raise ValueError("line {}: bad register mode {!r}".format(lineno, mode))
            registers.append((name, int(addr, 16), int(words), mode))
        else:
            raise ValueError("line {}: unknown record {!r}".format(lineno, kind))
    return SocMap(regions=tuple(regions), peripherals=tuple(peripherals),
                  registers=tuple(registers))
