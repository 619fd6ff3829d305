"""The designs the command line front end can build: a LED blinker and a
CPU-less mini SoC driven over its exposed bus master port.  Each build
returns the top module, the boundary signals to expose as ports, and a
factory for the design's built-in simulation stimulus."""

from dataclasses import dataclass

from .hdl.ast import ClockDomain, If, Signal
from .hdl.module import Module
from .sim import Expect, Tick, Write
from .soc.integration import SocConfig, soc_build

__all__ = ["Blinker", "BuiltDesign", "build_blinky", "build_minisoc",
           "blinky_led_reference", "bus_write_actions", "bus_read_actions"]


class Blinker(Module):
    """Decrementing counter that toggles a 1-bit LED each time it reaches
    zero.  The counter preload is int(sys_clk_freq * period / 2), giving
    the LED the requested blink period at the given clock frequency."""

    def __init__(self, sys_clk_freq, period):
        self.led = led = Signal("led")

        toggle = Signal("toggle")
        preload = int(sys_clk_freq * period / 2)
        counter = Signal("counter", max=preload + 1)

        self.comb += toggle.eq(counter == 0)
        self.sync += If(toggle,
            led.eq(~led),
            counter.eq(preload),
        ).Else(
            counter.eq(counter - 1),
        )

        self.preload = preload
        self.counter = counter
        self.toggle = toggle


def blinky_led_reference(preload, nticks):
    """Software model of the blinker: expected LED value after each tick."""
    led = 0
    counter = 0
    out = []
    for _ in range(nticks):
        if counter == 0:
            led ^= 1
            counter = preload
        else:
            counter -= 1
        out.append(led)
    return out


@dataclass(eq=False)
class BuiltDesign:
    name: str
    module: Module
    boundary: set
    platform: object
    socmap: object
    make_stimulus: callable


def build_blinky(platform, sys_clk_freq=100e6, period=0.1):
    blinker = Blinker(sys_clk_freq, period)
    top = Module()
    top.submodules.blinker = blinker
    led_pad = platform.request("user_led")
    clk = platform.request(platform.default_clk_name)
    platform.add_period_constraint(clk, platform.default_clk_period)
    top.clock_domains += ClockDomain("sys", clk=clk)
    top.comb += led_pad.eq(blinker.led)
    top.blinker = blinker

    def make_stimulus(nticks):
        actions = []
        for value in blinky_led_reference(blinker.preload, nticks):
            actions.append(Tick())
            actions.append(Expect(led_pad, value))
        return actions

    return BuiltDesign("blinky", top, {led_pad}, platform, None, make_stimulus)


def bus_write_actions(bus, addr, value):
    """Stimulus for one bus write; every slave acks one cycle after stb."""
    return [
        Write(bus.adr, addr >> 2),
        Write(bus.dat_w, value),
        Write(bus.sel, 0xF),
        Write(bus.we, 1),
        Write(bus.cyc, 1),
        Write(bus.stb, 1),
        Tick(),
        Expect(bus.ack, 1),
        Write(bus.stb, 0),
        Write(bus.cyc, 0),
        Write(bus.we, 0),
        Tick(),
    ]


def bus_read_actions(bus, addr, expect=None):
    actions = [
        Write(bus.adr, addr >> 2),
        Write(bus.we, 0),
        Write(bus.cyc, 1),
        Write(bus.stb, 1),
        Tick(),
        Expect(bus.ack, 1),
    ]
    if expect is not None:
        actions.append(Expect(bus.dat_r, expect))
    actions += [
        Write(bus.stb, 0),
        Write(bus.cyc, 0),
        Tick(),
    ]
    return actions


def build_minisoc(platform, config=None):
    if config is None:
        config = SocConfig()
    soc, socmap = soc_build(platform, config)
    boundary = set(platform.requested_signals) | set(soc.bus.signals())
    registers = {name: addr for name, addr, _, _ in socmap.registers}

    def make_stimulus(nticks):
        bus = soc.bus
        actions = [Write(soc.sys_rst, 1), Tick(), Write(soc.sys_rst, 0)]
        if config.with_uart:
            # hold the serial line at idle so the receiver stays quiet
            actions.insert(0, Write(soc.serial.rx, 1))
        if config.rom_size:
            word0 = int.from_bytes(config.rom_init[0:4].ljust(4, b"\0"), "little")
            actions += bus_read_actions(bus, 0x0000_0000, word0)
        if config.with_timer:
            actions += bus_write_actions(bus, registers["timer_load"], 0x12345678)
            actions += bus_read_actions(bus, registers["timer_load"], 0x12345678)
        if config.with_gpio and getattr(soc, "leds", None):
            pattern = 0b10 if len(soc.leds) > 1 else 0b1
            actions += bus_write_actions(bus, registers["gpio_out_out"], pattern)
            for bit, led in enumerate(soc.leds):
                actions.append(Expect(led, (pattern >> bit) & 1))
        actions += bus_read_actions(bus, 0x4000_0000, 0xFFFFFFFF)
        used = sum(a.count for a in actions if isinstance(a, Tick))
        if nticks > used:
            actions.append(Tick(count=nticks - used))
        return actions

    return BuiltDesign("minisoc", soc, boundary, platform, socmap, make_stimulus)
