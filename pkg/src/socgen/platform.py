"""Board descriptions: named, indexed pin groups with IO attributes, a
request API that mints connected signals, period constraints, and
constraint-file emission in an xdc-like and an lpf-like dialect.

Two board definitions ship with the package ("nexys4ddr-like" and
"versa-ecp5-like").  Only a handful of their pin sites correspond to real
board documentation (the Nexys4DDR user LEDs H17/K15, serial D4/C4 with
LVCMOS33, and the 10.0 ns default clock); every other site label is a
fabricated placeholder kept only so example designs elaborate end to end.
"""

from types import SimpleNamespace

from .hdl.ast import Signal

__all__ = [
    "Pins", "Subsignal", "IOStandard", "Misc", "Platform",
    "nexys4ddr_like", "versa_ecp5_like", "make_platform", "PLATFORMS",
]


class Pins:
    def __init__(self, names):
        self.names = tuple(names.split())
        if not self.names:
            raise ValueError("a Pins group needs at least one pin")


class IOStandard:
    def __init__(self, name):
        self.name = name


class Misc:
    def __init__(self, text):
        self.text = text


class Subsignal:
    def __init__(self, name, *attrs):
        self.name = name
        self.pins = None
        self.iostandard = None
        self.misc = []
        for attr in attrs:
            if isinstance(attr, Pins):
                self.pins = attr
            elif isinstance(attr, IOStandard):
                self.iostandard = attr.name
            elif isinstance(attr, Misc):
                self.misc.append(attr.text)
            else:
                raise TypeError("bad subsignal attribute {!r}".format(attr))
        if self.pins is None:
            raise ValueError("subsignal {!r} has no pins".format(name))


class _Entry:
    def __init__(self, name, index, attrs):
        self.name = name
        self.index = index
        self.pins = None
        self.subsignals = []
        self.iostandard = None
        self.misc = []
        for attr in attrs:
            if isinstance(attr, Pins):
                self.pins = attr
            elif isinstance(attr, Subsignal):
                self.subsignals.append(attr)
            elif isinstance(attr, IOStandard):
                self.iostandard = attr.name
            elif isinstance(attr, Misc):
                self.misc.append(attr.text)
            else:
                raise TypeError("bad io entry attribute {!r}".format(attr))
        if (self.pins is None) == (not self.subsignals):
            raise ValueError(
                "io entry {!r} needs either top-level pins or subsignals"
                .format(name))


class Platform:
    """One board: an io table, a device name, a default clock, and the
    constraint dialect the board's toolchain expects ("xdc" or "lpf")."""

    def __init__(self, device, io, default_clk_name=None,
                 default_clk_period=None, dialect="xdc"):
        if dialect not in ("xdc", "lpf"):
            raise ValueError("dialect must be 'xdc' or 'lpf'")
        self.device = device
        self.dialect = dialect
        self.default_clk_name = default_clk_name
        self.default_clk_period = default_clk_period
        self.io = []
        seen = set()
        for name, index, *attrs in io:
            if (name, index) in seen:
                raise ValueError("duplicate io entry ({!r}, {})".format(name, index))
            seen.add((name, index))
            self.io.append(_Entry(name, index, attrs))
        self._requested = {}       # (name, index) -> [(signal, pins, std, misc)]
        self._signals = set()
        self.requested_signals = []
        self.period_constraints = []

    def available_indices(self, name):
        return sorted(e.index for e in self.io
                      if e.name == name and (name, e.index) not in self._requested)

    def request(self, name, index=None):
        """Mint signals bound to an io entry and consume it.

        A top-level Pins entry of k pins yields one k-bit signal; an entry
        made of subsignals yields a record with one signal per subsignal.
        Without an index, the lowest unrequested index is used.
        """
        if not any(e.name == name for e in self.io):
            raise ValueError("unknown io entry {!r}".format(name))
        if index is None:
            free = self.available_indices(name)
            if not free:
                raise ValueError("all {!r} entries already requested".format(name))
            index = free[0]
        if (name, index) in self._requested:
            raise ValueError("io entry ({!r}, {}) requested twice".format(name, index))
        entry = None
        for e in self.io:
            if e.name == name and e.index == index:
                entry = e
                break
        if entry is None:
            raise ValueError("unknown io entry ({!r}, {})".format(name, index))

        bindings = []
        if entry.pins is not None:
            sig = Signal(name, len(entry.pins.names))
            bindings.append((sig, entry.pins.names, entry.iostandard, tuple(entry.misc)))
            result = sig
        else:
            record = SimpleNamespace()
            for sub in entry.subsignals:
                sig = Signal("{}_{}".format(name, sub.name), len(sub.pins.names))
                std = sub.iostandard if sub.iostandard is not None else entry.iostandard
                misc = tuple(sub.misc) if sub.misc else tuple(entry.misc)
                bindings.append((sig, sub.pins.names, std, misc))
                setattr(record, sub.name, sig)
            result = record
        self._requested[(name, index)] = bindings
        for sig, _, _, _ in bindings:
            self._signals.add(sig)
            self.requested_signals.append(sig)
        return result

    def add_period_constraint(self, signal, period_ns):
        """Record a clock period constraint on a requested signal.
        Repeating the same period is idempotent; conflicting periods are
        rejected."""
        if signal not in self._signals:
            raise ValueError("period constraint on a signal that was not "
                             "minted by request()")
        period_ns = float(period_ns)
        if period_ns <= 0:
            raise ValueError("period must be positive")
        for sig, period in self.period_constraints:
            if sig is signal:
                if period != period_ns:
                    raise ValueError(
                        "conflicting period constraints on '{}': {} vs {}"
                        .format(signal.name, period, period_ns))
                return
        self.period_constraints.append((signal, period_ns))

    def emit_constraints(self, ports):
        """Constraint file text for every requested pin, in io-table order,
        followed by the period constraints.

        ports maps each requested boundary signal to its final port name
        (from the lowered design's name map)."""
        def port_name(sig, bit, width):
            try:
                base = ports[sig]
            except KeyError:
                raise ValueError(
                    "requested signal '{}' is missing from the port table"
                    .format(sig.name)) from None
            if width == 1:
                return base
            return "{}[{}]".format(base, bit)

        lines = []
        for entry in self.io:
            bindings = self._requested.get((entry.name, entry.index))
            if bindings is None:
                continue
            for sig, pins, std, misc in bindings:
                for bit, pin in enumerate(pins):
                    name = port_name(sig, bit, len(pins))
                    if self.dialect == "xdc":
                        props = "PACKAGE_PIN {}".format(pin)
                        if std is not None:
                            props += " IOSTANDARD {}".format(std)
                        for extra in misc:
                            props += " {}".format(extra)
                        lines.append(
                            "set_property -dict {{ {} }} [get_ports {{{}}}]"
                            .format(props, name))
                    else:
                        lines.append('LOCATE COMP "{}" SITE "{}";'.format(name, pin))
                        if std is not None:
                            iobuf = 'IOBUF PORT "{}" IO_TYPE={}'.format(name, std)
                            for extra in misc:
                                iobuf += " {}".format(extra)
                            lines.append(iobuf + ";")
        for sig, period in self.period_constraints:
            name = port_name(sig, 0, sig.width)
            if self.dialect == "xdc":
                lines.append(
                    "create_clock -name {0} -period {1} [get_ports {{{0}}}]"
                    .format(name, repr(period)))
            else:
                mhz = 1000.0 / period
                mhz_text = str(int(mhz)) if mhz == int(mhz) else repr(mhz)
                lines.append('FREQUENCY PORT "{}" {} MHZ;'.format(name, mhz_text))
        return "".join(line + "\n" for line in lines)

    def constraints_suffix(self):
        return ".xdc" if self.dialect == "xdc" else ".lpf"


def nexys4ddr_like():
    """Artix-7 style board. Real sites: H17, K15, D4, C4 (LVCMOS33) and the
    10.0 ns default clock; clk100/E3 and the switch sites are placeholders."""
    io = [
        ("clk100", 0, Pins("E3"), IOStandard("LVCMOS33")),
        ("user_led", 0, Pins("H17"), IOStandard("LVCMOS33")),
        ("user_led", 1, Pins("K15"), IOStandard("LVCMOS33")),
        ("user_sw", 0, Pins("J15"), IOStandard("LVCMOS33")),
        ("user_sw", 1, Pins("L16"), IOStandard("LVCMOS33")),
        ("serial", 0,
            Subsignal("tx", Pins("D4")),
            Subsignal("rx", Pins("C4")),
            IOStandard("LVCMOS33")),
    ]
    return Platform("xc7a100t-CSG324-1", io, default_clk_name="clk100",
                    default_clk_period=10.0, dialect="xdc")


def versa_ecp5_like():
    """ECP5 style board; all pin sites are placeholders."""
    io = [
        ("clk100", 0, Pins("P3"), IOStandard("LVDS")),
        ("user_led", 0, Pins("E16"), IOStandard("LVCMOS25")),
        ("user_led", 1, Pins("D17"), IOStandard("LVCMOS25")),
        ("user_sw", 0, Pins("H2"), IOStandard("LVCMOS15")),
        ("user_sw", 1, Pins("K3"), IOStandard("LVCMOS15")),
        ("serial", 0,
            Subsignal("tx", Pins("A11")),
            Subsignal("rx", Pins("C11")),
            IOStandard("LVCMOS33")),
    ]
    return Platform("LFE5UM-45F-BBG381", io, default_clk_name="clk100",
                    default_clk_period=10.0, dialect="lpf")


PLATFORMS = {
    "nexys4ddr-like": nexys4ddr_like,
    "versa-ecp5-like": versa_ecp5_like,
}


def make_platform(name):
    try:
        return PLATFORMS[name]()
    except KeyError:
        raise ValueError("unknown platform {!r}; available: {}".format(
            name, ", ".join(sorted(PLATFORMS)))) from None
