"""Design elements a backend handles specially: memories and instances of
external (hand-written) Verilog modules."""

from .ast import Signal, bits_for, wrap, _check_assignable

__all__ = ["Special", "Memory", "MemoryPort", "Instance"]


class Special:
    pass


class MemoryPort:
    """One access port of a Memory.  Reads are synchronous to the port's
    clock domain: dat_r is registered and shows the word addressed at the
    previous clock edge.  When the port is write-capable, we=1 at a clock
    edge stores dat_w at adr; a simultaneous read of the same address
    returns the old word."""

    def __init__(self, memory, adr, dat_r, we=None, dat_w=None, domain="sys"):
        if (we is None) != (dat_w is None):
            raise ValueError("we and dat_w must be given together")
        for sig in (adr, dat_r) + ((we, dat_w) if we is not None else ()):
            if not isinstance(sig, Signal):
                raise TypeError("memory port connections must be signals")
        if adr.width < bits_for(memory.depth - 1):
            raise ValueError(
                "port address width {} cannot address {} words"
                .format(adr.width, memory.depth))
        for data in (dat_r,) + ((dat_w,) if dat_w is not None else ()):
            if data.width != memory.width:
                raise ValueError(
                    "port data width {} does not match the {}-bit memory"
                    .format(data.width, memory.width))
        self.memory = memory
        self.adr = adr
        self.dat_r = dat_r
        self.we = we
        self.dat_w = dat_w
        self.domain = domain


class Memory(Special):
    """A word-addressed storage array with synchronous-read ports."""

    def __init__(self, name, width, depth, init=()):
        if width < 1 or depth < 1:
            raise ValueError("memory width and depth must be >= 1")
        init = tuple(int(v) for v in init)
        if len(init) > depth:
            raise ValueError("memory init has {} words but depth is {}"
                             .format(len(init), depth))
        for v in init:
            if not 0 <= v < (1 << width):
                raise ValueError("memory init value {} not representable in "
                                 "{} bits".format(v, width))
        self.name = name
        self.width = width
        self.depth = depth
        self.init = init
        self.ports = []

    def get_port(self, write=False, domain="sys"):
        n = len(self.ports)
        adr = Signal("{}_adr{}".format(self.name, n), bits_for(self.depth - 1))
        dat_r = Signal("{}_dat_r{}".format(self.name, n), self.width)
        we = dat_w = None
        if write:
            we = Signal("{}_we{}".format(self.name, n))
            dat_w = Signal("{}_dat_w{}".format(self.name, n), self.width)
        port = MemoryPort(self, adr, dat_r, we, dat_w, domain)
        self.ports.append(port)
        return port


class Instance(Special):
    """Instantiation of an external Verilog module, emitted verbatim.

    parameters is a list of (name, int-or-str) pairs; ports is a list of
    (port name, direction, value) with direction one of "in", "out",
    "inout".  Output and inout connections must be assignable (they are
    driven by the instance); inputs may be arbitrary expressions.
    """

    def __init__(self, module_name, parameters=(), ports=()):
        if not isinstance(module_name, str) or not module_name:
            raise TypeError("instance module name must be a non-empty string")
        self.module_name = module_name
        self.parameters = []
        for name, value in parameters:
            if not isinstance(value, (int, str)):
                raise TypeError("instance parameter {!r} must be an int or str"
                                .format(name))
            self.parameters.append((name, value))
        self.ports = []
        for name, direction, value in ports:
            if direction not in ("in", "out", "inout"):
                raise ValueError("bad port direction {!r}".format(direction))
            value = wrap(value)
            if direction in ("out", "inout"):
                _check_assignable(value)
            self.ports.append((name, direction, value))
