"""Deterministic two-phase cycle simulator.

There is no event queue: combinatorial logic settles to a fixed point
(each comb group executes in statement order against the values the pass
started with, and all groups commit together, pass after pass), then a
clock tick evaluates the domain's synchronous statements against the
settled values and commits every register update at once.  A testbench
drives boundary inputs between phases with write() and advances named
clock domains with tick().

Values observed through read() are the unsigned bit patterns of the
signals (0 <= v < 2**width); evaluation internally reinterprets patterns
according to each signal's signedness.
"""

from dataclasses import dataclass

from .analysis import LoweredDesign, lower
from .hdl.ast import (
    Assign, Binary, Case, Cat, Constant, If, Mux, Replicate, Signal, Slice,
    Unary, mask_value, shape, signed_view,
)
from .vcd import VcdWriter

__all__ = ["CombLoopError", "ExpectationError", "Simulator",
           "Write", "Tick", "Expect"]


class CombLoopError(Exception):
    pass


class ExpectationError(Exception):
    pass


@dataclass(eq=False)
class Write:
    signal: Signal
    value: int


@dataclass(eq=False)
class Tick:
    domain: str = "sys"
    count: int = 1


@dataclass(eq=False)
class Expect:
    signal: Signal
    value: int


class Simulator:
    """Simulation state of one lowered design.

    Construct from a finalized fragment and its boundary signals, or pass
    an already-lowered design.  All synchronously driven signals start at
    their reset values, inputs at 0, and combinatorial logic is settled
    once before the first read.
    """

    def __init__(self, fragment=None, boundary=(), *, design=None,
                 external_domains=("sys",)):
        if design is None:
            design = lower(fragment, boundary, external_domains)
        if not isinstance(design, LoweredDesign):
            raise TypeError("design must be a LoweredDesign")
        if design.instances:
            raise ValueError(
                "designs containing external instances cannot be simulated; "
                "no behavioural model is available for them")
        self.design = design
        self._inputs = {sig for sig, d in design.ports if d == "in"}
        self._values = {}
        for sig in design.signals:
            if sig in self._inputs:
                self._values[sig] = 0
            else:
                self._values[sig] = mask_value(sig.reset, sig.width)
        self._memories = {}
        for mem in design.memories:
            words = list(mem.init) + [0] * (mem.depth - len(mem.init))
            self._memories[mem] = words
        self._mem_ports = {}
        for mem in design.memories:
            for port in mem.ports:
                self._mem_ports.setdefault(port.domain, []).append((mem, port))
        self.cycles = {name: 0 for name in design.domains}
        self.total_ticks = 0
        self._shapes = {}
        self._local = None  # active comb group's write overlay
        self._vcd = None
        self._vcd_codes = {}
        self._settle()

    # -- expression evaluation -------------------------------------------

    def _shape(self, v):
        try:
            return self._shapes[v]
        except KeyError:
            s = shape(v)
            self._shapes[v] = s
            return s

    def _eval(self, v):
        if isinstance(v, Constant):
            return v.value
        if isinstance(v, Signal):
            local = self._local
            if local is not None and v in local:
                pattern = local[v]
            else:
                pattern = self._values[v]
            return signed_view(pattern, v.width) if v.signed else pattern
        if isinstance(v, Unary):
            a = self._eval(v.operand)
            if v.op == "neg":
                return -a
            w, signed = self._shape(v.operand)
            if signed:
                return -a - 1
            return mask_value(~a, w)
        if isinstance(v, Binary):
            a = self._eval(v.lhs)
            if v.op in ("shl", "shr"):
                wb = self._shape(v.rhs).width
                amount = mask_value(self._eval(v.rhs), wb)
                return a << amount if v.op == "shl" else a >> amount
            b = self._eval(v.rhs)
            if v.op == "add":
                return a + b
            if v.op == "sub":
                return a - b
            if v.op == "mul":
                return a * b
            if v.op == "and":
                return a & b
            if v.op == "or":
                return a | b
            if v.op == "xor":
                return a ^ b
            if v.op == "eq":
                return int(a == b)
            if v.op == "ne":
                return int(a != b)
            if v.op == "lt":
                return int(a < b)
            if v.op == "le":
                return int(a <= b)
            if v.op == "gt":
                return int(a > b)
            return int(a >= b)
        if isinstance(v, Mux):
            if self._eval(v.cond) != 0:
                return self._eval(v.if_true)
            return self._eval(v.if_false)
        if isinstance(v, Slice):
            w = self._shape(v.operand).width
            pattern = mask_value(self._eval(v.operand), w)
            return (pattern >> v.low) & ((1 << (v.high - v.low)) - 1)
        if isinstance(v, Cat):
            out = 0
            offset = 0
            for part in v.parts:
                w = self._shape(part).width
                out |= mask_value(self._eval(part), w) << offset
                offset += w
            return out
        if isinstance(v, Replicate):
            w = self._shape(v.operand).width
            pattern = mask_value(self._eval(v.operand), w)
            out = 0
            for k in range(v.count):
                out |= pattern << (k * w)
            return out
        raise TypeError("cannot evaluate {!r}".format(v))

    # -- assignment -------------------------------------------------------

    def _assign(self, target, value, store):
        if isinstance(target, Signal):
            store[target] = mask_value(value, target.width)
        elif isinstance(target, Slice):
            sig = target.operand
            base = store.get(sig, self._values[sig])
            field_w = target.high - target.low
            field = mask_value(value, field_w)
            keep = ~(((1 << field_w) - 1) << target.low)
            store[sig] = (base & keep) | (field << target.low)
        elif isinstance(target, Cat):
            offset = 0
            for part in target.parts:
                w = self._shape(part).width
                self._assign(part, (value >> offset) & ((1 << w) - 1), store)
                offset += w
        else:
            raise TypeError("bad assignment target {!r}".format(target))

    # -- combinatorial settling -------------------------------------------
    #
    # One settle pass evaluates every comb group against the values the
    # pass started with (reads of another group's targets never observe
    # same-pass updates) and commits all groups at once; within a group,
    # statements see their own earlier writes.  Passes repeat until a
    # fixed point, bounded by the number of comb-driven signals plus two.

    def _exec(self, stmt, store):
        if isinstance(stmt, Assign):
            self._assign(stmt.target, self._eval(stmt.value), store)
        elif isinstance(stmt, If):
            body = stmt.then_body if self._eval(stmt.cond) != 0 else stmt.else_body
            for sub in body:
                self._exec(sub, store)
        elif isinstance(stmt, Case):
            sel = self._eval(stmt.selector)
            for const, body in stmt.arms:
                if sel == const:
                    break
            else:
                body = stmt.default
            for sub in body:
                self._exec(sub, store)
        else:
            raise TypeError("cannot execute {!r}".format(stmt))

    def _settle(self):
        groups = self.design.comb_groups
        limit = len(self.design.comb_targets) + 2
        for _ in range(limit):
            updates = []
            for group in groups:
                local = {}
                self._local = local
                for stmt in group.body:
                    self._exec(stmt, local)
                updates.append(local)
            self._local = None
            changed = False
            for local in updates:
                for sig, value in local.items():
                    if self._values[sig] != value:
                        changed = True
                        self._values[sig] = value
            if not changed:
                return
        raise CombLoopError(
            "combinatorial logic did not reach a fixed point after {} "
            "iterations".format(limit))

    # -- synchronous ticks --------------------------------------------------

    def tick(self, domain="sys", count=1):
        """Advance one clock domain: evaluate its synchronous statements
        against current settled values, commit all updates at once, then
        settle combinatorial logic."""
        if domain not in self.design.domains:
            raise ValueError("unknown clock domain {!r}".format(domain))
        proc = self.design.processes.get(domain)
        mem_ports = self._mem_ports.get(domain, ())
        for _ in range(count):
            pending = {}
            if proc is not None:
                in_reset = (proc.reset_assigns
                            and self._values[proc.domain.rst] != 0)
                stmts = proc.reset_assigns if in_reset else proc.body
                for stmt in stmts:
                    self._exec(stmt, pending)
            mem_writes = []
            for mem, port in mem_ports:
                words = self._memories[mem]
                adr = self._values[port.adr]
                pending[port.dat_r] = words[adr] if adr < mem.depth else 0
                if port.we is not None and self._values[port.we] != 0:
                    mem_writes.append((words, adr, self._values[port.dat_w]))
            self._values.update(pending)
            for words, adr, value in mem_writes:
                if adr < len(words):
                    words[adr] = value
            self.cycles[domain] += 1
            self.total_ticks += 1
            self._settle()
            self._vcd_sample()

    # -- testbench interface -------------------------------------------------

    def read(self, signal):
        """Settled value of a signal, as its unsigned bit pattern."""
        try:
            return self._values[signal]
        except KeyError:
            raise ValueError("signal {!r} is not part of this design"
                             .format(signal)) from None

    def write(self, signal, value):
        """Drive a boundary input.  Values wider than the signal are
        masked to its width."""
        if signal not in self._inputs:
            raise ValueError(
                "signal '{}' is not a boundary input; only inputs may be "
                "written by the testbench".format(signal.name))
        self._values[signal] = mask_value(int(value), signal.width)
        self._settle()

    def read_memory(self, memory, index):
        return self._memories[memory][index]

    def run(self, actions):
        """Apply stimulus actions in order.  Returns the observation trace,
        one (tick count, signal, observed value) row per Expect."""
        trace = []
        for act in actions:
            if isinstance(act, Write):
                self.write(act.signal, act.value)
            elif isinstance(act, Tick):
                self.tick(act.domain, act.count)
            elif isinstance(act, Expect):
                actual = self.read(act.signal)
                expected = mask_value(int(act.value), act.signal.width)
                trace.append((self.total_ticks, act.signal, actual))
                if actual != expected:
                    name = self.design.names.get(act.signal, act.signal.name)
                    raise ExpectationError(
                        "cycle {}: signal '{}': expected {}, got {}".format(
                            self.total_ticks, name, expected, actual))
            else:
                raise TypeError("unknown stimulus action {!r}".format(act))
        return trace

    # -- tracing ---------------------------------------------------------------

    def trace_to(self, fileobj):
        """Write a VCD trace of every named signal to fileobj; one
        timestep per tick, starting with the current state at time 0."""
        self._vcd = VcdWriter(fileobj)
        for sig in self.design.signals:
            code = self._vcd.add_var(self.design.names[sig], sig.width)
            self._vcd_codes[sig] = code
        self._vcd.write_header()
        self._vcd_sample()

    def _vcd_sample(self):
        if self._vcd is None:
            return
        values = {self._vcd_codes[sig]: self._values[sig]
                  for sig in self.design.signals}
        self._vcd.sample(self.total_ticks, values)
