"""Static semantics over finalized fragments: driver collection, the
single-driver check, top-level port direction inference, and lowering to
the form the Verilog backend and the simulator share.

Lowering performs four jobs:

* resolves every referenced clock domain (undeclared domains are allowed
  only when listed in external_domains; "sys" is external by default);
* rewrites expressions so that every position Verilog evaluates at a
  self-determined width only contains signals, constants or pure bit
  rearrangements of those; anything else is hoisted into a named
  combinatorial proxy signal, which makes emitted Verilog compute at the
  inferred widths;
* groups combinatorial statements by target signal and prepends each
  group's reset-value defaults, making every combinatorial path total
  (no latches) one always-block at a time;
* gives every signal a unique legal Verilog name, resolving collisions
  with _0, _1, ... suffixes and escaping backend reserved words with _s.
"""

from dataclasses import dataclass

from .hdl.ast import (
    Assign, Binary, Case, Cat, ClockDomain, Constant, If, Mux, Replicate,
    Signal, Slice, Unary, shape, iter_expr_signals, iter_stmt_targets,
    COMPARE_OPS, SHIFT_OPS,
)
from .hdl.module import Fragment
from .hdl.specials import Instance, Memory
from .verilog import RESERVED_WORDS

__all__ = [
    "MultipleDriverError", "UnresolvedDomainError",
    "collect_drivers", "check_single_driver", "infer_io_directions",
    "lower", "LoweredDesign", "SyncProcess",
]


class MultipleDriverError(Exception):
    pass


class UnresolvedDomainError(Exception):
    pass


# -- driver analysis ----------------------------------------------------------

def collect_drivers(fragment):
    """Map each signal of the fragment to the set of driver classes that
    assign it: "comb", "sync:<domain>" or "special-output".  Assignment
    targets inside If/Case count as driven regardless of conditions."""
    drivers = {}

    def add(sig, cls):
        drivers.setdefault(sig, set()).add(cls)

    for stmt in fragment.comb:
        for sig in iter_stmt_targets(stmt):
            add(sig, "comb")
    for domain, stmts in fragment.sync.items():
        for stmt in stmts:
            for sig in iter_stmt_targets(stmt):
                add(sig, "sync:" + domain)
    for sp in fragment.specials:
        if isinstance(sp, Memory):
            for port in sp.ports:
                add(port.dat_r, "special-output")
        elif isinstance(sp, Instance):
            for _, direction, value in sp.ports:
                if direction in ("out", "inout"):
                    for sig in iter_expr_signals(value):
                        add(sig, "special-output")
    return drivers


def check_single_driver(drivers):
    """Reject any signal assigned from more than one driver class."""
    for sig in sorted(drivers, key=lambda s: s.id):
        classes = drivers[sig]
        if len(classes) > 1:
            raise MultipleDriverError(
                "signal '{}' is driven by {}".format(
                    sig.name, " and ".join(sorted(classes))))


def _read_signals(fragment):
    read = set()

    def stmt_reads(s):
        if isinstance(s, Assign):
            read.update(iter_expr_signals(s.value))
            # a partial (sliced) target also observes the untouched bits
            if not isinstance(s.target, Signal):
                read.update(iter_expr_signals(s.target))
        elif isinstance(s, If):
            read.update(iter_expr_signals(s.cond))
            for sub in s.then_body + s.else_body:
                stmt_reads(sub)
        elif isinstance(s, Case):
            read.update(iter_expr_signals(s.selector))
            for _, body in s.arms:
                for sub in body:
                    stmt_reads(sub)
            for sub in s.default:
                stmt_reads(sub)

    for stmt in fragment.comb:
        stmt_reads(stmt)
    for stmts in fragment.sync.values():
        for stmt in stmts:
            stmt_reads(stmt)
    for sp in fragment.specials:
        if isinstance(sp, Memory):
            for port in sp.ports:
                read.add(port.adr)
                if port.we is not None:
                    read.add(port.we)
                    read.add(port.dat_w)
        elif isinstance(sp, Instance):
            for _, direction, value in sp.ports:
                if direction == "in":
                    read.update(iter_expr_signals(value))
    for cd in fragment.clock_domains:
        read.add(cd.clk)
        read.add(cd.rst)
    return read


def _inout_signals(fragment):
    inout = set()
    for sp in fragment.specials:
        if isinstance(sp, Instance):
            for _, direction, value in sp.ports:
                if direction == "inout":
                    inout.update(iter_expr_signals(value))
    return inout


def infer_io_directions(fragment, boundary):
    """Direction of each nominated top-level signal, from usage inside the
    fragment: driven -> out, only read -> in, tied to an external
    instance inout -> inout, unused -> in."""
    boundary = set(boundary)
    for sig in boundary:
        if not isinstance(sig, Signal):
            raise TypeError("boundary entries must be signals, got {!r}"
                            .format(sig))
    driven = set(collect_drivers(fragment))
    read = _read_signals(fragment)
    inout = _inout_signals(fragment)
    out = []
    for sig in sorted(boundary, key=lambda s: s.id):
        if sig in inout:
            direction = "inout"
        elif sig in driven:
            direction = "out"
        elif sig in read:
            direction = "in"
        else:
            direction = "in"  # unused boundary signals default to inputs
        out.append((sig, direction))
    return out


# -- emit-safety rewriting ----------------------------------------------------

def _is_bitform(v):
    # values Verilog evaluates exactly at their inferred width in any
    # context: signals, constants and pure bit rearrangements of those
    if isinstance(v, (Signal, Constant)):
        return True
    if isinstance(v, Slice):
        return isinstance(v.operand, Signal)
    if isinstance(v, Cat):
        return all(_is_bitform(p) for p in v.parts)
    if isinstance(v, Replicate):
        return _is_bitform(v.operand)
    return False


class _Rewriter:
    def __init__(self):
        self.proxies = []
        self.assigns = []

    def _proxy(self, v):
        w, signed = shape(v)
        sig = Signal("expr", w, signed=signed)
        self.proxies.append(sig)
        self.assigns.append(Assign(sig, v))
        return sig

    def _bitform(self, v):
        v = self.value(v)
        return v if _is_bitform(v) else self._proxy(v)

    def _signal_only(self, v):
        v = self.value(v)
        return v if isinstance(v, Signal) else self._proxy(v)

    def value(self, v):
        if isinstance(v, (Signal, Constant)):
            return v
        if isinstance(v, Unary):
            operand = self.value(v.operand)
            w, signed = shape(operand)
            if v.op == "not" and not signed:
                # Verilog ~ inverts at the context width, which may be wider
                # than the operand; xor against a sized all-ones constant
                # pins the inversion to the operand's own width
                return Binary("xor", operand, Constant((1 << w) - 1))
            if v.op == "neg" and not signed:
                # emitted as a $signed zero-extension, a self-determined spot
                if not _is_bitform(operand):
                    operand = self._proxy(operand)
            return Unary(v.op, operand)
        if isinstance(v, Binary):
            if v.op in COMPARE_OPS:
                return Binary(v.op, self._bitform(v.lhs), self._bitform(v.rhs))
            if v.op in SHIFT_OPS:
                lhs = self._bitform(v.lhs) if v.op == "shr" else self.value(v.lhs)
                return Binary(v.op, lhs, self._bitform(v.rhs))
            lhs = self.value(v.lhs)
            rhs = self.value(v.rhs)
            sl, sr = shape(lhs).signed, shape(rhs).signed
            if sl or sr or v.op == "sub":
                # unsigned operands of a signed operation get a $signed
                # zero-extension wrap at emission, a self-determined spot
                if not sl and not _is_bitform(lhs):
                    lhs = self._proxy(lhs)
                if not sr and not _is_bitform(rhs):
                    rhs = self._proxy(rhs)
            return Binary(v.op, lhs, rhs)
        if isinstance(v, Mux):
            if_true = self.value(v.if_true)
            if_false = self.value(v.if_false)
            st, sf = shape(if_true).signed, shape(if_false).signed
            if st != sf:
                if not st and not _is_bitform(if_true):
                    if_true = self._proxy(if_true)
                if not sf and not _is_bitform(if_false):
                    if_false = self._proxy(if_false)
            return Mux(self._bitform(v.cond), if_true, if_false)
        if isinstance(v, Slice):
            return Slice(self._signal_only(v.operand), v.low, v.high)
        if isinstance(v, Cat):
            return Cat(*[self._bitform(p) for p in v.parts])
        if isinstance(v, Replicate):
            return Replicate(self._bitform(v.operand), v.count)
        raise TypeError("not a value: {!r}".format(v))

    def stmt(self, s):
        if isinstance(s, Assign):
            return Assign(s.target, self.value(s.value))
        if isinstance(s, If):
            new = If(self._bitform(s.cond))
            new.then_body = tuple(self.stmt(sub) for sub in s.then_body)
            new.else_body = tuple(self.stmt(sub) for sub in s.else_body)
            return new
        if isinstance(s, Case):
            arms = [(const, [self.stmt(sub) for sub in body])
                    for const, body in s.arms]
            return Case(self._bitform(s.selector), arms,
                        default=[self.stmt(sub) for sub in s.default])
        raise TypeError("not a statement: {!r}".format(s))

    def instance(self, inst):
        ports = []
        for name, direction, value in inst.ports:
            if direction == "in":
                value = self._bitform(value)
            ports.append((name, direction, value))
        return Instance(inst.module_name, inst.parameters, ports)


# -- lowering -----------------------------------------------------------------

@dataclass(eq=False)
class SyncProcess:
    domain: ClockDomain
    reset_assigns: tuple
    body: tuple
    driven: tuple


@dataclass(eq=False)
class CombGroup:
    """Combinatorial statements sharing targets, preceded by the targets'
    reset-value defaults.  Each group becomes one always @(*) block;
    values cross between groups by re-settling, so only a group's own
    targets are reset when it re-executes."""
    targets: tuple
    body: tuple               # defaults first, then the statements


@dataclass(eq=False)
class LoweredDesign:
    ports: tuple              # (Signal, "in"/"out"/"inout") in port order
    names: dict               # Signal or Memory -> unique legal identifier
    comb_groups: tuple        # CombGroup, in first-statement order
    processes: dict           # domain name -> SyncProcess, sorted by name
    domains: dict             # domain name -> ClockDomain (all resolved)
    memories: tuple
    instances: tuple
    comb_targets: frozenset
    sync_driven: frozenset
    mem_driven: frozenset     # registered memory read data signals
    inst_driven: frozenset    # signals driven by external instances
    signals: tuple            # every named signal, in naming order
    boundary: frozenset

    @property
    def comb(self):
        return tuple(s for group in self.comb_groups for s in group.body)

    @property
    def reg_signals(self):
        return self.comb_targets | self.sync_driven | self.mem_driven


def _group_comb(stmts):
    """Partition combinatorial statements into groups with disjoint target
    sets (statements sharing any target signal land in one group, in
    statement order)."""
    parent = {}

    def find(sig):
        while parent[sig] is not sig:
            parent[sig] = parent[parent[sig]]
            sig = parent[sig]
        return sig

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra is not rb:
            parent[rb] = ra

    stmt_targets = []
    for stmt in stmts:
        targets = []
        seen = set()
        for sig in iter_stmt_targets(stmt):
            if sig not in seen:
                seen.add(sig)
                targets.append(sig)
        stmt_targets.append(targets)
        for sig in targets:
            if sig not in parent:
                parent[sig] = sig
        for a, b in zip(targets, targets[1:]):
            union(a, b)

    indices = {}
    roots = []
    for i, targets in enumerate(stmt_targets):
        if not targets:
            continue  # conditionals with empty bodies describe no logic
        root = find(targets[0])
        if root not in indices:
            indices[root] = []
            roots.append(root)
        indices[root].append(i)

    groups = []
    for root in roots:
        group_targets = []
        seen = set()
        for i in indices[root]:
            for sig in stmt_targets[i]:
                if sig not in seen:
                    seen.add(sig)
                    group_targets.append(sig)
        defaults = tuple(Assign(sig, Constant(sig.reset)) for sig in group_targets)
        body = defaults + tuple(stmts[i] for i in indices[root])
        groups.append(CombGroup(targets=tuple(group_targets), body=body))
    return groups


def _sanitize(hint):
    out = "".join(c if (c.isascii() and c.isalnum()) or c == "_" else "_"
                  for c in hint)
    if not out:
        out = "sig"
    if out[0].isdigit():
        out = "_" + out
    return out


def _unique(used, base):
    if base not in used:
        used.add(base)
        return base
    k = 0
    while "{}_{}".format(base, k) in used:
        k += 1
    name = "{}_{}".format(base, k)
    used.add(name)
    return name


def lower(fragment, boundary=(), external_domains=("sys",)):
    """Lower a finalized fragment to the codegen/simulation form.

    boundary nominates the signals exposed as top-level ports; their
    directions are inferred from usage.  Each resolved clock domain whose
    clock (or reset) is not driven inside the design additionally
    contributes a <domain>_clk (<domain>_rst) input port.
    """
    if not isinstance(fragment, Fragment):
        raise TypeError("lower expects a finalized Fragment")
    boundary = set(boundary)
    for sig in boundary:
        if not isinstance(sig, Signal):
            raise TypeError("boundary entries must be signals, got {!r}"
                            .format(sig))

    # resolve clock domains
    domains = {}
    for cd in fragment.clock_domains:
        domains[cd.name] = cd
    referenced = set(fragment.sync)
    for sp in fragment.specials:
        if isinstance(sp, Memory):
            referenced.update(port.domain for port in sp.ports)
    for name in sorted(referenced):
        if name not in domains:
            if name in external_domains:
                domains[name] = ClockDomain(name)
            else:
                raise UnresolvedDomainError(
                    "clock domain '{}' is referenced but neither declared "
                    "nor marked external".format(name))

    # hoist expressions out of self-determined emission contexts
    rewriter = _Rewriter()
    comb = [rewriter.stmt(s) for s in fragment.comb]
    sync = {d: [rewriter.stmt(s) for s in stmts]
            for d, stmts in fragment.sync.items()}
    memories = tuple(sp for sp in fragment.specials if isinstance(sp, Memory))
    instances = tuple(rewriter.instance(sp) for sp in fragment.specials
                      if isinstance(sp, Instance))
    proxy_fragment = Fragment(
        list(rewriter.assigns) + comb, sync, memories + instances,
        fragment.clock_domains)

    drivers = collect_drivers(proxy_fragment)
    check_single_driver(drivers)

    def driven_in(stmts):
        seen = []
        have = set()
        for stmt in stmts:
            for sig in iter_stmt_targets(stmt):
                if sig not in have:
                    have.add(sig)
                    seen.append(sig)
        return seen

    full_comb = list(rewriter.assigns) + comb
    comb_order = driven_in(full_comb)
    comb_targets = frozenset(comb_order)
    sync_order = {d: driven_in(stmts) for d, stmts in sync.items()}
    sync_driven = frozenset(s for order in sync_order.values() for s in order)
    mem_driven = frozenset(p.dat_r for m in memories for p in m.ports)
    inst_driven = frozenset(
        sig for inst in instances for name, direction, value in inst.ports
        if direction in ("out", "inout") for sig in iter_expr_signals(value))

    # port list: nominated boundary first, then undriven domain clocks/resets
    directions = dict(infer_io_directions(proxy_fragment, boundary))
    internally_driven = set(drivers)
    ports = [(sig, directions[sig]) for sig in sorted(boundary, key=lambda s: s.id)]
    port_signals = set(boundary)
    for name in sorted(domains):
        cd = domains[name]
        for sig in (cd.clk, cd.rst):
            if sig not in internally_driven and sig not in port_signals:
                ports.append((sig, "in"))
                port_signals.add(sig)

    # naming: forced domain names, then boundary, then everything else
    names = {}
    used = set(RESERVED_WORDS)
    for name in sorted(domains):
        cd = domains[name]
        if cd.clk not in names:
            names[cd.clk] = _unique(used, name + "_clk")
        if cd.rst not in names:
            names[cd.rst] = _unique(used, name + "_rst")

    all_signals = set(proxy_fragment.signals) | port_signals
    for cd in domains.values():
        all_signals.add(cd.clk)
        all_signals.add(cd.rst)
    def base_name(hint):
        base = _sanitize(hint)
        if base in RESERVED_WORDS:
            base += "_s"
        return base

    ordered = [s for s in sorted(boundary, key=lambda s: s.id)]
    ordered += [s for s in sorted(all_signals - boundary, key=lambda s: s.id)]
    for sig in ordered:
        if sig not in names:
            names[sig] = _unique(used, base_name(sig.name))
    for mem in memories:
        names[mem] = _unique(used, base_name(mem.name))

    comb_groups = tuple(_group_comb(full_comb))

    processes = {}
    for domain in sorted(sync):
        cd = domains[domain]
        order = sync_order[domain]
        resets = ()
        if cd.reset_synchronous:
            resets = tuple(Assign(sig, Constant(sig.reset)) for sig in order)
        processes[domain] = SyncProcess(
            domain=cd, reset_assigns=resets, body=tuple(sync[domain]),
            driven=tuple(order))

    signal_order = [s for s in ordered if s in names]

    return LoweredDesign(
        ports=tuple(ports),
        names=names,
        comb_groups=comb_groups,
        processes=processes,
        domains=domains,
        memories=memories,
        instances=instances,
        comb_targets=comb_targets,
        sync_driven=sync_driven,
        mem_driven=mem_driven,
        inst_driven=inst_driven,
        signals=tuple(signal_order),
        boundary=frozenset(boundary),
    )
