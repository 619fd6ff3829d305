"""Module: the container design descriptions are written into, and
finalize(), which flattens a module hierarchy into a Fragment.

Content is added through five attributes, mirroring how such designs are
conventionally written:

    m.comb += stmt_or_list            combinatorial statements
    m.sync += stmt_or_list            synchronous statements, domain "sys"
    m.sync.pix += stmt_or_list        synchronous statements, named domain
    m.submodules.name = child         named child module
    m.submodules += child             auto-named child module
    m.specials += memory_or_instance
    m.clock_domains += ClockDomain("pix")
"""

from .ast import ClockDomain, statement_list, iter_stmt_signals, \
    iter_expr_signals
from .specials import Special, Memory, Instance

__all__ = ["Module", "Fragment", "finalize", "FinalizeError"]


class FinalizeError(Exception):
    pass


class _Body:
    __slots__ = ("comb", "sync", "submodules", "sub_names", "specials",
                 "clock_domains", "auto_index", "finalized")

    def __init__(self):
        self.comb = []
        self.sync = {}
        self.submodules = []
        self.sub_names = set()
        self.specials = []
        self.clock_domains = []
        self.auto_index = 0
        self.finalized = False


class _Adder:
    def __init__(self, module):
        object.__setattr__(self, "_module", module)

    def _body(self):
        m = self._module
        if m._body.finalized:
            raise FinalizeError("cannot add content to a finalized module")
        return m._body


class _Comb(_Adder):
    def __iadd__(self, stmts):
        self._body().comb.extend(statement_list(stmts))
        return self


class _SyncDomain:
    def __init__(self, module, domain):
        self._module = module
        self._domain = domain

    def __iadd__(self, stmts):
        body = self._module._body
        if body.finalized:
            raise FinalizeError("cannot add content to a finalized module")
        body.sync.setdefault(self._domain, []).extend(statement_list(stmts))
        return self


class _Sync(_Adder):
    def __iadd__(self, stmts):
        # statements without an explicit domain go to "sys"
        self._body().sync.setdefault("sys", []).extend(statement_list(stmts))
        return self

    def __getattr__(self, domain):
        return _SyncDomain(self._module, domain)

    def __setattr__(self, domain, value):
        if not isinstance(value, _SyncDomain):
            raise AttributeError("use m.sync.{} += ...".format(domain))


class _Submodules(_Adder):
    def __iadd__(self, modules):
        body = self._body()
        if isinstance(modules, Module):
            modules = [modules]
        for mod in modules:
            body.submodules.append(("sub{}".format(body.auto_index), mod))
            body.auto_index += 1
        return self

    def __setattr__(self, name, module):
        body = self._body()
        if not isinstance(module, Module):
            raise TypeError("submodule {!r} must be a Module".format(name))
        if name in ("comb", "sync", "specials", "submodules", "clock_domains"):
            raise ValueError(
                "submodule name {!r} would shadow a Module attribute".format(name))
        if name in body.sub_names:
            raise ValueError("duplicate submodule name {!r}".format(name))
        body.sub_names.add(name)
        body.submodules.append((name, module))
        object.__setattr__(self._module, name, module)


class _Specials(_Adder):
    def __iadd__(self, specials):
        body = self._body()
        if isinstance(specials, Special):
            specials = [specials]
        for sp in specials:
            if not isinstance(sp, Special):
                raise TypeError("not a special: {!r}".format(sp))
            body.specials.append(sp)
        return self


class _ClockDomains(_Adder):
    def __iadd__(self, domains):
        body = self._body()
        if isinstance(domains, ClockDomain):
            domains = [domains]
        for cd in domains:
            if not isinstance(cd, ClockDomain):
                raise TypeError("not a clock domain: {!r}".format(cd))
            body.clock_domains.append(cd)
        return self


class Module:
    """Base class for design descriptions.  Subclasses build their logic
    in __init__ (no super().__init__() call needed) through the comb /
    sync / submodules / specials / clock_domains attributes."""

    def __getattr__(self, name):
        if name == "_body":
            body = _Body()
            object.__setattr__(self, "_body", body)
            return body
        if name == "comb":
            return _Comb(self)
        if name == "sync":
            return _Sync(self)
        if name == "submodules":
            return _Submodules(self)
        if name == "specials":
            return _Specials(self)
        if name == "clock_domains":
            return _ClockDomains(self)
        raise AttributeError("{!r} object has no attribute {!r}"
                             .format(type(self).__name__, name))

    def __setattr__(self, name, value):
        if name in ("comb", "sync", "submodules", "specials", "clock_domains"):
            if isinstance(value, (_Adder, _SyncDomain)):
                return  # result of augmented assignment through a proxy
            if name == "submodules":
                raise AttributeError("use m.submodules.<name> = module")
            raise AttributeError("use m.{} += ...".format(name))
        object.__setattr__(self, name, value)


class Fragment:
    """A flattened design: combinatorial statements, synchronous statements
    per clock domain, specials and declared clock domains, with all
    hierarchy inlined.  Produced by finalize(); treat as immutable."""

    def __init__(self, comb=(), sync=None, specials=(), clock_domains=()):
        self.comb = tuple(comb)
        self.sync = {d: tuple(stmts) for d, stmts in (sync or {}).items()}
        self.specials = tuple(specials)
        self.clock_domains = tuple(clock_domains)
        self.signals = frozenset(self._iter_signals())

    def _iter_signals(self):
        for s in self.comb:
            yield from iter_stmt_signals(s)
        for stmts in self.sync.values():
            for s in stmts:
                yield from iter_stmt_signals(s)
        for sp in self.specials:
            if isinstance(sp, Memory):
                for port in sp.ports:
                    yield port.adr
                    yield port.dat_r
                    if port.we is not None:
                        yield port.we
                        yield port.dat_w
            elif isinstance(sp, Instance):
                for _, _, value in sp.ports:
                    yield from iter_expr_signals(value)
        for cd in self.clock_domains:
            yield cd.clk
            yield cd.rst


def finalize(module):
    """Flatten a module hierarchy into a Fragment.

    Traversal is depth-first with the parent's own content first, then
    each submodule's subtree in declaration order.  The hierarchy must be
    a strict tree: reusing one Module object in two places is an error,
    as is finalizing an already-finalized module.  Clock domain names must
    be unique across the whole tree.
    """
    if not isinstance(module, Module):
        raise TypeError("can only finalize a Module, got {!r}".format(module))
    comb = []
    sync = {}
    specials = []
    clock_domains = []
    seen = set()

    def visit(m, path):
        if id(m) in seen:
            raise FinalizeError(
                "module reused in the hierarchy at {!r}; the hierarchy must "
                "be a strict tree".format("/".join(path) or "<root>"))
        seen.add(id(m))
        body = m._body
        if body.finalized:
            raise FinalizeError("module at {!r} was already finalized"
                                .format("/".join(path) or "<root>"))
        body.finalized = True
        comb.extend(body.comb)
        for domain, stmts in body.sync.items():
            sync.setdefault(domain, []).extend(stmts)
        specials.extend(body.specials)
        clock_domains.extend(body.clock_domains)
        for name, sub in body.submodules:
            visit(sub, path + [name])

    visit(module, [])

    names = [cd.name for cd in clock_domains]
    for name in names:
        if names.count(name) > 1:
            raise FinalizeError("duplicate clock domain name {!r}".format(name))

    return Fragment(comb, sync, specials, clock_domains)
