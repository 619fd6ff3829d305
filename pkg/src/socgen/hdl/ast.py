"""Signals, expression trees and statements for describing synchronous logic.

A design is written directly as Python objects: Signal is the atom, Python
operators over signals build immutable expression nodes, and .eq() produces
assignment statements that Module collects into combinatorial and
per-clock-domain synchronous lists.  Nothing is evaluated at construction
time; evaluation semantics live in the simulator, and static width and
signedness rules live in shape() below.
"""

import itertools

from typing import NamedTuple

__all__ = [
    "Shape", "bits_for", "mask_value", "signed_view", "wrap",
    "Value", "Constant", "Signal", "Unary", "Binary", "Mux", "Slice",
    "Cat", "Replicate", "shape", "expr_equal",
    "Statement", "Assign", "If", "Case", "ClockDomain",
    "iter_expr_signals", "iter_stmt_signals", "iter_stmt_targets",
    "target_signals",
]

# Signal() shadows the max/min builtins with keyword arguments
builtins_max = max

UNARY_OPS = frozenset({"not", "neg"})
ARITH_OPS = frozenset({"add", "sub", "mul"})
BITWISE_OPS = frozenset({"and", "or", "xor"})
SHIFT_OPS = frozenset({"shl", "shr"})
COMPARE_OPS = frozenset({"eq", "ne", "lt", "le", "gt", "ge"})
BINARY_OPS = ARITH_OPS | BITWISE_OPS | SHIFT_OPS | COMPARE_OPS


class Shape(NamedTuple):
    """Bit width and signedness of a value."""
    width: int
    signed: bool

    def bounds(self):
        # inclusive (lo, hi) range of representable values
        if self.signed:
            half = 1 << (self.width - 1)
            return -half, half - 1
        return 0, (1 << self.width) - 1

    def contains(self, value):
        lo, hi = self.bounds()
        return lo <= value <= hi


def bits_for(n):
    """Smallest width w >= 1 such that n < 2**w, for n >= 0."""
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError("bits_for expects an integer, not {!r}".format(n))
    if n < 0:
        raise ValueError("bits_for expects a nonnegative integer, got {}".format(n))
    return max(n.bit_length(), 1)


def _signed_width(n):
    # minimal two's-complement width, sign bit included
    if n >= 0:
        return n.bit_length() + 1
    return (-n - 1).bit_length() + 1


def mask_value(value, width):
    """Two's-complement bit pattern of value truncated to width bits."""
    return value & ((1 << width) - 1)


def signed_view(pattern, width):
    """Reinterpret a width-bit pattern as a signed integer."""
    if pattern & (1 << (width - 1)):
        return pattern - (1 << width)
    return pattern


def wrap(value):
    """Coerce Python integers (and bools) to Constant; pass Values through."""
    if isinstance(value, Value):
        return value
    if isinstance(value, (bool, int)):
        return Constant(int(value))
    raise TypeError("object {!r} cannot be used as a value".format(value))


class Value:
    """Base class of all expression nodes.

    Nodes are immutable once built.  Python operators construct new nodes
    instead of computing anything, so an expression is just a description
    of hardware.
    """

    __hash__ = object.__hash__

    def __bool__(self):
        raise TypeError("expressions have no boolean value at build time; "
                        "use them inside If/Mux instead")

    def __invert__(self):        return Unary("not", self)
    def __neg__(self):           return Unary("neg", self)

    def __add__(self, other):    return Binary("add", self, other)
    def __radd__(self, other):   return Binary("add", other, self)
    def __sub__(self, other):    return Binary("sub", self, other)
    def __rsub__(self, other):   return Binary("sub", other, self)
    def __mul__(self, other):    return Binary("mul", self, other)
    def __rmul__(self, other):   return Binary("mul", other, self)

    def __and__(self, other):    return Binary("and", self, other)
    def __rand__(self, other):   return Binary("and", other, self)
    def __or__(self, other):     return Binary("or", self, other)
    def __ror__(self, other):    return Binary("or", other, self)
    def __xor__(self, other):    return Binary("xor", self, other)
    def __rxor__(self, other):   return Binary("xor", other, self)

    def __lshift__(self, other): return Binary("shl", self, other)
    def __rlshift__(self, other): return Binary("shl", other, self)
    def __rshift__(self, other): return Binary("shr", self, other)
    def __rrshift__(self, other): return Binary("shr", other, self)

    def __eq__(self, other):     return Binary("eq", self, other)
    def __ne__(self, other):     return Binary("ne", self, other)
    def __lt__(self, other):     return Binary("lt", self, other)
    def __le__(self, other):     return Binary("le", self, other)
    def __gt__(self, other):     return Binary("gt", self, other)
    def __ge__(self, other):     return Binary("ge", self, other)

    def __len__(self):
        return shape(self).width

    def __getitem__(self, key):
        n = len(self)
        if isinstance(key, int):
            if key < 0:
                key += n
            if not 0 <= key < n:
                raise IndexError("bit {} out of range for {}-bit value".format(key, n))
            return Slice(self, key, key + 1)
        if isinstance(key, slice):
            start, stop, step = key.indices(n)
            if step != 1:
                raise ValueError("slices of values must have step 1")
            return Slice(self, start, stop)
        raise TypeError("cannot index value with {!r}".format(key))

    def eq(self, value):
        """Assignment statement: this value (which must be assignable)
        takes the right-hand side's value."""
        return Assign(self, value)


class Constant(Value):
    """Integer literal.  Nonnegative constants are unsigned with minimal
    width; negative constants get the minimal two's-complement width
    including the sign bit."""

    def __init__(self, value):
        if not isinstance(value, int):
            raise TypeError("constant must be an integer, got {!r}".format(value))
        value = int(value)
        self.value = value
        if value >= 0:
            self.width = bits_for(value)
            self.signed = False
        else:
            self.width = _signed_width(value)
            self.signed = True

    def __repr__(self):
        return "Constant({})".format(self.value)


class Signal(Value):
    """A named bit vector: the atom of every design.

    Width is given explicitly, or derived from `max` (exclusive upper
    bound, unsigned) or a `min`/`max` range (two's complement when min is
    negative).  `reset` is the value taken at synchronous reset and the
    default driven onto the signal when no combinatorial branch assigns it.
    """

    _next_id = itertools.count()

    def __init__(self, name, width=None, *, signed=False, reset=0,
                 min=None, max=None):
        if not isinstance(name, str) or not name:
            raise TypeError("signal name must be a non-empty string")
        if width is not None:
            if min is not None or max is not None:
                raise ValueError("give either an explicit width or min/max, not both")
            if not isinstance(width, int) or width < 1:
                raise ValueError("signal width must be an integer >= 1")
        elif min is not None or max is not None:
            if signed:
                raise ValueError("signedness is derived from the min/max range")
            if min is None:
                min = 0
            if max is None:
                max = 2
            if max < 1:
                raise ValueError("max must be >= 1 (it is an exclusive bound)")
            if min >= max:
                raise ValueError("empty range: min {} >= max {}".format(min, max))
            signed = min < 0
            if signed:
                width = builtins_max(_signed_width(min), _signed_width(max - 1))
            else:
                width = bits_for(max - 1)
        else:
            width = 1
        self.id = next(Signal._next_id)
        self.name = name
        self.width = width
        self.signed = bool(signed)
        if not isinstance(reset, int) or isinstance(reset, bool):
            raise TypeError("reset value must be an integer")
        if not Shape(width, self.signed).contains(reset):
            raise ValueError(
                "reset value {} not representable in {} {}-bit signal '{}'"
                .format(reset, "signed" if self.signed else "unsigned", width, name))
        self.reset = reset

    def __repr__(self):
        return "Signal({!r}, {}{})".format(
            self.name, self.width, ", signed" if self.signed else "")


class Unary(Value):
    def __init__(self, op, operand):
        if op not in UNARY_OPS:
            raise ValueError("unknown unary operator {!r}".format(op))
        self.op = op
        self.operand = wrap(operand)


class Binary(Value):
    def __init__(self, op, lhs, rhs):
        if op not in BINARY_OPS:
            raise ValueError("unknown binary operator {!r}".format(op))
        self.op = op
        self.lhs = wrap(lhs)
        self.rhs = wrap(rhs)
        if op in SHIFT_OPS and isinstance(self.rhs, Constant):
            if self.rhs.value < 0:
                raise ValueError("shift amount constant must be >= 0")


class Mux(Value):
    """if_true when cond is nonzero, else if_false."""

    def __init__(self, cond, if_true, if_false):
        self.cond = wrap(cond)
        self.if_true = wrap(if_true)
        self.if_false = wrap(if_false)


class Slice(Value):
    """Bits [low, high) of the operand's two's-complement pattern."""

    def __init__(self, operand, low, high):
        self.operand = wrap(operand)
        if not isinstance(low, int) or not isinstance(high, int):
            raise TypeError("slice bounds must be integers")
        width = len(self.operand)
        if not 0 <= low < high <= width:
            raise ValueError(
                "slice [{}:{}) out of range for {}-bit value".format(low, high, width))
        self.low = low
        self.high = high


def _flatten(items):
    for item in items:
        if isinstance(item, (list, tuple)):
            yield from _flatten(item)
        else:
            yield item


class Cat(Value):
    """Concatenation; the first part occupies the least significant bits."""

    def __init__(self, *parts):
        self.parts = tuple(wrap(p) for p in _flatten(parts))
        if not self.parts:
            raise ValueError("concatenation needs at least one part")


class Replicate(Value):
    def __init__(self, operand, count):
        if not isinstance(count, int) or count < 1:
            raise ValueError("replication count must be an integer >= 1")
        self.operand = wrap(operand)
        self.count = count


def shape(v):
    """Width and signedness of an expression.

    The rules are chosen so that exact integer evaluation of any operator
    always produces a result representable in the computed shape (checked
    exhaustively in the test suite).  When exactly one operand of an
    arithmetic or bitwise operator is signed, the unsigned operand is
    first widened by one bit so it can be treated as signed.
    """
    if isinstance(v, Constant):
        return Shape(v.width, v.signed)
    if isinstance(v, Signal):
        return Shape(v.width, v.signed)
    if isinstance(v, Unary):
        wa, sa = shape(v.operand)
        if v.op == "not":
            return Shape(wa, sa)
        return Shape(wa + 1, True)  # neg
    if isinstance(v, Binary):
        if v.op in COMPARE_OPS:
            return Shape(1, False)
        wa, sa = shape(v.lhs)
        wb, sb = shape(v.rhs)
        if v.op in SHIFT_OPS:
            if v.op == "shr":
                return Shape(wa, sa)
            if isinstance(v.rhs, Constant):
                return Shape(wa + v.rhs.value, sa)
            return Shape(wa + (1 << wb) - 1, sa)
        if v.op == "mul":
            return Shape(wa + wb, sa or sb)
        # add/sub/and/or/xor: widen the unsigned side when mixed;
        # subtraction is always signed (0 - 1 must be representable)
        if sa and not sb:
            wb += 1
        elif sb and not sa:
            wa += 1
        w = builtins_max(wa, wb)
        if v.op in ARITH_OPS:
            w += 1
        return Shape(w, sa or sb or v.op == "sub")
    if isinstance(v, Mux):
        wa, sa = shape(v.if_true)
        wb, sb = shape(v.if_false)
        w = builtins_max(wa, wb)
        if sa != sb:
            w += 1
        return Shape(w, sa or sb)
    if isinstance(v, Slice):
        return Shape(v.high - v.low, False)
    if isinstance(v, Cat):
        return Shape(sum(shape(p).width for p in v.parts), False)
    if isinstance(v, Replicate):
        return Shape(v.count * shape(v.operand).width, False)
    raise TypeError("not a value: {!r}".format(v))


def expr_equal(a, b):
    """Structural equality of two expression trees.  Signals compare by
    identity; everything else by node type and contents."""
    if type(a) is not type(b):
        return False
    if isinstance(a, Constant):
        return a.value == b.value
    if isinstance(a, Signal):
        return a is b
    if isinstance(a, Unary):
        return a.op == b.op and expr_equal(a.operand, b.operand)
    if isinstance(a, Binary):
        return a.op == b.op and expr_equal(a.lhs, b.lhs) and expr_equal(a.rhs, b.rhs)
    if isinstance(a, Mux):
        return (expr_equal(a.cond, b.cond) and expr_equal(a.if_true, b.if_true)
                and expr_equal(a.if_false, b.if_false))
    if isinstance(a, Slice):
        return a.low == b.low and a.high == b.high and expr_equal(a.operand, b.operand)
    if isinstance(a, Cat):
        return (len(a.parts) == len(b.parts)
                and all(expr_equal(x, y) for x, y in zip(a.parts, b.parts)))
    if isinstance(a, Replicate):
        return a.count == b.count and expr_equal(a.operand, b.operand)
    raise TypeError("not a value: {!r}".format(a))


# -- statements --------------------------------------------------------------

class Statement:
    pass


def _check_assignable(v):
    if isinstance(v, Signal):
        return
    if isinstance(v, Slice) and isinstance(v.operand, Signal):
        return
    if isinstance(v, Cat):
        for p in v.parts:
            _check_assignable(p)
        return
    raise ValueError(
        "not an assignable target: {!r} (only signals, slices of signals "
        "and concatenations of those can be assigned)".format(v))


def statement_list(items):
    """Flatten and type-check a statement or nested iterables of them."""
    if isinstance(items, Statement):
        return (items,)
    out = []
    for s in _flatten(items):
        if not isinstance(s, Statement):
            raise TypeError("not a statement: {!r}".format(s))
        out.append(s)
    return tuple(out)


class Assign(Statement):
    def __init__(self, target, value):
        self.target = wrap(target)
        _check_assignable(self.target)
        self.value = wrap(value)


class If(Statement):
    """Conditional statement; the condition is true when any bit is set.

    Else()/Elif() extend the deepest open else branch, so chains read the
    way they execute.
    """

    def __init__(self, cond, *then):
        self.cond = wrap(cond)
        self.then_body = statement_list(list(then))
        self.else_body = ()

    def _deepest_open(self):
        node = self
        while node.else_body:
            last = node.else_body[-1]
            if len(node.else_body) == 1 and isinstance(last, If):
                node = last
            else:
                raise ValueError("Else already given for this If")
        return node

    def Else(self, *stmts):
        self._deepest_open().else_body = statement_list(list(stmts))
        return self

    def Elif(self, cond, *then):
        self._deepest_open().else_body = (If(cond, *then),)
        return self


class Case(Statement):
    """Constant dispatch on a selector; match is exclusive, with an
    optional "default" arm.

    Arms may be given as a mapping or as (constant, statements) pairs;
    constants must be distinct and representable in the selector's shape.
    """

    def __init__(self, selector, arms, default=None):
        self.selector = wrap(selector)
        sel_shape = shape(self.selector)
        if hasattr(arms, "items"):
            arms = list(arms.items())
        self.arms = []
        self.default = statement_list(default) if default is not None else ()
        seen = set()
        for const, stmts in arms:
            if isinstance(const, str) and const == "default":
                if self.default:
                    raise ValueError("duplicate default arm")
                self.default = statement_list(stmts)
                continue
            if isinstance(const, Constant):
                const = const.value
            if not isinstance(const, int):
                raise TypeError("case arm constant must be an integer, got {!r}"
                                .format(const))
            if const in seen:
                raise ValueError("duplicate case arm constant {}".format(const))
            if not sel_shape.contains(const):
                raise ValueError(
                    "case arm constant {} not representable in the {}-bit selector"
                    .format(const, sel_shape.width))
            seen.add(const)
            self.arms.append((const, statement_list(stmts)))


class ClockDomain:
    """A named clock/reset pair governing one group of synchronous
    statements.  When reset_synchronous is true (the default), registers
    of the domain return to their reset values while rst is high at a
    clock edge."""

    def __init__(self, name, clk=None, rst=None, reset_synchronous=True):
        if not isinstance(name, str) or not name:
            raise TypeError("clock domain name must be a non-empty string")
        self.name = name
        self.clk = clk if clk is not None else Signal(name + "_clk")
        self.rst = rst if rst is not None else Signal(name + "_rst")
        for sig, what in ((self.clk, "clock"), (self.rst, "reset")):
            if not isinstance(sig, Signal) or sig.width != 1:
                raise ValueError("{} of domain '{}' must be a 1-bit signal"
                                 .format(what, name))
        self.reset_synchronous = bool(reset_synchronous)


# -- traversal helpers --------------------------------------------------------

def iter_expr_signals(v):
    """Yield every signal referenced by an expression (with repeats)."""
    if isinstance(v, Signal):
        yield v
    elif isinstance(v, Constant):
        pass
    elif isinstance(v, Unary):
        yield from iter_expr_signals(v.operand)
    elif isinstance(v, Binary):
        yield from iter_expr_signals(v.lhs)
        yield from iter_expr_signals(v.rhs)
    elif isinstance(v, Mux):
        yield from iter_expr_signals(v.cond)
        yield from iter_expr_signals(v.if_true)
        yield from iter_expr_signals(v.if_false)
    elif isinstance(v, Slice):
        yield from iter_expr_signals(v.operand)
    elif isinstance(v, Cat):
        for p in v.parts:
            yield from iter_expr_signals(p)
    elif isinstance(v, Replicate):
        yield from iter_expr_signals(v.operand)
    else:
        raise TypeError("not a value: {!r}".format(v))


def iter_stmt_signals(s):
    """Yield every signal referenced by a statement (targets included)."""
    if isinstance(s, Assign):
        yield from iter_expr_signals(s.target)
        yield from iter_expr_signals(s.value)
    elif isinstance(s, If):
        yield from iter_expr_signals(s.cond)
        for sub in s.then_body + s.else_body:
            yield from iter_stmt_signals(sub)
    elif isinstance(s, Case):
        yield from iter_expr_signals(s.selector)
        for _, body in s.arms:
            for sub in body:
                yield from iter_stmt_signals(sub)
        for sub in s.default:
            yield from iter_stmt_signals(sub)
    else:
        raise TypeError("not a statement: {!r}".format(s))


def target_signals(target):
    """Signals underlying an assignable target."""
    return set(iter_expr_signals(target))


def iter_stmt_targets(s):
    """Yield every signal assigned anywhere in a statement, regardless of
    the conditions guarding the assignment."""
    if isinstance(s, Assign):
        yield from iter_expr_signals(s.target)
    elif isinstance(s, If):
        for sub in s.then_body + s.else_body:
            yield from iter_stmt_targets(sub)
    elif isinstance(s, Case):
        for _, body in s.arms:
            for sub in body:
                yield from iter_stmt_targets(sub)
        for sub in s.default:
            yield from iter_stmt_targets(sub)
    else:
        raise TypeError("not a statement: {!r}".format(s))
