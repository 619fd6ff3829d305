"""A tiny interpreter for the Verilog subset socgen emits, used as an
independent oracle for emitted-versus-simulated equivalence: it parses
emitted module text and evaluates it under Verilog-2001 semantics
(bottom-up self-determined sizing, context width propagation, operand
type coercion before extension).  It deliberately shares no code and no
width rules with the package.

Supported structure: one module, port list, reg/wire declarations with
initialisers, memory arrays with initial blocks, always @(*) blocks with
blocking assignments, always @(posedge clk) blocks with nonblocking
assignments, if/else, case.
"""

import re

TOKEN = re.compile(r"""
    (?P<sized>\d+'s?[dhb][0-9a-fA-F_]+)
  | (?P<num>\d+)
  | (?P<id>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<op><<<|>>>|<<|>>|<=|>=|==|!=|[-+*/%&|^~!<>=?:;,(){}\[\]@#*])
""", re.VERBOSE)

_SIZED = re.compile(r"\d+'")


def tokenize(text):
    text = re.sub(r"//[^\n]*", "", text)
    out = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = TOKEN.match(text, pos)
        if not m:
            raise SyntaxError("cannot tokenize at {!r}".format(text[pos:pos + 30]))
        out.append(m.group(0))
        pos = m.end()
    return out


def mask(v, w):
    return v & ((1 << w) - 1)


def sext(pattern, from_w, to_w):
    """Sign-extend a from_w-bit pattern to to_w bits."""
    if from_w < to_w and pattern & (1 << (from_w - 1)):
        pattern |= ((1 << to_w) - 1) ^ ((1 << from_w) - 1)
    return pattern


def as_signed(pattern, w):
    return pattern - (1 << w) if pattern & (1 << (w - 1)) else pattern


# -- expression nodes ---------------------------------------------------------

class Lit:
    def __init__(self, token, negative=False):
        m = re.match(r"(\d+)'(s?)([dhb])([0-9a-fA-F_]+)", token)
        self.width = int(m.group(1))
        self.signed = m.group(2) == "s"
        base = {"d": 10, "h": 16, "b": 2}[m.group(3)]
        value = int(m.group(4).replace("_", ""), base)
        if negative:
            value = -value
        self.pattern = mask(value, self.width)


class Ident:
    def __init__(self, name):
        self.name = name


class Select:
    def __init__(self, name, high, low):
        self.name = name
        self.high = high
        self.low = low


class MemRef:
    def __init__(self, name, index):
        self.name = name
        self.index = index


class Concat:
    def __init__(self, parts):
        self.parts = parts  # first part is most significant


class Repl:
    def __init__(self, count, operand):
        self.count = count
        self.operand = operand


class SignedCast:
    def __init__(self, operand):
        self.operand = operand


class UnaryOp:
    def __init__(self, op, operand):
        self.op = op
        self.operand = operand


class BinOp:
    def __init__(self, op, lhs, rhs):
        self.op = op
        self.lhs = lhs
        self.rhs = rhs


class Ternary:
    def __init__(self, cond, if_true, if_false):
        self.cond = cond
        self.if_true = if_true
        self.if_false = if_false


class AssignStmt:
    def __init__(self, target, value, blocking):
        self.target = target
        self.value = value
        self.blocking = blocking


class IfStmt:
    def __init__(self, cond, then_body, else_body):
        self.cond = cond
        self.then_body = then_body
        self.else_body = else_body


class CaseStmt:
    def __init__(self, selector, arms, default):
        self.selector = selector
        self.arms = arms
        self.default = default


# -- parser --------------------------------------------------------------------

class Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.pos = 0

    def peek(self, ahead=0):
        idx = self.pos + ahead
        return self.toks[idx] if idx < len(self.toks) else None

    def next(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, tok):
        got = self.next()
        if got != tok:
            raise SyntaxError("expected {!r}, got {!r} near {}".format(
                tok, got, self.toks[max(0, self.pos - 6):self.pos + 6]))

    def parse_module(self):
        self.expect("module")
        mod = Interp(self.next())
        self.expect("(")
        if self.peek() != ")":
            while True:
                direction = self.next()
                self.next()  # wire/reg
                signed, width = self.parse_width()
                mod.add_net(self.next(), width, signed, 0, direction=direction)
                if self.peek() == ",":
                    self.next()
                else:
                    break
        self.expect(")")
        self.expect(";")
        while self.peek() != "endmodule":
            tok = self.peek()
            if tok in ("reg", "wire"):
                self.parse_decl(mod)
            elif tok == "integer":
                self.next()
                self.next()
                self.expect(";")
            elif tok == "initial":
                self.parse_initial(mod)
            elif tok == "always":
                self.parse_always(mod)
            else:
                raise SyntaxError("unexpected {!r}".format(tok))
        self.expect("endmodule")
        return mod

    def parse_width(self):
        signed = False
        width = 1
        if self.peek() == "signed":
            self.next()
            signed = True
        if self.peek() == "[":
            self.next()
            high = int(self.next())
            self.expect(":")
            low = int(self.next())
            self.expect("]")
            width = high - low + 1
        return signed, width

    def parse_decl(self, mod):
        kind = self.next()
        signed, width = self.parse_width()
        name = self.next()
        if self.peek() == "[":  # memory array
            self.next()
            low = int(self.next())
            self.expect(":")
            high = int(self.next())
            self.expect("]")
            self.expect(";")
            mod.add_memory(name, width, high - low + 1)
            return
        init = 0
        if self.peek() == "=":
            self.next()
            init = self.parse_literal().pattern
        self.expect(";")
        mod.add_net(name, width, signed, sext(init, width, width),
                    kind=kind)

    def parse_literal(self):
        negative = False
        if self.peek() == "-":
            self.next()
            negative = True
        return Lit(self.next(), negative)

    def parse_initial(self, mod):
        self.expect("initial")
        self.expect("begin")
        while self.peek() != "end":
            if self.peek() == "for":
                self.next()
                self.expect("(")
                var = self.next()
                self.expect("=")
                start = int(self.next())
                self.expect(";")
                self.next()
                self.expect("<")
                stop = int(self.next())
                self.expect(";")
                depth = 0
                while self.next() != ")":
                    depth += 1  # skip the increment
                self.expect("begin")
                mem = self.next()
                self.expect("[")
                assert self.next() == var
                self.expect("]")
                self.expect("=")
                lit = self.parse_literal()
                self.expect(";")
                self.expect("end")
                for i in range(start, stop):
                    mod.memories[mem][i] = lit.pattern
            else:
                mem = self.next()
                self.expect("[")
                index = int(self.next())
                self.expect("]")
                self.expect("=")
                lit = self.parse_literal()
                self.expect(";")
                mod.memories[mem][index] = lit.pattern
        self.expect("end")

    def parse_always(self, mod):
        self.expect("always")
        self.expect("@")
        self.expect("(")
        if self.peek() == "*":
            self.next()
            self.expect(")")
            mod.comb_blocks.append(self.parse_block())
        else:
            self.expect("posedge")
            clk = self.next()
            self.expect(")")
            mod.sync_blocks.append((clk, self.parse_block()))

    def parse_block(self):
        self.expect("begin")
        stmts = []
        while self.peek() != "end":
            stmts.append(self.parse_stmt())
        self.expect("end")
        return stmts

    def parse_stmt(self):
        tok = self.peek()
        if tok == "if":
            self.next()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then_body = self.parse_block()
            else_body = []
            if self.peek() == "else":
                self.next()
                else_body = self.parse_block()
            return IfStmt(cond, then_body, else_body)
        if tok == "case":
            self.next()
            self.expect("(")
            selector = self.parse_expr()
            self.expect(")")
            arms = []
            default = []
            while self.peek() != "endcase":
                if self.peek() == "default":
                    self.next()
                    self.expect(":")
                    default = self.parse_block()
                else:
                    lit = self.parse_literal()
                    self.expect(":")
                    arms.append((lit, self.parse_block()))
            self.expect("endcase")
            return CaseStmt(selector, arms, default)
        target = self.parse_target()
        op = self.next()
        if op not in ("=", "<="):
            raise SyntaxError("expected assignment, got {!r}".format(op))
        value = self.parse_expr()
        self.expect(";")
        return AssignStmt(target, value, blocking=(op == "="))

    def parse_target(self):
        if self.peek() == "{":
            self.next()
            parts = [self.parse_target()]
            while self.peek() == ",":
                self.next()
                parts.append(self.parse_target())
            self.expect("}")
            return Concat(parts)
        name = self.next()
        if self.peek() == "[":
            self.next()
            if re.fullmatch(r"\d+", self.peek()):
                first = int(self.next())
                if self.peek() == ":":
                    self.next()
                    low = int(self.next())
                    self.expect("]")
                    return Select(name, first, low)
                self.expect("]")
                return Select(name, first, first)
            index = self.parse_expr()
            self.expect("]")
            return MemRef(name, index)
        return Ident(name)

    def parse_expr(self):
        tok = self.peek()
        if tok == "(":
            self.next()
            if self.peek() == "~":
                self.next()
                node = UnaryOp("~", self.parse_expr())
                self.expect(")")
                return node
            if self.peek() == "-" and not _SIZED.match(self.peek(1) or ""):
                self.next()
                node = UnaryOp("-", self.parse_expr())
                self.expect(")")
                return node
            lhs = self.parse_expr()
            tok = self.next()
            if tok == ")":
                return lhs
            if tok == "?":
                if_true = self.parse_expr()
                self.expect(":")
                if_false = self.parse_expr()
                self.expect(")")
                return Ternary(lhs, if_true, if_false)
            rhs = self.parse_expr()
            self.expect(")")
            return BinOp(tok, lhs, rhs)
        if tok == "{":
            self.next()
            if re.fullmatch(r"\d+", self.peek()) and self.peek(1) == "{":
                count = int(self.next())
                self.next()
                operand = self.parse_expr()
                self.expect("}")
                self.expect("}")
                return Repl(count, operand)
            parts = [self.parse_expr()]
            while self.peek() == ",":
                self.next()
                parts.append(self.parse_expr())
            self.expect("}")
            return Concat(parts)
        if tok == "$signed":
            self.next()
            self.expect("(")
            operand = self.parse_expr()
            self.expect(")")
            return SignedCast(operand)
        if tok == "-":
            self.next()
            return Lit(self.next(), negative=True)
        if _SIZED.match(tok):
            return Lit(self.next())
        name = self.next()
        if self.peek() == "[":
            self.next()
            if re.fullmatch(r"\d+", self.peek()):
                first = int(self.next())
                if self.peek() == ":":
                    self.next()
                    low = int(self.next())
                    self.expect("]")
                    return Select(name, first, low)
                self.expect("]")
                return Select(name, first, first)
            index = self.parse_expr()
            self.expect("]")
            return MemRef(name, index)
        return Ident(name)


# -- evaluation -----------------------------------------------------------------

COMPARES = ("==", "!=", "<", "<=", ">", ">=")
SHIFTS = ("<<", ">>", ">>>")


class Interp:
    def __init__(self, name):
        self.name = name
        self.nets = {}        # name -> (width, signed)
        self.inits = {}
        self.directions = {}
        self.memories = {}
        self.mem_width = {}
        self.comb_blocks = []
        self.sync_blocks = []
        self.values = {}

    def add_net(self, name, width, signed, init, kind=None, direction=None):
        self.nets[name] = (width, signed)
        self.inits[name] = init
        if direction:
            self.directions[name] = direction

    def add_memory(self, name, width, depth):
        self.memories[name] = [0] * depth
        self.mem_width[name] = width

    # self-determined size and type of an expression (IEEE 1364 table)
    def self_size(self, node):
        if isinstance(node, Lit):
            return node.width, node.signed
        if isinstance(node, Ident):
            return self.nets[node.name]
        if isinstance(node, Select):
            return node.high - node.low + 1, False
        if isinstance(node, MemRef):
            return self.mem_width[node.name], False
        if isinstance(node, Concat):
            return sum(self.self_size(p)[0] for p in node.parts), False
        if isinstance(node, Repl):
            return node.count * self.self_size(node.operand)[0], False
        if isinstance(node, SignedCast):
            return self.self_size(node.operand)[0], True
        if isinstance(node, UnaryOp):
            return self.self_size(node.operand)
        if isinstance(node, BinOp):
            if node.op in COMPARES:
                return 1, False
            wl, sl = self.self_size(node.lhs)
            if node.op in SHIFTS:
                return wl, sl
            wr, sr = self.self_size(node.rhs)
            return max(wl, wr), sl and sr
        if isinstance(node, Ternary):
            wl, sl = self.self_size(node.if_true)
            wr, sr = self.self_size(node.if_false)
            return max(wl, wr), sl and sr
        raise TypeError(node)

    def eval_self(self, node):
        """Evaluate a self-determined expression at its own size."""
        width, signed = self.self_size(node)
        return self.eval_ctx(node, width, signed)

    def eval_ctx(self, node, width, ctx_signed):
        """Evaluate a context operand at the expression width.  Leaves and
        self-determined boundaries extend to `width`; extension sign
        follows the whole expression's coerced type (ctx_signed)."""
        def extend(pattern, own_w):
            if ctx_signed:
                return sext(pattern, own_w, width)
            return pattern

        if isinstance(node, Lit):
            return mask(extend(node.pattern, node.width), width)
        if isinstance(node, Ident):
            own_w, _ = self.nets[node.name]
            return mask(extend(self.values[node.name], own_w), width)
        if isinstance(node, (Select, MemRef, Concat, Repl)):
            own_w, _ = self.self_size(node)
            return mask(extend(self._bits(node), own_w), width)
        if isinstance(node, SignedCast):
            own_w = self.self_size(node.operand)[0]
            return mask(sext(self.eval_self(node.operand), own_w, width), width)
        if isinstance(node, UnaryOp):
            a = self.eval_ctx(node.operand, width, ctx_signed)
            if node.op == "~":
                return mask(~a, width)
            return mask(-a, width)
        if isinstance(node, BinOp):
            if node.op in COMPARES:
                own_w = 1
                return mask(extend(self._compare(node), own_w), width)
            if node.op in SHIFTS:
                amount = self.eval_self(node.rhs)
                a = self.eval_ctx(node.lhs, width, ctx_signed)
                if node.op == "<<":
                    return mask(a << amount, width)
                if node.op == ">>":
                    return a >> amount
                value = as_signed(a, width) if ctx_signed else a
                return mask(value >> amount, width)
            a = self.eval_ctx(node.lhs, width, ctx_signed)
            b = self.eval_ctx(node.rhs, width, ctx_signed)
            if node.op == "+":
                return mask(a + b, width)
            if node.op == "-":
                return mask(a - b, width)
            if node.op == "*":
                return mask(a * b, width)
            if node.op == "&":
                return a & b
            if node.op == "|":
                return a | b
            return a ^ b
        if isinstance(node, Ternary):
            cond = self.eval_self(node.cond)
            arm = node.if_true if cond != 0 else node.if_false
            return self.eval_ctx(arm, width, ctx_signed)
        raise TypeError(node)

    def _bits(self, node):
        """Pattern of a pure bit-level node at its own width."""
        if isinstance(node, Select):
            base = self.values[node.name]
            return (base >> node.low) & ((1 << (node.high - node.low + 1)) - 1)
        if isinstance(node, MemRef):
            index = self.eval_self(node.index)
            words = self.memories[node.name]
            return words[index] if index < len(words) else 0
        if isinstance(node, Concat):
            out = 0
            for part in node.parts:
                w = self.self_size(part)[0]
                out = (out << w) | self.eval_self(part)
            return out
        if isinstance(node, Repl):
            w = self.self_size(node.operand)[0]
            pattern = self.eval_self(node.operand)
            out = 0
            for _ in range(node.count):
                out = (out << w) | pattern
            return out
        raise TypeError(node)

    def _compare(self, node):
        wl, sl = self.self_size(node.lhs)
        wr, sr = self.self_size(node.rhs)
        w = max(wl, wr)
        signed = sl and sr
        a = self.eval_ctx(node.lhs, w, signed)
        b = self.eval_ctx(node.rhs, w, signed)
        if signed:
            a = as_signed(a, w)
            b = as_signed(b, w)
        return int({"==": a == b, "!=": a != b, "<": a < b,
                    "<=": a <= b, ">": a > b, ">=": a >= b}[node.op])

    # -- statements ------------------------------------------------------------

    def target_width(self, target):
        if isinstance(target, Ident):
            return self.nets[target.name][0]
        if isinstance(target, Select):
            return target.high - target.low + 1
        if isinstance(target, MemRef):
            return self.mem_width[target.name]
        if isinstance(target, Concat):
            return sum(self.target_width(p) for p in target.parts)
        raise TypeError(target)

    def store(self, target, pattern, sink):
        if isinstance(target, Ident):
            sink[target.name] = mask(pattern, self.nets[target.name][0])
        elif isinstance(target, Select):
            w = target.high - target.low + 1
            base = sink.get(target.name, self.values[target.name])
            keep = ~(((1 << w) - 1) << target.low)
            sink[target.name] = (base & keep) | (mask(pattern, w) << target.low)
        elif isinstance(target, MemRef):
            index = self.eval_self(target.index)
            sink[("mem", target.name, index)] = mask(
                pattern, self.mem_width[target.name])
        elif isinstance(target, Concat):
            shift = self.target_width(target)
            for part in target.parts:  # msb first
                w = self.target_width(part)
                shift -= w
                self.store(part, (pattern >> shift) & ((1 << w) - 1), sink)
        else:
            raise TypeError(target)

    def exec_stmt(self, stmt, sink, blocking):
        if isinstance(stmt, AssignStmt):
            lhs_w = self.target_width(stmt.target)
            rhs_w, rhs_signed = self.self_size(stmt.value)
            ctx = max(lhs_w, rhs_w)
            pattern = self.eval_ctx(stmt.value, ctx, rhs_signed)
            if stmt.blocking:
                self.store(stmt.target, pattern, self.values)
            else:
                self.store(stmt.target, pattern, sink)
        elif isinstance(stmt, IfStmt):
            cond = self.eval_self(stmt.cond)
            for sub in (stmt.then_body if cond != 0 else stmt.else_body):
                self.exec_stmt(sub, sink, blocking)
        elif isinstance(stmt, CaseStmt):
            sel_w, sel_signed = self.self_size(stmt.selector)
            body = stmt.default
            for lit, arm_body in stmt.arms:
                w = max(sel_w, lit.width)
                signed = sel_signed and lit.signed
                sel = self.eval_ctx(stmt.selector, w, signed)
                arm = self.eval_ctx(lit, w, signed)
                if sel == arm:
                    body = arm_body
                    break
            for sub in body:
                self.exec_stmt(sub, sink, blocking)
        else:
            raise TypeError(stmt)

    def commit(self, sink):
        for key, value in sink.items():
            if isinstance(key, tuple):
                _, mem, index = key
                words = self.memories[mem]
                if index < len(words):
                    words[index] = value
            else:
                self.values[key] = value

    # -- simulation interface ----------------------------------------------------

    def reset(self):
        for name in self.nets:
            if self.directions.get(name) in ("input", "inout"):
                self.values[name] = 0
            else:
                self.values[name] = self.inits.get(name, 0)
        self.settle()

    def settle(self):
        bound = 2 * len(self.nets) + 4
        for _ in range(bound):
            before = dict(self.values)
            for block in self.comb_blocks:
                for stmt in block:
                    self.exec_stmt(stmt, {}, blocking=True)
            if self.values == before:
                return
        raise RuntimeError("always @(*) blocks did not settle")

    def write(self, name, value):
        self.values[name] = mask(value, self.nets[name][0])
        self.settle()

    def read(self, name):
        return self.values[name]

    def tick(self, clk):
        sink = {}
        for block_clk, body in self.sync_blocks:
            if block_clk != clk:
                continue
            for stmt in body:
                self.exec_stmt(stmt, sink, blocking=False)
        self.commit(sink)
        self.settle()


def interpret(text):
    mod = Parser(tokenize(text)).parse_module()
    mod.reset()
    return mod
