"""Verilog-2001 emission from a lowered design.

The output is a single flat module: combinatorial logic as one
`always @(*)` block per target group, using blocking assignments with each
target's reset-value default at the top (so no latches are inferred), one
`always @(posedge)` block per clock domain with an `if (rst) ... else ...`
synchronous reset, memories as register arrays initialised inline, and
external instances emitted verbatim.

Expressions are rendered fully parenthesised.  Every constant is sized;
when one operand of an operation is signed and the other is an unsigned
non-constant, the unsigned side is wrapped in $signed({1'd0, ...}) so the
operation happens in the signed domain at a sufficient width.  Lowering
guarantees that self-determined positions only ever hold signals,
constants or bit rearrangements of those, so Verilog's width rules cannot
drop carry bits computed by the width-inference rules.
"""

import re
from dataclasses import dataclass

from .hdl.ast import (
    Assign, Binary, Case, Cat, Constant, If, Mux, Replicate, Signal, Slice,
    Unary, shape, mask_value, COMPARE_OPS,
)

__all__ = ["RESERVED_WORDS", "EmittedModule", "emit_expression", "emit_verilog"]

RESERVED_WORDS = frozenset("""
    always and assign automatic begin buf bufif0 bufif1 case casex casez cell
    cmos config deassign default defparam design disable edge else end endcase
    endconfig endfunction endgenerate endmodule endprimitive endspecify
    endtable endtask event for force forever fork function generate genvar
    highz0 highz1 if ifnone incdir include initial inout input instance
    integer join large liblist library localparam macromodule medium module
    nand negedge nmos nor noshowcancelled not notif0 notif1 or output
    parameter pmos posedge primitive pull0 pull1 pulldown pullup
    pulsestyle_ondetect pulsestyle_onevent rcmos real realtime reg release
    repeat rnmos rpmos rtran rtranif0 rtranif1 scalared showcancelled signed
    small specify specparam strong0 strong1 supply0 supply1 table task time
    tran tranif0 tranif1 tri tri0 tri1 triand trior trireg unsigned use
    vectored wait wand weak0 weak1 while wire wor xnor xor
""".split())

_BINARY_SYMBOL = {
    "add": "+", "sub": "-", "mul": "*",
    "and": "&", "or": "|", "xor": "^",
    "eq": "==", "ne": "!=", "lt": "<", "le": "<=", "gt": ">", "ge": ">=",
}


@dataclass(eq=False)
class EmittedModule:
    module_name: str
    text: str
    port_table: tuple  # (name, direction, width)


def _const_text(value, width, signed):
    if signed:
        if value < 0:
            return "-{}'sd{}".format(width, -value)
        return "{}'sd{}".format(width, value)
    return "{}'d{}".format(width, value)


def _expr(v, names):
    if isinstance(v, Constant):
        return _const_text(v.value, v.width, v.signed)
    if isinstance(v, Signal):
        return names[v]
    if isinstance(v, Unary):
        operand = _expr(v.operand, names)
        if v.op == "not":
            return "(~{})".format(operand)
        if shape(v.operand).signed:
            return "(-{})".format(operand)
        return "(-$signed({{1'd0, {}}}))".format(operand)
    if isinstance(v, Binary):
        if v.op in ("shl", "shr"):
            lhs = _expr(v.lhs, names)
            rhs = _expr(v.rhs, names)
            if v.op == "shl":
                sym = "<<"
            else:
                sym = ">>>" if shape(v.lhs).signed else ">>"
            return "({} {} {})".format(lhs, sym, rhs)
        lhs, rhs = _pair(v.lhs, v.rhs, names, force_signed=(v.op == "sub"))
        return "({} {} {})".format(lhs, _BINARY_SYMBOL[v.op], rhs)
    if isinstance(v, Mux):
        if_true, if_false = _pair(v.if_true, v.if_false, names)
        return "({} ? {} : {})".format(_expr(v.cond, names), if_true, if_false)
    if isinstance(v, Slice):
        sig = v.operand
        name = names[sig]
        if sig.width == 1:
            # bit-select of a scalar is illegal Verilog; a one-element
            # concat keeps the unsigned reinterpretation a slice implies
            return "{{{}}}".format(name) if sig.signed else name
        if v.high - v.low == 1:
            return "{}[{}]".format(name, v.low)
        return "{}[{}:{}]".format(name, v.high - 1, v.low)
    if isinstance(v, Cat):
        parts = [_expr(p, names) for p in reversed(v.parts)]
        return "{{{}}}".format(", ".join(parts))
    if isinstance(v, Replicate):
        return "{{{}{{{}}}}}".format(v.count, _expr(v.operand, names))
    raise TypeError("cannot emit {!r}".format(v))


def _sized(v, names, width, signed):
    # render an operand, widening constants to the operation width
    if isinstance(v, Constant):
        return _const_text(v.value, max(v.width, width), signed or v.signed)
    return _expr(v, names)


def _pair(l, r, names, force_signed=False):
    """Render the two operands of an arithmetic, bitwise, comparison or mux
    pairing, reconciling signedness the same way shape() does.  When the
    operation itself is signed (subtraction), unsigned operands are
    zero-extended into the signed domain even if both are unsigned."""
    sl = shape(l)
    sr = shape(r)
    if sl.signed == sr.signed and not (force_signed and not sl.signed):
        w = max(sl.width, sr.width)
        return _sized(l, names, w, sl.signed), _sized(r, names, w, sr.signed)
    w = max(sl.width + (0 if sl.signed else 1),
            sr.width + (0 if sr.signed else 1))
    left = _sized(l, names, w, True) if sl.signed else _wrap_unsigned(l, names, w)
    right = _sized(r, names, w, True) if sr.signed else _wrap_unsigned(r, names, w)
    return left, right


def _wrap_unsigned(v, names, width):
    if isinstance(v, Constant):
        return _const_text(v.value, max(v.width + 1, width), True)
    return "$signed({{1'd0, {}}})".format(_expr(v, names))


def emit_expression(v, names):
    """Render one expression with the given signal-name map."""
    return _expr(v, names)


def _stmt(s, names, level, blocking):
    ind = "\t" * level
    if isinstance(s, Assign):
        op = "=" if blocking else "<="
        target_width = shape(s.target).width
        value = _sized(s.value, names, target_width, shape(s.target).signed)
        return "{}{} {} {};\n".format(ind, _expr(s.target, names), op, value)
    if isinstance(s, If):
        text = "{}if ({}) begin\n".format(ind, _expr(s.cond, names))
        for sub in s.then_body:
            text += _stmt(sub, names, level + 1, blocking)
        if s.else_body:
            text += "{}end else begin\n".format(ind)
            for sub in s.else_body:
                text += _stmt(sub, names, level + 1, blocking)
        text += "{}end\n".format(ind)
        return text
    if isinstance(s, Case):
        sel_width = shape(s.selector).width
        text = "{}case ({})\n".format(ind, _expr(s.selector, names))
        for const, body in s.arms:
            pattern = mask_value(const, sel_width)
            text += "{}\t{}: begin\n".format(ind, _const_text(pattern, sel_width, False))
            for sub in body:
                text += _stmt(sub, names, level + 2, blocking)
            text += "{}\tend\n".format(ind)
        text += "{}\tdefault: begin\n".format(ind)
        for sub in s.default:
            text += _stmt(sub, names, level + 2, blocking)
        text += "{}\tend\n".format(ind)
        text += "{}endcase\n".format(ind)
        return text
    raise TypeError("cannot emit statement {!r}".format(s))


def _decl(sig, names):
    parts = []
    if sig.signed:
        parts.append("signed ")
    if sig.width > 1:
        parts.append("[{}:0] ".format(sig.width - 1))
    parts.append(names[sig])
    return "".join(parts)


def _unique_local(used, base):
    if base not in used:
        used.add(base)
        return base
    k = 0
    while "{}_{}".format(base, k) in used:
        k += 1
    name = "{}_{}".format(base, k)
    used.add(name)
    return name


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def emit_verilog(design, module_name="top"):
    """Emit one synthesizable Verilog module from a lowered design.

    The output is deterministic: emitting the same design twice yields
    byte-identical text.
    """
    from socgen import __version__

    if not _IDENT.match(module_name) or module_name in RESERVED_WORDS:
        raise ValueError("bad module name {!r}".format(module_name))
    names = design.names
    lines = []
    lines.append("// Generated by socgen {}. Do not edit.\n".format(__version__))

    port_table = []
    port_decls = []
    for sig, direction in design.ports:
        if direction == "in":
            kw = "input wire "
        elif direction == "inout":
            kw = "inout wire "
        elif sig in design.reg_signals:
            kw = "output reg "
        else:
            kw = "output wire "
        port_decls.append("\t" + kw + _decl(sig, names))
        port_table.append((names[sig], direction, sig.width))
    if port_decls:
        lines.append("module {}(\n{}\n);\n".format(module_name, ",\n".join(port_decls)))
    else:
        lines.append("module {}();\n".format(module_name))

    port_signals = {sig for sig, _ in design.ports}
    decls = []
    for sig in design.signals:
        if sig in port_signals:
            continue
        if sig in design.reg_signals:
            decls.append("reg {} = {};\n".format(
                _decl(sig, names), _const_text(sig.reset, sig.width, sig.signed)))
        elif sig in design.inst_driven:
            decls.append("wire {};\n".format(_decl(sig, names)))
        else:
            # never driven: a constant net holding the reset value
            decls.append("wire {} = {};\n".format(
                _decl(sig, names), _const_text(sig.reset, sig.width, sig.signed)))
    if decls:
        lines.append("\n")
        lines.extend(decls)

    for group in design.comb_groups:
        lines.append("\nalways @(*) begin\n")
        for stmt in group.body:
            lines.append(_stmt(stmt, names, 1, blocking=True))
        lines.append("end\n")

    for domain in design.processes:
        proc = design.processes[domain]
        clk = names[proc.domain.clk]
        lines.append("\nalways @(posedge {}) begin\n".format(clk))
        if proc.reset_assigns:
            lines.append("\tif ({}) begin\n".format(names[proc.domain.rst]))
            for stmt in proc.reset_assigns:
                lines.append(_stmt(stmt, names, 2, blocking=False))
            lines.append("\tend else begin\n")
            for stmt in proc.body:
                lines.append(_stmt(stmt, names, 2, blocking=False))
            lines.append("\tend\n")
        else:
            for stmt in proc.body:
                lines.append(_stmt(stmt, names, 1, blocking=False))
        lines.append("end\n")

    used_local = set(names.values()) | set(RESERVED_WORDS)
    for mem in design.memories:
        mem_name = names[mem]
        lines.append("\nreg [{}:0] {}[0:{}];\n".format(
            mem.width - 1, mem_name, mem.depth - 1))
        hex_digits = (mem.width + 3) // 4
        if len(mem.init) < mem.depth:
            idx = _unique_local(used_local, mem_name + "_i")
            lines.append("integer {};\n".format(idx))
            lines.append("initial begin\n")
            lines.append("\tfor ({0} = 0; {0} < {1}; {0} = {0} + 1) begin\n"
                         .format(idx, mem.depth))
            lines.append("\t\t{}[{}] = {}'d0;\n".format(mem_name, idx, mem.width))
            lines.append("\tend\n")
        else:
            lines.append("initial begin\n")
        for i, word in enumerate(mem.init):
            lines.append("\t{}[{}] = {}'h{:0{}x};\n".format(
                mem_name, i, mem.width, word, hex_digits))
        lines.append("end\n")
        for port in mem.ports:
            clk = names[design.domains[port.domain].clk]
            lines.append("\nalways @(posedge {}) begin\n".format(clk))
            lines.append("\t{} <= {}[{}];\n".format(
                names[port.dat_r], mem_name, names[port.adr]))
            if port.we is not None:
                lines.append("\tif ({}) begin\n".format(names[port.we]))
                lines.append("\t\t{}[{}] <= {};\n".format(
                    mem_name, names[port.adr], names[port.dat_w]))
                lines.append("\tend\n")
            lines.append("end\n")

    for inst in design.instances:
        inst_name = _unique_local(used_local, "u_{}".format(inst.module_name))
        lines.append("\n{}".format(inst.module_name))
        if inst.parameters:
            params = []
            for pname, pvalue in inst.parameters:
                if isinstance(pvalue, str):
                    params.append("\t.{}(\"{}\")".format(pname, pvalue))
                else:
                    params.append("\t.{}({})".format(pname, pvalue))
            lines.append(" #(\n{}\n)".format(",\n".join(params)))
        lines.append(" {} (\n".format(inst_name))
        conns = ["\t.{}({})".format(pname, _expr(value, names))
                 for pname, _, value in inst.ports]
        lines.append(",\n".join(conns))
        lines.append("\n);\n")

    lines.append("\nendmodule\n")
    return EmittedModule(module_name=module_name, text="".join(lines),
                         port_table=tuple(port_table))
