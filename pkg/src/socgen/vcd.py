"""Minimal VCD (value change dump) writer, two-state values only."""

__all__ = ["VcdWriter"]

_ID_CHARS = [chr(c) for c in range(33, 127)]


def _idcode(n):
    code = ""
    while True:
        code = _ID_CHARS[n % 94] + code
        n //= 94
        if n == 0:
            return code


class VcdWriter:
    def __init__(self, fileobj, timescale="1ns", top="top"):
        self._f = fileobj
        self._timescale = timescale
        self._top = top
        self._vars = []          # (name, width, code)
        self._widths = {}        # code -> width
        self._last = {}          # code -> last dumped value
        self._header_written = False

    def add_var(self, name, width):
        if self._header_written:
            raise RuntimeError("cannot add variables after the header")
        code = _idcode(len(self._vars))
        self._vars.append((name, width, code))
        self._widths[code] = width
        return code

    def write_header(self):
        f = self._f
        f.write("$version socgen $end\n")
        f.write("$timescale {} $end\n".format(self._timescale))
        f.write("$scope module {} $end\n".format(self._top))
        for name, width, code in self._vars:
            ref = name if width == 1 else "{} [{}:0]".format(name, width - 1)
            f.write("$var wire {} {} {} $end\n".format(width, code, ref))
        f.write("$upscope $end\n")
        f.write("$enddefinitions $end\n")
        self._header_written = True

    def _emit(self, code, width, value):
        if width == 1:
            self._f.write("{}{}\n".format(value, code))
        else:
            self._f.write("b{:b} {}\n".format(value, code))

    def sample(self, time, values):
        """Dump values changed since the previous sample at one timestep.
        values maps variable codes to unsigned integers."""
        if not self._last:
            self._f.write("#{}\n".format(time))
            self._f.write("$dumpvars\n")
            for _, width, code in self._vars:
                value = values.get(code, 0)
                self._emit(code, width, value)
                self._last[code] = value
            self._f.write("$end\n")
            return
        changed = [(code, v) for code, v in values.items()
                   if self._last.get(code) != v]
        if not changed:
            return
        self._f.write("#{}\n".format(time))
        for code, value in changed:
            self._emit(code, self._widths[code], value)
            self._last[code] = value
