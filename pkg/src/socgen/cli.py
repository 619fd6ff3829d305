"""Batch front end: elaborate a built-in design to Verilog, constraint
file and CSR map, optionally simulate it against its built-in stimulus
and dump a VCD trace.

Exit status is 0 iff no diagnostics were emitted.  When the environment
variable SOCGEN_VERILOG_CHECK names an executable, it is invoked with the
emitted Verilog file path and a nonzero exit is treated as a failure.
"""

import argparse
import os
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path

from .analysis import MultipleDriverError, UnresolvedDomainError, lower
from .designs import build_blinky, build_minisoc
from .hdl.module import FinalizeError, finalize
from .platform import make_platform
from .sim import CombLoopError, ExpectationError, Simulator
from .soc.bus import OverlapError
from .soc.integration import SocConfig, emit_csr_map
from .soc.peripherals import RomOverflowError
from .verilog import emit_verilog

__all__ = ["BuildConfig", "run_build", "main"]


@dataclass
class BuildConfig:
    design: str
    out: str = "build"
    platform: str = "nexys4ddr-like"
    dialect: str = None
    sys_clk_freq: float = 100e6
    period: float = 0.1
    rom_init: str = None
    simulate: int = None
    trace: bool = False


def _diag(kind, exc):
    print("error: {}: {}".format(kind, exc), file=sys.stderr)
    return 1


def run_build(cfg):
    try:
        return _run(cfg)
    except (MultipleDriverError, UnresolvedDomainError, FinalizeError) as e:
        return _diag("analysis error", e)
    except OverlapError as e:
        return _diag("address map error", e)
    except RomOverflowError as e:
        return _diag("rom overflow", e)
    except CombLoopError as e:
        return _diag("combinatorial loop", e)
    except ExpectationError as e:
        return _diag("simulation failure", e)
    except OSError as e:
        return _diag("io error", e)
    except (ValueError, TypeError) as e:
        return _diag("invalid configuration", e)


def _write(path, text):
    with open(path, "w", newline="\n") as f:
        f.write(text)


def _run(cfg):
    if cfg.sys_clk_freq <= 0:
        raise ValueError("sys-clk-freq must be positive")
    if cfg.period <= 0:
        raise ValueError("period must be positive")

    platform = make_platform(cfg.platform)
    if cfg.dialect:
        platform.dialect = cfg.dialect

    if cfg.design == "blinky":
        built = build_blinky(platform, cfg.sys_clk_freq, cfg.period)
    elif cfg.design == "minisoc":
        rom_init = b""
        if cfg.rom_init:
            rom_init = Path(cfg.rom_init).read_bytes()
        built = build_minisoc(platform, SocConfig(
            rom_init=rom_init, sys_clk_freq=cfg.sys_clk_freq))
    else:
        raise ValueError("unknown design {!r}".format(cfg.design))

    fragment = finalize(built.module)
    design = lower(fragment, built.boundary)
    emitted = emit_verilog(design, built.name)
    port_names = {sig: design.names[sig] for sig, _ in design.ports}
    constraints = platform.emit_constraints(port_names)

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    vpath = out / (built.name + ".v")
    _write(vpath, emitted.text)
    cpath = out / (built.name + platform.constraints_suffix())
    _write(cpath, constraints)
    files = [vpath, cpath]
    if built.socmap is not None:
        csv_path = out / "csr.csv"
        _write(csv_path, emit_csr_map(built.socmap))
        files.append(csv_path)

    nregs = len(built.socmap.registers) if built.socmap is not None else 0
    regions = built.socmap.regions if built.socmap is not None else ()
    print("{}: {} ports, {} memory regions, {} CSR registers".format(
        built.name, len(emitted.port_table), len(regions), nregs))
    for path in files:
        print("  wrote {}".format(path))
    for name, direction, width in emitted.port_table:
        print("  port {:<16} {:<5} {}".format(name, direction, width))
    for region in regions:
        print("  region {:<6} 0x{:08x} {:>8} {}".format(
            region.name, region.origin, region.length, region.kind))

    if cfg.simulate:
        sim = Simulator(design=design)
        trace_file = None
        if cfg.trace:
            trace_file = open(out / (built.name + ".vcd"), "w", newline="\n")
            sim.trace_to(trace_file)
        try:
            sim.run(built.make_stimulus(cfg.simulate))
        finally:
            if trace_file is not None:
                trace_file.close()
                print("  wrote {}".format(out / (built.name + ".vcd")))
        print("simulation: PASS ({} ticks)".format(sim.total_ticks))

    check = os.environ.get("SOCGEN_VERILOG_CHECK")
    if check:
        proc = subprocess.run([check, str(vpath)], capture_output=True, text=True)
        if proc.returncode != 0:
            detail = (proc.stderr or proc.stdout or "").strip().splitlines()
            first = detail[0] if detail else "exit status {}".format(proc.returncode)
            print("error: verilog check failed: {}".format(first), file=sys.stderr)
            return 1
        print("verilog check: PASS ({})".format(check))

    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="socgen",
        description="Elaborate a built-in design to Verilog, constraints "
                    "and CSR map; optionally simulate it.")
    parser.add_argument("--design", required=True, choices=["blinky", "minisoc"])
    parser.add_argument("--out", default="build", help="output directory")
    parser.add_argument("--platform", default="nexys4ddr-like",
                        choices=["nexys4ddr-like", "versa-ecp5-like"])
    parser.add_argument("--dialect", choices=["xdc", "lpf"], default=None,
                        help="override the platform's constraint dialect")
    parser.add_argument("--sys-clk-freq", type=float, default=100e6,
                        help="system clock frequency in Hz")
    parser.add_argument("--period", type=float, default=0.1,
                        help="blinky LED period in seconds")
    parser.add_argument("--rom-init", default=None,
                        help="raw binary file for the minisoc boot ROM")
    parser.add_argument("--simulate", type=int, default=None, metavar="N",
                        help="run the built-in stimulus for N cycles")
    parser.add_argument("--trace", action="store_true",
                        help="write a VCD trace of the simulation")
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    cfg = BuildConfig(
        design=args.design, out=args.out, platform=args.platform,
        dialect=args.dialect, sys_clk_freq=args.sys_clk_freq,
        period=args.period, rom_init=args.rom_init,
        simulate=args.simulate, trace=args.trace)
    return run_build(cfg)


if __name__ == "__main__":
    sys.exit(main())
