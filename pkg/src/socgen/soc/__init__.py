from .csr import CsrRegister, CsrPort, csr_bank
from .bus import (SystemBus, MemoryRegion, OverlapError, bus_decoder,
                  bus_to_csr_bridge, UNMAPPED_DATA)
from .cdc import multireg_synchronizer
from .stream import StreamEndpoint, stream_width_converter
from .peripherals import Timer, GpioOut, GpioIn, Uart, Rom, RomOverflowError
from .integration import (SocConfig, SocMap, soc_build, emit_csr_map,
                          parse_csr_map)
