from .parser import NetlistParser, parse_netlist, read_netlist
from .generator import NetlistGenerator, serialize_netlist
