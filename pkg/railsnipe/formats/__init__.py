from . import netlist, traces, dot, report
