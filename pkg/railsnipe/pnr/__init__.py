from .dissymmetry import DissymmetryEntry, DissymmetryReport, channel_dissymmetry, report
from .placement import ComparisonReport, area_proxy, assign_capacitances, compare_flows
