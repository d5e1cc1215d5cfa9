from .generator import SignalCsvGenerator, TraceCsvGenerator
from .parser import SignalCsvParser, TraceCsvParser
