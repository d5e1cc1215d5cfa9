from .table import DissymmetryTableGenerator
