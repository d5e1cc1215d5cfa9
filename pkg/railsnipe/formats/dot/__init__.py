from .generator import DotGenerator
