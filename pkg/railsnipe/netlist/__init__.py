from .validator import validate
from .builtin import builtin_add_round_key, builtin_dims_xor, builtin_unbalanced_xor
from .annotate import perturb, parse_perturbation, xor_capacitances
