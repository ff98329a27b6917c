from .builtin import REGISTRY, BuiltinProblem, evaluate_builtin, get_problem
from .external import ExternalBlackbox, evaluate_external

__all__ = [
    "REGISTRY",
    "BuiltinProblem",
    "ExternalBlackbox",
    "evaluate_builtin",
    "evaluate_external",
    "get_problem",
]
