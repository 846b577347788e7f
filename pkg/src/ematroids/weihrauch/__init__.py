"""Problems, reductions between them, and the harness that checks reductions."""

from .generators import FORMAT_VERSION, build, from_record, generate, split_rng, to_record
from .problems import PROBLEMS, Instance, Problem, register_problems
from .reductions import (
    PLAIN, REDUCTIONS, STRONG, InvalidComposition, Reduction, compose, get_reduction, identity,
)
from .verify import Report, monotonicity, negative_controls, verify_all, verify_reduction

__all__ = [
    "FORMAT_VERSION", "build", "from_record", "generate", "split_rng", "to_record",
    "PROBLEMS", "Instance", "Problem", "register_problems",
    "PLAIN", "REDUCTIONS", "STRONG", "InvalidComposition", "Reduction", "compose", "get_reduction",
    "identity", "Report", "monotonicity", "negative_controls", "verify_all", "verify_reduction",
]
