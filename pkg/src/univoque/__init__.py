"""Expansions in non-integer bases, univoque sequences and the set W_beta.

Digits run over {0, ..., alpha} and the base satisfies 1 < beta < alpha + 1.
Every real number is handled as a refinable enclosure; every verdict is
either exact or explicitly bounded by a comparison horizon.
"""

__version__ = "0.1.0"

from .errors import UnivoqueError
from .numerics import Interval, PrecisionContext, RefinableReal
from .symseq import EventuallyPeriodic, PMirrorSequence, SymbolicSequence, Word
from .expand import ExpansionDomain, base_from_expansion, count_expansion_prefixes, project, quasi_greedy
from .membership import classify_base, in_U, in_U_prime, is_strongly_univoque
from .mirror import dvk_number, is_admissible, komornik_loreti, pmirror
from .grammar import format_sequence, parse_sequence

__all__ = [
    "UnivoqueError",
    "Interval",
    "PrecisionContext",
    "RefinableReal",
    "EventuallyPeriodic",
    "PMirrorSequence",
    "SymbolicSequence",
    "Word",
    "ExpansionDomain",
    "base_from_expansion",
    "count_expansion_prefixes",
    "project",
    "quasi_greedy",
    "classify_base",
    "in_U",
    "in_U_prime",
    "is_strongly_univoque",
    "dvk_number",
    "is_admissible",
    "komornik_loreti",
    "pmirror",
    "format_sequence",
    "parse_sequence",
]
