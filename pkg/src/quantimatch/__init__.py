"""Semiring-generic online quantitative matching of timed patterns.

The package evaluates timed symbolic automata with transition costs over
piecewise-constant signals.  The verdict for a signal span is the
semiring sum over all accepting runs of the product of transition costs,
and the online matcher streams the full two-dimensional match landscape
segment by segment.
"""

from .semiring import BOOLEAN, SUPINF, TROPICAL, Semiring
from .signals import Segment, Signal
from .automaton import Automaton, CostKind, Location, Transition, parse_automaton
from .engine import OnlineMatcher, trace_value
from .matchset import MatchSet

__all__ = [
    "BOOLEAN",
    "SUPINF",
    "TROPICAL",
    "Semiring",
    "Segment",
    "Signal",
    "Automaton",
    "CostKind",
    "Location",
    "Transition",
    "parse_automaton",
    "OnlineMatcher",
    "trace_value",
    "MatchSet",
]
