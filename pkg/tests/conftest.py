"""Shared fixtures: reference automata, reference signals, random instances."""

import random
from fractions import Fraction

import pytest

from quantimatch.automaton import (
    Atom,
    Automaton,
    CostKind,
    Location,
    Transition,
    WeightedAutomaton,
    parse_automaton,
)
from quantimatch.semiring import BOOLEAN, SUPINF, TROPICAL
from quantimatch.signals import Signal, segment

# Two-step overshoot pattern: leave a low region quickly (c < 5), then
# reach the high region within the deadline (c < 10).
OVERSHOOT_SPEC = """
var x;
clock c;
location l0 init [x < 15];
location l1 [x > 5];
location l2 accept [true];
edge l0 -> l1 when c < 5 reset {c};
edge l1 -> l2 when c < 10;
"""

PAIRINGS = (
    (BOOLEAN, CostKind.SAT),
    (SUPINF, CostKind.MIN_MARGIN),
    (TROPICAL, CostKind.SUM_MARGIN),
)


@pytest.fixture
def fig_automaton():
    return parse_automaton(OVERSHOOT_SPEC)


@pytest.fixture
def wa_boolean(fig_automaton):
    return WeightedAutomaton(fig_automaton, BOOLEAN, CostKind.SAT)


@pytest.fixture
def wa_supinf(fig_automaton):
    return WeightedAutomaton(fig_automaton, SUPINF, CostKind.MIN_MARGIN)


@pytest.fixture
def wa_tropical(fig_automaton):
    return WeightedAutomaton(fig_automaton, TROPICAL, CostKind.SUM_MARGIN)


@pytest.fixture
def two_step_signal():
    # {x=7}^3.5 {x=12}^3.5
    return Signal([segment({"x": 7.0}, Fraction(7, 2)), segment({"x": 12.0}, Fraction(7, 2))])


@pytest.fixture
def short_signal():
    # {x=10}^2.5 {x=40}^1 {x=60}^3
    return Signal(
        [
            segment({"x": 10.0}, Fraction(5, 2)),
            segment({"x": 40.0}, 1),
            segment({"x": 60.0}, 3),
        ]
    )


@pytest.fixture
def long_signal():
    # {x=10}^7.5 {x=40}^10 {x=60}^13
    return Signal(
        [
            segment({"x": 10.0}, Fraction(15, 2)),
            segment({"x": 40.0}, 10),
            segment({"x": 60.0}, 13),
        ]
    )


def random_signal(rng, max_segments=5, max_denominator=4, lo=-2, hi=14):
    """Piecewise-constant signal; adjacent values always differ."""
    count = rng.randint(1, max_segments)
    segs = []
    prev = None
    for _ in range(count):
        v = float(rng.randint(lo, hi))
        while v == prev:
            v = float(rng.randint(lo, hi))
        prev = v
        dur = Fraction(rng.randint(1, 10), rng.randint(1, max_denominator))
        segs.append(segment({"x": v}, dur))
    return Signal(segs)


def _random_atoms(rng, var, count, lo, hi):
    ops = ("<", "<=", ">", ">=")
    return tuple(
        Atom(var, rng.choice(ops), Fraction(rng.randint(lo, hi))) for _ in range(count)
    )


def random_automaton(rng, dag=False, max_locations=4, max_clocks=2, extra_edges=2):
    """Small one-variable automaton with integer guard constants.

    `dag=True` keeps every edge strictly forward so each run uses a
    transition at most once (what the enumerating reference matcher
    assumes).
    """
    n = rng.randint(2, max_locations)
    clocks = ("c", "d")[: rng.randint(1, max_clocks)]
    locations = []
    for i in range(n):
        locations.append(
            Location(
                name=f"l{i}",
                label=_random_atoms(rng, "x", rng.randint(0, 2), -2, 14),
                initial=(i == 0),
                accepting=(i == n - 1 or rng.random() < 0.2),
            )
        )
    edges = [(i, i + 1) for i in range(n - 1)]
    for _ in range(rng.randint(0, extra_edges)):
        if dag:
            i = rng.randint(0, n - 2)
            j = rng.randint(i + 1, n - 1)
        else:
            i = rng.randint(0, n - 1)
            j = rng.randint(0, n - 1)
        edges.append((i, j))
    transitions = []
    seen = set()
    for i, j in edges:
        key = (i, j, len(transitions)) if not dag else (i, j)
        if dag and key in seen:
            continue
        seen.add(key)
        guard = _random_atoms(rng, rng.choice(clocks), rng.randint(0, 2), 0, 8)
        resets = tuple(c for c in clocks if rng.random() < 0.4)
        transitions.append(Transition(f"l{i}", guard, resets, f"l{j}"))
    return Automaton(("x",), clocks, tuple(locations), tuple(transitions))


def weighted_variants(a):
    """The automaton under all three cost/semiring pairings."""
    return [WeightedAutomaton(a, sr, kind) for sr, kind in PAIRINGS]
