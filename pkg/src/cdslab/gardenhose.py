"""Garden-hose strategies: water-flow evaluation, verification, and search.

Pipes are numbered 1..m and run between the two players. Alice connects a tap
to one pipe's left opening and may join other left openings in pairs; Bob
joins right openings in pairs. Water entering the tap pipe traverses hoses
until it spills from an unconnected opening: spilling on Bob's side means
f(x, y) = 1, on Alice's side f(x, y) = 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

from .boolfn import BoolFn
from .errors import BudgetError, DomainError, ValidationError

LEFT = "left"
RIGHT = "right"


def _freeze_matching(pairs):
    out = set()
    used = set()
    for pair in pairs:
        a, b = tuple(pair)
        if a == b:
            raise ValidationError(f"pipe {a} matched with itself")
        for v in (a, b):
            if v in used:
                raise ValidationError(f"pipe opening {v} used twice in a matching")
            used.add(v)
        out.add(frozenset((a, b)))
    return frozenset(out)


@dataclass(frozen=True)
class GhStrategy:
    """A garden-hose strategy for a two-party function.

    Attributes:
        pipes: number of pipes m.
        n_x, n_y: input widths.
        alice: map x -> (tap pipe, left matching); the matching never touches
            the tap pipe's left opening.
        bob: map y -> right matching.
    Matchings are frozensets of frozenset pairs {i, j}.
    """

    pipes: int
    n_x: int
    n_y: int
    alice: dict
    bob: dict

    def __post_init__(self):
        if self.pipes < 1:
            raise ValidationError("need at least one pipe")
        valid = set(range(1, self.pipes + 1))
        if set(self.alice) != set(range(1 << self.n_x)):
            raise ValidationError("alice must cover every x")
        if set(self.bob) != set(range(1 << self.n_y)):
            raise ValidationError("bob must cover every y")
        for x, (tap, matching) in self.alice.items():
            if tap not in valid:
                raise ValidationError(f"tap {tap} outside 1..{self.pipes}")
            ends = {v for pair in matching for v in pair}
            if not ends <= valid:
                raise ValidationError("left matching uses unknown pipe")
            if tap in ends:
                raise ValidationError(f"x={x}: tap pipe {tap} also matched on the left")
            _freeze_matching(matching)
        for y, matching in self.bob.items():
            ends = {v for pair in matching for v in pair}
            if not ends <= valid:
                raise ValidationError("right matching uses unknown pipe")
            _freeze_matching(matching)

    def to_json(self) -> str:
        obj = {
            "pipes": self.pipes,
            "n_x": self.n_x,
            "n_y": self.n_y,
            "alice": {
                str(x): {"tap": tap, "match": sorted(sorted(pair) for pair in matching)}
                for x, (tap, matching) in self.alice.items()
            },
            "bob": {
                str(y): {"match": sorted(sorted(pair) for pair in matching)}
                for y, matching in self.bob.items()
            },
        }
        return json.dumps(obj, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "GhStrategy":
        obj = json.loads(text)
        alice = {
            int(x): (entry["tap"], _freeze_matching(entry["match"]))
            for x, entry in obj["alice"].items()
        }
        bob = {int(y): _freeze_matching(entry["match"]) for y, entry in obj["bob"].items()}
        return GhStrategy(int(obj["pipes"]), int(obj["n_x"]), int(obj["n_y"]), alice, bob)


@dataclass(frozen=True)
class GhOutcome:
    """Where the water ends up: spill side, exit pipe, traversal order.

    ``path`` lists (pipe, direction) hops, direction "lr" (left to right,
    Alice to Bob) or "rl".
    """

    side: str
    exit_pipe: int
    path: tuple


def _partner(matching, pipe):
    for pair in matching:
        if pipe in pair:
            (other,) = pair - {pipe}
            return other
    return None


def gh_eval(strategy: GhStrategy, x: int, y: int) -> GhOutcome:
    """Trace the water. Terminates after at most 2m hops since every opening
    joins at most one hose and the flow never revisits an opening."""
    if x not in strategy.alice:
        raise DomainError(f"x={x} not covered")
    if y not in strategy.bob:
        raise DomainError(f"y={y} not covered")
    tap, left_match = strategy.alice[x]
    right_match = strategy.bob[y]
    path = [(tap, "lr")]
    pipe, direction = tap, "lr"
    for _ in range(2 * strategy.pipes):
        if direction == "lr":
            nxt = _partner(right_match, pipe)
            if nxt is None:
                return GhOutcome(RIGHT, pipe, tuple(path))
            pipe, direction = nxt, "rl"
        else:
            nxt = _partner(left_match, pipe)
            if nxt is None:
                return GhOutcome(LEFT, pipe, tuple(path))
            pipe, direction = nxt, "lr"
        path.append((pipe, direction))
    raise AssertionError("water revisited an opening; matchings were not disjoint")


def gh_verify(strategy: GhStrategy, f: BoolFn) -> bool:
    """True iff the spill side equals f on every input pair."""
    if strategy.n_x != f.n_x or strategy.n_y != f.n_y:
        raise ValidationError("strategy and function input widths differ")
    for (x, y) in f.inputs():
        side = gh_eval(strategy, x, y).side
        if (side == RIGHT) != bool(f.eval(x, y)):
            return False
    return True


def gh_generic(f: BoolFn) -> GhStrategy:
    """2^(n_x+1)-pipe strategy that works for every f.

    Pipes come in pairs (2i+1, 2i+2) for each possible Alice input i. Alice
    taps her own pair's first pipe; Bob bridges pair i exactly when
    f(i, y) = 0, sending the water back to spill on the left.
    """
    m = 1 << (f.n_x + 1)
    alice = {x: (2 * x + 1, frozenset()) for x in range(1 << f.n_x)}
    bob = {}
    for y in range(1 << f.n_y):
        pairs = [frozenset((2 * i + 1, 2 * i + 2))
                 for i in range(1 << f.n_x) if f.eval(i, y) == 0]
        bob[y] = frozenset(pairs)
    return GhStrategy(m, f.n_x, f.n_y, alice, bob)


def _matchings(elems):
    """All partial matchings of a list, deterministically ordered.

    Every matching either leaves the first element single or pairs it with
    one later element, so the two branches partition the space.
    """
    elems = list(elems)
    if len(elems) < 2:
        return [frozenset()]
    first, rest = elems[0], elems[1:]
    out = list(_matchings(rest))
    for i, other in enumerate(rest):
        remaining = rest[:i] + rest[i + 1:]
        for m in _matchings(remaining):
            out.append(m | {frozenset((first, other))})
    return out


def _alice_choices(m, fix_tap=None):
    taps = [fix_tap] if fix_tap is not None else list(range(1, m + 1))
    choices = []
    for tap in taps:
        others = [i for i in range(1, m + 1) if i != tap]
        for matching in _matchings(others):
            choices.append((tap, matching))
    return choices


def gh_search(f: BoolFn, max_pipes: int, budget: int = 10 ** 8):
    """Smallest working strategy with at most ``max_pipes`` pipes, or None.

    Exhaustive over per-input tap/matching choices, in a fixed lexicographic
    order, so the result is deterministic. One symmetry is quotiented out:
    pipes can be relabelled consistently on both sides, so the tap for x = 0
    is pinned to pipe 1 without loss of generality (anything else is a
    relabelling of something enumerated).
    """
    n_inputs_x = 1 << f.n_x
    n_inputs_y = 1 << f.n_y
    for m in range(1, max_pipes + 1):
        first_choices = _alice_choices(m, fix_tap=1)
        other_choices = _alice_choices(m)
        bob_choices = _matchings(list(range(1, m + 1)))
        per_alice = [first_choices] + [other_choices] * (n_inputs_x - 1)
        total = 1
        for c in per_alice:
            total *= len(c)
        total *= len(bob_choices) ** n_inputs_y
        if total > budget:
            raise BudgetError(
                f"{total} candidate strategies at m={m} exceeds budget {budget}")
        for alice_pick in product(*per_alice):
            alice = {x: alice_pick[x] for x in range(n_inputs_x)}
            for bob_pick in product(bob_choices, repeat=n_inputs_y):
                bob = {y: bob_pick[y] for y in range(n_inputs_y)}
                strategy = GhStrategy(m, f.n_x, f.n_y, alice, bob)
                if gh_verify(strategy, f):
                    return strategy
    return None
