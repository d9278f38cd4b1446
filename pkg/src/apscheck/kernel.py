"""Exhaustive breadth-first exploration of finite labeled transition systems.

The kernel is model-agnostic: a model contributes variable declarations,
initial states, a deterministic successor function and named invariant
predicates, packaged as a :class:`TransitionSystem`. :func:`check` explores
every reachable state in a fixed order, deduplicating by canonical byte
encoding, and either proves all invariants or reconstructs a shortest
counterexample trace.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, NamedTuple, Optional, Sequence

from .errors import (
    ConfigurationError,
    DomainError,
    InternalConsistencyError,
    LimitExceededError,
    ModelIntegrityError,
)


@dataclass(frozen=True)
class VariableDecl:
    """One model variable: a total map from `keys` into `domain`.

    Keys are typically app identifiers, but any fixed, ordered index set
    works (the custom-permission model also indexes by permission name and
    by app:name pairs). Domain order fixes the byte code of each value.
    """

    name: str
    keys: tuple[str, ...]
    domain: tuple


class State:
    """A total assignment of every declared variable, canonically encoded.

    Two states are equal exactly when their encodings are byte-identical;
    the full encoding (not a hash fingerprint) is the deduplication key.
    `assignment` keeps the decoded values in declaration order so traces
    stay renderable without the producing system at hand.
    """

    __slots__ = ("encoding", "assignment")

    def __init__(self, encoding: bytes,
                 assignment: tuple[tuple[str, tuple[tuple[str, object], ...]], ...]):
        self.encoding = encoding
        self.assignment = assignment

    def as_dict(self) -> dict[str, dict[str, object]]:
        return {var: dict(items) for var, items in self.assignment}

    def value(self, var: str, key: str):
        for name, items in self.assignment:
            if name == var:
                return dict(items)[key]
        raise KeyError(var)

    def __eq__(self, other):
        return isinstance(other, State) and self.encoding == other.encoding

    def __hash__(self):
        return hash(self.encoding)

    def __repr__(self):
        return f"State({self.as_dict()!r})"


@dataclass(frozen=True)
class ActionLabel:
    """Names the atomic action that produced a transition, with its
    parameter values in a fixed order (the acting app first)."""

    name: str
    params: tuple[tuple[str, object], ...] = ()

    def render(self) -> str:
        if not self.params:
            return self.name
        return f"{self.name}({', '.join(str(v) for _, v in self.params)})"


def canonical_encode(variables: Sequence[VariableDecl],
                     assignment: Mapping[str, Mapping[str, object]]) -> State:
    """Encode a total assignment into a :class:`State`.

    Deterministic and injective for a fixed declaration list: variables in
    declaration order, keys in declared key order, one byte per slot holding
    the value's domain code. Raises :class:`DomainError` when the assignment
    misses a variable or key, or carries an out-of-domain value.
    """
    codes = bytearray()
    decoded = []
    for decl in variables:
        try:
            var_map = assignment[decl.name]
        except KeyError:
            raise DomainError(f"assignment is missing variable {decl.name!r}") from None
        items = []
        for key in decl.keys:
            try:
                value = var_map[key]
            except KeyError:
                raise DomainError(
                    f"assignment for {decl.name!r} is missing key {key!r}"
                ) from None
            try:
                codes.append(decl.domain.index(value))
            except ValueError:
                raise DomainError(
                    f"value {value!r} for {decl.name}[{key}] is outside the "
                    f"declared domain {decl.domain!r}"
                ) from None
            items.append((key, value))
        decoded.append((decl.name, tuple(items)))
    return State(bytes(codes), tuple(decoded))


SuccessorFn = Callable[[State], "list[tuple[ActionLabel, State]]"]
InvariantFn = Callable[[State], bool]


@dataclass(frozen=True)
class TransitionSystem:
    """A model's contract with the kernel.

    `successors` must be deterministic: the same state yields the identical
    ordered list on every call. Invariants are checked in list order.
    """

    name: str
    variables: tuple[VariableDecl, ...]
    initial_states: tuple[State, ...]
    successors: SuccessorFn
    invariants: tuple[tuple[str, InvariantFn], ...] = ()

    @property
    def invariant_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.invariants)

    def invariant(self, name: str) -> InvariantFn:
        for inv_name, predicate in self.invariants:
            if inv_name == name:
                return predicate
        raise KeyError(name)

    def with_invariants(self, names: Sequence[str]) -> "TransitionSystem":
        """Restrict to the named invariants, checked in the given order."""
        table = dict(self.invariants)
        missing = [n for n in names if n not in table]
        if missing:
            raise ConfigurationError(
                f"model {self.name!r} has no invariant named {missing[0]!r}"
            )
        selected = tuple((n, table[n]) for n in names)
        return TransitionSystem(self.name, self.variables, self.initial_states,
                                self.successors, selected)

    def encode(self, assignment: Mapping[str, Mapping[str, object]]) -> State:
        return canonical_encode(self.variables, assignment)

    def _encoding_length(self) -> int:
        return sum(len(d.keys) for d in self.variables)

    def _validate_state(self, state: State, context: str) -> None:
        if len(state.encoding) != self._encoding_length():
            raise ModelIntegrityError(
                f"{context}: state encoding has {len(state.encoding)} slots, "
                f"declarations require {self._encoding_length()}"
            )
        pos = 0
        for decl in self.variables:
            for key in decl.keys:
                if state.encoding[pos] >= len(decl.domain):
                    raise ModelIntegrityError(
                        f"{context}: {decl.name}[{key}] holds code "
                        f"{state.encoding[pos]}, outside its declared domain"
                    )
                pos += 1


class TraceStep(NamedTuple):
    state: State
    label: Optional[ActionLabel]  # None only on the initial state


@dataclass(frozen=True)
class Trace:
    """Minimal-length labeled path from an initial state to the state that
    violates `violated_invariant`."""

    steps: tuple[TraceStep, ...]
    violated_invariant: str

    def __len__(self) -> int:
        # Number of labeled steps, i.e. actions taken.
        return len(self.steps) - 1

    @property
    def final_state(self) -> State:
        return self.steps[-1].state


class Verdict(Enum):
    PASS = "pass"
    VIOLATION = "violation"
    LIMIT_EXCEEDED = "limit_exceeded"


@dataclass(frozen=True)
class CheckOptions:
    max_states: int = 1_000_000
    check_invariants: bool = True


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one exploration run.

    `diameter` is the maximum breadth-first depth of any discovered state;
    on a full pass it equals the depth of the state farthest from the
    initial states. `elapsed` is wall-clock seconds and is the only
    nondeterministic field.
    """

    verdict: Verdict
    distinct_states: int
    transitions: int
    diameter: int
    elapsed: float
    trace: Optional[Trace] = None
    invariants_checked: tuple[str, ...] = ()

    @property
    def violated_invariant(self) -> Optional[str]:
        return self.trace.violated_invariant if self.trace else None


def reconstruct_trace(predecessors: Mapping[State, Optional[tuple[State, ActionLabel]]],
                      violating: State, invariant_name: str) -> Trace:
    """Walk the predecessor tree from `violating` back to its root.

    `predecessors` maps every discovered state to its (parent, label) edge,
    with initial states mapped to None. Raises
    :class:`InternalConsistencyError` if `violating` was never recorded or
    the map is not a tree.
    """
    if violating not in predecessors:
        raise InternalConsistencyError(
            "violating state is absent from the predecessor map"
        )
    steps: list[TraceStep] = []
    current = violating
    for _ in range(len(predecessors) + 1):
        entry = predecessors[current]
        if entry is None:
            steps.append(TraceStep(current, None))
            steps.reverse()
            return Trace(tuple(steps), invariant_name)
        parent, label = entry
        steps.append(TraceStep(current, label))
        if parent not in predecessors:
            raise InternalConsistencyError(
                "predecessor map references an unrecorded state"
            )
        current = parent
    raise InternalConsistencyError("predecessor map contains a cycle")


def check(system: TransitionSystem,
          options: CheckOptions | None = None) -> CheckReport:
    """Breadth-first exhaustive exploration with invariant checking.

    States are explored in a canonical order (initial states as declared,
    successors in the model's declared action order), so the first violation
    found, and hence the reported trace, is the same on every run. Each
    state's invariants are evaluated once, at dequeue; the first failing
    invariant in list order names the violation, and the reconstructed trace
    is shortest by the BFS discovery guarantee.
    """
    opts = options or CheckOptions()
    if opts.max_states < 1:
        raise ConfigurationError("max_states must be at least 1")
    if not system.initial_states:
        raise ConfigurationError(f"model {system.name!r} declares no initial state")

    active = system.invariants if opts.check_invariants else ()
    started = time.perf_counter()

    depth_of: dict[State, int] = {}
    predecessors: dict[State, Optional[tuple[State, ActionLabel]]] = {}
    frontier: deque[State] = deque()
    transitions = 0
    diameter = 0

    def report(verdict: Verdict, trace: Optional[Trace] = None) -> CheckReport:
        return CheckReport(
            verdict=verdict,
            distinct_states=len(depth_of),
            transitions=transitions,
            diameter=diameter,
            elapsed=time.perf_counter() - started,
            trace=trace,
            invariants_checked=tuple(name for name, _ in active),
        )

    for state in system.initial_states:
        system._validate_state(state, "initial state")
        if state in depth_of:
            continue
        if len(depth_of) >= opts.max_states:
            return report(Verdict.LIMIT_EXCEEDED)
        depth_of[state] = 0
        predecessors[state] = None
        frontier.append(state)

    while frontier:
        state = frontier.popleft()
        for name, predicate in active:
            if not predicate(state):
                trace = reconstruct_trace(predecessors, state, name)
                return report(Verdict.VIOLATION, trace)
        depth = depth_of[state]
        for label, successor in system.successors(state):
            transitions += 1
            system._validate_state(successor, f"successor via {label.render()}")
            if successor in depth_of:
                continue
            if len(depth_of) >= opts.max_states:
                return report(Verdict.LIMIT_EXCEEDED)
            depth_of[successor] = depth + 1
            if depth + 1 > diameter:
                diameter = depth + 1
            predecessors[successor] = (state, label)
            frontier.append(successor)

    return report(Verdict.PASS)


def reachable_stats(system: TransitionSystem,
                    max_states: int = 1_000_000) -> tuple[int, int, int]:
    """Exploration statistics with invariant checking disabled.

    Returns (distinct_states, transitions, diameter); never reports a
    violation. Raises :class:`LimitExceededError` carrying the partial
    counts when the state limit is hit.
    """
    rep = check(system, CheckOptions(max_states=max_states, check_invariants=False))
    if rep.verdict is Verdict.LIMIT_EXCEEDED:
        raise LimitExceededError(
            f"state limit of {max_states} exceeded while exploring {system.name!r}",
            rep.distinct_states, rep.transitions, rep.diameter,
        )
    return rep.distinct_states, rep.transitions, rep.diameter
