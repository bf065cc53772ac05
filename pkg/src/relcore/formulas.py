"""Quantifier-free formulas over coordinate positions.

Atomic formulas compare positions of a concatenated argument tuple
(Less, Eq) or test the label carried by a position (Label).  Connectives
are And, Or, Not plus the constants TRUE and FALSE.  Position indices are
flat: a binary relation between d-dimensional points uses positions
0..2d-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .atoms import Atom, AtomBase
from .errors import ArityMismatch, InvalidLabel, OrderNotAvailable


class Formula:
    """Base class for quantifier-free formula nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Less(Formula):
    i: int
    j: int


@dataclass(frozen=True)
class Eq(Formula):
    i: int
    j: int


@dataclass(frozen=True)
class Label(Formula):
    i: int
    label: int


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def __init__(self, *args):
        if len(args) == 1 and isinstance(args[0], (tuple, list)):
            args = tuple(args[0])
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def __init__(self, *args):
        if len(args) == 1 and isinstance(args[0], (tuple, list)):
            args = tuple(args[0])
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class Const(Formula):
    value: bool


TRUE = Const(True)
FALSE = Const(False)


def iff(a: Formula, b: Formula) -> Formula:
    return Or(And(a, b), And(Not(a), Not(b)))


def evaluate(phi: Formula, env: Sequence[Atom], base: Optional[AtomBase] = None) -> bool:
    """Truth value of phi on a concrete tuple of atoms.

    Less compares atom values and is rejected when the base is unordered;
    Label tests the label index and is rejected when it names a label the
    base cannot carry.
    """
    if isinstance(phi, Const):
        return phi.value
    if isinstance(phi, Less):
        if base is not None and not base.ordered:
            raise OrderNotAvailable("Less atomic under an unordered base")
        _check(phi.i, env)
        _check(phi.j, env)
        return env[phi.i].value < env[phi.j].value
    if isinstance(phi, Eq):
        _check(phi.i, env)
        _check(phi.j, env)
        return env[phi.i].value == env[phi.j].value
    if isinstance(phi, Label):
        _check(phi.i, env)
        if base is not None and phi.label >= base.alphabet:
            raise InvalidLabel(f"label {phi.label} outside alphabet {base.alphabet}")
        return env[phi.i].label == phi.label
    if isinstance(phi, And):
        return all(evaluate(f, env, base) for f in phi.args)
    if isinstance(phi, Or):
        return any(evaluate(f, env, base) for f in phi.args)
    if isinstance(phi, Not):
        return not evaluate(phi.arg, env, base)
    raise TypeError(f"not a formula: {phi!r}")


def _check(i: int, env: Sequence[Atom]):
    if not 0 <= i < len(env):
        raise ArityMismatch(f"position {i} outside environment of length {len(env)}")


def uses_order(phi: Formula) -> bool:
    """True iff some Less atomic occurs in phi.

    A False answer is a syntactic certificate that evaluation depends only
    on the equality-and-label pattern of the argument tuple.
    """
    if isinstance(phi, Less):
        return True
    if isinstance(phi, (And, Or)):
        return any(uses_order(f) for f in phi.args)
    if isinstance(phi, Not):
        return uses_order(phi.arg)
    return False


def max_position(phi: Formula) -> int:
    """Largest position index occurring in phi, or -1 if none."""
    if isinstance(phi, (Less, Eq)):
        return max(phi.i, phi.j)
    if isinstance(phi, Label):
        return phi.i
    if isinstance(phi, (And, Or)):
        return max((max_position(f) for f in phi.args), default=-1)
    if isinstance(phi, Not):
        return max_position(phi.arg)
    return -1


def shift_positions(phi: Formula, mapping: dict[int, int]) -> Formula:
    """Structural copy of phi with every position index sent through mapping."""
    if isinstance(phi, Less):
        return Less(mapping[phi.i], mapping[phi.j])
    if isinstance(phi, Eq):
        return Eq(mapping[phi.i], mapping[phi.j])
    if isinstance(phi, Label):
        return Label(mapping[phi.i], phi.label)
    if isinstance(phi, And):
        return And(tuple(shift_positions(f, mapping) for f in phi.args))
    if isinstance(phi, Or):
        return Or(tuple(shift_positions(f, mapping) for f in phi.args))
    if isinstance(phi, Not):
        return Not(shift_positions(phi.arg, mapping))
    return phi


def _atom_key(phi: Formula) -> tuple:
    if isinstance(phi, Less):
        return (0, phi.i, phi.j)
    if isinstance(phi, Eq):
        return (1, phi.i, phi.j)
    if isinstance(phi, Label):
        return (2, phi.i, phi.label)
    raise TypeError(f"not atomic: {phi!r}")


def _literal_key(lit: tuple[Formula, bool]) -> tuple:
    atom, neg = lit
    return _atom_key(atom) + (1 if neg else 0,)


def normalize(phi: Formula) -> Formula:
    """Negation-normal disjunctive form with a fixed total order on atomics.

    The result is semantically equivalent to phi: an Or of Ands of literals,
    with duplicate literals removed, contradictory conjuncts dropped, and
    everything sorted so that equivalent inputs produce identical trees.
    """
    clauses = _dnf(phi, False)
    cleaned = set()
    for clause in clauses:
        lits = set(clause)
        if any((atom, not neg) in lits for atom, neg in lits):
            continue
        cleaned.add(tuple(sorted(lits, key=_literal_key)))
    if any(len(c) == 0 for c in cleaned):
        return TRUE
    if not cleaned:
        return FALSE
    conjuncts = []
    for clause in sorted(cleaned, key=lambda c: tuple(_literal_key(l) for l in c)):
        lits = [Not(atom) if neg else atom for atom, neg in clause]
        conjuncts.append(lits[0] if len(lits) == 1 else And(tuple(lits)))
    if len(conjuncts) == 1:
        return conjuncts[0]
    return Or(tuple(conjuncts))


def _dnf(phi: Formula, negated: bool) -> list[tuple]:
    """List of clauses, each a tuple of (atomic, negated?) literals."""
    if isinstance(phi, Const):
        value = phi.value != negated
        return [()] if value else []
    if isinstance(phi, (Less, Eq, Label)):
        return [((phi, negated),)]
    if isinstance(phi, Not):
        return _dnf(phi.arg, not negated)
    if isinstance(phi, (And, Or)):
        conjunctive = isinstance(phi, And) != negated
        parts = [_dnf(f, negated) for f in phi.args]
        if conjunctive:
            clauses = [()]
            for part in parts:
                clauses = [c + d for c in clauses for d in part]
            return clauses
        return [c for part in parts for c in part]
    raise TypeError(f"not a formula: {phi!r}")


def to_json(phi: Formula) -> dict:
    if isinstance(phi, Const):
        return {"op": "true" if phi.value else "false"}
    if isinstance(phi, Less):
        return {"op": "lt", "i": phi.i, "j": phi.j}
    if isinstance(phi, Eq):
        return {"op": "eq", "i": phi.i, "j": phi.j}
    if isinstance(phi, Label):
        return {"op": "label", "i": phi.i, "l": phi.label}
    if isinstance(phi, And):
        return {"op": "and", "args": [to_json(f) for f in phi.args]}
    if isinstance(phi, Or):
        return {"op": "or", "args": [to_json(f) for f in phi.args]}
    if isinstance(phi, Not):
        return {"op": "not", "args": [to_json(phi.arg)]}
    raise TypeError(f"not a formula: {phi!r}")


def from_json(data: dict) -> Formula:
    op = data["op"]
    if op == "true":
        return TRUE
    if op == "false":
        return FALSE
    if op == "lt":
        return Less(int(data["i"]), int(data["j"]))
    if op == "eq":
        return Eq(int(data["i"]), int(data["j"]))
    if op == "label":
        return Label(int(data["i"]), int(data["l"]))
    if op == "and":
        return And(tuple(from_json(d) for d in data["args"]))
    if op == "or":
        return Or(tuple(from_json(d) for d in data["args"]))
    if op == "not":
        return Not(from_json(data["args"][0]))
    raise ArityMismatch(f"unknown formula op {op!r}")
