"""Boolean focus expressions.

A final-state set is compiled into a factored AND/OR expression over region
literals: the region shared by the most states is pulled out with AND, the
states are split on it, and both halves are factored recursively. Evaluation,
exhaustive equivalence checking, rendering, and a JSON form round out the
expression toolkit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .errors import EmptyStateSetError, LiteralRangeError, TruthTableLimitError
from .states import FinalStateSet, StateVector


@dataclass(frozen=True)
class Literal:
    """Region ``region`` is preserved."""

    region: int

    def __post_init__(self):
        if self.region < 1:
            raise LiteralRangeError(f"region indices are 1-based, got {self.region}")


@dataclass(frozen=True)
class And:
    children: tuple["LogicExpr", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("And requires >= 2 children; use conjunction()")


@dataclass(frozen=True)
class Or:
    children: tuple["LogicExpr", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("Or requires >= 2 children; use disjunction()")


@dataclass(frozen=True)
class TrueExpr:
    """The always-true expression (an empty state satisfies everything)."""


TRUE = TrueExpr()

LogicExpr = Union[Literal, And, Or, TrueExpr]


def literal_count(expr: LogicExpr) -> int:
    """Number of literal occurrences in the tree."""
    if isinstance(expr, Literal):
        return 1
    if isinstance(expr, (And, Or)):
        return sum(literal_count(c) for c in expr.children)
    return 0


def max_literal(expr: LogicExpr) -> int:
    """Largest region index referenced, 0 for a literal-free expression."""
    if isinstance(expr, Literal):
        return expr.region
    if isinstance(expr, (And, Or)):
        return max(max_literal(c) for c in expr.children)
    return 0


def _min_literal(expr: LogicExpr) -> int:
    if isinstance(expr, Literal):
        return expr.region
    if isinstance(expr, (And, Or)):
        return min(_min_literal(c) for c in expr.children)
    return 1 << 30  # TRUE sorts last


def _struct_key(expr: LogicExpr) -> tuple:
    if isinstance(expr, Literal):
        return (0, expr.region)
    if isinstance(expr, And):
        return (1, tuple(_struct_key(c) for c in expr.children))
    if isinstance(expr, Or):
        return (2, tuple(_struct_key(c) for c in expr.children))
    return (3,)


def _or_key(expr: LogicExpr) -> tuple:
    return (_min_literal(expr), literal_count(expr), _struct_key(expr))


def _and_key(expr: LogicExpr) -> tuple:
    # Literals lead (ascending), composite conjuncts follow.
    return (0 if isinstance(expr, Literal) else 1, *_or_key(expr))


def conjunction(parts: Iterable[LogicExpr]) -> LogicExpr:
    """Canonical AND: flattens nested Ands, drops TRUE, collapses trivia."""
    flat: list[LogicExpr] = []
    for p in parts:
        if isinstance(p, TrueExpr):
            continue
        if isinstance(p, And):
            flat.extend(p.children)
        else:
            flat.append(p)
    unique = sorted(set(flat), key=_and_key)
    if not unique:
        return TRUE
    if len(unique) == 1:
        return unique[0]
    return And(tuple(unique))


def disjunction(parts: Iterable[LogicExpr]) -> LogicExpr:
    """Canonical OR: flattens nested Ors; any TRUE branch absorbs the rest."""
    flat: list[LogicExpr] = []
    for p in parts:
        if isinstance(p, TrueExpr):
            return TRUE
        if isinstance(p, Or):
            flat.extend(p.children)
        else:
            flat.append(p)
    unique = sorted(set(flat), key=_or_key)
    if not unique:
        raise ValueError("disjunction of no branches")
    if len(unique) == 1:
        return unique[0]
    return Or(tuple(unique))


StateLike = Union[StateVector, Iterable[int]]


def _as_index_sets(final_states: Union[FinalStateSet, Iterable[StateLike]]) -> set[frozenset[int]]:
    if isinstance(final_states, FinalStateSet):
        return {frozenset(s.regions) for s in final_states.states}
    out = set()
    for s in final_states:
        if isinstance(s, StateVector):
            out.add(frozenset(s.regions))
        else:
            idx = frozenset(s)
            for i in idx:
                if not isinstance(i, int) or i < 1:
                    raise LiteralRangeError(f"region indices are 1-based ints, got {i!r}")
            out.add(idx)
    return out


def translate(final_states: Union[FinalStateSet, Iterable[StateLike]]) -> LogicExpr:
    """Compile a set of final states into a factored logical expression.

    The result is true on exactly the states that preserve a superset of some
    final state. Deterministic: equal state sets yield structurally equal
    trees (shared-region argmax ties break toward the lowest index, children
    are kept in canonical order).
    """
    sets = _as_index_sets(final_states)
    if not sets:
        raise EmptyStateSetError("cannot translate an empty final-state set")
    return _translate(sets)


def _translate(sets: set[frozenset[int]]) -> LogicExpr:
    if len(sets) == 1:
        (only,) = sets
        return conjunction(Literal(i) for i in sorted(only))
    counts: dict[int, int] = {}
    for s in sets:
        for i in s:
            counts[i] = counts.get(i, 0) + 1
    shared = min(counts, key=lambda i: (-counts[i], i))
    with_shared = {s - {shared} for s in sets if shared in s}
    without = {s for s in sets if shared not in s}
    branch = conjunction([Literal(shared), _translate(with_shared)])
    if not without:
        return branch
    return disjunction([branch, _translate(without)])


def eval_bits(expr: LogicExpr, bits: int, region_count: int) -> bool:
    """Evaluate over a raw bitmask (region i on bit i-1)."""
    if isinstance(expr, Literal):
        if expr.region > region_count:
            raise LiteralRangeError(
                f"literal I{expr.region} out of range for {region_count} regions"
            )
        return bool(bits >> (expr.region - 1) & 1)
    if isinstance(expr, And):
        return all(eval_bits(c, bits, region_count) for c in expr.children)
    if isinstance(expr, Or):
        return any(eval_bits(c, bits, region_count) for c in expr.children)
    return True


def evaluate(expr: LogicExpr, state: StateVector) -> bool:
    """True iff the preserved-region set of ``state`` satisfies ``expr``."""
    return eval_bits(expr, state.bits, state.region_count)


_TRUTH_TABLE_LIMIT = 20


def equivalent(a: LogicExpr, b: LogicExpr, region_count: int) -> bool:
    """Exhaustive truth-table equality over all 2^M states (M <= 20)."""
    if region_count > _TRUTH_TABLE_LIMIT:
        raise TruthTableLimitError(
            f"truth-table check limited to {_TRUTH_TABLE_LIMIT} regions, got {region_count}"
        )
    needed = max(max_literal(a), max_literal(b))
    if needed > region_count:
        raise LiteralRangeError(
            f"literal I{needed} out of range for {region_count} regions"
        )
    return all(
        eval_bits(a, bits, region_count) == eval_bits(b, bits, region_count)
        for bits in range(1 << region_count)
    )


def render(expr: LogicExpr) -> str:
    """Infix text: ``I1 & (I2 | I3)``; parentheses around every composite child."""
    if isinstance(expr, TrueExpr):
        return "TRUE"
    if isinstance(expr, Literal):
        return f"I{expr.region}"
    sep = " & " if isinstance(expr, And) else " | "
    parts = []
    for c in expr.children:
        text = render(c)
        if isinstance(c, (And, Or)):
            text = f"({text})"
        parts.append(text)
    return sep.join(parts)


def expr_to_json(expr: LogicExpr) -> dict:
    if isinstance(expr, Literal):
        return {"op": "lit", "region": expr.region}
    if isinstance(expr, And):
        return {"op": "and", "children": [expr_to_json(c) for c in expr.children]}
    if isinstance(expr, Or):
        return {"op": "or", "children": [expr_to_json(c) for c in expr.children]}
    return {"op": "true"}


def expr_from_json(data: dict) -> LogicExpr:
    op = data.get("op")
    if op == "lit":
        return Literal(int(data["region"]))
    if op == "and":
        return conjunction(expr_from_json(c) for c in data["children"])
    if op == "or":
        return disjunction(expr_from_json(c) for c in data["children"])
    if op == "true":
        return TRUE
    raise ValueError(f"unknown expression op {op!r}")
