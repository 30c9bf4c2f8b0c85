"""
Relation libraries: the sorting relations of the quicksort derivation and a few basic ones.

Arrays are tuples indexed from 1. Index ranges in sortedness conditions are
clipped to the array bounds.
"""

from __future__ import annotations

from collections import Counter
from typing import Any, Callable, Dict, Mapping, Tuple

from ..errors import UnknownRulePayload
from ..interp.semantics import DataSem
from ..interp.values import is_defined
from .relations import Library, RelContext, Relation, RelationFactory, data


def _defined(*values: Any) -> bool:
    return all(is_defined(v) for v in values)


def perm(before: Any, after: Any) -> bool:
    return _defined(before, after) and Counter(before) == Counter(after)


def sorted_between(array: Tuple[int, ...], low: int, high: int) -> bool:
    """``∀ij (low ≤ i < j ≤ high ⊃ A[i] ≤ A[j])`` over the indices the array has."""
    low, high = max(low, 1), min(high, len(array))
    return all(array[i - 1] <= array[i] for i in range(low, high))


def _unchanged(*sems: Any) -> bool:
    return all(data(s).init == data(s).fin and is_defined(data(s).fin) for s in sems)


def r_perm(ctx: RelContext, a: Any) -> bool:
    return perm(data(a).init, data(a).fin)


def r_bdry(ctx: RelContext, x: Any, y: Any) -> bool:
    return _unchanged(x, y)


def r_split(ctx: RelContext, a: Any, p: Any, q: Any, r: Any) -> bool:
    array, lo, mid, hi = data(a).fin, data(p).init, data(q).fin, data(r).init
    if not _defined(array, lo, mid, hi):
        return False
    left = [array[i - 1] for i in range(max(lo, 1), min(mid, len(array)) + 1)]
    right = [array[j - 1] for j in range(max(mid + 1, 1), min(hi, len(array)) + 1)]
    return not left or not right or max(left) <= min(right)


def r_part(ctx: RelContext, a: Any, p: Any, q: Any, r: Any) -> bool:
    if not (r_perm(ctx, a) and r_bdry(ctx, p, r) and _defined(data(q).fin)):
        return False
    return data(p).init <= data(q).fin < data(r).init and r_split(ctx, a, p, q, r)


def r_sort(ctx: RelContext, a: Any, low: int, high: int) -> bool:
    fin = data(a).fin
    return is_defined(fin) and sorted_between(fin, low, high)


def r_1(ctx: RelContext, a: Any, p: Any, q: Any) -> bool:
    return r_perm(ctx, a) and r_bdry(ctx, p, q) and r_sort(ctx, a, data(p).init, data(q).init)


def _less(p: Any, r: Any) -> bool:
    return bool(data(p).init < data(r).init)


def r_2(ctx: RelContext, a: Any, p: Any, q: Any, r: Any) -> bool:
    return not _less(p, r) or r_part(ctx, a, p, q, r)


def r_3(ctx: RelContext, a: Any, p: Any, q: Any, r: Any) -> bool:
    return not _less(p, r) or (r_part(ctx, a, p, q, r) and r_sort(ctx, a, data(p).init, data(q).fin))


def r_4(ctx: RelContext, a: Any, p: Any, q: Any, r: Any) -> bool:
    return not _less(p, r) or r_1(ctx, a, p, r)


def r_5(ctx: RelContext, a: Any, p: Any, q: Any, r: Any) -> bool:
    return r_1(ctx, a, p, r)


def sorts_correctly(ctx: RelContext, proc: Any, bound: int | None) -> bool:
    """``∀A'p'q' ((q'−p') ≤ k ∧ Q(A',p',q') ⊃ R_1(A',p',q'))``; no bound when ``bound`` is None."""
    key = ("sorts", proc, bound)
    if key in ctx.memo:
        return ctx.memo[key]
    verdict = True
    for args in ctx.argument_space(proc.sig):
        array, p, q = args
        if bound is not None and q - p > bound:
            continue
        outputs = ctx.call(proc, args)
        if outputs is None:
            continue
        sems = (data_pair(array, outputs[0]), data_pair(p, p), data_pair(q, q))
        if not r_1(ctx, *sems):
            verdict = False
            break
    ctx.memo[key] = verdict
    return verdict


def data_pair(init: Any, fin: Any) -> DataSem:
    return DataSem(init, fin)


def _width(p: Any, r: Any) -> int:
    return data(r).init - data(p).init


def quicksort_relations() -> Dict[str, RelationFactory]:
    """The relations of the quicksort correctness derivation.

    Parameterised entries take the recursion bound k. ``R1k``..``R5k`` are the
    bounded forms used inside the induction, ``Rtailk`` and ``R4ck`` describe
    the right-hand recursive call and the conditional.
    """

    def fixed(name: str, params: str, predicate: Callable[..., bool]) -> RelationFactory:
        return lambda: Relation(name, tuple(params.split()), predicate)

    def bounded(name: str, params: str, predicate: Callable[..., bool]) -> RelationFactory:
        def factory(k: int) -> Relation:
            return Relation(name, tuple(params.split()), lambda ctx, *s: predicate(ctx, k, *s), args=(k,))

        return factory

    def r1k(ctx: RelContext, k: int, a: Any, p: Any, q: Any, qs: Any) -> bool:
        if sorts_correctly(ctx, qs, k) and _width(p, q) <= k:
            return r_1(ctx, a, p, q)
        return True

    def r2k(ctx: RelContext, k: int, a: Any, p: Any, q: Any, r: Any) -> bool:
        return _width(p, r) > k + 1 or r_2(ctx, a, p, q, r)

    def r3k(ctx: RelContext, k: int, a: Any, p: Any, q: Any, r: Any, qs: Any) -> bool:
        if sorts_correctly(ctx, qs, k) and _width(p, r) <= k + 1:
            return r_3(ctx, a, p, q, r)
        return True

    def r4k(ctx: RelContext, k: int, a: Any, p: Any, q: Any, r: Any, qs: Any) -> bool:
        if sorts_correctly(ctx, qs, k) and _width(p, r) <= k + 1:
            return r_4(ctx, a, p, q, r)
        return True

    def r4ck(ctx: RelContext, k: int, x: Any, a: Any, p: Any, q: Any, r: Any, qs: Any) -> bool:
        if data(x).init is True:
            return r4k(ctx, k, a, p, q, r, qs)
        return _unchanged(a, p, r)

    def r5k(ctx: RelContext, k: int, a: Any, p: Any, r: Any, qs: Any) -> bool:
        if not _less(p, r) and not _unchanged(a):
            return False
        if sorts_correctly(ctx, qs, k) and _width(p, r) <= k + 1:
            return r_1(ctx, a, p, r)
        return True

    def rtailk(ctx: RelContext, k: int, a: Any, q: Any, y: Any, r: Any, qs: Any) -> bool:
        if not (_unchanged(q, r) and _defined(data(y).fin) and data(y).fin == data(q).init + 1):
            return False
        if sorts_correctly(ctx, qs, k) and data(r).init - data(y).fin <= k:
            return r_perm(ctx, a) and r_sort(ctx, a, data(y).fin, data(r).init)
        return True

    def rqsk(ctx: RelContext, k: int, qs: Any) -> bool:
        return sorts_correctly(ctx, qs, k)

    def r_inc(ctx: RelContext, x: Any, y: Any) -> bool:
        return _unchanged(x) and data(y).fin == data(x).init + 1

    def r_lt(ctx: RelContext, p: Any, r: Any, x: Any) -> bool:
        return _unchanged(p, r) and data(x).fin == (data(p).init < data(r).init)

    return {
        "R_perm": fixed("R_perm", "A", r_perm),
        "R_bdry": fixed("R_bdry", "x y", r_bdry),
        "R_split": fixed("R_split", "A p q r", r_split),
        "R_part": fixed("R_part", "A p q r", r_part),
        "R_1": fixed("R_1", "A p q", r_1),
        "R_2": fixed("R_2", "A p q r", r_2),
        "R_3": fixed("R_3", "A p q r", r_3),
        "R_4": fixed("R_4", "A p q r", r_4),
        "R_5": fixed("R_5", "A p q r", r_5),
        "R_qs": fixed("R_qs", "Q", lambda ctx, qs: sorts_correctly(ctx, qs, None)),
        "R_inc": fixed("R_inc", "x y", r_inc),
        "R_lt": fixed("R_lt", "p r x", r_lt),
        "Rqs": bounded("Rqs", "Q", rqsk),
        "R1k": bounded("R1k", "A p q Q", r1k),
        "R2k": bounded("R2k", "A p q r", r2k),
        "R3k": bounded("R3k", "A p q r Q", r3k),
        "R4k": bounded("R4k", "A p q r Q", r4k),
        "R4ck": bounded("R4ck", "x A p q r Q", r4ck),
        "R5k": bounded("R5k", "A p r Q", r5k),
        "Rtailk": bounded("Rtailk", "A q y r Q", rtailk),
    }


def basic_relations() -> Dict[str, RelationFactory]:
    """Small relations over integers for examples and tests."""

    def step(ctx: RelContext, x: Any, n: int) -> bool:
        sem = data(x)
        return _defined(sem.init, sem.fin) and sem.fin == sem.init + n

    def both_incremented(ctx: RelContext, x: Any, y: Any) -> bool:
        return step(ctx, x, 1) and step(ctx, y, 1)

    def successor(ctx: RelContext, x: Any, y: Any) -> bool:
        return _unchanged(x) and data(y).fin == data(x).init + 1

    def equal_fin(ctx: RelContext, x: Any, y: Any) -> bool:
        return data(x).fin == data(y).fin

    def ticked(ctx: RelContext, psi: Any) -> bool:
        return data(psi).fin == data(psi).init + 1

    return {
        "true": lambda: Relation("true", (), lambda ctx, *s: True),
        "incremented": lambda: Relation("incremented", ("x",), lambda ctx, x: step(ctx, x, 1)),
        "plus2": lambda: Relation("plus2", ("x",), lambda ctx, x: step(ctx, x, 2)),
        "both_incremented": lambda: Relation("both_incremented", ("x", "y"), both_incremented),
        "successor": lambda: Relation("successor", ("x", "y"), successor),
        "unchanged": lambda: Relation("unchanged", ("x",), lambda ctx, x: _unchanged(x)),
        "equal_fin": lambda: Relation("equal_fin", ("x", "y"), equal_fin),
        "ticked": lambda: Relation("ticked", ("psi",), ticked, psi_aware=True),
    }


LIBRARIES: Mapping[str, Callable[[], Dict[str, RelationFactory]]] = {
    "quicksort": quicksort_relations,
    "basic": basic_relations,
}


def load_libraries(*names: str) -> Library:
    """Merge named libraries; later names win on clashes."""
    merged: Dict[str, RelationFactory] = {}
    for name in names or tuple(LIBRARIES):
        if name not in LIBRARIES:
            raise UnknownRulePayload(f"unknown relation library {name}")
        merged.update(LIBRARIES[name]())
    return merged
