"""
Both forms of the correspondence axiom, checked on enumerated semantics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, FrozenSet, Optional, Sequence, Tuple

from loguru import logger

from ..errors import UnknownVariable
from ..ir.substitution import free_vars
from ..ir.terms import Term, VarId
from .preconditions import pad_variables
from .varsets import var_sets

if TYPE_CHECKING:
    from ..interp.enumeration import Models
    from ..interp.semantics import Domain, Env, Fuel


@dataclass(frozen=True)
class CorrespondenceReport:
    """Outcome of both inclusion checks; ``form_a`` is None when its hypothesis fails."""

    form_a: Optional[bool]
    form_b: bool
    compared: Tuple[str, ...]
    witness: Optional["Env"] = None

    @property
    def agree(self) -> bool:
        return self.form_a is None or self.form_a == self.form_b


def _listed(term: Term, vars_: Sequence[VarId], free: FrozenSet[VarId]) -> Term:
    missing = sorted(v.name for v in free - set(vars_))
    if missing:
        raise UnknownVariable(f"variable list omits free variables {', '.join(missing)}")
    extra = [v for v in vars_ if v.is_data and not v.is_psi and v not in free]
    return pad_variables(term, extra)


def _included(smaller: FrozenSet["Env"], larger: FrozenSet["Env"], keys: FrozenSet[VarId]) -> Optional["Env"]:
    """A restriction of ``smaller`` missing from ``larger``, or None."""
    wanted = {env.restrict(keys) for env in larger}
    missing = [env for env in (e.restrict(keys) for e in smaller) if env not in wanted]
    return min(missing, key=repr) if missing else None


def check_correspondence(
    term: Term,
    xs: Sequence[VarId],
    ys: Sequence[VarId],
    domain: Optional["Domain"] = None,
    fuel: Optional["Fuel"] = None,
    models: Optional["Models"] = None,
) -> CorrespondenceReport:
    """Compare the semantics of ``[xs]P`` and ``[ys]P``.

    The first form applies when both lists give the same set of free and data
    variables and asks that every semantics of ``[ys]P`` is one of ``[xs]P``
    on those variables. The alternate form compares on the free variables and
    both data sets, restricted to the variables the two lists share.
    """
    from ..interp.enumeration import semantics_set
    from ..interp.semantics import Domain, Fuel

    domain = domain or Domain()
    fuel = fuel or Fuel()
    free = free_vars(term)
    over_x, over_y = _listed(term, xs, free), _listed(term, ys, free)
    data_x, data_y = var_sets(over_x).data, var_sets(over_y).data
    sem_x = semantics_set(over_x, domain, fuel, models)
    sem_y = semantics_set(over_y, domain, fuel, models)

    form_a: Optional[bool] = None
    witness = None
    if free | data_x == free | data_y:
        witness = _included(sem_y, sem_x, frozenset(free | data_x))
        form_a = witness is None
    keys = frozenset((free | data_x | data_y) & set(xs) & set(ys))
    missing_b = _included(sem_y, sem_x, keys)
    report = CorrespondenceReport(form_a, missing_b is None, tuple(sorted(v.name for v in keys)), witness or missing_b)
    if not report.agree:
        logger.warning(f"Correspondence forms disagree on {report.compared}")
    return report
