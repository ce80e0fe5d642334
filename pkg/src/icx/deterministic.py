"""Exact optimal deterministic IC inspection scheme for monotone inspection costs.

The search space collapses to a quadratic candidate list: the zero-payment
scheme on the best free action, and, for each action i worth incentivizing
(f(i) > c(i) > 0), the self-inspection scheme at the break-even payment
c(i)/f(i) plus schemes at each critical payment where the agent becomes
indifferent between i and a cheaper action j.  At each candidate payment the
inspected set is forced: exactly the actions the agent would strictly prefer
if left uninspected.

Set membership uses strict inequalities on the input values.  Since every
binary float is an exact rational, the comparisons are done in Fraction
arithmetic: no tolerance, no boundary ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import (ActionId, InspectionScheme, Instance, ValidationError,
                    deterministic_scheme, is_IC)

IC_ASSERT_TOL = 1e-12


@dataclass(frozen=True)
class DetCandidate:
    """One enumerated deterministic scheme with its principal utility."""

    suggested: ActionId
    alpha: float
    inspected: frozenset[ActionId]
    utility: float
    provenance: str  # "zero_cost" | "self_inspect" | "full_set" | "pair_set:<j>"

    def scheme(self) -> InspectionScheme:
        return deterministic_scheme(self.suggested, self.alpha, self.inspected)


def _crit(ci: Fraction, cj: Fraction, fi: Fraction, fj: Fraction) -> Fraction:
    """Payment equalizing the agent's utility between i and an uninspected j."""
    return (ci - cj) / (fi - fj)


def candidate_sets(inst: Instance, i: ActionId):
    """The inspection sets attached to action i's candidate payments.

    Returns (A_i, S_i, {j: S_ij}) where A_i holds the lower-f actions whose
    critical payment exceeds the break-even payment c(i)/f(i); S_i is what
    must be inspected at payment c(i)/f(i); S_ij what must be inspected at
    the critical payment for j in A_i.
    """
    fi, ci = Fraction(inst.f(i)), Fraction(inst.c(i))
    if not fi > ci > 0:
        raise ValidationError(f"candidate_sets requires f({i}) > c({i}) > 0")
    break_even = ci / fi

    others = [a.id for a in inst.actions if a.id != i]
    fr = {j: (Fraction(inst.c(j)), Fraction(inst.f(j))) for j in others}

    A_i = {
        j for j in others
        if fr[j][1] < fi and _crit(ci, fr[j][0], fi, fr[j][1]) > break_even
    }
    S_i = A_i | {
        j for j in others
        if fr[j][1] >= fi and fr[j][1] * break_even > fr[j][0]
    }
    S_ij: dict[ActionId, frozenset[ActionId]] = {}
    for j in sorted(A_i, key=inst.index):
        crit_j = _crit(ci, fr[j][0], fi, fr[j][1])
        low = {
            jp for jp in A_i
            if _crit(ci, fr[jp][0], fi, fr[jp][1]) > crit_j
        }
        high = {
            jp for jp in others
            if fr[jp][1] >= fi and crit_j * (fr[jp][1] - fi) > fr[jp][0] - ci
        }
        S_ij[j] = frozenset(low | high)
    return frozenset(A_i), frozenset(S_i), S_ij


def solve_deterministic(inst: Instance):
    """Enumerate all candidate deterministic schemes and return the best.

    Returns (best, candidates).  The best candidate is re-checked IC; a
    failure indicates a solver bug and raises.  Issues at most n^2 value
    queries (one per distinct inspected set per suggestion, via a per-solve
    memo).
    """
    memo: dict[int, float] = {0: 0.0}

    def v(ids: frozenset[ActionId]) -> float:
        mask = inst.mask_of(ids)
        if mask not in memo:
            memo[mask] = inst.cost_fn.value(mask)
        return memo[mask]

    candidates: list[DetCandidate] = []

    free = [a for a in inst.actions if a.cost == 0.0]
    best_free = max(free, key=lambda a: (a.prob, -inst.index(a.id)))
    candidates.append(DetCandidate(best_free.id, 0.0, frozenset(), best_free.prob, "zero_cost"))

    for a in inst.actions:
        i = a.id
        if not a.prob > a.cost > 0.0:
            continue
        A_i, S_i, S_ij = candidate_sets(inst, i)
        break_even = Fraction(a.cost) / Fraction(a.prob)
        alpha0 = float(break_even)
        candidates.append(DetCandidate(
            i, alpha0, frozenset([i]), (1.0 - alpha0) * a.prob - v(frozenset([i])),
            "self_inspect"))
        candidates.append(DetCandidate(
            i, alpha0, S_i, (1.0 - alpha0) * a.prob - v(S_i), "full_set"))
        for j in sorted(A_i, key=inst.index):
            crit = _crit(Fraction(a.cost), Fraction(inst.c(j)),
                         Fraction(a.prob), Fraction(inst.f(j)))
            if crit > 1:
                # No valid payment can leave j uninspected; the schemes this
                # candidate would dominate do not exist.
                continue
            alpha = float(crit)
            candidates.append(DetCandidate(
                i, alpha, S_ij[j], (1.0 - alpha) * a.prob - v(S_ij[j]), f"pair_set:{j}"))

    best = max(candidates,
               key=lambda c: (c.utility, -len(c.inspected), -c.alpha, -inst.index(c.suggested)))
    if not is_IC(inst, best.scheme(), IC_ASSERT_TOL):
        raise AssertionError(
            f"solver bug: returned candidate {best} fails the IC check")
    return best, candidates
