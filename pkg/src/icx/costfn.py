"""Combinatorial inspection cost functions behind a value/demand oracle interface.

Subsets of the ground set {0, ..., n-1} are represented as bitmask ints
(bit i set <=> element i in the set).  All constructors produce normalized
(value(0) == 0), monotone set functions by construction; `check_monotone`
and `check_submodular` verify these properties either exhaustively or on
seeded samples, returning a counterexample witness on failure.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from typing import Sequence

EQ_TOL = 1e-12


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bits(mask: int):
    """Yield the set bit positions of mask in ascending order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def price_of(prices: Sequence[float], mask: int) -> float:
    """Total price of a bitmask set, summed in ascending bit order.

    Shared by every demand routine so that float results are reproducible
    across implementations (tie-breaking relies on bit-identical sums).
    """
    total = 0.0
    for i in bits(mask):
        total += prices[i]
    return total


class SetFunction:
    """Value/demand oracle over subsets of {0, ..., n-1}.

    Subclasses implement `value`.  `demand` defaults to exhaustive
    enumeration (n <= 20) with deterministic tie-breaking: smaller
    cardinality first, then smaller bitmask.
    """

    n: int

    def value(self, mask: int) -> float:
        raise NotImplementedError

    def demand(self, prices: Sequence[float]) -> int:
        return demand_default(self, prices, self.n)

    def table(self) -> list[float]:
        """Materialize all 2^n values (n <= 16 guard: caller's concern)."""
        return [self.value(m) for m in range(1 << self.n)]


def demand_default(fn: SetFunction, prices: Sequence[float], n: int) -> int:
    """Exhaustive demand oracle: argmax of value(S) - price(S).

    Ties broken toward smaller cardinality, then smaller bitmask, so the
    result is deterministic and implementation-independent.
    """
    if n > 20:
        raise ValueError(f"demand_default enumerates 2^n subsets; n={n} > 20")
    if any(q < 0 for q in prices):
        raise ValueError("demand prices must be nonnegative")
    best_mask = 0
    best_obj = 0.0  # value(0) - 0
    best_pc = 0
    for mask in range(1, 1 << n):
        obj = fn.value(mask) - price_of(prices, mask)
        pc = popcount(mask)
        if obj > best_obj or (obj == best_obj and pc < best_pc):
            best_mask, best_obj, best_pc = mask, obj, pc
    return best_mask


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def _check_weights(weights: Sequence[float]) -> tuple[float, ...]:
    w = tuple(float(x) for x in weights)
    if any(x < 0 for x in w):
        raise ValueError("weights must be nonnegative")
    return w


@dataclass(frozen=True)
class Additive(SetFunction):
    """v(S) = sum of per-element weights."""

    weights: tuple[float, ...]

    def __init__(self, weights: Sequence[float]):
        object.__setattr__(self, "weights", _check_weights(weights))

    @property
    def n(self) -> int:
        return len(self.weights)

    def value(self, mask: int) -> float:
        return sum(self.weights[i] for i in bits(mask))

    def demand(self, prices: Sequence[float]) -> int:
        # Take exactly the elements with positive surplus; ties excluded
        # (matches the smaller-cardinality tie-break of demand_default).
        mask = 0
        for i, w in enumerate(self.weights):
            if w - prices[i] > 0:
                mask |= 1 << i
        return mask


@dataclass(frozen=True)
class BudgetAdditive(SetFunction):
    """v(S) = min(additive sum, cap).  Submodular for cap >= 0."""

    weights: tuple[float, ...]
    cap: float

    def __init__(self, weights: Sequence[float], cap: float):
        object.__setattr__(self, "weights", _check_weights(weights))
        if cap < 0:
            raise ValueError("cap must be nonnegative")
        object.__setattr__(self, "cap", float(cap))

    @property
    def n(self) -> int:
        return len(self.weights)

    def value(self, mask: int) -> float:
        return min(sum(self.weights[i] for i in bits(mask)), self.cap)


@dataclass(frozen=True)
class WeightedCoverage(SetFunction):
    """v(S) = total weight of universe elements covered by any member of S.

    `covers[i]` is a bitmask over universe elements {0, ..., universe-1}.
    """

    universe: int
    covers: tuple[int, ...]
    element_weights: tuple[float, ...]

    def __init__(self, universe: int, covers: Sequence[int], element_weights: Sequence[float]):
        ew = _check_weights(element_weights)
        if len(ew) != universe:
            raise ValueError("element_weights length must equal universe size")
        cv = tuple(int(c) for c in covers)
        if any(c < 0 or c >= (1 << universe) for c in cv):
            raise ValueError("cover masks out of range for universe")
        object.__setattr__(self, "universe", int(universe))
        object.__setattr__(self, "covers", cv)
        object.__setattr__(self, "element_weights", ew)

    @property
    def n(self) -> int:
        return len(self.covers)

    def value(self, mask: int) -> float:
        covered = 0
        for i in bits(mask):
            covered |= self.covers[i]
        return sum(self.element_weights[e] for e in bits(covered))


@dataclass(frozen=True)
class ConcaveCardinality(SetFunction):
    """v(S) = g(|S|) for a nondecreasing concave table g with g(0) = 0."""

    g: tuple[float, ...]

    def __init__(self, g: Sequence[float]):
        gt = tuple(float(x) for x in g)
        if not gt or gt[0] != 0.0:
            raise ValueError("cardinality table must start at g[0] = 0")
        diffs = [gt[i + 1] - gt[i] for i in range(len(gt) - 1)]
        if any(d < -EQ_TOL for d in diffs):
            raise ValueError("cardinality table must be nondecreasing")
        if any(diffs[i + 1] - diffs[i] > EQ_TOL for i in range(len(diffs) - 1)):
            raise ValueError("cardinality table must be concave (nonincreasing differences)")
        object.__setattr__(self, "g", gt)

    @property
    def n(self) -> int:
        return len(self.g) - 1

    def value(self, mask: int) -> float:
        return self.g[popcount(mask)]


@dataclass(frozen=True)
class ExplicitTable(SetFunction):
    """v(S) read from a dense table of 2^n values, indexed by bitmask.

    The interchange format for cross-checking every other constructor;
    validated normalized and monotone on load.
    """

    values: tuple[float, ...]

    def __init__(self, values: Sequence[float], validate: bool = True):
        vt = tuple(float(x) for x in values)
        n = (len(vt)).bit_length() - 1
        if len(vt) != (1 << n):
            raise ValueError("table length must be a power of two")
        if validate:
            if vt[0] != 0.0:
                raise ValueError("table not normalized: v(empty) != 0")
            for mask in range(1 << n):
                for i in range(n):
                    if not mask & (1 << i) and vt[mask | (1 << i)] < vt[mask] - EQ_TOL:
                        raise ValueError(
                            f"table not monotone at S={mask:b}, element {i}"
                        )
        object.__setattr__(self, "values", vt)

    @property
    def n(self) -> int:
        return len(self.values).bit_length() - 1

    def value(self, mask: int) -> float:
        return self.values[mask]


@dataclass(frozen=True)
class XOSClauses(SetFunction):
    """v(S) = max over additive clauses of clause(S)."""

    clauses: tuple[tuple[float, ...], ...]

    def __init__(self, clauses: Sequence[Sequence[float]]):
        cl = tuple(_check_weights(c) for c in clauses)
        if not cl:
            raise ValueError("XOS needs at least one clause")
        if len({len(c) for c in cl}) != 1:
            raise ValueError("all clauses must have the same length")
        object.__setattr__(self, "clauses", cl)

    @property
    def n(self) -> int:
        return len(self.clauses[0])

    def value(self, mask: int) -> float:
        return max(sum(c[i] for i in bits(mask)) for c in self.clauses)


# ---------------------------------------------------------------------------
# Instrumentation
# ---------------------------------------------------------------------------


@dataclass
class CountingOracle(SetFunction):
    """Transparent wrapper counting value/demand queries.

    Counters only grow; increments take a lock so instrumented functions
    stay usable under concurrent solver evaluation.
    """

    inner: SetFunction
    value_queries: int = 0
    demand_queries: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def n(self) -> int:
        return self.inner.n

    def value(self, mask: int) -> float:
        with self._lock:
            self.value_queries += 1
        return self.inner.value(mask)

    def demand(self, prices: Sequence[float]) -> int:
        with self._lock:
            self.demand_queries += 1
        return self.inner.demand(prices)


# ---------------------------------------------------------------------------
# Class-membership checkers
# ---------------------------------------------------------------------------


def _sampled_masks(rng: random.Random, n: int, count: int):
    full = (1 << n) - 1
    for _ in range(count):
        yield rng.randint(0, full)


def check_monotone(fn: SetFunction, n: int, mode: str = "exhaustive",
                   seed: int = 0, samples: int = 1000):
    """Check S <= T => v(S) <= v(T) via single-element extensions.

    Returns (True, None) or (False, (mask, element)) where adding `element`
    to `mask` strictly decreases the value.
    """
    if mode == "exhaustive":
        if n > 16:
            raise ValueError("exhaustive monotonicity check limited to n <= 16")
        vals = [fn.value(m) for m in range(1 << n)]
        for mask in range(1 << n):
            for i in range(n):
                if not mask & (1 << i) and vals[mask | (1 << i)] < vals[mask] - EQ_TOL:
                    return False, (mask, i)
        return True, None
    elif mode == "sampled":
        rng = random.Random(seed)
        for mask in _sampled_masks(rng, n, samples):
            i = rng.randrange(n)
            if mask & (1 << i):
                continue
            if fn.value(mask | (1 << i)) < fn.value(mask) - EQ_TOL:
                return False, (mask, i)
        return True, None
    raise ValueError(f"unknown mode {mode!r}")


def check_submodular(fn: SetFunction, n: int, mode: str = "exhaustive",
                     seed: int = 0, samples: int = 1000):
    """Check decreasing marginals: v(i|S) >= v(i|S+j) for all S, i,j not in S.

    Returns (True, None) or (False, (mask, i, j)) for the first violating
    nested pair found.
    """
    if mode == "exhaustive":
        if n > 16:
            raise ValueError("exhaustive submodularity check limited to n <= 16")
        vals = [fn.value(m) for m in range(1 << n)]
        for mask in range(1 << n):
            for i in range(n):
                bi = 1 << i
                if mask & bi:
                    continue
                base = vals[mask | bi] - vals[mask]
                for j in range(n):
                    bj = 1 << j
                    if j == i or mask & bj:
                        continue
                    if vals[mask | bj | bi] - vals[mask | bj] > base + EQ_TOL:
                        return False, (mask, i, j)
        return True, None
    elif mode == "sampled":
        rng = random.Random(seed)
        for mask in _sampled_masks(rng, n, samples):
            i, j = rng.randrange(n), rng.randrange(n)
            if i == j or mask & (1 << i) or mask & (1 << j):
                continue
            bi, bj = 1 << i, 1 << j
            if fn.value(mask | bj | bi) - fn.value(mask | bj) > \
                    fn.value(mask | bi) - fn.value(mask) + EQ_TOL:
                return False, (mask, i, j)
        return True, None
    raise ValueError(f"unknown mode {mode!r}")


def check_xos_pointwise(fn: SetFunction, clauses, n: int) -> bool:
    """Check a clause family certifies fn as XOS, pointwise over all 2^n sets.

    `clauses` is either a list of additive weight vectors, or any object with
    a `max_value(mask)` method (for families too large to materialize; the
    analytic max subsumes the per-clause upper bounds).
    """
    if n > 16:
        raise ValueError("pointwise XOS check limited to n <= 16")
    lazy = hasattr(clauses, "max_value")
    for mask in range(1 << n):
        v = fn.value(mask)
        if lazy:
            best = clauses.max_value(mask)
        else:
            best = 0.0
            for c in clauses:
                cv = sum(c[i] for i in bits(mask))
                if cv > v + EQ_TOL:
                    return False
                best = max(best, cv)
        if abs(best - v) > EQ_TOL:
            return False
    return True
