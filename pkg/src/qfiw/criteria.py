"""Partition bounds on the QFI and the resulting entanglement verdicts.

Given per-block caps ``F_alpha >= F(rho_alpha, A_alpha)``, a state that factorizes
along a partition ``{alpha_1, ..., alpha_t}`` has ``F(rho, A) <= sum_l F_alpha_l``.
Two readings of the bound over a family of partitions are offered:

``paper``
    the minimum over the family, as the published criteria state it. This is
    what reproduces the closed forms ``v(u+1)^2 + (k-v)u^2`` and ``k^2 + N - k``.
``conservative``
    the maximum over the family. This is what the per-partition argument
    certifies for every member of the class regardless of which partition
    it factorizes along.

For producibility the ``paper`` family is "all blocks of size <= k, at least one
of size exactly k"; the ``conservative`` family drops the second condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .errors import RangeError
from .linalg import BOUND_TOL

SEPARABILITY = "separability"
PRODUCIBILITY = "producibility"
CRITERIA = (SEPARABILITY, PRODUCIBILITY)
MODES = ("paper", "conservative")

_CRITERION_ALIASES = {"sep": SEPARABILITY, "prod": PRODUCIBILITY}


def normalize_criterion(name: str) -> str:
    name = _CRITERION_ALIASES.get(name, name)
    if name not in CRITERIA:
        raise RangeError(f"unknown criterion {name!r}")
    return name


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise RangeError(f"unknown bound mode {mode!r}; expected one of {MODES}")


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks of 1-based sites covering ``1..n``."""

    parts: tuple[frozenset, ...]

    def __post_init__(self):
        parts = tuple(frozenset(int(i) for i in p) for p in self.parts)
        if any(not p for p in parts):
            raise RangeError("partition blocks must be nonempty")
        union = frozenset().union(*parts)
        if sum(len(p) for p in parts) != len(union) or union != frozenset(range(1, len(union) + 1)):
            raise RangeError(f"blocks {parts} are not a partition of 1..N")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int:
        return sum(len(p) for p in self.parts)

    @property
    def part_sizes(self) -> tuple[int, ...]:
        return tuple(sorted((len(p) for p in self.parts), reverse=True))


@lru_cache(maxsize=None)
def _partitions(n: int, max_part: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions_exact(n: int, k: int) -> list[tuple[int, ...]]:
    """Integer partitions of ``n`` into exactly ``k`` positive parts, parts descending."""
    if not 1 <= k <= n:
        raise RangeError(f"need 1 <= k <= N, got N={n}, k={k}")
    return [p for p in _partitions(n, n - k + 1) if len(p) == k]


def partitions_bounded(n: int, max_part: int) -> list[tuple[int, ...]]:
    """Integer partitions of ``n`` with every part at most ``max_part``."""
    if max_part < 1 or n < 1:
        raise RangeError(f"need N >= 1 and maxPart >= 1, got N={n}, maxPart={max_part}")
    return list(_partitions(n, max_part))


def _check_sep(n: int, k: int) -> None:
    if not 2 <= k <= n:
        raise RangeError(f"k-separability needs 2 <= k <= N, got N={n}, k={k}")


def _check_prod(n: int, k: int) -> None:
    if not 1 <= k <= n - 1:
        raise RangeError(f"k-producibility needs 1 <= k <= N-1, got N={n}, k={k}")


def sep_bound(n: int, k: int, mode: str = "paper") -> int:
    """QFI bound for k-separable states with the default caps ``n_alpha**2``."""
    _check_sep(n, k)
    _check_mode(mode)
    if mode == "paper":
        u = n // k
        v = n - k * u
        return v * (u + 1) ** 2 + (k - v) * u**2
    return (n - k + 1) ** 2 + (k - 1)


def prod_bound(n: int, k: int, mode: str = "paper") -> int:
    """QFI bound for k-producible states with the default caps ``n_alpha**2``."""
    _check_prod(n, k)
    _check_mode(mode)
    if mode == "paper":
        return k * k + n - k
    return (n // k) * k * k + (n % k) ** 2


def default_cap(block) -> float:
    return float(len(block)) ** 2


@dataclass(frozen=True)
class BoundSpec:
    """What to bound: ``n`` sites, class parameter ``k``, criterion and mode.

    ``cap`` maps a block (a frozenset of 1-based sites) to its constant
    ``F_alpha``. Set ``size_only=False`` when the cap depends on which sites
    are in the block and not just how many; the engine then enumerates set
    partitions instead of integer partitions.
    """

    n: int
    k: int
    criterion: str = SEPARABILITY
    mode: str = "paper"
    cap: Callable = field(default=default_cap, compare=False)
    size_only: bool = True

    def __post_init__(self):
        object.__setattr__(self, "criterion", normalize_criterion(self.criterion))
        _check_mode(self.mode)
        if self.criterion == SEPARABILITY:
            _check_sep(self.n, self.k)
        else:
            _check_prod(self.n, self.k)

    def closed_form(self) -> int:
        if self.criterion == SEPARABILITY:
            return sep_bound(self.n, self.k, self.mode)
        return prod_bound(self.n, self.k, self.mode)


def _size_families(spec: BoundSpec) -> list[tuple[int, ...]]:
    if spec.criterion == SEPARABILITY:
        return partitions_exact(spec.n, spec.k)
    family = partitions_bounded(spec.n, spec.k)
    if spec.mode == "paper":
        family = [p for p in family if spec.k in p]
    return family


def _set_partition_extremum(spec: BoundSpec, pick) -> float:
    """Extremum of ``sum cap(block)`` over set partitions, by subset dynamic programming.

    States are (remaining sites mask, blocks still to place or a flag that a
    size-k block has been used); the lowest remaining site always opens the
    next block so each set partition is visited once.
    """
    n, k = spec.n, spec.k
    full = (1 << n) - 1
    caps: dict[int, float] = {}

    def cap(mask: int) -> float:
        if mask not in caps:
            caps[mask] = float(spec.cap(frozenset(i + 1 for i in range(n) if mask >> i & 1)))
        return caps[mask]

    @lru_cache(maxsize=None)
    def solve(mask: int, state: int) -> float:
        if mask == 0:
            if spec.criterion == SEPARABILITY:
                return 0.0 if state == 0 else math.nan
            return 0.0 if state == 1 or spec.mode == "conservative" else math.nan
        low = mask & -mask
        rest = mask ^ low
        best = math.nan
        sub = rest
        while True:
            block = sub | low
            size = block.bit_count()
            if spec.criterion == SEPARABILITY:
                nxt = state - 1
                ok = nxt >= 0
            else:
                ok = size <= k
                nxt = state | (size == k)
            if ok:
                tail = solve(mask ^ block, nxt)
                if not math.isnan(tail):
                    val = cap(block) + tail
                    best = val if math.isnan(best) else pick(best, val)
            if sub == 0:
                break
            sub = (sub - 1) & rest
        return best

    start = k if spec.criterion == SEPARABILITY else 0
    return solve(full, start)


SET_PARTITION_MAX_N = 14


def generic_bound(spec: BoundSpec) -> float:
    """``min`` (paper) or ``max`` (conservative) of ``sum_l F_alpha_l`` over the partition family."""
    pick = min if spec.mode == "paper" else max
    if spec.size_only:
        return pick(sum(spec.cap(frozenset(range(1, s + 1))) for s in part) for part in _size_families(spec))
    if spec.n > SET_PARTITION_MAX_N:
        raise RangeError(f"site-dependent caps are enumerated exactly; N <= {SET_PARTITION_MAX_N}")
    return _set_partition_extremum(spec, pick)


@dataclass(frozen=True)
class Verdict:
    f_value: float
    bound: float
    detected: bool
    claim: str
    criterion: str
    k: int
    mode: str

    def describe(self) -> str:
        if self.detected:
            return f"detected: {self.claim} (F={self.f_value:.10g} > {self.bound:.10g})"
        return f"inconclusive (F={self.f_value:.10g} <= {self.bound:.10g})"


def claim_text(criterion: str, k: int) -> str:
    if normalize_criterion(criterion) == SEPARABILITY:
        return f"{k}-nonseparable"
    return f"contains {k + 1}-partite entanglement"


def verdict(f, spec: BoundSpec, bound: float | None = None) -> Verdict:
    """One-sided test: exceeding the bound certifies the claim; staying under proves nothing."""
    value = float(getattr(f, "value", f))
    if bound is None:
        bound = generic_bound(spec) if not spec.size_only or spec.cap is not default_cap else spec.closed_form()
    detected = value > bound + BOUND_TOL
    claim = claim_text(spec.criterion, spec.k) if detected else "inconclusive"
    return Verdict(value, float(bound), detected, claim, spec.criterion, spec.k, spec.mode)
