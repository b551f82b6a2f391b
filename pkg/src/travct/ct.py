"""Completeness thresholds for the array size of Trav instances.

For ``for i in [L : s-R] do !a[i+Z]`` the loop is empty while ``s < L+R``
and otherwise reads the contiguous range ``L+Z .. s-R+Z``. Both ends move
with ``s`` (or not at all) in lockstep with the bounds ``0`` and ``s``, so
once ``s >= max(L+R, 0)`` safety no longer depends on ``s``. Checking that
single size therefore decides safety for every size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .interp import MemError, run_at_size, safe_at_size
from .lang import TravInstance

NATURALS = "X = naturals (all array sizes s >= 0)"


@dataclass(frozen=True)
class CtSet:
    sizes: tuple[int, ...]
    domain_note: str = NATURALS

    def __post_init__(self):
        sizes = tuple(sorted(set(self.sizes)))
        if any(not isinstance(n, int) or n < 0 for n in sizes):
            raise ValueError("CT members must be natural numbers")
        object.__setattr__(self, "sizes", sizes)

    def __iter__(self):
        return iter(self.sizes)

    def __len__(self):
        return len(self.sizes)


@dataclass(frozen=True)
class SafeForAllSizes:
    checked_sizes: CtSet


@dataclass(frozen=True)
class UnsafeAt:
    size: int
    outcome: MemError


UnboundedVerdict = Union[SafeForAllSizes, UnsafeAt]


@dataclass(frozen=True)
class OracleReport:
    candidate: CtSet
    horizon: int
    by_candidate: bool
    by_brute: bool
    unsafe_sizes: tuple[int, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return self.by_candidate == self.by_brute


def derive_ct(t: TravInstance) -> CtSet:
    return CtSet((max(t.L + t.R, 0),))


def min_oracle_horizon(t: TravInstance) -> int:
    return abs(t.L) + abs(t.R) + abs(t.Z) + 2


def verify_ct_oracle(t: TravInstance, candidate: CtSet, horizon: int) -> OracleReport:
    """Compare the candidate's verdict with brute force over ``[0, horizon]``.

    The candidate passes only if both agree, which is stronger than the
    one-way threshold requirement: it also makes an "unsafe" answer sound.
    """
    if len(candidate) == 0:
        raise ValueError("candidate CT must be nonempty")
    if horizon < max(candidate.sizes):
        raise ValueError(f"horizon {horizon} is below the largest candidate size")
    if horizon < min_oracle_horizon(t):
        raise ValueError(f"horizon {horizon} is below {min_oracle_horizon(t)} "
                         f"(|L|+|R|+|Z|+2) for {t}")
    program = t.program()
    safety = {n: safe_at_size(program, n) for n in range(horizon + 1)}
    return OracleReport(
        candidate=candidate,
        horizon=horizon,
        by_candidate=all(safety[n] for n in candidate.sizes),
        by_brute=all(safety.values()),
        unsafe_sizes=tuple(n for n, ok in safety.items() if not ok),
    )


def unbounded_verdict(t: TravInstance) -> UnboundedVerdict:
    ct = derive_ct(t)
    program = t.program()
    for size in ct.sizes:
        outcome = run_at_size(program, size).outcome
        if isinstance(outcome, MemError):
            return UnsafeAt(size, outcome)
    return SafeForAllSizes(ct)


def closed_form_safety(t: TravInstance) -> bool:
    """First access non-negative and last access strictly below ``s``."""
    return t.L + t.Z >= 0 and t.Z < t.R
