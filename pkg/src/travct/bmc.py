"""Bounded model checking over array sizes ``0..S`` and unwinding depth ``D``.

Unwinding is realised by bounded interpretation: each loop entry runs at
most ``D`` iterations. For this loop-only language that is observationally
the same as unrolling the loop into a formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .interp import ExecConfig, MemError, default_budget, execute, run_at_size
from .lang import Program

UNLIMITED = None


@dataclass(frozen=True)
class BmcConfig:
    size_bound: int
    unwind_depth: Optional[int] = UNLIMITED

    def __post_init__(self):
        if not isinstance(self.size_bound, int) or self.size_bound < 0:
            raise ValueError(f"size_bound must be a natural number, got {self.size_bound!r}")
        if self.unwind_depth is not None and (
                not isinstance(self.unwind_depth, int) or self.unwind_depth < 0):
            raise ValueError(f"unwind_depth must be a natural number or UNLIMITED, "
                             f"got {self.unwind_depth!r}")


@dataclass(frozen=True)
class NoErrorWithinBounds:
    sizes_checked: tuple[int, ...]
    unwinding_complete: bool

    @property
    def is_proof_within_bounds(self) -> bool:
        return self.unwinding_complete


@dataclass(frozen=True)
class CounterExample:
    size: int
    outcome: MemError


BoundedVerdict = Union[NoErrorWithinBounds, CounterExample]


def check_bounded(p: Program, cfg: BmcConfig) -> BoundedVerdict:
    """Check sizes ``0..S`` in ascending order; return the first counterexample.

    Each counterexample found this way is a real bug; the absence of one
    says nothing about sizes above ``S`` or iterations past ``D``.
    """
    complete = True
    for size in range(cfg.size_bound + 1):
        result = run_at_size(p, size, cfg.unwind_depth)
        if isinstance(result.outcome, MemError):
            return CounterExample(size, result.outcome)
        if result.truncated:
            complete = False
    return NoErrorWithinBounds(tuple(range(cfg.size_bound + 1)), complete)


def replay(p: Program, verdict: BoundedVerdict) -> bool:
    """Re-run a counterexample without any unwinding limit and compare."""
    if not isinstance(verdict, CounterExample):
        raise ValueError("replay requires a CounterExample verdict")
    expected = verdict.outcome
    outcome = execute(p, ExecConfig(verdict.size, default_budget(p, verdict.size))).outcome
    return (isinstance(outcome, MemError)
            and outcome.iteration == expected.iteration
            and outcome.index == expected.index
            and outcome.size == expected.size == verdict.size)
