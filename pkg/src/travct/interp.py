"""Concrete execution at a fixed array size.

The heap is just the array length: ``!a[e]`` checks ``0 <= e < size`` and
discards the (nonexistent) value. Execution stops at the first violation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .lang import Add, ForRange, HeapRead, IntConst, Program, Sub, Var, recognize_trav

# Used when a program is not a Trav instance and no budget is given.
GENERIC_STEP_BUDGET = 1_000_000


@dataclass(frozen=True)
class ExecConfig:
    size: int
    step_budget: int

    def __post_init__(self):
        if not isinstance(self.size, int) or self.size < 0:
            raise ValueError(f"size must be a natural number, got {self.size!r}")
        if not isinstance(self.step_budget, int) or self.step_budget < 1:
            raise ValueError(f"step_budget must be >= 1, got {self.step_budget!r}")


@dataclass(frozen=True)
class Access:
    iteration: int  # global 0-based loop iteration; -1 outside any loop
    index: int


@dataclass(frozen=True)
class Safe:
    iterations: int
    accesses: tuple[Access, ...]


@dataclass(frozen=True)
class MemError:
    iteration: int
    index: int
    size: int
    prior_accesses: tuple[Access, ...]


@dataclass(frozen=True)
class BudgetExhausted:
    iterations: int


ExecOutcome = Union[Safe, MemError, BudgetExhausted]


class BudgetExhaustedError(RuntimeError):
    pass


class _MemFault(Exception):
    def __init__(self, iteration, index):
        self.iteration = iteration
        self.index = index


class _OutOfBudget(Exception):
    pass


class _Cut(Exception):
    pass


def eval_expr(e, env: dict[str, int]) -> int:
    if isinstance(e, IntConst):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Add):
        return eval_expr(e.left, env) + eval_expr(e.right, env)
    if isinstance(e, Sub):
        return eval_expr(e.left, env) - eval_expr(e.right, env)
    raise TypeError(f"not an expression: {e!r}")


@dataclass(frozen=True)
class Execution:
    """An outcome plus whether an unwinding limit cut any loop short."""

    outcome: ExecOutcome
    truncated: bool


def execute(p: Program, cfg: ExecConfig, unwind: Optional[int] = None) -> Execution:
    """Run ``p`` with at most ``unwind`` iterations per loop entry.

    A loop needing more than ``unwind`` iterations runs that many and then
    the whole path is cut, so anything observed is a prefix of the real
    execution. ``unwind=None`` runs every loop to completion. Truncation is
    recorded, not treated as an error.
    """
    if unwind is not None and unwind < 0:
        raise ValueError("unwind must be >= 0 or None")
    size = cfg.size
    accesses: list[Access] = []
    iterations = 0
    truncated = False
    current = -1

    def run_block(body, env):
        nonlocal iterations, truncated, current
        for stmt in body:
            if isinstance(stmt, HeapRead):
                idx = eval_expr(stmt.index, env)
                if not 0 <= idx < size:
                    raise _MemFault(current, idx)
                accesses.append(Access(current, idx))
            elif isinstance(stmt, ForRange):
                lo = eval_expr(stmt.lo, env)
                hi = eval_expr(stmt.hi, env)
                count = max(0, hi - lo + 1)
                cut = unwind is not None and count > unwind
                enclosing = current
                for k in range(unwind if cut else count):
                    if iterations >= cfg.step_budget:
                        raise _OutOfBudget
                    current = iterations
                    iterations += 1
                    run_block(stmt.body, {**env, stmt.loop_var: lo + k})
                if cut:
                    truncated = True
                    raise _Cut
                current = enclosing
            else:
                raise TypeError(f"not a statement: {stmt!r}")

    try:
        run_block(p.body, {p.size_param: size})
    except _MemFault as fault:
        return Execution(MemError(fault.iteration, fault.index, size, tuple(accesses)), truncated)
    except _OutOfBudget:
        return Execution(BudgetExhausted(iterations), truncated)
    except _Cut:
        pass
    return Execution(Safe(iterations, tuple(accesses)), truncated)


def run(p: Program, cfg: ExecConfig) -> ExecOutcome:
    return execute(p, cfg).outcome


def default_budget(p: Program, size: int) -> int:
    trav = recognize_trav(p)
    if trav:
        return size + abs(trav.L) + abs(trav.R) + 2
    return GENERIC_STEP_BUDGET


def run_at_size(p: Program, size: int, unwind: Optional[int] = None) -> Execution:
    """:func:`execute` with the default budget; raises if the budget runs out."""
    result = execute(p, ExecConfig(size, default_budget(p, size)), unwind)
    if isinstance(result.outcome, BudgetExhausted):
        raise BudgetExhaustedError(
            f"step budget exhausted after {result.outcome.iterations} iterations at size {size}")
    return result


def safe_at_size(p: Program, size: int) -> bool:
    return isinstance(run_at_size(p, size).outcome, Safe)
