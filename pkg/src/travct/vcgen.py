"""Memory-safety verification conditions for Trav instances.

A VC is a small linear-integer-arithmetic formula over the free size
variable ``s`` and at most one bound variable ``i``. Terms reuse the
language's expression nodes, so they print the way the program reads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Union

from .interp import eval_expr
from .lang import Add, Expr, IntConst, Sub, TravInstance, Var, linearize, render_expr

SIZE_VAR = "s"
INDEX_VAR = "i"

Relation = Literal["<=", "<", "=", ">=", ">"]

_RELATIONS = {
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    "=": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


@dataclass(frozen=True)
class LinearAtom:
    lhs: Expr
    op: Relation
    rhs: Expr

    def __post_init__(self):
        if self.op not in _RELATIONS:
            raise ValueError(f"unknown relation {self.op!r}")
        for term in (self.lhs, self.rhs):
            coeffs, _ = linearize(term)
            if not set(coeffs) <= {SIZE_VAR, INDEX_VAR}:
                raise ValueError(f"atom terms may only mention {SIZE_VAR} and {INDEX_VAR}")


@dataclass(frozen=True)
class Atom:
    atom: LinearAtom


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    premise: "Formula"
    conclusion: "Formula"


@dataclass(frozen=True)
class ForallI:
    """``forall i in [lower, upper]. body``, range inclusive."""

    lower: Expr
    upper: Expr
    body: "Formula"


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


Formula = Union[Atom, And, Or, Implies, ForallI, TrueF, FalseF]


def atom(lhs: Expr, op: Relation, rhs: Expr) -> Atom:
    return Atom(LinearAtom(lhs, op, rhs))


def gen_memsafe_vc(t: TravInstance) -> Formula:
    """Every access executed at size ``s`` is in ``[0, s)``.

    Quantifies over executed iterations only, so the formula is exactly as
    strong as the program's behaviour at each size.
    """
    index = t.index_expr(INDEX_VAR)
    return ForallI(IntConst(t.L), t.upper_expr(SIZE_VAR),
                   And((atom(IntConst(0), "<=", index),
                        atom(index, "<", Var(SIZE_VAR)))))


# ---------------------------------------------------------------------------
# Evaluation

def _free_in(f: Formula, bound: frozenset) -> set[str]:
    if isinstance(f, Atom):
        names = set(linearize(f.atom.lhs)[0]) | set(linearize(f.atom.rhs)[0])
        return names - bound
    if isinstance(f, (And, Or)):
        return set().union(*(_free_in(g, bound) for g in f.args))
    if isinstance(f, Implies):
        return _free_in(f.premise, bound) | _free_in(f.conclusion, bound)
    if isinstance(f, ForallI):
        outer = set(linearize(f.lower)[0]) | set(linearize(f.upper)[0])
        return (outer - bound) | _free_in(f.body, bound | {INDEX_VAR})
    return set()


def free_variables(f: Formula) -> set[str]:
    return _free_in(f, frozenset())


def _holds(f: Formula, env: dict[str, int]) -> bool:
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Atom):
        a = f.atom
        return _RELATIONS[a.op](eval_expr(a.lhs, env), eval_expr(a.rhs, env))
    if isinstance(f, And):
        return all(_holds(g, env) for g in f.args)
    if isinstance(f, Or):
        return any(_holds(g, env) for g in f.args)
    if isinstance(f, Implies):
        return not _holds(f.premise, env) or _holds(f.conclusion, env)
    if isinstance(f, ForallI):
        lo = eval_expr(f.lower, env)
        hi = eval_expr(f.upper, env)
        return all(_holds(f.body, {**env, INDEX_VAR: k}) for k in range(lo, hi + 1))
    raise TypeError(f"not a formula: {f!r}")


def eval_vc(f: Formula, size: int) -> bool:
    """Decide ``f`` at ``s = size`` by enumerating every quantified index."""
    if size < 0:
        raise ValueError("size must be a natural number")
    extra = free_variables(f) - {SIZE_VAR}
    if extra:
        raise ValueError(f"formula has free variables other than {SIZE_VAR}: {sorted(extra)}")
    return _holds(f, {SIZE_VAR: size})


# ---------------------------------------------------------------------------
# Printing

_ASCII_OPS = {"<=": "<=", "<": "<", "=": "=", ">=": ">=", ">": ">"}


def to_text(f: Formula) -> str:
    """ASCII rendering, e.g. ``forall i in [0, s-2]. 0 <= i+2 /\\ i+2 < s``."""
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Atom):
        a = f.atom
        return f"{render_expr(a.lhs)} {_ASCII_OPS[a.op]} {render_expr(a.rhs)}"
    if isinstance(f, And):
        return " /\\ ".join(_paren(g) for g in f.args) if f.args else "true"
    if isinstance(f, Or):
        return " \\/ ".join(_paren(g) for g in f.args) if f.args else "false"
    if isinstance(f, Implies):
        return f"{_paren(f.premise)} ==> {_paren(f.conclusion)}"
    if isinstance(f, ForallI):
        return (f"forall {INDEX_VAR} in [{render_expr(f.lower)}, {render_expr(f.upper)}]. "
                f"{to_text(f.body)}")
    raise TypeError(f"not a formula: {f!r}")


def _paren(f: Formula) -> str:
    text = to_text(f)
    return text if isinstance(f, (Atom, TrueF, FalseF)) else f"({text})"


# ---------------------------------------------------------------------------
# SMT-LIB2 export

def smt_term(e: Expr) -> str:
    if isinstance(e, IntConst):
        return str(e.value) if e.value >= 0 else f"(- {-e.value})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Add):
        return f"(+ {smt_term(e.left)} {smt_term(e.right)})"
    if isinstance(e, Sub):
        return f"(- {smt_term(e.left)} {smt_term(e.right)})"
    raise TypeError(f"not an expression: {e!r}")


def smt_formula(f: Formula) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Atom):
        a = f.atom
        return f"({a.op} {smt_term(a.lhs)} {smt_term(a.rhs)})"
    if isinstance(f, And):
        return "(and " + " ".join(smt_formula(g) for g in f.args) + ")" if f.args else "true"
    if isinstance(f, Or):
        return "(or " + " ".join(smt_formula(g) for g in f.args) + ")" if f.args else "false"
    if isinstance(f, Implies):
        return f"(=> {smt_formula(f.premise)} {smt_formula(f.conclusion)})"
    if isinstance(f, ForallI):
        guard = (f"(and (<= {smt_term(f.lower)} {INDEX_VAR}) "
                 f"(<= {INDEX_VAR} {smt_term(f.upper)}))")
        return f"(forall (({INDEX_VAR} Int)) (=> {guard} {smt_formula(f.body)}))"
    raise TypeError(f"not a formula: {f!r}")


def export_smt(f: Formula, at_size: Optional[int] = None, comment: str = "") -> str:
    """SMT-LIB2 query asserting the negation of ``f``.

    ``sat`` means a size violating the VC exists; ``unsat`` means the VC is
    valid. With ``at_size`` the query pins ``s``; otherwise it ranges over
    all naturals.
    """
    if at_size is not None and at_size < 0:
        raise ValueError("at_size must be a natural number")
    lines = ["(set-logic LIA)"]
    if comment:
        lines.extend(f"; {line}" for line in comment.splitlines())
    lines.append(f"(declare-const {SIZE_VAR} Int)")
    if at_size is None:
        lines.append(f"(assert (>= {SIZE_VAR} 0))")
    else:
        lines.append(f"(assert (= {SIZE_VAR} {at_size}))")
    lines.append(f"(assert (not {smt_formula(f)}))")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"
