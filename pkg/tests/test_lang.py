import pytest
from hypothesis import given, strategies as st

from oracle import WIDE_GRID, trav_source
from travct.interp import run, ExecConfig
from travct.lang import (MAX_CONST, Add, ForRange, HeapRead, IllFormedProgram, IntConst,
                         NotTravPattern, ParseError, Program, Sub, TravInstance, Var, parse,
                         recognize_trav, render)


def test_parse_whole_array_traversal():
    p = parse("trav(a, s) { for i in [0 : s-1] do !a[i+0] }")
    assert p == Program("a", "s", (
        ForRange("i", IntConst(0), Sub(Var("s"), IntConst(1)),
                 (HeapRead("a", Add(Var("i"), IntConst(0))),)),))


def test_parse_negative_offset():
    p = parse("trav(a, s) { for i in [2 : s-3] do !a[i-1] }")
    (loop,) = p.body
    assert loop.lo == IntConst(2)
    assert loop.hi == Sub(Var("s"), IntConst(3))
    assert loop.body == (HeapRead("a", Sub(Var("i"), IntConst(1))),)


def test_missing_bang_is_error_at_access_token():
    src = "trav(a, s) { for i in [0 : s-1] do a[i] }"
    with pytest.raises(ParseError) as exc:
        parse(src)
    err = exc.value
    assert (err.line, err.column) == (1, src.index("a[i]") + 1)
    assert err.expected == {"!", "for"}


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as exc:
        parse("trav(a, s) {\n  for i in [0 : s-1]\n  !a[i] ")
    assert exc.value.line == 3
    assert "do" in exc.value.expected

@pytest.mark.parametrize("src", [
    "",
    "trav(a, a) { !a[0] }",
    "trav(a, s) { for s in [0 : 1] do !a[s] }",
    "trav(a, s) { for i in [0 : s] do for i in [0 : s] do !a[i] }",
    "trav(a, s) { for i in [0 : s] do !b[i] }",
    "trav(a, s) { for i in [0 : s] do !a[j] }",
    "trav(a, s) { for i in [0 : i] do !a[i] }",
    "trav(a, s) { !a[a] }",
    "trav(a, s) { !a[2147483648] }",
    "trav(a, s) { !a[-2147483648] }",
    "trav(a, s) { !a[i*2] }",
    "trav(a, s) { !a[0] } extra",
    "trav(a, s) { !a[- s] }",
    "trav(for, s) { !for[0] }",
    "trav(a, s) { !a[0] !a[1] }",
])
def test_rejected_sources(src):
    with pytest.raises(ParseError):
        parse(src)


def test_constant_bound_is_inclusive():
    parse(f"trav(a, s) {{ !a[{MAX_CONST}] }}")
    parse(f"trav(a, s) {{ !a[-{MAX_CONST}] }}")


def test_whitespace_insensitive():
    a = parse("trav(a,s){for i in[0:s-1]do!a[i+0]}")
    b = parse("trav ( a , s )\n{\n  for i in [ 0 : s - 1 ]\n  do ! a [ i + 0 ]\n}\n")
    assert a == b


def test_negative_literals_and_double_minus():
    p = parse("trav(a, s) { for i in [-3 : s--2] do !a[i+-1] }")
    (loop,) = p.body
    assert loop.lo == IntConst(-3)
    assert loop.hi == Sub(Var("s"), IntConst(-2))
    assert loop.body[0].index == Add(Var("i"), IntConst(-1))


def test_expressions_are_left_associative():
    p = parse("trav(a, s) { !a[s-1-2] }")
    assert p.body[0].index == Sub(Sub(Var("s"), IntConst(1)), IntConst(2))


def test_program_constructor_checks_well_formedness():
    with pytest.raises(IllFormedProgram):
        Program("a", "a", (HeapRead("a", IntConst(0)),))
    with pytest.raises(IllFormedProgram):
        Program("a", "s", (HeapRead("a", Var("i")),))
    with pytest.raises(IllFormedProgram):
        Program("a", "s", ())


def test_render_canonical():
    assert render(TravInstance(0, 1, 0).program()) == \
        "trav(a, s) { for i in [0 : s-1] do !a[i+0] }"
    assert render(TravInstance(0, 2, 2).program()) == \
        "trav(a, s) { for i in [0 : s-2] do !a[i+2] }"
    assert render(TravInstance(-1, -3, -2).program()) == \
        "trav(a, s) { for i in [-1 : s+3] do !a[i-2] }"


def test_render_normalizes_spacing():
    src = "trav(xs,n){for k in[1:n-1]do!xs[k-1]}"
    assert render(parse(src)) == "trav(xs, n) { for k in [1 : n-1] do !xs[k-1] }"


def test_render_rejects_unprintable_right_operand():
    p = Program("a", "s", (HeapRead("a", Add(Var("s"), Sub(Var("s"), IntConst(1)))),))
    with pytest.raises(IllFormedProgram):
        render(p)


# -- recognition ------------------------------------------------------------

def test_recognize_reduced_range_instance():
    p = parse("trav(a, s) { for i in [0 : s-2] do !a[i+2] }")
    assert recognize_trav(p) == TravInstance(0, 2, 2)


def test_recognize_normalizes_minus_zero():
    p = parse("trav(a, s) { for i in [0 : s-1] do !a[i-0] }")
    assert recognize_trav(p) == TravInstance(0, 1, 0)


@pytest.mark.parametrize("src, expected", [
    ("trav(a, s) { for i in [0 : s+-2] do !a[i--1] }", TravInstance(0, 2, 1)),
    ("trav(a, s) { for i in [1-3 : s-1-1] do !a[2+i] }", TravInstance(-2, 2, 2)),
    ("trav(arr, len) { for k in [0 : len-1] do !arr[k+0] }", TravInstance(0, 1, 0)),
    ("trav(a, s) { for i in [0 : s] do !a[i] }", TravInstance(0, 0, 0)),
    ("trav(a, s) { for i in [0 : s+s-s-1] do !a[i+i-i] }", TravInstance(0, 1, 0)),
])
def test_recognize_up_to_normalization(src, expected):
    assert recognize_trav(parse(src)) == expected


@pytest.mark.parametrize("src", [
    "trav(a, s) { !a[0] }",
    "trav(a, s) { for i in [0 : s-1] do for j in [0 : s-1] do !a[j] }",
    "trav(a, s) { for i in [s : s-1] do !a[i] }",
    "trav(a, s) { for i in [0 : 5] do !a[i] }",
    "trav(a, s) { for i in [0 : s+s] do !a[i] }",
    "trav(a, s) { for i in [0 : s-1] do !a[s] }",
    "trav(a, s) { for i in [0 : s-1] do !a[i+i] }",
    "trav(a, s) { for i in [0 : s-1] do !a[i+s] }",
])
def test_not_trav(src):
    result = recognize_trav(parse(src))
    assert isinstance(result, NotTravPattern)
    assert not result
    assert result.reason


def test_two_reads_is_not_trav():
    loop = ForRange("i", IntConst(0), Sub(Var("s"), IntConst(1)),
                    (HeapRead("a", Var("i")), HeapRead("a", Var("i"))))
    assert isinstance(recognize_trav(Program("a", "s", (loop,))), NotTravPattern)


def test_recognition_completeness_wide_grid():
    for L, R, Z in WIDE_GRID:
        t = TravInstance(L, R, Z)
        assert recognize_trav(parse(render(t.program()))) == t
        assert recognize_trav(parse(trav_source(L, R, Z))) == t


def test_trav_instance_rejects_huge_constants():
    with pytest.raises(ValueError):
        TravInstance(MAX_CONST + 1, 0, 0)


# -- generated sources --------------------------------------------------------

_names = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,4}", fullmatch=True).filter(
    lambda n: n not in {"trav", "for", "in", "do"})
_ints = st.integers(-MAX_CONST, MAX_CONST)


@st.composite
def expr_sources(draw, scope):
    def term():
        if scope and draw(st.booleans()):
            return draw(st.sampled_from(sorted(scope)))
        return str(draw(_ints))
    parts = [term()]
    for _ in range(draw(st.integers(0, 3))):
        parts.append(draw(st.sampled_from(["+", "-"])))
        parts.append(term())
    sep = draw(st.sampled_from(["", " ", "  "]))
    return sep.join(parts)


@st.composite
def program_sources(draw):
    array = draw(_names)
    size = draw(_names.filter(lambda n: n != array))
    names = {array, size}
    scope = {size}
    depth = draw(st.integers(0, 3))
    head = []
    for _ in range(depth):
        var = draw(_names.filter(lambda n: n not in names))
        lo, hi = draw(expr_sources(scope)), draw(expr_sources(scope))
        head.append(f"for {var} in [{lo}:{hi}] do")
        names.add(var)
        scope = scope | {var}
    body = f"!{array}[{draw(expr_sources(scope))}]"
    return f"trav({array},{size}){{" + " ".join(head + [body]) + "}"


@given(program_sources())
def test_round_trip(src):
    p = parse(src)
    text = render(p)
    assert parse(text) == p
    assert render(parse(text)) == text


@st.composite
def near_trav_sources(draw):
    """Trav-shaped loops with shuffled constants and occasional decoys."""
    def linear(var):
        atoms = [f"+{draw(st.integers(-9, 9))}" for _ in range(draw(st.integers(0, 2)))]
        if var:
            atoms.insert(draw(st.integers(0, len(atoms))), f"+{var}")
            if draw(st.integers(0, 5)) == 0:
                atoms.append(draw(st.sampled_from([f"+{var}", f"-{var}", "+s", "-s"])))
        if not atoms:
            atoms = ["+0"]
        text = "".join(atoms).replace("+-", "-")
        return text[1:] if text.startswith("+") else text
    lo = linear(draw(st.sampled_from(["", "", "", "s"])))
    hi = linear("s")
    idx = linear("i")
    return f"trav(a, s) {{ for i in [{lo} : {hi}] do !a[{idx}] }}"


@given(st.one_of(program_sources(), near_trav_sources()))
def test_recognition_soundness(src):
    p = parse(src)
    t = recognize_trav(p)
    if not t:
        return
    canonical = t.program()
    for n in range(33):
        budget = n + abs(t.L) + abs(t.R) + 2
        assert run(p, ExecConfig(n, budget)) == run(canonical, ExecConfig(n, budget))


@given(st.integers(-8, 8), st.integers(-8, 8), st.integers(-8, 8))
def test_generated_trav_sources_recognized(L, R, Z):
    p = parse(trav_source(L, R, Z))
    assert recognize_trav(p) == TravInstance(L, R, Z)
