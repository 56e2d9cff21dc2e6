"""Tests for Turing machines and their compilation to matrix pipelines."""

import json
from fractions import Fraction
from importlib import resources

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cutpoint.linalg import Mat, Vec, rat
from cutpoint.pcp import brute_solve, check_solution, is_uniquely_decodable
from cutpoint.pcp_to_pfa import corner_matrix, pair_matrix_9, pair_matrix_12
from cutpoint.pfa import bounded_search
from cutpoint.turing import (
    Config,
    Rule,
    TuringMachine,
    busy_machine,
    decode_configurations,
    efficient_code,
    fixed_matrix_pipeline,
    flip_tape,
    halting_machine,
    looping_machine,
    simulate,
    strip_blanks,
    tm_from_json,
    tm_to_json,
    tm_to_mpcp,
)

TARGETS = ("P12", "T9", "T11", "T18")
GAMMA_22 = Fraction(1, 2**22)


def nine_state_machine():
    """Two tape symbols, nine states, one left rule q9,_ -> q1,_,L."""
    states = tuple(f"q{i}" for i in range(1, 10))
    return TuringMachine(
        states=states,
        alphabet=("_", "b"),
        blank="_",
        start="q1",
        rules=(Rule("q9", "_", "_", "L", "q1"),),
    )


def load_golden(name):
    path = resources.files("cutpoint") / "golden" / name
    return json.loads(path.read_text())


def assembled_12(data):
    blocks = [Mat(b["grid"]).scale(rat(b["scale"])) for b in data["blocks"]]
    return Mat.block_diag(*blocks, corner_matrix(rat(data["corner"])))


def halted_word(config, blank):
    """The final tape content once state and scanned symbol collapse to H."""
    rest = config.right[1:] if config.right else ()
    return strip_blanks(config.left + ("H",) + rest, blank)


def primitive_solutions(inst, max_len):
    """All solutions none of whose proper prefixes already match."""
    found = []

    def extend(sol, v_cat, w_cat):
        if v_cat == w_cat:
            found.append(tuple(sol))
            return
        if len(sol) >= max_len:
            return
        for number in range(2, inst.k + 1):
            v, w = inst.pair(number)
            nv, nw = v_cat + v, w_cat + w
            cut = min(len(nv), len(nw))
            if nv[:cut] != nw[:cut]:
                continue
            sol.append(number)
            extend(sol, nv, nw)
            sol.pop()

    v1, w1 = inst.pair(1)
    cut = min(len(v1), len(w1))
    if v1[:cut] == w1[:cut]:
        extend([1], v1, w1)
    return found


# ---------------------------------------------------------------------------
# machines and simulation


def test_rule_validation():
    assert Rule("q", "s").halting
    assert not Rule("q", "s", "t", "R", "q").halting
    with pytest.raises(ValueError):
        Rule("q", "s", write="t")
    with pytest.raises(ValueError):
        Rule("q", "s", "t", "up", "q")


def test_machine_validation():
    with pytest.raises(ValueError, match="nondeterministic"):
        TuringMachine(
            ("q0",),
            ("_",),
            "_",
            "q0",
            (Rule("q0", "_"), Rule("q0", "_", "_", "R", "q0")),
        )
    with pytest.raises(ValueError):
        TuringMachine(("q0",), ("_",), "b", "q0", ())
    with pytest.raises(ValueError):
        TuringMachine(("q0",), ("_",), "_", "q1", ())
    with pytest.raises(ValueError):
        TuringMachine(("q0", "_"), ("_",), "_", "q0", ())
    with pytest.raises(ValueError):
        TuringMachine(("q0",), ("_",), "_", "q0", (Rule("q0", "x"),))


def test_simulate_halts_immediately():
    run = simulate(halting_machine())
    assert run.halted and run.steps == 0
    assert run.configs == (Config((), "q0", ()),)


def test_simulate_busy_machine():
    run = simulate(busy_machine())
    assert run.halted and run.steps == 1
    assert [c.word() for c in run.configs] == [("q0",), ("q1", "_", "b")]


def test_simulate_missing_rule():
    dead = TuringMachine(("q0",), ("_",), "_", "q0", ())
    with pytest.raises(ValueError, match="no rule"):
        simulate(dead)
    with pytest.raises(ValueError, match="not in the tape alphabet"):
        simulate(looping_machine(), ("x",))


def test_simulate_step_limit():
    run = simulate(looping_machine(), max_steps=5)
    assert not run.halted and run.steps == 5
    assert run.last == Config(("_",) * 5, "q0", ())


def test_flip_tape():
    bm = busy_machine()
    fl = flip_tape(bm)
    assert fl.head == "right"
    assert flip_tape(fl) == bm
    moves = {r.state: r.move for r in fl.rules if not r.halting}
    assert moves == {"q0": "R"}
    # a right-headed machine is simulated through its mirror image
    assert simulate(fl).configs == simulate(bm).configs
    assert tm_to_mpcp(fl, ("b", "_")) == tm_to_mpcp(bm, ("_", "b"))


# ---------------------------------------------------------------------------
# word pairs


def test_word_pairs_for_halting_machine():
    inst = tm_to_mpcp(halting_machine())
    expected = [
        ("#", "#_q0_#"),
        ("_", "_"),
        ("#", "#"),
        ("#", "_#_"),
        ("q0_", "H"),
        ("H_", "H"),
        ("_H", "H"),
        ("H##", "#"),
    ]
    assert [("".join(v), "".join(w)) for v, w in inst.pairs] == expected
    assert inst.variant == "mpcp"


def test_pair_count_large_machine():
    """Two tape symbols, 14 left and 16 other rules: 53 pairs plus the start."""
    states = tuple(f"s{i}" for i in range(15))
    alphabet = ("_", "b")
    slots = [(q, s) for q in states for s in alphabet]
    rules = [Rule(q, s, "b", "L", states[0]) for q, s in slots[:14]]
    rules += [Rule(q, s, "_", "R", states[1]) for q, s in slots[14:22]]
    rules += [Rule(q, s) for q, s in slots[22:]]
    tm = TuringMachine(states, alphabet, "_", states[0], tuple(rules))
    assert tm_to_mpcp(tm).k == 1 + 53
    assert len(efficient_code(tm)) == len(alphabet) + 1 + len(states) + 1


@st.composite
def machines(draw):
    n_states = draw(st.integers(1, 3))
    n_symbols = draw(st.integers(1, 3))
    states = tuple(f"q{i}" for i in range(n_states))
    alphabet = ("_", "x", "y")[:n_symbols]
    rules = []
    for state in states:
        for read in alphabet:
            kind = draw(st.sampled_from(("none", "halt", "L", "R")))
            if kind == "none":
                continue
            if kind == "halt":
                rules.append(Rule(state, read))
            else:
                rules.append(
                    Rule(
                        state,
                        read,
                        draw(st.sampled_from(alphabet)),
                        kind,
                        draw(st.sampled_from(states)),
                    )
                )
    return TuringMachine(states, alphabet, "_", states[0], tuple(rules))


@given(machines())
def test_pair_count_formula(tm):
    g = len(tm.alphabet)
    left = len(tm.left_rules())
    other = len(tm.rules) - left
    assert tm_to_mpcp(tm).k == 1 + (3 * g + 3) + g * left + other
    uniq = tm_to_mpcp(tm, unique=True)
    assert uniq.k == tm_to_mpcp(tm).k - 1 + len(tm.states) + left


def test_reserved_symbols_rejected():
    clash = TuringMachine(("H",), ("_",), "_", "H", (Rule("H", "_"),))
    with pytest.raises(ValueError):
        tm_to_mpcp(clash)
    marker = TuringMachine(("q0",), ("_", "#"), "_", "q0", ())
    with pytest.raises(ValueError):
        tm_to_mpcp(marker)
    with pytest.raises(ValueError):
        tm_to_mpcp(halting_machine(), ("b",))


# ---------------------------------------------------------------------------
# solutions encode computations


def test_halting_machine_solution_decodes():
    tm = halting_machine()
    inst = tm_to_mpcp(tm)
    sol = brute_solve(inst, 12)
    assert sol == (1, 2, 5, 3, 7, 3, 8)
    segments = decode_configurations(inst, sol)
    assert segments == (("_", "q0", "_"), ("_", "H"), ("H",))
    run = simulate(tm)
    assert strip_blanks(segments[0], "_") == strip_blanks(run.configs[0].word(), "_")
    assert strip_blanks(segments[1], "_") == halted_word(run.last, "_")
    assert segments[-1] == ("H",)


def test_busy_machine_solution_matches_run():
    tm = busy_machine()
    inst = tm_to_mpcp(tm)
    sol = brute_solve(inst, 12)
    assert sol == (1, 6, 4, 8, 3, 4, 10, 4, 13)
    assert check_solution(inst, sol)
    segments = decode_configurations(inst, sol)
    run = simulate(tm)
    for seg, config in zip(segments, run.configs):
        assert strip_blanks(seg, tm.blank) == strip_blanks(config.word(), tm.blank)
    assert strip_blanks(segments[run.steps + 1], tm.blank) == halted_word(
        run.last, tm.blank
    )
    assert segments[-1] == ("H",)


def test_looping_machine_has_no_solution():
    assert brute_solve(tm_to_mpcp(looping_machine()), 12) is None


def test_decode_rejects_non_solutions():
    inst = tm_to_mpcp(halting_machine())
    with pytest.raises(ValueError):
        decode_configurations(inst, (1, 2))


def test_unique_mode_forces_one_solution():
    tm = halting_machine()
    plain = tm_to_mpcp(tm)
    uniq = tm_to_mpcp(tm, unique=True)
    texts = [("".join(v), "".join(w)) for v, w in uniq.pairs]
    assert ("#", "_#_") not in texts  # padding pair dropped
    assert ("q0#", "q0_#") in texts  # explicit end-of-tape pair instead
    assert uniq.k == plain.k - 1 + len(tm.states)
    # padding makes the plain instance ambiguous; unique mode removes that
    assert len(primitive_solutions(plain, 12)) == 2
    assert primitive_solutions(uniq, 12) == [(1, 2, 4, 3, 7, 3, 8)]


def test_unique_mode_left_edge_pairs():
    uniq = tm_to_mpcp(busy_machine(), unique=True)
    texts = [("".join(v), "".join(w)) for v, w in uniq.pairs]
    assert ("#q0_", "#q1_b") in texts
    assert uniq.k == 15
    assert primitive_solutions(uniq, 12) == [(1, 5, 4, 7, 3, 4, 12, 4, 15)]


def test_binary_copying_rewrites_the_alphabet():
    inst = tm_to_mpcp(halting_machine(), binary_copying=True)
    assert inst.alphabet() == ("a", "b")
    assert inst.k == 8
    assert inst.pair(2) == (("a",), ("a",))
    assert inst.pair(3) == (("b",), ("b",))
    assert "".join(inst.pair(1)[1]) == "baabbabbaaabbabbaab"
    assert inst.pair(6) == (tuple("baaaabbab"), tuple("baaaab"))
    # the halting-machine solution, with copying spelled letter by letter
    sol = (1, 3, 2, 3, 5, 3, 2, 2, 3, 7, 3, 2, 2, 3, 8)
    assert check_solution(inst, sol)


# ---------------------------------------------------------------------------
# codes


def test_efficient_code_default_assignments():
    code = efficient_code(nine_state_machine())
    assert code["#"] == "101"
    assert code["_"] == "100"
    assert code["b"] == "110"
    assert code["q1"] == "00001"
    assert code["q9"] == "01001"
    assert code["H"] == "00000"
    assert is_uniquely_decodable(code)


def test_efficient_code_positive_mode():
    code = efficient_code(nine_state_machine(), positive=True)
    assert code["q9"] == "00000"  # the all-zero word moves to the last state
    assert code["q1"] == "00001"
    assert code["H"] == "01001"
    assert "111" not in code.values()
    assert is_uniquely_decodable(code)


def test_efficient_code_capacity():
    three = TuringMachine(("q0",), ("_", "b", "c"), "_", "q0", ())
    efficient_code(three)
    four = TuringMachine(("q0",), ("_", "b", "c", "d"), "_", "q0", ())
    with pytest.raises(ValueError, match="code too short"):
        efficient_code(four)
    with pytest.raises(ValueError, match="code too short"):
        efficient_code(three, positive=True)
    crowd = TuringMachine(tuple(f"q{i}" for i in range(16)), ("_",), "_", "q0", ())
    with pytest.raises(ValueError, match="code too short"):
        efficient_code(crowd)


# ---------------------------------------------------------------------------
# golden matrices


GOLDEN_PAIRS = {
    "copy_blank_12.json": ("100", "100"),
    "erase_blank_12.json": ("100101", "101"),
    "left_rule_12.json": ("10001001110", "10011000001"),
}


@pytest.mark.parametrize("name", sorted(GOLDEN_PAIRS))
def test_golden_twelve_state_matrices(name):
    data = load_golden(name)
    assert tuple(data["pair"]) == GOLDEN_PAIRS[name]
    expected = assembled_12(data)
    assert expected.is_row_stochastic()
    assert expected == pair_matrix_12(*data["pair"], GAMMA_22)


def test_golden_eleven_state_matrix():
    data = load_golden("erase_blank_11.json")
    assert tuple(data["pair"]) == ("101100", "101")
    grid = Mat(data["grid"]).scale(rat(data["scale"]))
    expected = Mat.block_diag(grid, corner_matrix(rat(data["corner"])))
    assert expected.is_row_stochastic()
    assert expected == Mat.block_diag(
        pair_matrix_9(*data["pair"]), corner_matrix(Fraction(1, 2**44))
    )


def test_pipeline_matrices_match_goldens():
    """The worked 12-state matrices come out of the compiler unchanged."""
    pipe = fixed_matrix_pipeline(nine_state_machine(), target="P12")
    inst = pipe.coded_instance(())
    assert "".join(inst.pair(2)[0]) == "100"  # copy-blank pair
    assert "".join(inst.pair(7)[0]) == "10001001110"  # left rule, t = b
    assert pipe.gamma == GAMMA_22
    copy = load_golden("copy_blank_12.json")
    left = load_golden("left_rule_12.json")
    assert pipe.matrices[pipe.alphabet.index("2")] == assembled_12(copy)
    assert pipe.matrices[pipe.alphabet.index("7")] == assembled_12(left)


# ---------------------------------------------------------------------------
# compiled pipelines


def test_pipeline_dimensions_and_granularity():
    tm = halting_machine()
    k = tm_to_mpcp(tm).k

    p12 = fixed_matrix_pipeline(tm, target="P12")
    assert p12.dim == 12
    assert p12.cutpoint == Fraction(1, 4) and p12.mode == "strict"
    assert len(p12.matrices) == k - 1
    for m in p12.matrices:
        assert m.is_row_stochastic()
        assert m.is_multiple_of(Fraction(1, 2**22))

    t9 = fixed_matrix_pipeline(tm, target="T9")
    assert t9.dim == 9
    assert t9.cutpoint == Fraction(1, 2) and t9.mode == "weak"
    assert len(t9.matrices) == k - 2
    assert t9.pi.is_distribution()
    for m in t9.matrices:
        assert m.is_row_stochastic()
        assert m.is_multiple_of(Fraction(1, 2**44))

    t11 = fixed_matrix_pipeline(tm, target="T11")
    assert t11.dim == 11
    assert t11.cutpoint == Fraction(1, 4) and t11.mode == "strict"
    assert t11.gamma == Fraction(1, 16**11)
    assert t11.pi.is_distribution()
    for e in t11.pi.entries:
        assert (e / Fraction(1, 2**45)).denominator == 1
    for m in t11.matrices:
        assert m.is_row_stochastic()
        assert m.is_multiple_of(Fraction(1, 2**45))

    t18 = fixed_matrix_pipeline(tm, target="T18")
    assert t18.dim == 18
    assert t18.cutpoint == Fraction(1, 2) and t18.mode == "weak"
    assert len(t18.matrices) == k - 1
    assert t18.out == Vec.concat(Vec.ones(9), Vec.zeros(9))
    for m in t18.matrices:
        assert m.is_row_stochastic()
        assert m.is_multiple_of(Fraction(1, 2**47))


def test_nine_state_output_vector_range():
    pipe = fixed_matrix_pipeline(halting_machine(), target="T9")
    for tape in ((), ("_",), ("_", "_")):
        pfa = pipe.pfa_for_input(tape)
        assert pfa.pi == pipe.pi
        for e in pfa.out.entries:
            assert Fraction(1, 4) <= e <= Fraction(5, 8)


def test_positive_code_gives_positive_matrices():
    tm = halting_machine()
    pipe = fixed_matrix_pipeline(tm, code=efficient_code(tm, positive=True), target="T9")
    assert all(m.is_positive() for m in pipe.matrices)
    assert all(e > 0 for e in pipe.pi.entries)
    default = fixed_matrix_pipeline(tm, target="T9")
    assert not all(m.is_positive() for m in default.matrices)


def test_coded_instance_orientation():
    tm = halting_machine()
    code = efficient_code(tm)
    rev = fixed_matrix_pipeline(tm, target="P12").coded_instance(())
    fwd = fixed_matrix_pipeline(tm, target="T9").coded_instance(())
    # pair 5 is (q0_, H); words are reversed before coding for P12/T18
    assert "".join(fwd.pair(5)[0]) == code["q0"] + code["_"]
    assert "".join(rev.pair(5)[0]) == code["_"] + code["q0"]


def test_accept_values_on_solutions():
    tm = halting_machine()
    sol = (1, 2, 5, 3, 7, 3, 8)
    assert check_solution(tm_to_mpcp(tm), sol)

    p12 = fixed_matrix_pipeline(tm, target="P12")
    word = p12.word_for_solution(sol)
    v1, w1 = p12.coded_instance(()).pair(1)
    gamma1 = Fraction(1, 4 ** max(len(v1), len(w1)))
    value = p12.pfa_for_input(()).accept_prob(word)
    assert value == Fraction(1, 4) + Fraction(1, 8) * gamma1 * p12.gamma ** len(word)

    t9 = fixed_matrix_pipeline(tm, target="T9")
    w9 = t9.word_for_solution(sol)
    assert w9 == tuple(str(a) for a in reversed(sol[1:-1]))
    assert t9.pfa_for_input(()).accept_prob(w9) == Fraction(1, 2)

    t11 = fixed_matrix_pipeline(tm, target="T11")
    w11 = t11.word_for_solution(sol)
    v1, w1 = t11.coded_instance(()).pair(1)
    g1 = Fraction(1, 16 ** max(len(v1), len(w1)))
    value = t11.pfa_for_input(()).accept_prob(w11)
    assert value == Fraction(1, 4) + Fraction(1, 16) * g1 * t11.gamma ** (len(w11) + 1)

    t18 = fixed_matrix_pipeline(tm, target="T18")
    w18 = t18.word_for_solution(sol)
    assert t18.pfa_for_input(()).accept_prob(w18) == Fraction(1, 2)


def test_non_solutions_stay_on_the_wrong_side():
    tm = halting_machine()
    words = ((), ("2",), ("3", "3"), ("2", "2", "3"))
    for target in TARGETS:
        pfa = fixed_matrix_pipeline(tm, target=target).pfa_for_input(())
        for word in words:
            assert not pfa.accepts(word)


def test_word_solution_round_trip():
    tm = halting_machine()
    sol = (1, 2, 5, 3, 7, 3, 8)
    for target in TARGETS:
        pipe = fixed_matrix_pipeline(tm, target=target)
        assert pipe.solution_for_word(pipe.word_for_solution(sol)) == sol
    pipe = fixed_matrix_pipeline(tm, target="T9")
    with pytest.raises(ValueError, match="start with pair 1"):
        pipe.word_for_solution((2, 5, 3))
    with pytest.raises(ValueError, match="finishing pair"):
        pipe.word_for_solution((1, 2, 5))
    with pytest.raises(ValueError, match="no matrix"):
        pipe.word_for_solution((1, 99, 8))


def test_search_witness_recovers_the_computation():
    tm = halting_machine()
    pipe = fixed_matrix_pipeline(tm, target="T9")
    report = bounded_search(pipe.pfa_for_input(()), 5, want="at_least")
    assert report.found
    assert report.witness.probability == Fraction(1, 2)
    sol = pipe.solution_for_word(report.witness.word)
    inst = pipe.mpcp_for_input(())
    assert check_solution(inst, sol)
    segments = decode_configurations(inst, sol)
    run = simulate(tm)
    assert strip_blanks(segments[0], tm.blank) == strip_blanks(
        run.configs[0].word(), tm.blank
    )
    assert segments[-1] == ("H",)


def test_pipeline_with_input_tape():
    tm = halting_machine()
    pipe = fixed_matrix_pipeline(tm, target="T9")
    inst = pipe.mpcp_for_input(("_",))
    sol = brute_solve(inst, 14)
    assert sol is not None and check_solution(inst, sol)
    word = pipe.word_for_solution(sol)
    assert pipe.pfa_for_input(("_",)).accept_prob(word) == Fraction(1, 2)


# ---------------------------------------------------------------------------
# serialization


def test_tm_json_round_trip():
    for tm in (halting_machine(), busy_machine(), flip_tape(busy_machine())):
        data = tm_to_json(tm)
        assert tm_from_json(data) == tm
        assert json.loads(json.dumps(data)) == data
