"""Command-line front end: compile reductions, search words, verify laws.

The subcommands mirror the library's pipelines:

* ``compile`` builds a PFA (or an intermediate instance) from its inputs and
  writes it as JSON with a manifest recording the construction and its
  parameters.
* ``search`` scores every input word up to a length bound and reports the
  first witness above / at / exactly a value, with optional CSV per-length
  statistics and a rendered plot.
* ``verify`` reruns the randomized law and identity suites and reconciles
  the packaged golden matrices bit for bit.
* ``solve-pcp`` runs the bounded instance solver; ``encode-tm`` runs a
  machine and emits its configuration trace.

All commands are pure functions of their inputs: rerunning with the same
arguments (including ``--seed``) produces byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import random
import sys
from fractions import Fraction
from importlib import resources
from typing import Callable, Optional, Sequence

from . import __version__
from .amplify import amplify_F, amplify_NC, expanding_automaton, go_input_builder
from .binary import binary_matrix
from .counters import CheckerParams, equality_checker_pfa, luck_outcome_probs, one_coin_per_symbol
from .intmat import (
    choose_alpha,
    claus9_pipeline,
    claus_A,
    claus_f1,
    extend_final,
    hirvensalo20_pipeline,
    hirvensalo_A,
    hirvensalo_pi1,
    ternary_value,
    turakainen,
    zero_sum_pad,
)
from .linalg import Mat, Vec, chain, rat, rat_str
from .pcp import (
    PcpInstance,
    brute_solve,
    classic_instance,
    concatenations,
    pcp_from_json,
    pcp_to_json,
    reverse_instance,
    word_str,
)
from .pcp_to_pfa import (
    GadgetParams,
    code_binary,
    corner_matrix,
    eliminate_output_vector,
    equality_pfa_11,
    equality_pfa_13,
    m_infinity_closure,
    merge_squared,
    nine_state_pfa,
    pair_matrix_9,
    pair_matrix_12,
    rmpcp_compile,
    starting_distribution,
    strict_gadget,
    strict_pfa_13,
    strict_pfa_15,
)
from .pfa import Pfa, bounded_search, complement, mixture, pfa_from_json, pfa_to_json, product_pfa
from .turing import fixed_matrix_pipeline, simulate, tm_from_json, tm_to_mpcp

PROG = "cutpoint"

PCP_CONSTRUCTIONS = (
    "eq13",
    "eq11",
    "strict15",
    "strict13",
    "rmpcp12",
    "nine9",
    "out18",
    "minf11",
    "bin2",
)
GADGET_CONSTRUCTIONS = frozenset({"strict15", "strict13", "rmpcp12", "minf11", "bin2"})
INT_CONSTRUCTIONS = ("claus9", "hirvensalo20")
PIPELINE_TARGETS = ("P12", "T9", "T11", "T18")
VERIFY_SUITES = ("laws", "golden-matrices", "identities")
GOLDEN_TWELVE = ("copy_blank_12.json", "erase_blank_12.json", "left_rule_12.json")
GOLDEN_ELEVEN = "erase_blank_11.json"

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


class CliError(Exception):
    """A reported failure; the message carries the subcommand context."""


# ---------------------------------------------------------------------------
# small IO helpers


def _read_json(ctx: str, path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise CliError(f"{ctx}: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{ctx}: {path} is not valid JSON: {exc}") from exc


def _emit(data: dict, out: Optional[str]) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}") from exc


def _wrap(ctx: str, fn: Callable, *args, **kwargs):
    """Run a library call, surfacing its complaint under the subcommand."""
    try:
        return fn(*args, **kwargs)
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"{ctx}: {exc}") from exc


def _manifest(command: str, construction: str, **params) -> dict:
    entry = {
        "command": command,
        "construction": construction,
        "tool": PROG,
        "version": __version__,
    }
    if params:
        entry["parameters"] = params
    return entry


def _pfa_payload(p: Pfa, manifest: dict) -> dict:
    data = pfa_to_json(p)
    data["manifest"] = manifest
    return data


def _parse_rat(ctx: str, text: str) -> Fraction:
    return _wrap(ctx, rat, text)


def _parse_symbols(text: Optional[str]) -> tuple[str, ...]:
    """Symbols from the command line: comma separated, or one per character."""
    if not text:
        return ()
    if "," in text:
        return tuple(s for s in text.split(",") if s)
    return tuple(text)


# ---------------------------------------------------------------------------
# compile


def _gadget_params(ctx: str, inst: PcpInstance, args) -> GadgetParams:
    cut = _parse_rat(ctx, args.cutpoint) if args.cutpoint else QUARTER
    params = _wrap(ctx, GadgetParams.for_instance, inst, cutpoint=cut)
    overrides = {}
    if args.gamma:
        overrides["gamma"] = _parse_rat(ctx, args.gamma)
    if args.gamma1:
        overrides["gamma1"] = _parse_rat(ctx, args.gamma1)
    if overrides:
        params = _wrap(ctx, dataclasses.replace, params, **overrides)
    return params


def _pcp_pfa(ctx: str, name: str, inst: PcpInstance, args) -> tuple[Pfa, dict]:
    """The compiled automaton plus the manifest parameters used."""
    if name == "eq13":
        return _wrap(ctx, equality_pfa_13, inst), {}
    if name == "eq11":
        return _wrap(ctx, equality_pfa_11, inst), {}
    if name == "nine9":
        return _wrap(ctx, nine_state_pfa, inst), {}
    if name == "out18":
        base = _wrap(ctx, nine_state_pfa, inst)
        return _wrap(ctx, eliminate_output_vector, base), {}
    params = _gadget_params(ctx, inst, args)
    noted = {
        "cutpoint": rat_str(params.cutpoint),
        "gamma": rat_str(params.gamma),
        "gamma1": rat_str(params.gamma1),
    }
    if name == "strict15":
        return _wrap(ctx, strict_pfa_15, inst, params), noted
    if name == "strict13":
        return _wrap(ctx, strict_pfa_13, inst, params), noted
    if name == "rmpcp12":
        return _wrap(ctx, rmpcp_compile, inst, params), noted
    if name == "minf11":
        if not args.finish:
            raise CliError(
                f"{ctx}: minf11 needs --finish SYMBOL "
                "(the matrix that absorbs the finishing transition)"
            )
        base = _wrap(ctx, nine_state_pfa, inst)
        gadget = _wrap(ctx, strict_gadget, base, params.gamma, cutpoint=params.cutpoint)
        closed = _wrap(ctx, m_infinity_closure, gadget, args.finish)
        noted["finish"] = args.finish
        return closed, noted
    if name == "bin2":
        base_name = args.base
        if base_name == "bin2":
            raise CliError(f"{ctx}: bin2 cannot use itself as the base construction")
        base, base_params = _pcp_pfa(ctx, base_name, inst, args)
        coded = _wrap(ctx, code_binary, base)
        return coded, {"base": base_name, **base_params}
    raise CliError(f"{ctx}: unknown construction {name!r}")


def cmd_compile_pcp2pfa(args) -> int:
    ctx = f"compile pcp2pfa {args.construction}"
    inst = _wrap(ctx, pcp_from_json, _read_json(ctx, args.inp))
    pfa, params = _pcp_pfa(ctx, args.construction, inst, args)
    manifest = _manifest(
        "compile pcp2pfa",
        args.construction,
        instance=args.inp,
        pairs=inst.k,
        variant=inst.variant,
        states=pfa.dim,
        **params,
    )
    _emit(_pfa_payload(pfa, manifest), args.out)
    return 0


def cmd_compile_tm2mpcp(args) -> int:
    ctx = "compile tm2mpcp"
    tm = _wrap(ctx, tm_from_json, _read_json(ctx, args.inp))
    tape = _parse_symbols(args.tape)
    inst = _wrap(
        ctx,
        tm_to_mpcp,
        tm,
        tape,
        binary_copying=args.binary_copying,
        unique=args.unique,
    )
    data = pcp_to_json(inst)
    data["manifest"] = _manifest(
        "compile tm2mpcp",
        "mpcp",
        machine=args.inp,
        tape=list(tape),
        binary_copying=args.binary_copying,
        unique=args.unique,
        pairs=inst.k,
    )
    _emit(data, args.out)
    return 0


def cmd_compile_tm2pfa(args) -> int:
    ctx = f"compile tm2pfa {args.target}"
    tm = _wrap(ctx, tm_from_json, _read_json(ctx, args.inp))
    tape = _parse_symbols(args.tape)
    pipe = _wrap(ctx, fixed_matrix_pipeline, tm, target=args.target)
    pfa = _wrap(ctx, pipe.pfa_for_input, tape)
    manifest = _manifest(
        "compile tm2pfa",
        args.target,
        machine=args.inp,
        tape=list(tape),
        states=pfa.dim,
        code={k: v for k, v in sorted(pipe.code.items())},
        gamma=rat_str(pipe.gamma) if pipe.gamma is not None else None,
    )
    _emit(_pfa_payload(pfa, manifest), args.out)
    return 0


def cmd_compile_int2pfa(args) -> int:
    ctx = f"compile int2pfa {args.construction}"
    inst = _wrap(ctx, pcp_from_json, _read_json(ctx, args.inp))
    if args.construction == "claus9":
        pfa = _wrap(ctx, claus9_pipeline, inst)
        params = {}
    else:
        pfa = _wrap(ctx, hirvensalo20_pipeline, inst, reuse_start=args.reuse_start)
        params = {"reuse_start": args.reuse_start}
    manifest = _manifest(
        "compile int2pfa",
        args.construction,
        instance=args.inp,
        pairs=inst.k,
        states=pfa.dim,
        cutpoint=rat_str(pfa.cutpoint),
        **params,
    )
    _emit(_pfa_payload(pfa, manifest), args.out)
    return 0


def cmd_compile_checker(args) -> int:
    ctx = "compile cl2cm-checker"
    params = _wrap(ctx, CheckerParams, modulus=args.modulus, incorrect_limit=args.limit)
    builder = one_coin_per_symbol if args.one_coin else equality_checker_pfa
    checker = _wrap(ctx, builder, params)
    manifest = _manifest(
        "compile cl2cm-checker",
        "one-coin" if args.one_coin else "plain",
        modulus=args.modulus,
        incorrect_limit=args.limit,
        states=checker.pfa.dim,
    )
    _emit(_pfa_payload(checker.pfa, manifest), args.out)
    return 0


def cmd_compile_amplify(args) -> int:
    ctx = f"compile {args.kind}"
    base = _wrap(ctx, pfa_from_json, _read_json(ctx, args.inp))
    build = amplify_F if args.kind == "amplify-f" else amplify_NC
    amplified = _wrap(ctx, build, base)
    manifest = _manifest(
        "compile",
        args.kind,
        base=args.inp,
        base_states=base.dim,
        states=amplified.dim,
    )
    _emit(_pfa_payload(amplified, manifest), args.out)
    return 0


def cmd_compile_go(args) -> int:
    ctx = "compile amplify-go"
    x = _parse_rat(ctx, args.x)
    eps = _parse_rat(ctx, args.eps)
    n, t = _wrap(ctx, go_input_builder, x, eps)
    data = {
        "manifest": _manifest("compile amplify-go", "rounds"),
        "x": rat_str(x),
        "eps": rat_str(eps),
        "repetitions_per_round": n,
        "rounds": t,
    }
    _emit(data, args.out)
    return 0


# ---------------------------------------------------------------------------
# search


def _word_text(word: Sequence[str]) -> str:
    return " ".join(word)


def _length_rows(report) -> list[dict]:
    rows = []
    for stats in report.by_length:
        rows.append(
            {
                "length": stats.length,
                "count": stats.count,
                "max_prob": rat_str(stats.max_prob),
                "max_word": _word_text(stats.max_word),
                "min_prob": rat_str(stats.min_prob),
            }
        )
    return rows


def _write_csv(report, path: str) -> None:
    fields = ["length", "count", "max_prob", "max_word", "min_prob"]
    try:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=fields)
            writer.writeheader()
            writer.writerows(_length_rows(report))
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def _render_plot(report, p: Pfa, path: str) -> None:
    try:
        import matplotlib
    except ImportError as exc:
        raise CliError(
            "search --plot needs matplotlib; install the package's [plot] extra"
        ) from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    lengths = [stats.length for stats in report.by_length]
    maxima = [float(stats.max_prob) for stats in report.by_length]
    minima = [float(stats.min_prob) for stats in report.by_length]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(lengths, maxima, marker="o", label="best word")
    ax.plot(lengths, minima, marker=".", linestyle=":", label="worst word")
    ax.axhline(
        float(p.cutpoint),
        color="tab:red",
        linestyle="--",
        label=f"cutpoint {p.cutpoint} ({p.mode})",
    )
    if report.witness is not None:
        ax.plot(
            [len(report.witness.word)],
            [float(report.witness.probability)],
            marker="*",
            markersize=12,
            color="tab:green",
            linestyle="none",
            label="witness",
        )
    ax.set_xlabel("word length")
    ax.set_ylabel("acceptance probability")
    ax.set_title(f"{p.dim}-state automaton, words up to length {lengths[-1]}")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    try:
        fig.savefig(path, dpi=150)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)


def cmd_search(args) -> int:
    ctx = "search"
    p = _wrap(ctx, pfa_from_json, _read_json(ctx, args.pfa))
    if args.mode and args.mode != p.mode:
        p = _wrap(ctx, dataclasses.replace, p, mode=args.mode)
    want = args.want or ("above" if p.mode == "strict" else "at_least")
    value = _parse_rat(ctx, args.value) if args.value else None
    report = _wrap(ctx, bounded_search, p, args.max_len, want=want, value=value)
    witness = None
    if report.witness is not None:
        witness = {
            "word": list(report.witness.word),
            "probability": rat_str(report.witness.probability),
            "length": len(report.witness.word),
        }
    data = {
        "automaton": {
            "source": args.pfa,
            "states": p.dim,
            "alphabet": list(p.alphabet),
            "cutpoint": rat_str(p.cutpoint),
            "mode": p.mode,
        },
        "query": {
            "max_len": args.max_len,
            "want": want,
            "value": rat_str(value if value is not None else p.cutpoint),
        },
        "witness": witness,
        "max_prob": rat_str(report.max_prob),
        "max_word": list(report.max_word),
        "words_checked": report.words_checked,
        "by_length": _length_rows(report),
    }
    _emit(data, args.out)
    if args.csv:
        _write_csv(report, args.csv)
    if args.plot:
        _render_plot(report, p, args.plot)
    return 0


# ---------------------------------------------------------------------------
# verify


def _rand_frac(rng: random.Random, den_max: int = 64) -> Fraction:
    den = rng.randrange(1, den_max + 1)
    return Fraction(rng.randrange(0, den + 1), den)


def _rand_word(rng: random.Random, symbols: Sequence[str], max_len: int) -> tuple[str, ...]:
    return tuple(rng.choice(symbols) for _ in range(rng.randrange(max_len + 1)))


def _run_checks(checks: Sequence[tuple[str, Callable[[], str]]]) -> int:
    failures = 0
    for name, fn in checks:
        try:
            detail = fn()
        except (AssertionError, ValueError, KeyError) as exc:
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"ok   {name}: {detail}")
    print(f"{len(checks)} checks, {failures} failures")
    return 1 if failures else 0


def _law_checks(seed: int, trials: int) -> list[tuple[str, Callable[[], str]]]:
    few = max(20, trials // 5)

    def binary_product() -> str:
        rng = random.Random(seed)
        for _ in range(trials):
            u = "".join(rng.choice("01") for _ in range(rng.randrange(13)))
            v = "".join(rng.choice("01") for _ in range(rng.randrange(13)))
            assert binary_matrix(u) @ binary_matrix(v) == binary_matrix(v + u), (
                f"product law broke on {u!r}, {v!r}"
            )
        return f"{trials} random pairs, lengths <= 12 (reversed concatenation)"

    def word_matrix_chain() -> str:
        rng = random.Random(seed + 1)
        p = equality_pfa_13(reverse_instance(classic_instance()))
        for _ in range(few):
            a = _rand_word(rng, p.alphabet, 5)
            b = _rand_word(rng, p.alphabet, 5)
            left = p.word_matrix(a + b)
            assert left == p.word_matrix(a) @ p.word_matrix(b), f"chain broke on {a + b}"
            assert left.is_row_stochastic(), f"product not stochastic on {a + b}"
        return f"{few} random splits on a {p.dim}-state automaton"

    def combinators() -> str:
        rng = random.Random(seed + 2)
        inst = reverse_instance(classic_instance())
        a = equality_pfa_13(inst)
        b = nine_state_pfa(inst)
        prod = product_pfa(a, b)
        comp = complement(a)
        mix = mixture([HALF, QUARTER, QUARTER], [a, b, comp], cutpoint=HALF, mode="weak")
        for _ in range(few):
            w = _rand_word(rng, a.alphabet, 5)
            pa, pb = a.accept_prob(w), b.accept_prob(w)
            assert prod.accept_prob(w) == pa * pb, f"product broke on {w}"
            assert comp.accept_prob(w) == 1 - pa, f"complement broke on {w}"
            expected = HALF * pa + QUARTER * pb + QUARTER * (1 - pa)
            assert mix.accept_prob(w) == expected, f"mixture broke on {w}"
        return f"{few} random words through product, complement, mixture"

    return [
        ("binary-product", binary_product),
        ("word-matrix-chain", word_matrix_chain),
        ("combinators", combinators),
    ]


def _assemble_twelve(data: dict) -> Mat:
    blocks = [Mat(b["grid"]).scale(rat(b["scale"])) for b in data["blocks"]]
    return Mat.block_diag(*blocks, corner_matrix(rat(data["corner"])))


def _load_golden(name: str) -> dict:
    return json.loads((resources.files("cutpoint") / "golden" / name).read_text())


def _golden_checks() -> list[tuple[str, Callable[[], str]]]:
    def twelve(name: str) -> Callable[[], str]:
        def run() -> str:
            data = _load_golden(name)
            v, w = data["pair"]
            corner = rat(data["corner"])
            assert corner == Fraction(1, 2**22), f"corner {data['corner']} is not 2^-22"
            stored = _assemble_twelve(data)
            assert stored.is_row_stochastic(), "stored matrix is not row-stochastic"
            built = pair_matrix_12(v, w, corner)
            assert built == stored, f"regenerated matrix for ({v!r}, {w!r}) differs"
            return f"12x12 for pair ({v!r}, {w!r}) rebuilt bit-exactly"

        return run

    def eleven() -> str:
        data = _load_golden(GOLDEN_ELEVEN)
        v, w = data["pair"]
        corner = rat(data["corner"])
        assert corner == Fraction(1, 2**44), f"corner {data['corner']} is not 2^-44"
        stored = Mat.block_diag(
            Mat(data["grid"]).scale(rat(data["scale"])), corner_matrix(corner)
        )
        assert stored.is_row_stochastic(), "stored matrix is not row-stochastic"
        built = Mat.block_diag(pair_matrix_9(v, w), corner_matrix(corner))
        assert built == stored, f"regenerated matrix for ({v!r}, {w!r}) differs"
        return f"11x11 for pair ({v!r}, {w!r}) rebuilt bit-exactly"

    checks: list[tuple[str, Callable[[], str]]] = [
        (name, twelve(name)) for name in GOLDEN_TWELVE
    ]
    checks.append((GOLDEN_ELEVEN, eleven))
    return checks


def _identity_checks(seed: int, trials: int) -> list[tuple[str, Callable[[], str]]]:
    few = max(20, trials // 5)

    def equality_trick() -> str:
        rng = random.Random(seed)
        for _ in range(trials):
            phi, psi = _rand_frac(rng), _rand_frac(rng)
            mixed = HALF * phi * psi + QUARTER * (1 - phi * phi) + QUARTER * (1 - psi * psi)
            assert mixed == HALF - QUARTER * (phi - psi) ** 2, (
                f"trick broke on phi={phi}, psi={psi}"
            )
        return f"{trials} random rational pairs in [0,1]^2"

    def equality_by_coins() -> str:
        rng = random.Random(seed + 1)
        params = CheckerParams()
        checker = equality_checker_pfa(params)
        pairs = min(few, 40)
        for _ in range(pairs):
            i, j = rng.randrange(11), rng.randrange(11)
            walked = checker.probs_for_counts(i, j)
            oracle = luck_outcome_probs(params, i, j)
            assert walked["rejected"] == 0, f"well-formed word rejected at i={i}, j={j}"
            assert all(walked[k] == oracle[k] for k in oracle), (
                f"checker and coin enumeration disagree at i={i}, j={j}"
            )
        return f"{pairs} random count pairs with i, j <= 10, modulus {params.modulus}"

    def ternary_check() -> str:
        rng = random.Random(seed + 2)
        for _ in range(trials):
            v = "".join(rng.choice("12") for _ in range(rng.randrange(8)))
            w = "".join(rng.choice("12") for _ in range(rng.randrange(8)))
            delta = ternary_value(v) - ternary_value(w)
            value = claus_A(v, w).row(0).dot(claus_f1())
            assert value == 1 - delta * delta, f"check value broke on {v!r}, {w!r}"
        return f"{trials} random ternary pairs, lengths <= 7"

    def doubled_check() -> str:
        rng = random.Random(seed + 3)
        for _ in range(trials):
            v = "".join(rng.choice("12") for _ in range(rng.randrange(8)))
            w = "".join(rng.choice("12") for _ in range(rng.randrange(8)))
            delta = ternary_value(v) - ternary_value(w)
            value = hirvensalo_pi1().dot(hirvensalo_A(v, w) @ Vec.unit(6, 5))
            assert value == 1 - 2 * delta * delta, f"doubled check broke on {v!r}, {w!r}"
        return f"{trials} random ternary pairs, value 1 - 2*delta^2"

    def starting_vector() -> str:
        rng = random.Random(seed + 4)
        for _ in range(few):
            v1 = "".join(rng.choice("01") for _ in range(rng.randrange(1, 7)))
            w1 = "".join(rng.choice("01") for _ in range(rng.randrange(1, 7)))
            vec = starting_distribution(v1, w1)
            assert vec.total() == 1, f"entries do not sum to 1 for ({v1!r}, {w1!r})"
            m1 = Mat.block_diag(
                binary_matrix(v1).kron(binary_matrix(w1)),
                merge_squared(binary_matrix(v1)),
                merge_squared(binary_matrix(w1)),
            )
            mix_start = Vec((HALF, 0, 0, 0, QUARTER, 0, 0, QUARTER, 0, 0)).scale(HALF)
            gamma1 = Fraction(1, 4 ** max(len(v1), len(w1)))
            expected = Vec.concat(mix_start @ m1, Vec((gamma1 / 8, HALF - gamma1 / 8)))
            assert vec == expected, f"closed form broke on ({v1!r}, {w1!r})"
        return f"{few} random first pairs, closed form vs matrix route"

    def turakainen_chain() -> str:
        rng = random.Random(seed + 5)
        mats = [claus_A("12", "1"), claus_A("2", "21"), claus_A("1", "1")]
        es = zero_sum_pad(extend_final(mats, claus_f1()))
        alpha = choose_alpha(es)
        fs = turakainen(es)
        d = es[0].nrows
        e1, e7 = Vec.unit(d, 0), Vec.unit(d, 6)
        count = 0
        for length in range(1, 6):
            for _ in range(10):
                word = [rng.randrange(3) for _ in range(length)]
                lhs = e1.dot(chain([fs[i] for i in word], d) @ e7)
                rhs = e1.dot(chain([es[i] for i in word], d) @ e7)
                assert lhs - Fraction(1, d) == alpha**length * rhs, (
                    f"chain identity broke on {word}"
                )
                count += 1
        return f"{count} products of length <= 5 over a 3-matrix set, alpha {alpha}"

    def amplification_rounds() -> str:
        rng = random.Random(seed + 6)
        for _ in range(min(few, 30)):
            x = _rand_frac(rng, 16)
            n = rng.randrange(1, 7)
            t = rng.randrange(1, 5)
            p = expanding_automaton(x)
            round_word = (("sim",) * n + ("check",)) * t
            accept = p.accept_prob(round_word)
            per_round = HALF * x**n
            indecision = 1 - per_round - HALF * (1 - x) ** n
            # The coin is thrown on the check symbol, so the first check
            # only starts the first hypothesis: t checks finish t-1 rounds.
            expected = per_round * sum(indecision**r for r in range(t - 1))
            assert accept == expected, f"round form broke on x={x}, n={n}, t={t}"
        return "expanding-automaton rounds match their closed form (t checks, t-1 rounds)"

    return [
        ("equality-trick", equality_trick),
        ("equality-by-coins", equality_by_coins),
        ("ternary-check", ternary_check),
        ("doubled-check", doubled_check),
        ("starting-vector", starting_vector),
        ("turakainen-chain", turakainen_chain),
        ("amplification-rounds", amplification_rounds),
    ]


def cmd_verify(args) -> int:
    if args.suite == "laws":
        return _run_checks(_law_checks(args.seed, args.trials))
    if args.suite == "golden-matrices":
        return _run_checks(_golden_checks())
    return _run_checks(_identity_checks(args.seed, args.trials))


# ---------------------------------------------------------------------------
# solve-pcp / encode-tm


def cmd_solve_pcp(args) -> int:
    ctx = "solve-pcp"
    inst = _wrap(ctx, pcp_from_json, _read_json(ctx, args.inp))
    sol = _wrap(ctx, brute_solve, inst, args.max_len)
    data = {
        "instance": {"source": args.inp, "pairs": inst.k, "variant": inst.variant},
        "max_len": args.max_len,
        "solution": list(sol) if sol else None,
    }
    if sol:
        common, _ = concatenations(inst, sol)
        data["common_string"] = word_str(common)
    _emit(data, args.out)
    return 0


def cmd_encode_tm(args) -> int:
    ctx = "encode-tm"
    tm = _wrap(ctx, tm_from_json, _read_json(ctx, args.inp))
    tape = _parse_symbols(args.tape)
    run = _wrap(ctx, simulate, tm, tape, max_steps=args.max_steps)
    configs = [
        {"left": list(c.left), "state": c.state, "right": list(c.right)}
        for c in run.configs
    ]
    data = {
        "machine": {"source": args.inp, "states": len(tm.states), "start": tm.start},
        "tape": list(tape),
        "halted": run.halted,
        "steps": run.steps,
        "configurations": configs,
        "mpcp_pairs": _wrap(ctx, tm_to_mpcp, tm, tape).k,
    }
    _emit(data, args.out)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="compile word-matching problems into exact-rational PFAs "
        "and analyze them around their cutpoints",
    )
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    comp = sub.add_parser("compile", help="build automata and instances")
    kinds = comp.add_subparsers(dest="kind", required=True)

    def add_io(p: argparse.ArgumentParser, inp_help: str) -> None:
        p.add_argument("--in", dest="inp", required=True, metavar="PATH", help=inp_help)
        p.add_argument("--out", metavar="PATH", help="output JSON (default: stdout)")

    p = kinds.add_parser("pcp2pfa", help="instance to PFA via a named construction")
    p.add_argument("--construction", required=True, choices=PCP_CONSTRUCTIONS)
    add_io(p, "word-matching instance JSON")
    p.add_argument("--cutpoint", metavar="RAT", help="strict cutpoint (default 1/4)")
    p.add_argument("--gamma", metavar="RAT", help="accept-state leak override")
    p.add_argument("--gamma1", metavar="RAT", help="first-pair leak override")
    p.add_argument(
        "--finish", metavar="SYMBOL", help="finishing symbol (minf11 only)"
    )
    p.add_argument(
        "--base",
        default="strict15",
        choices=[c for c in PCP_CONSTRUCTIONS if c != "bin2"],
        help="construction coded to two letters (bin2 only)",
    )
    p.set_defaults(func=cmd_compile_pcp2pfa)

    p = kinds.add_parser("tm2mpcp", help="machine run to first-pair-fixed instance")
    add_io(p, "machine JSON")
    p.add_argument("--tape", metavar="SYMS", help="input tape (chars, or comma separated)")
    p.add_argument("--binary-copying", action="store_true", help="split copying pairs")
    p.add_argument("--unique", action="store_true", help="at most one solution per bound")
    p.set_defaults(func=cmd_compile_tm2mpcp)

    p = kinds.add_parser("tm2pfa", help="machine to PFA with a fixed matrix family")
    p.add_argument("--target", required=True, choices=PIPELINE_TARGETS)
    add_io(p, "machine JSON")
    p.add_argument("--tape", metavar="SYMS", help="input tape (chars, or comma separated)")
    p.set_defaults(func=cmd_compile_tm2pfa)

    p = kinds.add_parser("int2pfa", help="instance to PFA via integer matrices")
    p.add_argument("--construction", required=True, choices=INT_CONSTRUCTIONS)
    add_io(p, "word-matching instance JSON")
    p.add_argument(
        "--reuse-start",
        action="store_true",
        help="fold the first block into the start (hirvensalo20 only)",
    )
    p.set_defaults(func=cmd_compile_int2pfa)

    p = kinds.add_parser("cl2cm-checker", help="coin-game equality checker PFA")
    p.add_argument("--modulus", type=int, default=12, metavar="G")
    p.add_argument("--limit", type=int, default=10, metavar="K")
    p.add_argument(
        "--one-coin", action="store_true", help="pad so each symbol throws one coin"
    )
    p.add_argument("--out", metavar="PATH", help="output JSON (default: stdout)")
    p.set_defaults(func=cmd_compile_checker)

    for kind in ("amplify-f", "amplify-nc"):
        p = kinds.add_parser(kind, help=f"wrap a base PFA in the {kind[8:]} amplifier")
        add_io(p, "base PFA JSON")
        p.set_defaults(func=cmd_compile_amplify, kind=kind)

    p = kinds.add_parser("amplify-go", help="rounds sizing (n, t) for a target error")
    p.add_argument("--x", required=True, metavar="RAT", help="acceptance probability > 1/2")
    p.add_argument("--eps", required=True, metavar="RAT", help="error bound in (0, 1)")
    p.add_argument("--out", metavar="PATH", help="output JSON (default: stdout)")
    p.set_defaults(func=cmd_compile_go)

    p = sub.add_parser("search", help="score every word up to a length bound")
    p.add_argument("--pfa", required=True, metavar="PATH", help="PFA JSON")
    p.add_argument("--max-len", required=True, type=int, metavar="N")
    p.add_argument("--want", choices=("above", "at_least", "exactly"))
    p.add_argument("--value", metavar="RAT", help="threshold (default: the cutpoint)")
    p.add_argument("--mode", choices=("strict", "weak"), help="override the stored mode")
    p.add_argument("--out", metavar="PATH", help="report JSON (default: stdout)")
    p.add_argument("--csv", metavar="PATH", help="write per-length statistics as CSV")
    p.add_argument("--plot", metavar="PATH", help="render the per-length profile (PNG)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", help="rerun law suites and golden-matrix diffs")
    p.add_argument("suite", choices=VERIFY_SUITES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve-pcp", help="bounded search for index solutions")
    add_io(p, "word-matching instance JSON")
    p.add_argument("--max-len", required=True, type=int, metavar="N")
    p.set_defaults(func=cmd_solve_pcp)

    p = sub.add_parser("encode-tm", help="run a machine and emit its trace")
    add_io(p, "machine JSON")
    p.add_argument("--tape", metavar="SYMS", help="input tape (chars, or comma separated)")
    p.add_argument("--max-steps", type=int, default=1000, metavar="N")
    p.set_defaults(func=cmd_encode_tm)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
