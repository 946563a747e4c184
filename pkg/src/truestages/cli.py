"""Command-line front end.

One binary with per-task subcommands: verification suites, jump and
relation dumps, hierarchy conversions, decomposition trees, and the
separation game.  Every run emits a single report, as indented JSON or
as text lines with the same content, and identical flags always
produce identical bytes.  Exit status: 0 on success, 1 when a checked
property failed (the report lists counterexamples), 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys as _sys
from typing import Optional

from .game import (
    CorrectnessChecker,
    PartialPlay,
    StrategyTable,
    adversarial_play,
    extract_reduction,
    game_from_json,
    referee,
    solve,
    strategy_from_json,
    strategy_to_json,
    transcript_to_json,
)
from .hierarchy import (
    ApproxFn,
    approx_from_json,
    approx_limit,
    approx_to_json,
    approx_to_witness,
    difference_value,
    dsets_to_witness,
    upset_from_json,
    upset_to_json,
    witness_to_dsets,
    witness_to_json,
)
from .jump import DefaultOperator
from .ordinals import ParseError, parse_ordinal, render
from .stages import TrueStageSystem, ts_verify
from .universe import Universe, seq_str
from .wadge import decomposition_eval, tree_to_json, wadge_tree


class InputError(Exception):
    """Unusable input: missing file, malformed JSON, bad notation."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="truestages",
        description="true-stage relations, hierarchy conversions, and the separation game",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *flags):
        if "universe" in flags:
            p.add_argument("--max-len", type=int, default=3, dest="max_len")
            p.add_argument("--alphabet", type=int, default=2)
        if "levels" in flags:
            p.add_argument("--levels", default="0,1,2")
        if "alpha" in flags:
            p.add_argument("--alpha", default="1")
        if "eta" in flags:
            p.add_argument("--eta", default=None)
        if "seed" in flags:
            p.add_argument("--seed", type=int, default=0)
        if "depth" in flags:
            p.add_argument("--depth", type=int, default=None)
        if "instance" in flags:
            p.add_argument("--instance", required=True)
        p.add_argument("--format", choices=["json", "text"], default="text")

    common(sub.add_parser("verify"), "universe", "levels")
    common(sub.add_parser("jump"), "universe")
    common(sub.add_parser("truestages"), "universe", "levels")

    hk = sub.add_parser("hk").add_subparsers(dest="action", required=True)
    common(hk.add_parser("roundtrip"), "universe", "alpha", "seed")
    common(hk.add_parser("convert"), "universe", "eta", "instance")

    wadge = sub.add_parser("wadge").add_subparsers(dest="action", required=True)
    common(wadge.add_parser("decompose"), "instance")
    common(wadge.add_parser("eval"), "instance")

    lsr = sub.add_parser("lsr").add_subparsers(dest="action", required=True)
    common(lsr.add_parser("solve"), "instance", "depth")
    common(lsr.add_parser("referee"), "instance")
    common(lsr.add_parser("separator"), "instance", "depth")
    common(lsr.add_parser("adversarial"), "instance", "depth")

    return parser


def _load_instance(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read instance file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"instance file is not valid JSON: {exc}") from exc


def _levels(text: str):
    try:
        return [parse_ordinal(part) for part in text.split(",") if part]
    except ParseError as exc:
        raise InputError(f"bad level notation: {exc}") from exc


def _notation(text: str):
    try:
        return parse_ordinal(text)
    except ParseError as exc:
        raise InputError(f"bad notation {text!r}: {exc}") from exc


def _fresh():
    return TrueStageSystem(DefaultOperator())


# -- subcommand bodies ----------------------------------------------------


def _run_verify(args):
    universe = Universe(args.max_len, args.alphabet)
    levels = _levels(args.levels)
    report = ts_verify(_fresh(), universe, levels)
    results = [
        {"property": r.name, "passed": r.passed, "checked": r.checked,
         "failures": r.failures}
        for r in report.results.values()
    ]
    failures = [
        {"property": r.name, **ce}
        for r in report.results.values()
        for ce in r.counterexamples
    ]
    config = {"maxLen": args.max_len, "alphabet": args.alphabet, "levels": args.levels}
    text = report.summary_lines() + [
        "counterexample: " + json.dumps(f, sort_keys=True) for f in failures
    ]
    return config, results, failures, text


def _run_jump(args):
    universe = Universe(args.max_len, args.alphabet)
    op = DefaultOperator()
    results = []
    text = []
    for sigma in universe.all_seqs():
        trace = op.trace(sigma)
        results.append({
            "sigma": seq_str(sigma),
            "events": [[e, t] for e, t in trace.events],
            "p": trace.p,
        })
        shown = ",".join(f"{e}@{t}" for e, t in trace.events) or "-"
        text.append(f"{seq_str(sigma)} p={trace.p} events={shown}")
    config = {"maxLen": args.max_len, "alphabet": args.alphabet}
    return config, results, [], text


def _run_truestages(args):
    universe = Universe(args.max_len, args.alphabet)
    levels = _levels(args.levels)
    sys_ = _fresh()
    results = []
    text = []
    for alpha in levels:
        for sigma, tau in universe.prefix_pairs():
            related = int(sys_.leq(sigma, tau, alpha))
            results.append({
                "alpha": render(alpha),
                "sigma": seq_str(sigma),
                "tau": seq_str(tau),
                "related": related,
            })
            text.append(f"{render(alpha)}\t{seq_str(sigma)}\t{seq_str(tau)}\t{related}")
    config = {"maxLen": args.max_len, "alphabet": args.alphabet, "levels": args.levels}
    return config, results, [], text


def _run_hk_roundtrip(args):
    universe = Universe(args.max_len, args.alphabet)
    alpha = _notation(args.alpha)
    sys_ = _fresh()
    rng = random.Random(args.seed)
    results = []
    failures = []
    text = []
    for run in range(20):
        table = {s: rng.randrange(2) for s in universe.all_seqs()}
        fn = ApproxFn(alpha, table)
        eta, witness = approx_to_witness(sys_, fn, universe)
        family = witness_to_dsets(sys_, fn, witness, eta, alpha, universe)
        checked = 0
        mismatches = 0
        for x in universe.maximal():
            want, stable = approx_limit(sys_, fn, x)
            if not stable:
                continue
            checked += 1
            got = difference_value(sys_, family, eta, x)
            if got != want:
                mismatches += 1
                failures.append({
                    "run": run, "x": seq_str(x), "expected": want, "got": got,
                })
        results.append({
            "run": run, "eta": render(eta), "checked": checked,
            "mismatches": mismatches,
        })
        text.append(f"run={run} eta={render(eta)} checked={checked} mismatches={mismatches}")
    config = {
        "maxLen": args.max_len, "alphabet": args.alphabet,
        "alpha": args.alpha, "seed": args.seed,
    }
    return config, results, failures, text


def _run_hk_convert(args):
    universe = Universe(args.max_len, args.alphabet)
    data = _load_instance(args.instance)
    sys_ = _fresh()
    if "upsets" in data:
        alpha = _notation(data["alpha"])
        eta = _notation(args.eta if args.eta is not None else data["eta"])
        upsets = [upset_from_json(u) for u in data["upsets"]]
        fn, witness = dsets_to_witness(sys_, upsets, eta, alpha, universe)
        result = {
            "direction": "dsets-to-witness",
            "approx": approx_to_json(fn),
            "witness": witness_to_json(witness),
        }
    elif "approx" in data:
        fn = approx_from_json(data["approx"])
        eta, witness = approx_to_witness(sys_, fn, universe)
        family = witness_to_dsets(sys_, fn, witness, eta, fn.level, universe)
        result = {
            "direction": "approx-to-witness",
            "eta": render(eta),
            "witness": witness_to_json(witness),
            "family": [upset_to_json(u) for u in family],
        }
    else:
        raise InputError("instance must carry either 'upsets' or 'approx'")
    config = {
        "maxLen": args.max_len, "alphabet": args.alphabet,
        "instance": args.instance, "eta": args.eta,
    }
    text = ["conversion: " + json.dumps(result, sort_keys=True)]
    return config, [result], [], text


def _wadge_setup(data):
    lam = _notation(data["lambda"])
    universe = Universe(data["maxLen"], data["alphabet"])
    w0 = upset_from_json(data["W0"])
    w1 = upset_from_json(data["W1"])
    return lam, universe, w0, w1


def _run_wadge_decompose(args):
    data = _load_instance(args.instance)
    lam, universe, w0, w1 = _wadge_setup(data)
    sys_ = _fresh()
    tree = wadge_tree(sys_, w0, w1, lam, universe)
    result = {"rank": tree.rank, "tree": tree_to_json(tree)}
    config = {"instance": args.instance}
    text = [f"rank={tree.rank}", "tree: " + json.dumps(result["tree"], sort_keys=True)]
    return config, [result], [], text


def _run_wadge_eval(args):
    data = _load_instance(args.instance)
    lam, universe, w0, w1 = _wadge_setup(data)
    sys_ = _fresh()
    tree = wadge_tree(sys_, w0, w1, lam, universe)
    queries = [tuple(q) for q in data.get("queries", [])] or universe.maximal()
    results = []
    text = []
    for x in queries:
        value = int(decomposition_eval(sys_, tree, x))
        results.append({"x": seq_str(x), "value": value})
        text.append(f"{seq_str(x)}\t{value}")
    config = {"instance": args.instance}
    return config, results, [], text


def _game_setup(args):
    data = _load_instance(args.instance)
    game = game_from_json(data)
    return data, game, _fresh()


def _total_table(table: StrategyTable) -> StrategyTable:
    # A solver table stops at positions player I has already won; a
    # constant extension keeps the induced plays total without touching
    # any position that matters for correctness.
    return StrategyTable(table.side, table.depth, dict(table.moves), fallback=lambda key: 0)


def _instance_strategy(data, game, sys_, depth):
    if "strategy" in data:
        return _total_table(strategy_from_json(data["strategy"])), None
    outcome = solve(sys_, game, depth=depth)
    if outcome.status != "IWins":
        return None, outcome
    return _total_table(outcome.strategy), outcome


def _run_lsr_solve(args):
    data, game, sys_ = _game_setup(args)
    outcome = solve(sys_, game, depth=args.depth)
    result = {
        "status": outcome.status,
        "byTurn": outcome.by_turn,
        "strategy": strategy_to_json(outcome.strategy),
    }
    config = {"instance": args.instance, "depth": args.depth}
    text = [f"status={outcome.status} byTurn={outcome.by_turn}",
            "strategy: " + json.dumps(result["strategy"], sort_keys=True)]
    return config, [result], [], text


def _run_lsr_referee(args):
    data, game, sys_ = _game_setup(args)
    try:
        play = PartialPlay(
            tuple(data["play"]["xs"]),
            tuple((y, z) for y, z in data["play"]["yzs"]),
        )
    except KeyError as exc:
        raise InputError(f"instance lacks a play field: {exc}") from exc
    verdict = referee(sys_, game, play)
    result = {
        "F": list(verdict.f_indices),
        "ybar": seq_str(verdict.ybar),
        "zbar": seq_str(verdict.zbar),
        "status": verdict.status,
    }
    config = {"instance": args.instance}
    text = [f"status={verdict.status} F={result['F']} "
            f"ybar={result['ybar']} zbar={result['zbar']}"]
    return config, [result], [], text


def _run_lsr_separator(args):
    data, game, sys_ = _game_setup(args)
    try:
        y = tuple(data["y"])
    except KeyError as exc:
        raise InputError("instance lacks a y field") from exc
    table, outcome = _instance_strategy(data, game, sys_, args.depth)
    config = {"instance": args.instance, "depth": args.depth}
    if table is None:
        result = {"solver": outcome.status}
        return config, [result], [], [f"solver={outcome.status}"]
    checker = CorrectnessChecker(sys_, game, table)
    found = checker.separator_evidence(y, len(y))
    result = {
        "status": found.status,
        "sigma": None if found.sigma is None else seq_str(found.sigma),
    }
    text = [f"status={found.status} sigma={result['sigma']}"]
    return config, [result], [], text


def _run_lsr_adversarial(args):
    data, game, sys_ = _game_setup(args)
    try:
        y = tuple(data["y"])
    except KeyError as exc:
        raise InputError("instance lacks a y field") from exc
    v = tuple(data["v"]) if "v" in data else None
    bound = data.get("searchBound", 3)
    depth = args.depth if args.depth is not None else game.depth
    table, outcome = _instance_strategy(data, game, sys_, None)
    config = {"instance": args.instance, "depth": args.depth}
    if table is None:
        result = {"solver": outcome.status}
        return config, [result], [], [f"solver={outcome.status}"]
    checker = CorrectnessChecker(sys_, game, table)
    transcript = adversarial_play(checker, y, v, depth, bound)
    result = transcript_to_json(transcript)
    text = [f"outcome={transcript.outcome} steps={len(transcript.steps)}",
            "transcript: " + json.dumps(result, sort_keys=True)]
    return config, [result], [], text


_HANDLERS = {
    ("verify", None): _run_verify,
    ("jump", None): _run_jump,
    ("truestages", None): _run_truestages,
    ("hk", "roundtrip"): _run_hk_roundtrip,
    ("hk", "convert"): _run_hk_convert,
    ("wadge", "decompose"): _run_wadge_decompose,
    ("wadge", "eval"): _run_wadge_eval,
    ("lsr", "solve"): _run_lsr_solve,
    ("lsr", "referee"): _run_lsr_referee,
    ("lsr", "separator"): _run_lsr_separator,
    ("lsr", "adversarial"): _run_lsr_adversarial,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    action = getattr(args, "action", None)
    handler = _HANDLERS[(args.command, action)]
    name = args.command if action is None else f"{args.command} {action}"
    try:
        config, results, failures, text = handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    except (ParseError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    report = {
        "command": name,
        "config": config,
        "results": results,
        "failures": failures,
    }
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(f"command: {name}")
        print("config: " + json.dumps(config, sort_keys=True))
        for line in text:
            print(line)
        if failures:
            print(f"failures: {len(failures)}")
    return 1 if failures else 0
