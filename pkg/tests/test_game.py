import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instance_tools import pointwise_tree, seeded_game_instance, y_mismatch_game
from truestages.game import (
    PRE_ROOT,
    CorrectnessChecker,
    EvidenceResult,
    ExtendResult,
    GameInstance,
    PairTree,
    PartialPlay,
    ResourceBoundError,
    SolveResult,
    StrategyTable,
    StrategyUndefinedError,
    adversarial_play,
    apply_strategy,
    extract_reduction,
    game_from_json,
    game_to_json,
    pair_tree_from_json,
    pair_tree_to_json,
    referee,
    solve,
    strategy_from_json,
    strategy_to_json,
)
from truestages.hierarchy import UpsetRep, eval_at
from truestages.jump import DefaultOperator
from truestages.ordinals import ZERO, compare, parse_ordinal, render
from truestages.stages import TrueStageSystem

LEVELS = {s: parse_ordinal(s) for s in ["0", "1", "2", "w"]}
ROOT_ONLY = PairTree.from_pairs([((), ())])
FULL = PairTree(full=True)


@pytest.fixture(scope="module")
def sys_():
    return TrueStageSystem(DefaultOperator())


@pytest.fixture(scope="module")
def quick_win(sys_):
    """W holds everything and T1 holds nothing beyond the root, so the
    first referee check already fires."""
    w = UpsetRep(ZERO, frozenset({()}))
    return GameInstance(ZERO, w, FULL, ROOT_ONLY, alphabet=2, depth=3)


@pytest.fixture(scope="module")
def never_win(sys_):
    """W is empty and T0 is full, so the referee always continues."""
    w = UpsetRep(ZERO, frozenset())
    return GameInstance(ZERO, w, FULL, ROOT_ONLY, alphabet=2, depth=3)


def constant_zero():
    return StrategyTable("I", 8, {}, fallback=lambda key: 0)


# -- pair trees -----------------------------------------------------------


def test_from_pairs_closes_under_truncation():
    tree = PairTree.from_pairs([((1, 2), (3, 4))])
    assert tree.contains((1,), (3,))
    assert tree.contains((), ())
    assert not tree.contains((1,), (4,))


def test_explicit_tree_must_be_truncation_closed():
    with pytest.raises(ValueError, match="not truncation-closed"):
        PairTree(pairs=frozenset({((1,), (2,))}))


def test_pair_lengths_must_agree():
    with pytest.raises(ValueError, match="pair lengths differ"):
        PairTree.from_pairs([((1,), (2, 2))])


def test_full_tree_matches_any_equal_length_pair():
    assert FULL.contains((4, 5), (6, 7))
    assert not FULL.contains((4,), (6, 7))


def test_full_tree_rejects_explicit_pairs():
    with pytest.raises(ValueError, match="must not list"):
        PairTree(full=True, pairs=frozenset({((), ())}))


# -- instances ------------------------------------------------------------


def test_instance_level_mismatch_rejected():
    w = UpsetRep(LEVELS["1"], frozenset())
    with pytest.raises(ValueError, match="W lives at level 1, expected 2"):
        GameInstance(LEVELS["2"], w, FULL, FULL, 2, 3)


# -- referee --------------------------------------------------------------


def test_referee_quick_win_round_one(sys_, quick_win):
    v = referee(sys_, quick_win, PartialPlay((0,), ((0, 0),)))
    assert v.f_indices == (1,)
    assert v.ybar == (0,)
    assert v.zbar == (0,)
    assert v.status == "IWon"


def test_referee_never_win_continues(sys_, never_win):
    for play in [
        PartialPlay((0,), ((0, 0),)),
        PartialPlay((1, 0), ((1, 1), (0, 1))),
        PartialPlay((1, 1, 1), ((0, 0), (0, 0), (0, 0))),
    ]:
        assert referee(sys_, never_win, play).status == "Continues"


def test_referee_level_zero_collects_all_rounds(sys_, never_win):
    v = referee(sys_, never_win, PartialPlay((0, 1, 0), ((0, 0), (1, 1), (0, 0))))
    assert v.f_indices == (1, 2, 3)


def test_referee_rejects_mismatched_round_counts(sys_, never_win):
    with pytest.raises(ValueError, match="player I has made 2 moves but player II has made 1"):
        referee(sys_, never_win, PartialPlay((0, 1), ((0, 0),)))
    with pytest.raises(ValueError, match="at least one completed round"):
        referee(sys_, never_win, PartialPlay((), ()))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_referee_final_round_always_counts(data):
    sys2 = TrueStageSystem(DefaultOperator())
    g = seeded_game_instance(data.draw(st.integers(0, 9)))
    n = data.draw(st.integers(1, 4))
    xs = tuple(data.draw(st.integers(0, 1)) for _ in range(n))
    yzs = tuple(
        (data.draw(st.integers(0, 1)), data.draw(st.integers(0, 1))) for _ in range(n)
    )
    v = referee(sys2, g, PartialPlay(xs, yzs))
    assert n in v.f_indices
    assert len(v.ybar) == len(v.f_indices) == len(v.zbar)


# -- solver ---------------------------------------------------------------


def test_solve_quick_win_by_turn_one(sys_, quick_win):
    r = solve(sys_, quick_win)
    assert r.status == "IWins"
    assert r.by_turn == 1
    assert r.strategy.side == "I"
    assert r.strategy.moves == {(): 0}


def test_solve_never_win_undetermined_at_every_depth(sys_, never_win):
    for depth in (1, 2, 3):
        r = solve(sys_, never_win, depth=depth)
        assert r.status == "Undetermined"
        assert r.strategy.side == "II"


def test_solve_y_mismatch_wins_by_turn_two(sys_):
    for name in ["0", "1", "2"]:
        r = solve(sys_, y_mismatch_game(LEVELS[name]))
        assert r.status == "IWins"
        assert r.by_turn == 2


def test_solve_node_budget_is_enforced(sys_, quick_win):
    with pytest.raises(ResourceBoundError, match="exceeded 2 referee evaluations"):
        solve(sys_, quick_win, max_nodes=2)


def test_winning_strategy_replay_beats_every_reply(sys_):
    g = y_mismatch_game(ZERO)
    r = solve(sys_, g)

    def walk(xs, yzs):
        x = r.strategy.moves[yzs]
        xs2 = xs + (x,)
        for y in range(g.alphabet):
            for z in range(g.alphabet):
                yzs2 = yzs + ((y, z),)
                if referee(sys_, g, PartialPlay(xs2, yzs2)).status == "IWon":
                    continue
                assert len(xs2) < r.by_turn
                walk(xs2, yzs2)

    walk((), ())


# -- strategies -----------------------------------------------------------


def test_apply_strategy_pre_root_is_empty():
    assert apply_strategy(constant_zero(), (7, 7), PRE_ROOT) == ()


def test_apply_strategy_constant_zero():
    assert apply_strategy(constant_zero(), (9,), (4,)) == (0, 0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), max_size=4))
def test_apply_strategy_length_law(sigma):
    sigma = tuple(sigma)
    y = tuple(1 for _ in sigma)
    assert len(apply_strategy(constant_zero(), y, sigma)) == len(sigma) + 1


def test_apply_strategy_needs_enough_y():
    with pytest.raises(ValueError, match="need 2 values of y, got 1"):
        apply_strategy(constant_zero(), (1,), (0, 0))


def test_apply_strategy_rejects_side_two():
    table = StrategyTable("II", 3, {})
    with pytest.raises(ValueError, match="needs a side I strategy"):
        apply_strategy(table, (), ())


def test_undefined_play_raises():
    table = StrategyTable("I", 3, {(): 0})
    with pytest.raises(StrategyUndefinedError, match="undefined after opponent moves"):
        apply_strategy(table, (1,), (1,))


# -- correctness ----------------------------------------------------------


def test_pre_root_is_strongly_correct_at_every_level(sys_, never_win):
    chk = CorrectnessChecker(sys_, never_win, constant_zero())
    for name in ["0", "1", "2"]:
        assert chk.is_strongly_correct((0, 0, 0), PRE_ROOT, LEVELS[name])


def test_zero_correct_matches_referee_run(sys_):
    g = y_mismatch_game(ZERO)
    r = solve(sys_, g)
    table = StrategyTable("I", 8, dict(r.strategy.moves), fallback=lambda k: 0)
    chk = CorrectnessChecker(sys_, g, table)
    for y in itertools.product(range(2), repeat=3):
        for n in range(3):
            for sigma in itertools.product(range(2), repeat=n):
                xs: list[int] = []
                yzs = ()
                continues = True
                for i in range(len(sigma)):
                    xs.append(table.move_at(yzs))
                    yzs = yzs + ((y[i], sigma[i]),)
                    v = referee(sys_, g, PartialPlay(tuple(xs), yzs))
                    if v.status == "IWon":
                        continues = False
                        break
                assert chk.is_correct(y, sigma, ZERO) == continues


def test_correctness_laws_on_sampled_triples(sys_):
    rng = random.Random(4)
    for name in ["0", "1", "2"]:
        xi = LEVELS[name]
        base = seeded_game_instance(3)
        g = GameInstance(xi, UpsetRep(xi, base.w.generators), base.t0, base.t1, 2, 3)
        chk = CorrectnessChecker(sys_, g, constant_zero())
        levels = [LEVELS[t] for t in ["0", "1", "2"] if compare(LEVELS[t], xi) <= 0]
        pool = [PRE_ROOT] + [
            s for n in range(4) for s in itertools.product(range(2), repeat=n)
        ]
        for _ in range(80):
            y = tuple(rng.randrange(2) for _ in range(4))
            sigma = rng.choice(pool)
            alpha = rng.choice(levels)
            strong = chk.is_strongly_correct(y, sigma, alpha)
            plain = chk.is_correct(y, sigma, alpha)
            if strong:
                assert plain
            if compare(alpha, ZERO) == 0:
                assert strong == plain
            if plain:
                for beta in levels:
                    if compare(beta, alpha) < 0:
                        assert chk.is_strongly_correct(y, sigma, beta)
            if strong and sigma is not PRE_ROOT:
                for i in range(len(sigma) + 1):
                    rho = sigma[:i]
                    if chk.tri_leq(y, rho, sigma, alpha):
                        assert chk.is_strongly_correct(y, rho, alpha)
            if plain and sigma is not PRE_ROOT:
                for i in range(len(sigma)):
                    rho = sigma[:i]
                    if chk.is_correct(y, rho, alpha):
                        assert chk.tri_leq(y, rho, sigma, alpha)
            assert chk.is_strongly_correct(y, PRE_ROOT, alpha)


def test_limit_level_correctness_runs(sys_):
    base = seeded_game_instance(7)
    w = LEVELS["w"]
    g = GameInstance(w, UpsetRep(w, base.w.generators), base.t0, base.t1, 2, 3)
    chk = CorrectnessChecker(sys_, g, constant_zero())
    y = (0, 1, 0, 1)
    assert chk.is_strongly_correct(y, PRE_ROOT, w)
    assert chk.is_correct(y, (), w)
    r = chk.extend_correct(y, PRE_ROOT, (), w, search_bound=3)
    assert r.status == "Found"
    assert chk.is_strongly_correct(y, r.tau, w)


# -- extension search -----------------------------------------------------


def test_extend_at_level_zero_returns_sigma(sys_, never_win):
    chk = CorrectnessChecker(sys_, never_win, constant_zero())
    assert chk.extend_correct((0, 0, 0), PRE_ROOT, (), ZERO, 3) == ExtendResult("Found", ())


def test_extend_with_empty_search_space(sys_):
    one = LEVELS["1"]
    g = GameInstance(one, UpsetRep(one, frozenset()), FULL, ROOT_ONLY, 2, 3)
    chk = CorrectnessChecker(sys_, g, constant_zero())
    r = chk.extend_correct((0, 0, 0), PRE_ROOT, (), one, search_bound=0)
    assert r == ExtendResult("BoundExhausted")


def test_extend_found_is_independently_verified(sys_):
    one = LEVELS["1"]
    g = GameInstance(one, UpsetRep(one, frozenset()), FULL, ROOT_ONLY, 2, 3)
    chk = CorrectnessChecker(sys_, g, constant_zero())
    y = (0, 0, 0, 0)
    r = chk.extend_correct(y, PRE_ROOT, (), one, search_bound=3)
    assert r.status == "Found"
    assert chk.is_strongly_correct(y, r.tau, one)
    exhaustive = [
        tau for n in range(3) for tau in itertools.product(range(2), repeat=n)
        if chk.is_strongly_correct(y, tau, one)
    ]
    assert r.tau in exhaustive


def test_extend_precondition_errors(sys_, quick_win):
    chk = CorrectnessChecker(sys_, quick_win, constant_zero())
    y = (0, 0, 0)
    with pytest.raises(ValueError, match="one-element extension"):
        chk.extend_correct(y, PRE_ROOT, (0, 0), ZERO, 3)
    with pytest.raises(ValueError, match="rho is not strongly 0-correct"):
        chk.extend_correct(y, (0,), (0, 0), ZERO, 3)
    with pytest.raises(ValueError, match="sigma is not 0-correct"):
        chk.extend_correct(y, (), (0,), LEVELS["1"], 3)


# -- evidence and adversarial play ----------------------------------------


def test_evidence_on_full_w(sys_, quick_win):
    chk = CorrectnessChecker(sys_, quick_win, constant_zero())
    assert chk.separator_evidence((0, 0, 0), 3) == EvidenceResult("Evidence", ())


def test_no_evidence_on_empty_w(sys_, never_win):
    chk = CorrectnessChecker(sys_, never_win, constant_zero())
    for bound in (0, 1, 2, 3):
        assert chk.separator_evidence((0, 0, 0), bound).status == "NoneWithin"


def test_evidence_separates_on_winning_instance(sys_):
    g = y_mismatch_game(ZERO)
    r = solve(sys_, g)
    table = StrategyTable("I", 8, dict(r.strategy.moves), fallback=lambda k: 0)
    chk = CorrectnessChecker(sys_, g, table)
    ev1 = chk.separator_evidence((1, 1, 1, 1), 4)
    assert ev1.status == "NoneWithin"
    ev0 = chk.separator_evidence((0, 0, 0, 0), 4)
    assert ev0.status == "Evidence"
    assert chk.is_strongly_correct((0, 0, 0, 0), ev0.sigma, g.xi)


def test_adversarial_halts_on_winning_instance(sys_, quick_win):
    r = solve(sys_, quick_win)
    table = StrategyTable("I", 8, dict(r.strategy.moves), fallback=lambda k: 0)
    chk = CorrectnessChecker(sys_, quick_win, table)
    t = adversarial_play(chk, (0, 0, 0), (0, 0, 0), depth=3, search_bound=3)
    assert t.outcome == "PlayerIWon"
    assert len(t.steps) == 1
    assert t.steps[0].sigma == ()
    assert t.failed_extension == (0,)


def test_adversarial_survives_on_undetermined_instance(sys_, never_win):
    chk = CorrectnessChecker(sys_, never_win, constant_zero())
    t = adversarial_play(chk, (0, 0, 0, 0), None, depth=3, search_bound=2)
    assert t.outcome == "ReachedDepth"
    assert [s.sigma for s in t.steps] == [(), (0,), (0, 0), (0, 0, 0)]
    for step in t.steps:
        assert step.strongly_correct
        assert step.witness_set_matches
    assert [s.appended_matches for s in t.steps] == [None, True, True, True]


def test_adversarial_t1_mode_tracks_witness(sys_, never_win):
    w = UpsetRep(ZERO, frozenset({()}))
    g = GameInstance(ZERO, w, ROOT_ONLY, FULL, alphabet=2, depth=3)
    chk = CorrectnessChecker(sys_, g, constant_zero())
    t = adversarial_play(chk, (1, 0, 1, 0), (1, 1, 0, 0), depth=3, search_bound=2)
    assert t.mode == "T1"
    assert t.outcome == "ReachedDepth"
    assert [s.sigma for s in t.steps] == [(), (1,), (1, 1), (1, 1, 0)]
    for step in t.steps:
        assert step.strongly_correct
        assert step.witness_set_matches
        assert step.witness_consistent in (None, True)


def test_adversarial_without_evidence_reports_it(sys_, never_win):
    chk = CorrectnessChecker(sys_, never_win, constant_zero())
    t = adversarial_play(chk, (0, 0, 0), (0, 0, 0), depth=2, search_bound=2)
    assert t.outcome == "NoEvidence"
    assert t.steps == ()


# -- reduction extraction -------------------------------------------------


def test_reduction_replay_never_loses(sys_, never_win):
    r = solve(sys_, never_win)
    assert r.status == "Undetermined"
    for xs in itertools.product(range(2), repeat=3):
        ys, zs = extract_reduction(never_win, r.strategy, xs)
        yzs = tuple(zip(ys, zs))
        for j in range(1, len(xs) + 1):
            v = referee(sys_, never_win, PartialPlay(xs[:j], yzs[:j]))
            assert v.status == "Continues"


def test_reduction_is_prefix_monotone(sys_, never_win):
    r = solve(sys_, never_win)
    long = extract_reduction(never_win, r.strategy, (0, 1, 0))
    short = extract_reduction(never_win, r.strategy, (0, 1))
    assert long[0][:2] == short[0]
    assert long[1][:2] == short[1]


def test_reduction_needs_side_two(sys_, never_win):
    with pytest.raises(ValueError, match="needs a side II strategy"):
        extract_reduction(never_win, constant_zero(), (0,))


# -- serialization --------------------------------------------------------


def test_pair_tree_json_round_trip():
    assert pair_tree_from_json(pair_tree_to_json(ROOT_ONLY)) == ROOT_ONLY
    assert pair_tree_from_json(pair_tree_to_json(FULL)) == FULL
    tree = pointwise_tree(2, 3, lambda a, b: a == b)
    assert pair_tree_from_json(pair_tree_to_json(tree)) == tree


def test_game_json_round_trip(quick_win):
    assert game_from_json(game_to_json(quick_win)) == quick_win
    g = y_mismatch_game(LEVELS["1"])
    assert game_from_json(game_to_json(g)) == g


def test_strategy_json_round_trip(sys_, quick_win, never_win):
    r1 = solve(sys_, quick_win)
    assert strategy_from_json(strategy_to_json(r1.strategy)) == r1.strategy
    r2 = solve(sys_, never_win, depth=2)
    assert strategy_from_json(strategy_to_json(r2.strategy)) == r2.strategy


def test_finite_depth_evidence_artifact(sys_):
    """A winning strategy can open with a move whose singleton already
    lies in W.  The empty sigma is strongly correct for every strategy
    and its play is that one move, so every y gets evidence, including
    y carried by T1.  The infinite refutation would extend sigma
    indefinitely, but with fewer rounds than byTurn nothing has been
    graded yet, so no finite contradiction exists.  Separation checks
    therefore use instances whose win runs through the grading of II's
    answers; this test pins the artifact itself."""
    g = seeded_game_instance(10)
    r = solve(sys_, g)
    assert r.status == "IWins"
    assert r.by_turn == 2
    table = StrategyTable("I", 8, dict(r.strategy.moves), fallback=lambda k: 0)
    chk = CorrectnessChecker(sys_, g, table)
    opening = table.move_at(())
    assert eval_at(sys_, g.w, (opening,))
    carrier = next(
        (y, v)
        for y in itertools.product(range(2), repeat=3)
        for v in itertools.product(range(2), repeat=3)
        if all(g.t1.contains(y[:j], v[:j]) for j in range(1, 4))
    )
    y, v = carrier
    assert chk.separator_evidence(y, 3) == EvidenceResult("Evidence", ())
    # every 0-correct sigma is still shorter than byTurn, and the
    # adversarial run never survives to the depth bound
    for n in range(4):
        for sigma in itertools.product(range(2), repeat=n):
            if chk.is_correct(y, sigma, ZERO):
                assert len(sigma) < r.by_turn
    assert adversarial_play(chk, y, v, 3, search_bound=3).outcome != "ReachedDepth"
