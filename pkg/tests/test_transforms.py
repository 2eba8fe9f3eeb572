import random
from fractions import Fraction as F

import pytest

from owpuzz import dist as D
from owpuzz import puzzle as P
from owpuzz import transforms as T
from owpuzz.corpus import random_puzzle
from owpuzz.errors import ContractError, ResourceError


def half():
    return P.Puzzle({("0", "0"): F(1, 2), ("1", "0"): F(1, 2)}, {("0", "0"): 1})


def fixed_rate(accept, key_bits=2):
    """Uniform key on one puzzle, each key accepted with probability ``accept``."""
    keys = D.all_bitstrings(key_bits)
    return P.Puzzle(D.FiniteDist.uniform([(k, "0") for k in keys]), {(k, "0"): accept for k in keys})


@pytest.fixture(scope="module")
def corpus():
    rng = random.Random(11)
    return [random_puzzle(rng) for _ in range(60)]


def test_or_repeat_example():
    out, rep = T.or_repeat(half(), 3)
    assert rep.output.alpha == F(1, 8)
    assert rep.certified


def test_or_repeat_exact(corpus):
    for p in corpus:
        a, b = P.measure(p).alpha, P.measure(p).beta
        for t in (2, 3):
            _, rep = T.or_repeat(p, t)
            assert rep.output.alpha == a**t
            assert rep.output.beta == 1 - (1 - b) ** t


def test_and_repeat_exact(corpus):
    for p in corpus:
        m = P.measure(p)
        _, rep = T.and_repeat(p, 3)
        assert rep.output.beta == m.beta**3
        assert rep.output.alpha <= 3 * m.alpha


def test_and_repeat_notes_ev():
    q = P.Puzzle(half().sampler, half().verifier, ev=False)
    _, rep = T.and_repeat(q, 2)
    assert rep.notes["security_bound_applies"] is False


def test_repeat_rejects_bad_t():
    with pytest.raises(ContractError):
        T.or_repeat(half(), 0)
    with pytest.raises(ContractError):
        T.and_repeat(half(), F(3, 2))


def test_ver_relax(corpus):
    for p in corpus:
        m = P.measure(p)
        for t in (F(1, 4), F(1, 2)):
            out, rep = T.ver_relax(p, t)
            assert rep.output.alpha < t
            assert rep.output.beta <= m.beta + m.alpha / t
            assert out.ev is False


def test_ver_relax_accepts_high_failure_puzzles():
    out, rep = T.ver_relax(half(), F(1, 2))
    assert rep.notes["auto_accepted"] == ["0"]
    assert rep.output == P.ParamPair(0, 1)


def test_ver_relax_threshold_range():
    with pytest.raises(ContractError):
        T.ver_relax(half(), 0)


def test_bot_guard(corpus):
    for p in (q for q in corpus if q.ev):
        m = P.measure(p)
        out, rep = T.bot_guard(p)
        assert rep.output.alpha <= F(1, 4)
        assert rep.output.beta <= m.alpha + m.beta
        assert out.puzzle_len == p.puzzle_len + 1


def test_bot_guard_fixed_rate():
    # correctness error of the guarded puzzle is E[v(1 - v)]
    out, rep = T.bot_guard(fixed_rate(F(1, 2)))
    assert rep.output.alpha == F(1, 4)
    assert rep.notes["bottom_mass"] == F(1, 2)


def test_bot_guard_requires_ev():
    q = P.Puzzle(half().sampler, half().verifier, ev=False)
    with pytest.raises(ContractError):
        T.bot_guard(q)


@pytest.mark.parametrize("mode", ["general", "ev"])
def test_guarantee_bounds(corpus, mode):
    for p in corpus[:25]:
        if mode == "ev" and not p.ev:
            continue
        _, rep = T.correctness_guarantee(p, mode, 3)
        assert rep.certified, (p, rep)


def test_guarantee_general_counterexample_to_half_alpha():
    # an always-rejecting puzzle: guaranteed break reaches 1 - 2^-lam, above lam * (alpha/2 + beta) = 1/2
    p = P.Puzzle({("0", "0"): 1}, {})
    _, rep = T.correctness_guarantee(p, "general", 1)
    assert rep.output.beta == 1
    assert rep.output.beta > 1 * (rep.input.alpha / 2 + rep.input.beta)
    assert rep.certified


def test_combine_is_product_of_guaranteed_breaks(corpus):
    for p, q in zip(corpus[:10], corpus[10:20]):
        out, rep = T.combine([p, q], 2)
        breaks = rep.notes["guaranteed_breaks"]
        assert rep.output.beta == breaks[0] * breaks[1]
        assert rep.output.alpha <= 2 * F(1, 4)


def test_combine_needs_two():
    with pytest.raises(ContractError):
        T.combine([half()], 2)


def test_random_input(corpus):
    for p in corpus:
        out, rep = T.random_input(p)
        assert rep.output == rep.input
        pad = out.puzzle_marginal().map(lambda s: s[:p.key_len])
        assert pad == D.FiniteDist.uniform_bits(p.key_len)


def test_step_clock():
    clock = T.StepClock(3)
    clock.tick(3)
    with pytest.raises(T.BudgetExceeded):
        clock.tick()


def test_universal_ev_replaces_slow_entries():
    def good(lam, clock):
        clock.tick()
        return fixed_rate(F(1, 2))

    def slow(lam, clock):
        while True:
            clock.tick()

    out, rep = T.universal_ev([good, slow, good], 2)
    assert rep.notes["contributors"] == [(0, 0)]
    assert len(rep.notes["pairs"]) == 4
    assert rep.certified


def test_universal_ev_empty():
    with pytest.raises(ContractError):
        T.universal_ev([], 2)


def test_nonuniform_combine():
    fam = {1: half(), 2: fixed_rate(F(1, 2))}
    _, rep = T.nonuniform_combine(fam, 2, lam=2)
    assert rep.name == "nonuniform_combine"
    with pytest.raises(ContractError):
        T.nonuniform_combine(fam, 3)


def test_min_error_verifier():
    sampler = D.FiniteDist.uniform([("0", "0"), ("1", "1")])
    p, score = T.min_error_verifier(sampler)
    # alpha + beta >= 1 always, and the diagonal table achieves it
    assert score == 1
    assert P.correctness_error(p) + P.optimal_break_value(p) == 1


def test_min_error_verifier_limit():
    # 8 keys x 2 puzzles = 16 cells is the largest accepted table
    sampler = D.FiniteDist.uniform([(k, k[0]) for k in D.all_bitstrings(3)])
    with pytest.raises(ResourceError):
        T.min_error_verifier(D.FiniteDist.uniform([(k, k[:2]) for k in D.all_bitstrings(3)]))
    assert T.MIN_ERROR_TABLE_LIMIT == 16 and len(sampler) == 8


def test_guarantee_examples():
    always_reject = P.Puzzle({("0", "0"): 1}, {})
    _, rep = T.correctness_guarantee(always_reject, "general", 3)
    assert rep.output.alpha == 0
    _, rep = T.correctness_guarantee(fixed_rate(F(1, 2)), "ev", 2)
    assert rep.output.alpha == F(1, 16)


def test_and_repeat_examples():
    _, rep = T.and_repeat(fixed_rate(F(3, 4)), 2)
    assert rep.output.alpha == F(7, 16) and rep.claimed.alpha == F(1, 2)
    _, rep = T.and_repeat(fixed_rate(F(1, 2)), 3)
    assert rep.output.beta == F(1, 8)


def test_universal_ev_all_over_budget():
    def slow(lam, clock):
        while True:
            clock.tick()

    _, rep = T.universal_ev([slow], 1)
    assert rep.notes["contributors"] == []
    assert rep.output == P.ParamPair(0, 1)
