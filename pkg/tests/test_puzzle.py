import math
import random
from fractions import Fraction as F

import pytest

from owpuzz import dist as D
from owpuzz import puzzle as P
from owpuzz.corpus import planted_good_puzzle, random_adversary, random_puzzle
from owpuzz.errors import DomainError, ValidationError


def half_puzzle():
    """Two equally likely keys on one puzzle, only key 0 accepted: alpha = 1/2, beta = 1."""
    sampler = {("0", "0"): F(1, 2), ("1", "0"): F(1, 2)}
    return P.Puzzle(sampler, {("0", "0"): 1})


def test_point_mass_puzzle():
    p = P.Puzzle(D.FiniteDist.point(("1", "0")), {("1", "0"): 1})
    assert P.measure(p) == P.ParamPair(0, 1)


def test_diagonal_puzzle_is_broken():
    p = P.diagonal_puzzle(D.all_bitstrings(2))
    assert P.correctness_error(p) == 0
    assert P.optimal_break_value(p) == 1


def test_blind_puzzle_accepts_any_key():
    # the verifier cannot tell which key was sampled, so any key wins
    for n in (1, 3):
        assert P.measure(P.blind_puzzle(n)) == P.ParamPair(0, 1)


def test_planted_puzzle():
    assert P.measure(planted_good_puzzle(6)) == P.ParamPair(F(63, 64), F(1, 64))


def test_half_puzzle():
    p = half_puzzle()
    assert P.measure(p) == P.ParamPair(F(1, 2), 1)
    assert P.conditional_failures(p) == {"0": F(1, 2)}


def test_always_reject():
    p = P.Puzzle({("0", "0"): 1}, {})
    assert P.measure(p) == P.ParamPair(1, 0)


def test_param_pair_validation():
    with pytest.raises(ValidationError):
        P.ParamPair(F(3, 2), 0)


def test_verifier_range_checked():
    with pytest.raises(ValidationError):
        P.Puzzle({("0", "0"): 1}, {("0", "0"): F(2)})


def test_optimal_adversary_achieves_value():
    rng = random.Random(5)
    for _ in range(100):
        p = random_puzzle(rng)
        beta, adv = P.optimal_break(p)
        assert P.adversary_break(p, adv) == beta
        assert beta >= 1 - P.correctness_error(p)
        assert P.adversary_break(p, random_adversary(rng, p)) <= beta


def test_honest_adversary_matches_correctness():
    rng = random.Random(6)
    for _ in range(50):
        p = random_puzzle(rng)
        honest = P.Adversary.true_conditional(p)
        assert P.adversary_break(p, honest) == 1 - P.correctness_error(p)
        assert P.kl_sampling_hardness(p, honest) == 0


def test_adversary_must_cover_puzzles():
    p = half_puzzle()
    with pytest.raises(DomainError):
        P.adversary_break(p, P.Adversary({}))


def test_constant_and_uniform_adversaries():
    p = half_puzzle()
    assert P.adversary_break(p, P.Adversary.constant_key(p, "1")) == 0
    assert P.adversary_break(p, P.Adversary.uniform_key(p)) == F(1, 2)


def test_distributional_kl_floor():
    assert P.distributional_kl_floor(F(1, 4)) == pytest.approx(0.180337, abs=1e-6)
    assert P.distributional_kl_floor(0) == 0
    with pytest.raises(DomainError):
        P.distributional_kl_floor(2)


def test_kl_floor_holds_on_corpus():
    rng = random.Random(7)
    for _ in range(100):
        p = random_puzzle(rng)
        a = random_adversary(rng, p)
        gap = P.distributional_gap(p, a)
        assert P.kl_sampling_hardness(p, a) >= P.distributional_kl_floor(gap) - 1e-9


def test_verifier_dpi_witness():
    rng = random.Random(8)
    for _ in range(100):
        p = random_puzzle(rng)
        lhs, rhs, ok = P.verifier_dpi_witness(p, random_adversary(rng, p))
        assert ok and (rhs == math.inf or lhs <= rhs + 1e-9)


def test_joint_entropies_chain():
    p = P.diagonal_puzzle(D.all_bitstrings(2))
    h = P.joint_entropies(p)
    assert h["H(k,s)"] == pytest.approx(2.0)
    assert h["H(k|s)"] == pytest.approx(0.0)


def test_product_puzzle_matches_flat_enumeration():
    rng = random.Random(9)
    for mode in ("and", "or"):
        for _ in range(30):
            p = random_puzzle(rng, max_key_bits=2, max_puzzle_bits=2, max_support=4)
            prod = P.ProductPuzzle([p, p], mode)
            flat = P.flatten(prod)
            assert P.measure(prod) == P.measure(flat)


def test_materialize_roundtrip():
    p = half_puzzle()
    assert P.materialize_verifier(p) == {("0", "0"): 1}


def test_trivial_puzzle():
    assert P.measure(P.trivial_puzzle()) == P.ParamPair(0, 1)
