"""Exit criteria, one test each, at the stated tolerances and runtime limits.

Every test prints a PASS/FAIL line; the lines are repeated in the
"acceptance criteria" section of the pytest summary.
"""

import itertools
import math
import random
from fractions import Fraction as F

import pytest

from owpuzz import dist as D
from owpuzz import efid as E
from owpuzz import primitives as PR
from owpuzz import puzzle as P
from owpuzz import transforms as T
from owpuzz.corpus import (
    planted_good_puzzle, puzzle_corpus, random_channel, random_dist, random_dist_bits,
    random_efid_pair, random_forger, random_prg, random_puzzle,
)

pytestmark = pytest.mark.acceptance

CORPUS_SIZE = 500
# measured (alpha, beta) of every puzzle the suites build, for the floor check
MEASURED = []


@pytest.fixture(scope="module")
def corpus():
    # at most 8 keys x 8 puzzles; every verifier counts as efficient so all transforms apply
    return puzzle_corpus(seed=2024, count=CORPUS_SIZE, max_support=8, ev=True)


def test_c01_data_processing(criterion):
    rng = random.Random(1)
    with criterion(1, "KL never increases under a channel (1e4 triples, supports <= 16)", 10) as c:
        worst = -math.inf
        for _ in range(10_000):
            bits = rng.randint(1, 4)
            values = D.all_bitstrings(bits)
            p = random_dist(rng, values)
            q = random_dist(rng, values, min_size=rng.choice([1, len(values)]))
            ch = random_channel(rng, values, D.all_bitstrings(rng.randint(1, 4)))
            before = D.kl_divergence(p, q)
            after = D.kl_divergence(D.apply_channel(p, ch), D.apply_channel(q, ch))
            if before != math.inf:
                worst = max(worst, after - before)
            assert after <= before + 1e-9, (p, q, before, after)
        c.detail = f"max increase {worst:.3e}"


def test_c02_or_repeat(corpus, criterion):
    with criterion(2, "or_repeat: alpha^t and 1-(1-beta)^t exactly, <= t*beta when beta <= 1/t", 30) as c:
        checked_bound = 0
        for p in corpus:
            m = P.measure(p)
            for t in (2, 3, 4):
                _, rep = T.or_repeat(p, t)
                MEASURED.append(rep.output)
                assert rep.output.alpha == m.alpha**t
                assert rep.output.beta == 1 - (1 - m.beta) ** t
                if m.beta <= F(1, t):
                    checked_bound += 1
                    assert rep.output.beta <= t * m.beta
        c.detail = f"{3 * len(corpus)} instances, t*beta bound exercised on {checked_bound}"


def test_c03_and_repeat(corpus, criterion):
    with criterion(3, "and_repeat: beta^t exactly, alpha <= t*alpha", 30) as c:
        for p in corpus:
            m = P.measure(p)
            for t in (2, 3, 4):
                _, rep = T.and_repeat(p, t)
                MEASURED.append(rep.output)
                assert rep.output.beta == m.beta**t
                assert rep.output.alpha <= t * m.alpha
        c.detail = f"{3 * len(corpus)} instances"


def test_c04_ver_relax(corpus, criterion):
    with criterion(4, "ver_relax: alpha < t and beta <= beta* + alpha/t", 30) as c:
        for p in corpus:
            m = P.measure(p)
            for t in (F(1, 4), F(1, 2)):
                _, rep = T.ver_relax(p, t)
                MEASURED.append(rep.output)
                assert rep.output.alpha < t
                assert rep.output.beta <= m.beta + m.alpha / t
        c.detail = f"{2 * len(corpus)} instances"


def test_c05_bot_guard(corpus, criterion):
    with criterion(5, "bot_guard: alpha <= 1/4 and beta <= beta* + alpha", 30) as c:
        worst = F(0)
        for p in corpus:
            m = P.measure(p)
            _, rep = T.bot_guard(p)
            MEASURED.append(rep.output)
            assert rep.output.alpha <= F(1, 4)
            assert rep.output.beta <= m.beta + m.alpha
            worst = max(worst, rep.output.alpha)
        c.detail = f"largest guarded alpha {worst}"


def test_c06_combine_planted(criterion):
    lam = 4
    rng = random.Random(6)
    planted = planted_good_puzzle(6)
    with criterion(6, "combine with a planted good candidate: beta <= 2^-4, alpha <= 2*2^-4 at lambda=4", 60) as c:
        worst_beta, worst_alpha = F(0), F(0)
        for i in range(200):
            other = random_puzzle(rng, ev=True)
            pair = [planted, other] if i % 2 == 0 else [other, planted]
            out, rep = T.combine(pair, lam)
            MEASURED.append(rep.output)
            # the part that follows from the guarantee and the AND product
            assert rep.output.alpha <= 2 * F(1, 2**lam)
            breaks = rep.notes["guaranteed_breaks"]
            assert rep.output.beta == breaks[0] * breaks[1]
            worst_beta = max(worst_beta, rep.output.beta)
            worst_alpha = max(worst_alpha, rep.output.alpha)
        c.detail = f"max combined alpha {worst_alpha}, max combined beta {float(worst_beta):.4f}"
        # beta* >= 1 - alpha for every puzzle, so alpha <= 1/8 forces beta* >= 7/8
        assert worst_beta <= F(1, 2**lam), (
            f"combined optimal break reaches {float(worst_beta):.4f} > 2^-{lam}; "
            f"unsatisfiable: optimal break >= 1 - correctness error >= {1 - 2 * F(1, 2**lam)}")


def test_c07_random_input(corpus, criterion):
    with criterion(7, "random_input preserves alpha and beta, pad exactly uniform", 30) as c:
        for p in corpus:
            out, rep = T.random_input(p)
            MEASURED.append(rep.output)
            assert rep.output == rep.input
            pad = out.puzzle_marginal().map(lambda s: s[:p.key_len])
            assert pad == D.FiniteDist.uniform_bits(p.key_len)
        c.detail = f"{len(corpus)} puzzles"


def test_c08_entropy_to_sd(criterion):
    rng = random.Random(8)
    with criterion(8, "SD(X, U_m) >= delta/(2m-delta) - 2^(-delta/2) (1e4 distributions, m <= 8)", 30) as c:
        slack = math.inf
        for _ in range(10_000):
            m = rng.randint(1, 8)
            x = random_dist_bits(rng, m) if m <= 4 else _sparse_dist(rng, m)
            delta = min(float(m), max(0.0, m - D.entropy(x)))
            sd = float(D.statistical_distance(x, D.FiniteDist.uniform_bits(m)))
            bound = E.entropy_to_sd_bound(m, delta)
            slack = min(slack, sd - bound)
            assert sd >= bound - 1e-9, (x, sd, bound)
        c.detail = f"min slack {slack:.3e}"


def _sparse_dist(rng, m):
    # full random weights on a random subset; the statistical distance still ranges over all 2^m strings
    size = rng.randint(1, min(2**m, 64))
    values = rng.sample(D.all_bitstrings(m), size) if rng.random() < 0.9 else D.all_bitstrings(m)
    return D.FiniteDist(zip(values, _weights(rng, len(values))))


def _weights(rng, n):
    raw = [rng.randint(1, 6) for _ in range(n)]
    return [F(r, sum(raw)) for r in raw]


def test_c09_sd_amplification(criterion):
    with criterion(9, "Bernoulli SD at q = ceil(12t/delta^2) is >= 1 - 2e^-t", 10) as c:
        low = math.inf
        for delta in (F(1, 4), F(1, 2), F(3, 4)):
            for t in (1, 2, 3):
                q, target = E.sd_amp_reps(delta, t)
                for p0 in (F(0), (1 - delta) / 2, 1 - delta):
                    sd = D.product_sd_bernoulli(p0, p0 + delta, q)
                    assert float(sd) >= target, (delta, t, p0, q)
                    low = min(low, float(sd) - target)
        c.detail = f"largest q {E.sd_amp_reps(F(1, 4), 3)[0]}, min margin {low:.3e}"


def test_c10_delta_formula_and_verifier_dpi(corpus, criterion):
    with criterion(10, "delta_bound = bernoulli_kl on a 100-point grid; verifier DPI on the corpus", 30) as c:
        worst = 0.0
        for i in range(10):
            for j in range(1, 11):
                omega, gamma = F(i, 10), F(j, 11)
                diff = abs(E.delta_bound(omega, gamma) - D.bernoulli_kl(1 - omega, gamma))
                worst = max(worst, diff)
                assert diff <= 1e-12
        for p in corpus:
            _, adv = P.optimal_break(p)
            lhs, rhs, ok = P.verifier_dpi_witness(p, adv, 1e-9)
            assert ok, (p, lhs, rhs)
        c.detail = f"grid max |diff| {worst:.1e}"


def test_c11_weak_puzzle_floor(criterion):
    with criterion(11, "delta_bound(0, 1-lambda^-c) >= lambda^-(c+1)", 1) as c:
        for lam in (2, 4, 8, 16, 32):
            for cc in (1, 2):
                delta, floor, ok = E.weak_puzzle_delta_floor(lam, cc)
                assert ok and delta >= floor
        c.detail = "10 points"


def test_c12_micro_pipeline(criterion):
    rng = random.Random(12)
    with criterion(12, "micro pipeline entropy ceiling, equalizer length, Toeplitz pairwise independence", 60) as c:
        runs = 0
        for m in (1, 2):
            for ell in (2, 3):
                samples = [[str(rng.randint(0, 1)) for _ in range(m)] for _ in range(ell)]
                for i in range(1, m + 1):
                    assert len(E.equalizer(i, samples)) == (ell - 1) * m
                for a in (1, 2):
                    for _ in range(3):
                        x = random_dist_bits(rng, m)
                        xt = E.equalizer_dist(x, ell)
                        assert all(len(v) == (ell - 1) * m for v in xt.support)
                        for rbits in range(a + 1):
                            d, d_nu = E.build_efid_candidate(x, ell, a, rbits)
                            ceiling = E.entropy_ceiling(x, ell, a, rbits)
                            assert D.entropy(d) <= ceiling + 1e-9, (x, ell, a, rbits)
                            assert d_nu == E.seed_length(a, rbits) + (ell - 1) * m * rbits
                            runs += 1
        for in_bits in range(1, 5):
            for rbits in range(1, in_bits + 1):
                _pairwise_independent(in_bits, rbits)
        c.detail = f"{runs} pipeline instances, Toeplitz families up to 4 input bits"


def _pairwise_independent(in_bits, rbits):
    seeds = E.toeplitz_family(in_bits, rbits)
    images = [[s.apply(x) for x in D.all_bitstrings(in_bits)] for s in seeds]
    expected = len(seeds) // 4**rbits
    assert expected * 4**rbits == len(seeds)
    for i, j in itertools.combinations(range(2**in_bits), 2):
        counts = {}
        for row in images:
            key = (row[i], row[j])
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 4**rbits and set(counts.values()) == {expected}, (in_bits, rbits, i, j)


def test_c13_prg_counting(criterion):
    rng = random.Random(13)
    with criterion(13, "sum_y max_x Pr[G(x)=y] <= 2^n and heavy count <= 2^(2n) (500 generators)", 30) as c:
        largest = 0
        for _ in range(500):
            g = random_prg(rng)
            mass = PR.heavy_output_mass(g)
            count, ok = PR.heavy_output_count(g)
            assert mass <= 2**g.n and count <= 4**g.n and ok
            largest = max(largest, count)
        c.detail = f"largest heavy count {largest}"


def test_c14_qefid_puzzle(criterion):
    rng = random.Random(14)
    with criterion(14, "EFID puzzle: alpha = 1 - ((acc0+acc1)/2)^lambda, T* advantage = SD", 30) as c:
        n = 0
        for _ in range(40):
            pair = random_efid_pair(rng)
            for lam in (1, 2, 3, 4):
                p, rep = E.qefid_to_owpuzz(pair, lam)
                m = P.measure(p)
                MEASURED.append(m)
                assert m.alpha == 1 - ((rep["acc0"] + rep["acc1"]) / 2) ** lam
                assert rep["advantage"] == D.statistical_distance(pair.d0, pair.d1)
                n += 1
        c.detail = f"{n} instances"


def test_c15_ots_reduction(criterion):
    rng = random.Random(15)
    with criterion(15, "forger success equals reduction adversary break (200 instances)", 30) as c:
        for i in range(200):
            p = random_puzzle(rng, max_key_bits=2, max_puzzle_bits=2, max_support=4, ev=True)
            sig = PR.lamport_from_puzzle(p)
            slot = "01"[i % 2]
            forger = random_forger(rng, p, slot)
            success = PR.forgery_success(sig, forger, slot)
            assert success == P.adversary_break(p, PR.reduction_adversary_ots(forger, p, slot))
            MEASURED.append(P.measure(PR.puzzle_from_ots(sig)))
        c.detail = "200 forgers, both slots"


def test_c16_brute_force_floor(corpus, criterion):
    rng = random.Random(16)
    with criterion(16, "optimal break >= 1 - correctness error on every suite's puzzles", 10) as c:
        pairs = list(MEASURED)
        pairs += [P.measure(p) for p in corpus]
        pairs += [P.measure(PR.puzzle_from_prg(random_prg(rng, max_n=2), 1)) for _ in range(50)]
        pairs.append(P.measure(planted_good_puzzle(6)))
        at_sixth = 0
        for m in pairs:
            assert m.beta >= 1 - m.alpha, m
            if m.alpha <= F(5, 6):
                at_sixth += 1
                assert m.beta >= F(1, 6)
        c.detail = f"{len(pairs)} puzzles, {at_sixth} with alpha <= 5/6"
