"""Seeded random generators of micro-scale objects for the invariant suites."""

import random
from fractions import Fraction

from .dist import Channel, FiniteDist, all_bitstrings
from .efid import EFIDPair
from .primitives import PseudoDetPRG
from .puzzle import Adversary, Puzzle

PROBS = [Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(1)]


def random_weights(rng, n, max_weight=6):
    raw = [rng.randint(1, max_weight) for _ in range(n)]
    total = sum(raw)
    return [Fraction(r, total) for r in raw]


def random_dist(rng, values, max_weight=6, min_size=1):
    values = list(values)
    size = rng.randint(min_size, len(values))
    chosen = rng.sample(values, size)
    return FiniteDist(zip(chosen, random_weights(rng, size, max_weight)))


def random_dist_bits(rng, n_bits, **kw):
    return random_dist(rng, all_bitstrings(n_bits), **kw)


def random_channel(rng, domain, codomain, deterministic=False):
    codomain = list(codomain)
    if deterministic:
        return Channel({x: FiniteDist.point(rng.choice(codomain)) for x in domain})
    return Channel({x: random_dist(rng, codomain) for x in domain})


def random_verifier_value(rng, boolean):
    if boolean:
        return Fraction(rng.random() < 0.6)
    return rng.choice(PROBS)


def random_puzzle(rng, max_key_bits=3, max_puzzle_bits=3, max_support=6, boolean=None, ev=None):
    """Random puzzle with at most ``2^max_key_bits`` keys and ``2^max_puzzle_bits`` puzzles.

    The sampler's joint support is capped at ``max_support``; the verifier
    table covers every (key, puzzle) cell with boolean or rational entries.
    """
    kb = rng.randint(1, max_key_bits)
    sb = rng.randint(1, max_puzzle_bits)
    keys, puzzles = all_bitstrings(kb), all_bitstrings(sb)
    cells = [(k, s) for k in keys for s in puzzles]
    size = rng.randint(1, min(max_support, len(cells)))
    chosen = rng.sample(cells, size)
    sampler = FiniteDist(zip(chosen, random_weights(rng, size)))
    boolean = rng.random() < 0.5 if boolean is None else boolean
    table = {}
    for cell in cells:
        # bias towards accepting honest pairs so the corpus has a spread of correctness errors
        if cell in sampler and rng.random() < 0.5:
            table[cell] = Fraction(1)
        else:
            table[cell] = random_verifier_value(rng, boolean) if rng.random() < 0.4 else Fraction(0)
    ev = rng.random() < 0.7 if ev is None else ev
    return Puzzle(sampler, table, ev=ev)


def puzzle_corpus(seed=0, count=500, **kw):
    rng = random.Random(seed)
    return [random_puzzle(rng, **kw) for _ in range(count)]


def random_adversary(rng, p):
    keys = all_bitstrings(p.key_len)
    return Adversary({s: random_dist(rng, keys) for s in p.puzzle_marginal().support})


def planted_good_puzzle(key_bits=6):
    """Uniform ``key_bits``-bit key on a fixed puzzle, every key accepted with probability ``2^-key_bits``.

    Optimal break ``2^-key_bits`` and correctness error ``1 - 2^-key_bits``.
    No puzzle does better on both: the optimal break is always at least
    ``1 - alpha`` because the adversary may output any key, including the
    sampled one's most likely value.
    """
    keys = all_bitstrings(key_bits)
    share = Fraction(1, 2**key_bits)
    sampler = FiniteDist.uniform([(k, "0") for k in keys])
    return Puzzle(sampler, {(k, "0"): share for k in keys})


def random_efid_pair(rng, max_bits=2):
    n = rng.randint(1, max_bits)
    return EFIDPair(random_dist_bits(rng, n), random_dist_bits(rng, n))


def random_prg(rng, n=None, max_n=3, max_outputs=3):
    n = rng.randint(1, max_n) if n is None else n
    ell = 3 * n
    outputs = all_bitstrings(ell)
    gen = {}
    for seed in all_bitstrings(n):
        size = rng.randint(1, max_outputs)
        gen[seed] = FiniteDist(zip(rng.sample(outputs, size), random_weights(rng, size)))
    return PseudoDetPRG(n, ell, gen)


def random_forger(rng, p, slot="0"):
    """Random forger for the Lamport scheme built from ``p``, defined on every reachable view."""
    keys = all_bitstrings(p.key_len)
    views = set()
    for (k0, s0), _w in p.sampler.items():
        for (k1, s1), _x in p.sampler.items():
            views.add((s0 + s1, k1 if slot == "0" else k0))
    return Channel({v: random_dist(rng, keys, min_size=1) if rng.random() < 0.7
                    else FiniteDist.point(rng.choice(keys)) for v in sorted(views)})
