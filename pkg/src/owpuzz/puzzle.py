"""Puzzles as explicit (sampler, verifier) pairs and their exact measurements.

A puzzle's sampler is a :class:`~owpuzz.dist.FiniteDist` over ``(key,
puzzle)`` bitstring pairs.  Its verifier is a total function giving the
acceptance probability of every pair; anything a table does not list is
rejected.  Repeated and combined puzzles are kept factored
(:class:`ProductPuzzle`) so that their statistics can be computed by
enumerating puzzle values only, without materialising the joint sampler.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from . import dist as D
from .dist import ONE, ZERO, Channel, FiniteDist, as_fraction
from .errors import ContractError, DomainError, ValidationError, check_support, tolerance


# ------------------------------------------------------------------ verifiers

class Verifier:
    """Acceptance probabilities for (key, puzzle) pairs.

    ``best(s)`` returns ``(key, value)`` for the key that maximises the
    acceptance probability on puzzle ``s``.  ``key`` is ``None`` when every
    key does equally well; callers then use the all-zero key.
    """

    def __call__(self, key, puzzle):
        raise NotImplementedError

    def best(self, puzzle):
        raise NotImplementedError


class TableVerifier(Verifier):
    def __init__(self, table):
        entries = {}
        for (k, s), v in dict(table).items():
            v = as_fraction(v)
            if not 0 <= v <= 1:
                raise ValidationError(f"acceptance probability {v} for ({k}, {s}) outside [0, 1]")
            if v:
                entries[(k, s)] = v
        self.table = entries
        by_puzzle = {}
        for (k, s), v in sorted(entries.items()):
            by_puzzle.setdefault(s, []).append((k, v))
        self._by_puzzle = by_puzzle

    def __call__(self, key, puzzle):
        return self.table.get((key, puzzle), ZERO)

    def best(self, puzzle):
        row = self._by_puzzle.get(puzzle)
        if not row:
            return None, ZERO
        top = max(v for _, v in row)
        return min(k for k, v in row if v == top), top

    def __repr__(self):
        return f"TableVerifier(<{len(self.table)} accepting pairs>)"


class ConstantVerifier(Verifier):
    def __init__(self, value):
        self.value = as_fraction(value)
        if not 0 <= self.value <= 1:
            raise ValidationError("constant acceptance outside [0, 1]")

    def __call__(self, key, puzzle):
        return self.value

    def best(self, puzzle):
        return None, self.value

    def __repr__(self):
        return f"ConstantVerifier({self.value})"


class ThresholdVerifier(Verifier):
    """Accept outright on a fixed set of puzzles, defer to ``base`` elsewhere."""

    def __init__(self, base, accept_all):
        self.base = base
        self.accept_all = frozenset(accept_all)

    def __call__(self, key, puzzle):
        return ONE if puzzle in self.accept_all else self.base(key, puzzle)

    def best(self, puzzle):
        if puzzle in self.accept_all:
            return None, ONE
        return self.base.best(puzzle)


class FlaggedVerifier(Verifier):
    """Puzzles carry a leading flag bit; flag 0 marks the bottom puzzle, always accepted."""

    def __init__(self, base):
        self.base = base

    def __call__(self, key, puzzle):
        if puzzle[0] == "0":
            return ONE
        return self.base(key, puzzle[1:])

    def best(self, puzzle):
        if puzzle[0] == "0":
            return None, ONE
        return self.base.best(puzzle[1:])


class PadVerifier(Verifier):
    """Verifier for puzzles ``a || b`` where ``a`` is the real key padded by the new key."""

    def __init__(self, base, key_len):
        self.base = base
        self.key_len = key_len

    def __call__(self, key, puzzle):
        a, b = puzzle[:self.key_len], puzzle[self.key_len:]
        return self.base(D.xor_bits(a, key), b)

    def best(self, puzzle):
        a, b = puzzle[:self.key_len], puzzle[self.key_len:]
        k, v = self.base.best(b)
        if k is None:
            return None, v
        return D.xor_bits(a, k), v


def combine_and(values):
    return math.prod(values, start=ONE)


def combine_or(values):
    return 1 - math.prod((1 - v for v in values), start=ONE)


COMBINERS = {"and": combine_and, "or": combine_or}


class ConcatVerifier(Verifier):
    """AND or noisy-OR of part verifiers applied to consecutive key/puzzle slices."""

    def __init__(self, parts, mode):
        # parts: (verifier, key_len, puzzle_len)
        if mode not in COMBINERS:
            raise ContractError(f"unknown combination mode {mode!r}")
        self.parts = tuple(parts)
        self.mode = mode

    def _slices(self, key, puzzle):
        ko = so = 0
        for ver, kl, sl in self.parts:
            yield ver, kl, key[ko:ko + kl] if key is not None else None, puzzle[so:so + sl]
            ko += kl
            so += sl

    def __call__(self, key, puzzle):
        return COMBINERS[self.mode](ver(k, s) for ver, _, k, s in self._slices(key, puzzle))

    def best(self, puzzle):
        keys, values = [], []
        for ver, kl, _, s in self._slices(None, puzzle):
            k, v = ver.best(s)
            keys.append(k)
            values.append(v)
        value = COMBINERS[self.mode](values)
        if all(k is None for k in keys):
            return None, value
        key = "".join(k if k is not None else "0" * kl for k, (_, kl, _) in zip(keys, self.parts))
        return key, value


# -------------------------------------------------------------------- puzzles

@dataclass(frozen=True)
class ParamPair:
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = as_fraction(getattr(self, name))
            object.__setattr__(self, name, v)
            if not 0 <= v <= 1:
                raise ValidationError(f"{name} = {v} outside [0, 1]")


class Puzzle:
    """A sampler over (key, puzzle) pairs together with a verifier.

    ``verifier`` may be a :class:`Verifier` or a mapping ``(key, puzzle) ->
    probability``.  ``ev`` records whether the verifier counts as efficient;
    transformations that need to run the verifier inside the sampler check
    it.
    """

    def __init__(self, sampler, verifier, ev=True, lam=1):
        if not isinstance(sampler, FiniteDist):
            sampler = FiniteDist(sampler)
        if not isinstance(verifier, Verifier):
            verifier = TableVerifier(verifier)
        if lam < 1:
            raise ValidationError("security parameter must be positive")
        self._sampler = sampler
        self.verifier = verifier
        self.ev = bool(ev)
        self.lam = int(lam)
        self.key_len, self.puzzle_len = _pair_lengths(sampler)
        self._marginal = None
        self._cond = {}

    @property
    def sampler(self):
        return self._sampler

    def puzzle_marginal(self):
        if self._marginal is None:
            self._marginal = self.sampler.marginal(1)
        return self._marginal

    def conditional_acceptance(self, s):
        """``E[Ver(k, s) | s]`` under the sampler's conditional key distribution."""
        if not self._cond:
            acc, mass = {}, {}
            for (k, t), w in self.sampler.items():
                mass[t] = mass.get(t, ZERO) + w
                acc[t] = acc.get(t, ZERO) + w * self.verifier(k, t)
            self._cond = {t: acc[t] / mass[t] for t in mass}
        return self._cond[s]

    def conditional_keys(self, s):
        return D.marginal_and_conditional(_swap(self.sampler), s)

    def best(self, s):
        return self.verifier.best(s)

    def with_lambda(self, lam):
        return Puzzle(self.sampler, self.verifier, self.ev, lam)

    def __repr__(self):
        return (f"Puzzle(|supp|={len(self.sampler)}, key_len={self.key_len}, "
                f"puzzle_len={self.puzzle_len}, ev={self.ev}, lam={self.lam})")


class ProductPuzzle(Puzzle):
    """Independent parts, sampled side by side and verified by AND or noisy-OR.

    The joint sampler is only built on request; ``puzzle_marginal`` and
    ``conditional_acceptance`` work part by part since the parts' keys are
    conditionally independent given the concatenated puzzle.
    """

    def __init__(self, parts, mode, lam=None):
        parts = tuple(parts)
        if not parts:
            raise ContractError("product of no puzzles")
        if mode not in COMBINERS:
            raise ContractError(f"unknown combination mode {mode!r}")
        self.parts = parts
        self.mode = mode
        self.verifier = ConcatVerifier([(p.verifier, p.key_len, p.puzzle_len) for p in parts], mode)
        self.ev = all(p.ev for p in parts)
        self.lam = lam if lam is not None else max(p.lam for p in parts)
        self.key_len = sum(p.key_len for p in parts)
        self.puzzle_len = sum(p.puzzle_len for p in parts)
        self._sampler = None
        self._marginal = None
        self._cond = {}

    @property
    def sampler(self):
        if self._sampler is None:
            self._sampler = D.product([p.sampler for p in self.parts])
        return self._sampler

    def puzzle_marginal(self):
        if self._marginal is None:
            self._marginal = D.product([p.puzzle_marginal() for p in self.parts])
        return self._marginal

    def _split(self, s):
        out, pos = [], 0
        for p in self.parts:
            out.append(s[pos:pos + p.puzzle_len])
            pos += p.puzzle_len
        return out

    def conditional_acceptance(self, s):
        v = self._cond.get(s)
        if v is None:
            values = [p.conditional_acceptance(x) for p, x in zip(self.parts, self._split(s))]
            v = self._cond[s] = COMBINERS[self.mode](values)
        return v

    def with_lambda(self, lam):
        return ProductPuzzle(self.parts, self.mode, lam)

    def __repr__(self):
        return f"ProductPuzzle({self.mode}, parts={len(self.parts)}, key_len={self.key_len})"


def _pair_lengths(sampler):
    klens, slens = set(), set()
    for v in sampler.support:
        if not (isinstance(v, tuple) and len(v) == 2):
            raise ValidationError(f"sampler outcome {v!r} is not a (key, puzzle) pair")
        k, s = v
        if not (_is_bits(k) and _is_bits(s)):
            raise ValidationError(f"sampler outcome {v!r} is not a pair of bitstrings")
        klens.add(len(k))
        slens.add(len(s))
    if len(klens) != 1 or len(slens) != 1:
        raise ValidationError("key and puzzle lengths must be uniform across the sampler")
    return klens.pop(), slens.pop()


def _is_bits(x):
    return isinstance(x, str) and all(c in "01" for c in x)


def _swap(joint):
    return joint.map(lambda ks: (ks[1], ks[0]))


# ---------------------------------------------------------------- adversaries

class Adversary(Channel):
    """A (possibly randomised) map from puzzles to keys."""

    @classmethod
    def from_channel(cls, channel):
        return cls(dict(channel.items()))

    @classmethod
    def true_conditional(cls, p):
        """Samples from the honest conditional key distribution given the puzzle."""
        return cls({s: p.conditional_keys(s) for s in p.puzzle_marginal().support})

    @classmethod
    def constant_key(cls, p, key):
        return cls.constant(FiniteDist.point(key), p.puzzle_marginal().support)

    @classmethod
    def uniform_key(cls, p):
        return cls.constant(FiniteDist.uniform_bits(p.key_len), p.puzzle_marginal().support)


def _covers(p, a):
    missing = [s for s in p.puzzle_marginal().support if s not in a.domain]
    if missing:
        raise DomainError(f"adversary is undefined on puzzle {missing[0]!r}")


# ----------------------------------------------------------------- measures

def correctness_error(p):
    """1 - Pr[Ver(k, s) accepts] for (k, s) drawn from the sampler."""
    accepted = sum((w * p.conditional_acceptance(s) for s, w in p.puzzle_marginal().items()), ZERO)
    return 1 - accepted


def optimal_break_value(p):
    return sum((w * p.best(s)[1] for s, w in p.puzzle_marginal().items()), ZERO)


def optimal_break(p):
    """Success probability of the best unbounded adversary, and that adversary.

    The adversary outputs, for each puzzle, a key of maximal acceptance
    probability (the smallest such key for table verifiers).
    """
    images, total = {}, ZERO
    zero_key = "0" * p.key_len
    for s, w in p.puzzle_marginal().items():
        k, v = p.best(s)
        images[s] = FiniteDist.point(zero_key if k is None else k)
        total += w * v
    return total, Adversary(images)


def measure(p):
    return ParamPair(correctness_error(p), optimal_break_value(p))


def adversary_break(p, a):
    _covers(p, a)
    total = ZERO
    for s, w in p.puzzle_marginal().items():
        total += w * sum((x * p.verifier(k, s) for k, x in a(s).items()), ZERO)
    return total


def adversary_joint(p, a):
    """Distribution of (a(s), s) with s drawn from the puzzle marginal."""
    _covers(p, a)
    items = []
    for s, w in p.puzzle_marginal().items():
        items.extend(((k, s), w * x) for k, x in a(s).items())
    check_support(len(items), "adversary joint")
    return FiniteDist(items)


def distributional_gap(p, a):
    return D.statistical_distance(p.sampler, adversary_joint(p, a))


def kl_sampling_hardness(p, a):
    return D.kl_divergence(p.sampler, adversary_joint(p, a))


def verifier_channel(p, pairs):
    return Channel({ks: FiniteDist.bernoulli(p.verifier(*ks)) for ks in pairs})


def verifier_dpi_witness(p, a, tol=None):
    """Push both joints through the verifier and compare divergences.

    Returns ``(lhs, rhs, ok)`` with ``lhs = KL(Ver(k, s) || Ver(a(s), s))``
    as Bernoulli outcomes, ``rhs`` the divergence of the joints, and ``ok``
    the data-processing inequality ``lhs <= rhs``.
    """
    tol = tolerance() if tol is None else tol
    honest = p.sampler
    forged = adversary_joint(p, a)
    ver = verifier_channel(p, set(honest.support) | set(forged.support))
    lhs = D.kl_divergence(D.apply_channel(honest, ver), D.apply_channel(forged, ver))
    rhs = D.kl_divergence(honest, forged)
    ok = rhs == D.INF or lhs <= rhs + tol
    return lhs, rhs, ok


def distributional_kl_floor(gap):
    """KL lower bound implied by a statistical gap via Pinsker: (2 / ln 2) gap^2."""
    gap = as_fraction(gap)
    if not 0 <= gap <= 1:
        raise DomainError("gap must lie in [0, 1]")
    return 2 / math.log(2) * float(gap) ** 2


def conditional_failures(p):
    """Per-puzzle honest failure probability ``Pr[Ver(k, s) = 0 | s]``."""
    return {s: 1 - p.conditional_acceptance(s) for s in p.puzzle_marginal().support}


def joint_entropies(p):
    joint = D.entropy(p.sampler)
    puzzles = D.entropy(p.puzzle_marginal())
    return {"H(k,s)": joint, "H(s)": puzzles, "H(k|s)": max(0.0, joint - puzzles)}


# ------------------------------------------------------------ constructors

def diagonal_puzzle(keys, ev=True, lam=1):
    """Uniform key, puzzle equal to the key, equality verifier."""
    keys = list(keys)
    sampler = FiniteDist.uniform([(k, k) for k in keys])
    return Puzzle(sampler, {(k, k): 1 for k in keys}, ev, lam)


def blind_puzzle(key_len, puzzle="0", ev=True, lam=1):
    """Uniform key over ``key_len`` bits and a fixed, uninformative puzzle."""
    keys = D.all_bitstrings(key_len)
    sampler = FiniteDist.uniform([(k, puzzle) for k in keys])
    return Puzzle(sampler, {(k, puzzle): 1 for k in keys}, ev, lam)


def trivial_puzzle(lam=1):
    """One key, one puzzle, a verifier that accepts everything."""
    return Puzzle(FiniteDist.point(("0", "0")), ConstantVerifier(1), True, lam)


def materialize_verifier(p, keys=None):
    """Table of nonzero acceptance probabilities over all keys and supported puzzles."""
    if keys is None:
        check_support(2**p.key_len * len(p.puzzle_marginal()), "verifier table")
        keys = D.all_bitstrings(p.key_len)
    table = {}
    for s in p.puzzle_marginal().support:
        for k in keys:
            v = p.verifier(k, s)
            if v:
                table[(k, s)] = v
    return table


def flatten(p):
    """An equivalent plain :class:`Puzzle` with a table verifier."""
    return Puzzle(p.sampler, materialize_verifier(p), p.ev, p.lam)
