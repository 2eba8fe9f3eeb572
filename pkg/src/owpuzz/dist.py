"""Exact finite distributions and the information measures built on them.

Probabilities are :class:`fractions.Fraction` throughout.  Entropies and
divergences are floats (``-p log p`` is irrational in general) and are
reported in bits; an infinite divergence is ``math.inf``.
"""

import itertools
import math
from collections import defaultdict
from fractions import Fraction

from .errors import ContractError, DomainError, ValidationError, check_support

INF = math.inf

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(x):
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def log2(x):
    """log2 of a positive rational without going through a (possibly underflowing) float."""
    if isinstance(x, Fraction):
        return math.log2(x.numerator) - math.log2(x.denominator)
    return math.log2(x)


def concat(a, b):
    """Concatenate two outcome values: strings join, tuples join componentwise."""
    if isinstance(a, tuple):
        return tuple(x + y for x, y in zip(a, b))
    return a + b


class FiniteDist:
    """An immutable probability distribution with finitely many outcomes.

    Outcomes are hashable, mutually comparable values (bitstrings, or tuples
    of bitstrings for joint distributions).  Zero-weight outcomes are
    dropped and the rest kept in sorted order, so two equal distributions
    always have identical ``items()``.
    """

    __slots__ = ("_items", "_index")

    def __init__(self, outcomes):
        if isinstance(outcomes, FiniteDist):
            self._items = outcomes._items
            self._index = outcomes._index
            return
        if hasattr(outcomes, "items"):
            outcomes = outcomes.items()
        acc = {}
        for value, weight in outcomes:
            w = as_fraction(weight)
            if w < 0:
                raise ValidationError(f"negative weight {w} for outcome {value!r}")
            if value in acc:
                acc[value] += w
            else:
                acc[value] = w
        total = sum(acc.values(), ZERO)
        if total != 1:
            raise ValidationError(f"weights sum to {total}, not 1")
        self._items = tuple(sorted((v, w) for v, w in acc.items() if w))
        self._index = None

    @classmethod
    def _trusted(cls, items):
        # items already sorted, positive and summing to one
        d = object.__new__(cls)
        d._items = tuple(items)
        d._index = None
        return d

    @classmethod
    def point(cls, value):
        return cls._trusted([(value, ONE)])

    @classmethod
    def uniform(cls, values):
        values = sorted(set(values))
        if not values:
            raise ContractError("uniform distribution over an empty set")
        w = Fraction(1, len(values))
        return cls._trusted([(v, w) for v in values])

    @classmethod
    def uniform_bits(cls, n):
        check_support(2**n, "uniform distribution")
        return cls.uniform(all_bitstrings(n))

    @classmethod
    def bernoulli(cls, p):
        p = as_fraction(p)
        if not 0 <= p <= 1:
            raise DomainError(f"Bernoulli parameter {p} outside [0, 1]")
        return cls({"0": 1 - p, "1": p})

    def items(self):
        return self._items

    @property
    def support(self):
        return tuple(v for v, _ in self._items)

    def prob(self, value):
        if self._index is None:
            self._index = dict(self._items)
        return self._index.get(value, ZERO)

    __getitem__ = prob

    def __contains__(self, value):
        return self.prob(value) > 0

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return iter(self.support)

    def __eq__(self, other):
        return isinstance(other, FiniteDist) and self._items == other._items

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        body = ", ".join(f"{v!r}: {w}" for v, w in self._items[:8])
        more = ", ..." if len(self._items) > 8 else ""
        return f"FiniteDist({{{body}{more}}})"

    def map(self, fn):
        """Deterministic pushforward."""
        acc = defaultdict(Fraction)
        for v, w in self._items:
            acc[fn(v)] += w
        return FiniteDist._trusted(sorted(acc.items()))

    def marginal(self, index):
        """Marginal of one coordinate of a tuple-valued distribution."""
        return self.map(lambda v: v[index])

    def is_deterministic(self):
        return len(self._items) == 1


def all_bitstrings(n):
    return ["".join(bits) for bits in itertools.product("01", repeat=n)]


def xor_bits(a, b):
    if len(a) != len(b):
        raise DomainError("xor of bitstrings with different lengths")
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


class Channel:
    """A map from each input of an explicit domain to a distribution over outputs."""

    def __init__(self, mapping):
        images = {}
        for x, image in dict(mapping).items():
            images[x] = image if isinstance(image, FiniteDist) else FiniteDist(image)
        self._images = images

    @classmethod
    def deterministic(cls, fn, domain):
        return cls({x: FiniteDist.point(fn(x)) for x in domain})

    @classmethod
    def constant(cls, dist, domain):
        if not isinstance(dist, FiniteDist):
            dist = FiniteDist.point(dist)
        return cls({x: dist for x in domain})

    @property
    def domain(self):
        return frozenset(self._images)

    def __call__(self, x):
        try:
            return self._images[x]
        except KeyError:
            raise DomainError(f"input {x!r} is outside the channel domain") from None

    def items(self):
        return self._images.items()

    def __repr__(self):
        return f"{type(self).__name__}(<{len(self._images)} inputs>)"


class BlockStructure:
    """Contiguous, non-overlapping blocks covering a string of fixed length."""

    def __init__(self, blocks):
        blocks = [(int(o), int(n)) for o, n in blocks]
        pos = 0
        for offset, length in blocks:
            if offset != pos or length <= 0:
                raise ValidationError(f"blocks must be contiguous and non-empty, got {blocks}")
            pos += length
        self.blocks = tuple(blocks)
        self.total = pos

    @classmethod
    def uniform(cls, count, length):
        return cls((i * length, length) for i in range(count))

    def split(self, value):
        if len(value) != self.total:
            raise DomainError(f"value of length {len(value)} does not match {self.total}-bit blocks")
        return [value[o:o + n] for o, n in self.blocks]

    def __len__(self):
        return len(self.blocks)

    def __repr__(self):
        return f"BlockStructure({list(self.blocks)})"


# ---------------------------------------------------------------- measures

def entropy(d):
    return max(0.0, -math.fsum(float(w) * log2(w) for _, w in d.items()))


def min_entropy(d):
    return max(0.0, -log2(max(w for _, w in d.items())))


def kl_divergence(p, q):
    """KL(p || q) in bits; ``math.inf`` when p puts mass where q has none."""
    terms = []
    for v, pw in p.items():
        qw = q.prob(v)
        if qw == 0:
            return INF
        if pw != qw:
            terms.append(float(pw) * (log2(pw) - log2(qw)))
    return max(0.0, math.fsum(terms))


def bernoulli_kl(p, q):
    """KL(Bern(p) || Bern(q)), evaluated through :func:`kl_divergence`."""
    return kl_divergence(FiniteDist.bernoulli(p), FiniteDist.bernoulli(q))


def statistical_distance(p, q):
    values = set(p.support) | set(q.support)
    return sum((abs(p.prob(v) - q.prob(v)) for v in values), ZERO) / 2


def optimal_distinguisher(p, q):
    """Likelihood-ratio test that outputs "1" exactly where p(x) > q(x).

    Returns ``(test, advantage)`` where ``test`` is a deterministic channel
    on the union of the supports and ``advantage`` is
    ``Pr_p[test = 1] - Pr_q[test = 1]``.
    """
    domain = sorted(set(p.support) | set(q.support))
    test = Channel.deterministic(lambda x: "1" if p.prob(x) > q.prob(x) else "0", domain)
    advantage = sum((p.prob(x) - q.prob(x) for x in domain if p.prob(x) > q.prob(x)), ZERO)
    return test, advantage


def apply_channel(d, f):
    acc = defaultdict(Fraction)
    for x, w in d.items():
        for y, fw in f(x).items():
            acc[y] += w * fw
    return FiniteDist._trusted(sorted((y, w) for y, w in acc.items() if w))


def product(dists):
    """Independent product of several distributions, values concatenated in order."""
    dists = list(dists)
    if not dists:
        raise ContractError("product of no distributions")
    check_support(math.prod(len(d) for d in dists), "product distribution")
    items = list(dists[0].items())
    for d in dists[1:]:
        right = d.items()
        items = [(concat(v, u), w * x) for v, w in items for u, x in right]
    # concatenation of fixed-length values preserves lexicographic order,
    # but variable-length values may not, so sort defensively
    items.sort()
    return FiniteDist._trusted(items)


def product_iid(d, t):
    if t < 1:
        raise ContractError("repetition count must be positive")
    check_support(len(d) ** t, f"{t}-fold product")
    return product([d] * t)


def product_sd_bernoulli(p, q, t):
    """SD(Bern(p)^t, Bern(q)^t), summed over the number of ones."""
    p, q = as_fraction(p), as_fraction(q)
    if not (0 <= p <= 1 and 0 <= q <= 1):
        raise DomainError("Bernoulli parameters must lie in [0, 1]")
    if t < 1:
        raise ContractError("repetition count must be positive")
    total = ZERO
    for j in range(t + 1):
        diff = p**j * (1 - p) ** (t - j) - q**j * (1 - q) ** (t - j)
        total += math.comb(t, j) * abs(diff)
    return total / 2


def marginal_and_conditional(joint, first):
    """Distribution of the second coordinate given the first equals ``first``."""
    mass = ZERO
    acc = defaultdict(Fraction)
    for (a, b), w in joint.items():
        if a == first:
            mass += w
            acc[b] += w
    if mass == 0:
        raise DomainError(f"conditioning value {first!r} has probability zero")
    return FiniteDist._trusted(sorted((b, w / mass) for b, w in acc.items()))


def _flatten(d, blocks):
    if blocks is not None:
        return d, blocks
    sample = d.support[0]
    if isinstance(sample, tuple):
        lengths = [len(c) for c in sample]
        offsets = itertools.accumulate([0] + lengths[:-1])
        return d.map("".join), BlockStructure(zip(offsets, lengths))
    return d, BlockStructure([(0, len(sample))])


def kl_chain_decomposition(p, q, blocks=None):
    """Per-block terms of the KL chain rule.

    Term ``j`` is ``E_{P}[KL(P_{B_j | B_<j} || Q_{B_j | B_<j})]``; the terms sum
    to ``kl_divergence(p, q)``.  Tuple-valued distributions default to one
    block per component.
    """
    p, pb = _flatten(p, blocks)
    q, qb = _flatten(q, blocks)
    if pb.blocks != qb.blocks:
        raise ContractError("p and q must share a block structure")
    terms = []
    cut = 0
    for _, length in pb.blocks:
        # prefix -> (mass, {block value: mass})
        pgroups, qgroups = _group(p, cut, length), _group(q, cut, length)
        term = []
        infinite = False
        for prefix, (pm, pcond) in pgroups.items():
            if prefix not in qgroups:
                infinite = True
                break
            qm, qcond = qgroups[prefix]
            pc = FiniteDist._trusted(sorted((b, w / pm) for b, w in pcond.items()))
            qc = FiniteDist._trusted(sorted((b, w / qm) for b, w in qcond.items()))
            kl = kl_divergence(pc, qc)
            if kl == INF:
                infinite = True
                break
            term.append(float(pm) * kl)
        terms.append(INF if infinite else math.fsum(term))
        cut += length
    return terms


def _group(d, cut, length):
    groups = {}
    for v, w in d.items():
        prefix, block = v[:cut], v[cut:cut + length]
        mass, cond = groups.setdefault(prefix, [ZERO, defaultdict(Fraction)])
        groups[prefix][0] = mass + w
        cond[block] += w
    return groups


def pinsker_gap(p, q, tol=None):
    """Return ``(sd, kl, bound_ok)`` for SD <= sqrt(ln 2 / 2 * KL)."""
    from .errors import tolerance

    tol = tolerance() if tol is None else tol
    sd = statistical_distance(p, q)
    kl = kl_divergence(p, q)
    if kl == INF:
        return sd, kl, True
    return sd, kl, float(sd) <= math.sqrt(math.log(2) / 2 * kl) + tol
