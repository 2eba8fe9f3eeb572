"""Entropy-to-EFID machinery: equalizer, Toeplitz extraction, SD bounds, parameters.

Exact distributions are only built at micro scale; ``pipeline_params``
evaluates the parameter formulas at any scale without building anything.
"""

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction

from . import dist as D
from .dist import ZERO, FiniteDist, as_fraction
from .errors import ContractError, DomainError, ValidationError, check_support
from .puzzle import Puzzle, TableVerifier


def delta_bound(omega, gamma):
    """KL floor (1-w) log((1-w)/g) + w log(w/(1-g)) for correctness w, security g."""
    omega, gamma = float(omega), float(gamma)
    if not 0 <= omega < 1:
        raise DomainError(f"omega = {omega} outside [0, 1)")
    if not 0 < gamma < 1:
        raise DomainError(f"gamma = {gamma} outside (0, 1)")
    total = (1 - omega) * math.log2((1 - omega) / gamma)
    if omega > 0:
        total += omega * math.log2(omega / (1 - gamma))
    return total


def weak_puzzle_delta_floor(lam, c):
    """Check ``delta_bound(0, 1 - lam^-c) >= lam^-(c+1)``; returns ``(delta, floor, ok)``."""
    if lam < 2:
        raise ContractError("lambda must be at least 2")
    if c < 1:
        raise ContractError("c must be a positive integer")
    delta = delta_bound(0, 1 - Fraction(1, lam**c))
    floor = Fraction(1, lam ** (c + 1))
    return delta, floor, delta >= floor


# ----------------------------------------------------------------- equalizer

def equalizer(i, samples):
    """Blocks ``x1[i:], x2, ..., x(l-1), xl[:i-1]`` (1-based ``i``) of l samples of m blocks."""
    samples = [list(x) for x in samples]
    if len(samples) < 2:
        raise ContractError("equalizer needs at least two samples")
    m = len(samples[0])
    if any(len(x) != m for x in samples):
        raise ContractError("all samples must have the same number of blocks")
    if not 1 <= i <= m:
        raise ContractError(f"block index {i} outside [1, {m}]")
    out = samples[0][i - 1:]
    for x in samples[1:-1]:
        out.extend(x)
    out.extend(samples[-1][:i - 1])
    return out


def equalizer_dist(x, ell, block_len=1):
    """Exact distribution of the equalizer with a uniform index and ``ell`` i.i.d. copies of ``x``."""
    if ell < 2:
        raise ContractError("ell must be at least 2")
    n = len(x.support[0])
    if n % block_len:
        raise ContractError(f"values of length {n} do not split into {block_len}-bit blocks")
    m = n // block_len
    blocks = D.BlockStructure.uniform(m, block_len)
    check_support(len(x) ** ell * m, "equalizer distribution")
    split = [(blocks.split(v), w) for v, w in x.items()]
    acc = {}
    share = Fraction(1, m)
    for i in range(1, m + 1):
        for combo in itertools.product(split, repeat=ell):
            value = "".join(equalizer(i, [b for b, _ in combo]))
            w = share * math.prod((w for _, w in combo), start=Fraction(1))
            acc[value] = acc.get(value, ZERO) + w
    return FiniteDist(acc)


# ---------------------------------------------------------------- extraction

@dataclass(frozen=True)
class ToeplitzSeed:
    """A ``rbits x in_bits`` Toeplitz matrix over GF(2), given by its first row and column,
    plus an optional ``rbits``-bit offset.

    Without an offset the map is linear; with a uniform offset the family
    ``x -> Tx + b`` is pairwise independent (a linear family cannot be,
    since it always sends zero to zero).
    """

    bits: str
    in_bits: int
    rbits: int
    offset: str = None

    def __post_init__(self):
        if self.rbits > self.in_bits:
            raise ContractError(f"cannot extract {self.rbits} bits from {self.in_bits}-bit blocks")
        need = matrix_length(self.in_bits, self.rbits)
        if len(self.bits) != need:
            raise ValidationError(f"matrix seed must have {need} bits, got {len(self.bits)}")
        if self.offset is not None and len(self.offset) != self.rbits:
            raise ValidationError(f"offset must have {self.rbits} bits, got {len(self.offset)}")

    @classmethod
    def affine(cls, seed, in_bits, rbits):
        """Split a full ``seed_length`` seed into matrix bits and offset."""
        cut = matrix_length(in_bits, rbits)
        if len(seed) != cut + rbits:
            raise ValidationError(f"seed must have {cut + rbits} bits, got {len(seed)}")
        return cls(seed[:cut], in_bits, rbits, seed[cut:])

    @property
    def full(self):
        return self.bits + (self.offset or "")

    def entry(self, row, col):
        return self.bits[col - row + self.rbits - 1] == "1"

    def linear(self, block):
        if len(block) != self.in_bits:
            raise DomainError(f"block {block!r} is not {self.in_bits} bits")
        out = []
        for r in range(self.rbits):
            bit = 0
            for c, b in enumerate(block):
                if b == "1" and self.entry(r, c):
                    bit ^= 1
            out.append(str(bit))
        return "".join(out)

    def apply(self, block):
        y = self.linear(block)
        return D.xor_bits(y, self.offset) if self.offset else y


def matrix_length(in_bits, rbits):
    return in_bits + rbits - 1 if rbits else 0


def seed_length(in_bits, rbits):
    """Full seed of the pairwise-independent family: matrix bits then offset."""
    return matrix_length(in_bits, rbits) + rbits


def toeplitz_family(in_bits, rbits):
    return [ToeplitzSeed.affine(s, in_bits, rbits) for s in D.all_bitstrings(seed_length(in_bits, rbits))]


def toeplitz_extract(blocks, seed, rbits=None):
    """Seed followed by the hash of each block.

    A bitstring seed of matrix length gives the linear map; one of full
    ``seed_length`` is split into matrix and offset.
    """
    if not isinstance(seed, ToeplitzSeed):
        in_bits = len(blocks[0]) if blocks else 0
        rbits = in_bits if rbits is None else rbits
        if len(seed) == seed_length(in_bits, rbits) and rbits:
            seed = ToeplitzSeed.affine(seed, in_bits, rbits)
        else:
            seed = ToeplitzSeed(seed, in_bits, rbits)
    elif rbits is not None and rbits != seed.rbits:
        raise ContractError("rbits disagrees with the seed")
    return seed.full + "".join(seed.apply(b) for b in blocks)


def _columns(copies, block_len):
    # copies: list of a strings, each (l-1)m blocks; column j stacks block j of every copy
    n_blocks = len(copies[0]) // block_len
    return ["".join(c[j * block_len:(j + 1) * block_len] for c in copies) for j in range(n_blocks)]


def build_efid_candidate(x, ell, a, rbits, block_len=1):
    """Exact output distribution of equalize -> repeat ``a`` times -> Toeplitz-extract per column.

    Returns ``(dist, d_nu)``.  Each column stacks one block position across
    the ``a`` copies, so the hash input is ``a * block_len`` bits.
    """
    if a < 1:
        raise ContractError("a must be at least 1")
    xt = equalizer_dist(x, ell, block_len)
    in_bits = a * block_len
    if rbits > in_bits:
        raise ContractError(f"cannot extract {rbits} bits from {in_bits}-bit columns")
    slen = seed_length(in_bits, rbits)
    n_cols = len(xt.support[0]) // block_len
    check_support(len(xt) ** a * 2**slen, "EFID candidate")
    seeds = toeplitz_family(in_bits, rbits)
    seed_w = Fraction(1, len(seeds))
    acc = {}
    for combo in itertools.product(xt.items(), repeat=a):
        cols = _columns([v for v, _ in combo], block_len)
        w = seed_w * math.prod((w for _, w in combo), start=Fraction(1))
        for seed in seeds:
            out = toeplitz_extract(cols, seed)
            acc[out] = acc.get(out, ZERO) + w
    return FiniteDist(acc), slen + n_cols * rbits


def entropy_ceiling(x, ell, a, rbits, block_len=1):
    """``a * (ell * H(x) + log2 m) + seed length`` for the candidate built from ``x``."""
    m = len(x.support[0]) // block_len
    return a * (ell * D.entropy(x) + math.log2(m)) + seed_length(a * block_len, rbits)


# ---------------------------------------------------------------- SD bounds

def entropy_to_sd_bound(m, delta):
    """Lower bound ``delta/(2m - delta) - 2^(-delta/2)`` on SD(X, U_m) when H(X) <= m - delta.

    Negative values are returned as is; they carry no information.
    """
    m, delta = float(m), float(delta)
    if delta < 0:
        raise ContractError("entropy deficit must be non-negative")
    if delta > m:
        raise ContractError(f"entropy deficit {delta} exceeds the length {m}")
    if m == 0:
        return -1.0
    return delta / (2 * m - delta) - 2 ** (-delta / 2)


def entropy_to_sd_bound_exact(m, delta):
    """Exact rational form of :func:`entropy_to_sd_bound`, or ``None`` when it is irrational."""
    m, delta = Fraction(m), Fraction(delta)
    if not 0 <= delta <= m:
        raise ContractError("entropy deficit must lie in [0, m]")
    half = delta / 2
    if half.denominator != 1:
        return None
    return delta / (2 * m - delta) - Fraction(1, 2 ** int(half))


def sd_amp_reps(delta, t):
    """Repetitions ``ceil(12 t / delta^2)`` (at least 1) and the promised SD ``1 - 2 e^-t``."""
    delta, t = as_fraction(delta), as_fraction(t)
    if delta <= 0:
        raise DomainError("SD amplification needs a positive starting distance")
    if t <= 0:
        raise DomainError("t must be positive")
    q = max(1, math.ceil(12 * t / delta**2))
    return q, 1 - 2 * math.exp(-float(t))


# -------------------------------------------------------------------- EFID

@dataclass(frozen=True)
class EFIDPair:
    """Two distributions over ``n``-bit strings, repeated ``reps`` times side by side.

    Repetition is kept symbolic so that Bernoulli-sized pairs can be
    amplified far past the support cap.
    """

    d0: FiniteDist
    d1: FiniteDist
    reps: int = 1

    def __post_init__(self):
        lengths = {len(v) for v in self.d0.support} | {len(v) for v in self.d1.support}
        if len(lengths) != 1:
            raise ValidationError("both sides of an EFID pair must range over strings of one length")
        if self.reps < 1:
            raise ValidationError("repetition count must be positive")

    @property
    def base_length(self):
        return len(self.d0.support[0])

    @property
    def n(self):
        return self.base_length * self.reps

    def materialize(self):
        if self.reps == 1:
            return self.d0, self.d1
        return D.product_iid(self.d0, self.reps), D.product_iid(self.d1, self.reps)

    def distance(self):
        """Exact statistical distance between the (repeated) sides."""
        if self.reps == 1:
            return D.statistical_distance(self.d0, self.d1)
        if self.base_length == 1:
            return D.product_sd_bernoulli(self.d0.prob("1"), self.d1.prob("1"), self.reps)
        return D.statistical_distance(*self.materialize())


def repeat_efid(pair, q):
    if q < 1:
        raise ContractError("repetition count must be positive")
    out = replace(pair, reps=pair.reps * q)
    if out.base_length != 1:
        check_support(max(len(pair.d0), len(pair.d1)) ** out.reps, "repeated EFID pair")
    return out


def qefid_to_owpuzz(pair, lam):
    """Puzzle whose key picks, bit by bit, which side each puzzle block comes from.

    The verifier applies the optimal test ``T*`` (likelihood ratio of side 1
    against side 0) to every block and accepts iff it recovers the key.
    Returns ``(puzzle, report)``; the report's per-side accuracies give the
    predicted correctness error ``1 - ((acc0 + acc1)/2)^lam``.
    """
    if lam < 1:
        raise ContractError("lambda must be positive")
    d0, d1 = pair.materialize()
    test, advantage = D.optimal_distinguisher(d1, d0)
    check_support(2**lam * max(len(d0), len(d1)) ** lam, "EFID puzzle sampler")
    sides = {"0": d0, "1": d1}
    items = []
    for key in D.all_bitstrings(lam):
        for combo in itertools.product(*(sides[b].items() for b in key)):
            s = "".join(v for v, _ in combo)
            w = Fraction(1, 2**lam) * math.prod((w for _, w in combo), start=Fraction(1))
            items.append(((key, s), w))
    sampler = FiniteDist(items)
    blen = len(d0.support[0])
    table = {}
    for s in sampler.marginal(1).support:
        guess = "".join(test(s[i * blen:(i + 1) * blen]).support[0] for i in range(lam))
        table[(guess, s)] = 1
    puzzle = Puzzle(sampler, TableVerifier(table), ev=True, lam=lam)
    acc0 = sum((w for v, w in d0.items() if test(v).support[0] == "0"), ZERO)
    acc1 = sum((w for v, w in d1.items() if test(v).support[0] == "1"), ZERO)
    report = {
        "advantage": advantage,
        "acc0": acc0,
        "acc1": acc1,
        "predicted_correctness_error": 1 - ((acc0 + acc1) / 2) ** lam,
        # the table always lists the key T* predicts, so an unbounded adversary wins
        "optimal_break": Fraction(1),
        "security_asserted": False,
    }
    return puzzle, report


# --------------------------------------------------------------- parameters

@dataclass(frozen=True)
class PipelineParams:
    lam: int
    omega: float
    gamma: float
    delta: float
    Delta: float
    nu_star: float
    m: int
    ell: int
    kappa: int
    a: int
    rbits: int
    q: int
    d_nu: float
    k_nu: float
    k_prime: float

    def __post_init__(self):
        if self.ell < 2:
            raise ValidationError("ell must be at least 2")
        if min(self.kappa, self.a, self.q) < 1:
            raise ValidationError("kappa, a and q must be at least 1")
        if self.m < 1:
            raise ValidationError("block count must be positive")
        if self.delta < 0:
            raise ValidationError("delta must be non-negative")


def pipeline_params(lam, m, Delta, nu_star, p_poly=None, omega=0.0, gamma=0.5):
    """Evaluate the pipeline's parameter schedule.

    The big-O constants (in ``a`` and in the entropy loss of repetition) are
    fixed at 1; ``d_nu`` may come out negative at small ``lam``.
    """
    if Delta <= 0:
        raise DomainError("Delta must be positive")
    if lam < 1 or m < 1:
        raise ContractError("lambda and m must be positive")
    p_poly = p_poly or (lambda n: n)
    log_m = math.log2(m)
    ell = max(2, math.ceil(2 * (nu_star + Delta + log_m) / Delta))
    kappa = max(1, math.ceil(lam / 2))
    a = max(1, math.ceil(m * m * kappa * math.log2(lam) ** 2 / Delta**2)) if lam > 1 else 1
    q = 12 * lam * p_poly(lam)
    k_nu = (nu_star + Delta) / m
    k_prime = a * k_nu - math.log2(2 * a) * math.sqrt(a * kappa)
    d_nu = a + m * (ell - 1) * (k_prime - kappa)
    rbits = max(0, math.floor(k_prime - kappa))
    return PipelineParams(lam, omega, gamma, delta_bound(omega, gamma), Delta, nu_star, m, ell,
                          kappa, a, rbits, q, d_nu, k_nu, k_prime)


def micro_rbits(nu, Delta, m, a, block_len=1):
    """Bits extracted per column at micro scale: ``ceil(a (nu + Delta) / m)``, clipped to the column."""
    return min(a * block_len, max(0, math.ceil(a * (nu + Delta) / m)))


def owpuzz_to_nonuniform_efid(p, ell, a, Delta=1, advice=None, block_len=1):
    """One EFID pair ``(uniform, D_nu)`` per advice value ``nu``.

    ``D_nu`` is :func:`build_efid_candidate` applied to the puzzle's joint
    ``s || k`` with ``micro_rbits(nu, ...)`` extracted bits per column.
    ``advice`` defaults to ``0 .. m`` where ``m`` is the joint's bit length.
    Returns ``{nu: (pair, info)}`` where ``info`` records the output
    length, the candidate's entropy and the deficit ``d_nu - H(D_nu)``.
    """
    joint = p.sampler.map(lambda ks: ks[1] + ks[0])
    m = len(joint.support[0]) // block_len
    if advice is None:
        advice = range(0, m + 1)
    out = {}
    for nu in advice:
        rbits = micro_rbits(nu, Delta, m, a, block_len)
        d, d_nu = build_efid_candidate(joint, ell, a, rbits, block_len)
        h = D.entropy(d)
        info = {"d_nu": d_nu, "rbits": rbits, "entropy": h, "deficit": d_nu - h,
                "sd_from_uniform": None}
        u = FiniteDist.uniform_bits(d_nu)
        pair = EFIDPair(u, d)
        info["sd_from_uniform"] = D.statistical_distance(u, d)
        out[nu] = (pair, info)
    return out


def entropy_target(p):
    """Advice value at the joint entropy, rounded to the integer grid."""
    return round(D.entropy(p.sampler))
