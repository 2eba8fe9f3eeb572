"""Puzzles from one-time signatures, commitments and pseudodeterministic generators, and back."""

from fractions import Fraction

from . import dist as D
from .dist import ZERO, Channel, FiniteDist
from .errors import ContractError, DomainError, ValidationError, check_support
from .puzzle import Adversary, ProductPuzzle, Puzzle, TableVerifier


def _as_verify(verify):
    if callable(verify):
        return verify
    table = {key: Fraction(v) for key, v in dict(verify).items()}
    for key, v in table.items():
        if not 0 <= v <= 1:
            raise ValidationError(f"acceptance probability {v} for {key} outside [0, 1]")
    return lambda vk, m, sig: table.get((vk, m, sig), ZERO)


class OneTimeSig:
    """``keygen`` over (vk, sk) pairs, ``sign`` on (sk, message), ``verify(vk, message, sig)``."""

    def __init__(self, keygen, sign, verify, messages):
        self.keygen = keygen if isinstance(keygen, FiniteDist) else FiniteDist(keygen)
        self.sign = sign if isinstance(sign, Channel) else Channel(sign)
        self.verify = _as_verify(verify)
        self.messages = list(messages)
        if not self.messages:
            raise ContractError("signature scheme with an empty message space")
        for _, sk in self.keygen.support:
            for m in self.messages:
                if (sk, m) not in self.sign.domain:
                    raise ValidationError(f"sign is undefined on signing key {sk!r}, message {m!r}")

    def signing_keys(self):
        """Keys ``sk`` for which ``sign`` is defined on every message."""
        candidates = {sk for sk, _ in self.sign.domain}
        return sorted(sk for sk in candidates if all((sk, m) in self.sign.domain for m in self.messages))

    def acceptance(self, vk, sk, m):
        """Pr[verify(vk, m, sign(sk, m)) accepts]."""
        return sum((w * self.verify(vk, m, sig) for sig, w in self.sign((sk, m)).items()), ZERO)


def ots_correctness_error(sig):
    """Worst message's honest rejection probability."""
    return max(
        1 - sum((w * sig.acceptance(vk, sk, m) for (vk, sk), w in sig.keygen.items()), ZERO)
        for m in sig.messages)


def puzzle_from_ots(sig):
    """Puzzle with key = signing key, puzzle = verification key.

    The verifier signs a uniformly random message with the candidate key
    and checks the signature against the puzzle.
    """
    share = Fraction(1, len(sig.messages))
    sampler = sig.keygen.map(lambda pair: (pair[1], pair[0]))
    table = {}
    for sk in sig.signing_keys():
        for vk in sampler.marginal(1).support:
            v = share * sum((sig.acceptance(vk, sk, m) for m in sig.messages), ZERO)
            if v:
                table[(sk, vk)] = v
    return Puzzle(sampler, TableVerifier(table), ev=True)


def lamport_from_puzzle(p):
    """Two-message signature: vk = s0 || s1, sk = k0 || k1, the signature on bit b is k_b."""
    if not p.ev:
        raise ContractError("signing from a puzzle needs an efficiently verifiable puzzle")
    n, ln = p.key_len, p.puzzle_len
    pairs = D.product([p.sampler, p.sampler])
    keygen = pairs.map(lambda ks: (ks[1], ks[0]))
    sign = {}
    for _, sk in keygen.support:
        sign[(sk, "0")] = FiniteDist.point(sk[:n])
        sign[(sk, "1")] = FiniteDist.point(sk[n:])

    def verify(vk, m, sig):
        half = vk[:ln] if m == "0" else vk[ln:]
        return p.verifier(sig, half)

    return OneTimeSig(keygen, sign, verify, ["0", "1"])


def forgery_success(sig, forger, slot="0"):
    """Probability that ``forger`` forges on ``slot`` after seeing a signature on the other message.

    ``forger`` maps ``(vk, signature on the other message)`` to a
    distribution over forged signatures.
    """
    other = "1" if slot == "0" else "0"
    total = ZERO
    for (vk, sk), w in sig.keygen.items():
        for seen, x in sig.sign((sk, other)).items():
            for forged, y in forger((vk, seen)).items():
                total += w * x * y * sig.verify(vk, slot, forged)
    return total


def reduction_adversary_ots(forger, p, slot="0"):
    """Puzzle adversary from a Lamport forger.

    On puzzle ``s`` it samples a fresh ``(k', s')``, places ``s`` in
    ``slot`` and ``s'`` in the other position, and forwards the forger's
    output on ``(vk, k')``.
    """
    images = {}
    for s in p.puzzle_marginal().support:
        acc = {}
        for (k2, s2), w in p.sampler.items():
            vk = s + s2 if slot == "0" else s2 + s
            try:
                image = forger((vk, k2))
            except DomainError:
                raise DomainError(f"forger is undefined on verification key {vk!r}") from None
            for key, x in image.items():
                acc[key] = acc.get(key, ZERO) + w * x
        images[s] = FiniteDist(acc)
    return Adversary(images)


# ----------------------------------------------------------------- commitments

class NICommitment:
    """``commit`` maps a message to a distribution over (c, d); ``receive`` opens (c, d) to a message or ``None``."""

    def __init__(self, messages, commit, receive):
        self.messages = list(messages)
        if not self.messages:
            raise ContractError("commitment with an empty message space")
        self.commit = commit if isinstance(commit, Channel) else Channel(commit)
        self.receive = dict(receive)
        for m in self.messages:
            self.commit(m)

    def opens_to(self, c, d):
        return self.receive.get((c, d))


def commitment_correctness_error(com):
    share = Fraction(1, len(com.messages))
    ok = sum((share * w for m in com.messages for (c, d), w in com.commit(m).items()
              if com.opens_to(c, d) == m), ZERO)
    return 1 - ok


def puzzle_from_commitment(com):
    """Key = (message, decommitment), puzzle = commitment, accept iff the opening yields the message."""
    share = Fraction(1, len(com.messages))
    items = [((m + d, c), share * w) for m in com.messages for (c, d), w in com.commit(m).items()]
    table = {(m + d, c): 1 for (c, d), m in com.receive.items() if m is not None}
    return Puzzle(FiniteDist(items), TableVerifier(table), ev=True)


# -------------------------------------------------------------------- generators

class PseudoDetPRG:
    """A randomised map from ``n``-bit seeds to ``ell``-bit outputs."""

    def __init__(self, n, ell, gen):
        self.n, self.ell = int(n), int(ell)
        if self.ell <= self.n:
            raise ValidationError(f"output length {ell} does not stretch the seed length {n}")
        self.gen = gen if isinstance(gen, Channel) else Channel(gen)
        for seed in D.all_bitstrings(self.n):
            for y in self.gen(seed).support:
                if len(y) != self.ell:
                    raise ValidationError(f"output {y!r} is not {self.ell} bits")

    def seeds(self):
        return D.all_bitstrings(self.n)

    def outputs(self):
        return sorted({y for seed in self.seeds() for y in self.gen(seed).support})


def collision_probability(g, seed):
    return sum((w * w for _, w in g.gen(seed).items()), ZERO)


def prg_base_puzzle(g):
    share = Fraction(1, 2**g.n)
    items = [((seed, y), share * w) for seed in g.seeds() for y, w in g.gen(seed).items()]
    table = {(seed, y): w for seed in g.seeds() for y, w in g.gen(seed).items()}
    return Puzzle(FiniteDist(items), TableVerifier(table), ev=True)


def puzzle_from_prg(g, lam):
    """``lam`` uniform seeds, puzzle = one output per seed; accept if any fresh regeneration matches.

    The acceptance probability of ``(k, s)`` is ``1 - prod_i Pr[G(k_i) != s_i]``.
    """
    if g.ell < 3 * g.n:
        raise ContractError(f"stretch {g.ell} is below three times the seed length {g.n}")
    if lam < 1:
        raise ContractError("lambda must be positive")
    base = prg_base_puzzle(g)
    check_support(len(base.puzzle_marginal()) ** lam, "generator puzzle")
    if lam == 1:
        return base.with_lambda(1)
    return ProductPuzzle([base] * lam, "or", lam)


def prg_correctness_prediction(g, lam):
    """``prod_i (1 - E_seed[collision probability])`` over the ``lam`` coordinates."""
    share = Fraction(1, 2**g.n)
    miss = 1 - sum((share * collision_probability(g, s) for s in g.seeds()), ZERO)
    return miss**lam


def heavy_output_mass(g):
    """``sum_y max_x Pr[G(x) = y]``."""
    return sum((max(g.gen(x).prob(y) for x in g.seeds()) for y in g.outputs()), ZERO)


def heavy_output_count(g):
    """Number of outputs some seed produces with probability at least ``2^-n``.

    Returns ``(count, ok)`` where ``ok`` holds iff the count is at most
    ``2^(2n)`` and the heavy mass is at most ``2^n``.
    """
    check_support(2**g.n * max(1, len(g.outputs())), "heavy-output table")
    threshold = Fraction(1, 2**g.n)
    count = sum(1 for y in g.outputs() if max(g.gen(x).prob(y) for x in g.seeds()) >= threshold)
    ok = count <= 4**g.n and heavy_output_mass(g) <= 2**g.n
    return count, ok


def pseudodeterminism_error(g):
    """Smallest ``mu`` such that a ``1 - mu`` fraction of seeds has an output of weight ``>= 1 - mu``."""
    heaviest = [max(w for _, w in g.gen(s).items()) for s in g.seeds()]
    total = len(heaviest)
    candidates = {Fraction(j, total) for j in range(total + 1)} | {1 - h for h in heaviest}

    def good(mu):
        return sum(1 for h in heaviest if h >= 1 - mu) >= (1 - mu) * total

    return min(mu for mu in candidates if 0 <= mu <= 1 and good(mu))

