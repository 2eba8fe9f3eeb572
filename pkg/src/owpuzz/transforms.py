"""Puzzle-to-puzzle constructions with exact parameter bookkeeping.

Every transform returns ``(puzzle, report)``.  The report carries the
input's measured ``(alpha, beta)``, the output's measured pair, and the
bound the construction promises; ``certified`` says whether the measured
output meets that bound.  ``beta`` always means the optimal (unbounded)
break probability, so a certified bound holds against every adversary.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .dist import ONE, ZERO, FiniteDist, all_bitstrings, xor_bits
from .errors import ContractError, ResourceError, check_support
from .puzzle import (
    FlaggedVerifier, PadVerifier, ParamPair, ProductPuzzle, Puzzle,
    TableVerifier, ThresholdVerifier, correctness_error, measure, optimal_break_value,
    trivial_puzzle,
)

HALF = Fraction(1, 2)


@dataclass
class TransformReport:
    name: str
    input: ParamPair
    output: ParamPair
    claimed: ParamPair
    certified: bool
    notes: dict = field(default_factory=dict)


def _claim(alpha, beta):
    # promised bounds can exceed 1; clamp so they still form a ParamPair
    return ParamPair(min(alpha, ONE), min(beta, ONE))


def _report(name, before, after, claimed, strict_alpha=False, **notes):
    alpha_ok = after.alpha < claimed.alpha if strict_alpha else after.alpha <= claimed.alpha
    return TransformReport(name, before, after, claimed, alpha_ok and after.beta <= claimed.beta, notes)


def _check_t(t):
    if int(t) != t or t < 1:
        raise ContractError(f"repetition count must be a positive integer, got {t}")
    return int(t)


def or_repeat(p, t):
    """t independent copies; accept if any copy's verifier accepts.

    Probabilistic verifiers combine as noisy-OR, ``1 - prod(1 - v_i)``.
    Promised: correctness ``alpha^t``, security ``t * beta``.
    """
    t = _check_t(t)
    before = measure(p)
    out = p if t == 1 else ProductPuzzle([p] * t, "or", p.lam)
    after = measure(out)
    return out, _report("or_repeat", before, after, _claim(before.alpha**t, t * before.beta), t=t)


def and_repeat(p, t):
    """t independent copies; accept only if every copy accepts.

    Promised: correctness ``t * alpha`` (union bound), security ``beta^t``.
    """
    t = _check_t(t)
    before = measure(p)
    out = p if t == 1 else ProductPuzzle([p] * t, "and", p.lam)
    after = measure(out)
    # the security half of the promise is only proven for EV puzzles
    return out, _report("and_repeat", before, after, _claim(t * before.alpha, before.beta**t),
                        t=t, security_bound_applies=p.ev)


def ver_relax(p, t):
    """Accept every puzzle whose honest conditional failure rate is at least ``t``.

    The new verifier reads the sampler's statistics, so the output is never
    marked efficient.  Promised: correctness error strictly below ``t``,
    security ``beta + alpha / t``.
    """
    t = Fraction(t)
    if not 0 < t <= 1:
        raise ContractError(f"threshold must lie in (0, 1], got {t}")
    before = measure(p)
    accepted = {s for s in p.puzzle_marginal().support if 1 - p.conditional_acceptance(s) >= t}
    out = Puzzle(p.sampler, ThresholdVerifier(p.verifier, accepted), ev=False, lam=p.lam)
    after = measure(out)
    claimed = _claim(t, before.beta + before.alpha / t)
    return out, _report("ver_relax", before, after, claimed, strict_alpha=True,
                        t=t, auto_accepted=sorted(accepted))


def bot_guard(p):
    """Resample through the verifier: rejected samples become a bottom puzzle that always verifies.

    Puzzles gain a leading flag bit (``1`` + s for real puzzles, all zeros
    for bottom); keys are unchanged, bottom uses the all-zero key.
    Promised: correctness ``1/4`` (as ``v(1 - v) <= 1/4``), security
    ``alpha + beta``.
    """
    if not p.ev:
        raise ContractError("bot_guard runs the verifier inside the sampler; the puzzle must be EV")
    before = measure(p)
    items, bottom = [], ZERO
    for (k, s), w in p.sampler.items():
        v = p.verifier(k, s)
        if v:
            items.append(((k, "1" + s), w * v))
        bottom += w * (1 - v)
    if bottom:
        items.append((("0" * p.key_len, "0" * (p.puzzle_len + 1)), bottom))
    out = Puzzle(FiniteDist(items), FlaggedVerifier(p.verifier), ev=True, lam=p.lam)
    after = measure(out)
    claimed = _claim(Fraction(1, 4), before.alpha + before.beta)
    return out, _report("bot_guard", before, after, claimed, bottom_mass=bottom)


def correctness_guarantee(p, mode="general", lam=None):
    """Force negligible correctness error whatever the candidate looks like.

    ``general``: ``ver_relax(1/2)`` then ``or_repeat(lam)``; promised
    ``(2^-lam, lam * (2 alpha + beta))``.
    ``ev``: ``bot_guard`` then ``or_repeat(lam)``; promised
    ``(4^-lam, lam * (alpha + beta))``.
    """
    lam = p.lam if lam is None else lam
    lam = _check_t(lam)
    before = measure(p)
    if mode == "general":
        mid, first = ver_relax(p, HALF)
        claimed = _claim(HALF**lam, lam * (2 * before.alpha + before.beta))
    elif mode == "ev":
        if not p.ev:
            raise ContractError("ev-mode guarantee needs an efficiently verifiable puzzle")
        mid, first = bot_guard(p)
        claimed = _claim(Fraction(1, 4) ** lam, lam * (before.alpha + before.beta))
    else:
        raise ContractError(f"unknown guarantee mode {mode!r}")
    out, second = or_repeat(mid.with_lambda(lam), lam)
    return out, _report("correctness_guarantee", before, second.output, claimed,
                        mode=mode, lam=lam, stages=[first, second])


def _combine(candidates, lam, mode):
    guaranteed, reports = [], []
    for c in candidates:
        m = ("ev" if c.ev else "general") if mode == "auto" else mode
        g, r = correctness_guarantee(c, m, lam)
        guaranteed.append(g)
        reports.append(r)
    before = ParamPair(max(r.input.alpha for r in reports), min(r.input.beta for r in reports))
    out = guaranteed[0] if len(guaranteed) == 1 else ProductPuzzle(guaranteed, "and", lam)
    after = measure(out)
    claimed = _claim(sum((r.output.alpha for r in reports), ZERO), min(r.output.beta for r in reports))
    notes = {"candidates": reports,
             "guaranteed_breaks": [r.output.beta for r in reports]}
    return out, _report("combine", before, after, claimed, **notes)


def combine(candidates, lam, mode="general"):
    """AND-combine correctness-guaranteed candidates.

    Secure as long as one candidate is: the combined optimal break is the
    product of the guaranteed candidates' breaks.  ``mode`` selects the
    guarantee route (``general``, ``ev`` or ``auto`` per candidate).
    """
    candidates = list(candidates)
    if len(candidates) < 2:
        raise ContractError("combine needs at least two candidates")
    return _combine(candidates, lam, mode)


def random_input(p):
    """Make the key uniform by one-time padding it into the puzzle.

    New key ``k'`` is uniform; new puzzle is ``(k xor k') || s``; the new
    verifier unpads before calling the old one.  Correctness and optimal
    break are preserved exactly.
    """
    if not all(isinstance(k, str) for k, _ in p.sampler.support):
        raise ContractError("random_input needs fixed-length bitstring keys")
    n = p.key_len
    if n < 1:
        raise ContractError("random_input needs keys of at least one bit")
    check_support(len(p.sampler) * 2**n, "random-input sampler")
    pads = all_bitstrings(n)
    share = Fraction(1, 2**n)
    items = [((r, xor_bits(k, r) + s), w * share) for (k, s), w in p.sampler.items() for r in pads]
    before = measure(p)
    out = Puzzle(FiniteDist(items), PadVerifier(p.verifier, n), ev=p.ev, lam=p.lam)
    after = measure(out)
    return out, _report("random_input", before, after, before)


class BudgetExceeded(Exception):
    pass


class StepClock:
    """Step counter handed to registry entries; raises once the budget runs out."""

    def __init__(self, budget):
        self.budget = budget
        self.used = 0

    def tick(self, steps=1):
        self.used += steps
        if self.used > self.budget:
            raise BudgetExceeded(f"used {self.used} of {self.budget} steps")


def _instantiate(entry, lam):
    clock = StepClock(lam**3)
    try:
        return entry(lam, clock)
    except BudgetExceeded:
        return None


def universal_ev(registry, lam):
    """Combine every (sampler i, verifier j) pairing of the first ``lam`` registry entries.

    Each entry is a callable ``entry(lam, clock) -> Puzzle`` that must call
    ``clock.tick`` as it works; entries that run past ``lam**3`` steps are
    replaced by the trivial always-accept puzzle.
    """
    registry = list(registry)
    if not registry:
        raise ContractError("universal construction over an empty registry")
    lam = _check_t(lam)
    built = [_instantiate(e, lam) for e in registry[:lam]]
    candidates, contributors = [], []
    for i, j in itertools.product(range(len(built)), repeat=2):
        si, vj = built[i], built[j]
        if si is None or vj is None:
            candidates.append(trivial_puzzle(lam))
            continue
        candidates.append(Puzzle(si.sampler, vj.verifier, ev=si.ev and vj.ev, lam=lam))
        contributors.append((i, j))
    out, report = _combine(candidates, lam, "auto")
    report.name = "universal_ev"
    report.notes["contributors"] = contributors
    report.notes["pairs"] = list(itertools.product(range(len(built)), repeat=2))
    return out, report


def nonuniform_combine(family, advice_bound, lam=None, mode="general"):
    """Combine the advice-indexed candidates ``family[1] .. family[advice_bound]``."""
    if advice_bound < 1:
        raise ContractError("advice bound must be at least 1")
    missing = [nu for nu in range(1, advice_bound + 1) if nu not in family]
    if missing:
        raise ContractError(f"family has no candidate for advice {missing[0]}")
    candidates = [family[nu] for nu in range(1, advice_bound + 1)]
    lam = lam if lam is not None else max(c.lam for c in candidates)
    out, report = _combine(candidates, lam, mode)
    report.name = "nonuniform_combine"
    return out, report


MIN_ERROR_TABLE_LIMIT = 16


def min_error_verifier(sampler, lam=1):
    """Deterministic verifier table minimising correctness error plus optimal break.

    Exhaustive over all ``2^(|keys| * |puzzles|)`` accept/reject tables, so
    only micro samplers (at most 16 key-puzzle cells) are accepted.  Ties go
    to the first table in enumeration order.
    """
    if not isinstance(sampler, FiniteDist):
        sampler = FiniteDist(sampler)
    keys = sorted({k for k, _ in sampler.support})
    puzzles = sorted({s for _, s in sampler.support})
    cells = [(k, s) for k in keys for s in puzzles]
    if len(cells) > MIN_ERROR_TABLE_LIMIT:
        raise ResourceError(
            f"exhaustive verifier search over {len(cells)} cells exceeds the limit of {MIN_ERROR_TABLE_LIMIT}")
    best, best_score = None, None
    for bits in itertools.product((0, 1), repeat=len(cells)):
        table = {c: 1 for c, b in zip(cells, bits) if b}
        p = Puzzle(sampler, TableVerifier(table), ev=False, lam=lam)
        score = correctness_error(p) + optimal_break_value(p)
        if best_score is None or score < best_score:
            best, best_score = p, score
    return best, best_score

