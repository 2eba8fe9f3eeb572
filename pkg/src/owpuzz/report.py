"""Metric reports and the per-puzzle invariant suite."""

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from . import dist as D
from . import transforms as T
from .errors import tolerance
from .puzzle import (
    Adversary, conditional_failures, correctness_error, joint_entropies, kl_sampling_hardness,
    distributional_gap, optimal_break, verifier_dpi_witness,
)

COLUMNS = ("metric", "value", "bound", "anchor", "satisfied")


def fmt_value(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return "inf" if x == math.inf else repr(x)
    return str(x)


@dataclass
class Row:
    metric: str
    value: object
    bound: object = None
    anchor: str = ""
    satisfied: bool = True


class Report:
    """Ordered rows of (metric, value, bound, anchor, satisfied)."""

    def __init__(self, title=""):
        self.title = title
        self.rows = []

    def info(self, metric, value, anchor=""):
        self.rows.append(Row(metric, value, None, anchor, True))

    def check(self, metric, value, bound, satisfied, anchor=""):
        self.rows.append(Row(metric, value, bound, anchor, bool(satisfied)))

    @property
    def ok(self):
        return all(r.satisfied for r in self.rows)

    def failures(self):
        return [r for r in self.rows if not r.satisfied]

    def as_records(self):
        return [{"metric": r.metric, "value": fmt_value(r.value), "bound": fmt_value(r.bound),
                 "anchor": r.anchor, "satisfied": fmt_value(r.satisfied)} for r in self.rows]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.as_records())
        return buf.getvalue()

    def to_json(self):
        return json.dumps({"title": self.title, "ok": self.ok, "rows": self.as_records()}, indent=2) + "\n"

    def render(self, fmt="csv"):
        return self.to_json() if fmt == "json" else self.to_csv()


def analyze(p, report=None):
    """Correctness, optimal break, entropies and per-puzzle failure rates of one puzzle."""
    r = report or Report("analyze")
    alpha = correctness_error(p)
    beta, adv = optimal_break(p)
    r.info("key_len", p.key_len)
    r.info("puzzle_len", p.puzzle_len)
    r.info("ev", p.ev)
    r.info("lambda", p.lam)
    r.info("correctness_error", alpha, "honest rejection probability")
    r.info("optimal_break", beta, "best unbounded adversary")
    r.check("optimal_break_floor", beta, 1 - alpha, beta >= 1 - alpha,
            "honest-key adversary lower bound on the optimal break")
    for name, h in joint_entropies(p).items():
        r.info(f"entropy {name}", h)
    r.info("min_entropy H_inf(k,s)", D.min_entropy(p.sampler))
    for s, fail in sorted(conditional_failures(p).items()):
        r.info(f"conditional_failure s={s}", fail)
    return r


def check_invariants(p, report=None, tol=None):
    """Run every transform and information-theoretic identity on one puzzle."""
    tol = tolerance() if tol is None else tol
    r = analyze(p, report or Report("check"))
    before = T.measure(p)
    a, b = before.alpha, before.beta

    for t in (2, 3):
        _, rep = T.or_repeat(p, t)
        r.check(f"or_repeat t={t} correctness", rep.output.alpha, a**t, rep.output.alpha == a**t,
                "noisy-OR repetition: correctness error is alpha^t")
        exact = 1 - (1 - b) ** t
        r.check(f"or_repeat t={t} break", rep.output.beta, exact, rep.output.beta == exact,
                "noisy-OR repetition: break is 1-(1-beta)^t")
        r.check(f"or_repeat t={t} break bound", rep.output.beta, t * b, rep.output.beta <= t * b,
                "noisy-OR repetition: break at most t*beta")

        _, rep = T.and_repeat(p, t)
        r.check(f"and_repeat t={t} break", rep.output.beta, b**t, rep.output.beta == b**t,
                "AND repetition: break is beta^t")
        r.check(f"and_repeat t={t} correctness", rep.output.alpha, t * a, rep.output.alpha <= t * a,
                "AND repetition: correctness at most t*alpha")

    for thr in (Fraction(1, 4), Fraction(1, 2)):
        _, rep = T.ver_relax(p, thr)
        r.check(f"ver_relax t={thr} correctness", rep.output.alpha, thr, rep.output.alpha < thr,
                "threshold relaxation: correctness below t")
        bound = b + a / thr
        r.check(f"ver_relax t={thr} break", rep.output.beta, bound, rep.output.beta <= bound,
                "threshold relaxation: break at most beta + alpha/t")

    if p.ev:
        _, rep = T.bot_guard(p)
        r.check("bot_guard correctness", rep.output.alpha, Fraction(1, 4), rep.output.alpha <= Fraction(1, 4),
                "bottom guard: correctness at most 1/4")
        r.check("bot_guard break", rep.output.beta, a + b, rep.output.beta <= a + b,
                "bottom guard: break at most alpha + beta")

    q, rep = T.random_input(p)
    r.check("random_input correctness", rep.output.alpha, a, rep.output.alpha == a,
            "one-time pad preserves correctness")
    r.check("random_input break", rep.output.beta, b, rep.output.beta == b,
            "one-time pad preserves the optimal break")
    pad = q.puzzle_marginal().map(lambda s: s[:p.key_len])
    uniform = D.FiniteDist.uniform_bits(p.key_len)
    r.check("random_input pad uniform", D.statistical_distance(pad, uniform), Fraction(0), pad == uniform,
            "padded key component is exactly uniform")

    _, adv = optimal_break(p)
    lhs, rhs, ok = verifier_dpi_witness(p, adv, tol)
    r.check("verifier_dpi optimal adversary", lhs, rhs, ok,
            "verifier as a channel cannot increase KL")
    honest = Adversary.true_conditional(p)
    lhs, rhs, ok = verifier_dpi_witness(p, honest, tol)
    r.check("verifier_dpi honest sampler", lhs, rhs, ok and rhs <= tol,
            "true conditional sampler has zero KL")
    for name, a_ in (("optimal", adv), ("uniform", Adversary.uniform_key(p))):
        gap = distributional_gap(p, a_)
        kl = kl_sampling_hardness(p, a_)
        bound = math.inf if kl == math.inf else math.sqrt(math.log(2) / 2 * kl)
        r.check(f"pinsker {name} adversary", gap, bound, float(gap) <= bound + tol,
                "statistical gap at most sqrt(ln2/2 * KL)")
    return r
