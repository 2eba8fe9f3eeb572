"""Command-line entry point.

Exit status: 0 success, 1 invariant or bound violation, 2 parse or
validation error, 3 support cap exceeded.
"""

import argparse
import sys
from fractions import Fraction

from . import dist as D
from . import efid as E
from . import primitives as P
from . import transforms as T
from .errors import DEFAULT_MAX_SUPPORT, DEFAULT_TOLERANCE, OwpuzzError, ValidationError, limits
from .fileformat import (
    file_kind, load, parse_puzzle_file, serialize_efid, serialize_puzzle,
)
from .report import Report, analyze, check_invariants

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _emit(args, report):
    _write(getattr(args, "report", None), report.render(args.format))
    return EXIT_OK if report.ok else EXIT_VIOLATION


def _rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _load_puzzle(path):
    return parse_puzzle_file(_read(path))


# --------------------------------------------------------------- commands

def cmd_analyze(args):
    return _emit(args, analyze(_load_puzzle(args.file)))


def _add_transform_rows(report, rep, prefix=""):
    report.info(f"{prefix}input alpha", rep.input.alpha)
    report.info(f"{prefix}input beta", rep.input.beta)
    report.check(f"{prefix}output alpha", rep.output.alpha, rep.claimed.alpha,
                 rep.output.alpha <= rep.claimed.alpha, f"{rep.name} correctness promise")
    report.check(f"{prefix}output beta", rep.output.beta, rep.claimed.beta,
                 rep.output.beta <= rep.claimed.beta, f"{rep.name} security promise")
    report.check(f"{prefix}certified", rep.certified, True, rep.certified, rep.name)


def cmd_transform(args):
    puzzles = [_load_puzzle(f) for f in args.files]
    op = args.op
    if op != "combine" and len(puzzles) != 1:
        raise ValidationError(f"--op {op} takes exactly one input file")
    p = puzzles[0]
    if op == "or-repeat":
        out, rep = T.or_repeat(p, args.t or 2)
    elif op == "and-repeat":
        out, rep = T.and_repeat(p, args.t or 2)
    elif op == "ver-relax":
        out, rep = T.ver_relax(p, args.t or Fraction(1, 2))
    elif op == "bot-guard":
        out, rep = T.bot_guard(p)
    elif op == "guarantee":
        out, rep = T.correctness_guarantee(p, args.mode, args.lam or p.lam)
    elif op == "random-input":
        out, rep = T.random_input(p)
    elif op == "combine":
        out, rep = T.combine(puzzles, args.lam or max(q.lam for q in puzzles), args.mode)
    else:  # argparse restricts choices
        raise ValidationError(f"unknown op {op!r}")
    report = Report(f"transform {op}")
    _add_transform_rows(report, rep)
    if args.output:
        _write(args.output, serialize_puzzle(out))
    return _emit(args, report)


def cmd_efid_bounds(args):
    report = Report("efid bounds")
    if args.m is not None and args.delta is not None:
        exact = E.entropy_to_sd_bound_exact(args.m, args.delta)
        value = exact if exact is not None else E.entropy_to_sd_bound(args.m, args.delta)
        report.info("entropy_to_sd_bound", value, "SD(X,U_m) lower bound for entropy deficit delta")
        report.info("entropy_to_sd_bound_vacuous", value < 0)
    if args.omega is not None and args.gamma is not None:
        delta = E.delta_bound(args.omega, args.gamma)
        report.info("delta_bound", delta, "KL floor from correctness omega and security gamma")
        report.check("delta_bound_matches_bernoulli_kl", delta, D.bernoulli_kl(1 - args.omega, args.gamma),
                     abs(delta - D.bernoulli_kl(1 - args.omega, args.gamma)) <= 1e-12)
    if args.sd is not None and args.t is not None:
        q, guarantee = E.sd_amp_reps(args.sd, args.t)
        report.info("sd_amp_reps", q, "repetitions for SD 1-2e^-t")
        report.info("sd_amp_guarantee", guarantee)
    if args.lam is not None and args.c is not None:
        delta, floor, ok = E.weak_puzzle_delta_floor(args.lam, args.c)
        report.check("weak_puzzle_delta_floor", delta, floor, ok, "delta(0, 1-lam^-c) >= lam^-(c+1)")
    if not report.rows:
        raise ValidationError("efid bounds needs --m/--delta, --omega/--gamma, --sd/--t or --lambda/--c")
    return _emit(args, report)


def cmd_efid_params(args):
    pp = E.pipeline_params(args.lam, args.m, float(args.Delta), float(args.nu_star),
                           (lambda n: n**args.poly_degree), float(args.omega), float(args.gamma))
    report = Report("efid params")
    for name, value in vars(pp).items():
        report.info(name, value)
    return _emit(args, report)


def cmd_efid_build(args):
    p = _load_puzzle(args.file)
    nu = args.advice if args.advice is not None else E.entropy_target(p)
    built = E.owpuzz_to_nonuniform_efid(p, args.ell, args.a, args.Delta, [nu], args.block_len)
    pair, info = built[nu]
    report = Report("efid build")
    report.info("advice", nu)
    report.info("d_nu", info["d_nu"])
    report.info("rbits", info["rbits"])
    report.info("entropy D_nu", info["entropy"])
    report.info("entropy deficit", info["deficit"], "output length minus entropy")
    report.info("sd_from_uniform", info["sd_from_uniform"])
    joint = p.sampler.map(lambda ks: ks[1] + ks[0])
    ceiling = E.entropy_ceiling(joint, args.ell, args.a, info["rbits"], args.block_len)
    report.check("entropy ceiling", info["entropy"], ceiling, info["entropy"] <= ceiling + 1e-9,
                 "H(D) <= a(ell H(X) + log m) + seed length")
    if args.output:
        _write(args.output, serialize_efid(pair))
    return _emit(args, report)


def cmd_primitive(args):
    text = _read(args.file)
    kind = file_kind(text)
    obj = load(text)
    report = Report(f"primitive {kind}")
    if kind == "OTSIG":
        p = P.puzzle_from_ots(obj)
        report.info("scheme correctness error", P.ots_correctness_error(obj))
    elif kind == "NICOM":
        p = P.puzzle_from_commitment(obj)
        report.info("commitment correctness error", P.commitment_correctness_error(obj))
    elif kind == "PDPRG":
        lam = args.lam or 1
        p = P.puzzle_from_prg(obj, lam)
        count, ok = P.heavy_output_count(obj)
        report.check("heavy_output_count", count, 4**obj.n, ok, "heavy outputs at most 2^(2n)")
        mass = P.heavy_output_mass(obj)
        report.check("heavy_output_mass", mass, 2**obj.n, mass <= 2**obj.n, "sum_y max_x Pr[G(x)=y] <= 2^n")
        report.info("pseudodeterminism_error", P.pseudodeterminism_error(obj))
        report.info("predicted correctness error", P.prg_correctness_prediction(obj, lam))
    else:
        raise ValidationError(f"{kind} files are not primitives")
    analyze(p, report)
    if args.output:
        _write(args.output, serialize_puzzle(p))
    return _emit(args, report)


def cmd_check(args):
    text = _read(args.file)
    kind = file_kind(text)
    if kind != "OWPUZZ":
        obj = load(text)
        report = Report(f"check {kind}")
        if kind == "PDPRG":
            count, ok = P.heavy_output_count(obj)
            report.check("heavy_output_count", count, 4**obj.n, ok, "heavy outputs at most 2^(2n)")
        elif kind == "EFID":
            test, adv = D.optimal_distinguisher(obj.d1, obj.d0)
            sd = D.statistical_distance(obj.d0, obj.d1)
            report.check("distinguisher advantage", adv, sd, adv == sd, "optimal test achieves SD")
        p = {"OTSIG": P.puzzle_from_ots, "NICOM": P.puzzle_from_commitment}.get(kind)
        if p is not None:
            check_invariants(p(obj), report)
        return _emit(args, report)
    return _emit(args, check_invariants(parse_puzzle_file(text)))


# ----------------------------------------------------------------- parser

def build_parser():
    parser = argparse.ArgumentParser(prog="owpuzz", description=__doc__.splitlines()[0])
    parser.add_argument("--max-support", type=int, default=DEFAULT_MAX_SUPPORT,
                        help="cap on the number of outcomes of any exact construction")
    parser.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                        help="float tolerance for entropy and KL comparisons")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--report", help="write the report here instead of stdout")

    p = sub.add_parser("analyze", help="report correctness, optimal break and entropies of a puzzle file")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("transform", help="apply a construction and write the resulting puzzle")
    p.add_argument("files", nargs="+")
    p.add_argument("--op", required=True, choices=(
        "or-repeat", "and-repeat", "ver-relax", "bot-guard", "guarantee", "random-input", "combine"))
    p.add_argument("--t", type=_rational, help="repetition count or relaxation threshold")
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--mode", choices=("general", "ev", "auto"), default="general")
    p.add_argument("-o", "--output")
    common(p)
    p.set_defaults(func=cmd_transform)

    efid = sub.add_parser("efid", help="EFID pipeline tools").add_subparsers(dest="efid_command", required=True)
    p = efid.add_parser("bounds", help="evaluate the pipeline's bound formulas")
    p.add_argument("--m", type=_rational)
    p.add_argument("--delta", type=_rational)
    p.add_argument("--omega", type=_rational)
    p.add_argument("--gamma", type=_rational)
    p.add_argument("--sd", type=_rational)
    p.add_argument("--t", type=_rational)
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--c", type=int)
    common(p)
    p.set_defaults(func=cmd_efid_bounds)

    p = efid.add_parser("params", help="evaluate the parameter schedule")
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--Delta", type=_rational, required=True)
    p.add_argument("--nu-star", type=_rational, required=True)
    p.add_argument("--poly-degree", type=int, default=1)
    p.add_argument("--omega", type=_rational, default=Fraction(0))
    p.add_argument("--gamma", type=_rational, default=Fraction(1, 2))
    common(p)
    p.set_defaults(func=cmd_efid_params)

    p = efid.add_parser("build", help="build the micro-scale EFID candidate of a puzzle file")
    p.add_argument("file")
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--Delta", type=_rational, default=Fraction(1))
    p.add_argument("--advice", type=int)
    p.add_argument("--block-len", type=int, default=1)
    p.add_argument("-o", "--output")
    common(p)
    p.set_defaults(func=cmd_efid_build)

    p = sub.add_parser("primitive", help="convert an OTSIG, NICOM or PDPRG file into a puzzle")
    p.add_argument("file")
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("-o", "--output")
    common(p)
    p.set_defaults(func=cmd_primitive)

    p = sub.add_parser("check", help="run the invariant suite on a file")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with limits(args.max_support, args.tolerance):
            return args.func(args)
    except OwpuzzError as exc:
        print(f"owpuzz: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"owpuzz: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
