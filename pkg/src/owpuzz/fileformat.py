"""Line-oriented text formats for puzzles, primitives and EFID pairs.

Every format starts with a ``<KIND> 1`` header line, then one record per
line.  ``#`` starts a comment.  Bitstrings are raw ``0``/``1`` tokens and
probabilities are exact ``num/den`` (or integer) tokens.  Serialisation is
canonical: records sorted, probabilities written as ``num/den``, so that
``serialize(parse(text)) == text`` for canonical input.
"""

import re
from fractions import Fraction

from .dist import Channel, FiniteDist
from .efid import EFIDPair
from .errors import ParseError, ValidationError
from .primitives import NICommitment, OneTimeSig, PseudoDetPRG
from .puzzle import Puzzle, TableVerifier, materialize_verifier

_BITS = re.compile(r"[01]+\Z")
_RATIONAL = re.compile(r"\d+(/\d+)?\Z")
BOTTOM = "BOT"


def fmt_rational(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _bits(token, lineno):
    if not _BITS.match(token):
        raise ParseError(f"expected a bitstring, got {token!r}", lineno)
    return token


def _prob(token, lineno):
    if not _RATIONAL.match(token):
        raise ParseError(f"expected a rational num/den, got {token!r}", lineno)
    try:
        value = Fraction(token)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {token!r}", lineno) from None
    if value > 1:
        raise ValidationError(f"line {lineno}: probability {token} exceeds 1")
    return value


def _int(token, lineno):
    if not token.isdigit():
        raise ParseError(f"expected a non-negative integer, got {token!r}", lineno)
    return int(token)


def _bool(token, lineno):
    if token not in ("true", "false"):
        raise ParseError(f"expected true or false, got {token!r}", lineno)
    return token == "true"


def _records(text, kind, arity):
    """Yield ``(lineno, keyword, fields)`` after checking the header and field counts."""
    lines = _lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty file") from None
    if header != [kind, "1"]:
        raise ParseError(f"expected header '{kind} 1', got {' '.join(header)!r}", lineno)
    for lineno, fields in lines:
        keyword, rest = fields[0], fields[1:]
        if keyword not in arity:
            raise ParseError(f"unknown record {keyword!r}", lineno)
        if len(rest) != arity[keyword]:
            raise ParseError(f"{keyword} takes {arity[keyword]} fields, got {len(rest)}", lineno)
        yield lineno, keyword, rest


def _check_sum(weights, what):
    total = sum(weights, Fraction(0))
    if total != 1:
        raise ValidationError(f"{what} weights sum to {total}, not 1")


def _once(seen, key, lineno, what):
    if key in seen:
        raise ValidationError(f"line {lineno}: duplicate {what} {' '.join(key)}")
    seen.add(key)


# ------------------------------------------------------------------- puzzles

def parse_puzzle_file(text):
    ev, lam = True, 1
    samples, verify = {}, {}
    arity = {"EV": 1, "LAMBDA": 1, "SAMPLE": 3, "VERIFY": 3}
    for lineno, kw, f in _records(text, "OWPUZZ", arity):
        if kw == "EV":
            ev = _bool(f[0], lineno)
        elif kw == "LAMBDA":
            lam = _int(f[0], lineno)
            if lam < 1:
                raise ValidationError(f"line {lineno}: LAMBDA must be positive")
        else:
            pair = (_bits(f[0], lineno), _bits(f[1], lineno))
            target = samples if kw == "SAMPLE" else verify
            if pair in target:
                raise ValidationError(f"line {lineno}: duplicate {kw} pair {pair[0]} {pair[1]}")
            target[pair] = _prob(f[2], lineno)
    if not samples:
        raise ValidationError("puzzle file has no SAMPLE lines")
    _check_sum(samples.values(), "SAMPLE")
    return Puzzle(FiniteDist(samples), TableVerifier(verify), ev=ev, lam=lam)


def serialize_puzzle(p):
    table = p.verifier.table if isinstance(p.verifier, TableVerifier) else materialize_verifier(p)
    out = ["OWPUZZ 1", f"EV {'true' if p.ev else 'false'}", f"LAMBDA {p.lam}"]
    out += [f"SAMPLE {k} {s} {fmt_rational(w)}" for (k, s), w in p.sampler.items()]
    out += [f"VERIFY {k} {s} {fmt_rational(v)}" for (k, s), v in sorted(table.items()) if v]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- primitives

def parse_ots_file(text):
    messages, keygen, sign, verify = [], {}, {}, {}
    seen = set()
    arity = {"MESSAGE": 1, "KEYGEN": 3, "SIGN": 4, "VERIFY": 4}
    for lineno, kw, f in _records(text, "OTSIG", arity):
        if kw == "MESSAGE":
            m = _bits(f[0], lineno)
            _once(seen, ("MESSAGE", m), lineno, "message")
            messages.append(m)
        elif kw == "KEYGEN":
            pair = (_bits(f[0], lineno), _bits(f[1], lineno))
            _once(seen, ("KEYGEN",) + pair, lineno, "KEYGEN pair")
            keygen[pair] = _prob(f[2], lineno)
        elif kw == "SIGN":
            sk, m, sig = (_bits(x, lineno) for x in f[:3])
            _once(seen, ("SIGN", sk, m, sig), lineno, "SIGN record")
            sign.setdefault((sk, m), {})[sig] = _prob(f[3], lineno)
        else:
            key = tuple(_bits(x, lineno) for x in f[:3])
            _once(seen, ("VERIFY",) + key, lineno, "VERIFY record")
            verify[key] = _prob(f[3], lineno)
    _check_sum(keygen.values(), "KEYGEN")
    for (sk, m), dist in sign.items():
        _check_sum(dist.values(), f"SIGN {sk} {m}")
    return OneTimeSig(FiniteDist(keygen), Channel(sign), verify, messages)


def parse_commitment_file(text):
    messages, commit, receive = [], {}, {}
    seen = set()
    arity = {"MESSAGE": 1, "COMMIT": 4, "RECEIVE": 3}
    for lineno, kw, f in _records(text, "NICOM", arity):
        if kw == "MESSAGE":
            m = _bits(f[0], lineno)
            _once(seen, ("MESSAGE", m), lineno, "message")
            messages.append(m)
        elif kw == "COMMIT":
            m, c, d = (_bits(x, lineno) for x in f[:3])
            _once(seen, ("COMMIT", m, c, d), lineno, "COMMIT record")
            commit.setdefault(m, {})[(c, d)] = _prob(f[3], lineno)
        else:
            c, d = _bits(f[0], lineno), _bits(f[1], lineno)
            _once(seen, ("RECEIVE", c, d), lineno, "RECEIVE pair")
            receive[(c, d)] = None if f[2] == BOTTOM else _bits(f[2], lineno)
    for m, dist in commit.items():
        _check_sum(dist.values(), f"COMMIT {m}")
    return NICommitment(messages, commit, receive)


def parse_prg_file(text):
    n = ell = None
    gen = {}
    seen = set()
    arity = {"N": 1, "ELL": 1, "GEN": 3}
    for lineno, kw, f in _records(text, "PDPRG", arity):
        if kw == "N":
            n = _int(f[0], lineno)
        elif kw == "ELL":
            ell = _int(f[0], lineno)
        else:
            seed, y = _bits(f[0], lineno), _bits(f[1], lineno)
            _once(seen, (seed, y), lineno, "GEN record")
            gen.setdefault(seed, {})[y] = _prob(f[2], lineno)
    if n is None or ell is None:
        raise ValidationError("PDPRG file needs N and ELL records")
    for seed, dist in gen.items():
        _check_sum(dist.values(), f"GEN {seed}")
    return PseudoDetPRG(n, ell, gen)


# --------------------------------------------------------------------- EFID

def parse_efid_file(text):
    sides = {"D0": {}, "D1": {}}
    for lineno, kw, f in _records(text, "EFID", {"D0": 2, "D1": 2}):
        x = _bits(f[0], lineno)
        if x in sides[kw]:
            raise ValidationError(f"line {lineno}: duplicate {kw} outcome {x}")
        sides[kw][x] = _prob(f[1], lineno)
    for kw, d in sides.items():
        _check_sum(d.values(), kw)
    return EFIDPair(FiniteDist(sides["D0"]), FiniteDist(sides["D1"]))


def serialize_efid(pair):
    d0, d1 = pair.materialize()
    out = ["EFID 1"]
    out += [f"D0 {x} {fmt_rational(w)}" for x, w in d0.items()]
    out += [f"D1 {x} {fmt_rational(w)}" for x, w in d1.items()]
    return "\n".join(out) + "\n"


PARSERS = {
    "OWPUZZ": parse_puzzle_file,
    "OTSIG": parse_ots_file,
    "NICOM": parse_commitment_file,
    "PDPRG": parse_prg_file,
    "EFID": parse_efid_file,
}


def file_kind(text):
    for lineno, fields in _lines(text):
        if fields[0] in PARSERS:
            return fields[0]
        raise ParseError(f"unknown file header {fields[0]!r}", lineno)
    raise ParseError("empty file")


def load(text):
    """Parse any supported format, dispatching on the header."""
    return PARSERS[file_kind(text)](text)
