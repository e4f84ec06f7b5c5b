import hashlib
import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import TextIO, Union

import numpy as np

from mfas_cover.constants import FRACTION_DIGITS, INSTANCE_HEADER, MAX_VERTICES, SCALE
from mfas_cover.exceptions import CapExceeded, FormatError, ValidationFailed, WeightError
from mfas_cover.poset import Arc, Poset, incomparable_pairs
from mfas_cover.settings import DEFAULT_SETTINGS, Settings

logger = logging.getLogger(__name__)

__all__ = [
    "Instance",
    "ValidationReport",
    "format_amount",
    "incomparable_pairs",
    "parse_instance",
    "parse_weight",
    "serialize_instance",
    "to_nanos",
    "validate_hemimetric",
    "validate_kgonal",
    "validate_probability",
]

# Weights are fixed-point integers in units of 10**-9 ("nanos").
Weight = int
Amount = Union[int, Fraction]

_DECIMAL_RE = re.compile(r"^(-?)(\d+)(?:\.(\d+))?$")


def parse_weight(text: str, *, line=None) -> Weight:
    """Parse a decimal weight into nanos, exactly."""
    match = _DECIMAL_RE.match(text)
    if not match:
        raise FormatError(f"malformed weight {text!r}", line=line)
    sign, whole, frac = match.groups()
    frac = frac or ""
    if len(frac) > FRACTION_DIGITS:
        raise WeightError(f"weight {text!r} has more than {FRACTION_DIGITS} fractional digits", line=line)
    nanos = int(whole) * SCALE + int(frac.ljust(FRACTION_DIGITS, "0") or 0)
    if sign and nanos:
        raise WeightError(f"negative weight {text!r}", line=line)
    return nanos


def to_nanos(value) -> Weight:
    """Convert an int, str, Decimal or Fraction in real units to nanos."""
    if isinstance(value, str):
        return parse_weight(value)
    if isinstance(value, bool):
        raise WeightError(f"not a weight: {value!r}")
    if isinstance(value, int):
        nanos = value * SCALE
    else:
        scaled = Fraction(value) * SCALE
        if scaled.denominator != 1:
            raise WeightError(f"weight {value} is not representable with {FRACTION_DIGITS} fractional digits")
        nanos = scaled.numerator
    if nanos < 0:
        raise WeightError(f"negative weight {value}")
    return nanos


def format_amount(nanos: Amount) -> str:
    """
    Exact decimal for an amount in nanos, with minimal digits.

    Rationals without a terminating decimal expansion print as ``p/q``.
    """
    real = Fraction(nanos) / SCALE
    den = real.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{real.numerator}/{real.denominator}"
    digits = max(twos, fives)
    text = format(Decimal(real.numerator * 10**digits // real.denominator).scaleb(-digits), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def format_ratio(value, digits: int = 9) -> str:
    """Decimal for a unitless rational, rounded half-even to ``digits`` places."""
    value = Fraction(value)
    with localcontext() as decimal_ctx:
        decimal_ctx.prec = digits + len(str(abs(value.numerator) // value.denominator)) + 2
        rounded = (Decimal(value.numerator) / Decimal(value.denominator)).quantize(
            Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN
        )
    text = format(rounded, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


@dataclass(frozen=True)
class Instance:
    """
    Problem input: vertex count, weights (nanos) and a strict poset.

    ``w[i][j]`` is the weight paid when i precedes j; the diagonal is zero.
    """

    n: int
    w: tuple[tuple[Weight, ...], ...]
    poset: Poset

    def __post_init__(self):
        if self.poset.n != self.n:
            raise ValidationFailed(f"poset has {self.poset.n} vertices, instance has {self.n}")
        if len(self.w) != self.n or any(len(row) != self.n for row in self.w):
            raise FormatError(f"weight matrix is not {self.n}x{self.n}")
        for i, row in enumerate(self.w):
            if row[i] != 0:
                raise WeightError(f"nonzero diagonal weight at ({i},{i})")
            for j, value in enumerate(row):
                if value < 0:
                    raise WeightError(f"negative weight at ({i},{j})")

    @classmethod
    def from_weights(cls, rows: Sequence[Sequence], pairs: Iterable[Arc] = ()) -> "Instance":
        """Build from rows in real units (int, str, Decimal or Fraction)."""
        matrix = tuple(tuple(to_nanos(value) for value in row) for row in rows)
        return cls(len(matrix), matrix, Poset.from_pairs(len(matrix), pairs))

    @classmethod
    def from_nanos(cls, rows: Sequence[Sequence[int]], poset: Poset = None) -> "Instance":
        matrix = tuple(tuple(int(value) for value in row) for row in rows)
        return cls(len(matrix), matrix, poset if poset is not None else Poset(len(matrix)))

    def weight(self, i: int, j: int) -> Weight:
        return self.w[i][j]

    @property
    def fixed_cost(self) -> Weight:
        """Weight paid on poset pairs by every linear extension."""
        return sum(self.w[a][b] for a, b in self.poset.strict_pairs)

    @property
    def digest(self) -> str:
        return hashlib.sha256(serialize_instance(self).encode()).hexdigest()

    def with_poset(self, poset: Poset) -> "Instance":
        return Instance(self.n, self.w, poset)


@dataclass(frozen=True)
class ValidationReport:
    """
    Outcome of a weight-class check.

    ``is_hemimetric`` is the flag of the checked inequality class (triangle,
    k-gonal or probability); it is true exactly when ``violations`` is empty.
    """

    kind: str
    violations: tuple[tuple[int, ...], ...] = ()
    checked_k: int = None
    sampled: bool = False
    seed: int = None

    @property
    def is_hemimetric(self) -> bool:
        return not self.violations

    @property
    def holds(self) -> bool:
        return not self.violations


# --- text format -------------------------------------------------------------


def _lines(source: Union[str, TextIO]) -> list[str]:
    text = source if isinstance(source, str) else source.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _int_token(token: str, what: str, line: int) -> int:
    if not token.isdigit():
        raise FormatError(f"{what} must be a non-negative integer, got {token!r}", line=line)
    return int(token)


def parse_instance(source: Union[str, TextIO]) -> Instance:
    lines = _lines(source)
    if not lines or lines[0].strip() != INSTANCE_HEADER:
        raise FormatError(f"expected header {INSTANCE_HEADER!r}", line=1)
    if len(lines) < 2:
        raise FormatError("missing vertex count", line=2)
    head = lines[1].split()
    if len(head) != 2 or head[0] != "n":
        raise FormatError("expected 'n <N>'", line=2)
    n = _int_token(head[1], "vertex count", 2)
    if not 1 <= n <= MAX_VERTICES:
        raise FormatError(f"vertex count {n} outside 1..{MAX_VERTICES}", line=2)

    pairs = []
    index = 2
    while index < len(lines) and lines[index].split()[:1] == ["prec"]:
        tokens = lines[index].split()
        if len(tokens) != 3:
            raise FormatError("expected 'prec <a> <b>'", line=index + 1)
        a = _int_token(tokens[1], "vertex", index + 1)
        b = _int_token(tokens[2], "vertex", index + 1)
        if a >= n or b >= n:
            raise FormatError(f"prec vertex out of range 0..{n - 1}", line=index + 1)
        if a == b:
            raise FormatError("prec pair must relate distinct vertices", line=index + 1)
        pairs.append((a, b))
        index += 1

    if index >= len(lines) or lines[index].strip() != "weights":
        raise FormatError("expected 'weights'", line=index + 1)
    index += 1
    if len(lines) < index + n + 1:
        raise FormatError(f"expected {n} weight rows followed by 'end'", line=len(lines))

    rows = []
    for i in range(n):
        lineno = index + i + 1
        tokens = lines[index + i].split()
        if len(tokens) != n:
            raise FormatError(f"weight row has {len(tokens)} entries, expected {n}", line=lineno)
        row = tuple(parse_weight(token, line=lineno) for token in tokens)
        if row[i] != 0:
            raise WeightError(f"diagonal weight w({i},{i}) must be 0", line=lineno)
        rows.append(row)
    index += n
    if lines[index].strip() != "end":
        raise FormatError("expected 'end'", line=index + 1)
    if any(line.strip() for line in lines[index + 1:]):
        raise FormatError("trailing content after 'end'", line=index + 2)

    poset = Poset.from_pairs(n, pairs)
    logger.debug("parsed instance n=%d with %d stated precedences", n, len(pairs))
    return Instance(n, tuple(rows), poset)


def serialize_instance(inst: Instance) -> str:
    out = [INSTANCE_HEADER, f"n {inst.n}"]
    out.extend(f"prec {a} {b}" for a, b in inst.poset.reduction())
    out.append("weights")
    out.extend(" ".join(format_amount(value) for value in row) for row in inst.w)
    out.append("end")
    return "\n".join(out) + "\n"


# --- weight classes ----------------------------------------------------------


def validate_hemimetric(inst: Instance) -> ValidationReport:
    """All ordered triples of distinct vertices with w(i,k) > w(i,j) + w(j,k)."""
    w = inst.w
    n = inst.n
    violations = []
    for i in range(n):
        wi = w[i]
        for j in range(n):
            if j == i:
                continue
            wij = wi[j]
            wj = w[j]
            for k in range(n):
                if k != i and k != j and wi[k] > wij + wj[k]:
                    violations.append((i, j, k))
    if violations:
        logger.debug("hemimetric check: %d violated triangles", len(violations))
    return ValidationReport("hemimetric", tuple(violations), checked_k=3)


def _kgonal_exhaustive(inst: Instance, k: int) -> list[tuple[int, ...]]:
    w = inst.w
    n = inst.n
    violations = []

    def extend(path, used, total, row_max):
        if total >= row_max:
            return
        last = path[-1]
        for nxt in range(n):
            if used >> nxt & 1:
                continue
            step = total + w[last][nxt]
            if len(path) == k - 1:
                if w[path[0]][nxt] > step:
                    violations.append((*path, nxt))
            else:
                extend((*path, nxt), used | 1 << nxt, step, row_max)

    for first in range(n):
        extend((first,), 1 << first, 0, max(w[first]))
    return violations


def _kgonal_sampled(inst: Instance, k: int, samples: int, seed: int) -> list[tuple[int, ...]]:
    rng = np.random.default_rng(seed)
    w = inst.w
    found = set()
    for _ in range(samples):
        seq = tuple(int(v) for v in rng.choice(inst.n, size=k, replace=False))
        total = sum(w[a][b] for a, b in zip(seq, seq[1:]))
        if w[seq[0]][seq[-1]] > total:
            found.add(seq)
    return sorted(found)


def validate_kgonal(
    inst: Instance,
    k: int,
    *,
    exhaustive: bool = None,
    samples: int = None,
    seed: int = None,
    settings: Settings = DEFAULT_SETTINGS,
) -> ValidationReport:
    """
    Check w(a1,ak) <= w(a1,a2) + ... + w(ak-1,ak) over k distinct vertices.

    Exhaustive for k <= 4 or n within the configured cap, otherwise sampled
    with a recorded seed. Requesting exhaustive mode beyond the cap raises
    ``CapExceeded``.
    """
    if k < 3:
        raise ValidationFailed(f"k-gonal check needs k >= 3, got {k}")
    within_cap = k <= 4 or inst.n <= settings.kgonal_exhaustive_cap
    if exhaustive and not within_cap:
        raise CapExceeded(
            f"exhaustive {k}-gonal check limited to n <= {settings.kgonal_exhaustive_cap}, got n={inst.n}"
        )
    if inst.n < k:
        return ValidationReport("kgonal", (), checked_k=k)
    if exhaustive is None:
        exhaustive = within_cap
    if exhaustive:
        return ValidationReport("kgonal", tuple(_kgonal_exhaustive(inst, k)), checked_k=k)

    samples = settings.kgonal_samples if samples is None else samples
    seed = settings.kgonal_seed if seed is None else seed
    logger.info("sampling %d sequences for the %d-gonal check (seed %d)", samples, k, seed)
    violations = _kgonal_sampled(inst, k, samples, seed)
    return ValidationReport("kgonal", tuple(violations), checked_k=k, sampled=True, seed=seed)


def validate_probability(inst: Instance) -> ValidationReport:
    """Pairs {i,j}, i < j, with w(i,j) + w(j,i) != 1."""
    w = inst.w
    violations = tuple(
        (i, j)
        for i in range(inst.n)
        for j in range(i + 1, inst.n)
        if w[i][j] + w[j][i] != SCALE
    )
    return ValidationReport("probability", violations)
