"""Synthetic labelled datasets and partition-agreement scoring.

Formats are written as templates: literal text with ``{...}`` fields.

* ``{D}``, ``{D:4}``, ``{D:2-5}``  digits (fixed or ranged count)
* ``{U}``, ``{L}``, ``{A}``        upper, lower, mixed-case letters
* ``{S:1-2}``                      spaces
* ``{X}``                          hex digits
* ``{C:a|b|c}``                    one of the listed choices

Literal braces are written ``{{`` and ``}}``.
"""

from __future__ import annotations

import math
import random
import re
import string
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

_FIELD = re.compile(r"\{\{|\}\}|\{([A-Z])(?::([^}]*))?\}")

_ALPHABET = {
    "D": string.digits,
    "U": string.ascii_uppercase,
    "L": string.ascii_lowercase,
    "A": string.ascii_letters,
    "S": " ",
    "X": "0123456789abcdef",
}


def _parse(template: str) -> list:
    parts = []
    pos = 0
    for m in _FIELD.finditer(template):
        if m.start() > pos:
            parts.append(("lit", template[pos : m.start()]))
        tok = m.group(0)
        if tok in ("{{", "}}"):
            parts.append(("lit", tok[0]))
        else:
            kind, arg = m.group(1), m.group(2)
            if kind == "C":
                if not arg:
                    raise ValueError(f"choice field needs options in {template!r}")
                parts.append(("choice", arg.split("|")))
            elif kind in _ALPHABET:
                lo = hi = 1
                if arg:
                    if "-" in arg:
                        a, b = arg.split("-", 1)
                        lo, hi = int(a), int(b)
                    else:
                        lo = hi = int(arg)
                if not 1 <= lo <= hi:
                    raise ValueError(f"bad repeat count {arg!r} in {template!r}")
                parts.append(("run", kind, lo, hi))
            else:
                raise ValueError(f"unknown field {tok!r} in {template!r}")
        pos = m.end()
    if pos < len(template):
        parts.append(("lit", template[pos:]))
    return parts


def template_regex(template: str) -> re.Pattern:
    """Regex accepting exactly the strings a template can generate."""
    out = []
    for part in _parse(template):
        if part[0] == "lit":
            out.append(re.escape(part[1]))
        elif part[0] == "choice":
            out.append("(?:" + "|".join(re.escape(c) for c in part[1]) + ")")
        else:
            _, kind, lo, hi = part
            out.append(f"[{re.escape(_ALPHABET[kind])}]{{{lo},{hi}}}")
    return re.compile("".join(out))


def generate(template: str, rng: random.Random) -> str:
    out = []
    for part in _parse(template):
        if part[0] == "lit":
            out.append(part[1])
        elif part[0] == "choice":
            out.append(rng.choice(part[1]))
        else:
            _, kind, lo, hi = part
            chars = _ALPHABET[kind]
            out.append("".join(rng.choice(chars) for _ in range(rng.randint(lo, hi))))
    return "".join(out)


@dataclass(frozen=True)
class SyntheticSpec:
    formats: tuple
    seed: int = 0

    def __post_init__(self):
        formats = tuple((str(t), int(c)) for t, c in self.formats)
        object.__setattr__(self, "formats", formats)
        for t, c in formats:
            if c < 1:
                raise ValueError(f"format {t!r} needs a positive count")
            _parse(t)

    def generate(self, shuffle: bool = True) -> tuple:
        """(strings, labels); the label of a string is its format's index."""
        rng = random.Random(self.seed)
        rows = []
        for label, (t, c) in enumerate(self.formats):
            rows.extend((generate(t, rng), label) for _ in range(c))
        if shuffle:
            rng.shuffle(rows)
        return [s for s, _ in rows], [l for _, l in rows]

    def check_disjoint(self, strings: Sequence[str], labels: Sequence[int]) -> None:
        """Raise if some generated string also matches another format's language."""
        regexes = [template_regex(t) for t, _ in self.formats]
        for s, l in zip(strings, labels):
            for k, rx in enumerate(regexes):
                if k != l and rx.fullmatch(s):
                    raise ValueError(f"{s!r} from format {l} also matches format {k}")


def _entropy(counts) -> float:
    total = sum(counts)
    return -sum(c / total * math.log(c / total) for c in counts if c)


def nmi(a: Sequence, b: Sequence) -> float:
    """Normalized mutual information 2·I(a;b) / (H(a) + H(b)), in [0, 1]."""
    if len(a) != len(b):
        raise ValueError("label sequences differ in length")
    if not a:
        return 1.0
    n = len(a)
    ha = _entropy(Counter(a).values())
    hb = _entropy(Counter(b).values())
    if ha == 0 and hb == 0:
        return 1.0
    joint = Counter(zip(a, b))
    ca, cb = Counter(a), Counter(b)
    mi = sum(c / n * math.log(c * n / (ca[x] * cb[y])) for (x, y), c in joint.items())
    return max(0.0, min(1.0, 2 * mi / (ha + hb)))


MOTIVATING_FORMATS = (
    ("not_available", 5),
    ("doi:{S:1-2}10.1016/{U}{D:4}-{D:4}({D:2}){D:5}-{D}", 11),
    ("ISBN: {D}-{D:3}-{D:5}-X", 34),
    ("doi:{S:1-2}10.13039/{D:6-9}", 110),
    ("ISBN: {D}-{D:3}-{D:5}-{D}", 267),
    ("PMC{D:7}", 1024),
)


def motivating_dataset(seed: int = 0) -> tuple:
    """A references column shaped like the six-format example."""
    return SyntheticSpec(MOTIVATING_FORMATS, seed).generate()


DESK_FORMATS = (
    "{D:4}-{D:2}-{D:2}",
    "({D:3}) {D:3}-{D:4}",
    "{L:3-8}@{L:3-6}.com",
    "{U:2}{D:4}",
    "{U}{L:2-7} {U}{L:2-9}",
    "{D:1-3}.{D:1-3}.{D:1-3}.{D:1-3}",
    "#{X:6}",
    "{U:3}-{D:3}",
    "{D:1-2}:{D:2} {C:AM|PM}",
    "v{D}.{D:1-2}.{D:1-2}",
)


def desk_spec(n_formats: int, per_format: int, seed: int) -> SyntheticSpec:
    """Pick ``n_formats`` distinct templates from a fixed menu."""
    rng = random.Random(seed)
    chosen = rng.sample(DESK_FORMATS, n_formats)
    return SyntheticSpec(tuple((t, per_format) for t in chosen), seed)
