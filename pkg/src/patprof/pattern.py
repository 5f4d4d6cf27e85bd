"""Atoms, patterns and their matching semantics.

An atom is a prefix matcher: given a string and a position it returns the
length of the prefix it consumes there, with 0 meaning failure.  Atoms never
match an empty prefix.  A pattern is a sequence of atoms and describes a
string when the atoms, applied one after another, consume it exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

import regex

CONST = "const"
CLASS = "class"
REGEX = "regex"
FUNCT = "funct"
KINDS = (CONST, CLASS, REGEX, FUNCT)


@lru_cache(maxsize=None)
def _class_run(charset: str) -> re.Pattern:
    return re.compile(f"(?:{charset})+")


@lru_cache(maxsize=None)
def _compile_regex(expr: str):
    # POSIX mode gives leftmost-longest matching, so match() returns the
    # longest prefix the expression accepts.
    return regex.compile(expr, flags=regex.POSIX | regex.V0)


@dataclass(frozen=True)
class Atom:
    """A named prefix matcher with a static cost.

    ``kind`` is one of ``const``, ``class``, ``regex`` or ``funct``.  Class
    atoms carry ``charset`` (a bracketed regex character class such as
    ``[0-9]``) and ``width`` (0 for unbounded).  Funct atoms wrap an opaque
    callable that maps a string to the length of the prefix it accepts.
    """

    name: str
    kind: str
    cost: float
    literal: Optional[str] = None
    charset: Optional[str] = None
    width: int = 0
    expr: Optional[str] = None
    func: Optional[Callable[[str], int]] = field(default=None, compare=False, repr=False)
    label: Optional[str] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.kind == CONST and not self.literal:
            raise ValueError("constant atoms need a nonempty literal")
        if self.kind == CLASS:
            if not self.charset:
                raise ValueError(f"class atom {self.name!r} has no charset")
            if self.width < 0:
                raise ValueError("class width must be non-negative")
            _class_run(self.charset)
        if self.kind == REGEX:
            if not self.expr:
                raise ValueError(f"regex atom {self.name!r} has no expression")
            _compile_regex(self.expr)
        if self.kind == FUNCT and self.func is None:
            raise ValueError(f"function atom {self.name!r} has no matcher")
        if not self.cost > 0:
            raise ValueError(f"atom {self.name!r} has nonpositive cost {self.cost!r}")

    def match(self, s: str, pos: int = 0) -> int:
        """Length of the prefix of ``s[pos:]`` this atom consumes (0 on failure)."""
        if pos >= len(s):
            return 0
        kind = self.kind
        if kind == CONST:
            return len(self.literal) if s.startswith(self.literal, pos) else 0
        if kind == CLASS:
            m = _class_run(self.charset).match(s, pos)
            if m is None:
                return 0
            run = m.end() - pos
            if self.width and run != self.width:
                return 0
            return run
        if kind == REGEX:
            m = _compile_regex(self.expr).match(s, pos)
            return m.end() - pos if m else 0
        n = self.func(s[pos:])
        if not isinstance(n, int) or n < 1 or n > len(s) - pos:
            return 0
        return n

    @property
    def is_class(self) -> bool:
        return self.kind == CLASS

    @property
    def short(self) -> str:
        return self.label or self.name

    def with_width(self, width: int) -> "Atom":
        """Fixed-width variant of an unbounded class atom, costing Q/width."""
        if self.kind != CLASS or self.width != 0:
            raise ValueError("only unbounded class atoms can be restricted")
        if width < 1:
            raise ValueError("width must be positive")
        return Atom(self.name, CLASS, self.cost / width, charset=self.charset,
                    width=width, label=self.label)

    def render(self, style: str = "human") -> str:
        if style == "human":
            if self.kind == CONST:
                return json.dumps(self.literal, ensure_ascii=False)
            if self.kind == CLASS:
                if self.width == 0:
                    return self.short + "+"
                if self.width == 1:
                    return self.short
                return f"{self.short}{{{self.width}}}"
            return self.short
        if style == "regex":
            if self.kind == CONST:
                return re.escape(self.literal)
            if self.kind == CLASS:
                if self.width == 0:
                    return self.charset + "+"
                if self.width == 1:
                    return self.charset
                return f"{self.charset}{{{self.width}}}"
            if self.kind == REGEX:
                return f"(?:{self.expr})"
            return f"<{self.name}>"
        raise ValueError(f"unknown render style {style!r}")

    def sort_key(self) -> tuple:
        return (self.kind, self.name, self.width, self.literal or "", self.charset or "",
                self.expr or "")

    def __str__(self) -> str:
        return self.render("human")


def atom_match(a: Atom, s: str) -> int:
    return a.match(s, 0)


@dataclass(frozen=True)
class Pattern:
    """A sequence of atoms.  The empty sequence is the Empty pattern."""

    atoms: tuple = ()

    is_bottom = False

    def __init__(self, atoms: Iterable[Atom] = ()):
        object.__setattr__(self, "atoms", tuple(atoms))

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    @property
    def is_empty(self) -> bool:
        return not self.atoms

    def match_lengths(self, s: str) -> Optional[list]:
        """Per-atom matched lengths if the pattern describes ``s``, else None."""
        pos = 0
        out = []
        for a in self.atoms:
            n = a.match(s, pos)
            if n == 0:
                return None
            out.append(n)
            pos += n
        return out if pos == len(s) else None

    def describes(self, s: str) -> bool:
        pos = 0
        for a in self.atoms:
            n = a.match(s, pos)
            if n == 0:
                return False
            pos += n
        return pos == len(s)

    def render(self, style: str = "human") -> str:
        if style == "human":
            if not self.atoms:
                return "ε"
            return " ".join(a.render("human") for a in self.atoms)
        if style == "regex":
            return "^" + _regex_body(self.atoms) + "$"
        raise ValueError(f"unknown render style {style!r}")

    def __str__(self) -> str:
        return self.render("human")


def _regex_body(atoms: Sequence[Atom]) -> str:
    parts = []
    for i, a in enumerate(atoms):
        piece = a.render("regex")
        # A class atom always consumes its maximal run.  A plain regex would
        # be free to backtrack into the run, so pin the run boundary unless
        # the end anchor already does it.
        if a.kind == CLASS and i + 1 < len(atoms):
            piece += f"(?!{a.charset})"
        parts.append(piece)
    return "".join(parts)


class BottomPattern:
    """The ⊥ sentinel: describes nothing and costs ∞."""

    is_bottom = True
    is_empty = False
    atoms = ()

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __len__(self) -> int:
        return 0

    def __iter__(self):
        return iter(())

    def describes(self, s: str) -> bool:
        return False

    def match_lengths(self, s: str):
        return None

    def render(self, style: str = "human") -> str:
        return "⊥" if style == "human" else "(?!)"

    def __str__(self) -> str:
        return "⊥"

    def __repr__(self) -> str:
        return "BOTTOM"

    def __reduce__(self):
        return (BottomPattern, ())


BOTTOM = BottomPattern()
EMPTY = Pattern(())


def pattern_describes(p, s: str) -> bool:
    return p.describes(s)


def pattern_render(p, style: str = "human") -> str:
    return p.render(style)


def const(literal: str, kappa: float) -> Atom:
    """Constant atom for ``literal`` under the κ/|s| cost rule."""
    return Atom(json.dumps(literal, ensure_ascii=False), CONST, kappa / len(literal),
                literal=literal)
