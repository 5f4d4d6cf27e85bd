"""The atom universe: default atoms, cost rules and user configuration."""

from __future__ import annotations

import hashlib
import json
import math
import os
from functools import lru_cache
from importlib import resources
from typing import Iterable, Optional, Union

import regex

from .errors import ConfigError
from .pattern import CLASS, CONST, FUNCT, REGEX, Atom, const

DEFAULT_CONST_BASE = 5.0


class DictionaryMatcher:
    """Prefix matcher accepting the longest listed word that starts a string."""

    def __init__(self, words: Iterable[str]):
        self.words = frozenset(w for w in words if w)
        self.lengths = sorted({len(w) for w in self.words}, reverse=True)
        self.digest = hashlib.sha256("\n".join(sorted(self.words)).encode()).hexdigest()

    def __call__(self, s: str) -> int:
        for n in self.lengths:
            if n <= len(s) and s[:n] in self.words:
                return n
        return 0


class AtomUniverse:
    """An ordered set of base atoms plus the constant-cost parameter κ.

    The universe also resolves the static cost of enrichment products:
    ``Const(s)`` costs κ/|s| and a fixed-width class ``c^z`` costs Q(c^0)/z.
    """

    def __init__(self, atoms: Iterable[Atom], const_base: float = DEFAULT_CONST_BASE):
        atoms = tuple(atoms)
        names = set()
        for a in atoms:
            if a.name in names:
                raise ConfigError(f"duplicate atom name {a.name!r}")
            if not a.cost > 0:
                raise ConfigError(f"atom {a.name!r} has nonpositive cost")
            if a.kind == CLASS and a.width != 0:
                raise ConfigError(f"base class atom {a.name!r} must be unbounded")
            names.add(a.name)
        if not const_base > 0 or math.isinf(const_base):
            raise ConfigError("const_base must be a positive finite number")
        self.atoms = atoms
        self.const_base = float(const_base)
        self._by_name = {a.name: a for a in atoms}
        self._fingerprint = None

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, item) -> bool:
        if isinstance(item, str):
            return item in self._by_name
        return self._by_name.get(item.name) == item

    def __getitem__(self, name: str) -> Atom:
        return self._by_name[name]

    def __repr__(self) -> str:
        return f"AtomUniverse({[a.name for a in self.atoms]!r}, const_base={self.const_base})"

    def names(self) -> list:
        return [a.name for a in self.atoms]

    def const(self, literal: str) -> Atom:
        return const(literal, self.const_base)

    def static_cost(self, atom: Atom) -> float:
        """Q(atom), resolving enrichment products against the base atoms."""
        base = self._by_name.get(atom.name)
        if atom.kind == CONST and base != atom:
            return self.const_base / len(atom.literal)
        if base is None:
            raise LookupError(f"atom {atom.name!r} is not in this universe")
        if atom.kind == CLASS and atom.width:
            if base.kind != CLASS or base.charset != atom.charset:
                raise LookupError(f"atom {atom.name!r} does not match its base class")
            return base.cost / atom.width
        if base != atom:
            raise LookupError(f"atom {atom.name!r} differs from the universe's definition")
        return base.cost

    def subset(self, names: Iterable[str]) -> "AtomUniverse":
        keep = set(names)
        missing = keep - set(self._by_name)
        if missing:
            raise LookupError(f"unknown atoms: {sorted(missing)}")
        return AtomUniverse([a for a in self.atoms if a.name in keep], self.const_base)

    def scaled(self, factor: float) -> "AtomUniverse":
        """Same atoms with every static cost (κ included) multiplied by ``factor``."""
        atoms = [Atom(a.name, a.kind, a.cost * factor, literal=a.literal, charset=a.charset,
                      width=a.width, expr=a.expr, func=a.func, label=a.label) for a in self.atoms]
        return AtomUniverse(atoms, self.const_base * factor)

    def describe(self) -> list:
        out = []
        for a in self.atoms:
            d = {"name": a.name, "kind": a.kind, "cost": repr(a.cost)}
            if a.kind == CLASS:
                d["definition"] = a.charset
            elif a.kind == REGEX:
                d["definition"] = a.expr
            elif a.kind == FUNCT:
                d["definition"] = getattr(a.func, "digest", getattr(a.func, "__qualname__", "?"))
            out.append(d)
        return out

    @property
    def fingerprint(self) -> str:
        if self._fingerprint is None:
            doc = {"const_base": repr(self.const_base), "atoms": self.describe()}
            blob = json.dumps(doc, sort_keys=True, ensure_ascii=False).encode()
            self._fingerprint = hashlib.sha256(blob).hexdigest()
        return self._fingerprint


def static_cost(universe: AtomUniverse, atom: Atom) -> float:
    return universe.static_cost(atom)


def _parse_cost(value, where: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: cost must be a number")
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "∞"):
            return math.inf
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(f"{where}: cost {value!r} is not a number") from None
    if not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: cost must be a number")
    value = float(value)
    if math.isnan(value) or value <= 0:
        raise ConfigError(f"{where}: cost must be positive, got {value!r}")
    return value


def _charset(definition: str, where: str) -> str:
    if not isinstance(definition, str) or not definition:
        raise ConfigError(f"{where}: class definition must be a nonempty string")
    cs = definition if definition.startswith("[") and definition.endswith("]") else f"[{definition}]"
    try:
        atom = Atom("probe", CLASS, 1.0, charset=cs)
        atom.match("x")
    except Exception as exc:
        raise ConfigError(f"{where}: bad character class {definition!r}: {exc}") from None
    return cs


def _entry_atom(entry, index: int, base_dir: str) -> Atom:
    if not isinstance(entry, dict):
        raise ConfigError(f"atom entry {index}: expected a mapping, got {type(entry).__name__}")
    name = entry.get("name")
    where = f"atom entry {index}" + (f" ({name})" if name else "")
    if not isinstance(name, str) or not name:
        raise ConfigError(f"{where}: missing name")
    unknown = set(entry) - {"name", "kind", "definition", "cost", "label"}
    if unknown:
        raise ConfigError(f"{where}: unknown fields {sorted(unknown)}")
    kind = entry.get("kind")
    if "cost" not in entry:
        raise ConfigError(f"{where}: missing cost")
    cost = _parse_cost(entry["cost"], where)
    definition = entry.get("definition")
    label = entry.get("label")
    if label is not None and not isinstance(label, str):
        raise ConfigError(f"{where}: label must be a string")
    if kind == "const":
        if not isinstance(definition, str) or not definition:
            raise ConfigError(f"{where}: const definition must be a nonempty string")
        return Atom(name, CONST, cost, literal=definition, label=label)
    if kind == "class":
        return Atom(name, CLASS, cost, charset=_charset(definition, where), label=label)
    if kind == "regex":
        if not isinstance(definition, str) or not definition:
            raise ConfigError(f"{where}: regex definition must be a nonempty string")
        try:
            regex.compile(definition, flags=regex.POSIX | regex.V0)
        except regex.error as exc:
            raise ConfigError(f"{where}: bad regex {definition!r}: {exc}") from None
        return Atom(name, REGEX, cost, expr=definition, label=label)
    if kind == "dictionary":
        if isinstance(definition, list):
            words = [str(w) for w in definition]
        elif isinstance(definition, str) and definition:
            path = definition if os.path.isabs(definition) else os.path.join(base_dir, definition)
            try:
                with open(path, encoding="utf-8", errors="strict") as fh:
                    words = [line.rstrip("\r\n") for line in fh]
            except (OSError, UnicodeDecodeError) as exc:
                raise ConfigError(f"{where}: cannot read word list {path!r}: {exc}") from None
        else:
            raise ConfigError(f"{where}: dictionary definition must be a path or a list")
        matcher = DictionaryMatcher(words)
        if not matcher.words:
            raise ConfigError(f"{where}: word list is empty")
        return Atom(name, FUNCT, cost, func=matcher, label=label)
    raise ConfigError(f"{where}: kind must be one of const, class, regex, dictionary; got {kind!r}")


@lru_cache(maxsize=1)
def _default_doc() -> dict:
    text = resources.files("patprof").joinpath("data/default_atoms.json").read_text("utf-8")
    return json.loads(text)


@lru_cache(maxsize=1)
def default_universe() -> AtomUniverse:
    """The 17 default atoms with the shipped cost table."""
    doc = _default_doc()
    atoms = [_entry_atom(e, i, "") for i, e in enumerate(doc["atoms"])]
    return AtomUniverse(atoms, doc["const_base"])


ConfigSource = Union[str, os.PathLike, dict, list, None]


def load_universe(config: ConfigSource = None) -> AtomUniverse:
    """Default universe extended (or shadowed) by user-declared atoms.

    ``config`` may be a path to a JSON or YAML document, or an already-parsed
    document.  A document is either a list of atom entries or a mapping with
    an ``atoms`` list and an optional ``const_base``.
    """
    base_dir = os.getcwd()
    if config is None:
        return default_universe()
    if isinstance(config, (str, os.PathLike)):
        path = os.fspath(config)
        base_dir = os.path.dirname(os.path.abspath(path))
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot read atom config {path!r}: {exc}") from None
        config = _parse_document(text, path)
    if config is None:
        return default_universe()
    const_base = default_universe().const_base
    if isinstance(config, dict):
        unknown = set(config) - {"atoms", "const_base"}
        if unknown:
            raise ConfigError(f"atom config: unknown top-level fields {sorted(unknown)}")
        if "const_base" in config:
            const_base = _parse_cost(config["const_base"], "const_base")
        entries = config.get("atoms", []) or []
    elif isinstance(config, list):
        entries = config
    else:
        raise ConfigError("atom config must be a list of entries or a mapping with 'atoms'")
    if not isinstance(entries, list):
        raise ConfigError("atom config: 'atoms' must be a list")
    declared = {}
    for i, entry in enumerate(entries):
        atom = _entry_atom(entry, i, base_dir)
        if atom.name in declared:
            raise ConfigError(f"atom entry {i} ({atom.name}): name declared twice")
        declared[atom.name] = atom
    atoms = [declared.pop(a.name, a) for a in default_universe()]
    atoms.extend(declared.values())
    return AtomUniverse(atoms, const_base)


def _parse_document(text: str, path: str):
    if path.lower().endswith((".yaml", ".yml")):
        import yaml

        try:
            return yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"atom config {path!r} is not valid YAML: {exc}") from None
    try:
        return json.loads(text) if text.strip() else None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"atom config {path!r} is not valid JSON: {exc}") from None
