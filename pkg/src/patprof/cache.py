"""On-disk cache of a profiled dataset's hierarchy and partition assignment."""

from __future__ import annotations

import fcntl
import hashlib
import json
import os
from contextlib import contextmanager
from typing import Optional

from .errors import StaleCacheError
from .library import AtomUniverse
from .pattern import BOTTOM, CLASS, CONST, Pattern

CACHE_VERSION = 1


def dataset_hash(strings) -> str:
    blob = json.dumps(list(strings), ensure_ascii=False).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def encode_pattern(p) -> Optional[list]:
    if p.is_bottom:
        return None
    out = []
    for a in p.atoms:
        if a.kind == CONST and a.literal is not None and a.name.startswith('"'):
            out.append({"const": a.literal})
        else:
            out.append({"atom": a.name, "width": a.width})
    return out


def decode_pattern(doc, universe: AtomUniverse):
    if doc is None:
        return BOTTOM
    atoms = []
    for d in doc:
        if "const" in d:
            atoms.append(universe.const(d["const"]))
            continue
        base = universe[d["atom"]]
        w = int(d.get("width", 0))
        atoms.append(base.with_width(w) if w and base.kind == CLASS else base)
    return Pattern(atoms)


@contextmanager
def _locked(path: str, mode: str):
    fh = open(path, mode, encoding="utf-8")
    try:
        fcntl.flock(fh, fcntl.LOCK_EX if "w" in mode or "+" in mode else fcntl.LOCK_SH)
        yield fh
    finally:
        fcntl.flock(fh, fcntl.LOCK_UN)
        fh.close()


def load(path: str, data_hash: str, fingerprint: str) -> Optional[dict]:
    """The cache document at ``path``, None if absent; stale caches raise."""
    if not os.path.exists(path):
        return None
    try:
        with _locked(path, "r") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise StaleCacheError(f"cache {path} is unreadable ({exc}); delete it and re-run profile") from None
    if doc.get("version") != CACHE_VERSION:
        raise StaleCacheError(f"cache {path} has an unsupported version; re-run profile")
    if doc.get("dataset_hash") != data_hash:
        raise StaleCacheError(f"cache {path} was built for a different dataset; re-run profile")
    if doc.get("universe_fingerprint") != fingerprint:
        raise StaleCacheError(f"cache {path} was built with different atoms; re-run profile")
    return doc


def save(path: str, doc: dict) -> None:
    doc = dict(doc, version=CACHE_VERSION)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(path, "a", encoding="utf-8") as guard:
        fcntl.flock(guard, fcntl.LOCK_EX)
        try:
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, ensure_ascii=False, sort_keys=True)
            os.replace(tmp, path)
        finally:
            fcntl.flock(guard, fcntl.LOCK_UN)
