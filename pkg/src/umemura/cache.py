"""On-disk cache of Hankel entries and Umemura polynomials (JSON, checksummed)."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile

from .core import SYMBOLIC, UmemuraCache, parse_r_mode
from .errors import CorruptCache, ParseError, VersionMismatch
from .exact import poly_from_doc, poly_to_doc

CACHE_VERSION = 1


def _r_tag(r_mode) -> str:
    r_mode = parse_r_mode(r_mode)
    return "sym" if r_mode == SYMBOLIC else f"{r_mode.numerator}/{r_mode.denominator}"


def _digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def cache_to_doc(cache: UmemuraCache) -> dict:
    entries = [poly_to_doc(a) for a in cache.entries]
    sigmas = [{"n": n, "method": cache.method[n], "poly": poly_to_doc(cache.sigma[n])}
              for n in sorted(cache.sigma)]
    return {
        "version": CACHE_VERSION,
        "r": _r_tag(cache.r_mode),
        "entries": entries,
        "sigmas": sigmas,
        "checksums": {"entries": _digest(entries), "sigmas": _digest(sigmas)},
    }


def cache_from_doc(doc: dict) -> UmemuraCache:
    if not isinstance(doc, dict) or "version" not in doc:
        raise CorruptCache("missing version field")
    if doc["version"] != CACHE_VERSION:
        raise VersionMismatch(f"cache version {doc['version']!r}, expected {CACHE_VERSION}")
    try:
        entries, sigmas, sums = doc["entries"], doc["sigmas"], doc["checksums"]
        if sums.get("entries") != _digest(entries) or sums.get("sigmas") != _digest(sigmas):
            raise CorruptCache("checksum mismatch")
        r_tag = doc.get("r", "sym")
        cache = UmemuraCache(r_mode=parse_r_mode(r_tag))
        cache.extend_entries([poly_from_doc(e) for e in entries])
        for item in sigmas:
            cache.put(int(item["n"]), poly_from_doc(item["poly"]), item["method"])
    except (KeyError, TypeError, AttributeError, ValueError, ParseError) as exc:
        if isinstance(exc, CorruptCache):
            raise
        raise CorruptCache(f"malformed cache: {exc}") from None
    return cache


def cache_load(path: str) -> UmemuraCache:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptCache(f"{path}: {exc}") from None
    return cache_from_doc(doc)


def cache_store(cache: UmemuraCache, path: str) -> UmemuraCache:
    """Write ``cache``, merging with what is already on disk.

    Existing values must agree with the new ones (append-only); a conflict
    raises ValueError and leaves the file untouched.
    """
    merged = cache
    if os.path.exists(path):
        old = cache_load(path)
        if _r_tag(old.r_mode) != _r_tag(cache.r_mode):
            raise ValueError(f"{path}: cache holds r={_r_tag(old.r_mode)}, not {_r_tag(cache.r_mode)}")
        merged = UmemuraCache(r_mode=old.r_mode)
        merged.extend_entries(old.entries)
        merged.extend_entries(cache.entries)
        for src in (old, cache):
            for n in sorted(src.sigma):
                merged.put(n, src.sigma[n], src.method[n])
    text = json.dumps(cache_to_doc(merged), separators=(",", ":"))
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".umemura-cache-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return merged
