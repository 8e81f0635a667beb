"""Persistent L(1/2, chi) cache.

One JSON object per line. New entries are buffered in memory and written by
:meth:`LValueCache.checkpoint`, which rewrites the file through a temporary
sibling and ``os.replace`` so readers never see a half-written file. A
malformed line truncates the cache at that point (with a warning) unless the
cache is opened strictly.
"""

from __future__ import annotations

import json
import math
import os
import threading
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

__all__ = ["CacheEntry", "CacheCorruptError", "LValueCache", "DIRECT_METHOD", "DIRECT_HASH"]

DIRECT_METHOD = "direct"
# the direct route has no tunables beyond the Euler-Maclaurin set-up
DIRECT_HASH = "hurwitz-em-n9-b12"

_FIELDS = ("q", "index", "parity", "conductor", "method", "re", "im", "config_hash", "version")


class CacheCorruptError(ValueError):
    pass


@dataclass(frozen=True)
class CacheEntry:
    q: int
    index: int
    parity: str
    conductor: int
    method: str
    re: float
    im: float
    config_hash: str
    version: str

    @property
    def key(self) -> tuple:
        return (self.q, self.index, self.method, self.config_hash)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> CacheEntry:
        obj = json.loads(line)
        if not isinstance(obj, dict) or set(obj) != set(_FIELDS):
            raise ValueError("wrong field set")
        e = cls(
            q=int(obj["q"]),
            index=int(obj["index"]),
            parity=str(obj["parity"]),
            conductor=int(obj["conductor"]),
            method=str(obj["method"]),
            re=float(obj["re"]),
            im=float(obj["im"]),
            config_hash=str(obj["config_hash"]),
            version=str(obj["version"]),
        )
        if e.parity not in ("even", "odd") or not (math.isfinite(e.re) and math.isfinite(e.im)):
            raise ValueError("bad parity or non-finite value")
        return e


class LValueCache:
    """Keyed by ``(q, index, method, config_hash)``.

    ``hits``, ``misses`` and ``stores`` count per-modulus operations so a
    caller can check that a warm cache skipped the computation.
    """

    def __init__(
        self,
        path: str | os.PathLike | None,
        version: str = "",
        method: str = DIRECT_METHOD,
        config_hash: str = DIRECT_HASH,
        strict: bool = False,
    ):
        self.path = Path(path) if path is not None else None
        self.version = version
        self.method = method
        self.config_hash = config_hash
        self.strict = strict
        self.corrupt_line: int | None = None
        self.hits = self.misses = self.stores = 0
        self._entries: dict[tuple, CacheEntry] = {}
        self._pending: list[CacheEntry] = []
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self._load()

    def __len__(self) -> int:
        return len(self._entries)

    def _load(self) -> None:
        good_bytes = 0
        with open(self.path, "rb") as fh:
            for lineno, raw in enumerate(fh, 1):
                try:
                    if not raw.endswith(b"\n"):
                        raise ValueError("unterminated line")
                    e = CacheEntry.from_json(raw.decode("utf-8"))
                except (ValueError, UnicodeDecodeError) as exc:
                    self.corrupt_line = lineno
                    msg = f"{self.path}: malformed cache line {lineno} ({exc})"
                    if self.strict:
                        raise CacheCorruptError(msg) from exc
                    warnings.warn(msg + "; truncating", RuntimeWarning, stacklevel=3)
                    break
                self._entries[e.key] = e
                good_bytes += len(raw)
        if self.corrupt_line is not None:
            with open(self.path, "r+b") as fh:
                fh.truncate(good_bytes)

    def get(self, q: int, index: int) -> CacheEntry | None:
        return self._entries.get((q, index, self.method, self.config_hash))

    def lookup_modulus(self, q: int, indices) -> np.ndarray | None:
        """Cached values for every index in order, or None if any is missing."""
        out = np.empty(len(indices), dtype=np.complex128)
        with self._lock:
            for k, i in enumerate(indices):
                e = self.get(q, int(i))
                if e is None:
                    self.misses += 1
                    return None
                out[k] = e.value
            self.hits += 1
        return out

    def store_modulus(self, q, cs, ev_idx, od_idx, L_even, L_odd) -> None:
        cond = cs.conductors
        new = []
        for parity, idx, vals in (("even", ev_idx, L_even), ("odd", od_idx, L_odd)):
            for i, v in zip(idx, vals):
                v = complex(v)
                new.append(
                    CacheEntry(
                        int(q), int(i), parity, int(cond[i]), self.method,
                        v.real, v.imag, self.config_hash, self.version,
                    )
                )
        with self._lock:
            for e in new:
                if e.key not in self._entries:
                    self._entries[e.key] = e
                    self._pending.append(e)
            self.stores += 1

    def checkpoint(self) -> None:
        """Write buffered entries; the file is replaced atomically."""
        if self.path is None:
            self._pending.clear()
            return
        with self._lock:
            if not self._pending and self.path.exists():
                return
            tmp = self.path.with_name(self.path.name + ".tmp")
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(tmp, "wb") as out:
                if self.path.exists():
                    with open(self.path, "rb") as src:
                        out.write(src.read())
                for e in self._pending:
                    out.write((e.to_json() + "\n").encode("utf-8"))
                out.flush()
                os.fsync(out.fileno())
            os.replace(tmp, self.path)
            self._pending.clear()
