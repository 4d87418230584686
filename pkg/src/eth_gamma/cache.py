"""Binary spectrum cache.

Layout (little endian)::

    b"ETHC" | u32 version | u32 n | n bytes of JSON metadata | payload

The payload is D float64 eigenvalues, optionally followed by the D x D
observable in the eigenbasis as interleaved (real, imag) float64, row-major.
The metadata carries the SHA-256 of the payload.
"""
from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CacheCorrupt, CacheMiss

MAGIC = b"ETHC"
VERSION = 1
ENV_VAR = "ETH_GAMMA_CACHE_DIR"
_HEAD = struct.Struct("<4sII")
_UMASK = os.umask(0)
os.umask(_UMASK)


@dataclass(frozen=True)
class SpectrumCache:
    metadata: dict
    eigenvalues: np.ndarray
    operator: np.ndarray | None


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "eth-gamma"


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False).encode()


def cache_key(key: dict) -> str:
    return hashlib.sha256(canonical_json(key)).hexdigest()[:32]


def cache_path(key: dict, directory=None) -> Path:
    directory = Path(directory) if directory is not None else default_cache_dir()
    return directory / f"{cache_key(key)}.ethc"


def atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.chmod(tmp, 0o666 & ~_UMASK)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode(key: dict, eigenvalues, operator=None) -> bytes:
    e = np.ascontiguousarray(eigenvalues, dtype="<f8")
    payload = e.tobytes()
    if operator is not None:
        a = np.ascontiguousarray(operator, dtype="<c16")
        if a.shape != (len(e), len(e)):
            raise ValueError(f"operator shape {a.shape} does not match D={len(e)}")
        payload += a.tobytes()
    meta = dict(key=key, D=len(e), has_operator=operator is not None,
                content_hash=hashlib.sha256(payload).hexdigest())
    blob = canonical_json(meta)
    return _HEAD.pack(MAGIC, VERSION, len(blob)) + blob + payload


def decode(data: bytes) -> SpectrumCache:
    if len(data) < _HEAD.size:
        raise CacheCorrupt("truncated header")
    magic, version, n = _HEAD.unpack_from(data)
    if magic != MAGIC or version != VERSION:
        raise CacheCorrupt(f"bad magic/version {magic!r}/{version}")
    try:
        meta = json.loads(data[_HEAD.size:_HEAD.size + n])
        d = int(meta["D"])
    except (ValueError, KeyError, TypeError) as exc:
        raise CacheCorrupt(f"unreadable metadata: {exc}") from exc
    payload = data[_HEAD.size + n:]
    if hashlib.sha256(payload).hexdigest() != meta.get("content_hash"):
        raise CacheCorrupt("payload hash mismatch")
    expected = 8 * d + (16 * d * d if meta.get("has_operator") else 0)
    if len(payload) != expected:
        raise CacheCorrupt(f"payload is {len(payload)} bytes, expected {expected}")
    e = np.frombuffer(payload, dtype="<f8", count=d).astype(float)
    a = None
    if meta.get("has_operator"):
        a = np.frombuffer(payload, dtype="<c16", offset=8 * d).reshape(d, d).astype(complex)
    return SpectrumCache(meta, e, a)


def cache_store(key: dict, eigenvalues, operator=None, directory=None) -> Path:
    path = cache_path(key, directory)
    atomic_write(path, encode(key, eigenvalues, operator))
    return path


def cache_load(key: dict, directory=None) -> SpectrumCache:
    path = cache_path(key, directory)
    try:
        data = path.read_bytes()
    except FileNotFoundError as exc:
        raise CacheMiss(str(path)) from exc
    entry = decode(data)
    if entry.metadata.get("key") != json.loads(canonical_json(key)):
        raise CacheCorrupt("metadata does not match the requested key")
    return entry
