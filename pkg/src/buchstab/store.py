"""Versioned persistence for count tables and coefficient ledgers.

Artifacts are single JSON files with a header carrying the format
version, the artifact kind, the parameters that fully determine the
payload, and a SHA-256 checksum of the canonical payload bytes.  All
numbers are serialized as decimal strings: integer counts keep every
digit, Decimal coefficients keep all p working digits, so a load/save
round trip is byte-identical and evaluation after reload produces the
same digits as before saving.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Any, Dict, List

from .counts import CountTable, component_class_by_name
from .omega import OmegaBlock, OmegaLedger, QuadratureConfig
from .omega_k import OmegaKBlock, OmegaKLedger

__all__ = [
    "FORMAT_VERSION",
    "StoreError",
    "VersionError",
    "CorruptArtifactError",
    "StoredArtifact",
    "artifact_from_table",
    "artifact_from_omega_ledger",
    "artifact_from_omega_k_ledger",
    "table_from_artifact",
    "omega_ledger_from_artifact",
    "omega_k_ledger_from_artifact",
    "save_artifact",
    "load_artifact",
    "ArtifactCache",
]

FORMAT_VERSION = 1

KIND_COUNT_TABLE = "count-table"
KIND_OMEGA = "omega-ledger"
KIND_OMEGA_K = "omega-k-ledger"


class StoreError(Exception):
    """Persistence failure."""


class VersionError(StoreError):
    """Artifact written by an unsupported format version."""


class CorruptArtifactError(StoreError):
    """Payload checksum does not match the header."""


def _canonical_bytes(obj: Any) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("ascii")


@dataclass(frozen=True)
class StoredArtifact:
    kind: str
    params: Dict[str, Any]
    payload: Dict[str, Any]

    def header(self) -> Dict[str, Any]:
        return {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "params": self.params,
            "payload_sha256": hashlib.sha256(
                _canonical_bytes(self.payload)
            ).hexdigest(),
        }


def artifact_from_table(table: CountTable) -> StoredArtifact:
    rows: List[List[str]] = [
        [str(c) for c in table.row(n)] for n in range(1, table.N + 1)
    ]
    return StoredArtifact(
        KIND_COUNT_TABLE,
        {"N": table.N, "class": table.klass.name},
        {"rows": rows},
    )


def table_from_artifact(art: StoredArtifact) -> CountTable:
    if art.kind != KIND_COUNT_TABLE:
        raise StoreError(f"expected a {KIND_COUNT_TABLE} artifact, got {art.kind}")
    klass = component_class_by_name(art.params["class"])
    N = int(art.params["N"])
    fact = [1] * (N + 1)
    for j in range(1, N + 1):
        fact[j] = fact[j - 1] * j
    suffix_rows: List[List[int]] = [[]] * (N + 1)
    for n, row in enumerate(art.payload["rows"], start=1):
        cells = [int(c) for c in row]
        suf = [0] * (n + 2)
        for k in range(n, 0, -1):
            suf[k] = suf[k + 1] + cells[k - 1]
        suf[0] = suf[1]
        suffix_rows[n] = suf
    return CountTable(klass, N, suffix_rows, fact)


def artifact_from_omega_ledger(ledger: OmegaLedger) -> StoredArtifact:
    cfg = ledger.config
    blocks = [
        {"n": b.n, "coeffs": [str(c) for c in b.coeffs]}
        for b in ledger.blocks[1:]
    ]
    return StoredArtifact(
        KIND_OMEGA,
        {
            "n_star": cfg.max_interval,
            "J": cfg.taylor_degree,
            "p": cfg.precision,
            "grid_log2": cfg.grid_log2,
        },
        {"blocks": blocks},
    )


def omega_ledger_from_artifact(art: StoredArtifact) -> OmegaLedger:
    if art.kind != KIND_OMEGA:
        raise StoreError(f"expected an {KIND_OMEGA} artifact, got {art.kind}")
    cfg = QuadratureConfig(
        grid_log2=int(art.params["grid_log2"]),
        max_interval=int(art.params["n_star"]),
        taylor_degree=int(art.params["J"]),
        precision=int(art.params["p"]),
    )
    blocks = [None]
    for rec in art.payload["blocks"]:
        blocks.append(
            OmegaBlock(int(rec["n"]), tuple(Decimal(c) for c in rec["coeffs"]),
                       cfg.precision)
        )
    return OmegaLedger(blocks, cfg)  # type: ignore[arg-type]


def artifact_from_omega_k_ledger(ledger: OmegaKLedger) -> StoredArtifact:
    blocks = [
        {"n": b.n, "coeffs": [str(c) for c in b.coeffs]}
        for b in ledger._blocks[1:]
    ]
    return StoredArtifact(
        KIND_OMEGA_K,
        {
            "n_star": ledger.built_through,
            "J": ledger.J,
            "p": ledger.p,
            "K": str(ledger.K),
        },
        {"blocks": blocks},
    )


def omega_k_ledger_from_artifact(art: StoredArtifact) -> OmegaKLedger:
    if art.kind != KIND_OMEGA_K:
        raise StoreError(f"expected an {KIND_OMEGA_K} artifact, got {art.kind}")
    ledger = OmegaKLedger(art.params["K"], int(art.params["J"]), int(art.params["p"]))
    blocks = [None, ledger._blocks[1], ledger._blocks[2]]
    for rec in art.payload["blocks"]:
        n = int(rec["n"])
        block = OmegaKBlock(n, tuple(Decimal(c) for c in rec["coeffs"]))
        if n <= 2:
            blocks[n] = block
        else:
            blocks.append(block)
    ledger._blocks = blocks
    return ledger


def save_artifact(art: StoredArtifact, path) -> None:
    """Write the artifact; the byte stream is canonical and reproducible."""
    doc = {"header": art.header(), "payload": art.payload}
    data = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(data, encoding="ascii")
    except OSError as exc:
        raise StoreError(f"cannot write artifact {path}: {exc}") from exc


def load_artifact(path) -> StoredArtifact:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="ascii"))
    except OSError as exc:
        raise StoreError(f"cannot read artifact {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorruptArtifactError(f"artifact {path} is not valid JSON: {exc}") from exc
    try:
        header = doc["header"]
        payload = doc["payload"]
        version = header["format_version"]
        kind = header["kind"]
        params = header["params"]
        checksum = header["payload_sha256"]
    except (KeyError, TypeError) as exc:
        raise CorruptArtifactError(f"artifact {path} misses header fields") from exc
    if version != FORMAT_VERSION:
        raise VersionError(
            f"artifact {path} has format version {version}, "
            f"supported: {FORMAT_VERSION}"
        )
    actual = hashlib.sha256(_canonical_bytes(payload)).hexdigest()
    if actual != checksum:
        raise CorruptArtifactError(
            f"artifact {path} payload checksum mismatch "
            f"(header {checksum[:12]}.., payload {actual[:12]}..)"
        )
    return StoredArtifact(kind, params, payload)


class ArtifactCache:
    """Parameter-keyed artifact cache in a directory.

    Writers take an advisory lock file so concurrent processes do not
    interleave writes; readers need no lock (files appear atomically
    via rename).
    """

    def __init__(self, directory):
        self.directory = Path(directory)

    def _key_path(self, kind: str, params: Dict[str, Any]) -> Path:
        digest = hashlib.sha256(
            _canonical_bytes({"kind": kind, "params": params})
        ).hexdigest()[:24]
        return self.directory / f"{kind}-{digest}.json"

    def lookup(self, kind: str, params: Dict[str, Any]):
        path = self._key_path(kind, params)
        if not path.exists():
            return None
        art = load_artifact(path)
        if art.kind != kind or art.params != params:
            raise CorruptArtifactError(f"cache file {path} does not match its key")
        return art

    def store(self, art: StoredArtifact) -> Path:
        path = self._key_path(art.kind, art.params)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StoreError(f"cannot create cache directory "
                             f"{self.directory}: {exc}") from exc
        lock = self.directory / ".lock"
        deadline = time.monotonic() + 10.0
        while True:
            try:
                fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                os.close(fd)
                break
            except FileExistsError:
                if time.monotonic() > deadline:
                    raise StoreError(f"cache lock {lock} held too long")
                time.sleep(0.05)
            except OSError as exc:
                raise StoreError(f"cannot lock cache {lock}: {exc}") from exc
        try:
            tmp = path.with_suffix(".tmp")
            save_artifact(art, tmp)
            os.replace(tmp, path)
        finally:
            os.unlink(lock)
        return path

    def entries(self) -> List[Path]:
        if not self.directory.is_dir():
            return []
        return sorted(self.directory.glob("*.json"))

    def clear(self) -> int:
        removed = 0
        for path in self.entries():
            path.unlink()
            removed += 1
        return removed
