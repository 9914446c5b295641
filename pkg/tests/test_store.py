import json
from decimal import Decimal

import pytest

from buchstab.counts import PERMUTATIONS, build_table
from buchstab.omega import QuadratureConfig, build_omega_ledger, eval_omega
from buchstab.omega_k import OmegaKLedger, eval_omega_k
from buchstab.store import (
    ArtifactCache,
    CorruptArtifactError,
    VersionError,
    artifact_from_omega_k_ledger,
    artifact_from_omega_ledger,
    artifact_from_table,
    load_artifact,
    omega_k_ledger_from_artifact,
    omega_ledger_from_artifact,
    save_artifact,
    table_from_artifact,
)


def test_count_table_round_trip(tmp_path):
    table = build_table(PERMUTATIONS, 10)
    path = tmp_path / "table.json"
    save_artifact(artifact_from_table(table), path)
    loaded = table_from_artifact(load_artifact(path))
    for n in range(1, 11):
        assert loaded.row(n) == table.row(n)
        assert loaded.suffix(n, 1) == table.suffix(n, 1)


def test_save_load_save_is_byte_identical(tmp_path):
    table = build_table(PERMUTATIONS, 8)
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    save_artifact(artifact_from_table(table), p1)
    save_artifact(artifact_from_table(table_from_artifact(load_artifact(p1))), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_omega_ledger_round_trip(tmp_path):
    ledger = build_omega_ledger(QuadratureConfig(max_interval=20))
    before = str(eval_omega(ledger, "2.5"))
    path = tmp_path / "omega.json"
    save_artifact(artifact_from_omega_ledger(ledger), path)
    reloaded = omega_ledger_from_artifact(load_artifact(path))
    assert str(eval_omega(reloaded, "2.5")) == before
    assert reloaded.config == ledger.config


def test_omega_k_ledger_round_trip(tmp_path):
    ledger = OmegaKLedger("0.5")
    ledger.ensure(30)
    before = str(eval_omega_k(ledger, "17.25"))
    path = tmp_path / "omk.json"
    save_artifact(artifact_from_omega_k_ledger(ledger), path)
    reloaded = omega_k_ledger_from_artifact(load_artifact(path))
    assert reloaded.built_through == 30
    assert str(eval_omega_k(reloaded, "17.25")) == before


def test_future_version_rejected(tmp_path):
    table = build_table(PERMUTATIONS, 3)
    path = tmp_path / "t.json"
    save_artifact(artifact_from_table(table), path)
    doc = json.loads(path.read_text())
    doc["header"]["format_version"] = 99
    path.write_text(json.dumps(doc))
    with pytest.raises(VersionError):
        load_artifact(path)


def test_corrupt_payload_rejected(tmp_path):
    table = build_table(PERMUTATIONS, 3)
    path = tmp_path / "t.json"
    save_artifact(artifact_from_table(table), path)
    doc = json.loads(path.read_text())
    doc["payload"]["rows"][2][0] = "5"
    path.write_text(json.dumps(doc))
    with pytest.raises(CorruptArtifactError):
        load_artifact(path)


def test_cache_hit_and_miss(tmp_path):
    cache = ArtifactCache(tmp_path / "cache")
    table = build_table(PERMUTATIONS, 6)
    art = artifact_from_table(table)
    assert cache.lookup(art.kind, art.params) is None
    cache.store(art)
    hit = cache.lookup(art.kind, art.params)
    assert hit is not None
    assert table_from_artifact(hit).row(6) == table.row(6)
    assert cache.lookup(art.kind, {"N": 7, "class": "permutations"}) is None


def test_cache_list_and_clear(tmp_path):
    cache = ArtifactCache(tmp_path / "cache")
    cache.store(artifact_from_table(build_table(PERMUTATIONS, 4)))
    cache.store(artifact_from_table(build_table(PERMUTATIONS, 5)))
    assert len(cache.entries()) == 2
    assert cache.clear() == 2
    assert cache.entries() == []
