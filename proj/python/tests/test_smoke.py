import json

import pytest

import flowledger as fl


def test_version():
    assert fl.__version__.startswith("flowledger ")


def test_valuation():
    assert fl.valuation(3333, 100) == 33
    assert fl.valuation(10000, 12345) == 12345


def test_cid_matches_hashlib():
    import hashlib

    data = b"evidence bundle"
    assert fl.cid_of(data) == "cidv1-12-" + hashlib.sha256(data).hexdigest()
    assert fl.sha256_hex(data) == hashlib.sha256(data).hexdigest()


def test_authenticated_map_and_proofs():
    m = fl.AuthenticatedMap()
    empty_root = m.root_hash()
    m2 = m.put(b"dog", b"puppy").put(b"do", b"verb")
    assert m.root_hash() == empty_root
    assert m2.get(b"dog") == b"puppy"
    assert m2.get(b"cat") is None
    assert len(m2) == 2
    proof = m2.prove(b"dog")
    assert fl.verify_proof(m2.root_hash(), b"dog", b"puppy", proof)
    assert not fl.verify_proof(m2.root_hash(), b"dog", b"kitten", proof)
    with pytest.raises(fl.FlowledgerError):
        m2.put(b"", b"x")


def test_content_store(tmp_path):
    store = fl.ContentStore(tmp_path)
    cid = store.put(b"hello")
    assert cid in store
    assert store.get(cid) == b"hello"
    (tmp_path / cid.split("-")[-1]).write_bytes(b"hellp")
    with pytest.raises(fl.FlowledgerError, match="IntegrityFailure"):
        store.get(cid)


def test_scenario_in_memory():
    doc = fl.generate_dataset("uav", elements=5, seed=1)
    assert doc == fl.generate_dataset("uav", elements=5, seed=1)
    low = fl.scenario(doc, 1)
    high = fl.scenario(doc, 8)
    assert len(low["payments"]) == 1
    assert len(high["payments"]) > len(low["payments"])
    assert all(p["element_count"] == 1 for p in high["payments"])
    assert low["failures"] == [] and high["failures"] == []


def test_aggregate_data_fails_per_element():
    doc = fl.generate_dataset("ugv", elements=6, seed=1)
    res = fl.scenario(doc, 5)
    assert res["payments"] == []
    assert {f["code"] for f in res["failures"]} == {"LoDMismatch"}


def test_matrix_and_verify(tmp_path):
    uav = tmp_path / "uav.json"
    uav.write_text(fl.generate_dataset("uav", elements=6, seed=2) + "\n")
    report = json.loads(fl.run_matrix([uav], tmp_path / "run", [1, 4, 8], "token"))
    assert [r["scenario"] for r in report["rows"]] == [1, 4, 8]
    assert "| uav | 8 |" in fl.render_report(json.dumps(report), "md")
    ok, findings = fl.verify_run(tmp_path / "run")
    assert ok, findings
    state = tmp_path / "run" / "uav" / "scenario-4" / "state.json"
    state.write_text(state.read_text().replace('"nonce":0', '"nonce":7', 1))
    ok, findings = fl.verify_run(tmp_path / "run")
    assert not ok
    assert any("scenario-4" in f for f in findings)
