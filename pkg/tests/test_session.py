"""Sessions: proof tree management, persistence, and the HTTP API."""

import threading
import time

import pytest
from conftest import fixture_text, fixture_unit, goal_on_branch, prove
from fastapi.testclient import TestClient

from mjverify.calculus import Focus, RuleApplication
from mjverify.pogen import generate_po
from mjverify.session.api import create_app
from mjverify.session.persistence import (
    RestoreDivergence, persist, restore, source_hash,
)
from mjverify.session.tree import ProofTree
from mjverify.strategy import MacroKind, StrategySettings, run_macro


class TestProofTree:
    def test_closed_iff_children_closed(self, listing2):
        tree = prove(listing2, "m")
        assert tree.is_closed()
        for node in tree.nodes.values():
            if node.children:
                assert node.is_closed() == all(c.is_closed() for c in node.children)
            else:
                assert node.is_closed() == node.closing

    def test_open_goals_are_unclosed_leaves(self, listing3):
        tree = prove(listing3, "zero")
        leaves = [n for n in tree.nodes.values() if not n.children]
        open_leaves = [n for n in leaves if not n.closing]
        assert sorted(n.id for n in tree.open_goals()) == \
            sorted(n.id for n in open_leaves)

    def test_prune_removes_descendants(self, listing3):
        tree = prove(listing3, "zero")
        preserve = [n for n in tree.nodes.values()
                    if n.branch_label == "Body Preserves Invariant"][0]
        descendants = set()

        def collect(n):
            for c in n.children:
                descendants.add(c.id)
                collect(c)

        collect(preserve)
        assert descendants
        tree.prune(preserve.id)
        for d in descendants:
            assert d not in tree.nodes
        assert preserve.is_open_goal()

    def test_prune_to_root(self, listing3):
        tree = prove(listing3, "zero")
        tree.prune(0)
        assert len(tree.nodes) == 1
        assert tree.open_goals() == [tree.root]
        assert tree.log == []


class TestPersistence:
    def test_roundtrip_half_finished(self, listing3):
        po = generate_po(listing3, "zero")
        tree = ProofTree(po)
        run_macro(tree, None, StrategySettings(max_rule_apps=40))
        doc = persist(tree)
        tree2, changed = restore(doc, listing3)
        assert not changed
        assert tree2.shape() == tree.shape()
        assert sorted(n.id for n in tree2.open_goals()) == \
            sorted(n.id for n in tree.open_goals())

    def test_roundtrip_swap_proof(self):
        unit = fixture_unit("listing4.mjava")
        tree = prove(unit, "add")
        assert tree.is_closed()
        doc = persist(tree)
        tree2, _ = restore(doc, unit)
        assert tree2.is_closed()
        assert tree2.shape() == tree.shape()

    def test_empty_proof_minimal_document(self, listing3):
        tree = ProofTree(generate_po(listing3, "zero"))
        doc = persist(tree)
        assert doc["steps"] == []
        assert doc["magic"] == "mjverify-proof"

    def test_modified_source_reports_first_divergence(self, listing3):
        tree = prove(listing3, "zero")
        doc = persist(tree)
        from mjverify.frontend import load_unit

        edited = load_unit(
            fixture_text("listing3.mjava").replace("0 <= to", "0 < to"),
            "edited.mjava",
        )
        with pytest.raises(RestoreDivergence) as exc:
            restore(doc, edited)
        assert exc.value.source_changed
        assert exc.value.step >= 0

    def test_version_check(self, listing3):
        tree = prove(listing3, "zero")
        doc = persist(tree)
        doc["version"] = 99
        from mjverify.session.persistence import PersistenceError

        with pytest.raises(PersistenceError, match="version"):
            restore(doc, listing3)


@pytest.fixture
def client():
    return TestClient(create_app())


def make_session(client, fixture="listing3.mjava"):
    r = client.post(
        "/sessions", json={"source": fixture_text(fixture), "path": fixture}
    )
    assert r.status_code == 200
    return r.json()["sessionId"]


def run_auto(client, sid, kind="FullAuto", goal=None):
    body = {"kind": kind}
    if goal is not None:
        body["goalId"] = goal
    r = client.post(f"/sessions/{sid}/macro", json=body)
    assert r.status_code == 200
    jid = r.json()["jobId"]
    for _ in range(600):
        j = client.get(f"/sessions/{sid}/jobs/{jid}").json()
        if j["status"] != "running":
            return j
        time.sleep(0.02)
    raise AssertionError("job did not finish")


class TestApi:
    def test_start_and_fullauto_listing3(self, client):
        sid = make_session(client)
        r = client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        assert r.status_code == 200
        job = run_auto(client, sid)
        assert job["result"]["proofClosed"] is False
        open_goals = job["openGoals"]
        assert len(open_goals) >= 1
        views = [
            client.get(f"/sessions/{sid}/goals/{g}/view").json()
            for g in open_goals
        ]
        bounds = [
            a for v in views for a in v["annotations"]
            if a["kind"] == "Assert" and a["text"] == "0 <= j < a.length"
        ]
        assert bounds

    def test_mutating_responses_include_open_goals(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        job = run_auto(client, sid)
        gid = job["openGoals"][0]
        r = client.post(
            f"/sessions/{sid}/goals/{gid}/command",
            json={"name": "hide", "positional": ["0 <= to"], "options": {}},
        )
        assert r.status_code == 200
        assert "openGoals" in r.json()

    def test_404_unknown(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        assert client.get(f"/sessions/{sid}/goals/999/view").status_code == 404
        assert client.get("/sessions/nosuch/tree").status_code == 404

    def test_409_closed_goal(self, client):
        sid = make_session(client, "listing2.mjava")
        client.post(f"/sessions/{sid}/proofs", json={"method": "m"})
        run_auto(client, sid)
        r = client.post(
            f"/sessions/{sid}/goals/0/command",
            json={"name": "split", "positional": [], "options": {}},
        )
        assert r.status_code == 409

    def test_422_bad_command(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        job = run_auto(client, sid)
        gid = job["openGoals"][0]
        r = client.post(
            f"/sessions/{sid}/goals/{gid}/command",
            json={"name": "instantiate", "positional": ["zzz (("], "options": {}},
        )
        assert r.status_code == 422
        assert r.json()["code"]
        assert r.json()["message"]

    def test_prune_to_root(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        run_auto(client, sid)
        r = client.post(f"/sessions/{sid}/prune", json={"nodeId": 0})
        assert r.json()["openGoals"] == [0]
        tree = client.get(f"/sessions/{sid}/tree").json()
        assert tree["root"]["children"] == []

    def test_save_load_identical(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        run_auto(client, sid)
        before = client.get(f"/sessions/{sid}/tree").json()
        doc = client.post(f"/sessions/{sid}/save").json()
        r = client.post(f"/sessions/{sid}/load", json={"document": doc})
        assert r.status_code == 200
        after = client.get(f"/sessions/{sid}/tree").json()
        assert before == after

    def test_load_against_modified_source(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        run_auto(client, sid)
        doc = client.post(f"/sessions/{sid}/save").json()
        edited = fixture_text("listing3.mjava").replace("0 <= to", "0 < to")
        r2 = client.post("/sessions", json={"source": edited, "path": "e.mjava"})
        sid2 = r2.json()["sessionId"]
        r = client.post(f"/sessions/{sid2}/load", json={"document": doc})
        assert r.status_code == 422
        body = r.json()
        assert body["code"] == "replay_divergence"
        assert body["sourceChanged"] is True
        assert isinstance(body["step"], int)

    def test_goal_view_idempotent(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        job = run_auto(client, sid)
        gid = job["openGoals"][0]
        a = client.get(f"/sessions/{sid}/goals/{gid}/view").content
        b = client.get(f"/sessions/{sid}/goals/{gid}/view").content
        assert a == b

    def test_applicable_rules_endpoint(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        r = client.get(
            f"/sessions/{sid}/goals/0/applicable",
            params={"side": "succ", "index": 0, "path": ""},
        )
        body = r.json()
        assert "FullAuto" in body["macros"]
        assert any(rule["id"] == "cut" for rule in body["rules"])

    def test_record_endpoint(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        run_auto(client, sid)
        r = client.get(f"/sessions/{sid}/record", params={"goalId": 0})
        text = r.json()["script"]
        assert text.startswith("\\by {")
        assert "auto;" in text

    def test_replay_endpoint(self, client):
        sid = make_session(client, "listing2.mjava")
        client.post(f"/sessions/{sid}/proofs", json={"method": "m"})
        r = client.post(f"/sessions/{sid}/replay",
                        json={"script": "auto;", "goalId": 0})
        assert r.status_code == 200
        assert r.json()["status"] == "Closed"
        assert r.json()["closed"] is True

    def test_frontend_diagnostics(self, client):
        r = client.post("/sessions", json={"source": "class C {", "path": "x.mjava"})
        assert r.status_code == 422
        assert r.json()["diagnostics"]

    def test_busy_during_job(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        # start a large macro and immediately try a mutation
        r = client.post(f"/sessions/{sid}/macro",
                        json={"kind": "FullAuto", "maxRuleApps": 100000})
        jid = r.json()["jobId"]
        r2 = client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        # either we were fast enough to hit the busy window or the job is done
        assert r2.status_code in (200, 409)
        if r2.status_code == 409:
            assert r2.json()["code"] == "busy"
        for _ in range(600):
            if client.get(f"/sessions/{sid}/jobs/{jid}").json()["status"] != "running":
                break
            time.sleep(0.02)

    def test_job_cancellation(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/proofs", json={"method": "zero"})
        r = client.post(f"/sessions/{sid}/macro",
                        json={"kind": "FullAuto", "maxRuleApps": 1000000})
        jid = r.json()["jobId"]
        client.post(f"/sessions/{sid}/jobs/{jid}/cancel")
        for _ in range(600):
            j = client.get(f"/sessions/{sid}/jobs/{jid}").json()
            if j["status"] != "running":
                break
            time.sleep(0.02)
        assert j["status"] in ("done", "error")
