import json
from datetime import timedelta
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from postalias.config import ServiceConfig
from postalias.service import create_app

from conftest import T0

JOHN = {
    "name": "John Smith",
    "line1": "123 Main Street",
    "line2": "Unit 456",
    "city": "Any Town",
    "state": "NY",
    "zip": "12345",
}


class FakeClock:
    def __init__(self, start=T0):
        self.now = start

    def __call__(self):
        return self.now

    def advance(self, **kwargs):
        self.now = self.now + timedelta(**kwargs)


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def app_config(tmp_path):
    return ServiceConfig(data_dir=tmp_path / "data", seed=21)


@pytest.fixture
def client(app_config, clock):
    with TestClient(create_app(app_config, clock=clock)) as tc:
        yield tc


def _issue(client, **overrides):
    body = {"true_address": JOHN, "merchant_domain": "shop.example"}
    body.update(overrides)
    response = client.post("/aliases", json=body)
    assert response.status_code == 201, response.text
    return response.json()


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["aliases"] == 0


def test_issue_returns_record(client):
    rec = _issue(client)
    assert rec["status"] == "Issued"
    assert len(rec["alias"]) == 20
    assert rec["true_address"]["line1"] == "123 Main Street"
    assert rec["alias_address"]["zip"] == "12345"
    assert rec["alias_address"]["city"] == "Any Town"
    assert rec["merchant_domain"] == "shop.example"
    assert rec["validity_days"] == 30
    assert rec["issued_at"].startswith("2025-06-01")


def test_issue_batch(client):
    body = client.post(
        "/aliases", json={"true_address": JOHN, "count": 5}
    ).json()
    assert len(body["aliases"]) == 5
    assert len({r["alias"] for r in body["aliases"]}) == 5


def test_issue_subscription(client):
    rec = _issue(client, subscription=True)
    assert rec["subscription"] is True
    assert rec["validity_days"] is None


def test_issue_rejects_bad_address(client):
    bad = dict(JOHN, zip="1234")
    response = client.post("/aliases", json={"true_address": bad})
    assert response.status_code == 422
    assert "ZIP" in response.json()["detail"]


def test_get_alias_and_404(client):
    rec = _issue(client)
    fetched = client.get(f"/aliases/{rec['alias']}").json()
    assert fetched == rec
    assert client.get("/aliases/" + "9" * 20).status_code == 404
    assert client.get("/aliases/123").status_code == 422


def test_list_aliases(client):
    first = _issue(client)
    second = _issue(client)
    listed = client.get("/aliases").json()["aliases"]
    assert [r["alias"] for r in listed] == sorted(
        [first["alias"], second["alias"]],
        key=lambda d: [r["alias"] for r in listed].index(d),
    )
    assert len(listed) == 2


def test_short_code_query(client):
    rec = _issue(client)
    found = client.get("/aliases", params={"short_code": rec["short_code"]}).json()
    assert found["alias"] == rec["alias"]
    assert client.get("/aliases", params={"short_code": "XXXX"}).status_code == 404


def test_revoke(client):
    rec = _issue(client)
    revoked = client.post(f"/aliases/{rec['alias']}/revoke").json()
    assert revoked["status"] == "Revoked"
    again = client.post(f"/aliases/{rec['alias']}/revoke")
    assert again.status_code == 409
    assert client.post("/aliases/" + "9" * 20 + "/revoke").status_code == 404


def test_change_validity(client, clock):
    rec = _issue(client)
    updated = client.post(
        f"/aliases/{rec['alias']}/validity", json={"validity_days": 90}
    ).json()
    assert updated["validity_days"] == 90
    client.post(f"/aliases/{rec['alias']}/revoke")
    conflict = client.post(f"/aliases/{rec['alias']}/validity", json={"validity_days": 5})
    assert conflict.status_code == 409
    bad = client.post(f"/aliases/{rec['alias']}/validity", json={"validity_days": 0})
    assert bad.status_code == 422


def test_validate_endpoint(client):
    rec = _issue(client)
    valid = client.post("/validate", json={"address": rec["alias_address"]}).json()
    assert valid == {"result": "Valid", "decision": "Proceed"}

    official = client.post("/validate", json={"address": JOHN, "mode": "Soft"}).json()
    assert official["result"] == "Valid"

    stranger = dict(JOHN, line1="9999 Nowhere Road")
    hard = client.post("/validate", json={"address": stranger, "mode": "Hard"}).json()
    assert hard == {"result": "Invalid", "decision": "Blocked"}
    soft = client.post("/validate", json={"address": stranger, "mode": "Soft"}).json()
    assert soft == {"result": "Invalid", "decision": "ProceedWithWarning"}

    unknown_mode = client.post("/validate", json={"address": JOHN, "mode": "Loud"})
    assert unknown_mode.status_code == 422


def test_expired_alias_fails_validation_over_time(client, clock):
    rec = _issue(client, validity_days=10)
    intake = client.post(
        "/parcels/intake",
        json={"sender": "shop.example", "address": rec["alias_address"], "parcel_id": "P1"},
    )
    assert intake.status_code == 201

    clock.advance(days=9)
    live = client.post("/validate", json={"address": rec["alias_address"]}).json()
    assert live["result"] == "Valid"

    clock.advance(days=2)
    dead = client.post("/validate", json={"address": rec["alias_address"]}).json()
    assert dead["result"] == "Invalid"


def test_intake_relabels_and_tracking_views(client):
    rec = _issue(client)
    parcel = client.post(
        "/parcels/intake",
        json={"sender": "shop.example", "address": rec["alias_address"], "parcel_id": "P1"},
    ).json()
    assert parcel["state"] == "AtCarrier"
    assert parcel["label"]["line1"] == "123 Main Street"
    assert parcel["relabel_history"][-1]["short_code"] == rec["short_code"]

    client.post("/parcels/P1/dispatch")
    client.post("/parcels/P1/deliver")

    merchant = client.get("/parcels/P1/tracking", params={"viewer": "Merchant"}).json()
    assert merchant["destination"] == rec["alias_address"]
    blob = json.dumps(merchant)
    assert "Main Street" not in blob

    customer = client.get("/parcels/P1/tracking", params={"viewer": "Customer"}).json()
    assert customer["short_code"] == rec["short_code"]
    assert any(e["kind"] == "Delivered" for e in customer["events"])

    assert client.get("/parcels/P1/tracking", params={"viewer": "Nosy"}).status_code == 422
    assert client.get("/parcels/NOPE/tracking").status_code == 404


def test_intake_autogenerates_parcel_id(client):
    rec = _issue(client)
    parcel = client.post(
        "/parcels/intake", json={"sender": "s", "address": rec["alias_address"]}
    ).json()
    assert parcel["parcel_id"].startswith("P-")
    dupe = client.post(
        "/parcels/intake",
        json={"sender": "s", "address": JOHN, "parcel_id": parcel["parcel_id"]},
    )
    assert dupe.status_code == 409


def test_intake_refusal_attribution_and_return(client):
    rec = _issue(client)
    client.post(f"/aliases/{rec['alias']}/revoke")
    parcel = client.post(
        "/parcels/intake",
        json={"sender": "ads.example", "address": rec["alias_address"], "parcel_id": "AD1"},
    ).json()
    assert parcel["state"] == "Refused"

    per_alias = client.get(f"/aliases/{rec['alias']}/attribution").json()
    assert per_alias["merchant_domain"] == "shop.example"
    assert per_alias["attributions"][0]["reason"] == "Revoked"
    assert per_alias["attributions"][0]["sender"] == "ads.example"

    everything = client.get("/attributions").json()["attributions"]
    assert len(everything) == 1

    returned = client.post("/parcels/AD1/return").json()
    assert returned["state"] == "ReturnedToMerchant"
    assert returned["label"] == rec["alias_address"]


def test_intake_checksum_error(client):
    rec = _issue(client)
    addr = dict(rec["alias_address"])
    digit = int(addr["line2"][-1])
    addr["line2"] = addr["line2"][:-1] + str((digit + 1) % 10)
    response = client.post("/parcels/intake", json={"sender": "s", "address": addr})
    assert response.status_code == 409
    assert "check digit" in response.json()["detail"]
    # nothing half-created
    assert client.get("/health").json()["parcels"] == 0


def test_parcel_step_conflicts(client):
    rec = _issue(client)
    client.post(
        "/parcels/intake",
        json={"sender": "s", "address": rec["alias_address"], "parcel_id": "P1"},
    )
    assert client.post("/parcels/P1/deliver").status_code == 409  # not dispatched yet
    assert client.post("/parcels/P1/return").status_code == 409  # nothing wrong with it
    client.post("/parcels/P1/dispatch")
    fail = client.post("/parcels/P1/fail")
    assert fail.json()["undeliverable"] is True
    returned = client.post("/parcels/P1/return").json()
    assert returned["label"] == rec["alias_address"]


def test_state_survives_restart(app_config, clock):
    with TestClient(create_app(app_config, clock=clock)) as tc:
        rec = _issue(tc)
        tc.post(
            "/parcels/intake",
            json={"sender": "s", "address": rec["alias_address"], "parcel_id": "P1"},
        )

    # a second app over the same data dir sees everything
    with TestClient(create_app(app_config, clock=clock)) as tc:
        health = tc.get("/health").json()
        assert health == {"status": "ok", "aliases": 1, "parcels": 1}
        fetched = tc.get(f"/aliases/{rec['alias']}").json()
        assert fetched["status"] == "Active"  # intake marked first use
        assert fetched["short_code"] == rec["short_code"]
        parcel = tc.get("/parcels/P1").json()
        assert parcel["label"]["line1"] == "123 Main Street"

    assert (Path(app_config.data_dir) / "events.jsonl").exists()
    assert (Path(app_config.data_dir) / "parcels.json").exists()
