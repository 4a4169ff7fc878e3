ROTATION = {"generator": "rotation", "params": {"a": "1/3"}}


def test_health(client):
    assert client.get("/api/health").json() == {"status": "ok"}


def test_build_l_shape(client):
    res = client.post("/surfaces/build", json={"family": "l_shape"})
    assert res.status_code == 200
    body = res.json()
    assert body["code"] == 200
    summary = body["data"]["summary"]
    assert summary["valid"]
    assert summary["genus"] == 2
    assert summary["area"] == "3"
    assert [c["angle_over_pi"] for c in summary["vertex_classes"]] == [6]
    assert len(body["data"]["surface"]["polygons"]) == 3
    assert body["provenance"]["command"] == "build"


def test_build_rejects_unknown_family_and_bad_lambda(client):
    assert client.post("/surfaces/build", json={"family": "nope"}).status_code == 400
    res = client.post("/surfaces/build", json={"family": "staircase", "params": {"lambda": "3/2"}})
    assert res.status_code == 400


def test_staircase_window_summary(client):
    res = client.post("/surfaces/build", json={"family": "staircase", "params": {"lambda": "3"}, "window": 8})
    summary = res.json()["data"]["summary"]
    assert summary["valid"]
    assert not summary["finite"]
    assert summary["polygons"] == 8
    assert summary["area"] is None


def test_trace_on_torus(client):
    res = client.post(
        "/surfaces/trace", json={"family": "torus", "direction": ["2", "1"], "point": ["1/3", "1/7"]}
    )
    data = res.json()["data"]
    assert data["status"] == "Closed"
    assert data["length2"] == "5"


def test_isomorphic_surfaces(client):
    l_json = client.post("/surfaces/build", json={"family": "l_shape"}).json()["data"]["surface"]
    res = client.post(
        "/surfaces/isomorphic", json={"first": {"surface": l_json}, "second": {"family": "l_shape"}}
    )
    assert res.json()["data"] is True


def test_iet_eval_and_singularity(client):
    res = client.post("/iet/eval", json={"spec": ROTATION, "x": "1/2"})
    assert res.json()["data"] == {"x": "1/2", "value": "5/6", "label": "A"}
    assert client.post("/iet/eval", json={"spec": ROTATION, "x": "2/3"}).status_code == 422
    assert client.post("/iet/eval", json={"spec": ROTATION}).status_code == 400


def test_iet_connections(client):
    res = client.post("/iet/connections", json={"spec": ROTATION, "depth": 5})
    assert res.json()["data"]["connections"] == [{"m": 1, "x": "1/3", "y": "2/3"}]


def test_rosen_expand_and_gap(client):
    res = client.post("/rosen/expand", json={"x": "2/5", "lambda": "5/2"})
    data = res.json()["data"]
    assert data["digits"] == [[1, 1]]
    assert data["status"] == "Terminated"
    gap = client.post("/rosen/gap", json={"lambda": "5/2"}).json()["data"]
    assert gap["gap"] == ["1/2", "2"]
    assert gap["funnel_class"] == "Hyperbolic"
    assert client.post("/rosen/gap", json={"lambda": "2"}).status_code == 400


def test_htv_assemble_and_baker(client):
    res = client.post("/htv/assemble", json={"family": "Z", "lambda": "5/2", "window": 6})
    moduli = res.json()["data"]["report"]["moduli"]
    assert moduli["all_equal"]
    assert moduli["target"] == "2/5"
    baker = client.post("/htv/baker", json={"q": 2}).json()["data"]
    assert baker["common_modulus"] == "1/3√2"
    assert client.post("/htv/baker", json={"q": 1}).status_code == 422


def test_runs_ledger(client):
    client.post("/rosen/expand", json={"x": "2/5", "lambda": "5/2"})
    client.post("/htv/baker", json={"q": 2})
    runs = client.get("/runs").json()["data"]
    assert [r["command"] for r in runs] == ["rosen", "htv"]
    assert len(client.get("/runs", params={"command": "rosen"}).json()["data"]) == 1

    first = client.get(f"/runs/{runs[0]['id']}").json()["data"]
    assert first["params"]["tool"] == "flatland"
    assert first["summary"]["digits"] == [[1, 1]]

    assert client.delete(f"/runs/{runs[0]['id']}").json()["data"] is True
    missing = client.get(f"/runs/{runs[0]['id']}").json()
    assert missing["code"] == 404
    assert missing["data"] is None
    assert client.delete(f"/runs/{runs[0]['id']}").json()["data"] is False
