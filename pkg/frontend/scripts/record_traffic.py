"""Record fixture-service responses for the frontend test double.

Trains the synthetic registry, replays the documented requests through
the real HTTP app, and dumps the bodies (plus the entity table the mock
needs for autocomplete filtering) to test/fixtures.json.
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from repositioner.data import load_dataset
from repositioner.fixtures import generate_dataset
from repositioner.service import MODEL_KINDS, Registry, create_app, save_artifact, train_model

HERE = Path(__file__).resolve().parent


def main():
    workdir = Path(tempfile.mkdtemp(prefix="record-traffic-"))
    dataset = load_dataset(generate_dataset(workdir / "data", seed=11)["manifest"])
    artifacts = workdir / "artifacts"
    for kind in MODEL_KINDS:
        save_artifact(train_model(kind, dataset, seed=5), artifacts)
    client = TestClient(create_app(Registry(dataset, artifacts)))

    sparse_dir = workdir / "sparse"
    save_artifact(train_model("diskge", dataset, seed=5,
                              hyper={"epochs": 3, "dim": 4}), sparse_dir)
    sparse = TestClient(create_app(Registry(dataset, sparse_dir)))

    captured = {"entities": {}, "responses": []}
    for kind in ("disease", "target"):
        body = client.get("/api/entities",
                          params={"kind": kind, "page_size": 500}).json()
        captured["entities"][kind] = body["items"]

    def record(tag, method, url, payload=None, use=client):
        response = use.post(url, json=payload) if method == "POST" else use.get(url)
        captured["responses"].append({
            "tag": tag, "method": method, "url": url, "payload": payload,
            "status": response.status_code, "body": response.json(),
        })
        return response.json()

    record("models", "GET", "/api/models")
    predict = record("predict-disease", "POST", "/api/predict",
                     {"center": "disease-centric", "model": "diskge",
                      "query": "C0342731", "top_n": 20})
    top_drug = predict["results"][0]["id"]
    record("predict-target", "POST", "/api/predict",
           {"center": "target-centric", "model": "tarkge",
            "query": "9971", "top_n": 20})
    sim_predict = record("predict-similarity-model", "POST", "/api/predict",
                         {"center": "disease-centric", "model": "deepdr",
                          "query": "C0342731", "top_n": 10})
    sim_drug = sim_predict["results"][0]["id"]
    record("predict-ambiguous", "POST", "/api/predict",
           {"center": "disease-centric", "model": "diskge",
            "query": "Duplicate syndrome", "top_n": 20})
    record("predict-disambiguated", "POST", "/api/predict",
           {"center": "disease-centric", "model": "diskge",
            "query": "C9000001", "top_n": 20})
    record("predict-unknown", "POST", "/api/predict",
           {"center": "disease-centric", "model": "diskge",
            "query": "zzz-unknown", "top_n": 20})
    record("predict-mismatch", "POST", "/api/predict",
           {"center": "disease-centric", "model": "kgmtl",
            "query": "C0342731", "top_n": 20})
    record("predict-bad-topn", "POST", "/api/predict",
           {"center": "disease-centric", "model": "diskge",
            "query": "C0342731", "top_n": 0})
    record("predict-not-trained", "POST", "/api/predict",
           {"center": "disease-centric", "model": "deepdr",
            "query": "C0342731", "top_n": 20}, use=sparse)
    record("drug-detail", "GET", f"/api/drugs/{top_drug}")
    record("explain-paths", "GET",
           f"/api/explain?model=diskge&drug={top_drug}&entity=C0342731&max_hops=3")
    record("explain-similarity", "GET",
           f"/api/explain?model=deepdr&drug={sim_drug}&entity=C0342731&max_hops=3")
    record("explain-empty", "GET",
           "/api/explain?model=diskge&drug=DRG000&entity=SE000&max_hops=1")

    out = HERE.parent / "test" / "fixtures.json"
    out.parent.mkdir(exist_ok=True)
    out.write_text(json.dumps(captured, indent=1, sort_keys=True), encoding="utf-8")
    print(f"wrote {out} ({out.stat().st_size} bytes, "
          f"{len(captured['responses'])} responses)")


if __name__ == "__main__":
    main()
