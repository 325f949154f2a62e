"""End to end: generate data, train all seven model kinds, serve, query.

The same flow the CLI drives (`repositioner train --model all` then
`repositioner serve`), exercised in process against the HTTP app.
"""

import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from repositioner.data import load_dataset
from repositioner.fixtures import generate_dataset
from repositioner.service import (
    MODEL_KINDS,
    Registry,
    create_app,
    save_artifact,
    train_model,
)

workdir = Path(tempfile.mkdtemp(prefix="repositioner-demo-"))
dataset = load_dataset(generate_dataset(workdir / "data", seed=11)["manifest"])
artifacts = workdir / "artifacts"

for kind in MODEL_KINDS:
    started = time.time()
    version = save_artifact(train_model(kind, dataset, seed=5), artifacts)
    print(f"trained {kind:10s} -> version {version} ({time.time() - started:.1f}s)")

registry = Registry(dataset, artifacts)
client = TestClient(create_app(registry))

print("\nGET /api/models")
for model in client.get("/api/models").json()["models"]:
    print(f"  {model['kind']:10s} {model['center']:16s} "
          f"explanation={model['explanation']}")

print("\nPOST /api/predict (the portal's example disease, top 5)")
body = client.post("/api/predict", json={
    "center": "disease-centric", "model": "diskge",
    "query": "C0342731", "top_n": 5}).json()
print(f"  resolved: {body['entity']['id']} / {body['entity']['name']}")
for row in body["results"]:
    print(f"  #{row['rank']} {row['id']} {row['name']:16s} score {row['score']:+.3f}")

drug = body["results"][0]["id"]
print(f"\nGET /api/drugs/{drug}")
detail = client.get(f"/api/drugs/{drug}").json()
print(f"  ATC codes: {', '.join(detail['atc_codes'])}")
print(f"  indication: {detail['indication']}")
top_layer = "therapeutic-similarity"
neighbours = detail["similar"][top_layer][:3]
print(f"  closest by {top_layer}: "
      + ", ".join(f"{n['id']} ({n['weight']:.2f})" for n in neighbours))

print(f"\nGET /api/explain (why {drug} for C0342731?)")
explain = client.get("/api/explain", params={
    "model": "diskge", "drug": drug, "entity": "C0342731", "max_hops": 3}).json()
print(f"  {len(explain['paths'])} connecting paths over "
      f"{len(explain['nodes'])} nodes / {len(explain['edges'])} edges")

print("\nerror contract samples:")
for request, note in [
    ({"center": "disease-centric", "model": "kgmtl", "query": "C0342731",
      "top_n": 5}, "center mismatch"),
    ({"center": "disease-centric", "model": "diskge", "query": "Duplicate syndrome",
      "top_n": 5}, "ambiguous name"),
    ({"center": "disease-centric", "model": "diskge", "query": "zzz", "top_n": 5},
     "unknown entity"),
]:
    response = client.post("/api/predict", json=request)
    print(f"  {note:16s} -> HTTP {response.status_code} "
          f"code={response.json()['code']}")
