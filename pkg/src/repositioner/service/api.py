"""HTTP prediction service.

JSON over five endpoints: model listing, entity listing, prediction,
drug detail, and explanation.  Handlers are read-only over the current
registry snapshot; see docs/api.md for the response schemas.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..data.entities import AmbiguousNameError, NotFoundError, SchemaError
from ..kge import DEFAULT_SIMILARITY_LAYERS, extract_paths, top_similar_drugs
from .artifacts import EXPLANATION_STYLE, MODEL_KINDS
from .registry import CenterMismatchError, NotTrainedError, Registry

__all__ = ["create_app", "TOP_N_CAP"]

TOP_N_CAP = 100


class EntityOut(BaseModel):
    id: str
    name: str
    kind: str


class ModelOut(BaseModel):
    kind: str
    center: str
    trained: bool
    version: str | None
    explanation: str


class ModelsResponse(BaseModel):
    models: list[ModelOut]


class EntityListResponse(BaseModel):
    items: list[EntityOut]
    total: int
    page: int
    page_size: int


class PredictRequest(BaseModel):
    center: str
    model: str
    query: str
    top_n: int = Field(default=20)


class RankedDrugOut(BaseModel):
    rank: int
    id: str
    name: str
    score: float
    detail_url: str


class PredictResponse(BaseModel):
    entity: EntityOut
    model: str
    version: str
    explanation: str
    results: list[RankedDrugOut]


class SimilarDrugOut(BaseModel):
    id: str
    name: str
    weight: float


class DrugDetailResponse(BaseModel):
    id: str
    name: str
    atc_codes: list[str]
    background: str
    indication: str
    structure: str
    similar: dict[str, list[SimilarDrugOut]]


class PathNodeOut(BaseModel):
    id: str
    name: str
    kind: str


class PathEdgeOut(BaseModel):
    head: str
    relation: str
    tail: str


class ExplainResponse(BaseModel):
    shape: str
    drug: str
    entity: str
    nodes: list[PathNodeOut] = []
    edges: list[PathEdgeOut] = []
    paths: list[list[int]] = []
    path_directions: list[list[bool]] = []
    similar: dict[str, list[SimilarDrugOut]] = {}


class ErrorBody(BaseModel):
    code: str
    message: str
    candidates: list[EntityOut] = []


def _error(status: int, code: str, message: str, candidates=()) -> JSONResponse:
    body = ErrorBody(code=code, message=message,
                     candidates=[EntityOut(id=c.id, name=c.name, kind=c.kind)
                                 for c in candidates])
    return JSONResponse(status_code=status, content=body.model_dump())


def create_app(registry: Registry, static_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="drug repositioning service", docs_url=None, redoc_url=None)

    @app.get("/api/models", response_model=ModelsResponse)
    def list_models():
        return ModelsResponse(models=[ModelOut(**m) for m in registry.snapshot.describe()])

    @app.get("/api/entities")
    def list_entities(kind: str, prefix: str = "", page: int = 0,
                      page_size: int = Query(default=50, le=500)):
        if kind not in ("disease", "target"):
            return _error(400, "bad_kind", f"kind must be disease or target, got {kind!r}")
        if page < 0 or page_size < 1:
            return _error(400, "bad_page", "page must be >= 0 and page_size >= 1")
        catalog = registry.snapshot.dataset.catalog
        needle = prefix.casefold()
        matches = [r for r in catalog.entities(kind)
                   if not needle or r.id.casefold().startswith(needle)
                   or r.name.casefold().startswith(needle)]
        matches.sort(key=lambda r: r.id)
        window = matches[page * page_size:(page + 1) * page_size]
        body = EntityListResponse(
            items=[EntityOut(id=r.id, name=r.name, kind=r.kind) for r in window],
            total=len(matches), page=page, page_size=page_size)
        return JSONResponse(content=body.model_dump())

    @app.post("/api/predict")
    def predict(request: PredictRequest):
        snapshot = registry.snapshot
        if request.top_n <= 0:
            return _error(400, "bad_top_n", "top_n must be positive")
        if request.top_n > TOP_N_CAP:
            return _error(400, "bad_top_n", f"top_n is capped at {TOP_N_CAP}")
        if request.center not in ("disease-centric", "target-centric"):
            return _error(400, "bad_center", f"unknown center {request.center!r}")
        try:
            loaded = snapshot.get(request.center, request.model)
        except CenterMismatchError as exc:
            return _error(400, "center_mismatch", str(exc))
        except NotTrainedError as exc:
            return _error(409, "not_trained", str(exc))
        kind = "disease" if request.center == "disease-centric" else "target"
        try:
            entity = snapshot.dataset.catalog.resolve(request.query, kind)
        except AmbiguousNameError as exc:
            return _error(422, "ambiguous_name", str(exc), exc.candidates)
        except NotFoundError as exc:
            return _error(404, "unknown_entity", str(exc))
        try:
            ranking = loaded.rank(entity, request.top_n)
        except NotFoundError as exc:
            return _error(404, "unknown_entity", str(exc))
        body = PredictResponse(
            entity=EntityOut(id=entity.id, name=entity.name, kind=entity.kind),
            model=request.model,
            version=loaded.payload.version,
            explanation=EXPLANATION_STYLE[request.model],
            results=[RankedDrugOut(rank=i + 1, id=ref.id, name=ref.name,
                                   score=score, detail_url=f"/api/drugs/{ref.id}")
                     for i, (ref, score) in enumerate(ranking.entries)])
        return JSONResponse(content=body.model_dump())

    @app.get("/api/drugs/{drug_id}")
    def drug_detail(drug_id: str):
        dataset = registry.snapshot.dataset
        record = dataset.aux.drug_records.get(drug_id)
        if record is None:
            return _error(404, "unknown_drug", f"no drug record for {drug_id!r}")
        ref = dataset.catalog.get("drug", drug_id)
        try:
            similar = top_similar_drugs(dataset.layers, drug_id,
                                        catalog=dataset.catalog)
        except (NotFoundError, SchemaError) as exc:
            return _error(404, "unknown_drug", str(exc))
        body = DrugDetailResponse(
            id=drug_id, name=ref.name if ref else drug_id,
            atc_codes=list(record.atc_codes), background=record.background,
            indication=record.indication, structure=record.structure,
            similar={name: [SimilarDrugOut(id=r.id, name=r.name, weight=w)
                            for r, w in ranking.entries]
                     for name, ranking in similar.items()})
        return JSONResponse(content=body.model_dump())

    @app.get("/api/explain")
    def explain(model: str, drug: str, entity: str, max_hops: int = 3,
                max_paths: int = 10):
        snapshot = registry.snapshot
        dataset = snapshot.dataset
        if model not in MODEL_KINDS:
            return _error(400, "bad_model", f"unknown model kind {model!r}")
        style = EXPLANATION_STYLE[model]
        if style == "paths":
            if dataset.kg is None or not dataset.kg.has_entity(drug) \
                    or not dataset.kg.has_entity(entity):
                return _error(404, "unknown_entity",
                              "drug or entity missing from the knowledge graph")
            sub = extract_paths(dataset.kg, drug, entity, max_hops=max_hops,
                                max_paths=max_paths)
            body = ExplainResponse(
                shape="paths", drug=drug, entity=entity,
                nodes=[PathNodeOut(id=r.id, name=r.name, kind=r.kind) for r in sub.nodes],
                edges=[PathEdgeOut(head=h, relation=r, tail=t) for h, r, t in sub.edges],
                paths=sub.paths, path_directions=sub.path_directions)
            return JSONResponse(content=body.model_dump())
        try:
            similar = top_similar_drugs(dataset.layers, drug, catalog=dataset.catalog,
                                        layer_names=DEFAULT_SIMILARITY_LAYERS)
        except (NotFoundError, SchemaError) as exc:
            return _error(404, "unknown_entity", str(exc))
        body = ExplainResponse(
            shape="similarity", drug=drug, entity=entity,
            similar={name: [SimilarDrugOut(id=r.id, name=r.name, weight=w)
                            for r, w in ranking.entries]
                     for name, ranking in similar.items()})
        return JSONResponse(content=body.model_dump())

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
