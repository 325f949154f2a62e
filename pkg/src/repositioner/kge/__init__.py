from .rotate import RotateModel, evaluate_hits, rank_candidates, rotate_distance, train_rotate
from .explain import (
    DEFAULT_SIMILARITY_LAYERS,
    ExplanationSubgraph,
    extract_paths,
    top_similar_drugs,
)
