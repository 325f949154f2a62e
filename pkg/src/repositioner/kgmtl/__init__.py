from .model import (
    KgMtlConfig,
    KgMtlModel,
    SharedUnitResult,
    Subgraph,
    extract_subgraph,
    init_kgmtl_params,
    mol_gcn_readout,
    predict_cpi,
    predict_dti,
    protein_encode,
    rgcn_forward,
    shared_unit_apply,
    train_kg_mtl,
)
