from .entities import (
    KINDS,
    AmbiguousNameError,
    DataError,
    EntityCatalog,
    EntityRef,
    KnowledgeGraph,
    NotFoundError,
    SchemaError,
    Triple,
    canonical_kind,
)
from .tables import (
    AMINO_ALPHABET,
    ATOM_FEATURE_DIM,
    AssociationMatrix,
    DrugRecord,
    FeatureTable,
    LayeredNetworkSet,
    MoleculeGraph,
    NetworkLayer,
    ProteinSequence,
)
from .loaders import (
    AuxTables,
    Dataset,
    load_auxiliary_tables,
    load_dataset,
    load_drug_records,
    load_feature_table,
    load_knowledge_graph,
    load_manifest,
    load_molecules,
    load_network_layers,
    load_pairs,
    load_proteins,
    read_rows,
    write_drug_records,
    write_edges,
    write_entities,
    write_feature_table,
    write_kg_metadata,
    write_molecules,
    write_pairs,
    write_proteins,
    write_triples,
)
