"""Fractional Laplacian stiffness matrices and hierarchical compression of their inverses."""

from ._fraclap import (
    BlockPartition,
    ClusterTree,
    ExponentialFit,
    HMatrix,
    InputError,
    Mesh,
    NormEstimate,
    NumericalError,
    StudyRecord,
    assemble,
    block_partition,
    block_singular_values,
    cluster_tree,
    compress,
    domain_mesh,
    entry_oracle,
    fit_by_s,
    fit_exponential,
    interval_mesh,
    load_mesh,
    load_study_csv,
    load_vector,
    lshape_mesh,
    lu_invert,
    mesh_from_json,
    norm2,
    normalization_constant,
    refine,
    run_study,
    save_mesh,
    save_study_csv,
    svd,
    truncated_svd,
    unit_square_mesh,
)

__all__ = [name for name in dir() if not name.startswith("_")]
