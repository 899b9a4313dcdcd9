"""Trajectory clustering evaluation toolkit."""

from ._core import (
    AlgorithmSpec,
    CacheMismatchError,
    ConfigError,
    DataError,
    DistanceMatrix,
    DistanceSpec,
    Linkage,
    ReferenceClusters,
    Setup,
    Trajectory,
    TrajectoryDataset,
    agglomerative,
    ami,
    ari,
    benchmark,
    build_matrix,
    build_reference,
    dbscan,
    dtw,
    edr,
    fmi,
    hausdorff,
    homogeneity_completeness_v,
    kmedoids,
    lcss_distance,
    load_csv,
    make_intersection,
    optics,
    parse_csv,
    pf,
    run_algorithm,
    silhouette,
    spectral,
    sspd,
)

__all__ = [name for name in dir() if not name.startswith("_")]
