"""Similarity-preserving sparse randomized embeddings (expand, then sparsify).

Typical use::

    from flyembed import (validate_dataset, PreprocessSpec, ProjectionSpec,
                          SparsifierSpec, EvalSpec, PipelineConfig,
                          map_over_realizations)

    X = validate_dataset(raw_d_by_n)
    cfg = PipelineConfig(X, ProjectionSpec(D=2560, density=0.1, seed=1),
                         SparsifierSpec("kwta_binary", k=128),
                         EvalSpec(K=50, num_queries=200, num_realizations=5),
                         PreprocessSpec("center_normalize"))
    print(map_over_realizations(cfg).mean)
"""
from .core import (
    BinarySparse,
    BlockCode,
    DenseActivation,
    DenseDataset,
    Provenance,
    RealSparse,
    RngStream,
    SparseProjectionMatrix,
    matrix_density,
    validate_dataset,
)
from .evaluation import (
    EvalSpec,
    MapReport,
    PipelineConfig,
    average_precision_at_k,
    ground_truth_topk,
    map_at_k,
    map_over_realizations,
)
from .experiment import ExperimentSpec, expand_grid, run_experiment, verify_report
from .ingest import SourceSpec, read_csv_dense, read_fvecs, read_glove_text, read_idx_images, take_subset
from .preprocess import PreprocessSpec, center_normalize, l2_normalize, mean_center, preprocess_original
from .projection import (
    ProjectionSpec,
    project,
    project_dataset,
    sample_binomial,
    sample_hypergeo_cols,
    sample_hypergeo_rows,
)
from .similarity import Measure, angular_dist, euclidean_dist, rank_neighbors
from .sparsifier import (
    SparsifierSpec,
    block_partition,
    block_winners,
    entropy_block,
    entropy_kwta,
    kwta,
    kwta_binary,
    kwta_l2,
    matching_blocks,
    storage_bits_block,
    storage_bits_kwta,
    truncate_blocks,
)

__version__ = "0.1.0"
