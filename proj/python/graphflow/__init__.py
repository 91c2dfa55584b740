"""Graph diffusion flows, ODE solvers and a topology-robustness laboratory."""

from ._core import (
    AttentionParams,
    Graph,
    GraphflowError,
    attention_weights,
    build_graph,
    degree_split,
    divergence,
    expm,
    flip_edges,
    flow_matrix,
    generate_sbm,
    gradient,
    gradient_norm,
    inject_nodes,
    integrate,
    laplacian_apply,
    linear_exact,
    lyapunov_check,
    make_attention_params,
    normalized_laplacian,
    p_laplacian_apply,
    perturb_adjacency,
    perturb_features,
    predict,
    read_csv_matrix,
    read_edge_list,
    run_experiment,
    semigroup_gap,
    spectral_normalize,
    stability_slope,
    train_readout,
    write_edge_list,
)

__all__ = [
    "AttentionParams",
    "Graph",
    "GraphflowError",
    "attention_weights",
    "build_graph",
    "degree_split",
    "divergence",
    "expm",
    "flip_edges",
    "flow_matrix",
    "generate_sbm",
    "gradient",
    "gradient_norm",
    "inject_nodes",
    "integrate",
    "laplacian_apply",
    "linear_exact",
    "lyapunov_check",
    "make_attention_params",
    "normalized_laplacian",
    "p_laplacian_apply",
    "perturb_adjacency",
    "perturb_features",
    "predict",
    "read_csv_matrix",
    "read_edge_list",
    "run_experiment",
    "semigroup_gap",
    "spectral_normalize",
    "stability_slope",
    "train_readout",
    "write_edge_list",
]

__version__ = "0.1.0"
