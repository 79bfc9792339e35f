"""Reconstruction attacks on multi-party private summation, and defences.

Exact linear algebra over the trace of observed sums recovers individual
private values; graph girth bounds which collusions can succeed.  The
subpackages cover the attack algebra, graph machinery, knowledge
accumulation, the experiment grids, the girth defence, and distributed
averaging cost studies.
"""

from .attacks import (
    BipartiteParams,
    ExperimentRecord,
    NoValidGraphError,
    admissible_edge_range,
    marginal_distribution,
    reconstructed_count,
    rounds_until_success,
    run_fraction_grid,
    run_rounds_grid,
    sample_view,
    write_grid_csv,
    write_marginal_csv,
)
from .audit import AuditError, AuditLeak, AuditResult, analyse_audit_file
from .averaging import (
    AveragingState,
    ConvergenceRecord,
    init_state,
    run_convergence_study,
    run_to_convergence,
    step,
    value_gap,
    write_converge_csv,
    write_plot_data,
)
from .defence import (
    FloodMessage,
    ResistanceCertificate,
    VerificationReport,
    break_short_cycles,
    certify,
    flood_cycle_probe,
    graph_fingerprint,
    verify_no_partial_solutions,
)
from .graphs import (
    AdversaryView,
    Graph,
    adversary_view,
    erdos_renyi,
    girth,
    read_edge_list,
    shortest_cycle,
    split_dynamic_node,
    stretch_to_girth,
    write_edge_list,
)
from .knowledge import (
    AdversarialKnowledge,
    GroundTruth,
    Observation,
    ReconstructedValue,
    augment_with_self_knowledge,
)
from .linalg import (
    IncrementalRref,
    PartialSolution,
    RationalMatrix,
    bareiss_rank,
    dedup_rows,
    merge_columns,
    partial_solutions,
    rref,
    solvable_set_oracle,
)

__all__ = [
    "AdversarialKnowledge",
    "AdversaryView",
    "AuditError",
    "AuditLeak",
    "AuditResult",
    "AveragingState",
    "BipartiteParams",
    "ConvergenceRecord",
    "ExperimentRecord",
    "FloodMessage",
    "Graph",
    "GroundTruth",
    "IncrementalRref",
    "NoValidGraphError",
    "Observation",
    "PartialSolution",
    "RationalMatrix",
    "ReconstructedValue",
    "ResistanceCertificate",
    "VerificationReport",
    "admissible_edge_range",
    "adversary_view",
    "analyse_audit_file",
    "augment_with_self_knowledge",
    "bareiss_rank",
    "break_short_cycles",
    "certify",
    "dedup_rows",
    "erdos_renyi",
    "flood_cycle_probe",
    "girth",
    "graph_fingerprint",
    "init_state",
    "marginal_distribution",
    "merge_columns",
    "partial_solutions",
    "read_edge_list",
    "reconstructed_count",
    "rounds_until_success",
    "rref",
    "run_convergence_study",
    "run_fraction_grid",
    "run_rounds_grid",
    "run_to_convergence",
    "sample_view",
    "shortest_cycle",
    "solvable_set_oracle",
    "split_dynamic_node",
    "step",
    "stretch_to_girth",
    "value_gap",
    "verify_no_partial_solutions",
    "write_converge_csv",
    "write_edge_list",
    "write_grid_csv",
    "write_marginal_csv",
    "write_plot_data",
]

__version__ = "0.1.0"
