"""Star-saturation numbers of graphs.

Tools for computing and bounding sat(G, K_{1,r}) — the least number of
edges in a spanning subgraph of G that has no vertex of degree r but
cannot take any further G-edge without creating one — together with the
k-independence machinery, degree-constrained factors, and reproducible
random-graph experiments that the bounds are built from.
"""

from .graph import (
    Graph,
    ParseError,
    complete_graph,
    cycle_graph,
    empty_graph,
    format_edge_list,
    graph_hash,
    induced_subgraph,
    load_edge_list,
    parse_edge_list,
    path_graph,
    petersen_graph,
    regular_circulant,
    sample_gnp,
    save_edge_list,
)
from .experiments import (
    ExperimentConfig,
    SummaryRow,
    TrialRecord,
    config_from_json,
    config_to_json,
    derive_trial_seed,
    read_records_csv,
    records_to_csv,
    run_grid,
    summarize,
    summary_to_csv,
    verify_small,
    write_records_csv,
    write_summary_csv,
)
from .factor import (
    FactorResult,
    af_embedding_condition,
    d_factor,
    d_factor_bruteforce,
    max_matching,
)
from .independence import (
    AlphaResult,
    FirstMomentInput,
    KIndependentWitness,
    alpha_k_exact,
    alpha_k_predicted_band,
    binomial_tail_upper,
    binomial_tail_upper_exact,
    clique_cover_bound,
    exact_binomial_cdf,
    first_moment_Xs,
    first_moment_Xs_exact,
    greedy_k_independent,
    is_k_independent,
)
from .params import ProbParams
from .rng import RNG_ID, RngSeed, Stream
from .saturation import (
    BoundsReport,
    LowerBound,
    ReferenceBands,
    SaturationCertificate,
    check_certificate,
    classical_sat_clique,
    classical_sat_star,
    construct_upper,
    greedy_saturated,
    reference_bands,
    sat_exact,
    sat_lower_bound,
)

__version__ = "0.1.0"
