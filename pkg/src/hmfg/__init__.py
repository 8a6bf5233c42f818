"""Mean field games on multi-layer hypergraphons: kernels, finite sampling,
solvers, and finite-N simulation."""

from .game import (
    MfgProblem,
    NeighborhoodMeanField,
    extend_state_space,
    rumor_problem,
    sis_problem,
    slot_state_masses,
)
from .hypergraphs import HypergraphLayer, MultiLayerHypergraph, incident_tuples, sample
from .kernels import (
    BUILTIN_NAMES,
    HypergraphonLayer,
    MultiLayerHypergraphon,
    VertexKernelGrid,
    as_layer,
    builtin,
    discretize,
    layer_density,
    step_hypergraphon,
    vertex_marginal,
)
from .meanfield import (
    ValueTable,
    best_response,
    exploitability,
    fixed_point_iteration,
    forward_propagate,
    grid_alphas,
    mf_distance,
    neighborhood_mf,
    neighborhood_mf_all,
    omd_iteration,
    uniform_policy,
)
from .simulate import (
    SimulationRun,
    agent_grid_indices,
    delta_mu,
    delta_mu_experiment,
    empirical_neighborhood_mf,
    share_policy,
    simulate_game,
)

__version__ = "0.1.0"

__all__ = [
    "MfgProblem",
    "NeighborhoodMeanField",
    "extend_state_space",
    "rumor_problem",
    "sis_problem",
    "slot_state_masses",
    "HypergraphLayer",
    "MultiLayerHypergraph",
    "incident_tuples",
    "sample",
    "BUILTIN_NAMES",
    "HypergraphonLayer",
    "MultiLayerHypergraphon",
    "VertexKernelGrid",
    "as_layer",
    "builtin",
    "discretize",
    "layer_density",
    "step_hypergraphon",
    "vertex_marginal",
    "ValueTable",
    "best_response",
    "exploitability",
    "fixed_point_iteration",
    "forward_propagate",
    "grid_alphas",
    "mf_distance",
    "neighborhood_mf",
    "neighborhood_mf_all",
    "omd_iteration",
    "uniform_policy",
    "SimulationRun",
    "agent_grid_indices",
    "delta_mu",
    "delta_mu_experiment",
    "empirical_neighborhood_mf",
    "share_policy",
    "simulate_game",
]
