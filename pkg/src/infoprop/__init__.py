"""Budget-constrained reward mechanisms for information propagation networks."""

from .errors import (
    EdgeNotOwned,
    EmptyNetwork,
    EnumerationCapExceeded,
    InfopropError,
    InvalidNetwork,
    InvalidParameters,
    NoAncestorFound,
    NotSingleAgentLayer,
    SchemeRequiresTwoFirstLayerAgents,
    UnknownFixture,
)
from .generators import GraphFamily, gen_graph, paper_fixture, random_corpus
from .mechanisms import (
    MechanismConfig,
    RewardVector,
    SchemeConfig,
    StarterConfig,
    baseline_fixed_reward,
    baseline_uniform,
    replay_trace,
    run_mechanism,
    run_scheme,
    run_starter,
    scheme_layer_total,
    starter_layer_budget,
)
from .network import (
    Layering,
    Network,
    PropagationEvent,
    compute_layering,
    hide_edges,
    load_network,
    single_layer_context,
    validate_network,
)
from .properties import check_accounting, check_pic, check_time_efficiency, run_property_suite

__version__ = "0.1.0"
