"""Fair cut cover: exact LP values, SDP rounding baselines and QAOA statevector training."""

__version__ = "0.1.0"

from .cuts import CutDistribution, edge_cut_probabilities, min_edge_probability, symmetrize_z2
from .errors import BudgetError, ConvergenceError, FaircutError, GenerationError, ParameterError
from .errors import VerificationError
from .exact import LpReport, solve_exact, verify_duality
from .graphs import Graph, GraphFamily, build_named, load_graph
from .qsim import CircuitSpec, build_dqaoa_spec, build_spec, edge_probabilities, run_circuit
from .rounding import round_hyperplane
from .sdp import Embedding, SdpReport, solve_sdp
from .trainer import Objective, TrainConfig, TrainResult, grid_optimize_k1_std, train, train_multi

__all__ = [
    "__version__",
    "BudgetError",
    "CircuitSpec",
    "ConvergenceError",
    "CutDistribution",
    "Embedding",
    "FaircutError",
    "GenerationError",
    "Graph",
    "GraphFamily",
    "LpReport",
    "Objective",
    "ParameterError",
    "SdpReport",
    "TrainConfig",
    "TrainResult",
    "VerificationError",
    "build_dqaoa_spec",
    "build_named",
    "build_spec",
    "edge_cut_probabilities",
    "edge_probabilities",
    "grid_optimize_k1_std",
    "load_graph",
    "min_edge_probability",
    "round_hyperplane",
    "run_circuit",
    "solve_exact",
    "solve_sdp",
    "symmetrize_z2",
    "train",
    "train_multi",
    "verify_duality",
]
