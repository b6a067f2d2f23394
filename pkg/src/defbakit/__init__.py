"""Dynamic enzyme-cost flux balance analysis with a receding prediction horizon."""
from .collocation import (DiscretizationGrid, DynamicLP, Trajectory, discretize, extract_trajectory,
                          solve_window)
from .defba import solve_defba
from .errors import (BracketFailure, DefbaError, DimensionMismatch, Infeasible,
                     InfeasibleComposition, InfeasibleIteration, MissingKcat, ModelError,
                     NonpositiveBound, NumericalFailure, SchemaError, StatusNotOptimal, TooFewPoints,
                     Unbounded, UnknownSpeciesRef, ValidationError, BlockViolation)
from .horizon import (EXPONENTIAL, LINEAR, NO_LINEAR_INCENTIVE, STAGNANT, GrowthCurve,
                      HorizonDiagnostics, classify_curve, classify_growth, compute_horizon,
                      integral_balanced, integral_linear, iteration_bound, iteration_time,
                      prediction_horizon, verify_theorem1, verify_theorem2)
from .io import (load_model, model_from_dict, model_to_dict, parse_model, parse_model_document,
                 read_trajectory_json, serialize_model, toy_model, write_trajectory)
from .lp import HighsSolver, LinearProgram, LpSolution, from_rows, solve_lp
from .network import (CompositionRule, ConstraintMatrices, MetabolicModel, Reaction, Species,
                      SystemState, assemble_matrices, objective_biomass, total_biomass)
from .rates import BalancedRate, LinearBound, max_balanced_rate, max_linear_rate
from .sdefba import IterationRecord, SdefbaConfig, SdefbaRun, run_sdefba
from .simplex import SimplexSolver

__version__ = "0.1.0"

__all__ = [
    "BalancedRate", "BlockViolation", "BracketFailure", "CompositionRule", "ConstraintMatrices",
    "DefbaError", "DimensionMismatch", "DiscretizationGrid", "DynamicLP", "EXPONENTIAL",
    "GrowthCurve", "HighsSolver", "HorizonDiagnostics", "Infeasible", "InfeasibleComposition",
    "InfeasibleIteration", "IterationRecord", "LINEAR", "LinearBound", "LinearProgram",
    "LpSolution", "MetabolicModel", "MissingKcat", "ModelError", "NO_LINEAR_INCENTIVE",
    "NonpositiveBound", "NumericalFailure", "Reaction", "STAGNANT", "SchemaError", "SdefbaConfig",
    "SdefbaRun", "SimplexSolver", "Species", "StatusNotOptimal", "SystemState", "TooFewPoints",
    "Trajectory", "Unbounded", "UnknownSpeciesRef", "ValidationError", "assemble_matrices",
    "classify_curve", "classify_growth", "compute_horizon", "discretize", "extract_trajectory",
    "from_rows", "integral_balanced", "integral_linear", "iteration_bound", "iteration_time",
    "load_model", "max_balanced_rate", "max_linear_rate", "model_from_dict", "model_to_dict",
    "objective_biomass", "parse_model", "parse_model_document", "prediction_horizon",
    "read_trajectory_json", "run_sdefba", "serialize_model", "solve_defba", "solve_lp",
    "solve_window", "total_biomass", "toy_model", "verify_theorem1", "verify_theorem2",
    "write_trajectory",
]
