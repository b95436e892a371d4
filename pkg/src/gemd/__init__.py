"""Causal graph reconstruction for linear dynamic influence models."""
from .estimator import GEMD
from .experiments import (ExperimentConfig, run_faithfulness_scan, run_orientation_accuracy,
                          run_roc, verify_counterexample)
from .faithfulness import check_faithfulness, zero_measure_scan
from .graphs import (DiGraph, MultiArrowGraph, PartialGraph, StructureError, d_connected,
                     delayed_d_connected, feedthrough_d_connected, skeleton)
from .ldim import (CovarianceSource, InstabilityError, LdimModel, ModelError,
                   empirical_autocovariance, perfect_representation,
                   population_autocovariance, psd, simulate, validate)
from .lti import TransferFunction
from .models import builtin_models, example2_network
from .orientation import orient_all
from .reconstruct import GemdParams, ReconstructionResult, gemd, gemd_from_data, pairwise_scores
from .wiener import Projector, project

__all__ = [
    "GEMD", "ExperimentConfig", "run_faithfulness_scan", "run_orientation_accuracy",
    "run_roc", "verify_counterexample", "check_faithfulness", "zero_measure_scan",
    "DiGraph", "MultiArrowGraph", "PartialGraph", "StructureError", "d_connected",
    "delayed_d_connected", "feedthrough_d_connected", "skeleton", "CovarianceSource",
    "InstabilityError", "LdimModel", "ModelError", "empirical_autocovariance",
    "perfect_representation", "population_autocovariance", "psd", "simulate", "validate",
    "TransferFunction", "builtin_models", "example2_network", "orient_all", "GemdParams",
    "ReconstructionResult", "gemd", "gemd_from_data", "pairwise_scores", "Projector",
    "project",
]
