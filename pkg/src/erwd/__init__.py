"""Elephant random walks with delays and restricted memory."""
from .kernels import HAS_NUMBA, backend_name
from .mc import Ensemble, EnsembleStats, Functional, McConfig, collect, path_stabilization, run, run_scaled
from .model import (
    DomainError,
    ERWDError,
    InitialLaw,
    MemoryRegime,
    ModelParams,
    ParameterError,
    UnsupportedModelError,
    ZeroRecallPolicy,
)
from .rng import RngStream
from .walk import Trajectory, next_step, sample_next_steps, scaled_walk, simulate, step_distribution

__version__ = "0.1.0"

__all__ = [
    "HAS_NUMBA", "backend_name",
    "Ensemble", "EnsembleStats", "Functional", "McConfig", "collect", "path_stabilization", "run", "run_scaled",
    "DomainError", "ERWDError", "InitialLaw", "MemoryRegime", "ModelParams", "ParameterError",
    "UnsupportedModelError", "ZeroRecallPolicy",
    "RngStream",
    "Trajectory", "next_step", "sample_next_steps", "scaled_walk", "simulate", "step_distribution",
]
