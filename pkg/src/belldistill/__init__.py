"""Binary-symplectic model of local Bell-product permutations and multi-copy distillation."""

from .bellstate import BellDiagonal, JointBellState, werner
from .gf2core import BitMatrix, PauliVector, Subspace, SymplecticMatrix
from .pipeline import Schedule, optimize_schedule, run_recurrence
from .protocol import DistillationStep, apply_step, dej_step, make_step, proposed_step
from .search import Objective, best_step

__all__ = [
    "BellDiagonal",
    "BitMatrix",
    "DistillationStep",
    "JointBellState",
    "Objective",
    "PauliVector",
    "Schedule",
    "Subspace",
    "SymplecticMatrix",
    "apply_step",
    "best_step",
    "dej_step",
    "make_step",
    "optimize_schedule",
    "proposed_step",
    "run_recurrence",
    "werner",
]
__version__ = "0.1.0"
