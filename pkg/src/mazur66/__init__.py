"""Concrete counterexample to Mazur's Problem 66 and tools to check it numerically.

f(x, y) = sum_n phi_n(x) psi_n(y) is separately twice differentiable on
[0, 1]^2, while f'_x jumps in y at every point of A x B, with B a fat Cantor
set and A of full measure.
"""

__version__ = "0.1.0"

from .cantor import CantorSet, Interval, build_cantor, find_interval_near, in_B
from .counterexample import (
    Eval,
    Instance,
    Witness,
    assemble,
    default_instance,
    eval_all,
    make_witness,
    mixed_quotient_probe,
    witness_ladder,
)
from .kernels import (
    BumpProfile,
    KernelSchedule,
    bump_eval,
    find_point_in_tail,
    get_profile,
    in_A_n,
    make_schedule,
    phi_eval,
)

__all__ = [
    "BumpProfile",
    "CantorSet",
    "Eval",
    "Instance",
    "Interval",
    "KernelSchedule",
    "Witness",
    "assemble",
    "build_cantor",
    "bump_eval",
    "default_instance",
    "eval_all",
    "find_interval_near",
    "find_point_in_tail",
    "get_profile",
    "in_A_n",
    "in_B",
    "make_schedule",
    "make_witness",
    "mixed_quotient_probe",
    "phi_eval",
    "witness_ladder",
]
